use std::fmt;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use shiftlab::certify::{almost_glue, weak_glue, weak_spec_report, GlueResult};
use shiftlab::counting::{check_condition, CountTable};
use shiftlab::ct::{check_cond_ii, decompose, entropy_compare, extend_to_good};
use shiftlab::factor::{dichotomy_report, subsystem_count, verify_factor_language, BlockMap};
use shiftlab::product::{
    refute_almost_spec, replay, verify_tracing, weak_glue_product, window_valid, Epsilon, GlueSpec,
    MistakeFunction, TracingMode,
};
use shiftlab::{Error, ErrorKind, Params, RestrictionFamily, Word, XrShift};

use crate::output::{Format, Report};
use crate::{Cli, Command, Counterexample, Shift};

pub const ENUMERATION_CAP: usize = 12;
pub const COUNT_HORIZON_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GlueMode {
    Weak,
    Almost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WordClassArg {
    Allowed,
    Good,
    Free,
    Restricted,
}

#[derive(Debug)]
pub enum Fail {
    Violated { property: String, detail: String },
    Usage(String),
    Cap(String),
}

impl Fail {
    pub fn code(&self) -> u8 {
        match self {
            Fail::Violated { .. } => 1,
            Fail::Usage(_) => 2,
            Fail::Cap(_) => 3,
        }
    }

    fn violated(property: &str, detail: impl Into<String>) -> Fail {
        Fail::Violated {
            property: property.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fail::Violated { property, detail } => write!(f, "property violated: {property}: {detail}"),
            Fail::Usage(m) => write!(f, "usage error: {m}"),
            Fail::Cap(m) => write!(f, "resource cap: {m}"),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e.kind() {
            ErrorKind::Usage => Fail::Usage(e.to_string()),
            ErrorKind::Resource => Fail::Cap(format!("{e}; pass --force to override")),
            ErrorKind::Failure => Fail::violated("construction", e.to_string()),
        }
    }
}

type Outcome = Result<u8, Fail>;

struct Ctx {
    force: bool,
}

impl Ctx {
    fn cap(&self, what: &str, n: usize, cap: usize) -> Result<usize, Fail> {
        if n <= cap {
            return Ok(cap);
        }
        if !self.force {
            return Err(Fail::Cap(format!(
                "{what} {n} exceeds the cap {cap}; pass --force to override"
            )));
        }
        eprintln!("shiftlab: warning: {what} {n} exceeds the cap {cap}; continuing because of --force");
        Ok(n)
    }

    fn enum_cap(&self, n: usize) -> Result<usize, Fail> {
        self.cap("enumeration length", n, ENUMERATION_CAP)
    }

    fn horizon(&self, n: usize) -> Result<(), Fail> {
        self.cap("count horizon", n, COUNT_HORIZON_CAP).map(|_| ())
    }
}

fn family(spec: &str) -> Result<RestrictionFamily, Fail> {
    match RestrictionFamily::by_name(spec) {
        Ok(f) => Ok(f),
        Err(e) if !Path::new(spec).exists() => Err(e.into()),
        Err(_) => {
            let text = std::fs::read_to_string(spec).map_err(|e| Fail::Usage(format!("family file {spec}: {e}")))?;
            Ok(RestrictionFamily::from_json(&text)?)
        }
    }
}

fn shift(s: &Shift) -> Result<XrShift, Fail> {
    Ok(XrShift::new(Params::new(s.p, s.q)?, family(&s.family)?))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn epsilon(s: &str) -> Result<Epsilon, Fail> {
    Ok(s.parse::<Epsilon>()?)
}

/// A report, its default format, and the property it violates, if any.
struct Done {
    report: Report,
    default: Format,
    violation: Option<(String, String)>,
}

impl Done {
    fn ok(report: Report, default: Format) -> Done {
        Done {
            report,
            default,
            violation: None,
        }
    }

    fn check(mut self, holds: bool, property: &str, detail: impl FnOnce() -> String) -> Done {
        if !holds && self.violation.is_none() {
            self.violation = Some((property.into(), detail()));
        }
        self
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx {
        force: cli.global.force,
    };
    let done = dispatch(&ctx, &cli.command)?;
    let text = done.report.render(cli.global.format.unwrap_or(done.default));
    match &cli.global.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Fail::Usage(format!("stdout: {e}")))?;
        }
    }
    match done.violation {
        Some((property, detail)) => Err(Fail::Violated { property, detail }),
        None => Ok(0),
    }
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> Result<Done, Fail> {
    match cmd {
        Command::Count { shift: s, n, brute_check } => count(ctx, s, *n, *brute_check),
        Command::Condition { shift: s, cutoff } => {
            let fam = family(&s.family)?;
            let r = check_condition(s.p, s.q, &fam, *cutoff)?;
            Ok(Done::ok(Report::doc(&r), Format::Json))
        }
        Command::Gaps { family: f, kmax } => {
            ctx.horizon(*kmax as usize)?;
            let profile = weak_spec_report(&family(f)?, *kmax)?;
            let rows = profile
                .rows
                .iter()
                .map(|r| vec![r.k.to_string(), r.n_k.to_string(), format!("{:.12}", r.ratio)])
                .collect();
            Ok(Done::ok(
                Report::Table {
                    headers: vec!["k", "N_k", "ratio"],
                    rows,
                },
                Format::Csv,
            ))
        }
        Command::Glue { shift: s, mode, segments } => glue(s, *mode, segments),
        Command::CtCheck { shift: s, big_m, nmax, len } => ct_check(ctx, s, *big_m, *nmax, *len),
        Command::Factor {
            from_p,
            to_p,
            q,
            family: f,
            n,
            verify,
        } => {
            let cap = ctx.enum_cap(*n)?;
            let fam = family(f)?;
            let map = BlockMap::merge(*from_p, *to_p, *q)?;
            let verified = if *verify {
                Some(verify_factor_language(&map, &fam, *n, cap)?)
            } else {
                None
            };
            let subsystems: Vec<_> = (1..=*to_p)
                .map(|a| -> Result<_, Fail> {
                    Ok(json!({"color": a, "count": subsystem_count(map.target(), a, *n as u32)?.to_string()}))
                })
                .collect::<Result<_, _>>()?;
            let report = json!({
                "source": {"p": from_p, "q": q},
                "target": {"p": to_p, "q": q},
                "family": fam.name(),
                "n": n,
                "verified": verified,
                "subsystems": subsystems,
            });
            Ok(Done::ok(Report::Doc(report), Format::Json).check(verified != Some(false), "factor language", || {
                format!("the merge image of B_{n} differs from B_{n} of the target")
            }))
        }
        Command::Dichotomy { shift: s } => {
            let r = dichotomy_report(s.p, s.q, &family(&s.family)?)?;
            Ok(Done::ok(Report::doc(&r), Format::Json))
        }
        Command::Enumerate { shift: s, n, class } => {
            let cap = ctx.enum_cap(*n)?;
            let x = shift(s)?;
            let mut rows = Vec::new();
            for w in x.enumerate_allowed(*n, cap)? {
                let keep = match class {
                    WordClassArg::Allowed => true,
                    WordClassArg::Good => x.is_good(&w)?,
                    WordClassArg::Free => x.is_free(&w)?,
                    WordClassArg::Restricted => x.is_restricted(&w)?,
                };
                if keep {
                    rows.push(vec![w.to_string()]);
                }
            }
            Ok(Done::ok(
                Report::Table {
                    headers: vec!["word"],
                    rows,
                },
                Format::Csv,
            ))
        }
        Command::Counterexample { action } => match action {
            Counterexample::Glue { eps, spec } => product_glue(&epsilon(eps)?, spec),
            Counterexample::Refute { g, eps0 } => {
                let g = MistakeFunction::by_name(g, epsilon(eps0)?)?;
                let cert = refute_almost_spec(&g)?;
                let r = replay(&cert);
                let failed = r.failed_steps().join(", ");
                let passed = r.passed;
                let contradiction = r.contradiction;
                let report = Report::doc(&json!({"certificate": cert, "replay": r}));
                Ok(Done::ok(report, Format::Json).check(passed, "certificate replay", || {
                    if failed.is_empty() && !contradiction {
                        "no contradiction between the established facts".into()
                    } else {
                        format!("failed steps: {failed}")
                    }
                }))
            }
        },
    }
}

fn count(ctx: &Ctx, s: &Shift, n: usize, brute: Option<usize>) -> Result<Done, Fail> {
    ctx.horizon(n)?;
    let brute_cap = brute.map(|k| ctx.enum_cap(k)).transpose()?;
    let x = shift(s)?;
    let horizon = n.max(brute.unwrap_or(0));
    let table = CountTable::build(x.params(), x.family(), horizon)?;
    let rows = table
        .rows()
        .take(n + 1)
        .map(|r| {
            vec![
                r.n.to_string(),
                r.free.to_string(),
                r.good.to_string(),
                r.allowed.to_string(),
                r.entropy.map(|e| format!("{e:.12}")).unwrap_or_default(),
            ]
        })
        .collect();
    let mut done = Done::ok(
        Report::Table {
            headers: vec!["n", "F", "G", "B", "entropy_estimate"],
            rows,
        },
        Format::Csv,
    );
    if let (Some(k), Some(cap)) = (brute, brute_cap) {
        for m in 0..=k {
            let exact = table.allowed_count(m)?;
            let seen = BigUint::from(x.count_allowed_brute(m, cap)?);
            done = done.check(*exact == seen, "counting oracle", || {
                format!("|B_{m}| is {exact} by recurrence but {seen} by enumeration")
            });
        }
    }
    Ok(done)
}

fn glue(s: &Shift, mode: GlueMode, path: &Path) -> Result<Done, Fail> {
    let x = shift(s)?;
    let texts: Vec<String> = read_json(path)?;
    let words = texts
        .iter()
        .map(|t| t.parse::<Word>())
        .collect::<Result<Vec<_>, _>>()?;
    let result = match mode {
        GlueMode::Almost => almost_glue(&x, &words)?,
        GlueMode::Weak => {
            let mut iter = words.iter();
            let first = iter
                .next()
                .ok_or_else(|| Fail::Usage("weak gluing needs at least one segment".into()))?;
            let mut acc = GlueResult {
                output: first.clone(),
                mistakes: vec![0],
                budgets: Vec::new(),
                transitions: Vec::new(),
                transition_words: Vec::new(),
            };
            for w in iter {
                let step = weak_glue(&x, &acc.output, w)?;
                acc.output = step.output;
                acc.mistakes.push(0);
                acc.transitions.extend(step.transitions);
                acc.transition_words.extend(step.transition_words);
            }
            acc
        }
    };
    let allowed = x.is_allowed(&result.output)?;
    let within = result.budgets.is_empty()
        || result.mistakes.iter().zip(&result.budgets).all(|(m, b)| m <= b);
    let property = match mode {
        GlueMode::Weak => "weak specification",
        GlueMode::Almost => "almost specification",
    };
    Ok(Done::ok(Report::doc(&result), Format::Json)
        .check(allowed, property, || "glued word is not allowed".into())
        .check(within, property, || "a segment exceeds its mistake budget".into()))
}

#[derive(Serialize)]
struct CondReport {
    pass: bool,
    checked: u64,
}

fn ct_check(ctx: &Ctx, s: &Shift, big_m: u64, nmax: usize, len: usize) -> Result<Done, Fail> {
    let cap = ctx.enum_cap(len)?;
    ctx.horizon(nmax)?;
    let x = shift(s)?;
    let mut words = Vec::new();
    for n in 0..=len {
        words.extend(x.enumerate_allowed(n, cap)?);
    }

    let mut cond_i = CondReport { pass: true, checked: 0 };
    let mut bad_i = None;
    for w in &words {
        let d = decompose(&x, w)?;
        let prefix_ok = d.prefix.first().is_none_or(|s0| {
            d.prefix.iter().all(|t| !t.is_marker() && t.color == s0.color)
        });
        let ok = d.reassemble() == *w && prefix_ok && x.is_good(&d.good)? && d.suffix.is_empty();
        cond_i.checked += 1;
        if !ok && bad_i.is_none() {
            bad_i = Some(w.to_string());
        }
        cond_i.pass &= ok;
    }

    let goods: Vec<&Word> = words
        .iter()
        .filter(|w| w.len() <= len.min(3))
        .filter(|w| x.is_good(w).unwrap_or(false))
        .collect();
    let mut cond_ii = CondReport { pass: true, checked: 0 };
    let mut bad_ii = None;
    for a in &goods {
        for b in &goods {
            let ok = check_cond_ii(&x, &[(*a).clone(), (*b).clone()])?;
            cond_ii.checked += 1;
            if !ok && bad_ii.is_none() {
                bad_ii = Some(format!("{a} | {b}"));
            }
            cond_ii.pass &= ok;
        }
    }

    let mut tau = None;
    let mut max_used = 0usize;
    let mut checked = 0u64;
    let mut bad_iii = None;
    for w in &words {
        if decompose(&x, w)?.prefix.len() as u64 > big_m {
            continue;
        }
        let ext = extend_to_good(&x, w, big_m)?;
        tau = Some(ext.tau);
        max_used = max_used.max(ext.left.len());
        let ok = ext.left.len() as u64 <= ext.tau && x.is_good(&ext.left.concat(w))?;
        checked += 1;
        if !ok && bad_iii.is_none() {
            bad_iii = Some(w.to_string());
        }
    }
    let pass_iii = bad_iii.is_none();
    let entropy = entropy_compare(&x, nmax)?;
    let bound_ok = entropy.bound_holds || entropy.condition.verdict != shiftlab::counting::Verdict::Holds;
    let report = json!({
        "cond_I": cond_i,
        "cond_II": cond_ii,
        "cond_III": {"pass": pass_iii, "checked": checked, "tau": tau, "max_used": max_used, "M": big_m},
        "entropy_compare": entropy,
    });
    Ok(Done::ok(Report::Doc(report), Format::Json)
        .check(bad_i.is_none(), "condition (I) decomposition", || format!("word {}", bad_i.unwrap_or_default()))
        .check(bad_ii.is_none(), "condition (II) gluing", || format!("pair {}", bad_ii.unwrap_or_default()))
        .check(pass_iii, "condition (III) extension", || format!("word {}", bad_iii.unwrap_or_default()))
        .check(bound_ok, "good-word bound G_n <= q^n", || "bound fails while the condition holds".into()))
}

fn product_glue(eps: &Epsilon, path: &Path) -> Result<Done, Fail> {
    let specs: Vec<GlueSpec> = read_json(path)?;
    let window = weak_glue_product(&specs, *eps)?;
    let valid = window_valid(&window);
    let mut tracing = Vec::with_capacity(specs.len());
    let mut bad = None;
    for (k, s) in specs.iter().enumerate() {
        let t = verify_tracing(&window, &s.window, s.alpha, s.beta, *eps, TracingMode::Exact)?;
        if !t.ok && bad.is_none() {
            bad = Some(k + 1);
        }
        tracing.push(json!({"segment": k + 1, "ok": t.ok}));
    }
    let report = json!({"eps": eps, "window": window, "valid": valid, "tracing": tracing});
    Ok(Done::ok(Report::Doc(report), Format::Json)
        .check(valid, "window validity", || "a row leaves its shift or b does not persist".into())
        .check(bad.is_none(), "weak specification tracing", || {
            format!("segment {} is not traced", bad.unwrap_or(0))
        }))
}
