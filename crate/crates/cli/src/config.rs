use serde_json::Value;

/// Replaces `--config path` by the flags in the JSON object at `path`.
/// A key is a long flag name; `true` becomes a bare switch and `false` or
/// `null` is skipped. Flags already on the command line are kept as given.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut args = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            args.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("config {path}: {e}"))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))?;
    let Value::Object(map) = doc else {
        return Err(format!("config {path}: expected a JSON object"));
    };
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let given = args
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => args.push(flag),
            Value::String(s) => args.extend([flag, s]),
            Value::Number(n) => args.extend([flag, n.to_string()]),
            other => return Err(format!("config {path}: key {key} has unsupported value {other}")),
        }
    }
    Ok(args)
}

/// Sizes the worker pool from `SHIFTLAB_THREADS` when it is set.
pub fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SHIFTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SHIFTLAB_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}
