use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A command result, rendered in any format.
pub enum Report {
    Table { headers: Vec<&'static str>, rows: Vec<Vec<String>> },
    Doc(Value),
}

impl Report {
    pub fn doc<T: serde::Serialize>(value: &T) -> Report {
        Report::Doc(serde_json::to_value(value).expect("report serializes"))
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Report::Table { headers, rows }, Format::Json) => {
                let items: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = headers
                            .iter()
                            .zip(r)
                            .map(|(h, v)| (h.to_string(), Value::String(v.clone())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                pretty(&Value::Array(items))
            }
            (Report::Table { headers, rows }, Format::Csv) => {
                let mut out = headers.join(",");
                out.push('\n');
                for r in rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
                out
            }
            (Report::Table { headers, rows }, Format::Text) => {
                let widths: Vec<usize> = (0..headers.len())
                    .map(|i| rows.iter().map(|r| r[i].len()).chain([headers[i].len()]).max().unwrap_or(0))
                    .collect();
                let line = |cells: Vec<&str>| {
                    let mut s = String::new();
                    for (i, c) in cells.iter().enumerate() {
                        if i > 0 {
                            s.push_str("  ");
                        }
                        let _ = write!(s, "{c:>w$}", w = widths[i]);
                    }
                    s.push('\n');
                    s
                };
                let mut out = line(headers.clone());
                for r in rows {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                }
                out
            }
            (Report::Doc(v), Format::Json) => pretty(v),
            (Report::Doc(v), Format::Csv) => {
                let mut out = String::from("key,value\n");
                for (k, val) in flatten(v) {
                    let _ = writeln!(out, "{k},{}", csv_field(&val));
                }
                out
            }
            (Report::Doc(v), Format::Text) => {
                let mut out = String::new();
                for (k, val) in flatten(v) {
                    let _ = writeln!(out, "{k} = {val}");
                }
                out
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Leaves of a JSON document as dotted paths, in key order.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(v: &Value, path: String, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    go(x, join(k), out);
                }
            }
            Value::Array(a) if !a.is_empty() => {
                for (i, x) in a.iter().enumerate() {
                    go(x, join(&i.to_string()), out);
                }
            }
            Value::String(s) => out.push((path, s.clone())),
            other => out.push((path, other.to_string())),
        }
    }
    let mut out = Vec::new();
    go(v, String::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn table_formats() {
        let t = Report::Table {
            headers: vec!["k", "v"],
            rows: vec![vec!["1".into(), "10".into()]],
        };
        assert_eq!(t.render(Format::Csv), "k,v\n1,10\n");
        assert_eq!(t.render(Format::Text), "k   v\n1  10\n");
        let parsed: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(parsed, json!([{"k": "1", "v": "10"}]));
    }

    #[test]
    fn doc_flattening() {
        let d = Report::Doc(json!({"b": {"x": 1, "y": [true, "s,t"]}, "a": null}));
        assert_eq!(d.render(Format::Text), "a = null\nb.x = 1\nb.y.0 = true\nb.y.1 = s,t\n");
        assert_eq!(d.render(Format::Csv), "key,value\na,null\nb.x,1\nb.y.0,true\nb.y.1,\"s,t\"\n");
    }
}
