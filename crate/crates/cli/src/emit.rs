//! Report rendering: JSON documents, or CSV tables headed by the echoed config.

use serde_json::{Map, Value};

/// JSON number, with non-finite values spelled out (JSON has no infinity).
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn row(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn cell(v: &Value) -> String {
    let s = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// `# config=<json>` then a header from the union of keys (first-seen order) and one line per row.
pub fn csv(config: &Value, rows: &[Map<String, Value>]) -> String {
    let mut keys: Vec<String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    let mut out = format!("# config={config}\n");
    out.push_str(&keys.iter().map(|k| cell(&Value::from(k.as_str()))).collect::<Vec<_>>().join(","));
    out.push('\n');
    for r in rows {
        let line: Vec<String> = keys.iter().map(|k| r.get(k).map(cell).unwrap_or_default()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
