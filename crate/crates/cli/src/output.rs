//! Rendering of results as JSON or CSV.
//!
//! Every float is rounded to 12 significant digits before printing, so
//! output is stable across thread counts and platforms with correctly
//! rounded libm.

use serde_json::Value;

/// Round to 12 significant digits; non-finite values become `null`.
pub fn round12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

/// Apply [`round12`] to every float in a JSON tree.
pub fn round_tree(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round12(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(round_tree).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_tree(v))).collect()),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows of flat objects as CSV, columns in the key order of the first row.
/// A single object is treated as one row; nested values are written as JSON.
pub fn to_csv(v: &Value) -> String {
    let rows: Vec<&serde_json::Map<String, Value>> = match v {
        Value::Array(a) => a.iter().filter_map(Value::as_object).collect(),
        Value::Object(o) => vec![o],
        _ => return format!("{}\n", cell(v)),
    };
    let Some(first) = rows.first() else { return String::new() };
    let header: Vec<&String> = first.keys().collect();
    let mut out = header.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(1.6449340668482264), json!(1.64493406685));
        assert_eq!(round12(0.25), json!(0.25));
        assert_eq!(round12(f64::INFINITY), Value::Null);
    }

    #[test]
    fn csv_from_rows() {
        let v = json!([{ "s": 0.0, "delta": 1.5 }, { "s": 1.0, "delta": null }]);
        assert_eq!(to_csv(&v), "s,delta\n0.0,1.5\n1.0,\n");
    }
}
