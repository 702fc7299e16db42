//! JSON and CSV rendering.
//!
//! JSON keeps struct field order and prints floats in shortest round-trip
//! form, so equal inputs give byte-identical documents. Non-finite floats
//! become `null`; optional fields are omitted instead, so a `null` in a
//! document always marks a non-finite number.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

pub fn to_json<T: Serialize>(doc: &T) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(doc)?;
    normalize_zeros(&mut v);
    Ok(v)
}

// −0.0 and 0.0 are the same answer; print one of them.
fn normalize_zeros(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.as_f64() == Some(0.0) && n.is_f64() {
                *v = Value::from(0.0);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_zeros),
        Value::Object(map) => map.values_mut().for_each(normalize_zeros),
        _ => {}
    }
}

pub fn has_null(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Array(items) => items.iter().any(has_null),
        Value::Object(map) => map.values().any(has_null),
        _ => false,
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a Value always serializes");
    s.push('\n');
    s
}

/// Shortest round-trip text of a float.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    format!("{x:?}")
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// One-row CSV of a document's scalar fields; complex pairs [re, im] become
/// `name_re,name_im`, nested objects are prefixed with their key.
pub fn flat_csv(v: &Value) -> String {
    let mut header = Vec::new();
    let mut row = Vec::new();
    flatten("", v, &mut header, &mut row);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(&header, &[row])
}

fn flatten(prefix: &str, v: &Value, header: &mut Vec<String>, row: &mut Vec<String>) {
    let key = |suffix: &str| {
        if prefix.is_empty() {
            suffix.to_string()
        } else if suffix.is_empty() {
            prefix.to_string()
        } else {
            format!("{prefix}_{suffix}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                flatten(&key(k), item, header, row);
            }
        }
        Value::Array(items) if items.len() == 2 && items.iter().all(Value::is_number) => {
            header.push(key("re"));
            header.push(key("im"));
            row.extend(items.iter().map(scalar));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), item, header, row);
            }
        }
        _ => {
            header.push(key(""));
            row.push(scalar(v));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "NaN".into(),
        other => other.to_string(),
    }
}

pub fn complex_cells(z: Option<Complex64>) -> [String; 2] {
    match z {
        Some(z) => [fmt_f64(z.re), fmt_f64(z.im)],
        None => ["NaN".into(), "NaN".into()],
    }
}
