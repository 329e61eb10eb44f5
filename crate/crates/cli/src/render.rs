//! Deterministic JSON and CSV rendering.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use tnum_core::AbsValue;

/// Exact rational as "a/b" alongside a display-only float.
pub fn rational(r: &BigRational) -> Value {
    json!({ "exact": r.to_string(), "approx": r.to_f64().map(|x| format!("{x:.4}")) })
}

pub fn opt_rational(r: Option<&BigRational>) -> Value {
    r.map_or(Value::Null, rational)
}

pub fn int(n: impl ToString) -> Value {
    Value::String(n.to_string())
}

/// A valuation v with its "q^-v" rendering.
pub fn valuation(v: &BigInt) -> Value {
    json!({ "valuation": v.to_string(), "abs": AbsValue::Exact(v.clone()).to_string() })
}

pub fn abs(a: &AbsValue) -> Value {
    let (kind, v) = match a {
        AbsValue::Zero => ("zero", None),
        AbsValue::Exact(v) => ("exact", Some(v.to_string())),
        AbsValue::Below(v) => ("below", Some(v.to_string())),
    };
    json!({ "kind": kind, "valuation": v, "abs": a.to_string() })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV");
    for r in rows {
        w.write_record(r).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV of UTF-8 fields")
}
