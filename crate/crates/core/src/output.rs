//! Deterministic text output: numbers rounded to 12 significant digits and
//! JSON objects with sorted keys.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let y: f64 = s.parse().expect("formatted float parses");
    if y == 0.0 { 0.0 } else { y }
}

pub fn format_number(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or_default());
            *v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with sorted keys and rounded floats, newline-terminated.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-123456.78901234567), -123456.789012);
        assert_eq!(format_number(1e-20 / 3.0), "0.00000000000000000000333333333333");
        assert_eq!(format_number(2.0), "2");
    }

    #[test]
    fn sorted_and_rounded() {
        let s = to_json_string(&json!({"b": 0.1 + 0.2, "a": [1, 2.0000000000001], "c": null})).unwrap();
        assert_eq!(s, "{\n  \"a\": [\n    1,\n    2.0\n  ],\n  \"b\": 0.3,\n  \"c\": null\n}\n");
    }
}
