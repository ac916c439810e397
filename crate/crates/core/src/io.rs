//! JSON documents and canonical serialization.
//!
//! Canonical output sorts object keys and prints every float with 17
//! significant digits (`%.17g`), so equal values always produce equal bytes
//! and every float parses back to the same bit pattern.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::poly::SparseQPolynomial;
use crate::quat::Quaternion;
use crate::roots::{Zero, ZeroSet};

/// Parses `{"terms": [{"exp": n, "coeff": [w, x, y, z]}, ...]}`.
///
/// Exponents must be nonnegative integers in strictly increasing order.
pub fn parse_polynomial(text: &str) -> Result<SparseQPolynomial> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    polynomial_from_value(&doc)
}

pub fn polynomial_from_value(doc: &Value) -> Result<SparseQPolynomial> {
    let terms = doc
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected an object with a `terms` array".into()))?;
    let mut parsed = Vec::with_capacity(terms.len());
    for (i, term) in terms.iter().enumerate() {
        let exp = match term.get("exp") {
            Some(Value::Number(n)) => n
                .as_u64()
                .and_then(|e| u32::try_from(e).ok())
                .ok_or_else(|| Error::Parse(format!("term {i}: exponent {n} is not a nonnegative 32-bit integer")))?,
            _ => return Err(Error::Parse(format!("term {i}: missing integer `exp`"))),
        };
        let coeff = term
            .get("coeff")
            .and_then(Value::as_array)
            .filter(|c| c.len() == 4)
            .ok_or_else(|| Error::Parse(format!("term {i}: `coeff` must be an array of 4 numbers")))?;
        let mut c = [0.0; 4];
        for (slot, v) in c.iter_mut().zip(coeff) {
            *slot = v
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("term {i}: `coeff` entries must be numbers")))?;
        }
        parsed.push((exp, Quaternion::from(c)));
    }
    SparseQPolynomial::new(parsed)
}

/// The polynomial document; zero interior coefficients are not stored.
pub fn polynomial_to_value(p: &SparseQPolynomial) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|t| json!({ "exp": t.exp, "coeff": t.coeff.to_array() }))
        .collect();
    json!({ "terms": terms })
}

pub fn zero_set_to_value(zs: &ZeroSet) -> Value {
    let zeros: Vec<Value> = zs
        .zeros
        .iter()
        .map(|z| match z {
            Zero::Point { q, multiplicity, residual } => json!({
                "type": "point",
                "q": q.to_array(),
                "mult": multiplicity,
                "residual": residual,
            }),
            Zero::Sphere { x, y, multiplicity, residual } => json!({
                "type": "sphere",
                "x": x,
                "y": y,
                "mult": multiplicity,
                "residual": residual,
            }),
        })
        .collect();
    json!({
        "zeros": zeros,
        "maxModulus": zs.max_modulus(),
        "totalMultiplicity": zs.total_multiplicity,
        "unresolved": zs.unresolved,
    })
}

/// `%.17g`; non-finite values have no JSON form and print as `null`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Compact JSON with sorted keys and `%.17g` floats.
pub fn canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

pub fn to_canonical<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    Ok(canonical_string(&v))
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_g17(n.as_f64().expect("f64 number")));
            } else {
                write!(out, "{n}").expect("string write");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => write_object(out, map),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>) {
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, key) in keys.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&Value::String(key.clone()).to_string());
        out.push(':');
        write_value(out, &map[key]);
    }
    out.push('}');
}
