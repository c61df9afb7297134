use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::Value;

use super::context::{FieldContext, FieldKind};
use super::exact::Exact;
use super::scalar::UltraScalar;
use crate::error::{Error, Result};

fn fmt_poly(c: &[u32]) -> String {
    let parts: Vec<String> = c.iter().map(|d| d.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn exact_text(e: &Exact) -> String {
    match e {
        Exact::Rational(q) => format!("{}/{}", q.numer(), q.denom()),
        Exact::RatFn { num, den } => format!("{}/{}", fmt_poly(num), fmt_poly(den)),
    }
}

impl fmt::Display for UltraScalar {
    /// `17^2 * (3 + 0*17 + 5*17^2) + O(17^5)`; apparent zeros print as
    /// `O(17^c)`, exact elements as `exact(n/d)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(e) = self.exact_repr() {
            return write!(f, "exact({})", exact_text(e));
        }
        let sym = self.context().symbol();
        let (lo, hi) = self.interval().expect("zealous element");
        if lo == hi {
            return write!(f, "O({sym}^{hi})");
        }
        let digits = self.digits().expect("zealous element");
        let terms: Vec<String> = digits
            .iter()
            .enumerate()
            .map(|(i, d)| match i {
                0 => d.to_string(),
                1 => format!("{d}*{sym}"),
                _ => format!("{d}*{sym}^{i}"),
            })
            .collect();
        write!(f, "{sym}^{lo} * ({}) + O({sym}^{hi})", terms.join(" + "))
    }
}

impl Serialize for UltraScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(e) = self.exact_repr() {
            let mut map = s.serialize_map(Some(1))?;
            map.serialize_entry("exact", &exact_text(e))?;
            return map.end();
        }
        let (lo, hi) = self.interval().expect("zealous element");
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("a", &lo)?;
        map.serialize_entry("b", &hi)?;
        map.serialize_entry("digits", &self.digits().expect("zealous element"))?;
        map.end()
    }
}

fn parse_poly(s: &str) -> Option<Vec<u32>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|c| c.trim().parse().ok()).collect()
}

impl UltraScalar {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("scalar serialization is infallible")
    }

    /// Inverse of the JSON serialization.
    pub fn from_json(ctx: &FieldContext, v: &Value) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a scalar: {v}"));
        if let Some(e) = v.get("exact") {
            let text = e.as_str().ok_or_else(bad)?;
            let (n, d) = match ctx.kind() {
                FieldKind::PAdic => text.split_once('/').ok_or_else(bad)?,
                FieldKind::PowerSeries => text.split_once("]/").ok_or_else(bad)?,
            };
            return match ctx.kind() {
                FieldKind::PAdic => {
                    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                    if d == BigInt::from(0) {
                        return Err(bad());
                    }
                    Self::from_rational(ctx, BigRational::new(n, d))
                }
                FieldKind::PowerSeries => {
                    let num = parse_poly(&format!("{n}]")).ok_or_else(bad)?;
                    let den = parse_poly(d).ok_or_else(bad)?;
                    Self::from_rational_function(ctx, &num, &den)
                }
            };
        }
        let a = v.get("a").and_then(Value::as_i64).ok_or_else(bad)?;
        let b = v.get("b").and_then(Value::as_i64).ok_or_else(bad)?;
        let digits: Vec<u64> = v
            .get("digits")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|d| d.as_u64().ok_or_else(bad))
            .collect::<Result<_>>()?;
        let x = Self::from_digits(ctx, a, b, &digits)?;
        if x.interval() != Some((a, b)) {
            return Err(Error::InvalidArgument(format!("scalar {v} is not normalized")));
        }
        Ok(x)
    }
}
