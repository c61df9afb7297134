use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which complete discrete-valuation field the elements live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    /// The p-adic numbers Q_p, uniformizer p.
    PAdic,
    /// Laurent series F_p((t)) over a prime field, uniformizer t.
    PowerSeries,
}

/// The field an [`UltraScalar`](super::UltraScalar) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldContext {
    kind: FieldKind,
    p: u32,
}

/// Largest residue characteristic accepted for power series; keeps every
/// coefficient product inside 32 bits.
pub const MAX_SERIES_PRIME: u64 = 1 << 16;

impl FieldContext {
    pub fn new(kind: FieldKind, p: u64) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidPrime(p));
        }
        if kind == FieldKind::PowerSeries && p >= MAX_SERIES_PRIME {
            return Err(Error::InvalidPrime(p));
        }
        Ok(FieldContext { kind, p: p as u32 })
    }

    pub fn p_adic(p: u64) -> Result<Self> {
        Self::new(FieldKind::PAdic, p)
    }

    pub fn power_series(p: u64) -> Result<Self> {
        Self::new(FieldKind::PowerSeries, p)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Printable uniformizer: the prime itself for Q_p, `t` for series.
    pub fn symbol(&self) -> String {
        match self.kind {
            FieldKind::PAdic => self.p.to_string(),
            FieldKind::PowerSeries => "t".to_string(),
        }
    }

    pub(crate) fn check(&self, other: &FieldContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch(*self, *other))
        }
    }
}

impl fmt::Display for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::PAdic => write!(f, "Q_{}", self.p),
            FieldKind::PowerSeries => write!(f, "F_{}((t))", self.p),
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u32, u64), BigUint>> = RefCell::new(HashMap::new());
}

/// `p^k` as a big integer, memoized per thread.
pub(crate) fn p_pow(p: u32, k: u64) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    POW_CACHE.with(|cache| {
        if let Some(v) = cache.borrow().get(&(p, k)) {
            return v.clone();
        }
        let v = BigUint::from(p).pow(k as u32);
        let mut c = cache.borrow_mut();
        if c.len() > 4096 {
            c.clear();
        }
        c.insert((p, k), v.clone());
        v
    })
}

/// Little-endian base-`p` digits of `n`, padded with zeros to `len` entries.
pub(crate) fn base_p_digits(n: &BigUint, p: u32, len: usize) -> Vec<u64> {
    let mut out: Vec<u64> = if n.is_zero() {
        Vec::new()
    } else if p <= 256 {
        n.to_radix_le(p).into_iter().map(u64::from).collect()
    } else {
        let mut v = Vec::new();
        let mut m = n.clone();
        let pb = BigUint::from(p);
        while !m.is_zero() {
            let r = &m % &pb;
            v.push(r.iter_u64_digits().next().unwrap_or(0));
            m /= &pb;
        }
        v
    };
    out.resize(len.max(out.len()), 0);
    out.truncate(len);
    out
}

/// Inverse of base-`p` digit extraction.
pub(crate) fn from_base_p(digits: &[u64], p: u32) -> BigUint {
    let mut acc = BigUint::zero();
    for &d in digits.iter().rev() {
        acc = acc * p + d;
    }
    acc
}
