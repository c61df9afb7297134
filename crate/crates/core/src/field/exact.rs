//! Exact elements: rationals inside Q_p and rational functions inside F_p((t)).
//!
//! These carry infinite precision. They appear as integer constants of a
//! polynomial system, as the exact zeros of an update vector, and as the
//! backend of exact-oracle computations used to check zealous results.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::context::{p_pow, FieldContext, FieldKind};
use super::fp_poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Exact {
    Rational(BigRational),
    /// `num / den` over F_p with `den` monic and coprime to `num`.
    RatFn {
        num: Vec<u32>,
        den: Vec<u32>,
    },
}

/// Number of times `p` divides the nonzero integer `n`.
pub(crate) fn p_valuation_int(n: &BigInt, p: u32) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn strip_p(n: &BigInt, p: u32, k: i64) -> BigInt {
    if k == 0 {
        n.clone()
    } else {
        n / BigInt::from_biguint(Sign::Plus, p_pow(p, k as u64))
    }
}

impl Exact {
    pub(crate) fn zero(ctx: &FieldContext) -> Self {
        match ctx.kind() {
            FieldKind::PAdic => Exact::Rational(BigRational::zero()),
            FieldKind::PowerSeries => Exact::RatFn { num: Vec::new(), den: vec![1] },
        }
    }

    pub(crate) fn from_int(ctx: &FieldContext, n: &BigInt) -> Self {
        match ctx.kind() {
            FieldKind::PAdic => Exact::Rational(BigRational::from_integer(n.clone())),
            FieldKind::PowerSeries => {
                let p = BigInt::from(ctx.p());
                let r = n.mod_floor(&p);
                let c = r.to_u32_digits().1.first().copied().unwrap_or(0);
                let mut num = vec![c];
                fp_poly::trim(&mut num);
                Exact::RatFn { num, den: vec![1] }
            }
        }
    }

    pub(crate) fn uniformizer_pow(ctx: &FieldContext, k: i64) -> Self {
        match ctx.kind() {
            FieldKind::PAdic => {
                let pk = BigInt::from_biguint(Sign::Plus, p_pow(ctx.p(), k.unsigned_abs()));
                if k >= 0 {
                    Exact::Rational(BigRational::from_integer(pk))
                } else {
                    Exact::Rational(BigRational::new(BigInt::one(), pk))
                }
            }
            FieldKind::PowerSeries => {
                let mut mono = vec![0u32; k.unsigned_abs() as usize + 1];
                *mono.last_mut().unwrap() = 1;
                if k >= 0 {
                    Exact::RatFn { num: mono, den: vec![1] }
                } else {
                    Exact::RatFn { num: vec![1], den: mono }
                }
            }
        }
    }

    pub(crate) fn from_rational(q: BigRational) -> Self {
        Exact::Rational(q)
    }

    pub(crate) fn from_ratfn(num: &[u32], den: &[u32], p: u32) -> Option<Self> {
        let mut n: Vec<u32> = num.iter().map(|&c| c % p).collect();
        let mut d: Vec<u32> = den.iter().map(|&c| c % p).collect();
        fp_poly::trim(&mut n);
        fp_poly::trim(&mut d);
        if d.is_empty() {
            return None;
        }
        Some(normalize_ratfn(n, d, p))
    }

    pub(crate) fn is_zero(&self) -> bool {
        match self {
            Exact::Rational(q) => q.is_zero(),
            Exact::RatFn { num, .. } => num.is_empty(),
        }
    }

    /// `None` for zero.
    pub(crate) fn valuation(&self, p: u32) -> Option<i64> {
        match self {
            Exact::Rational(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(p_valuation_int(q.numer(), p) - p_valuation_int(q.denom(), p))
                }
            }
            Exact::RatFn { num, den } => {
                let a = fp_poly::ord(num)? as i64;
                let b = fp_poly::ord(den).expect("denominator is nonzero") as i64;
                Some(a - b)
            }
        }
    }

    pub(crate) fn neg(&self, p: u32) -> Self {
        match self {
            Exact::Rational(q) => Exact::Rational(-q),
            Exact::RatFn { num, den } => Exact::RatFn { num: fp_poly::neg(num, p), den: den.clone() },
        }
    }

    pub(crate) fn add(&self, other: &Self, p: u32) -> Self {
        match (self, other) {
            (Exact::Rational(a), Exact::Rational(b)) => Exact::Rational(a + b),
            (Exact::RatFn { num: n1, den: d1 }, Exact::RatFn { num: n2, den: d2 }) => {
                if d1 == d2 {
                    return normalize_ratfn(fp_poly::add(n1, n2, p), d1.clone(), p);
                }
                let n = fp_poly::add(&fp_poly::mul(n1, d2, p), &fp_poly::mul(n2, d1, p), p);
                normalize_ratfn(n, fp_poly::mul(d1, d2, p), p)
            }
            _ => unreachable!("exact kinds always follow the field context"),
        }
    }

    pub(crate) fn mul(&self, other: &Self, p: u32) -> Self {
        match (self, other) {
            (Exact::Rational(a), Exact::Rational(b)) => Exact::Rational(a * b),
            (Exact::RatFn { num: n1, den: d1 }, Exact::RatFn { num: n2, den: d2 }) => {
                normalize_ratfn(fp_poly::mul(n1, n2, p), fp_poly::mul(d1, d2, p), p)
            }
            _ => unreachable!("exact kinds always follow the field context"),
        }
    }

    /// `other` must be nonzero.
    pub(crate) fn div(&self, other: &Self, p: u32) -> Self {
        match (self, other) {
            (Exact::Rational(a), Exact::Rational(b)) => Exact::Rational(a / b),
            (Exact::RatFn { num: n1, den: d1 }, Exact::RatFn { num: n2, den: d2 }) => {
                normalize_ratfn(fp_poly::mul(n1, d2, p), fp_poly::mul(d1, n2, p), p)
            }
            _ => unreachable!("exact kinds always follow the field context"),
        }
    }

    /// Unit part `self / pi^val` reduced modulo `p^rel` (p-adic kind).
    pub(crate) fn rational_unit(q: &BigRational, p: u32, rel: i64) -> BigUint {
        let a = p_valuation_int(q.numer(), p);
        let b = p_valuation_int(q.denom(), p);
        let m = BigInt::from_biguint(Sign::Plus, p_pow(p, rel as u64));
        let mut n = strip_p(q.numer(), p, a).mod_floor(&m);
        let d = strip_p(q.denom(), p, b);
        let d = if d.is_negative() {
            n = (-n).mod_floor(&m);
            -d
        } else {
            d
        };
        let dinv = d.mod_floor(&m).modinv(&m).expect("denominator unit is invertible");
        (n * dinv).mod_floor(&m).to_biguint().expect("reduced value is nonnegative")
    }

    /// First `rel` coefficients of the unit part (series kind).
    pub(crate) fn ratfn_unit(num: &[u32], den: &[u32], p: u32, rel: usize) -> Vec<u32> {
        let a = fp_poly::ord(num).expect("nonzero numerator");
        let b = fp_poly::ord(den).expect("nonzero denominator");
        fp_poly::div_trunc(&num[a..], &den[b..], rel, p)
    }
}

fn normalize_ratfn(num: Vec<u32>, den: Vec<u32>, p: u32) -> Exact {
    if num.is_empty() {
        return Exact::RatFn { num, den: vec![1] };
    }
    let g = fp_poly::gcd(&num, &den, p);
    let (mut n, mut d) =
        if g.len() > 1 { (fp_poly::divrem(&num, &g, p).0, fp_poly::divrem(&den, &g, p).0) } else { (num, den) };
    let lead = *d.last().unwrap();
    if lead != 1 {
        let inv = fp_poly::mod_inv(lead, p);
        n = fp_poly::scale(&n, inv, p);
        d = fp_poly::scale(&d, inv, p);
    }
    Exact::RatFn { num: n, den: d }
}
