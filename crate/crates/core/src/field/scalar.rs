//! Zealous scalars: elements of Q_p or F_p((t)) known on an interval of
//! digit positions `[lo, hi)`, plus exact elements with infinite precision.
//!
//! A zealous element with `lo < hi` is normalized so that its digit at
//! `pi^lo` is nonzero; `lo` is then its valuation. An element whose known
//! digits all vanish is stored as `lo == hi` with no digits and stands for
//! `O(pi^hi)`.
//!
//! Precision propagates by the usual zealous rules:
//!
//! ```text
//! [a, b) * [c, d) = [a + c, min(a + d, b + c))
//! [a, b) / [c, d) = [a - c, min(a + d - 2c, b - c))
//! [a, b) + [c, d) has absolute precision min(b, d)
//! ```
//!
//! with exact operands behaving as if their absolute precision were
//! infinite.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::context::{base_p_digits, from_base_p, p_pow, FieldContext, FieldKind};
use super::exact::Exact;
use super::fp_poly;
use super::valuation::Valuation;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraScalar {
    ctx: FieldContext,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Approx(Approx),
    Exact(Exact),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Approx {
    lo: i64,
    hi: i64,
    unit: Unit,
}

/// Digits of a zealous element shifted down by `pi^lo`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Unit {
    /// p-adic: the integer `sum d_i p^i`, reduced mod `p^(hi - lo)`.
    Int(BigUint),
    /// Series: coefficient vector of length `hi - lo`.
    Poly(Vec<u32>),
}

impl Approx {
    fn zero(kind: FieldKind, hi: i64) -> Self {
        let unit = match kind {
            FieldKind::PAdic => Unit::Int(BigUint::zero()),
            FieldKind::PowerSeries => Unit::Poly(Vec::new()),
        };
        Approx { lo: hi, hi, unit }
    }

    fn is_zero(&self) -> bool {
        self.lo == self.hi
    }

    fn rel(&self) -> i64 {
        self.hi - self.lo
    }
}

fn unit_trunc(u: &Unit, rel: i64, p: u32) -> Unit {
    match u {
        Unit::Int(n) => Unit::Int(n % p_pow(p, rel as u64)),
        Unit::Poly(c) => {
            let mut v = c.clone();
            v.resize(rel as usize, 0);
            Unit::Poly(v)
        }
    }
}

fn unit_mul(a: &Unit, b: &Unit, rel: i64, p: u32) -> Unit {
    match (a, b) {
        (Unit::Int(x), Unit::Int(y)) => Unit::Int((x * y) % p_pow(p, rel as u64)),
        (Unit::Poly(x), Unit::Poly(y)) => Unit::Poly(fp_poly::mul_trunc(x, y, rel as usize, p)),
        _ => unreachable!("unit kinds follow the field context"),
    }
}

/// `a / b` on unit parts, `b` a unit.
fn unit_div(a: &Unit, b: &Unit, rel: i64, p: u32) -> Unit {
    match (a, b) {
        (Unit::Int(x), Unit::Int(y)) => {
            let m = p_pow(p, rel as u64);
            let yinv = (y % &m).modinv(&m).expect("unit part is invertible");
            Unit::Int((x * yinv) % m)
        }
        (Unit::Poly(x), Unit::Poly(y)) => Unit::Poly(fp_poly::div_trunc(x, y, rel as usize, p)),
        _ => unreachable!("unit kinds follow the field context"),
    }
}

/// Unit part of a nonzero exact element to `rel` digits.
fn exact_unit(e: &Exact, rel: i64, p: u32) -> Unit {
    match e {
        Exact::Rational(q) => Unit::Int(Exact::rational_unit(q, p, rel)),
        Exact::RatFn { num, den } => Unit::Poly(Exact::ratfn_unit(num, den, p, rel as usize)),
    }
}

/// Expansion of an exact element to absolute precision `hi`.
fn exact_to_approx(e: &Exact, ctx: &FieldContext, hi: i64) -> Approx {
    match e.valuation(ctx.p()) {
        Some(v) if v < hi => Approx { lo: v, hi, unit: exact_unit(e, hi - v, ctx.p()) },
        _ => Approx::zero(ctx.kind(), hi),
    }
}

/// Normalize a raw value `sum d_i pi^(lo + i)` on `[lo, hi)`.
fn normalize(kind: FieldKind, p: u32, lo: i64, hi: i64, raw: Unit) -> Approx {
    match raw {
        Unit::Int(mut n) => {
            if n.is_zero() {
                return Approx::zero(kind, hi);
            }
            let mut k = 0;
            while (&n % p).is_zero() {
                n /= p;
                k += 1;
            }
            Approx { lo: lo + k, hi, unit: Unit::Int(n) }
        }
        Unit::Poly(c) => match fp_poly::ord(&c) {
            None => Approx::zero(kind, hi),
            Some(k) => Approx { lo: lo + k as i64, hi, unit: Unit::Poly(c[k..].to_vec()) },
        },
    }
}

fn approx_add(ctx: &FieldContext, a: &Approx, b: &Approx) -> Approx {
    let p = ctx.p();
    let hi = a.hi.min(b.hi);
    let live: Vec<&Approx> = [a, b].into_iter().filter(|x| !x.is_zero() && x.lo < hi).collect();
    let Some(lo) = live.iter().map(|x| x.lo).min() else {
        return Approx::zero(ctx.kind(), hi);
    };
    let n = hi - lo;
    let raw = match ctx.kind() {
        FieldKind::PAdic => {
            let mut acc = BigUint::zero();
            for x in &live {
                let Unit::Int(u) = unit_trunc(&x.unit, hi - x.lo, p) else { unreachable!() };
                acc += u * p_pow(p, (x.lo - lo) as u64);
            }
            Unit::Int(acc % p_pow(p, n as u64))
        }
        FieldKind::PowerSeries => {
            let mut acc = vec![0u32; n as usize];
            for x in &live {
                let Unit::Poly(c) = &x.unit else { unreachable!() };
                let off = (x.lo - lo) as usize;
                for (i, &d) in c.iter().take((hi - x.lo) as usize).enumerate() {
                    acc[off + i] = ((acc[off + i] as u64 + d as u64) % p as u64) as u32;
                }
            }
            Unit::Poly(acc)
        }
    };
    normalize(ctx.kind(), p, lo, hi, raw)
}

fn approx_neg(ctx: &FieldContext, a: &Approx) -> Approx {
    if a.is_zero() {
        return a.clone();
    }
    let p = ctx.p();
    let unit = match &a.unit {
        Unit::Int(n) => Unit::Int(p_pow(p, a.rel() as u64) - n),
        Unit::Poly(c) => Unit::Poly(fp_poly::neg(c, p)),
    };
    Approx { lo: a.lo, hi: a.hi, unit }
}

fn approx_mul(ctx: &FieldContext, a: &Approx, b: &Approx) -> Approx {
    let lo = a.lo + b.lo;
    let hi = (a.lo + b.hi).min(a.hi + b.lo);
    if hi <= lo {
        return Approx::zero(ctx.kind(), hi);
    }
    let rel = hi - lo;
    let p = ctx.p();
    let unit = unit_mul(&unit_trunc(&a.unit, rel, p), &unit_trunc(&b.unit, rel, p), rel, p);
    Approx { lo, hi, unit }
}

/// `b` must not be an apparent zero.
fn approx_div(ctx: &FieldContext, a: &Approx, b: &Approx) -> Approx {
    let lo = a.lo - b.lo;
    let hi = (a.lo + b.hi - 2 * b.lo).min(a.hi - b.lo);
    if hi <= lo {
        return Approx::zero(ctx.kind(), hi);
    }
    let rel = hi - lo;
    let p = ctx.p();
    let unit = unit_div(&unit_trunc(&a.unit, rel, p), &unit_trunc(&b.unit, rel, p), rel, p);
    Approx { lo, hi, unit }
}

fn approx_change_prec(ctx: &FieldContext, a: &Approx, c: i64) -> Approx {
    if a.is_zero() || c <= a.lo {
        return Approx::zero(ctx.kind(), c);
    }
    let rel = c - a.lo;
    let unit = if c <= a.hi {
        unit_trunc(&a.unit, rel, ctx.p())
    } else {
        match &a.unit {
            Unit::Int(n) => Unit::Int(n.clone()),
            Unit::Poly(v) => {
                let mut w = v.clone();
                w.resize(rel as usize, 0);
                Unit::Poly(w)
            }
        }
    };
    Approx { lo: a.lo, hi: c, unit }
}

impl UltraScalar {
    fn approx(ctx: FieldContext, a: Approx) -> Self {
        UltraScalar { ctx, repr: Repr::Approx(a) }
    }

    fn exact(ctx: FieldContext, e: Exact) -> Self {
        UltraScalar { ctx, repr: Repr::Exact(e) }
    }

    /// Exact zero.
    pub fn zero(ctx: &FieldContext) -> Self {
        Self::exact(*ctx, Exact::zero(ctx))
    }

    pub fn one(ctx: &FieldContext) -> Self {
        Self::from_int(ctx, 1)
    }

    /// Exact integer (reduced mod p in the series field).
    pub fn from_int(ctx: &FieldContext, n: impl Into<BigInt>) -> Self {
        Self::exact(*ctx, Exact::from_int(ctx, &n.into()))
    }

    /// Exact rational number; only meaningful inside Q_p.
    pub fn from_rational(ctx: &FieldContext, q: BigRational) -> Result<Self> {
        match ctx.kind() {
            FieldKind::PAdic => Ok(Self::exact(*ctx, Exact::from_rational(q))),
            FieldKind::PowerSeries => Err(Error::InvalidArgument("rational constants need a p-adic context".into())),
        }
    }

    /// Exact rational function `num(t) / den(t)` over F_p (coefficients little-endian).
    pub fn from_rational_function(ctx: &FieldContext, num: &[u32], den: &[u32]) -> Result<Self> {
        if ctx.kind() != FieldKind::PowerSeries {
            return Err(Error::InvalidArgument("rational functions need a power-series context".into()));
        }
        Exact::from_ratfn(num, den, ctx.p())
            .map(|e| Self::exact(*ctx, e))
            .ok_or(Error::DivisionByApparentZero { precision: None })
    }

    /// Exact `pi^k`.
    pub fn uniformizer_pow(ctx: &FieldContext, k: i64) -> Self {
        Self::exact(*ctx, Exact::uniformizer_pow(ctx, k))
    }

    /// `O(pi^hi)`.
    pub fn apparent_zero(ctx: &FieldContext, hi: i64) -> Self {
        Self::approx(*ctx, Approx::zero(ctx.kind(), hi))
    }

    /// Zealous element `sum digits[i] pi^(lo + i) + O(pi^hi)`.
    /// Leading zero digits are absorbed by normalization.
    pub fn from_digits(ctx: &FieldContext, lo: i64, hi: i64, digits: &[u64]) -> Result<Self> {
        if hi < lo || digits.len() as i64 != hi - lo {
            return Err(Error::InvalidArgument(format!(
                "{} digits do not fill the interval [{lo}, {hi})",
                digits.len()
            )));
        }
        let p = ctx.p();
        if let Some(&d) = digits.iter().find(|&&d| d >= p as u64) {
            return Err(Error::InvalidArgument(format!("digit {d} is not below {p}")));
        }
        let raw = match ctx.kind() {
            FieldKind::PAdic => Unit::Int(from_base_p(digits, p)),
            FieldKind::PowerSeries => Unit::Poly(digits.iter().map(|&d| d as u32).collect()),
        };
        Ok(Self::approx(*ctx, normalize(ctx.kind(), p, lo, hi, raw)))
    }

    /// Uniformly random unit on `[0, precision)`.
    pub fn random_unit<R: Rng + ?Sized>(ctx: &FieldContext, precision: i64, rng: &mut R) -> Result<Self> {
        if precision < 1 {
            return Err(Error::InvalidPrecision(precision));
        }
        let p = ctx.p() as u64;
        let mut digits = Vec::with_capacity(precision as usize);
        digits.push(rng.gen_range(1..p));
        for _ in 1..precision {
            digits.push(rng.gen_range(0..p));
        }
        Self::from_digits(ctx, 0, precision, &digits)
    }

    /// Uniformly random digits on `[lo, hi)`; may be an apparent zero.
    pub fn random_element<R: Rng + ?Sized>(ctx: &FieldContext, lo: i64, hi: i64, rng: &mut R) -> Result<Self> {
        let p = ctx.p() as u64;
        let digits: Vec<u64> = (lo..hi).map(|_| rng.gen_range(0..p)).collect();
        Self::from_digits(ctx, lo, hi, &digits)
    }

    /// Deterministic [`random_unit`](Self::random_unit) driven by a seed.
    pub fn sample_unit(ctx: &FieldContext, precision: i64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_unit(ctx, precision, &mut rng)
    }

    pub fn context(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    /// Exact zero.
    pub fn is_exact_zero(&self) -> bool {
        matches!(&self.repr, Repr::Exact(e) if e.is_zero())
    }

    /// Exact zero, or a zealous element with no nonzero digit known.
    pub fn is_zero_like(&self) -> bool {
        match &self.repr {
            Repr::Exact(e) => e.is_zero(),
            Repr::Approx(a) => a.is_zero(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Exact(e) => e.valuation(self.ctx.p()).map_or(Valuation::Infinite, Valuation::Finite),
            Repr::Approx(a) if a.is_zero() => Valuation::AtLeast(a.hi),
            Repr::Approx(a) => Valuation::Finite(a.lo),
        }
    }

    /// `(lo, hi)` for zealous elements, `None` for exact ones.
    pub fn interval(&self) -> Option<(i64, i64)> {
        match &self.repr {
            Repr::Approx(a) => Some((a.lo, a.hi)),
            Repr::Exact(_) => None,
        }
    }

    /// Absolute precision; `None` means exact.
    pub fn abs_prec(&self) -> Option<i64> {
        self.interval().map(|(_, hi)| hi)
    }

    /// Relative precision; `None` means exact.
    pub fn rel_prec(&self) -> Option<i64> {
        self.interval().map(|(lo, hi)| hi - lo)
    }

    /// Known digits starting at `pi^lo`; `None` for exact elements.
    pub fn digits(&self) -> Option<Vec<u64>> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Approx(a) => Some(match &a.unit {
                Unit::Int(n) => base_p_digits(n, self.ctx.p(), a.rel() as usize),
                Unit::Poly(c) => c.iter().map(|&d| d as u64).collect(),
            }),
        }
    }

    /// Digit at `pi^0`; requires nonnegative valuation and precision at least 1.
    pub fn residue(&self) -> Result<u64> {
        if let Some(v) = self.valuation().finite() {
            if v < 0 {
                return Err(Error::NegativeValuation(v));
            }
        }
        match self.abs_prec() {
            Some(hi) if hi < 1 => Err(Error::InvalidPrecision(hi)),
            _ => {
                let r = self.change_prec(1);
                Ok(if r.is_zero_like() { 0 } else { r.digits().unwrap()[0] })
            }
        }
    }

    /// The zealous value read as an exact element, unknown digits set to zero.
    pub fn to_exact(&self) -> Self {
        match &self.repr {
            Repr::Exact(_) => self.clone(),
            Repr::Approx(a) if a.is_zero() => Self::zero(&self.ctx),
            Repr::Approx(a) => {
                let shift = Self::uniformizer_pow(&self.ctx, a.lo);
                let unit = match &a.unit {
                    Unit::Int(n) => {
                        Exact::from_rational(BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone())))
                    }
                    Unit::Poly(c) => Exact::from_ratfn(c, &[1], self.ctx.p()).expect("unit denominator"),
                };
                Self::exact(self.ctx, unit).mul(&shift).expect("same context")
            }
        }
    }

    /// Exact rational value, if this is an exact p-adic element.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Exact(Exact::Rational(q)) => Some(q),
            _ => None,
        }
    }

    /// Truncate to, or lift with zero digits up to, absolute precision `c`.
    /// Exact elements are expanded to precision `c`.
    pub fn change_prec(&self, c: i64) -> Self {
        let a = match &self.repr {
            Repr::Exact(e) => exact_to_approx(e, &self.ctx, c),
            Repr::Approx(a) => approx_change_prec(&self.ctx, a, c),
        };
        Self::approx(self.ctx, a)
    }

    /// In-place [`change_prec`](Self::change_prec).
    pub fn change_prec_mut(&mut self, c: i64) {
        *self = self.change_prec(c);
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Exact(e) => Self::exact(self.ctx, e.neg(self.ctx.p())),
            Repr::Approx(a) => Self::approx(self.ctx, approx_neg(&self.ctx, a)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        let ctx = self.ctx;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(x), Repr::Exact(y)) => Self::exact(ctx, x.add(y, ctx.p())),
            (Repr::Exact(e), Repr::Approx(a)) | (Repr::Approx(a), Repr::Exact(e)) => {
                if e.is_zero() {
                    Self::approx(ctx, a.clone())
                } else {
                    Self::approx(ctx, approx_add(&ctx, a, &exact_to_approx(e, &ctx, a.hi)))
                }
            }
            (Repr::Approx(a), Repr::Approx(b)) => Self::approx(ctx, approx_add(&ctx, a, b)),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        let ctx = self.ctx;
        let p = ctx.p();
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(x), Repr::Exact(y)) => Self::exact(ctx, x.mul(y, p)),
            (Repr::Exact(e), Repr::Approx(a)) | (Repr::Approx(a), Repr::Exact(e)) => match e.valuation(p) {
                None => Self::zero(&ctx),
                Some(c) if a.is_zero() => Self::apparent_zero(&ctx, a.hi + c),
                Some(c) => {
                    let rel = a.rel();
                    let unit = unit_mul(&a.unit, &exact_unit(e, rel, p), rel, p);
                    Self::approx(ctx, Approx { lo: a.lo + c, hi: a.hi + c, unit })
                }
            },
            (Repr::Approx(a), Repr::Approx(b)) => Self::approx(ctx, approx_mul(&ctx, a, b)),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        let ctx = self.ctx;
        let p = ctx.p();
        match &other.repr {
            Repr::Exact(e) if e.is_zero() => return Err(Error::DivisionByApparentZero { precision: None }),
            Repr::Approx(b) if b.is_zero() => return Err(Error::DivisionByApparentZero { precision: Some(b.hi) }),
            _ => {}
        }
        if self.is_exact_zero() {
            return Ok(Self::zero(&ctx));
        }
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(x), Repr::Exact(y)) => Self::exact(ctx, x.div(y, p)),
            (Repr::Approx(a), Repr::Exact(e)) => {
                let c = e.valuation(p).expect("nonzero divisor");
                if a.is_zero() {
                    Self::apparent_zero(&ctx, a.hi - c)
                } else {
                    let rel = a.rel();
                    let unit = unit_div(&a.unit, &exact_unit(e, rel, p), rel, p);
                    Self::approx(ctx, Approx { lo: a.lo - c, hi: a.hi - c, unit })
                }
            }
            (Repr::Exact(e), Repr::Approx(b)) => {
                let a = e.valuation(p).expect("nonzero dividend");
                let rel = b.rel();
                let unit = unit_div(&exact_unit(e, rel, p), &b.unit, rel, p);
                Self::approx(ctx, Approx { lo: a - b.lo, hi: a + b.hi - 2 * b.lo, unit })
            }
            (Repr::Approx(a), Repr::Approx(b)) => Self::approx(ctx, approx_div(&ctx, a, b)),
        })
    }

    /// `1 / self`.
    pub fn inv(&self) -> Result<Self> {
        Self::one(&self.ctx).div(self)
    }

    /// Whether `self` and `other` agree modulo `pi^k`, reading both as
    /// zero-lifted values.
    pub fn agrees_mod(&self, other: &Self, k: i64) -> bool {
        self.ctx == other.ctx && self.change_prec(k) == other.change_prec(k)
    }

    pub(crate) fn exact_repr(&self) -> Option<&Exact> {
        match &self.repr {
            Repr::Exact(e) => Some(e),
            Repr::Approx(_) => None,
        }
    }
}

impl std::ops::Neg for &UltraScalar {
    type Output = UltraScalar;
    fn neg(self) -> UltraScalar {
        UltraScalar::neg(self)
    }
}

impl Default for UltraScalar {
    fn default() -> Self {
        UltraScalar::zero(&FieldContext::p_adic(2).expect("2 is prime"))
    }
}
