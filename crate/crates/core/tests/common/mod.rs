//! Shared helpers: an independent digit oracle for products and quotients
//! and a few problem builders.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use ub_core::field::{FieldContext, FieldKind, UltraScalar};
use ub_core::linalg::UltraVec;
use ub_core::system::{builtin_family, Family, PolySystem};

/// Interval and digits of a zealous element.
pub fn parts(x: &UltraScalar) -> (i64, i64, Vec<u64>) {
    let (lo, hi) = x.interval().expect("zealous element");
    (lo, hi, x.digits().expect("zealous element"))
}

fn to_int(d: &[u64], p: u64) -> BigInt {
    d.iter().rev().fold(BigInt::zero(), |acc, &x| acc * p + x)
}

fn int_digits(mut n: BigInt, p: u64, len: usize) -> Vec<u64> {
    let m = BigInt::from(p);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let (q, r) = n.div_mod_floor(&m);
        out.push(u64::try_from(r).unwrap());
        n = q;
    }
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    assert!(g.gcd.is_one(), "not a unit");
    g.x.mod_floor(m)
}

fn series_mul(a: &[u64], b: &[u64], p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn series_inv(b: &[u64], p: u64, len: usize) -> Vec<u64> {
    let pow = |mut x: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * x % p;
            }
            x = x * x % p;
            e >>= 1;
        }
        r
    };
    let b0inv = pow(b[0], p - 2);
    let mut inv = vec![0u64; len];
    for k in 0..len {
        let mut acc = if k == 0 { 1 } else { 0 };
        for j in 1..=k.min(b.len() - 1) {
            acc = (acc + p * p - b[j] * inv[k - j] % p) % p;
        }
        inv[k] = acc * b0inv % p;
    }
    inv
}

/// Expected interval and digits of `x * y`, from the zealous rule and
/// direct integer or polynomial arithmetic on the digit strings.
pub fn oracle_mul(x: &UltraScalar, y: &UltraScalar) -> (i64, i64, Vec<u64>) {
    let ctx = x.context();
    let p = ctx.p() as u64;
    let (a, b, dx) = parts(x);
    let (c, d, dy) = parts(y);
    let lo = a + c;
    let hi = (a + d).min(b + c);
    let len = (hi - lo) as usize;
    if len == 0 {
        return (hi, hi, vec![]);
    }
    let digits = match ctx.kind() {
        FieldKind::PAdic => int_digits(to_int(&dx, p) * to_int(&dy, p), p, len),
        FieldKind::PowerSeries => series_mul(&dx, &dy, p, len),
    };
    (lo, hi, digits)
}

/// Expected interval and digits of `x / y`; `y` must have a known digit.
pub fn oracle_div(x: &UltraScalar, y: &UltraScalar) -> (i64, i64, Vec<u64>) {
    let ctx = x.context();
    let p = ctx.p() as u64;
    let (a, b, dx) = parts(x);
    let (c, d, dy) = parts(y);
    assert!(c < d);
    let lo = a - c;
    let hi = (a + d - 2 * c).min(b - c);
    let len = (hi - lo).max(0) as usize;
    if len == 0 {
        return (hi, hi, vec![]);
    }
    let digits = match ctx.kind() {
        FieldKind::PAdic => {
            let m = BigInt::from(p).pow(len as u32);
            let q = to_int(&dx, p) * mod_inverse(&to_int(&dy, p), &m);
            int_digits(q.mod_floor(&m), p, len)
        }
        FieldKind::PowerSeries => series_mul(&dx, &series_inv(&dy, p, len), p, len),
    };
    (lo, hi, digits)
}

pub fn builtin(fam: Family, kind: FieldKind) -> (FieldContext, PolySystem, UltraScalar, UltraVec) {
    let ctx = FieldContext::new(kind, 17).unwrap();
    let t = UltraScalar::uniformizer_pow(&ctx, 1);
    let x0 = UltraVec::from_ints(&ctx, fam.start_residue());
    (ctx, builtin_family(fam), t, x0)
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}
