//! Column vectors and matrices over [`UltraScalar`] with valuation norms.
//!
//! The norm of a vector or matrix is the minimum valuation of its entries.
//! No general matrix product is exported: the only matrix-by-matrix work
//! is [`lift_inverse`], which is meant for the Newton baseline.

mod update;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::cost::OpCounter;
use crate::error::{Error, Result};
use crate::field::{FieldContext, UltraScalar, Valuation};

pub(crate) use update::sherman_morrison_from_parts;
pub use update::{choose_update_vector, lift_inverse, sherman_morrison_update, UpdateChoice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraVec {
    entries: Vec<UltraScalar>,
}

/// Row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraMat {
    rows: usize,
    cols: usize,
    data: Vec<UltraScalar>,
}

fn check_ctx(items: &[UltraScalar]) -> Result<()> {
    if let Some(first) = items.first() {
        for x in &items[1..] {
            if x.context() != first.context() {
                return Err(Error::ContextMismatch(*first.context(), *x.context()));
            }
        }
    }
    Ok(())
}

fn min_val<'a>(it: impl Iterator<Item = &'a UltraScalar>) -> Valuation {
    it.fold(Valuation::Infinite, |acc, x| acc.min(x.valuation()))
}

fn dim_check(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

impl UltraVec {
    pub fn new(entries: Vec<UltraScalar>) -> Result<Self> {
        check_ctx(&entries)?;
        Ok(UltraVec { entries })
    }

    pub fn zeros(ctx: &FieldContext, m: usize) -> Self {
        UltraVec { entries: vec![UltraScalar::zero(ctx); m] }
    }

    /// Exact integer vector.
    pub fn from_ints(ctx: &FieldContext, v: &[i64]) -> Self {
        UltraVec { entries: v.iter().map(|&x| UltraScalar::from_int(ctx, x)).collect() }
    }

    /// `e_i` with a 1-based index.
    pub fn basis(ctx: &FieldContext, m: usize, i: usize) -> Self {
        let mut v = Self::zeros(ctx, m);
        v.entries[i - 1] = UltraScalar::one(ctx);
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[UltraScalar] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &UltraScalar {
        &self.entries[i]
    }

    pub fn set(&mut self, i: usize, x: UltraScalar) {
        self.entries[i] = x;
    }

    pub fn val(&self) -> Valuation {
        min_val(self.entries.iter())
    }

    /// Smallest absolute precision among zealous entries; `None` if all exact.
    pub fn abs_prec(&self) -> Option<i64> {
        self.entries.iter().filter_map(UltraScalar::abs_prec).min()
    }

    /// `(val, abs_prec)` summary used for interval bookkeeping.
    pub fn interval(&self) -> (Valuation, Option<i64>) {
        (self.val(), self.abs_prec())
    }

    pub fn is_zero_like(&self) -> bool {
        self.entries.iter().all(UltraScalar::is_zero_like)
    }

    pub fn change_prec(&self, c: i64) -> Self {
        UltraVec { entries: self.entries.iter().map(|x| x.change_prec(c)).collect() }
    }

    pub fn change_prec_mut(&mut self, c: i64) {
        for x in &mut self.entries {
            x.change_prec_mut(c);
        }
    }

    pub fn to_exact(&self) -> Self {
        UltraVec { entries: self.entries.iter().map(UltraScalar::to_exact).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        dim_check(self.len(), other.len())?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(UltraVec { entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        UltraVec { entries: self.entries.iter().map(UltraScalar::neg).collect() }
    }

    pub fn scale(&self, c: &UltraScalar, ctr: &mut OpCounter) -> Result<Self> {
        let entries = self.entries.iter().map(|x| ctr.mul(c, x)).collect::<Result<_>>()?;
        Ok(UltraVec { entries })
    }

    pub fn agrees_mod(&self, other: &Self, k: i64) -> bool {
        self.len() == other.len() && self.entries.iter().zip(&other.entries).all(|(a, b)| a.agrees_mod(b, k))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("vector serialization is infallible")
    }

    pub fn from_json(ctx: &FieldContext, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::InvalidArgument(format!("not a vector: {v}")))?;
        let entries = arr.iter().map(|x| UltraScalar::from_json(ctx, x)).collect::<Result<_>>()?;
        Ok(UltraVec { entries })
    }
}

/// `sum a_i b_i`.
pub fn dot(a: &UltraVec, b: &UltraVec, ctr: &mut OpCounter) -> Result<UltraScalar> {
    dim_check(a.len(), b.len())?;
    let ctx = match a.entries.first() {
        Some(x) => *x.context(),
        None => return Err(Error::DimensionMismatch { expected: 1, got: 0 }),
    };
    let mut acc = UltraScalar::zero(&ctx);
    for (x, y) in a.entries.iter().zip(&b.entries) {
        acc = acc.add(&ctr.mul(x, y)?)?;
    }
    Ok(acc)
}

impl UltraMat {
    pub fn from_rows(rows: Vec<Vec<UltraScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for row in &rows {
            dim_check(c, row.len())?;
        }
        let data: Vec<UltraScalar> = rows.into_iter().flatten().collect();
        check_ctx(&data)?;
        Ok(UltraMat { rows: r, cols: c, data })
    }

    pub fn from_int_rows(ctx: &FieldContext, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| UltraScalar::from_int(ctx, x)).collect()).collect())
    }

    pub fn zeros(ctx: &FieldContext, rows: usize, cols: usize) -> Self {
        UltraMat { rows, cols, data: vec![UltraScalar::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &FieldContext, m: usize) -> Self {
        let mut a = Self::zeros(ctx, m, m);
        for i in 0..m {
            a.data[i * m + i] = UltraScalar::one(ctx);
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &UltraScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: UltraScalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> impl Iterator<Item = &UltraScalar> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> UltraVec {
        UltraVec { entries: self.data[i * self.cols..(i + 1) * self.cols].to_vec() }
    }

    pub fn column(&self, j: usize) -> UltraVec {
        UltraVec { entries: (0..self.rows).map(|i| self.get(i, j).clone()).collect() }
    }

    pub fn val(&self) -> Valuation {
        min_val(self.data.iter())
    }

    pub fn abs_prec(&self) -> Option<i64> {
        self.data.iter().filter_map(UltraScalar::abs_prec).min()
    }

    pub fn interval(&self) -> (Valuation, Option<i64>) {
        (self.val(), self.abs_prec())
    }

    pub fn change_prec(&self, c: i64) -> Self {
        UltraMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.change_prec(c)).collect() }
    }

    pub fn change_prec_mut(&mut self, c: i64) {
        for x in &mut self.data {
            x.change_prec_mut(c);
        }
    }

    pub fn to_exact(&self) -> Self {
        UltraMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(UltraScalar::to_exact).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&UltraScalar, &UltraScalar) -> Result<UltraScalar>) -> Result<Self> {
        dim_check(self.rows, other.rows)?;
        dim_check(self.cols, other.cols)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        Ok(UltraMat { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    /// Entry-wise quotient by one scalar.
    pub fn div_scalar(&self, d: &UltraScalar, ctr: &mut OpCounter) -> Result<Self> {
        let data = self.data.iter().map(|x| ctr.div(x, d)).collect::<Result<_>>()?;
        Ok(UltraMat { rows: self.rows, cols: self.cols, data })
    }

    pub fn agrees_mod(&self, other: &Self, k: i64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.agrees_mod(b, k))
    }

    /// Reduction modulo the uniformizer as residues in `[0, p)`.
    pub fn residues(&self) -> Result<Vec<Vec<u64>>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).residue()).collect()).collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("matrix serialization is infallible")
    }

    pub fn from_json(ctx: &FieldContext, v: &Value) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::InvalidArgument(format!("not a matrix: {v}")))?;
        let rows = rows.iter().map(|r| UltraVec::from_json(ctx, r).map(|v| v.entries)).collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

pub fn vec_val(v: &UltraVec) -> Valuation {
    v.val()
}

pub fn mat_val(a: &UltraMat) -> Valuation {
    a.val()
}

/// `A v`.
pub fn mat_vec(a: &UltraMat, v: &UltraVec, ctr: &mut OpCounter) -> Result<UltraVec> {
    dim_check(a.cols, v.len())?;
    let entries = (0..a.rows)
        .map(|i| {
            let row = &a.data[i * a.cols..(i + 1) * a.cols];
            let mut acc = UltraScalar::zero(v.entries[0].context());
            for (x, y) in row.iter().zip(&v.entries) {
                acc = acc.add(&ctr.mul(x, y)?)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(UltraVec { entries })
}

/// `u^t A`, returned as a column vector.
pub fn vec_mat(u: &UltraVec, a: &UltraMat, ctr: &mut OpCounter) -> Result<UltraVec> {
    dim_check(a.rows, u.len())?;
    let ctx = *u.entries[0].context();
    let mut out = vec![UltraScalar::zero(&ctx); a.cols];
    for (i, ui) in u.entries.iter().enumerate() {
        if ui.is_exact_zero() {
            continue;
        }
        for (j, acc) in out.iter_mut().enumerate() {
            *acc = acc.add(&ctr.mul(ui, a.get(i, j))?)?;
        }
    }
    Ok(UltraVec { entries: out })
}

/// `a b^t`.
pub fn rank_one(a: &UltraVec, b: &UltraVec, ctr: &mut OpCounter) -> Result<UltraMat> {
    let mut data = Vec::with_capacity(a.len() * b.len());
    for x in &a.entries {
        for y in &b.entries {
            data.push(ctr.mul(x, y)?);
        }
    }
    Ok(UltraMat { rows: a.len(), cols: b.len(), data })
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i128) as u64
}

/// Inverse over F_p by Gauss-Jordan elimination, first nonzero pivot.
pub(crate) fn fp_mat_inverse(a: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let m = a.len();
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut w: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<u64> = r.iter().map(|x| x % p).collect();
            row.extend((0..m).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).find(|&r| w[r][col] != 0)?;
        w.swap(col, piv);
        let inv = mod_inv_u64(w[col][col], p);
        for x in w[col].iter_mut() {
            *x = mulm(*x, inv);
        }
        for r in 0..m {
            if r != col && w[r][col] != 0 {
                let f = w[r][col];
                #[allow(clippy::needless_range_loop)]
                for k in 0..2 * m {
                    let t = mulm(f, w[col][k]);
                    w[r][k] = (w[r][k] + p - t) % p;
                }
            }
        }
    }
    Some(w.into_iter().map(|r| r[m..].to_vec()).collect())
}

/// Inverse modulo the uniformizer, entries on `[0, 1)`.
pub fn residue_inverse(a: &UltraMat) -> Result<UltraMat> {
    dim_check(a.rows, a.cols)?;
    let ctx = *a.data.first().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?.context();
    let inv = fp_mat_inverse(&a.residues()?, ctx.p() as u64).ok_or(Error::SingularResidue)?;
    let rows = inv
        .into_iter()
        .map(|r| r.into_iter().map(|d| UltraScalar::from_digits(&ctx, 0, 1, &[d])).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    UltraMat::from_rows(rows)
}

/// Valuation zero and invertible reduction.
pub fn is_unimodular(a: &UltraMat) -> bool {
    if a.rows != a.cols || a.val() != Valuation::Finite(0) {
        return false;
    }
    match a.residues() {
        Ok(r) => fp_mat_inverse(&r, a.data[0].context().p() as u64).is_some(),
        Err(_) => false,
    }
}

impl Serialize for UltraVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for x in &self.entries {
            seq.serialize_element(x)?;
        }
        seq.end()
    }
}

impl Serialize for UltraMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&self.row(i))?;
        }
        seq.end()
    }
}
