use serde::{Deserialize, Serialize};

use super::{Poly, PolySystem};
use crate::cost::OpCounter;
use crate::error::{Error, Result};
use crate::field::UltraScalar;
use crate::linalg::{UltraMat, UltraVec};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounter {
    pub ops: OpCounter,
    /// Calls to `evaluate` and `jacobian`.
    pub evaluations: u64,
}

/// `powers[i][k] = base_i^k` for `k` up to the requested degree.
struct PowerTable {
    powers: Vec<Vec<UltraScalar>>,
}

impl PowerTable {
    fn build(bases: &[&UltraScalar], degs: &[u32], ops: &mut OpCounter) -> Result<Self> {
        let mut powers = Vec::with_capacity(bases.len());
        for (b, &d) in bases.iter().zip(degs) {
            let mut row = vec![UltraScalar::one(b.context())];
            if d >= 1 {
                row.push((*b).clone());
            }
            for k in 2..=d as usize {
                let next = ops.mul(&row[k - 1], b)?;
                row.push(next);
            }
            powers.push(row);
        }
        Ok(PowerTable { powers })
    }
}

fn max_degrees<'a>(polys: impl Iterator<Item = &'a Poly>, m: usize) -> Vec<u32> {
    let mut d = vec![0u32; m + 1];
    for p in polys {
        for t in p.terms() {
            for (i, &e) in t.exps.iter().enumerate() {
                d[i] = d[i].max(e);
            }
            d[m] = d[m].max(t.t_exp);
        }
    }
    d
}

fn eval_poly(p: &Poly, table: &PowerTable, m: usize, ops: &mut OpCounter) -> Result<UltraScalar> {
    let ctx = *table.powers[0][0].context();
    let mut acc = UltraScalar::zero(&ctx);
    for t in p.terms() {
        let mut prod: Option<UltraScalar> = None;
        let factors = t
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| &table.powers[i][e as usize])
            .chain((t.t_exp > 0).then(|| &table.powers[m][t.t_exp as usize]));
        for f in factors {
            prod = Some(match prod {
                None => f.clone(),
                Some(q) => ops.mul(&q, f)?,
            });
        }
        let c = UltraScalar::from_int(&ctx, t.coeff);
        let value = match prod {
            None => c,
            Some(q) if t.coeff == 1 => q,
            Some(q) if t.coeff == -1 => q.neg(),
            Some(q) => ops.mul(&c, &q)?,
        };
        acc = acc.add(&value)?;
    }
    Ok(acc)
}

fn check_point(sys: &PolySystem, t: &UltraScalar, x: &UltraVec) -> Result<()> {
    if x.len() != sys.m() {
        return Err(Error::DimensionMismatch { expected: sys.m(), got: x.len() });
    }
    for xi in x.entries() {
        if xi.context() != t.context() {
            return Err(Error::ContextMismatch(*t.context(), *xi.context()));
        }
    }
    Ok(())
}

fn table_for<'a>(
    sys: &PolySystem,
    polys: impl Iterator<Item = &'a Poly>,
    t: &UltraScalar,
    x: &UltraVec,
    ops: &mut OpCounter,
) -> Result<PowerTable> {
    let degs = max_degrees(polys, sys.m());
    let bases: Vec<&UltraScalar> = x.entries().iter().chain(std::iter::once(t)).collect();
    PowerTable::build(&bases, &degs, ops)
}

impl PolySystem {
    /// `f(x)` with the parameter set to `t`.
    pub fn evaluate(&self, t: &UltraScalar, x: &UltraVec, counter: &mut EvalCounter) -> Result<UltraVec> {
        check_point(self, t, x)?;
        counter.evaluations += 1;
        let ops = &mut counter.ops;
        let table = table_for(self, self.polys.iter(), t, x, ops)?;
        let vals = self.polys.iter().map(|p| eval_poly(p, &table, self.m, ops)).collect::<Result<_>>()?;
        UltraVec::new(vals)
    }

    /// `f'(x)`, row `i` holding the gradient of `f_i`.
    pub fn jacobian(&self, t: &UltraScalar, x: &UltraVec, counter: &mut EvalCounter) -> Result<UltraMat> {
        check_point(self, t, x)?;
        counter.evaluations += 1;
        let ops = &mut counter.ops;
        let table = table_for(self, self.jac.iter().flatten(), t, x, ops)?;
        let rows = self
            .jac
            .iter()
            .map(|row| row.iter().map(|p| eval_poly(p, &table, self.m, ops)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        UltraMat::from_rows(rows)
    }
}

/// Column `j` is `(f(x + pi^k e_j) - f(x)) / pi^k`.
///
/// The step `pi^k` is taken at the absolute precision of `x`, so a step
/// below that precision is an apparent zero and the division fails.
pub fn divided_difference_matrix(
    sys: &PolySystem,
    t: &UltraScalar,
    x: &UltraVec,
    k: i64,
    counter: &mut EvalCounter,
) -> Result<UltraMat> {
    if k < 1 {
        return Err(Error::InvalidArgument(format!("step valuation {k} must be at least 1")));
    }
    let ctx = *t.context();
    let step = match x.abs_prec() {
        Some(w) => UltraScalar::uniformizer_pow(&ctx, k).change_prec(w),
        None => UltraScalar::uniformizer_pow(&ctx, k),
    };
    if step.is_zero_like() {
        return Err(Error::DivisionByApparentZero { precision: step.abs_prec() });
    }
    let base = sys.evaluate(t, x, counter)?;
    let m = sys.m();
    let mut cols = Vec::with_capacity(m);
    for j in 0..m {
        let mut xj = x.clone();
        xj.set(j, x.get(j).add(&step)?);
        let fj = sys.evaluate(t, &xj, counter)?;
        let diff = fj.sub(&base)?;
        let col = diff.entries().iter().map(|d| counter.ops.div(d, &step)).collect::<Result<Vec<_>>>()?;
        cols.push(col);
    }
    let rows = (0..m).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    UltraMat::from_rows(rows)
}
