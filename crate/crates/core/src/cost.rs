//! Operation counters and the `M(N)` cost model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::UltraScalar;

/// Cost of one product at relative precision `n`, in residue-field operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    /// `n * ceil(log2(n + 1))`
    #[default]
    NLogN,
    /// `n`
    Linear,
    /// `n^2` (schoolbook)
    Quadratic,
}

impl CostModel {
    pub fn m(self, n: i64) -> u128 {
        let n = n.max(0) as u128;
        match self {
            CostModel::NLogN => n * (128 - n.leading_zeros()) as u128,
            CostModel::Linear => n,
            CostModel::Quadratic => n * n,
        }
    }

    /// Real-valued `M(x)` for closed-form predictions.
    pub fn m_f64(self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            CostModel::NLogN => x * (x + 1.0).log2().ceil(),
            CostModel::Linear => x,
            CostModel::Quadratic => x * x,
        }
    }
}

/// A division costs this many products at the same precision.
pub const DIVISION_WEIGHT: u128 = 4;

/// Counts of scalar products and quotients, bucketed by the precision
/// that drives their cost (largest finite relative precision of an operand).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub mults: u64,
    pub divs: u64,
    /// Matrix-by-matrix products.
    pub mat_mat: u64,
    pub mult_buckets: BTreeMap<i64, u64>,
    pub div_buckets: BTreeMap<i64, u64>,
}

fn cost_prec(a: &UltraScalar, b: &UltraScalar) -> i64 {
    a.rel_prec().unwrap_or(0).max(b.rel_prec().unwrap_or(0))
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// `a * b`, counted unless one side is an exact zero.
    pub fn mul(&mut self, a: &UltraScalar, b: &UltraScalar) -> Result<UltraScalar> {
        let r = a.mul(b)?;
        if !a.is_exact_zero() && !b.is_exact_zero() {
            self.record_mul(cost_prec(a, b));
        }
        Ok(r)
    }

    /// `a / b`, counted unless `a` is an exact zero.
    pub fn div(&mut self, a: &UltraScalar, b: &UltraScalar) -> Result<UltraScalar> {
        let r = a.div(b)?;
        if !a.is_exact_zero() {
            self.record_div(cost_prec(a, b));
        }
        Ok(r)
    }

    pub fn record_mul(&mut self, prec: i64) {
        self.mults += 1;
        *self.mult_buckets.entry(prec).or_default() += 1;
    }

    pub fn record_div(&mut self, prec: i64) {
        self.divs += 1;
        *self.div_buckets.entry(prec).or_default() += 1;
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.mults += other.mults;
        self.divs += other.divs;
        self.mat_mat += other.mat_mat;
        for (k, v) in &other.mult_buckets {
            *self.mult_buckets.entry(*k).or_default() += v;
        }
        for (k, v) in &other.div_buckets {
            *self.div_buckets.entry(*k).or_default() += v;
        }
    }

    /// Total model cost: `sum M(prec)` over products plus
    /// `4 M(prec)` per quotient.
    pub fn model_cost(&self, model: CostModel) -> u128 {
        let m: u128 = self.mult_buckets.iter().map(|(&k, &c)| c as u128 * model.m(k)).sum();
        let d: u128 = self.div_buckets.iter().map(|(&k, &c)| c as u128 * model.m(k)).sum();
        m + DIVISION_WEIGHT * d
    }

    /// Largest precision any counted operation ran at.
    pub fn max_prec(&self) -> i64 {
        let a = self.mult_buckets.keys().next_back().copied().unwrap_or(0);
        let b = self.div_buckets.keys().next_back().copied().unwrap_or(0);
        a.max(b)
    }
}
