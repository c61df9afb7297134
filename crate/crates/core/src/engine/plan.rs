use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tuning {
    /// Follow the observed ratios `v_{n+1} / v_n`.
    #[default]
    Adaptive,
    /// Keep `alpha` unless a ratio exceeds it.
    Fixed,
}

/// Growth exponent used to predict valuations, plus what was observed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPlan {
    pub alpha: f64,
    pub tuning: Tuning,
    pub m: usize,
    /// `|ceil(alpha v_n) - v_{n+1}|` per iteration.
    pub gap_history: Vec<i64>,
    pub ratio_history: Vec<f64>,
    /// Exponentially weighted mean of the ratios, weight 1/2.
    pub ratio_mean: Option<f64>,
    /// Iterations with `v_{n+1} > ceil(alpha v_n)`.
    pub under_predictions: usize,
    /// Re-evaluations allowed when `f_{n+1}` vanishes at its precision.
    pub max_retries: usize,
}

impl PrecisionPlan {
    /// `alpha = 2^{1/m}`.
    pub fn new(m: usize) -> Self {
        Self::with_alpha(m, 2f64.powf(1.0 / m.max(1) as f64)).expect("2^{1/m} > 1")
    }

    pub fn with_alpha(m: usize, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
        }
        Ok(PrecisionPlan {
            alpha,
            tuning: Tuning::Adaptive,
            m: m.max(1),
            gap_history: Vec::new(),
            ratio_history: Vec::new(),
            ratio_mean: None,
            under_predictions: 0,
            max_retries: 2,
        })
    }

    pub fn fixed(mut self) -> Self {
        self.tuning = Tuning::Fixed;
        self
    }

    /// `ceil(alpha^k v)`, never below `v`.
    pub fn predict(&self, v: i64, k: i32) -> i64 {
        let p = (self.alpha.powi(k) * v as f64 - 1e-9).ceil() as i64;
        p.max(v)
    }

    fn floor_alpha(&self) -> f64 {
        1.0 + 1.0 / (4 * self.m) as f64
    }

    /// Raises `alpha` past a ratio that exceeded it.
    pub(crate) fn raise_to(&mut self, ratio: f64) {
        let k = self.ratio_history.len().max(1);
        self.alpha = self.alpha.max(ratio + 1.0 / (2 * self.m * k) as f64);
    }
}

/// Records the ratio `v_next / v_n` and returns the updated plan.
///
/// Adaptive rule: on the first observation `alpha` only moves if the ratio
/// exceeds it. Afterwards `alpha = max(mean + 1/(2 m k), 1 + 1/(4m), r)`
/// where `mean` is the running ratio mean, `k` the number of observations
/// and `r` the largest ratio among the last `2m`.
pub fn tune_alpha(plan: &PrecisionPlan, v_n: i64, v_next: i64) -> PrecisionPlan {
    let mut p = plan.clone();
    let ratio = v_next as f64 / v_n.max(1) as f64;
    p.ratio_history.push(ratio);
    let k = p.ratio_history.len();
    let mean = match p.ratio_mean {
        None => ratio,
        Some(prev) => (prev + ratio) / 2.0,
    };
    p.ratio_mean = Some(mean);
    if p.tuning == Tuning::Fixed || k == 1 {
        if ratio > p.alpha {
            p.raise_to(ratio);
        }
        return p;
    }
    let recent = p.ratio_history[k.saturating_sub(2 * p.m)..].iter().copied().fold(f64::MIN, f64::max);
    p.alpha = (mean + 1.0 / (2 * p.m * k) as f64).max(p.floor_alpha()).max(recent);
    p
}
