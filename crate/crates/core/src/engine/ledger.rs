use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cost::{CostModel, OpCounter};

/// Work done by one engine iteration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationCost {
    pub n: usize,
    pub v_n: i64,
    /// Observed `v_{n+1}`; for a final iteration that reached the target
    /// through an apparent zero this is the precision bound.
    pub v_next: i64,
    /// Precision `B_n^{-1}` carried into the computation of `s_n`.
    pub step_prec: i64,
    /// Precision of each evaluation of `f` in this iteration.
    pub eval_precs: Vec<i64>,
    /// Products and quotients of steps 2, 7, 9, 11, 12 and 13.
    pub linalg: OpCounter,
    pub eval: OpCounter,
    /// Whether steps 6 onward ran (false for the final iteration).
    pub updated: bool,
}

impl IterationCost {
    pub fn cost(&self, model: CostModel) -> u128 {
        self.linalg.model_cost(model) + self.eval.model_cost(model)
    }

    /// Products and quotients, linear algebra and evaluation.
    pub fn count(&self) -> u64 {
        self.linalg.mults + self.linalg.divs + self.eval.mults + self.eval.divs
    }

    /// Linear-algebra bound read off the step annotations:
    /// `m^2 M(step_prec) + (2m^2 + m) M(v_{n+1}) + 5 m^2 M(v_n)`, which is
    /// `(3m^2 + m) M(v_{n+1}) + 5 m^2 M(v_n)` when `step_prec = v_{n+1}`.
    pub fn linalg_bound(&self, model: CostModel, m: usize) -> u128 {
        let m = m as u128;
        let step2 = m * m * model.m(self.step_prec);
        if !self.updated {
            return step2;
        }
        step2 + (2 * m * m + m) * model.m(self.v_next) + 5 * m * m * model.m(self.v_n)
    }

    /// `L M(prec)` summed over the evaluations.
    pub fn eval_bound(&self, model: CostModel, l: u64) -> u128 {
        self.eval_precs.iter().map(|&p| l as u128 * model.m(p)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub model: CostModel,
    pub m: usize,
    /// Products of one evaluation of `f` at a point with unit entries.
    pub l: u64,
    /// Evaluations of `f` and `f'` before the first iteration.
    pub init: OpCounter,
    pub iterations: Vec<IterationCost>,
}

impl CostLedger {
    pub fn new(model: CostModel, m: usize, l: u64) -> Self {
        CostLedger { model, m, l, init: OpCounter::new(), iterations: Vec::new() }
    }

    /// Sum of every counter in the ledger.
    pub fn totals(&self) -> OpCounter {
        let mut c = self.init.clone();
        for it in &self.iterations {
            c.merge(&it.linalg);
            c.merge(&it.eval);
        }
        c
    }

    pub fn total_cost(&self) -> u128 {
        self.totals().model_cost(self.model)
    }

    pub fn linalg_cost(&self) -> u128 {
        self.iterations.iter().map(|it| it.linalg.model_cost(self.model)).sum()
    }

    pub fn eval_cost(&self) -> u128 {
        self.init.model_cost(self.model) + self.iterations.iter().map(|it| it.eval.model_cost(self.model)).sum::<u128>()
    }

    /// Per-iteration overhead against the ideal schedule,
    /// `m^2 (M(step_prec) - M(v_{n+1})) + L (M(eval_prec) - M(v_{n+1} + v_{n+2}))`,
    /// given the observed valuations `v_0, v_1, ...`.
    pub fn overheads(&self, v: &[i64]) -> Vec<i128> {
        let mm = (self.m * self.m) as i128;
        let m = |x: i64| self.model.m(x) as i128;
        self.iterations
            .iter()
            .map(|it| {
                let v1 = it.v_next;
                let v2 = v.get(it.n + 2).copied().unwrap_or(v1);
                let step = mm * (m(it.step_prec) - m(v1));
                let eval: i128 = it.eval_precs.iter().map(|&p| m(p)).sum::<i128>() - m(v1 + v2);
                step + self.l as i128 * eval
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let per: Vec<Value> = self
            .iterations
            .iter()
            .map(|it| {
                json!({
                    "n": it.n,
                    "v_n": it.v_n,
                    "v_next": it.v_next,
                    "step_prec": it.step_prec,
                    "eval_precs": it.eval_precs,
                    "mults": it.linalg.mults + it.eval.mults,
                    "divs": it.linalg.divs + it.eval.divs,
                    "cost": it.cost(self.model).to_string(),
                    "linalg_bound": it.linalg_bound(self.model, self.m).to_string(),
                    "eval_bound": it.eval_bound(self.model, self.l).to_string(),
                })
            })
            .collect();
        json!({
            "model": self.model,
            "m": self.m,
            "l": self.l,
            "total_cost": self.total_cost().to_string(),
            "linalg_cost": self.linalg_cost().to_string(),
            "eval_cost": self.eval_cost().to_string(),
            "iterations": per,
        })
    }
}

/// Closed-form Broyden cost to reach precision `n` with growth exponent
/// `alpha`: `(5m^2 + (3m^2 + m) alpha^2 + L (1 + alpha)^2 alpha^2) M(n / (alpha - 1))`.
pub fn eq_i_prediction(model: CostModel, m: usize, l: u64, alpha: f64, n: i64) -> f64 {
    let m = m as f64;
    let a2 = alpha * alpha;
    let coeff = 5.0 * m * m + (3.0 * m * m + m) * a2 + l as f64 * (1.0 + alpha).powi(2) * a2;
    coeff * model.m_f64(n as f64 / (alpha - 1.0))
}

/// Newton's cost to precision `n`: `(m^3 + m L) M(n)`.
pub fn newton_prediction(model: CostModel, m: usize, l: u64, n: i64) -> f64 {
    let m = m as f64;
    (m * m * m + m * l as f64) * model.m_f64(n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_bound_matches_closed_form() {
        let it = IterationCost { n: 0, v_n: 3, v_next: 5, step_prec: 5, updated: true, ..Default::default() };
        let model = CostModel::Linear;
        assert_eq!(it.linalg_bound(model, 2), (3 * 4 + 2) * 5 + 5 * 4 * 3);
    }

    #[test]
    fn prediction_shape() {
        let model = CostModel::Linear;
        let p = eq_i_prediction(model, 1, 0, 2.0, 10);
        assert!((p - (5.0 + 4.0 * 4.0) * 10.0).abs() < 1e-9);
        assert_eq!(newton_prediction(model, 2, 3, 8), (8.0 + 6.0) * 8.0);
    }
}
