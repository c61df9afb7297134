//! Broyden iteration with dynamically managed precision.
//!
//! Every intermediate is kept at exactly the precision the next steps can
//! use. In ideal mode an oracle supplies the valuations `v_{n+1}` and
//! `v_{n+2}` ahead of time; in reality mode they are predicted as
//! `ceil(alpha v_n)` and `ceil(alpha^2 v_n)` and corrected once `f_{n+1}`
//! reveals `v_{n+1}`.

mod iteration;
mod ledger;
mod plan;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cost::CostModel;
use crate::error::Result;
use crate::field::{UltraScalar, Valuation};
use crate::linalg::{UltraMat, UltraVec};
use crate::solver::{SolverConfig, Termination};
use crate::system::PolySystem;

pub use iteration::{
    ideal_iteration, products_per_evaluation, reality_iteration, run_engine, Engine, IterationInfo, PrecisionState,
};
pub use ledger::{eq_i_prediction, newton_prediction, CostLedger, IterationCost};
pub use plan::{tune_alpha, PrecisionPlan, Tuning};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ideal,
    Reality,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Mode::Ideal),
            "reality" => Ok(Mode::Reality),
            _ => Err(crate::Error::InvalidArgument(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Stop once `v_n >= target`.
    pub target: i64,
    pub mode: Mode,
    /// Turn interval disagreements into errors instead of recording them.
    pub assert_intervals: bool,
    pub cost_model: CostModel,
    pub max_iter: usize,
}

impl EngineConfig {
    pub fn new(mode: Mode, target: i64) -> Self {
        EngineConfig { target, mode, assert_intervals: true, cost_model: CostModel::default(), max_iter: 500 }
    }

    pub fn without_assertions(mut self) -> Self {
        self.assert_intervals = false;
        self
    }
}

/// Observed interval of one named intermediate against its annotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCheck {
    pub iteration: usize,
    pub step: String,
    pub name: String,
    pub expected: (i64, i64),
    pub got: (i64, i64),
    /// When false only `got.0 >= expected.0` is required.
    pub lo_exact: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineRecord {
    pub n: usize,
    pub x: UltraVec,
    pub f: UltraVec,
    pub v: Valuation,
    /// Interval of `f_n` as handed to iteration `n`.
    pub f_interval: (i64, i64),
    /// Exponent in force when iteration `n` started.
    pub alpha: f64,
    /// `ceil(alpha v_n)` in reality mode, the oracle `v_{n+1}` in ideal mode.
    pub predicted_next: Option<i64>,
    /// `|predicted_next - v_{n+1}|`.
    pub gap: Option<i64>,
    pub val_step: Option<Valuation>,
    pub val_err: Option<Valuation>,
    pub update_index: Option<usize>,
    pub fallback: bool,
    pub under_predicted: bool,
    pub retries: usize,
    /// Whether every digit of `x_n` at or above `v_{n-1} + v_n` is zero.
    pub x_support_ok: Option<bool>,
    pub binv_unimodular: bool,
    /// Cumulative products and quotients, linear algebra and evaluation.
    pub mults: u64,
    /// Cumulative model cost from the ledger.
    pub ledger_cost: u128,
}

#[derive(Clone, Debug)]
pub struct EngineRun {
    pub mode: Mode,
    pub root: UltraVec,
    pub records: Vec<EngineRecord>,
    pub ledger: CostLedger,
    pub plan: PrecisionPlan,
    pub checks: Vec<StepCheck>,
    pub termination: Termination,
    pub final_binv: UltraMat,
}

impl EngineRun {
    pub fn valuations(&self) -> Vec<Valuation> {
        self.records.iter().map(|r| r.v).collect()
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &StepCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }

    /// Trace CSV columns followed by
    /// `interval_lo,interval_hi,alpha,gap,ledger_mults`.
    pub fn to_csv(&self) -> String {
        let cell = |v: Option<Valuation>| v.map_or_else(String::new, |v| v.to_string());
        let mut out = String::from("n,v_fn,val_step,val_err,mults,interval_lo,interval_hi,alpha,gap,ledger_mults\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.6},{},{}",
                r.n,
                r.v,
                cell(r.val_step),
                cell(r.val_err),
                r.mults,
                r.f_interval.0,
                r.f_interval.1,
                r.alpha,
                r.gap.map_or_else(String::new, |g| g.to_string()),
                r.ledger_cost
            );
        }
        out
    }

    pub fn to_json(&self, verbose: bool) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let mut o = json!({
                    "n": r.n,
                    "v_fn": r.v,
                    "f_interval": r.f_interval,
                    "alpha": r.alpha,
                    "predicted_next": r.predicted_next,
                    "gap": r.gap,
                    "val_step": r.val_step,
                    "val_err": r.val_err,
                    "update_index": r.update_index,
                    "fallback": r.fallback,
                    "under_predicted": r.under_predicted,
                    "retries": r.retries,
                    "x_support_ok": r.x_support_ok,
                    "binv_unimodular": r.binv_unimodular,
                    "mults": r.mults,
                    "ledger_cost": r.ledger_cost.to_string(),
                });
                if verbose {
                    o["x"] = r.x.to_json();
                    o["f"] = r.f.to_json();
                }
                o
            })
            .collect();
        json!({
            "mode": self.mode,
            "termination": self.termination,
            "root": self.root.to_json(),
            "plan": self.plan,
            "ledger": self.ledger.to_json(),
            "failed_checks": self.failed_checks().collect::<Vec<_>>(),
            "checks": self.checks.len(),
            "records": records,
        })
    }

    /// Fills `val_err` from a reference root.
    pub fn attach_reference(&mut self, xstar: &UltraVec) -> Result<()> {
        for r in &mut self.records {
            r.val_err = Some(r.x.sub(xstar)?.val());
        }
        Ok(())
    }
}

/// Valuations of a fixed-precision Broyden run deep enough to serve as the
/// ideal-mode oracle for target `n`: it continues to `3n` at working
/// precision `6n`.
pub fn reference_oracle(sys: &PolySystem, t: &UltraScalar, x0: &UltraVec, n: i64) -> Result<Vec<Valuation>> {
    let cfg = SolverConfig::new(crate::solver::Method::Broyden, 3 * n).with_working_prec(6 * n);
    Ok(crate::solver::broyden_solve(sys, t, x0, &cfg)?.valuations())
}

/// Refines `seed` (usually [`reference_oracle`]) into the valuation
/// sequence the ideal-mode engine itself produces: the engine's lifts
/// differ from a fixed-precision run beyond `v_n`, which can shift later
/// valuations. Reruns until the oracle and the observations agree.
pub fn consistent_oracle(
    sys: &PolySystem,
    t: &UltraScalar,
    x0: &UltraVec,
    target: i64,
    seed: Vec<Valuation>,
) -> Result<Vec<Valuation>> {
    let cfg = EngineConfig::new(Mode::Ideal, target).without_assertions();
    let mut oracle = seed;
    for _ in 0..4 * oracle.len().max(8) {
        let run = run_engine(sys, t, x0, &cfg, PrecisionPlan::new(sys.m()), Some(&oracle))?;
        let observed = run.valuations();
        let body = observed.len() - 1;
        let reached = |v: Option<&Valuation>| v.and_then(|v| v.lower_bound()).is_some_and(|b| b >= target);
        // The closing entry only has to agree on whether the target was reached.
        let last_differs = reached(observed.last()) && !reached(oracle.get(body));
        match (0..body).find(|&k| oracle.get(k) != Some(&observed[k])).or(last_differs.then_some(body)) {
            None => return Ok(oracle),
            Some(k) => {
                if k < oracle.len() {
                    oracle[k] = observed[k];
                } else {
                    oracle.push(observed[k]);
                }
            }
        }
    }
    Err(crate::Error::NonConvergence { iterations: oracle.len(), last: "oracle refinement".into() })
}
