//! Fixed-precision reference solvers and convergence-order estimation.

mod methods;
mod orders;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cost::OpCounter;
use crate::error::{Error, Result};
use crate::field::{FieldContext, UltraScalar, Valuation};
use crate::linalg::{lift_inverse, residue_inverse, UltraMat, UltraVec};
use crate::system::{EvalCounter, PolySystem};

pub use methods::{broyden_solve, newton_solve, secant_solve, solve};
pub use orders::{estimate_orders, estimate_orders_from, OrderReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Broyden,
    Secant,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Method::Newton),
            "broyden" => Ok(Method::Broyden),
            "secant" => Ok(Method::Secant),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Newton => "newton",
            Method::Broyden => "broyden",
            Method::Secant => "secant",
        })
    }
}

/// How `B_0^{-1}` is obtained for Broyden runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    #[default]
    Jacobian,
    DividedDifference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once `val(f_n) >= target`.
    pub target: i64,
    pub max_iter: usize,
    /// Fixed absolute precision of every iterate.
    pub working_prec: i64,
    pub method: Method,
    pub init: InitMode,
    /// Keep `B_n^{-1}` in each record (needed for Jacobian-error columns).
    pub keep_inverses: bool,
}

impl SolverConfig {
    /// Working precision defaults to `3 * target`.
    pub fn new(method: Method, target: i64) -> Self {
        SolverConfig {
            target,
            max_iter: 200,
            working_prec: 3 * target,
            method,
            init: InitMode::Jacobian,
            keep_inverses: false,
        }
    }

    pub fn with_working_prec(mut self, w: i64) -> Self {
        self.working_prec = w;
        self
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub fn with_init(mut self, init: InitMode) -> Self {
        self.init = init;
        self
    }

    pub fn keeping_inverses(mut self) -> Self {
        self.keep_inverses = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.target < 1 {
            return Err(Error::InvalidArgument(format!("target {} must be at least 1", self.target)));
        }
        if self.working_prec < self.target {
            return Err(Error::InvalidArgument(format!(
                "working precision {} is below the target {}",
                self.working_prec, self.target
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// `val(f_n)` reached the target.
    Converged,
    /// `f_n` vanished at the available precision.
    ExactAtPrecision,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterRecord {
    pub n: usize,
    pub x: UltraVec,
    pub f: UltraVec,
    pub v: Valuation,
    /// `val(x_{n+1} - x_n)`; absent on the last record.
    pub val_step: Option<Valuation>,
    /// `val(x_n - x*)` once a reference root is attached.
    pub val_err: Option<Valuation>,
    /// `val(B_n^{-1} - f'(x*)^{-1})`, which equals `val(B_n - f'(x*))` for
    /// unimodular matrices.
    pub val_jac_err: Option<Valuation>,
    pub binv: Option<UltraMat>,
    /// 1-based update index chosen at this iteration (Broyden).
    pub update_index: Option<usize>,
    pub fallback: bool,
    /// Cumulative scalar products and quotients when `f_n` became available.
    pub mults: u64,
}

impl IterRecord {
    fn new(n: usize, x: UltraVec, f: UltraVec, mults: u64) -> Self {
        let v = f.val();
        IterRecord {
            n,
            x,
            f,
            v,
            val_step: None,
            val_err: None,
            val_jac_err: None,
            binv: None,
            update_index: None,
            fallback: false,
            mults,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverTrace {
    pub method: Method,
    pub field: FieldContext,
    pub working_prec: i64,
    pub target: i64,
    pub records: Vec<IterRecord>,
    pub termination: Termination,
    /// Linear-algebra work (products, quotients, matrix products).
    pub ops: OpCounter,
    /// Work spent evaluating the system and its Jacobian.
    pub eval: EvalCounter,
}

fn val_cell(v: Option<Valuation>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

impl SolverTrace {
    pub fn root(&self) -> &UltraVec {
        &self.records.last().expect("traces are never empty").x
    }

    pub fn valuations(&self) -> Vec<Valuation> {
        self.records.iter().map(|r| r.v).collect()
    }

    /// Total products and quotients, linear algebra plus evaluation.
    pub fn total_ops(&self) -> OpCounter {
        let mut c = self.ops.clone();
        c.merge(&self.eval.ops);
        c
    }

    /// CSV with header `n,v_fn,val_step,val_err,mults`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,v_fn,val_step,val_err,mults\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{}", r.n, r.v, val_cell(r.val_step), val_cell(r.val_err), r.mults);
        }
        out
    }

    /// Gnuplot-ready `(k, v_k)` pairs; apparent zeros print their bound.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# k\tv_k\n");
        for r in &self.records {
            let v = r.v.lower_bound().map_or_else(|| "inf".to_string(), |v| v.to_string());
            let _ = writeln!(out, "{}\t{v}", r.n);
        }
        out
    }

    /// Summary JSON; with `verbose`, every iterate and residual in scalar form.
    pub fn to_json(&self, verbose: bool) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let mut o = json!({
                    "n": r.n,
                    "v_fn": r.v,
                    "val_step": r.val_step,
                    "val_err": r.val_err,
                    "val_jac_err": r.val_jac_err,
                    "update_index": r.update_index,
                    "fallback": r.fallback,
                    "mults": r.mults,
                });
                if verbose {
                    o["x"] = r.x.to_json();
                    o["f"] = r.f.to_json();
                    if let Some(b) = &r.binv {
                        o["binv"] = b.to_json();
                    }
                }
                o
            })
            .collect();
        json!({
            "method": self.method,
            "field": self.field.to_string(),
            "working_prec": self.working_prec,
            "target": self.target,
            "termination": self.termination,
            "ops": self.ops,
            "eval": self.eval,
            "records": records,
        })
    }

    /// Fills the `x*`-relative columns from a reference root.
    pub fn attach_reference(&mut self, sys: &PolySystem, t: &UltraScalar, xstar: &UltraVec) -> Result<()> {
        let jinv = match self.records.iter().any(|r| r.binv.is_some()) {
            true => {
                let mut scratch = EvalCounter::default();
                let j = sys.jacobian(t, xstar, &mut scratch)?;
                let x0 = residue_inverse(&j)?;
                Some(lift_inverse(&j, &x0, xstar.abs_prec().unwrap_or(self.working_prec), &mut scratch.ops)?)
            }
            false => None,
        };
        for r in &mut self.records {
            r.val_err = Some(r.x.sub(xstar)?.val());
            if let (Some(b), Some(ji)) = (&r.binv, &jinv) {
                r.val_jac_err = Some(b.sub(ji)?.val());
            }
        }
        Ok(())
    }
}
