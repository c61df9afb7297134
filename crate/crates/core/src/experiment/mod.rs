//! Experiment driver behind the `ub` binary: builds a problem from a spec,
//! runs the requested methods in parallel and writes traces and reports.

mod checks;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cost::{CostModel, OpCounter};
use crate::engine::{
    consistent_oracle, eq_i_prediction, newton_prediction, products_per_evaluation, reference_oracle, run_engine,
    EngineConfig, EngineRun, Mode, PrecisionPlan, Tuning,
};
use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldKind, UltraScalar, Valuation};
use crate::linalg::UltraVec;
use crate::solver::{estimate_orders_from, newton_solve, solve, Method, SolverConfig, SolverTrace, Termination};
use crate::system::{builtin_family, parse_system, EvalCounter, Family, PolySystem};

pub use checks::{check_invariants, CheckOutcome};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemSource {
    Builtin(Family),
    File(PathBuf),
}

impl FromStr for SystemSource {
    type Err = Error;
    /// `F1`, `F2`, `F3`, or a path to an existing system file.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(f) = s.parse::<Family>() {
            return Ok(SystemSource::Builtin(f));
        }
        let path = PathBuf::from(s);
        if path.is_file() {
            return Ok(SystemSource::File(path));
        }
        Err(Error::InvalidArgument(format!("unknown system '{s}' (expected F1, F2, F3 or a system file)")))
    }
}

impl std::fmt::Display for SystemSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemSource::Builtin(fam) => write!(f, "{fam}"),
            SystemSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// How Broyden runs manage precision. Newton and secant always run at a
/// fixed working precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Fixed,
    Ideal,
    #[default]
    Reality,
}

impl FromStr for RunMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(RunMode::Fixed),
            "ideal" => Ok(RunMode::Ideal),
            "reality" => Ok(RunMode::Reality),
            _ => Err(Error::InvalidArgument(format!("unknown mode '{s}'"))),
        }
    }
}

pub fn parse_field(s: &str) -> Result<FieldKind> {
    match s.to_ascii_lowercase().as_str() {
        "qp" => Ok(FieldKind::PAdic),
        "fpt" => Ok(FieldKind::PowerSeries),
        _ => Err(Error::InvalidArgument(format!("unknown field '{s}' (expected qp or fpt)"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub field: FieldKind,
    pub prime: u64,
    pub system: SystemSource,
    /// The parameter is `t = pi^t_val`.
    pub t_val: i64,
    pub methods: Vec<Method>,
    /// `N`: runs stop once `val(f_n) >= N`.
    pub target: i64,
    /// Growth exponent for reality mode; `None` means `2^{1/m}`.
    pub alpha: Option<f64>,
    pub tuning: Tuning,
    pub mode: RunMode,
    pub seed: u64,
    /// Start residues; defaults to the built-in start or a residue root
    /// chosen by the seed.
    pub x0: Option<Vec<i64>>,
    /// Working precision of fixed-precision runs; defaults to `3N`.
    pub working_prec: Option<i64>,
    pub cost_model: CostModel,
    pub out: PathBuf,
    pub tsv: bool,
}

impl ExperimentSpec {
    pub fn new(system: SystemSource) -> Self {
        ExperimentSpec {
            field: FieldKind::PAdic,
            prime: 17,
            system,
            t_val: 1,
            methods: vec![Method::Broyden, Method::Newton],
            target: 64,
            alpha: None,
            tuning: Tuning::Adaptive,
            mode: RunMode::Reality,
            seed: 0,
            x0: None,
            working_prec: None,
            cost_model: CostModel::default(),
            out: PathBuf::from("out"),
            tsv: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        FieldContext::new(self.field, self.prime)?;
        if self.target < 1 {
            return Err(Error::InvalidArgument(format!("target precision {} must be at least 1", self.target)));
        }
        if self.t_val < 1 {
            return Err(Error::InvalidArgument(format!("t-val {} must be at least 1", self.t_val)));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no method given".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidArgument(format!("method {m} given twice")));
            }
        }
        if let Some(w) = self.working_prec {
            if w < self.target {
                return Err(Error::InvalidArgument(format!(
                    "working precision {w} is below the target {}",
                    self.target
                )));
            }
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 1.0) {
                return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {a}")));
            }
        }
        Ok(())
    }

    pub fn working_prec(&self) -> i64 {
        self.working_prec.unwrap_or(3 * self.target)
    }
}

/// A system, its parameter and a start point, ready to solve.
#[derive(Clone, Debug)]
pub struct Problem {
    pub ctx: FieldContext,
    pub sys: PolySystem,
    pub t: UltraScalar,
    pub x0: UltraVec,
    /// `L`: products per evaluation of `f`.
    pub l: u64,
}

pub fn load_system(src: &SystemSource) -> Result<PolySystem> {
    match src {
        SystemSource::Builtin(f) => Ok(builtin_family(*f)),
        SystemSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_system(&text).map_err(|e| e.context(path.display().to_string()))
        }
    }
}

pub fn prepare(spec: &ExperimentSpec) -> Result<Problem> {
    spec.validate()?;
    let ctx = FieldContext::new(spec.field, spec.prime)?;
    let sys = load_system(&spec.system)?;
    let t = UltraScalar::uniformizer_pow(&ctx, spec.t_val);
    let start: Vec<i64> = match (&spec.x0, &spec.system) {
        (Some(x), _) => x.clone(),
        (None, SystemSource::Builtin(f)) => f.start_residue().to_vec(),
        (None, SystemSource::File(_)) => {
            // t has positive valuation, so its residue is 0.
            let roots = sys.residue_roots(spec.prime, 0);
            if roots.is_empty() {
                return Err(Error::Admissibility("the system has no simple residue root".into()));
            }
            let r = &roots[(spec.seed % roots.len() as u64) as usize];
            r.iter().map(|&d| d as i64).collect()
        }
    };
    if start.len() != sys.m() {
        return Err(Error::InvalidArgument(format!(
            "x0 has {} entries, the system has {} unknowns",
            start.len(),
            sys.m()
        )));
    }
    let x0 = UltraVec::from_ints(&ctx, &start);
    let l = products_per_evaluation(&sys, &t)?;
    Ok(Problem { ctx, sys, t, x0, l })
}

#[derive(Clone, Debug)]
pub enum MethodRun {
    Fixed(SolverTrace),
    Engine(Box<EngineRun>),
}

impl MethodRun {
    pub fn valuations(&self) -> Vec<Valuation> {
        match self {
            MethodRun::Fixed(t) => t.valuations(),
            MethodRun::Engine(e) => e.valuations(),
        }
    }

    pub fn root(&self) -> &UltraVec {
        match self {
            MethodRun::Fixed(t) => t.root(),
            MethodRun::Engine(e) => &e.root,
        }
    }

    pub fn termination(&self) -> Termination {
        match self {
            MethodRun::Fixed(t) => t.termination,
            MethodRun::Engine(e) => e.termination,
        }
    }

    pub fn ops(&self) -> OpCounter {
        match self {
            MethodRun::Fixed(t) => t.total_ops(),
            MethodRun::Engine(e) => e.ledger.totals(),
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            MethodRun::Fixed(t) => t.to_csv(),
            MethodRun::Engine(e) => e.to_csv(),
        }
    }

    /// Gnuplot-ready `(k, v_k)` pairs.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# k\tv_k\n");
        for (k, v) in self.valuations().into_iter().enumerate() {
            let v = v.lower_bound().map_or_else(|| "inf".to_string(), |v| v.to_string());
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }

    /// Finite valuations; a trailing apparent zero is dropped.
    pub fn finite_valuations(&self) -> Vec<i64> {
        self.valuations().iter().filter_map(|v| v.finite()).collect()
    }
}

/// Runs one method on a prepared problem.
pub fn run_method(problem: &Problem, spec: &ExperimentSpec, method: Method) -> Result<MethodRun> {
    let Problem { sys, t, x0, .. } = problem;
    let engine_mode = match (method, spec.mode) {
        (Method::Broyden, RunMode::Ideal) => Some(Mode::Ideal),
        (Method::Broyden, RunMode::Reality) => Some(Mode::Reality),
        _ => None,
    };
    let Some(mode) = engine_mode else {
        let cfg = SolverConfig::new(method, spec.target).with_working_prec(spec.working_prec());
        return solve(sys, t, x0, &cfg).map(MethodRun::Fixed);
    };
    let mut cfg = EngineConfig::new(mode, spec.target);
    cfg.cost_model = spec.cost_model;
    let mut plan = match spec.alpha {
        Some(a) => PrecisionPlan::with_alpha(sys.m(), a)?,
        None => PrecisionPlan::new(sys.m()),
    };
    plan.tuning = spec.tuning;
    let oracle = match mode {
        Mode::Ideal => {
            let seed = reference_oracle(sys, t, x0, spec.target)?;
            Some(consistent_oracle(sys, t, x0, spec.target, seed)?)
        }
        Mode::Reality => None,
    };
    run_engine(sys, t, x0, &cfg, plan, oracle.as_deref()).map(|r| MethodRun::Engine(Box::new(r)))
}

/// Root accurate to `2N`, for the error columns.
fn reference_root(problem: &Problem, target: i64) -> Result<UltraVec> {
    let cfg = SolverConfig::new(Method::Newton, 2 * target).with_working_prec(4 * target);
    Ok(newton_solve(&problem.sys, &problem.t, &problem.x0, &cfg)?.root().clone())
}

#[derive(Clone, Debug)]
pub struct MethodOutcome {
    pub method: Method,
    pub run: MethodRun,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub outcomes: Vec<MethodOutcome>,
    pub orders: Value,
    pub costs: Value,
    /// Files written, in order.
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }

    /// One line per method for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let v: Vec<String> = o.run.valuations().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                out,
                "{}: {} iterations, {:?}, v = [{}]",
                o.method,
                v.len().saturating_sub(1),
                o.run.termination(),
                v.join(", ")
            );
        }
        out
    }
}

fn orders_json(outcomes: &[MethodOutcome], m: usize) -> Value {
    let mut map = Map::new();
    for o in outcomes {
        let v = o.run.finite_valuations();
        // Secant is one-dimensional; its doubling window is still 2m.
        let entry = match estimate_orders_from(&v, m) {
            Ok(r) => serde_json::to_value(r).expect("order reports serialize"),
            Err(e) => json!({ "v": v, "error": e.to_string() }),
        };
        map.insert(o.method.to_string(), entry);
    }
    Value::Object(map)
}

fn costs_json(outcomes: &[MethodOutcome], problem: &Problem, spec: &ExperimentSpec) -> Value {
    let model = spec.cost_model;
    let m = problem.sys.m();
    let mut methods = Map::new();
    for o in outcomes {
        let ops = o.run.ops();
        let mut entry = json!({
            "mults": ops.mults,
            "divs": ops.divs,
            "mat_mat": ops.mat_mat,
            "cost": ops.model_cost(model).to_string(),
            "iterations": o.run.valuations().len().saturating_sub(1),
        });
        if let MethodRun::Engine(e) = &o.run {
            entry["ledger"] = e.ledger.to_json();
            entry["final_alpha"] = json!(e.plan.alpha);
        }
        methods.insert(o.method.to_string(), entry);
    }
    let plan_alpha = spec.alpha.unwrap_or_else(|| 2f64.powf(1.0 / m as f64));
    let observed = outcomes
        .iter()
        .find(|o| o.method == Method::Broyden)
        .and_then(|o| estimate_orders_from(&o.run.finite_valuations(), m).ok())
        .map(|r| r.q_tail);
    json!({
        "model": model,
        "m": m,
        "l": problem.l,
        "target": spec.target,
        "methods": methods,
        "eq_i": {
            "alpha": plan_alpha,
            "prediction": eq_i_prediction(model, m, problem.l, plan_alpha, spec.target),
            "alpha_observed": observed,
            "prediction_observed": observed.filter(|&a| a > 1.0).map(|a| eq_i_prediction(model, m, problem.l, a, spec.target)),
        },
        "newton_closed_form": newton_prediction(model, m, problem.l, spec.target),
    })
}

/// Runs every method without touching the file system.
pub fn execute(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let problem = prepare(spec)?;
    let shared = &problem;
    let (runs, reference) = std::thread::scope(|s| {
        let handles: Vec<_> =
            spec.methods.iter().map(|&method| s.spawn(move || (method, run_method(shared, spec, method)))).collect();
        let reference = reference_root(shared, spec.target);
        let runs: Vec<_> = handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect();
        (runs, reference)
    });
    let reference = reference.map_err(|e| e.context("reference root"))?;
    let mut outcomes = Vec::with_capacity(runs.len());
    for (method, run) in runs {
        let mut run = run.map_err(|e| e.context(method.to_string()))?;
        match &mut run {
            MethodRun::Fixed(tr) => tr.attach_reference(&problem.sys, &problem.t, &reference)?,
            MethodRun::Engine(e) => e.attach_reference(&reference)?,
        }
        outcomes.push(MethodOutcome { method, run });
    }
    let orders = orders_json(&outcomes, problem.sys.m());
    let costs = costs_json(&outcomes, &problem, spec);
    Ok(ExperimentReport { outcomes, orders, costs, files: Vec::new() })
}

fn write_file(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

/// Runs the spec and writes `<method>.csv` per method, `orders.json`,
/// `costs.json`, and `<method>.tsv` when requested, into `spec.out`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = execute(spec)?;
    std::fs::create_dir_all(&spec.out).map_err(|e| Error::Io(format!("{}: {e}", spec.out.display())))?;
    let mut files = Vec::new();
    for o in &report.outcomes {
        write_file(&spec.out, &format!("{}.csv", o.method), &o.run.to_csv(), &mut files)?;
        if spec.tsv {
            write_file(&spec.out, &format!("{}.tsv", o.method), &o.run.to_tsv(), &mut files)?;
        }
    }
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("reports serialize") + "\n";
    write_file(&spec.out, "orders.json", &pretty(&report.orders), &mut files)?;
    write_file(&spec.out, "costs.json", &pretty(&report.costs), &mut files)?;
    report.files = files;
    Ok(report)
}

/// A root lifted to precision `N`.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub method: Method,
    pub root: UltraVec,
    /// `val(f(root))` with the root truncated to `N`.
    pub residual: Valuation,
    pub iterations: usize,
    pub termination: Termination,
}

impl LiftResult {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, x) in self.root.entries().iter().enumerate() {
            let _ = writeln!(out, "x{} = {x}", i + 1);
        }
        let _ = writeln!(out, "val(f(x)) = {}", self.residual);
        let _ = writeln!(out, "iterations = {} ({}, {:?})", self.iterations, self.method, self.termination);
        out
    }
}

/// Lifts `spec.x0` to a root modulo `pi^N` with the first listed method.
pub fn root_lift(spec: &ExperimentSpec) -> Result<LiftResult> {
    if spec.x0.is_none() {
        return Err(Error::InvalidArgument("root lifting needs x0".into()));
    }
    let problem = prepare(spec)?;
    let method = spec.methods[0];
    let run = run_method(&problem, spec, method)?;
    let root = run.root().change_prec(spec.target);
    let mut ec = EvalCounter::default();
    let residual = problem.sys.evaluate(&problem.t, &root, &mut ec)?.val();
    Ok(LiftResult {
        method,
        root,
        residual,
        iterations: run.valuations().len().saturating_sub(1),
        termination: run.termination(),
    })
}
