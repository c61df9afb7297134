use super::{InitMode, IterRecord, Method, SolverConfig, SolverTrace, Termination};
use crate::cost::OpCounter;
use crate::error::{Error, Result};
use crate::field::{UltraScalar, Valuation};
use crate::linalg::{
    choose_update_vector, lift_inverse, mat_vec, residue_inverse, sherman_morrison_from_parts, UltraMat, UltraVec,
};
use crate::system::{divided_difference_matrix, EvalCounter, PolySystem};

fn stop_reason(f: &UltraVec, target: i64) -> Option<Termination> {
    match f.val() {
        Valuation::Finite(v) if v >= target => Some(Termination::Converged),
        Valuation::Finite(_) => None,
        _ => Some(Termination::ExactAtPrecision),
    }
}

fn admissible_start(x0: &UltraVec) -> Result<()> {
    for (i, x) in x0.entries().iter().enumerate() {
        if let Valuation::Finite(v) = x.valuation() {
            if v < 0 {
                return Err(Error::Admissibility(format!("x0[{}] has negative valuation {v}", i + 1)));
            }
        }
        if x.abs_prec().is_some_and(|c| c < 1) {
            return Err(Error::Admissibility(format!("x0[{}] is not known modulo the uniformizer", i + 1)));
        }
    }
    Ok(())
}

fn singular_start(e: Error) -> Error {
    match e {
        Error::SingularResidue => Error::Admissibility("Jacobian at x0 is singular modulo the uniformizer".into()),
        other => other,
    }
}

struct Run<'a> {
    sys: &'a PolySystem,
    t: &'a UltraScalar,
    cfg: &'a SolverConfig,
    ops: OpCounter,
    eval: EvalCounter,
    records: Vec<IterRecord>,
}

impl<'a> Run<'a> {
    fn new(sys: &'a PolySystem, t: &'a UltraScalar, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Run { sys, t, cfg, ops: OpCounter::new(), eval: EvalCounter::default(), records: Vec::new() })
    }

    fn mults(&self) -> u64 {
        self.ops.mults + self.ops.divs + self.eval.ops.mults + self.eval.ops.divs
    }

    fn point(&self, x: &UltraVec) -> UltraVec {
        x.change_prec(self.cfg.working_prec)
    }

    fn evaluate(&mut self, x: &UltraVec) -> Result<UltraVec> {
        self.sys.evaluate(self.t, x, &mut self.eval)
    }

    fn push(&mut self, x: UltraVec, f: UltraVec) {
        let rec = IterRecord::new(self.records.len(), x, f, self.mults());
        self.records.push(rec);
    }

    fn finish(self, method: Method, termination: Termination) -> SolverTrace {
        SolverTrace {
            method,
            field: *self.t.context(),
            working_prec: self.cfg.working_prec,
            target: self.cfg.target,
            records: self.records,
            termination,
            ops: self.ops,
            eval: self.eval,
        }
    }

    fn non_convergence(&self) -> Error {
        let last = self.records.last().map_or_else(|| "none".to_string(), |r| r.v.to_string());
        Error::NonConvergence { iterations: self.records.len().saturating_sub(1), last }
    }

    fn initial_inverse(&mut self, x: &UltraVec) -> Result<UltraMat> {
        let b0 = match self.cfg.init {
            InitMode::Jacobian => self.sys.jacobian(self.t, x, &mut self.eval)?,
            InitMode::DividedDifference => divided_difference_matrix(self.sys, self.t, x, 1, &mut self.eval)?,
        };
        Ok(residue_inverse(&b0).map_err(singular_start)?.change_prec(self.cfg.working_prec))
    }
}

/// `x_{n+1} = x_n - f'(x_n)^{-1} f(x_n)`, the inverse rebuilt each step
/// from the residue inverse by matrix Newton lifting.
pub fn newton_solve(sys: &PolySystem, t: &UltraScalar, x0: &UltraVec, cfg: &SolverConfig) -> Result<SolverTrace> {
    admissible_start(x0)?;
    let mut run = Run::new(sys, t, cfg)?;
    let w = cfg.working_prec;
    let mut x = run.point(x0);
    let mut f = run.evaluate(&x)?;
    run.push(x.clone(), f.clone());
    for n in 0..=cfg.max_iter {
        if let Some(reason) = stop_reason(&f, cfg.target) {
            return Ok(run.finish(Method::Newton, reason));
        }
        if n == cfg.max_iter {
            break;
        }
        let j = sys.jacobian(t, &x, &mut run.eval)?;
        let j0 = residue_inverse(&j).map_err(if n == 0 { singular_start } else { std::convert::identity })?;
        let jinv = lift_inverse(&j, &j0, w, &mut run.ops)?;
        let s = mat_vec(&jinv, &f, &mut run.ops)?.neg();
        run.records[n].val_step = Some(s.val());
        if cfg.keep_inverses {
            run.records[n].binv = Some(jinv);
        }
        x = run.point(&x.add(&s)?);
        f = run.evaluate(&x)?;
        run.push(x.clone(), f.clone());
    }
    Err(run.non_convergence())
}

/// Good Broyden iteration on `B_n^{-1}` with the update vector
/// `u_n = s_{n,l}^{-1} e_l`. `B_n^{-1}` is lifted back to the working
/// precision with zero digits after every update.
pub fn broyden_solve(sys: &PolySystem, t: &UltraScalar, x0: &UltraVec, cfg: &SolverConfig) -> Result<SolverTrace> {
    admissible_start(x0)?;
    let mut run = Run::new(sys, t, cfg)?;
    let w = cfg.working_prec;
    let mut x = run.point(x0);
    let mut f = run.evaluate(&x)?;
    run.push(x.clone(), f.clone());
    let mut binv = run.initial_inverse(&x)?;
    for n in 0..=cfg.max_iter {
        if let Some(reason) = stop_reason(&f, cfg.target) {
            return Ok(run.finish(Method::Broyden, reason));
        }
        if n == cfg.max_iter {
            break;
        }
        if cfg.keep_inverses {
            run.records[n].binv = Some(binv.clone());
        }
        let s = mat_vec(&binv, &f, &mut run.ops)?.neg();
        run.records[n].val_step = Some(s.val());
        let x_next = run.point(&x.add(&s)?);
        let f_next = run.evaluate(&x_next)?;

        if stop_reason(&f_next, cfg.target).is_none() {
            if n >= 1 {
                if let (Valuation::Finite(a), Valuation::Finite(b)) = (f.val(), f_next.val()) {
                    if b < a {
                        return Err(Error::BasinViolation(format!(
                            "val(f) dropped from {a} to {b} at iteration {}",
                            n + 1
                        )));
                    }
                }
            }
            let y = f_next.sub(&f)?;
            let h = mat_vec(&binv, &f_next, &mut run.ops)?;
            let check = h.add(&s)?;
            let choice = choose_update_vector(&s, &check)?;
            run.records[n].update_index = Some(choice.l);
            run.records[n].fallback = choice.fallback;
            binv = sherman_morrison_from_parts(&binv, &h, &choice.u, &y, &mut run.ops)?.change_prec(w);
        }
        x = x_next;
        f = f_next;
        run.push(x.clone(), f.clone());
    }
    Err(run.non_convergence())
}

/// One-dimensional secant iteration
/// `x_{n+1} = x_n - f(x_n) (x_n - x_{n-1}) / (f(x_n) - f(x_{n-1}))`.
pub fn secant_solve(
    sys: &PolySystem,
    t: &UltraScalar,
    x0: &UltraScalar,
    x1: &UltraScalar,
    cfg: &SolverConfig,
) -> Result<SolverTrace> {
    if sys.m() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: sys.m() });
    }
    let mut run = Run::new(sys, t, cfg)?;
    let w = cfg.working_prec;
    let mut xs = [x0.change_prec(w), x1.change_prec(w)];
    if xs[0] == xs[1] {
        return Err(Error::InvalidArgument("secant needs two distinct starting points".into()));
    }
    let vec1 = |x: &UltraScalar| UltraVec::new(vec![x.clone()]);
    let mut fs = [run.evaluate(&vec1(&xs[0])?)?, UltraVec::zeros(t.context(), 1)];
    run.push(vec1(&xs[0])?, fs[0].clone());
    if let Some(reason) = stop_reason(&fs[0], cfg.target) {
        return Ok(run.finish(Method::Secant, reason));
    }
    fs[1] = run.evaluate(&vec1(&xs[1])?)?;
    run.records[0].val_step = Some(xs[1].sub(&xs[0])?.valuation());
    run.push(vec1(&xs[1])?, fs[1].clone());
    if (fs[0].is_zero_like() || fs[1].is_zero_like() || fs[0] == fs[1]) && stop_reason(&fs[1], cfg.target).is_none() {
        return Err(Error::InvalidArgument("secant needs distinct nonzero values at the starting points".into()));
    }
    for n in 1..=cfg.max_iter {
        if let Some(reason) = stop_reason(&fs[1], cfg.target) {
            return Ok(run.finish(Method::Secant, reason));
        }
        if n == cfg.max_iter {
            break;
        }
        let f_prev = fs[0].get(0);
        let f_cur = fs[1].get(0);
        let den = f_cur.sub(f_prev)?;
        let q = run.ops.div(&xs[1].sub(&xs[0])?, &den)?;
        let step = run.ops.mul(f_cur, &q)?.neg();
        run.records[n].val_step = Some(step.valuation());
        let x_next = xs[1].add(&step)?.change_prec(w);
        let f_next = run.evaluate(&vec1(&x_next)?)?;
        run.push(vec1(&x_next)?, f_next.clone());
        xs = [xs[1].clone(), x_next];
        fs = [fs[1].clone(), f_next];
    }
    Err(run.non_convergence())
}

/// Dispatches on `cfg.method`. Secant runs take `x_1` from the first
/// Broyden step so that both methods share their first two iterates.
pub fn solve(sys: &PolySystem, t: &UltraScalar, x0: &UltraVec, cfg: &SolverConfig) -> Result<SolverTrace> {
    match cfg.method {
        Method::Newton => newton_solve(sys, t, x0, cfg),
        Method::Broyden => broyden_solve(sys, t, x0, cfg),
        Method::Secant => {
            admissible_start(x0)?;
            let mut run = Run::new(sys, t, cfg)?;
            let x = run.point(x0);
            let f = run.evaluate(&x)?;
            let binv = run.initial_inverse(&x)?;
            let s = mat_vec(&binv, &f, &mut run.ops)?.neg();
            let x1 = x.add(&s)?;
            secant_solve(sys, t, x.get(0), x1.get(0), cfg)
        }
    }
}
