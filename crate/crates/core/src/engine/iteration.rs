use super::ledger::{CostLedger, IterationCost};
use super::plan::{tune_alpha, PrecisionPlan};
use super::{EngineConfig, EngineRecord, EngineRun, Mode, StepCheck};
use crate::cost::OpCounter;
use crate::error::{Error, Result};
use crate::field::{UltraScalar, Valuation};
use crate::linalg::{
    choose_update_vector, dot, is_unimodular, mat_vec, rank_one, residue_inverse, vec_mat, UltraMat, UltraVec,
};
use crate::solver::Termination;
use crate::system::{EvalCounter, PolySystem};

/// Inputs of iteration `n`: `B_n^{-1}` on `[0, v_n)`, `x_n` on
/// `[0, v_n + b)` and `f_n` on `[v_n, v_n + b)`, where `b` is `v_{n+1}` in
/// ideal mode and its prediction in reality mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionState {
    pub n: usize,
    pub v: i64,
    pub v_prev: Option<i64>,
    pub binv: UltraMat,
    pub x: UltraVec,
    pub f: UltraVec,
    pub done: Option<Termination>,
}

/// What one iteration observed, beyond the next state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationInfo {
    pub alpha: f64,
    pub predicted_next: Option<i64>,
    pub gap: Option<i64>,
    pub val_step: Option<Valuation>,
    pub update_index: Option<usize>,
    pub fallback: bool,
    pub under_predicted: bool,
    pub retries: usize,
    pub binv_unimodular: bool,
}

/// `L`: products spent by one evaluation of `f` at a point whose entries
/// are all units.
pub fn products_per_evaluation(sys: &PolySystem, t: &UltraScalar) -> Result<u64> {
    let ones = UltraVec::from_ints(t.context(), &vec![1; sys.m()]).change_prec(1);
    let mut probe = EvalCounter::default();
    sys.evaluate(t, &ones, &mut probe)?;
    Ok(probe.ops.mults + probe.ops.divs)
}

/// Shared context of a run: the system, the ledger and the interval log.
pub struct Engine<'a> {
    pub sys: &'a PolySystem,
    pub t: &'a UltraScalar,
    pub cfg: EngineConfig,
    pub ledger: CostLedger,
    pub checks: Vec<StepCheck>,
    cur: IterationCost,
}

fn vec_iv(v: &UltraVec) -> (i64, i64) {
    (v.val().lower_bound().unwrap_or(i64::MAX), v.abs_prec().unwrap_or(i64::MAX))
}

fn mat_iv(a: &UltraMat) -> (i64, i64) {
    (a.val().lower_bound().unwrap_or(i64::MAX), a.abs_prec().unwrap_or(i64::MAX))
}

fn scalar_iv(a: &UltraScalar) -> (i64, i64) {
    (a.valuation().lower_bound().unwrap_or(i64::MAX), a.abs_prec().unwrap_or(i64::MAX))
}

fn iv_text((lo, hi): (i64, i64)) -> String {
    format!("[{lo}, {hi})")
}

impl<'a> Engine<'a> {
    pub fn new(sys: &'a PolySystem, t: &'a UltraScalar, cfg: EngineConfig) -> Result<Self> {
        if cfg.target < 1 {
            return Err(Error::InvalidArgument(format!("target {} must be at least 1", cfg.target)));
        }
        if t.valuation().lower_bound().is_some_and(|v| v < 0) {
            return Err(Error::Admissibility(format!("t has negative valuation {}", t.valuation())));
        }
        let ledger = CostLedger::new(cfg.cost_model, sys.m(), products_per_evaluation(sys, t)?);
        Ok(Engine { sys, t, cfg, ledger, checks: Vec::new(), cur: IterationCost::default() })
    }

    fn check(
        &mut self,
        n: usize,
        step: &str,
        name: &str,
        got: (i64, i64),
        expected: (i64, i64),
        lo_exact: bool,
    ) -> Result<()> {
        // An annotation [a, b) with a > b is an apparent zero at b.
        let expected = (expected.0.min(expected.1), expected.1);
        let lo_ok = if lo_exact { got.0 == expected.0 } else { got.0 >= expected.0 };
        let ok = lo_ok && got.1 == expected.1;
        self.checks.push(StepCheck { iteration: n, step: step.into(), name: name.into(), expected, got, lo_exact, ok });
        if !ok && self.cfg.assert_intervals {
            return Err(Error::IntervalMismatch {
                iteration: n,
                step: step.into(),
                name: name.into(),
                expected: iv_text(expected),
                got: iv_text(got),
            });
        }
        Ok(())
    }

    fn evaluate(&mut self, x: &UltraVec) -> Result<UltraVec> {
        let mut ec = EvalCounter::default();
        let f = self.sys.evaluate(self.t, x, &mut ec)?;
        self.cur.eval.merge(&ec.ops);
        self.cur.eval_precs.push(x.abs_prec().unwrap_or(0));
        Ok(f)
    }

    fn begin(&mut self, st: &PrecisionState) {
        self.cur = IterationCost { n: st.n, v_n: st.v, ..Default::default() };
    }

    fn commit(&mut self) {
        let cur = std::mem::take(&mut self.cur);
        self.ledger.iterations.push(cur);
    }

    /// Admissibility checks, `B_0^{-1}`, `v_0` and the first `f`.
    /// `budget(v_0)` gives the precision `b` of the first state.
    fn start(
        &mut self,
        x0: &UltraVec,
        v0_hint: Option<Valuation>,
        budget: impl Fn(i64) -> Result<i64>,
    ) -> Result<PrecisionState> {
        if x0.len() != self.sys.m() {
            return Err(Error::DimensionMismatch { expected: self.sys.m(), got: x0.len() });
        }
        for (i, x) in x0.entries().iter().enumerate() {
            if x.valuation().lower_bound().is_some_and(|v| v < 0) {
                return Err(Error::Admissibility(format!("x0[{}] is not integral", i + 1)));
            }
            if x.abs_prec().is_some_and(|c| c < 1) {
                return Err(Error::Admissibility(format!("x0[{}] is not known modulo the uniformizer", i + 1)));
            }
        }
        let mut ec = EvalCounter::default();
        let j0 = self.sys.jacobian(self.t, &x0.change_prec(1), &mut ec)?;
        let binv_res = residue_inverse(&j0).map_err(|e| match e {
            Error::SingularResidue => Error::Admissibility("Jacobian at x0 is singular modulo the uniformizer".into()),
            other => other,
        })?;
        let target = self.cfg.target;

        // Find v_0, doubling the probe precision while f(x0) looks like zero.
        let mut prec = match v0_hint {
            Some(Valuation::Finite(v)) => v + 1,
            _ => 2,
        };
        let (v0, mut f) = loop {
            let f = self.sys.evaluate(self.t, &x0.change_prec(prec), &mut ec)?;
            match f.val() {
                Valuation::Finite(v) => break (v, f),
                _ if prec >= target => {
                    self.ledger.init.merge(&ec.ops);
                    let x = x0.change_prec(prec);
                    return Ok(PrecisionState {
                        n: 0,
                        v: prec,
                        v_prev: None,
                        binv: binv_res.change_prec(prec),
                        x,
                        f,
                        done: Some(Termination::ExactAtPrecision),
                    });
                }
                _ => prec *= 2,
            }
        };
        if v0 < 1 {
            self.ledger.init.merge(&ec.ops);
            return Err(Error::Admissibility(format!("f(x0) has valuation {v0}, x0 is not a residue root")));
        }
        if let Some(h) = v0_hint {
            if h != Valuation::Finite(v0) && self.cfg.assert_intervals {
                return Err(Error::OracleMismatch {
                    iteration: 0,
                    expected: h.lower_bound().unwrap_or(0),
                    observed: v0.to_string(),
                });
            }
        }
        let done = (v0 >= target).then_some(Termination::Converged);
        let b = if done.is_some() { v0 } else { budget(v0)? };
        let x = x0.change_prec(v0 + b);
        if f.abs_prec().is_some_and(|c| c < v0 + b) {
            f = self.sys.evaluate(self.t, &x, &mut ec)?;
        } else {
            f.change_prec_mut(v0 + b);
        }
        self.ledger.init.merge(&ec.ops);
        Ok(PrecisionState { n: 0, v: v0, v_prev: None, binv: binv_res.change_prec(v0), x, f, done })
    }

    /// Steps 6 to 14 once `v_{n+1}` is known. `binv0` is `B_n^{-1}` on
    /// `[0, v_n)` and `binv1` the same matrix on `[0, v_{n+1})`.
    #[allow(clippy::too_many_arguments)]
    fn update(
        &mut self,
        n: usize,
        v: i64,
        v1: i64,
        binv0: &UltraMat,
        binv1: &UltraMat,
        s: &UltraVec,
        f1: &UltraVec,
        info: &mut IterationInfo,
    ) -> Result<UltraMat> {
        let mut ops = OpCounter::new();
        let mut fbar = f1.change_prec(v + v1);
        self.check(n, "6", "fbar", vec_iv(&fbar), (v1, v + v1), true)?;
        let h = mat_vec(binv1, &fbar, &mut ops)?;
        self.check(n, "7", "h", vec_iv(&h), (v1, v + v1), true)?;
        let choice = choose_update_vector(s, &h.add(s)?)?;
        info.update_index = Some(choice.l);
        info.fallback = choice.fallback;
        let u = choice.u;
        self.check(n, "8", "u", vec_iv(&u), (-v, v1 - v), true)?;
        let r = vec_mat(&u, binv0, &mut ops)?;
        self.check(n, "9", "r", vec_iv(&r), (-v, 0), true)?;
        fbar.change_prec_mut(2 * v);
        self.check(n, "10", "fbar", vec_iv(&fbar), (v1, 2 * v), true)?;
        let ctx = *self.t.context();
        let den = UltraScalar::one(&ctx).add(&dot(&r, &fbar, &mut ops)?)?;
        self.check(n, "11", "den", scalar_iv(&den), (0, v), true)?;
        if den.is_zero_like() {
            return Err(Error::InvertibilityFailure { precision: v });
        }
        let num = rank_one(&h, &r, &mut ops)?;
        self.check(n, "12", "Num", mat_iv(&num), (v1 - v, v1), true)?;
        let nn = num.div_scalar(&den, &mut ops)?;
        self.check(n, "13", "N", mat_iv(&nn), (v1 - v, v1), true)?;
        let next = binv1.sub(&nn)?;
        self.check(n, "14", "Binv", mat_iv(&next), (0, v1), true)?;
        info.binv_unimodular = is_unimodular(&next);
        self.cur.linalg.merge(&ops);
        self.cur.updated = true;
        Ok(next)
    }

    fn step_s(&mut self, binv1: &UltraMat, f: &UltraVec) -> Result<UltraVec> {
        Ok(mat_vec(binv1, f, &mut self.cur.linalg)?.neg())
    }

    fn monotone(&self, st: &PrecisionState, v1: i64) -> Result<()> {
        if st.n >= 1 && v1 < st.v {
            return Err(Error::BasinViolation(format!(
                "val(f) dropped from {} to {v1} at iteration {}",
                st.v,
                st.n + 1
            )));
        }
        Ok(())
    }

    fn finished(&self, st: &PrecisionState, x1: UltraVec, f1: UltraVec, v1: i64, done: Termination) -> PrecisionState {
        PrecisionState { n: st.n + 1, v: v1, v_prev: Some(st.v), binv: st.binv.clone(), x: x1, f: f1, done: Some(done) }
    }
}

/// One iteration with `v_{n+1}` and `v_{n+2}` supplied by an oracle.
pub fn ideal_iteration(
    eng: &mut Engine<'_>,
    st: &PrecisionState,
    v1: i64,
    v2: i64,
) -> Result<(PrecisionState, IterationInfo)> {
    let n = st.n;
    let v = st.v;
    let mut info = IterationInfo { predicted_next: Some(v1), ..Default::default() };
    eng.begin(st);
    eng.cur.step_prec = v1;

    let binv1 = st.binv.change_prec(v1);
    eng.check(n, "1", "Binv", mat_iv(&binv1), (0, v1), true)?;
    let s = eng.step_s(&binv1, &st.f)?;
    eng.check(n, "2", "s", vec_iv(&s), (v, v + v1), true)?;
    info.val_step = Some(s.val());
    let mut x1 = st.x.add(&s)?;
    eng.check(n, "3", "x", vec_iv(&x1), (0, v + v1), false)?;
    x1.change_prec_mut(v1 + v2);
    eng.check(n, "4", "x", vec_iv(&x1), (0, v1 + v2), false)?;
    let f1 = eng.evaluate(&x1)?;

    let target = eng.cfg.target;
    let observed = f1.val();
    let v1_obs = match observed {
        Valuation::Finite(w) => w,
        other => other.lower_bound().unwrap_or(i64::MAX),
    };
    if observed.is_zero_like() || v1_obs >= target {
        if v1 < target && eng.cfg.assert_intervals {
            return Err(Error::OracleMismatch { iteration: n + 1, expected: v1, observed: observed.to_string() });
        }
        eng.cur.v_next = v1_obs.min(v1 + v2);
        eng.commit();
        let done = if observed.is_zero_like() { Termination::ExactAtPrecision } else { Termination::Converged };
        return Ok((eng.finished(st, x1, f1, v1_obs.min(v1 + v2), done), info));
    }
    if v1_obs != v1 && eng.cfg.assert_intervals {
        return Err(Error::OracleMismatch { iteration: n + 1, expected: v1, observed: observed.to_string() });
    }
    let v1 = v1_obs;
    eng.check(n, "5", "f", vec_iv(&f1), (v1, v1 + v2), true)?;
    info.gap = Some(0);
    eng.monotone(st, v1)?;
    eng.cur.v_next = v1;

    let binv = eng.update(n, v, v1, &st.binv, &binv1, &s, &f1, &mut info)?;
    eng.commit();
    Ok((PrecisionState { n: n + 1, v: v1, v_prev: Some(v), binv, x: x1, f: f1, done: None }, info))
}

/// One iteration that predicts `v_{n+1}` and `v_{n+2}` from `plan.alpha`,
/// then corrects the working precisions once `f_{n+1}` is known.
pub fn reality_iteration(
    eng: &mut Engine<'_>,
    st: &PrecisionState,
    plan: &PrecisionPlan,
) -> Result<(PrecisionState, PrecisionPlan, IterationInfo)> {
    let n = st.n;
    let v = st.v;
    let mut plan = plan.clone();
    let a1 = plan.predict(v, 1);
    let a2 = plan.predict(v, 2);
    let mut info = IterationInfo { alpha: plan.alpha, predicted_next: Some(a1), ..Default::default() };
    eng.begin(st);
    eng.cur.step_prec = a1;

    let mut binv1 = st.binv.change_prec(a1);
    eng.check(n, "1", "Binv", mat_iv(&binv1), (0, a1), true)?;
    let mut s = eng.step_s(&binv1, &st.f)?;
    eng.check(n, "2", "s", vec_iv(&s), (v, v + a1), true)?;
    info.val_step = Some(s.val());
    let mut x1 = st.x.add(&s)?;
    eng.check(n, "3", "x", vec_iv(&x1), (0, v + a1), false)?;
    x1.change_prec_mut(a1 + a2);
    eng.check(n, "4", "x", vec_iv(&x1), (0, a1 + a2), false)?;
    let mut f1 = eng.evaluate(&x1)?;
    let target = eng.cfg.target;

    // f_{n+1} vanishing at its precision: v_{n+1} exceeds even the budget
    // for v_{n+1} + v_{n+2}. Re-lift and re-evaluate at double precision.
    let mut prec = a1 + a2;
    while f1.is_zero_like() {
        plan.under_predictions += usize::from(info.retries == 0);
        info.under_predicted = true;
        if prec >= target {
            eng.cur.v_next = prec;
            eng.commit();
            return Ok((eng.finished(st, x1, f1, prec, Termination::Converged), plan, info));
        }
        if info.retries == plan.max_retries {
            eng.cur.v_next = prec;
            eng.commit();
            return Ok((eng.finished(st, x1, f1, prec, Termination::ExactAtPrecision), plan, info));
        }
        info.retries += 1;
        plan.raise_to(prec as f64 / v as f64);
        prec *= 2;
        x1.change_prec_mut(prec);
        f1 = eng.evaluate(&x1)?;
    }
    let v1 = f1.val().finite().expect("loop exits on a finite valuation");
    eng.check(n, "5", "f", vec_iv(&f1), (v1, prec), true)?;
    eng.cur.v_next = v1;
    if v1 > a1 {
        info.under_predicted = true;
        if info.retries == 0 {
            plan.under_predictions += 1;
        }
    }
    let gap = (a1 - v1).abs();
    info.gap = Some(gap);
    plan.gap_history.push(gap);
    if v1 >= target {
        eng.commit();
        return Ok((eng.finished(st, x1, f1, v1, Termination::Converged), plan, info));
    }
    eng.monotone(st, v1)?;

    binv1.change_prec_mut(v1);
    eng.check(n, "5.1", "Binv", mat_iv(&binv1), (0, v1), true)?;
    s.change_prec_mut(v + v1);
    eng.check(n, "5.2", "s", vec_iv(&s), (v, v + v1), true)?;
    plan = tune_alpha(&plan, v, v1);
    let b = plan.predict(v1, 1);
    // x_{n+1} took digits of s_n past v_n + v_{n+1}; drop them so the
    // iterate is the one ideal mode computes. f_{n+1} then has to be redone.
    let kept = x1.change_prec(v + v1).change_prec(v1 + b);
    let stale = kept != x1.change_prec(v1 + b);
    x1 = kept;
    eng.check(n, "5.4", "x", vec_iv(&x1), (0, v1 + b), false)?;
    if stale || f1.abs_prec().is_some_and(|c| c < v1 + b) {
        f1 = eng.evaluate(&x1)?;
    } else {
        f1.change_prec_mut(v1 + b);
    }
    eng.check(n, "5.5", "f", vec_iv(&f1), (v1, v1 + b), true)?;

    let binv = eng.update(n, v, v1, &st.binv, &binv1, &s, &f1, &mut info)?;
    eng.commit();
    Ok((PrecisionState { n: n + 1, v: v1, v_prev: Some(v), binv, x: x1, f: f1, done: None }, plan, info))
}

fn resolve(oracle: &[Valuation], k: usize) -> Option<i64> {
    oracle.get(k).and_then(|v| v.lower_bound())
}

/// Runs the engine from `x0` until `val(f_n) >= cfg.target`.
///
/// Ideal mode needs `oracle`, the valuations `v_0, v_1, ...` of a reference
/// run (see [`super::reference_oracle`]).
pub fn run_engine(
    sys: &PolySystem,
    t: &UltraScalar,
    x0: &UltraVec,
    cfg: &EngineConfig,
    plan: PrecisionPlan,
    oracle: Option<&[Valuation]>,
) -> Result<EngineRun> {
    let mut eng = Engine::new(sys, t, cfg.clone())?;
    let mut plan = plan;
    plan.m = sys.m();
    let oracle = match (cfg.mode, oracle) {
        (Mode::Ideal, None) => {
            return Err(Error::InvalidArgument("ideal mode needs an oracle of valuations".into()));
        }
        (_, o) => o.unwrap_or(&[]),
    };
    let target = cfg.target;
    let mut st = match cfg.mode {
        Mode::Ideal => {
            let v0 = *oracle.first().ok_or(Error::OracleExhausted(0))?;
            eng.start(x0, Some(v0), |_| resolve(oracle, 1).ok_or(Error::OracleExhausted(1)))?
        }
        Mode::Reality => {
            let p = plan.clone();
            eng.start(x0, None, move |v0| Ok(p.predict(v0, 1)))?
        }
    };

    let mut records = Vec::new();
    let mut cumulative = eng.ledger.init.clone();
    let record = |st: &PrecisionState, alpha: f64, cumulative: &OpCounter, eng: &Engine<'_>| EngineRecord {
        n: st.n,
        x: st.x.clone(),
        f: st.f.clone(),
        v: st.f.val(),
        f_interval: vec_iv(&st.f),
        alpha,
        predicted_next: None,
        gap: None,
        val_step: None,
        val_err: None,
        update_index: None,
        fallback: false,
        under_predicted: false,
        retries: 0,
        x_support_ok: st.v_prev.map(|vp| st.x.change_prec(vp + st.v).change_prec(st.x.abs_prec().unwrap_or(0)) == st.x),
        binv_unimodular: is_unimodular(&st.binv),
        mults: cumulative.mults + cumulative.divs,
        ledger_cost: cumulative.model_cost(eng.ledger.model),
    };
    records.push(record(&st, plan.alpha, &cumulative, &eng));

    while st.done.is_none() {
        if st.n >= cfg.max_iter {
            return Err(Error::NonConvergence { iterations: st.n, last: st.v.to_string() });
        }
        let alpha = plan.alpha;
        let (next, info) = match cfg.mode {
            Mode::Ideal => {
                let v1 = resolve(oracle, st.n + 1).ok_or(Error::OracleExhausted(st.n + 1))?;
                let v2 = match resolve(oracle, st.n + 2) {
                    Some(v2) => v2,
                    None if v1 >= target || oracle[st.n + 1].is_zero_like() => v1,
                    None => return Err(Error::OracleExhausted(st.n + 2)),
                };
                ideal_iteration(&mut eng, &st, v1, v2)?
            }
            Mode::Reality => {
                let (next, p, info) = reality_iteration(&mut eng, &st, &plan)?;
                plan = p;
                (next, info)
            }
        };
        let last = records.last_mut().expect("records start with x_0");
        last.alpha = alpha;
        last.predicted_next = info.predicted_next;
        last.gap = info.gap;
        last.val_step = info.val_step;
        last.update_index = info.update_index;
        last.fallback = info.fallback;
        last.under_predicted = info.under_predicted;
        last.retries = info.retries;
        let it = eng.ledger.iterations.last().expect("iteration committed");
        cumulative.merge(&it.linalg);
        cumulative.merge(&it.eval);
        st = next;
        let mut rec = record(&st, plan.alpha, &cumulative, &eng);
        if st.done.is_none() {
            rec.binv_unimodular = info.binv_unimodular;
        }
        if st.done.is_some() {
            // The final state reports the valuation reached, not f's own.
            rec.v = st.f.val();
        }
        records.push(rec);
    }

    Ok(EngineRun {
        mode: cfg.mode,
        root: st.x.clone(),
        records,
        ledger: eng.ledger,
        plan,
        checks: eng.checks,
        termination: st.done.expect("loop exits when done"),
        final_binv: st.binv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::reference_oracle;
    use crate::field::FieldContext;
    use crate::system::{builtin_family, Family};

    fn setup(f: Family, ctx: FieldContext) -> (PolySystem, UltraScalar, UltraVec) {
        let sys = builtin_family(f);
        let t = UltraScalar::uniformizer_pow(&ctx, 1);
        let x0 = UltraVec::from_ints(&ctx, f.start_residue());
        (sys, t, x0)
    }

    #[test]
    fn ideal_f1_reaches_target_with_every_interval() {
        let ctx = FieldContext::p_adic(17).unwrap();
        let (sys, t, x0) = setup(Family::F1, ctx);
        let oracle = reference_oracle(&sys, &t, &x0, 40).unwrap();
        let cfg = EngineConfig::new(Mode::Ideal, 40);
        let run = run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::new(2), Some(&oracle)).unwrap();
        assert_eq!(run.failed_checks().count(), 0);
        let vs: Vec<_> = run.valuations();
        assert_eq!(&vs[..vs.len() - 1], &oracle[..vs.len() - 1]);
        assert!(run.root.abs_prec().unwrap() >= 40);
        let f = sys.evaluate(&t, &run.root.change_prec(40), &mut EvalCounter::default()).unwrap();
        assert!(f.is_zero_like());
    }

    #[test]
    fn reality_f1_matches_ideal_valuations() {
        let ctx = FieldContext::p_adic(17).unwrap();
        let (sys, t, x0) = setup(Family::F1, ctx);
        let oracle = reference_oracle(&sys, &t, &x0, 40).unwrap();
        let ideal =
            run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Ideal, 40), PrecisionPlan::new(2), Some(&oracle))
                .unwrap();
        let real =
            run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Reality, 40), PrecisionPlan::new(2), None).unwrap();
        assert_eq!(real.failed_checks().count(), 0);
        let a = ideal.valuations();
        let b = real.valuations();
        assert_eq!(a[..a.len() - 1], b[..b.len() - 1]);
    }

    #[test]
    fn bad_alpha_and_missing_oracle() {
        let ctx = FieldContext::p_adic(17).unwrap();
        let (sys, t, x0) = setup(Family::F1, ctx);
        let cfg = EngineConfig::new(Mode::Ideal, 20);
        assert!(matches!(run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::new(2), None), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn inadmissible_start() {
        let ctx = FieldContext::p_adic(17).unwrap();
        let (sys, t, _) = setup(Family::F1, ctx);
        let cfg = EngineConfig::new(Mode::Reality, 20);
        let x0 = UltraVec::from_ints(&ctx, &[2, 3]);
        assert!(matches!(run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::new(2), None), Err(Error::Admissibility(_))));
    }
}
