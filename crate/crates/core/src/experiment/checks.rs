use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{execute, ExperimentSpec, SystemSource};
use crate::engine::{run_engine, EngineConfig, Mode, PrecisionPlan};
use crate::error::Result;
use crate::field::{FieldContext, FieldKind, UltraScalar};
use crate::linalg::UltraVec;
use crate::solver::{broyden_solve, estimate_orders, secant_solve, Method, SolverConfig, Termination};
use crate::system::{builtin_family, parse_system, Family, PolySystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<std::result::Result<String, String>>) -> CheckOutcome {
    match r {
        Ok(Ok(detail)) => CheckOutcome { name, ok: true, detail },
        Ok(Err(detail)) => CheckOutcome { name, ok: false, detail },
        Err(e) => CheckOutcome { name, ok: false, detail: format!("error: {e}") },
    }
}

type Verdict = Result<std::result::Result<String, String>>;

fn contexts() -> Result<[FieldContext; 2]> {
    Ok([FieldContext::p_adic(17)?, FieldContext::power_series(17)?])
}

fn random_operand(ctx: &FieldContext, rng: &mut ChaCha8Rng) -> Result<UltraScalar> {
    let lo = rng.gen_range(0..4);
    let hi = lo + rng.gen_range(1..10);
    UltraScalar::random_element(ctx, lo, hi, rng)
}

fn zealous_intervals(rng: &mut ChaCha8Rng) -> Verdict {
    let mut n = 0;
    for ctx in contexts()? {
        for _ in 0..200 {
            let x = random_operand(&ctx, rng)?;
            let y = random_operand(&ctx, rng)?;
            let (Some((a, b)), Some((c, d))) = (x.interval(), y.interval()) else { continue };
            let prod = x.mul(&y)?.interval();
            if a < b && c < d && prod != Some((a + c, (a + d).min(b + c))) {
                return Ok(Err(format!("{x} * {y} has interval {prod:?}")));
            }
            if c < d {
                let quo = x.div(&y)?.interval();
                let want = (a - c, (a + d - 2 * c).min(b - c));
                if a < b && quo != Some(want) {
                    return Ok(Err(format!("{x} / {y} has interval {quo:?}, expected {want:?}")));
                }
            }
            n += 1;
        }
    }
    Ok(Ok(format!("{n} pairs")))
}

fn ultrametric(rng: &mut ChaCha8Rng) -> Verdict {
    for ctx in contexts()? {
        for _ in 0..200 {
            let x = random_operand(&ctx, rng)?;
            let y = random_operand(&ctx, rng)?;
            let (Some(vx), Some(vy)) = (x.valuation().finite(), y.valuation().finite()) else { continue };
            let s = x.add(&y)?.valuation();
            let lb = s.lower_bound().unwrap_or(i64::MAX);
            if lb < vx.min(vy) || (vx != vy && s.finite() != Some(vx.min(vy))) {
                return Ok(Err(format!("val({x} + {y}) = {s}")));
            }
        }
    }
    Ok(Ok("400 sums".into()))
}

fn round_trip(rng: &mut ChaCha8Rng) -> Verdict {
    for ctx in contexts()? {
        for _ in 0..200 {
            let x = random_operand(&ctx, rng)?;
            let hi = x.abs_prec().unwrap_or(0);
            let k = rng.gen_range(0..8);
            if x.change_prec(hi + k).change_prec(hi) != x {
                return Ok(Err(format!("{x} lifted by {k} and truncated back differs")));
            }
        }
    }
    Ok(Ok("400 elements".into()))
}

fn golden_csv(seed: u64) -> Verdict {
    let mut spec = ExperimentSpec::new(SystemSource::Builtin(Family::F1));
    spec.target = 32;
    spec.seed = seed;
    let a = execute(&spec)?;
    let b = execute(&spec)?;
    for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
        if x.run.to_csv() != y.run.to_csv() {
            return Ok(Err(format!("{} CSV differs between identical runs", x.method)));
        }
    }
    if a.orders != b.orders || a.costs != b.costs {
        return Ok(Err("reports differ between identical runs".into()));
    }
    Ok(Ok("F1 over Q_17, N = 32".into()))
}

fn cross_method() -> Verdict {
    for fam in Family::ALL {
        let mut spec = ExperimentSpec::new(SystemSource::Builtin(fam));
        spec.target = 32;
        let r = execute(&spec)?;
        let (Some(b), Some(n)) = (r.outcome(Method::Broyden), r.outcome(Method::Newton)) else {
            return Ok(Err("missing method".into()));
        };
        if !b.run.root().agrees_mod(n.run.root(), spec.target) {
            return Ok(Err(format!("{fam}: Broyden and Newton roots differ below {}", spec.target)));
        }
    }
    Ok(Ok("F1, F2, F3 at N = 32".into()))
}

fn gay_termination(rng: &mut ChaCha8Rng) -> Verdict {
    let ctx = FieldContext::p_adic(17)?;
    let t = UltraScalar::zero(&ctx);
    for case in 0..12 {
        let m = 2 + case % 3;
        let (sys, x0) = PolySystem::random_linear(m, 17, rng);
        let cfg = SolverConfig::new(Method::Broyden, 60).with_working_prec(60);
        let tr = broyden_solve(&sys, &t, &UltraVec::from_ints(&ctx, &x0), &cfg)?;
        let iters = tr.records.len() - 1;
        if tr.termination != Termination::ExactAtPrecision || iters > 2 * m {
            return Ok(Err(format!("m = {m}: {iters} iterations, {:?}", tr.termination)));
        }
    }
    Ok(Ok("12 linear systems".into()))
}

fn engine_intervals() -> Verdict {
    for kind in [FieldKind::PAdic, FieldKind::PowerSeries] {
        let ctx = FieldContext::new(kind, 17)?;
        let sys = builtin_family(Family::F1);
        let t = UltraScalar::uniformizer_pow(&ctx, 1);
        let x0 = UltraVec::from_ints(&ctx, Family::F1.start_residue());
        let cfg = EngineConfig::new(Mode::Reality, 64);
        let run = run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::new(2), None)?;
        if let Some(c) = run.failed_checks().next() {
            return Ok(Err(format!("{c:?}")));
        }
        if run.ledger.totals().mat_mat != 0 {
            return Ok(Err("engine performed a matrix product".into()));
        }
    }
    Ok(Ok("F1, reality mode, N = 64".into()))
}

fn secant_ratio() -> Verdict {
    let ctx = FieldContext::p_adic(7)?;
    let sys = parse_system("m = 1\nx1^2 - 2")?;
    let cfg = SolverConfig::new(Method::Secant, 1597).with_working_prec(4000);
    let tr = secant_solve(
        &sys,
        &UltraScalar::zero(&ctx),
        &UltraScalar::from_int(&ctx, 3),
        &UltraScalar::from_int(&ctx, 10),
        &cfg,
    )?;
    let r = estimate_orders(&tr, 1)?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    if (r.q_tail - phi).abs() > 0.05 {
        return Ok(Err(format!("tail ratio {}", r.q_tail)));
    }
    Ok(Ok(format!("tail ratio {:.4}", r.q_tail)))
}

/// The invariant suite run by `ub check`.
pub fn check_invariants(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        outcome("zealous intervals", zealous_intervals(&mut rng)),
        outcome("ultrametric inequality", ultrametric(&mut rng)),
        outcome("change_prec round trip", round_trip(&mut rng)),
        outcome("Gay termination", gay_termination(&mut rng)),
    ];
    out.push(outcome("golden CSV", golden_csv(seed)));
    out.push(outcome("cross-method agreement", cross_method()));
    out.push(outcome("engine intervals", engine_intervals()));
    out.push(outcome("secant golden ratio", secant_ratio()));
    out
}
