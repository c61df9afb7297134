//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{builtin, golden_ratio, oracle_div, oracle_mul, parts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ub_core::cost::OpCounter;
use ub_core::engine::{consistent_oracle, run_engine, EngineConfig, EngineRun, Mode, PrecisionPlan};
use ub_core::field::{FieldContext, FieldKind, UltraScalar, Valuation};
use ub_core::linalg::{mat_vec, rank_one, UltraMat, UltraVec};
use ub_core::solver::{
    broyden_solve, estimate_orders, newton_solve, secant_solve, Method, SolverConfig, SolverTrace, Termination,
};
use ub_core::system::{parse_system, Family, PolySystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

const KINDS: [FieldKind; 2] = [FieldKind::PAdic, FieldKind::PowerSeries];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn finite(v: &[Valuation]) -> Vec<i64> {
    v.iter().filter_map(|x| x.finite()).collect()
}

fn broyden(fam: Family, kind: FieldKind) -> (PolySystem, UltraScalar, UltraVec, SolverTrace) {
    let (_, sys, t, x0) = builtin(fam, kind);
    let tr = broyden_solve(&sys, &t, &x0, &SolverConfig::new(Method::Broyden, 128)).unwrap();
    (sys, t, x0, tr)
}

fn scalar(c: &FieldContext, rng: &mut ChaCha8Rng) -> UltraScalar {
    let lo = rng.gen_range(-3..6);
    let hi = lo + rng.gen_range(1..12);
    UltraScalar::random_element(c, lo, hi, rng).unwrap()
}

fn zealous_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in KINDS {
        let c = FieldContext::new(kind, 17).unwrap();
        let mut divs = 0;
        for i in 0..1000 {
            let x = scalar(&c, &mut rng);
            let mut y = scalar(&c, &mut rng);
            while y.is_zero_like() {
                y = scalar(&c, &mut rng);
            }
            let got = x.mul(&y).map_err(|e| e.to_string())?;
            ensure(parts(&got) == oracle_mul(&x, &y), || format!("{kind:?} pair {i}: product {got} of {x} and {y}"))?;
            let got = x.div(&y).map_err(|e| e.to_string())?;
            ensure(parts(&got) == oracle_div(&x, &y), || format!("{kind:?} pair {i}: quotient {got} of {x} by {y}"))?;
            divs += 1;
        }
        ensure(divs == 1000, || format!("{kind:?}: {divs} quotients"))?;
    }
    Ok("1000 products and quotients per backend match the oracle".into())
}

fn random_vec(c: &FieldContext, m: usize, rng: &mut ChaCha8Rng) -> UltraVec {
    let entries = (0..m)
        .map(|_| {
            let lo = rng.gen_range(0..5);
            UltraScalar::random_element(c, lo, lo + rng.gen_range(1..8), rng).unwrap()
        })
        .collect();
    UltraVec::new(entries).unwrap()
}

fn norm_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ctr = OpCounter::new();
    let mut tested = 0;
    while tested < 500 {
        let kind = KINDS[tested % 2];
        let c = FieldContext::new(kind, 17).unwrap();
        let m = rng.gen_range(1..6);
        let a = UltraMat::from_rows((0..m).map(|_| random_vec(&c, m, &mut rng).entries().to_vec()).collect()).unwrap();
        let (u, w) = (random_vec(&c, m, &mut rng), random_vec(&c, m, &mut rng));
        let (Some(va), Some(vu), Some(vw)) = (a.val().finite(), u.val().finite(), w.val().finite()) else { continue };
        // Some basis vector attains the matrix norm.
        let best = (1..=m)
            .map(|i| mat_vec(&a, &UltraVec::basis(&c, m, i), &mut ctr).unwrap().val())
            .fold(Valuation::Infinite, Valuation::min);
        ensure(best == Valuation::Finite(va), || format!("case {tested}: best column {best}, norm {va}"))?;
        let uw = rank_one(&u, &w, &mut ctr).unwrap().val();
        ensure(uw == Valuation::Finite(vu + vw), || {
            format!("case {tested}: rank-one norm {uw}, expected {}", vu + vw)
        })?;
        tested += 1;
    }
    ensure(ctr.mat_mat == 0, || "matrix products counted".into())?;
    Ok("500 matrix and vector pairs".into())
}

fn gay_termination() -> Outcome {
    let c = FieldContext::p_adic(17).unwrap();
    let t = UltraScalar::zero(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let m = 2 + case % 3;
        let (sys, x0) = PolySystem::random_linear(m, 17, &mut rng);
        let cfg = SolverConfig::new(Method::Broyden, 60).with_working_prec(60);
        let tr =
            broyden_solve(&sys, &t, &UltraVec::from_ints(&c, &x0), &cfg).map_err(|e| format!("case {case}: {e}"))?;
        let steps = tr.records.len() - 1;
        let zero = tr.records.last().unwrap().f.entries().iter().all(|x| x.is_zero_like());
        ensure(tr.termination == Termination::ExactAtPrecision && zero && steps <= 2 * m, || {
            format!("case {case} (m = {m}): {steps} steps, {:?}", tr.termination)
        })?;
        worst = worst.max(steps as f64 / (2 * m) as f64);
    }
    Ok(format!("50/50 systems, at most {:.0}% of the 2m budget", 100.0 * worst))
}

fn secant_golden_ratio() -> Outcome {
    let c = FieldContext::p_adic(7).unwrap();
    let sys = parse_system("m = 1\nx1^2 - 2").unwrap();
    let cfg = SolverConfig::new(Method::Secant, 1597).with_working_prec(4000).with_max_iter(15);
    let tr =
        secant_solve(&sys, &UltraScalar::zero(&c), &UltraScalar::from_int(&c, 3), &UltraScalar::from_int(&c, 10), &cfg)
            .map_err(|e| e.to_string())?;
    let v = finite(&tr.valuations());
    ensure(v.len() == 16, || format!("{} valuations", v.len()))?;
    let q = &v.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect::<Vec<_>>()[v.len() - 1 - 8..];
    let phi = golden_ratio();
    ensure(q.iter().all(|r| (r - phi).abs() <= 0.05), || format!("tail ratios {q:?}"))?;
    let cs: Vec<i64> = v.windows(3).map(|w| w[1] + w[0] - w[2]).collect();
    let tail = &cs[cs.len() - 8..];
    ensure(tail.iter().all(|&x| x == tail[0]), || format!("v_n + v_(n-1) - v_(n+1) = {tail:?}"))?;
    let r = estimate_orders(&tr, 1).map_err(|e| e.to_string())?;
    Ok(format!("tail Q-ratio {:.4}, c = {}", r.q_tail, tail[0]))
}

fn broyden_orders(kind: FieldKind, with_r_order: bool) -> Outcome {
    let mut out = Vec::new();
    for fam in Family::ALL {
        let start = Instant::now();
        let (sys, _, _, tr) = broyden(fam, kind);
        let m = sys.m();
        let v = finite(&tr.valuations());
        ensure(v.windows(2).skip(1).all(|w| w[1] >= w[0]), || format!("{fam}: {v:?} decreases"))?;
        let r = estimate_orders(&tr, m).map_err(|e| e.to_string())?;
        let c = r.doubling_constant;
        ensure((0..v.len() - 2 * m).all(|w| v[w + 2 * m] >= 2 * v[w] - c), || format!("{fam}: doubling with C = {c}"))?;
        if with_r_order {
            let need = 2f64.powf(1.0 / (2 * m) as f64) - 0.02;
            ensure(r.r_order >= need, || format!("{fam}: R-order {:.3} < {need:.3}", r.r_order))?;
        }
        let took = start.elapsed();
        ensure(took < Duration::from_secs(60), || format!("{fam}: {took:?}"))?;
        out.push(format!("{fam} C={c} R={:.3}", r.r_order));
    }
    Ok(out.join(", "))
}

fn newton_baseline() -> Outcome {
    let mut out = Vec::new();
    for fam in Family::ALL {
        let (sys, t, x0, b) = broyden(fam, FieldKind::PAdic);
        let n = newton_solve(&sys, &t, &x0, &SolverConfig::new(Method::Newton, 128)).map_err(|e| e.to_string())?;
        let v = finite(&n.valuations());
        ensure(v.windows(2).skip(1).all(|w| w[1] >= 2 * w[0]), || format!("{fam}: {v:?}"))?;
        // Each root approximates x* modulo pi^val(f) at its last iterate.
        let certified = |t: &SolverTrace| t.valuations().last().and_then(|v| v.lower_bound()).unwrap();
        let shared = certified(&b).min(certified(&n));
        ensure(shared >= 128, || format!("{fam}: shared precision {shared}"))?;
        ensure(b.root().agrees_mod(n.root(), shared), || format!("{fam}: roots differ below {shared}"))?;
        out.push(format!("{fam} {} steps, {shared} digits", v.len() - 1));
    }
    Ok(out.join(", "))
}

fn engine_fidelity() -> Outcome {
    let (sys, t, x0, trace) = broyden(Family::F1, FieldKind::PAdic);
    let oracle = consistent_oracle(&sys, &t, &x0, 128, trace.valuations()).map_err(|e| e.to_string())?;
    let ideal = run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Ideal, 128), PrecisionPlan::new(2), Some(&oracle))
        .map_err(|e| e.to_string())?;
    ensure(ideal.failed_checks().next().is_none(), || format!("failed step {:?}", ideal.failed_checks().next()))?;
    let updates = ideal.ledger.iterations.iter().filter(|i| i.updated).count();
    ensure(updates >= 8, || format!("{updates} checked iterations"))?;
    for n in 0..updates {
        let steps = ideal.checks.iter().filter(|c| c.iteration == n).count();
        ensure(steps == 14, || format!("iteration {n}: {steps} steps checked"))?;
    }

    let cfg = EngineConfig::new(Mode::Reality, 128);
    let tuned = PrecisionPlan::with_alpha(2, SQRT_2).unwrap();
    let real = run_engine(&sys, &t, &x0, &cfg, tuned.clone(), None).map_err(|e| e.to_string())?;
    same_iterates(&ideal, &real)?;
    // Linear gap growth rests on the tuning of alpha; a frozen alpha only
    // has to reproduce the iterates.
    let g = &real.plan.gap_history;
    ensure(g.iter().enumerate().all(|(n, &x)| x <= n as i64 + 1), || format!("gaps {g:?}"))?;
    let frozen = run_engine(&sys, &t, &x0, &cfg, tuned.fixed(), None).map_err(|e| e.to_string())?;
    same_iterates(&ideal, &frozen)?;
    let gaps = g.iter().max().copied().unwrap_or(0);
    Ok(format!("{updates} iterations x 14 steps, largest gap {gaps}"))
}

fn same_iterates(ideal: &EngineRun, real: &EngineRun) -> Result<(), String> {
    ensure(ideal.valuations() == real.valuations(), || format!("{:?} vs {:?}", ideal.valuations(), real.valuations()))?;
    // x_n is known on [0, v_(n-1) + v_n); higher digits are zero padding.
    for (ra, rb) in ideal.records.iter().zip(&real.records) {
        ensure(ra.x_support_ok != Some(false), || format!("ideal iterate {} has digits past its support", ra.n))?;
        let known = match ideal.records.get(ra.n.wrapping_sub(1)) {
            Some(prev) => prev.v.lower_bound().unwrap() + ra.v.lower_bound().unwrap(),
            None => ra.x.abs_prec().unwrap().min(rb.x.abs_prec().unwrap()),
        };
        ensure(ra.x.agrees_mod(&rb.x, known), || format!("iterate {} differs below {known}", ra.n))?;
    }
    Ok(())
}

fn structural_cost() -> Outcome {
    let mut iterations = 0;
    for kind in KINDS {
        for fam in Family::ALL {
            let (sys, t, x0, tr) = broyden(fam, kind);
            ensure(tr.ops.mat_mat == 0, || format!("{fam} {kind:?}: Broyden used matrix products"))?;
            let run =
                run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Reality, 128), PrecisionPlan::new(sys.m()), None)
                    .map_err(|e| e.to_string())?;
            let l = &run.ledger;
            ensure(l.totals().mat_mat == 0, || format!("{fam} {kind:?}: engine used matrix products"))?;
            for it in &l.iterations {
                let (lin, lb) = (it.linalg.model_cost(l.model), it.linalg_bound(l.model, l.m));
                let (ev, eb) = (it.eval.model_cost(l.model), it.eval_bound(l.model, l.l));
                ensure(lin <= lb && ev <= eb, || {
                    format!("{fam} {kind:?} iteration {}: {lin} > {lb} or {ev} > {eb}", it.n)
                })?;
                iterations += 1;
            }
            let n = newton_solve(&sys, &t, &x0, &SolverConfig::new(Method::Newton, 128)).map_err(|e| e.to_string())?;
            ensure(n.ops.mat_mat > 0, || format!("{fam} {kind:?}: Newton shows no matrix products"))?;
        }
    }
    Ok(format!("{iterations} engine iterations within their bounds"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 zealous laws", 5, zealous_laws),
        ("2 norm identities", 5, norm_identities),
        ("3 2m-step termination", 10, gay_termination),
        ("4 secant golden ratio", 5, secant_golden_ratio),
        ("5 Broyden over Q_17", 180, || broyden_orders(FieldKind::PAdic, true)),
        ("6 Newton baseline", 30, newton_baseline),
        ("7 precision engine", 30, engine_fidelity),
        ("8 structural cost", 10, structural_cost),
        ("9 Broyden over F_17((t))", 180, || broyden_orders(FieldKind::PowerSeries, false)),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > Duration::from_secs(limit) => {
                Err(format!("{detail}; took {took:.2?}, limit {limit} s"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({took:.2?})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
