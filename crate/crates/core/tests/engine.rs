mod common;

use common::{builtin, golden_ratio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ub_core::engine::{
    consistent_oracle, eq_i_prediction, reference_oracle, run_engine, EngineConfig, EngineRun, Mode, PrecisionPlan,
};
use ub_core::field::{FieldContext, FieldKind, UltraScalar, Valuation};
use ub_core::linalg::UltraVec;
use ub_core::solver::{newton_solve, Method, SolverConfig, Termination};
use ub_core::system::{parse_system, Family, PolySystem};
use ub_core::Error;

const KINDS: [FieldKind; 2] = [FieldKind::PAdic, FieldKind::PowerSeries];

fn reality(fam: Family, kind: FieldKind, n: i64) -> EngineRun {
    let (_, sys, t, x0) = builtin(fam, kind);
    let cfg = EngineConfig::new(Mode::Reality, n);
    run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::new(sys.m()), None).unwrap()
}

fn ideal(fam: Family, kind: FieldKind, n: i64) -> EngineRun {
    let (_, sys, t, x0) = builtin(fam, kind);
    let oracle = consistent_oracle(&sys, &t, &x0, n, reference_oracle(&sys, &t, &x0, n).unwrap()).unwrap();
    run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Ideal, n), PrecisionPlan::new(sys.m()), Some(&oracle)).unwrap()
}

#[test]
fn ideal_mode_meets_every_annotation() {
    for kind in KINDS {
        for fam in Family::ALL {
            let run = ideal(fam, kind, 64);
            assert!(run.failed_checks().next().is_none(), "{fam} {kind:?}");
            let updates = run.ledger.iterations.iter().filter(|i| i.updated).count();
            assert!(updates >= 8, "{fam} {kind:?}: {updates} iterations");
            // Every one of steps 1..14 was checked on every updating iteration.
            for n in 0..updates {
                let steps: Vec<&str> =
                    run.checks.iter().filter(|c| c.iteration == n).map(|c| c.step.as_str()).collect();
                assert_eq!(steps.len(), 14, "{fam} {kind:?} iteration {n}: {steps:?}");
            }
        }
    }
}

#[test]
fn reality_mode_reproduces_ideal_iterates() {
    for kind in KINDS {
        let a = ideal(Family::F1, kind, 128);
        let b = reality(Family::F1, kind, 128);
        assert_eq!(a.valuations(), b.valuations(), "{kind:?}");
        for (k, w) in a.records.windows(2).enumerate() {
            let known = w[0].v.lower_bound().unwrap() + w[1].v.lower_bound().unwrap();
            assert!(w[1].x.agrees_mod(&b.records[k + 1].x, known), "{kind:?} iterate {}", k + 1);
        }
    }
}

#[test]
fn reality_mode_keeps_the_structure() {
    for kind in KINDS {
        for fam in Family::ALL {
            let run = reality(fam, kind, 128);
            assert!(run.failed_checks().next().is_none(), "{fam} {kind:?}");
            let body = &run.records[..run.records.len() - 1];
            assert!(body.iter().all(|r| r.binv_unimodular), "{fam} {kind:?}");
            // The closing iterate is returned before the corrective steps.
            assert!(body.iter().all(|r| r.x_support_ok != Some(false)), "{fam} {kind:?}");
            // Gap history grows at most linearly.
            for (n, &g) in run.plan.gap_history.iter().enumerate() {
                assert!(g <= n as i64 + 1, "{fam} {kind:?}: gaps {:?}", run.plan.gap_history);
            }
            let v: Vec<i64> = run.valuations().iter().filter_map(|v| v.finite()).collect();
            assert!(v.windows(2).skip(1).all(|w| w[1] >= w[0]), "{fam} {kind:?}: {v:?}");
        }
    }
}

#[test]
fn engine_root_matches_newton() {
    for fam in Family::ALL {
        let (_, sys, t, x0) = builtin(fam, FieldKind::PAdic);
        let run = reality(fam, FieldKind::PAdic, 96);
        let newton = newton_solve(&sys, &t, &x0, &SolverConfig::new(Method::Newton, 96)).unwrap();
        assert!(run.root.agrees_mod(newton.root(), 96), "{fam}");
    }
}

#[test]
fn ledger_is_consistent_and_free_of_matrix_products() {
    for kind in KINDS {
        for fam in Family::ALL {
            let run = reality(fam, kind, 128);
            let l = &run.ledger;
            let model = l.model;
            assert_eq!(l.totals().mat_mat, 0);
            let sum: u128 = l.init.model_cost(model) + l.iterations.iter().map(|i| i.cost(model)).sum::<u128>();
            assert_eq!(sum, l.total_cost());
            assert_eq!(l.linalg_cost() + l.eval_cost(), l.total_cost());
            assert_eq!(run.records.last().unwrap().ledger_cost, l.total_cost());
            for it in &l.iterations {
                assert!(
                    it.linalg.model_cost(model) <= it.linalg_bound(model, l.m),
                    "{fam} {kind:?} iteration {}",
                    it.n
                );
                assert!(it.eval.model_cost(model) <= it.eval_bound(model, l.l), "{fam} {kind:?} iteration {}", it.n);
            }
        }
    }
}

#[test]
fn overshooting_alpha_costs_more() {
    let (_, sys, t, x0) = builtin(Family::F1, FieldKind::PAdic);
    let cfg = EngineConfig::new(Mode::Reality, 128);
    let tuned = run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::new(2), None).unwrap();
    let wide = run_engine(&sys, &t, &x0, &cfg, PrecisionPlan::with_alpha(2, 4.0).unwrap().fixed(), None).unwrap();
    assert_eq!(tuned.valuations(), wide.valuations());
    assert!(wide.ledger.total_cost() > 2 * tuned.ledger.total_cost());
    assert!(wide.plan.gap_history.last() > tuned.plan.gap_history.last());
}

#[test]
fn vanishing_residual_is_retried() {
    let c = FieldContext::p_adic(17).unwrap();
    let sys = parse_system("m = 1\nx1 - 24").unwrap();
    let x0 = UltraVec::from_ints(&c, &[7]);
    let plan = PrecisionPlan::with_alpha(1, 1.01).unwrap().fixed();
    let run = run_engine(&sys, &UltraScalar::zero(&c), &x0, &EngineConfig::new(Mode::Reality, 40), plan, None).unwrap();
    assert_eq!(run.termination, Termination::ExactAtPrecision);
    assert_eq!(run.records[0].retries, 2);
    assert!(run.records.last().unwrap().v.is_zero_like());
    assert_eq!(run.root.get(0).to_exact(), UltraScalar::from_int(&c, 24));
}

#[test]
fn under_prediction_is_recorded_and_recovered() {
    let c = FieldContext::p_adic(17).unwrap();
    let sys = parse_system(&format!("m = 1\nx1 - {}", 7 + 17i64.pow(3))).unwrap();
    let x0 = UltraVec::from_ints(&c, &[7]);
    let plan = PrecisionPlan::with_alpha(1, 1.01).unwrap().fixed();
    let run = run_engine(&sys, &UltraScalar::zero(&c), &x0, &EngineConfig::new(Mode::Reality, 40), plan, None).unwrap();
    assert!(run.plan.under_predictions >= 1);
    assert!(run.records.iter().any(|r| r.under_predicted));
    assert!(run.root.agrees_mod(&UltraVec::from_ints(&c, &[7 + 17i64.pow(3)]), 40));
}

#[test]
fn golden_ratio_growth_stays_under_the_closed_form() {
    let c = FieldContext::p_adic(7).unwrap();
    let sys = parse_system("m = 1\nx1^2 - 2").unwrap();
    let x0 = UltraVec::from_ints(&c, &[3]);
    for n in [50, 200] {
        let plan = PrecisionPlan::with_alpha(1, golden_ratio()).unwrap();
        let run =
            run_engine(&sys, &UltraScalar::zero(&c), &x0, &EngineConfig::new(Mode::Reality, n), plan, None).unwrap();
        let v: Vec<i64> = run.valuations().iter().filter_map(|v| v.finite()).collect();
        assert!(v.windows(3).all(|w| w[2] == w[1] + w[0]), "{v:?}");
        let bound = eq_i_prediction(run.ledger.model, 1, run.ledger.l, golden_ratio(), n);
        assert!((run.ledger.total_cost() as f64) <= bound, "N = {n}: {} > {bound}", run.ledger.total_cost());
    }
}

#[test]
fn linear_systems_converge_in_the_engine() {
    let c = FieldContext::p_adic(17).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (sys, x0) = PolySystem::random_linear(2, 17, &mut rng);
        let x0 = UltraVec::from_ints(&c, &x0);
        let run = run_engine(
            &sys,
            &UltraScalar::zero(&c),
            &x0,
            &EngineConfig::new(Mode::Reality, 60),
            PrecisionPlan::new(2),
            None,
        )
        .unwrap();
        assert!(run.valuations().last().unwrap().is_at_least(60));
    }
}

#[test]
#[ignore = "precision-truncated inverse updates do not terminate finitely"]
fn linear_systems_terminate_within_2m_engine_steps() {
    let c = FieldContext::p_adic(17).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (sys, x0) = PolySystem::random_linear(2, 17, &mut rng);
        let x0 = UltraVec::from_ints(&c, &x0);
        let run = run_engine(
            &sys,
            &UltraScalar::zero(&c),
            &x0,
            &EngineConfig::new(Mode::Reality, 60),
            PrecisionPlan::new(2),
            None,
        )
        .unwrap();
        assert!(run.records.len() - 1 <= 4, "{:?}", run.valuations());
    }
}

#[test]
fn invalid_configurations() {
    let (c, sys, t, x0) = builtin(Family::F1, FieldKind::PAdic);
    let e = run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Ideal, 32), PrecisionPlan::new(2), None).unwrap_err();
    assert!(matches!(e, Error::InvalidArgument(_)), "{e:?}");
    assert!(PrecisionPlan::with_alpha(2, 0.9).is_err());
    let bad = UltraVec::from_ints(&c, &[0, 0]);
    let e = run_engine(&sys, &t, &bad, &EngineConfig::new(Mode::Reality, 32), PrecisionPlan::new(2), None).unwrap_err();
    assert!(matches!(e, Error::Admissibility(_)), "{e:?}");

    // A wrong oracle is caught at the first disagreement.
    let wrong: Vec<Valuation> = (0..40).map(|k| Valuation::Finite(k + 1)).collect();
    let e = run_engine(&sys, &t, &x0, &EngineConfig::new(Mode::Ideal, 32), PrecisionPlan::new(2), Some(&wrong))
        .unwrap_err();
    assert!(matches!(e, Error::OracleMismatch { .. } | Error::IntervalMismatch { .. }), "{e:?}");
}

#[test]
fn csv_columns() {
    let run = reality(Family::F1, FieldKind::PAdic, 32);
    let csv = run.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,v_fn,val_step,val_err,mults,interval_lo,interval_hi,alpha,gap,ledger_mults");
    assert_eq!(lines.count(), run.records.len());
    let j = run.to_json(false);
    assert_eq!(j["records"].as_array().unwrap().len(), run.records.len());
}
