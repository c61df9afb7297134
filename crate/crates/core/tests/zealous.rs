mod common;

use common::{oracle_div, oracle_mul, parts};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ub_core::field::{FieldContext, FieldKind, UltraScalar, Valuation};

fn ctx(series: bool, p: u64) -> FieldContext {
    let kind = if series { FieldKind::PowerSeries } else { FieldKind::PAdic };
    FieldContext::new(kind, p).unwrap()
}

prop_compose! {
    fn element(c: FieldContext)(lo in -3i64..6, width in 0i64..12, seed in any::<u64>()) -> UltraScalar {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        UltraScalar::random_element(&c, lo, lo + width, &mut rng).unwrap()
    }
}

fn pair(c: FieldContext) -> impl Strategy<Value = (UltraScalar, UltraScalar)> {
    (element(c), element(c))
}

fn backends() -> impl Strategy<Value = FieldContext> {
    (any::<bool>(), prop::sample::select(vec![2u64, 3, 5, 7, 17])).prop_map(|(s, p)| ctx(s, p))
}

proptest! {
    #[test]
    fn product_matches_oracle((x, y) in backends().prop_flat_map(pair)) {
        let got = x.mul(&y).unwrap();
        prop_assert_eq!(parts(&got), oracle_mul(&x, &y));
    }

    #[test]
    fn quotient_matches_oracle((x, y) in backends().prop_flat_map(pair)) {
        prop_assume!(!y.is_zero_like());
        let got = x.div(&y).unwrap();
        prop_assert_eq!(parts(&got), oracle_div(&x, &y));
    }

    #[test]
    fn quotient_by_apparent_zero_fails(x in element(ctx(false, 5)), hi in -2i64..8) {
        let z = UltraScalar::apparent_zero(x.context(), hi);
        prop_assert!(x.div(&z).is_err());
    }

    #[test]
    fn ultrametric_inequality((x, y) in backends().prop_flat_map(pair)) {
        let s = x.add(&y).unwrap();
        let (vx, vy) = (x.valuation(), y.valuation());
        let lb = s.valuation().lower_bound().unwrap();
        prop_assert!(lb >= vx.min(vy).lower_bound().unwrap());
        if let (Valuation::Finite(a), Valuation::Finite(b)) = (vx, vy) {
            if a != b {
                prop_assert_eq!(s.valuation(), Valuation::Finite(a.min(b)));
            }
        }
        prop_assert_eq!(s.abs_prec(), Some(x.abs_prec().unwrap().min(y.abs_prec().unwrap())));
    }

    #[test]
    fn change_prec_round_trip(x in backends().prop_flat_map(element), k in 0i64..10) {
        let hi = x.abs_prec().unwrap();
        prop_assert_eq!(x.change_prec(hi + k).change_prec(hi), x.clone());
        let mut y = x.clone();
        y.change_prec_mut(hi + k);
        prop_assert_eq!(y, x.change_prec(hi + k));
    }

    #[test]
    fn product_commutes_and_associates(
        c in backends(),
        lo in prop::array::uniform3(0i64..4),
        width in 1i64..10,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [x, y, z] = lo.map(|l| UltraScalar::random_element(&c, l, l + width, &mut rng).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        let left = x.mul(&y).unwrap().mul(&z).unwrap();
        let right = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(left.interval(), right.interval());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn agrees_with_exact_backend((x, y) in backends().prop_flat_map(pair)) {
        // Digits inside the claimed interval are those of the exact product
        // of the digit strings, whatever the unknown digits would be.
        let exact = x.to_exact().mul(&y.to_exact()).unwrap();
        let got = x.mul(&y).unwrap();
        let hi = got.abs_prec().unwrap();
        prop_assert_eq!(exact.change_prec(hi), got);
    }

    #[test]
    fn sample_unit_is_deterministic(c in backends(), prec in 1i64..20, seed in any::<u64>()) {
        let a = UltraScalar::sample_unit(&c, prec, seed).unwrap();
        prop_assert_eq!(a.clone(), UltraScalar::sample_unit(&c, prec, seed).unwrap());
        prop_assert_eq!(a.interval(), Some((0, prec)));
        prop_assert_eq!(a.valuation(), Valuation::Finite(0));
    }
}

#[test]
fn sample_unit_rejects_zero_precision() {
    assert!(UltraScalar::sample_unit(&ctx(false, 5), 0, 1).is_err());
}

#[test]
fn text_and_json_are_bit_exact() {
    let c = ctx(false, 7);
    let x = UltraScalar::from_digits(&c, 2, 5, &[3, 0, 6]).unwrap();
    assert_eq!(x.to_string(), "7^2 * (3 + 0*7 + 6*7^2) + O(7^5)");
    assert_eq!(UltraScalar::from_json(&c, &x.to_json()).unwrap(), x);
}
