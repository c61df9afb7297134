use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ub_core::cost::OpCounter;
use ub_core::field::{FieldContext, FieldKind, UltraScalar, Valuation};
use ub_core::linalg::{
    choose_update_vector, dot, is_unimodular, mat_vec, rank_one, residue_inverse, sherman_morrison_update, UltraMat,
    UltraVec,
};

fn random_vec(c: &FieldContext, m: usize, rng: &mut ChaCha8Rng) -> UltraVec {
    let entries = (0..m)
        .map(|_| {
            let lo = rng.gen_range(0..5);
            let hi = lo + rng.gen_range(1..8);
            UltraScalar::random_element(c, lo, hi, rng).unwrap()
        })
        .collect();
    UltraVec::new(entries).unwrap()
}

fn random_mat(c: &FieldContext, m: usize, rng: &mut ChaCha8Rng) -> UltraMat {
    UltraMat::from_rows((0..m).map(|_| random_vec(c, m, rng).entries().to_vec()).collect()).unwrap()
}

fn context(series: bool) -> FieldContext {
    let kind = if series { FieldKind::PowerSeries } else { FieldKind::PAdic };
    FieldContext::new(kind, 17).unwrap()
}

fn mat_mul(a: &UltraMat, b: &UltraMat) -> UltraMat {
    let mut ctr = OpCounter::new();
    let cols: Vec<UltraVec> = (0..b.cols()).map(|j| mat_vec(a, &b.column(j), &mut ctr).unwrap()).collect();
    UltraMat::from_rows((0..a.rows()).map(|i| cols.iter().map(|c| c.get(i).clone()).collect()).collect()).unwrap()
}

/// Integer matrix with determinant one and its integer inverse, built from
/// elementary row operations.
fn unimodular_pair(m: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut a: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect();
    let mut inv = a.clone();
    for _ in 0..if m > 1 { 3 * m } else { 0 } {
        let i = rng.gen_range(0..m);
        let j = (i + rng.gen_range(1..m)) % m;
        let k = rng.gen_range(-3..=3);
        // row_i += k row_j on a; col_j -= k col_i on the inverse.
        let row_j = a[j].clone();
        for (x, y) in a[i].iter_mut().zip(row_j) {
            *x += k * y;
        }
        for row in inv.iter_mut() {
            row[j] -= k * row[i];
        }
    }
    (a, inv)
}

proptest! {
    #[test]
    fn some_basis_vector_attains_the_norm(series in any::<bool>(), m in 1usize..5, seed in any::<u64>()) {
        let c = context(series);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mat(&c, m, &mut rng);
        prop_assume!(a.val().finite().is_some());
        let mut ctr = OpCounter::new();
        let best = (0..m)
            .map(|i| mat_vec(&a, &UltraVec::basis(&c, m, i + 1), &mut ctr).unwrap().val())
            .fold(Valuation::Infinite, Valuation::min);
        prop_assert_eq!(best, a.val());

        let x = random_vec(&c, m, &mut rng);
        if let (Some(va), Some(vx)) = (a.val().finite(), x.val().finite()) {
            let ax = mat_vec(&a, &x, &mut ctr).unwrap().val();
            prop_assert!(ax.lower_bound().unwrap() >= va + vx);
        }
    }

    #[test]
    fn rank_one_norm_is_multiplicative(series in any::<bool>(), m in 1usize..5, seed in any::<u64>()) {
        let c = context(series);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_vec(&c, m, &mut rng);
        let b = random_vec(&c, m, &mut rng);
        let (Some(va), Some(vb)) = (a.val().finite(), b.val().finite()) else { return Ok(()) };
        let mut ctr = OpCounter::new();
        let ab = rank_one(&a, &b, &mut ctr).unwrap();
        prop_assert_eq!(ab.val(), Valuation::Finite(va + vb));
        prop_assert_eq!(ctr.mat_mat, 0);
        prop_assert_eq!(ctr.mults as usize, m * m - count_exact_zero_pairs(&a, &b));
    }

    #[test]
    fn sherman_morrison_keeps_the_secant_equation(m in 2usize..5, seed in any::<u64>()) {
        let c = FieldContext::p_adic(17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b, binv) = unimodular_pair(m, &mut rng);
        let b = UltraMat::from_int_rows(&c, &b).unwrap();
        let binv = UltraMat::from_int_rows(&c, &binv).unwrap();
        let ints = |rng: &mut ChaCha8Rng| (0..m).map(|_| rng.gen_range(-40..=40)).collect::<Vec<i64>>();
        let f0 = UltraVec::from_ints(&c, &ints(&mut rng));
        let f1 = UltraVec::from_ints(&c, &ints(&mut rng));
        let mut ctr = OpCounter::new();
        let s = mat_vec(&binv, &f0, &mut ctr).unwrap().neg();
        prop_assume!(s.val().finite().is_some());
        let y = f1.sub(&f0).unwrap();
        let choice = choose_update_vector(&s, &UltraVec::from_ints(&c, &vec![1; m])).unwrap();
        prop_assert_eq!(dot(&choice.u, &s, &mut ctr).unwrap(), UltraScalar::one(&c));
        let Ok(next) = sherman_morrison_update(&binv, &f1, &choice.u, &y, &mut ctr) else { return Ok(()) };
        prop_assert_eq!(mat_vec(&next, &y, &mut ctr).unwrap(), s.clone());
        prop_assert_eq!(ctr.mat_mat, 0);

        // next is the inverse of B + (y - B s) u^t.
        let bs = mat_vec(&b, &s, &mut ctr).unwrap();
        let b1 = b.add(&rank_one(&y.sub(&bs).unwrap(), &choice.u, &mut ctr).unwrap()).unwrap();
        prop_assert_eq!(mat_mul(&b1, &next), UltraMat::identity(&c, m));
    }

    #[test]
    fn residue_inverse_is_a_residue_inverse(m in 1usize..5, seed in any::<u64>()) {
        let c = FieldContext::p_adic(17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, _) = unimodular_pair(m, &mut rng);
        let a = UltraMat::from_int_rows(&c, &a).unwrap();
        prop_assert!(is_unimodular(&a));
        let r = residue_inverse(&a).unwrap();
        let prod = mat_mul(&a, &r).change_prec(1);
        prop_assert_eq!(prod, UltraMat::identity(&c, m).change_prec(1));
    }
}

fn count_exact_zero_pairs(a: &UltraVec, b: &UltraVec) -> usize {
    let za = a.entries().iter().filter(|x| x.is_exact_zero()).count();
    let zb = b.entries().iter().filter(|x| x.is_exact_zero()).count();
    za * b.len() + zb * a.len() - za * zb
}
