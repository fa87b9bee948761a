use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use wavedense::boxcalc::Cuboid;
use wavedense::freqfn::{l2_distance, FreqFn, StepFn};
use wavedense::grammian::{grammian_p, indicator_grammian_counts, lem4_check, norm_gram_exact, normalize_u, unit_grammian_sq_exact};
use wavedense::rational::{frac, int, pow2};
use wavedense::Rat;

/// Random values on a subset of the quarter cells of `[-3, 3)`; dyadic
/// values keep every square exact.
fn step_1d() -> impl Strategy<Value = StepFn> {
    prop::collection::vec(prop::option::weighted(0.4, (-8i64..8, -8i64..8)), 24).prop_map(|cells| {
        let pieces = cells
            .into_iter()
            .enumerate()
            .filter_map(|(k, v)| {
                let (re, im) = v?;
                let lo = frac(k as i64 - 12, 4);
                let c = Cuboid::interval(lo.clone(), lo + frac(1, 4)).unwrap();
                Some((c, Complex64::new(re as f64 / 4.0, im as f64 / 8.0)))
            })
            .collect();
        StepFn::new(1, pieces).unwrap()
    })
}

fn step_2d() -> impl Strategy<Value = StepFn> {
    prop::collection::vec(prop::option::weighted(0.4, -8i64..8), 36).prop_map(|cells| {
        let pieces = cells
            .into_iter()
            .enumerate()
            .filter_map(|(k, v)| {
                let v = v?;
                let (x, y) = (frac(k as i64 % 6 - 3, 2), frac(k as i64 / 6 - 3, 2));
                let c = Cuboid::new(vec![x.clone(), y.clone()], vec![x + frac(1, 2), y + frac(1, 2)]).unwrap();
                Some((c, Complex64::new(v as f64 / 2.0, 0.0)))
            })
            .collect();
        StepFn::new(2, pieces).unwrap()
    })
}

fn dyadic() -> impl Strategy<Value = Rat> {
    (-3i32..4).prop_map(pow2)
}

/// `n_i` and `n_o` by walking every cell `[bs, b(s+1))` that can meet `I`.
fn brute_counts(lo: &Rat, hi: &Rat, b: &Rat) -> (BigInt, BigInt) {
    let first: BigInt = (lo / b).floor().to_integer() - 1;
    let last = (hi / b).ceil().to_integer() + 1;
    let (mut inner, mut edge) = (BigInt::from(0), BigInt::from(0));
    let mut s = first;
    while s <= last {
        let a = b * Rat::from_integer(s.clone());
        let c = &a + b;
        if *lo <= a && c <= *hi {
            inner += 1;
        } else if a < *hi && *lo < c {
            edge += 1;
        }
        s += 1;
    }
    (inner, edge)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn norm_identity_1d(g in step_1d(), b in dyadic()) {
        let (lhs, rhs) = norm_gram_exact(&g, &[b]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn norm_identity_2d(g in step_2d(), b1 in dyadic(), b2 in dyadic()) {
        let (lhs, rhs) = norm_gram_exact(&g, &[b1, b2]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_counts_match_brute_force(p in -40i64..40, len in 1i64..60, q in 1i64..12, bd in 1i64..9) {
        let lo = frac(p, q);
        let hi = &lo + frac(len, q);
        let b = frac(1, bd);
        let c = indicator_grammian_counts(&Cuboid::interval(lo.clone(), hi.clone()).unwrap(), std::slice::from_ref(&b)).unwrap();
        let (ni, no) = brute_counts(&lo, &hi, &b);
        prop_assert_eq!((&c.n_i, &c.n_o), (&ni, &no));
        let gap = (&hi - &lo) - &b * Rat::from_integer(ni);
        prop_assert!(gap >= int(0));
        prop_assert!(c.brackets(&(&hi - &lo)));
    }

    #[test]
    fn grammian_difference_is_dominated(g in step_1d(), h in step_1d(), b in dyadic()) {
        let (lhs, rhs) = lem4_check(&FreqFn::Step(g), &FreqFn::Step(h), &[b]).unwrap();
        prop_assert!(rhs <= lhs * (1.0 + 1e-12) + 1e-14, "{} > {}", rhs, lhs);
    }

    #[test]
    fn normalized_generator_has_unit_grammian(g in step_1d(), b in dyadic()) {
        prop_assume!(!g.pieces().is_empty());
        let exact = unit_grammian_sq_exact(&g, std::slice::from_ref(&b)).unwrap();
        prop_assert!(exact.iter().all(|s| *s == Rat::from_integer(1.into())));
        let g = FreqFn::Step(g);
        let u = normalize_u(&g, std::slice::from_ref(&b)).unwrap();
        let ub = grammian_p(&u, std::slice::from_ref(&b), 2.0).unwrap();
        prop_assert!(ub.sup_deviation_on_support(1.0) < 1e-13);
        let gb = grammian_p(&g, &[b], 2.0).unwrap();
        prop_assert_eq!(ub.support_measure(), gb.support_measure());
        // ‖g − u_g‖ = ‖g_b − χ_{E ∩ Q}‖
        let direct = l2_distance(&g, &u).unwrap();
        prop_assert!((direct - gb.l2_distance_to_support_indicator()).abs() < 1e-9);
    }

    #[test]
    fn grammian_norm_matches_in_floats_2d(g in step_2d(), b in dyadic()) {
        let f = FreqFn::Step(g);
        let gb = grammian_p(&f, &[b.clone(), b], 2.0).unwrap();
        let n = f.l2_norm();
        prop_assert!((gb.lp_norm(2.0) - n).abs() <= 1e-12 * n.max(1.0));
    }
}
