use duos_core::bernstein::{bernstein_raw, ArithmeticMode, TargetFunction};
use duos_core::builder::{build_double_universal, ApproximationRequest, BuildConfig};
use duos_core::cesaro::{cesaro_mean, density, frequent_cesaro_report, IndexSet};
use duos_core::engine::{fit_window, Engine};
use duos_core::sequence::{diagonal_universal_sequence, hit_e_set, product_metric, ScheduleEntry, SequencePoint, SumConvention};
use duos_core::series::sup_norm;
use duos_core::{CompactGrid, FormalSeries, LambdaSequence, Polynomial, Window};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..max_len)
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-50i64..50, 1i64..20).prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_sum_differences_vanish_below(c in coeffs(40), m in 0usize..20, extra in 0usize..20) {
        let f = FormalSeries::from_coeffs(c);
        let n = m + extra;
        let d = f.partial_sum(n).sub(&f.partial_sum(m));
        prop_assert!(d.coeffs().iter().take(m + 1).all(|&v| v == 0.0));
    }

    #[test]
    fn sup_norm_of_union_is_max(c in coeffs(12), r in 1.1f64..3.0) {
        let p = Polynomial::from_coeffs(c);
        let k1 = CompactGrid::interval(-1.0, 1.0, 65).unwrap();
        let k2 = CompactGrid::circle(r, 64).unwrap();
        let u = sup_norm(&p, &k1.union(&k2)).unwrap().value;
        let m = sup_norm(&p, &k1).unwrap().value.max(sup_norm(&p, &k2).unwrap().value);
        prop_assert!((u - m).abs() <= 1e-12 * m.max(1.0));
    }

    #[test]
    fn sup_norm_grows_under_refinement(c in coeffs(12), n in 3usize..40) {
        let p = Polynomial::from_coeffs(c);
        let coarse = sup_norm(&p, &CompactGrid::interval(-1.0, 1.0, n).unwrap()).unwrap().value;
        let fine = sup_norm(&p, &CompactGrid::interval(-1.0, 1.0, 2 * n - 1).unwrap()).unwrap().value;
        prop_assert!(fine >= coarse - 1e-12 * coarse.max(1.0));
    }

    #[test]
    fn bernstein_contracts_and_reproduces_lines(m in 1usize..60, slope in -3.0f64..3.0, a in 0.2f64..4.0) {
        let line = TargetFunction::polynomial(vec![0.0, slope]);
        let p = bernstein_raw(&line, m, a, ArithmeticMode::Rational).unwrap();
        for i in 0..=32 {
            let x = a * i as f64 / 32.0;
            prop_assert!((p.eval_stable(x) - slope * x).abs() <= 1e-12);
        }
        let h = TargetFunction::from_fn("osc", |x: f64| (3.0 * x).sin());
        let q = bernstein_raw(&h, m, a, ArithmeticMode::Auto).unwrap();
        for i in 0..=32 {
            let x = a * i as f64 / 32.0;
            prop_assert!(q.eval_stable(x).abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn stable_and_monomial_paths_agree(m in 1usize..40, a in 0.5f64..2.0) {
        let h = TargetFunction::from_fn("exp-1", |x: f64| x.exp_m1());
        let p = bernstein_raw(&h, m, a, ArithmeticMode::Rational).unwrap();
        for i in 0..=16 {
            let x = a * i as f64 / 16.0;
            let (s, d) = (p.eval_stable(x), p.eval(x));
            prop_assert!((s - d).abs() <= 1e-6 * s.abs().max(1.0));
        }
    }

    #[test]
    fn window_fits_respect_structure(l in 1usize..8, extra in 0usize..60, c in -1.0f64..1.0) {
        let h = TargetFunction::from_fn("cx+x^2/2", move |x: f64| c * x + 0.5 * x * x);
        let w = Window::new(l, l + extra).unwrap();
        if let Ok(fit) = fit_window(&h, w, 1.0, 10.0, Engine::Minimax, &Default::default()) {
            prop_assert!(fit.poly.coeffs().iter().take(l).all(|&v| v == 0.0));
            prop_assert!(fit.poly.is_zero() || fit.poly.degree() <= w.m);
        }
    }

    #[test]
    fn cesaro_coefficients_match_direct_average(c in coeffs(60), n in 0usize..80, x in -1.0f64..1.0) {
        let f = FormalSeries::from_coeffs(c);
        let sigma = cesaro_mean(&f, n);
        let direct: f64 = (0..=n).map(|j| f.partial_sum(j).eval(x)).sum::<f64>() / (n + 1) as f64;
        prop_assert!((sigma.eval(x) - direct).abs() <= 1e-12 * (n as f64 + 1.0));
    }

    #[test]
    fn constants_are_cesaro_fixed_points(a0 in -5.0f64..5.0, n in 0usize..50) {
        let f = FormalSeries::from_coeffs(vec![a0]);
        let (sigma, s) = (cesaro_mean(&f, n), f.partial_sum(n));
        prop_assert_eq!(sigma.coeffs(), s.coeffs());
    }

    #[test]
    fn density_bounds_and_complements(bits in prop::collection::vec(any::<bool>(), 4..400)) {
        let horizon = bits.len() as u64;
        let set = IndexSet::from_predicate(horizon, |n| bits[(n - 1) as usize]);
        let comp = set.complement(horizon);
        let ladder: Vec<u64> = (1..=4).map(|i| (horizon * i / 4).max(i)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let d = density(&set, &ladder).unwrap();
        prop_assert!(0.0 <= d.lower_est && d.lower_est <= d.upper_est && d.upper_est <= 1.0);
        for &n in &ladder {
            prop_assert_eq!(set.count_upto(n) + comp.count_upto(n), n);
        }
    }

    #[test]
    fn separated_constant_targets_have_disjoint_success(c in coeffs(10), gap in 0.6f64..2.0) {
        let f = FormalSeries::from_coeffs(c);
        let k = CompactGrid::interval(-0.9, 0.9, 9).unwrap();
        let targets = [TargetFunction::constant(0.0), TargetFunction::constant(gap)];
        let r = frequent_cesaro_report(&f, &targets, &k, 0.25, &[50, 100, 200]).unwrap();
        prop_assert!(r.exclusion_holds && r.complement_identity);
    }

    #[test]
    fn metric_is_symmetric(u in coeffs(20), v in coeffs(20)) {
        let (u, v) = (SequencePoint::new(u), SequencePoint::new(v));
        prop_assert_eq!(product_metric(&u, &v, 30), product_metric(&v, &u, 30));
        prop_assert_eq!(product_metric(&u, &u, 30).low, 0.0);
    }

    #[test]
    fn hit_is_exact_and_local(b in prop::collection::vec(rational(), 0..12), r1 in rational(), r2 in rational(), k in 1i32..8) {
        let lambda = LambdaSequence::power(2);
        let eps = 2f64.powi(-k);
        let b = SequencePoint::new(b);
        let (a, hit) = hit_e_set(&b, &lambda, &r1, &r2, eps, 1, SumConvention::Corrected).unwrap();
        prop_assert_eq!(a.partial_sum(hit.n), r2);
        prop_assert_eq!(a.partial_sum(hit.lambda_n), r1);
        for j in 0..hit.n {
            prop_assert_eq!(a.term(j), b.term(j));
        }
        prop_assert!(hit.distance < eps);
    }

    #[test]
    fn later_stages_keep_witnesses(pairs in prop::collection::vec((rational(), rational()), 0..4)) {
        let schedule: Vec<ScheduleEntry> = pairs.into_iter().map(|(a, b)| ScheduleEntry::new(a, b)).collect();
        let seq = diagonal_universal_sequence::<BigRational>(&LambdaSequence::power(2), &schedule, 10, SumConvention::Corrected).unwrap();
        for (i, w) in seq.witnesses.iter().enumerate() {
            prop_assert_eq!(seq.point.partial_sum(w.n), w.r2.clone());
            prop_assert_eq!(seq.point.partial_sum(w.lambda_n), w.r1.clone());
            if i > 0 {
                prop_assert!(w.n > seq.witnesses[i - 1].lambda_n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn linear_lambda_blocks_odd_differences(c in 0.5f64..2.0, d in 2u64..=3) {
        let h1 = TargetFunction::zero();
        let h2 = TargetFunction::polynomial(vec![0.0, c]);
        let req = ApproximationRequest::new(h1, h2, 1.0, 0.01).unwrap();
        let cfg = BuildConfig { horizon: 300, ..Default::default() };
        let err = build_double_universal(&[req], LambdaSequence::linear(d), &cfg).unwrap_err();
        prop_assert_eq!(err.code(), "NO_FEASIBLE_WITNESS");
    }

    #[test]
    fn builder_log_is_consistent(c in 0.3f64..1.0) {
        let h2 = TargetFunction::polynomial(vec![0.0, c]);
        let h1 = TargetFunction::polynomial(vec![0.0, 0.0, c]);
        let req = ApproximationRequest::new(h1.clone(), h2.clone(), 1.0, 0.1).unwrap();
        let cfg = BuildConfig { horizon: 60, ..Default::default() };
        let out = build_double_universal(std::slice::from_ref(&req), LambdaSequence::power(2), &cfg).unwrap();
        let e = &out.log.entries[0];
        let (m1, m2) = out.remeasure(e, &req).unwrap();
        prop_assert!((m1 - e.err_at_mu).abs() < 1e-9 && (m2 - e.err_at_lambda_mu).abs() < 1e-9);
        prop_assert!(e.err_at_mu < 0.05 && e.block2_error < 0.05);
        prop_assert!(e.err_at_lambda_mu <= e.err_at_mu + e.block2_error + 1e-9);
        // S_mu is exactly the sum of the coefficients frozen through mu.
        let s_mu = out.series.partial_sum(e.mu);
        prop_assert!(out.series.coeffs().len() > e.lambda_mu);
        prop_assert!((s_mu.eval(0.5) - out.eval_partial(e.mu, 0.5).unwrap()).abs() < 1e-9);
    }
}
