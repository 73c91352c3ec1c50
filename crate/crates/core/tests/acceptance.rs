//! Acceptance criteria 1-8, one PASS/FAIL line each.
//!
//! Criteria 2 and 8 are known to fail (see the README); the harness asserts
//! that every other criterion passes and that those two still report FAIL,
//! so any change in either direction is noticed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use duos_core::bernstein::{ApproxOptions, ArithmeticMode, Builtin, TargetFunction, Window};
use duos_core::builder::{build_double_universal, ApproximationRequest, BuildConfig};
use duos_core::certificates::fuzz::{aron_beauzamy_suite, turan_suite};
use duos_core::certificates::{
    impossibility_margin_complex, impossibility_margin_real, minimax_double_fit, real_to_complex_bound, GridTarget,
    MinimaxProblem, ARON_BEAUZAMY_C,
};
use duos_core::cesaro::{cesaro_mean, density, IndexSet};
use duos_core::engine::{fit_window, Engine};
use duos_core::sequence::{diagonal_universal_sequence, witness_ulps, ScheduleEntry, SumConvention};
use duos_core::series::{CompactGrid, FormalSeries, LambdaSequence, Polynomial, Spacing};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [usize; 2] = [2, 8];
const EPS: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1() -> Outcome {
    let x = TargetFunction::identity();
    let opts = ApproxOptions {
        mode: ArithmeticMode::Float,
        ..Default::default()
    };
    let mut first = None;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=5usize {
        let w = Window::new(n, n * n * n).unwrap();
        let t = Instant::now();
        let r = fit_window(&x, w, 1.0, EPS, Engine::Auto, &opts);
        let dt = t.elapsed();
        match r {
            Ok(fit) => {
                first.get_or_insert(n);
                let zeros = fit.poly.coeffs().iter().take(n).all(|&c| c == 0.0);
                ok &= fit.error < EPS && zeros && dt < Duration::from_secs(30) && fit.poly.degree() <= w.m;
                parts.push(format!("n={n}: {:.4} ({:?}, {:.2?})", fit.error, fit.engine, dt));
            }
            Err(e) => {
                ok &= first.is_none();
                parts.push(format!("n={n}: {}", e.code()));
            }
        }
    }
    outcome(ok && first.is_some(), parts.join(", "))
}

fn c2() -> Outcome {
    let x = TargetFunction::identity();
    let z = TargetFunction::zero();
    let reqs = [
        ApproximationRequest::new(z.clone(), x.clone(), 1.0, EPS).unwrap(),
        ApproximationRequest::new(x, TargetFunction::builtin(Builtin::NegX), 1.0, EPS).unwrap(),
        ApproximationRequest::new(TargetFunction::builtin(Builtin::X2), z, 1.0, EPS).unwrap(),
    ];
    match build_double_universal(&reqs, LambdaSequence::power(2), &BuildConfig::default()) {
        Ok(out) => {
            let mut ok = out.log.entries.len() == 3;
            ok &= out.log.entries.windows(2).all(|w| w[1].mu > w[0].lambda_mu);
            for (e, r) in out.log.entries.iter().zip(&reqs) {
                ok &= e.err_at_mu < EPS && e.err_at_lambda_mu < EPS;
                let (a, b) = out.remeasure(e, r).unwrap();
                ok &= (a - e.err_at_mu).abs() < 1e-9 && (b - e.err_at_lambda_mu).abs() < 1e-9;
            }
            let w: Vec<(usize, usize)> = out.log.entries.iter().map(|e| (e.mu, e.lambda_mu)).collect();
            outcome(ok, format!("witnesses {w:?}"))
        }
        Err(e) => outcome(false, format!("{} ({e})", e.code())),
    }
}

const REAL_FLOOR: f64 = 1.0 / (6.0 * (1.0 + std::f64::consts::SQRT_2) * (1.0 + std::f64::consts::SQRT_2));

fn real_lp(mu: usize, lambda: usize) -> f64 {
    let grid = CompactGrid::interval_with(-1.0, 1.0, 512, Spacing::Chebyshev).unwrap();
    let prob = MinimaxProblem::new(
        mu,
        lambda,
        GridTarget::Function(TargetFunction::zero()),
        GridTarget::Function(TargetFunction::identity()),
        grid,
    );
    minimax_double_fit(&prob).unwrap().lp_value
}

fn c3() -> Outcome {
    let t = Instant::now();
    let margin = impossibility_margin_real(2.0).unwrap().margin;
    let mut ok = (margin - REAL_FLOOR).abs() < 1e-12;
    let mut worst = f64::INFINITY;
    for mu in 4..=12 {
        let v = real_lp(mu, 2 * mu);
        worst = worst.min(v);
        ok &= v >= REAL_FLOOR;
    }
    let wide = real_lp(4, 200);
    ok &= wide < REAL_FLOOR;
    ok &= t.elapsed() < Duration::from_secs(120);
    outcome(
        ok,
        format!("min LP over mu=4..12: {worst:.4} >= {REAL_FLOOR:.4}; lambda=200: {wide:.4}; {:.1?}", t.elapsed()),
    )
}

fn c4() -> Outcome {
    let k = CompactGrid::circle(1.5, 512).unwrap();
    let cert = impossibility_margin_complex(2.0, &k, PI).unwrap();
    let want_r = 2.0 * (4.0 * std::f64::consts::E).powi(2) * 1.5;
    let floor = cert.bound.margin * (PI / 16.0).cos();
    let mut ok = (cert.big_r - want_r).abs() < 1e-9 * want_r && (cert.bound.margin - 1.0 / 3.0).abs() < 1e-12;
    let mut worst = f64::INFINITY;
    for mu in 1..=6 {
        let prob = MinimaxProblem::new(
            mu,
            2 * mu,
            GridTarget::Constant(Complex64::new(0.0, 0.0)),
            GridTarget::Constant(Complex64::new(1.0, 0.0)),
            cert.augmented.clone(),
        );
        let v = minimax_double_fit(&prob).unwrap().lp_value;
        worst = worst.min(v);
        ok &= v >= floor;
    }
    outcome(ok, format!("min LP over mu=1..6: {worst:.4} >= {floor:.4}, R = {:.2}", cert.big_r))
}

fn c5() -> Outcome {
    let seed = 20240611;
    let t = turan_suite(seed, 1000).unwrap();
    let a = aron_beauzamy_suite(seed, 1000).unwrap();
    let t4 = Polynomial::from_coeffs(vec![1.0, 0.0, -8.0, 0.0, 8.0]);
    let at_i = t4.eval_complex(Complex64::new(0.0, 1.0)).norm();
    let rep = real_to_complex_bound(&t4).unwrap();
    let ok = t.failures == 0
        && a.failures == 0
        && t.cases == 1000
        && a.cases == 1000
        && (at_i - 17.0).abs() < 1e-12
        && at_i <= ARON_BEAUZAMY_C.powi(4)
        && rep.holds;
    outcome(
        ok,
        format!(
            "turan {}/{} fail (worst ratio {:.3}), aron-beauzamy {}/{} fail (worst {:.3}), |T4(i)| = {at_i} <= {:.2}",
            t.failures,
            t.cases,
            t.worst_ratio,
            a.failures,
            a.cases,
            a.worst_ratio,
            ARON_BEAUZAMY_C.powi(4)
        ),
    )
}

fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(0..=200usize);
        let f = FormalSeries::from_coeffs((0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let sigma = cesaro_mean(&f, n);
        // Direct average of the partial-sum coefficient vectors.
        let mut avg = vec![0.0; n + 1];
        for j in 0..=n {
            for (k, c) in f.partial_sum(j).coeffs().iter().enumerate() {
                avg[k] += c;
            }
        }
        for k in 0..=n {
            worst = worst.max((sigma.coeff(k) - avg[k] / (n + 1) as f64).abs());
        }
    }
    let evens = IndexSet::from_predicate(10_000, |n| n % 2 == 0);
    let squares = IndexSet::from_predicate(10_000, |n| {
        let r = (n as f64).sqrt().round() as u64;
        r * r == n
    });
    let de = density(&evens, &[10_000]).unwrap();
    let ds = density(&squares, &[10_000]).unwrap();
    let ok = worst <= 1e-12 && de.lower_est == 0.5 && ds.lower_est == 0.01;
    outcome(
        ok,
        format!("max coefficient gap {worst:.2e}; evens {}, squares {}", de.lower_est, ds.lower_est),
    )
}

fn c7() -> Outcome {
    let q = |p: i64, d: i64| BigRational::new(BigInt::from(p), BigInt::from(d));
    let lambda = LambdaSequence::power(2);
    let schedule = [ScheduleEntry::new(q(1, 1), q(2, 1)), ScheduleEntry::new(q(-1, 1), q(1, 2))];
    let exact = diagonal_universal_sequence::<BigRational>(&lambda, &schedule, 10, SumConvention::Corrected).unwrap();
    let float = diagonal_universal_sequence::<f64>(&lambda, &schedule, 10, SumConvention::Corrected).unwrap();
    let mut ok = exact.witnesses.len() == 2;
    for w in &exact.witnesses {
        ok &= exact.point.partial_sum(w.n) == w.r2 && exact.point.partial_sum(w.lambda_n) == w.r1;
        ok &= w.distance < w.epsilon;
    }
    let ulps = witness_ulps(&float);
    ok &= ulps <= 4.0 && float.witnesses.iter().all(|w| w.distance < w.epsilon);
    let pairs: Vec<(usize, usize)> = exact.witnesses.iter().map(|w| (w.n, w.lambda_n)).collect();
    outcome(ok, format!("witnesses {pairs:?}, float deviation {ulps} ulp"))
}

fn c8() -> Outcome {
    let x = TargetFunction::identity();
    let z = TargetFunction::zero();
    let requests = [
        ("(0,x)", z.clone(), x.clone()),
        ("(x,-x)", x, TargetFunction::builtin(Builtin::NegX)),
        ("(x^2,0)", TargetFunction::builtin(Builtin::X2), z.clone()),
        ("(0,sin)", z, TargetFunction::builtin(Builtin::Sin)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, h1, h2) in requests {
        let req = ApproximationRequest::new(h1, h2, 1.0, 0.01).unwrap();
        match build_double_universal(&[req], LambdaSequence::linear(2), &BuildConfig::default()) {
            Err(e) if e.code() == "NO_FEASIBLE_WITNESS" => parts.push(format!("{label}: NO_FEASIBLE_WITNESS")),
            Err(e) => {
                ok = false;
                parts.push(format!("{label}: {}", e.code()));
            }
            Ok(out) => {
                ok = false;
                let e = &out.log.entries[0];
                parts.push(format!("{label}: witness mu={} lambda={}", e.mu, e.lambda_mu));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 8] = [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8)];
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict} [{:.1?}] {}", t.elapsed(), o.detail);
        if o.pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected verdicts: {unexpected:?}");
}
