//! Seeded randomized suites for the polynomial inequalities.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::inequalities::{
    cauchy_coefficient_bounds, real_to_complex_bound_with, turan_bound_with, turan_constant, ARON_BEAUZAMY_C,
};
use crate::error::Result;
use crate::series::Polynomial;

#[derive(Debug, Clone, Serialize)]
pub struct FuzzSummary {
    pub suite: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed `lhs / rhs`.
    pub worst_ratio: f64,
}

fn summary(suite: &'static str, seed: u64, ratios: &[(bool, f64)]) -> FuzzSummary {
    FuzzSummary {
        suite,
        seed,
        cases: ratios.len(),
        failures: ratios.iter().filter(|r| !r.0).count(),
        worst_ratio: ratios.iter().map(|r| r.1).fold(0.0, f64::max),
    }
}

/// Random polynomial with `k` nonzero terms of degree at most `max_degree`.
pub fn random_sparse(rng: &mut impl Rng, k: usize, max_degree: usize) -> Polynomial {
    let mut coeffs = vec![0.0; max_degree + 1];
    for e in sample(rng, max_degree + 1, k.min(max_degree + 1)) {
        let mut c = 0.0;
        while c == 0.0 {
            c = rng.gen_range(-1.0..1.0);
        }
        coeffs[e] = c;
    }
    Polynomial::from_coeffs(coeffs)
}

pub fn random_dense(rng: &mut impl Rng, max_degree: usize) -> Polynomial {
    let deg = rng.gen_range(0..=max_degree);
    Polynomial::from_coeffs((0..=deg).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

/// Turán's inequality on 3-sparse polynomials of degree <= 40,
/// `r in {0.5, 1, 2}`, `delta in {pi/4, pi}`.
pub fn turan_suite(seed: u64, cases: usize) -> Result<FuzzSummary> {
    turan_suite_with(seed, cases, 1.0)
}

/// `constant_scale` multiplies `C_delta`; values below 1 inject a fault.
#[doc(hidden)]
pub fn turan_suite_with(seed: u64, cases: usize, constant_scale: f64) -> Result<FuzzSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    for i in 0..cases {
        let q = random_sparse(&mut rng, 3, 40);
        let r = [0.5, 1.0, 2.0][i % 3];
        let delta = [PI / 4.0, PI][(i / 3) % 2];
        let rep = turan_bound_with(&q, r, delta, turan_constant(delta) * constant_scale)?;
        out.push((rep.holds, rep.circle_sup / rep.bound));
    }
    Ok(summary("turan", seed, &out))
}

/// Aron-Beauzamy (one variable) on dense real polynomials of degree <= 40.
pub fn aron_beauzamy_suite(seed: u64, cases: usize) -> Result<FuzzSummary> {
    aron_beauzamy_suite_with(seed, cases, ARON_BEAUZAMY_C)
}

#[doc(hidden)]
pub fn aron_beauzamy_suite_with(seed: u64, cases: usize, c: f64) -> Result<FuzzSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    for _ in 0..cases {
        let p = random_dense(&mut rng, 40);
        let rep = real_to_complex_bound_with(&p, c)?;
        out.push((rep.holds, rep.circle_sup / rep.bound));
    }
    Ok(summary("aron_beauzamy", seed, &out))
}

/// Cauchy estimates on random degree-10 polynomials, `r in {0.5, 1, 3}`.
pub fn cauchy_suite(seed: u64, cases: usize) -> Result<FuzzSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    for i in 0..cases {
        let p = Polynomial::from_coeffs((0..=10).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let r = [0.5, 1.0, 3.0][i % 3];
        let rep = cauchy_coefficient_bounds(&p, r)?;
        let worst = rep
            .bounds
            .iter()
            .map(|b| if b.bound > 0.0 { b.coeff_abs / b.bound } else { 0.0 })
            .fold(0.0, f64::max);
        out.push((rep.all_hold, worst));
    }
    Ok(summary("cauchy", seed, &out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert_eq!(turan_suite(1, 30).unwrap().failures, 0);
        assert_eq!(aron_beauzamy_suite(1, 30).unwrap().failures, 0);
        assert_eq!(cauchy_suite(1, 30).unwrap().failures, 0);
    }

    #[test]
    fn shrunken_constant_is_caught() {
        let s = aron_beauzamy_suite_with(2, 60, 1.0).unwrap();
        assert!(s.failures > 0);
    }
}
