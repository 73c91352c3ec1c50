use std::f64::consts::{E, PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::grid::{DEFAULT_ANGULAR_POINTS, DEFAULT_REAL_POINTS, SLACK};
use crate::series::{sup_abs_complex, sup_abs_real, Arc, CompactGrid, Polynomial};

/// Aron-Beauzamy constant for one real variable.
pub const ARON_BEAUZAMY_C: f64 = 1.0 + SQRT_2;

/// `C_delta = 4 pi e / delta`.
pub fn turan_constant(delta: f64) -> f64 {
    4.0 * PI * E / delta
}

#[derive(Debug, Clone, Serialize)]
pub struct TuranReport {
    pub n_nonzero: usize,
    pub c_delta: f64,
    pub arc_sup: f64,
    pub circle_sup: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `sup_{|z|=r} |Q| <= C_delta^n sup_{arc} |Q|` on sampled grids,
/// where `n` counts the nonzero coefficients.
pub fn turan_bound(q: &Polynomial, r: f64, delta: f64) -> Result<TuranReport> {
    turan_bound_with(q, r, delta, turan_constant(delta))
}

#[doc(hidden)]
pub fn turan_bound_with(q: &Polynomial, r: f64, delta: f64, c_delta: f64) -> Result<TuranReport> {
    let arc = Arc::new(r, delta)?;
    // odd count so the arc midpoint is sampled
    let arc_grid = CompactGrid::arc(&arc, DEFAULT_ANGULAR_POINTS + 1);
    let circle = CompactGrid::circle(r, DEFAULT_ANGULAR_POINTS)?;
    let f = |z: Complex64| q.eval_complex(z);
    let arc_sup = sup_abs_complex(&arc_grid, f)?.0;
    let circle_sup = sup_abs_complex(&circle, f)?.0;
    let n = q.sparsity();
    let bound = c_delta.powi(n as i32) * arc_sup;
    Ok(TuranReport {
        n_nonzero: n,
        c_delta,
        arc_sup,
        circle_sup,
        bound,
        holds: circle_sup <= bound * SLACK,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RealToComplexReport {
    pub degree: usize,
    pub constant: f64,
    pub circle_sup: f64,
    pub interval_sup: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `sup_{|z|=1} |P| <= C^deg sup_{[-1,1]} |P|` with `C = 1 + sqrt 2`.
pub fn real_to_complex_bound(p: &Polynomial) -> Result<RealToComplexReport> {
    real_to_complex_bound_with(p, ARON_BEAUZAMY_C)
}

#[doc(hidden)]
pub fn real_to_complex_bound_with(p: &Polynomial, c: f64) -> Result<RealToComplexReport> {
    let interval = CompactGrid::interval(-1.0, 1.0, DEFAULT_REAL_POINTS)?;
    let circle = CompactGrid::circle(1.0, DEFAULT_ANGULAR_POINTS)?;
    let interval_sup = sup_abs_real(&interval, |x| p.eval(x))?.0;
    let circle_sup = sup_abs_complex(&circle, |z| p.eval_complex(z))?.0;
    let bound = c.powi(p.degree() as i32) * interval_sup;
    Ok(RealToComplexReport {
        degree: p.degree(),
        constant: c,
        circle_sup,
        interval_sup,
        bound,
        holds: circle_sup <= bound * SLACK,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientBound {
    pub j: usize,
    pub coeff_abs: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyReport {
    pub r: f64,
    pub circle_sup: f64,
    pub bounds: Vec<CoefficientBound>,
    pub all_hold: bool,
}

/// Cauchy estimates `|a_j| <= M / r^j` with `M = sup_{|z|=r} |p|`.
pub fn cauchy_coefficient_bounds(p: &Polynomial, r: f64) -> Result<CauchyReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    // More samples than the degree make the sampled sup dominate every |a_j| r^j.
    let n = DEFAULT_ANGULAR_POINTS.max(2 * p.degree() + 2);
    let circle = CompactGrid::circle(r, n)?;
    let m = sup_abs_complex(&circle, |z| p.eval_complex(z))?.0;
    let bounds: Vec<CoefficientBound> = (0..=p.degree())
        .map(|j| {
            let bound = m / r.powi(j as i32);
            let coeff_abs = p.coeff(j).abs();
            CoefficientBound {
                j,
                coeff_abs,
                bound,
                holds: coeff_abs <= bound * SLACK,
            }
        })
        .collect();
    Ok(CauchyReport {
        r,
        circle_sup: m,
        all_hold: bounds.iter().all(|b| b.holds),
        bounds,
    })
}

/// Bound on `sup_K |sum_{j=mu+1}^{lambda} a_j z^j|` when every `|a_j|` obeys
/// `|a_j| <= s C_delta^{lambda+1} / R^j` (Turán on `a_0..a_lambda`, then Cauchy
/// on `|z| = R`), with `rho = sup_K |z|` and `s` the arc sup of `S_lambda`.
pub fn tail_sup_bound(s: f64, c_delta: f64, rho: f64, big_r: f64, mu: usize, lambda: usize) -> f64 {
    let ln_front = s.ln() + (lambda as f64 + 1.0) * c_delta.ln();
    let q = (rho / big_r).ln();
    (mu + 1..=lambda).map(|j| (ln_front + j as f64 * q).exp()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_turan() {
        let q = Polynomial::monomial(7, 1.0);
        let r = turan_bound(&q, 2.0, 1.0).unwrap();
        assert_eq!(r.n_nonzero, 1);
        assert!((r.arc_sup - 128.0).abs() < 1e-9 && (r.circle_sup - 128.0).abs() < 1e-9);
        assert!((r.bound - r.c_delta * 128.0).abs() < 1e-6);
        assert!(r.holds);
    }

    #[test]
    fn one_plus_z() {
        let q = Polynomial::from_coeffs(vec![1.0, 1.0]);
        let r = turan_bound(&q, 1.0, PI).unwrap();
        assert!((r.circle_sup - 2.0).abs() < 1e-12);
        assert!((r.arc_sup - 2.0).abs() < 1e-12);
        assert!((r.c_delta - 4.0 * E).abs() < 1e-12);
        assert!((r.bound - 16.0 * E * E * 2.0).abs() < 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn chebyshev_t4_at_i() {
        let t4 = Polynomial::from_coeffs(vec![1.0, 0.0, -8.0, 0.0, 8.0]);
        assert!((t4.eval_complex(Complex64::i()).norm() - 17.0).abs() < 1e-12);
        let r = real_to_complex_bound(&t4).unwrap();
        assert!((r.interval_sup - 1.0).abs() < 1e-12);
        assert!((r.circle_sup - 17.0).abs() < 1e-9);
        assert!((r.bound - ARON_BEAUZAMY_C.powi(4)).abs() < 1e-9);
        assert!(r.bound > 33.97 && r.bound < 33.98);
        assert!(r.holds);
    }

    #[test]
    fn identity_and_constant() {
        let r = real_to_complex_bound(&Polynomial::monomial(1, 1.0)).unwrap();
        assert!((r.circle_sup - 1.0).abs() < 1e-12 && (r.interval_sup - 1.0).abs() < 1e-12);
        let r = real_to_complex_bound(&Polynomial::from_coeffs(vec![-2.5])).unwrap();
        assert_eq!(r.bound, 2.5);
        assert_eq!(r.circle_sup, 2.5);
    }

    #[test]
    fn cauchy_examples() {
        let r = cauchy_coefficient_bounds(&Polynomial::monomial(5, 1.0), 2.0).unwrap();
        assert!((r.circle_sup - 32.0).abs() < 1e-9);
        assert!((r.bounds[5].bound - 1.0).abs() < 1e-12);
        assert!(r.all_hold);
        let r = cauchy_coefficient_bounds(&Polynomial::from_coeffs(vec![1.0, 1.0]), 1.0).unwrap();
        assert!((r.circle_sup - 2.0).abs() < 1e-12);
        assert!(r.all_hold && r.bounds.len() == 2);
    }

    #[test]
    fn tail_bound_halves_per_index() {
        // with R = 2 C^d rho and lambda = d mu every term is below s 2^-j / C
        let (c, rho, d) = (turan_constant(PI), 1.5, 2.0);
        let big_r = 2.0 * c.powf(d) * rho;
        for mu in 1..8 {
            let t = tail_sup_bound(0.25, c, rho, big_r, mu, 2 * mu);
            assert!(t <= 0.25 / c * 0.5f64.powi(mu as i32) * 1.000001);
        }
    }
}
