//! Window fits used by the builder: the Bernstein lemma pipeline, a minimax
//! LP on a weighted Jacobi basis, or the first of the two that succeeds.

use serde::{Deserialize, Serialize};

use crate::bernstein::{constrained_approx_symmetric, ApproxOptions, StageError, TargetFunction, Window};
use crate::error::{Error, Result};
use crate::minimax::{linear_minimax, Design, DEFAULT_POLYGON_ORDER};
use crate::series::{sup_abs_real, CompactGrid, Factored, JacobiForm, Polynomial};

/// Largest number of basis columns per parity in a minimax window fit.
pub const MINIMAX_COLUMNS: usize = 200;
/// Sample points of the minimax LP grid.
pub const MINIMAX_POINTS: usize = 512;
/// Bernstein attempts are skipped above this degree: the monomial
/// coefficients of such blocks overflow `f64` for the targets of interest.
pub const BERNSTEIN_MAX_DEGREE: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// The symmetric Bernstein lemma pipeline only.
    Bernstein,
    /// LP minimax fit only.
    Minimax,
    /// Bernstein first, minimax if that fails.
    #[default]
    Auto,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernstein" => Ok(Engine::Bernstein),
            "minimax" => Ok(Engine::Minimax),
            "auto" => Ok(Engine::Auto),
            other => Err(Error::InvalidArgument(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockFit {
    pub poly: Polynomial,
    pub window: Window,
    /// Verified `sup_[-a,a] |poly - target|`.
    pub error: f64,
    pub engine: Engine,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stage_errors: Vec<StageError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

/// Verification grid shared by all engines.
pub fn verify_sup<F: Fn(f64) -> f64>(a: f64, f: F) -> Result<f64> {
    let grid = CompactGrid::interval(-a, a, 2049)?;
    Ok(sup_abs_real(&grid, f)?.0)
}

/// Fits `target` on `[-a, a]` by a polynomial supported on `w`, with
/// verified error `< tol`.
pub fn fit_window(
    target: &TargetFunction,
    w: Window,
    a: f64,
    tol: f64,
    engine: Engine,
    opts: &ApproxOptions,
) -> Result<BlockFit> {
    if verify_sup(a, |x| target.eval(x))? == 0.0 {
        return Ok(BlockFit {
            poly: Polynomial::zero(),
            window: w,
            error: 0.0,
            engine,
            stage_errors: Vec::new(),
            eta: None,
        });
    }
    match engine {
        Engine::Bernstein => bernstein_fit(target, w, a, tol, opts),
        Engine::Minimax => minimax_fit(target, w, a, tol),
        Engine::Auto => {
            let first = if w.m <= BERNSTEIN_MAX_DEGREE {
                bernstein_fit(target, w, a, tol, opts)
            } else {
                Err(Error::DegreeCapExceeded {
                    degree: w.m,
                    cap: BERNSTEIN_MAX_DEGREE,
                })
            };
            match first {
                Ok(fit) => Ok(fit),
                Err(e) if is_capacity_error(&e) => minimax_fit(target, w, a, tol).map_err(|m| keep_better(e, m)),
                Err(e) => Err(e),
            }
        }
    }
}

fn is_capacity_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InfeasibleWindow { .. }
            | Error::ApproxNotReached { .. }
            | Error::CoefficientOverflow(_)
            | Error::DegreeCapExceeded { .. }
    )
}

/// Reports the minimax failure (it carries the achieved error) unless it is
/// not an approximation failure.
fn keep_better(bernstein: Error, minimax: Error) -> Error {
    match minimax {
        Error::ApproxNotReached { .. } => minimax,
        _ => bernstein,
    }
}

fn bernstein_fit(target: &TargetFunction, w: Window, a: f64, tol: f64, opts: &ApproxOptions) -> Result<BlockFit> {
    let r = constrained_approx_symmetric(target, w, a, tol, opts)?;
    Ok(BlockFit {
        poly: r.poly,
        window: w,
        error: r.total_error,
        engine: Engine::Bernstein,
        stage_errors: r.stage_errors,
        eta: Some(r.eta),
    })
}

/// Minimax fit of the even and odd parts of `target` separately, each on the
/// orthonormal basis [`JacobiForm`] of its parity inside the window, with at
/// most `MINIMAX_COLUMNS` columns per part.
pub fn minimax_fit(target: &TargetFunction, w: Window, a: f64, tol: f64) -> Result<BlockFit> {
    minimax_fit_with(target, w, a, tol, MINIMAX_COLUMNS, MINIMAX_POINTS)
}

/// [`minimax_fit`] with explicit per-part column cap and minimum grid size.
pub fn minimax_fit_with(
    target: &TargetFunction,
    w: Window,
    a: f64,
    tol: f64,
    max_columns: usize,
    points: usize,
) -> Result<BlockFit> {
    let mut parts = Vec::new();
    let mut degree = w.l;
    for parity in [0usize, 1] {
        let lo = if w.l % 2 == parity { w.l } else { w.l + 1 };
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        let part = |x: f64| 0.5 * (target.eval(x) + sign * target.eval(-x));
        if lo > w.m || verify_sup(a, part)? == 0.0 {
            continue;
        }
        let cols = ((w.m - lo) / 2 + 1).min(max_columns);
        let n = points.max(3 * cols);
        let mut design = Design::new(cols, true);
        for i in 0..n {
            let u = (std::f64::consts::PI * (i as f64 + 0.5) / (2 * n) as f64).cos();
            design.push_real(JacobiForm::basis_values(lo, u, cols), part(a * u));
        }
        let fit = linear_minimax(&design, DEFAULT_POLYGON_ORDER)?;
        degree = degree.max(lo + 2 * (cols - 1));
        parts.push(JacobiForm {
            shift: lo,
            scale: a,
            coeffs: fit.coeffs.iter().map(|z| z.re).collect(),
        });
    }
    let poly = jacobi_poly(parts)?;
    let error = verify_sup(a, |x| poly.eval_stable(x) - target.eval(x))?;
    if !(error < tol) {
        return Err(Error::ApproxNotReached {
            achieved: error,
            tolerance: tol,
            degree,
        });
    }
    Ok(BlockFit {
        poly,
        window: w,
        error,
        engine: Engine::Minimax,
        stage_errors: Vec::new(),
        eta: None,
    })
}

/// Sum of Jacobi forms with monomial coefficients and the factored form attached.
pub fn jacobi_poly(parts: Vec<JacobiForm>) -> Result<Polynomial> {
    let mut coeffs: Vec<f64> = Vec::new();
    for p in &parts {
        let c = p.monomial_coefficients();
        if coeffs.len() < c.len() {
            coeffs.resize(c.len(), 0.0);
        }
        for (k, v) in c.into_iter().enumerate() {
            coeffs[k] += v;
        }
    }
    if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::CoefficientOverflow(k));
    }
    let poly = Polynomial::from_coeffs(coeffs);
    Ok(match parts.len() {
        0 => poly,
        _ => poly.with_factored(Factored::Sum(parts.into_iter().map(Factored::Jacobi).collect())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimax_reproduces_exact_monomial() {
        let h = TargetFunction::polynomial(vec![0.0, 0.0, 0.0, 2.0]);
        let fit = minimax_fit(&h, Window::new(2, 6).unwrap(), 1.0, 1e-6).unwrap();
        assert!(fit.error < 1e-8);
        assert_eq!(fit.poly.coeff(0), 0.0);
        assert_eq!(fit.poly.coeff(1), 0.0);
        assert!((fit.poly.coeff(3) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn structural_zeros_below_window() {
        let fit = minimax_fit(&TargetFunction::identity(), Window::new(1, 30).unwrap(), 1.0, 0.1).unwrap();
        assert_eq!(fit.poly.valuation(), 1);
        let fit = fit_window(
            &TargetFunction::identity(),
            Window::new(3, 40).unwrap(),
            1.0,
            0.5,
            Engine::Minimax,
            &ApproxOptions::default(),
        )
        .unwrap();
        assert!(fit.poly.coeffs()[..3].iter().all(|&c| c == 0.0));
        assert!(fit.poly.degree() <= 40);
    }

    #[test]
    fn zero_target_gives_zero_block() {
        let fit = fit_window(
            &TargetFunction::zero(),
            Window::new(5, 9).unwrap(),
            1.0,
            0.1,
            Engine::Auto,
            &ApproxOptions::default(),
        )
        .unwrap();
        assert!(fit.poly.is_zero());
    }

    #[test]
    fn auto_falls_back_to_minimax() {
        let fit = fit_window(
            &TargetFunction::identity(),
            Window::new(2, 8).unwrap(),
            1.0,
            0.3,
            Engine::Auto,
            &ApproxOptions::default(),
        );
        match fit {
            Ok(f) => assert_eq!(f.engine, Engine::Minimax),
            Err(e) => assert_eq!(e.code(), "APPROX_NOT_REACHED"),
        }
    }
}
