use num_complex::Complex64;
use serde::Serialize;

use super::inequalities::ARON_BEAUZAMY_C;
use crate::bernstein::TargetFunction;
use crate::error::{Error, Result};
use crate::minimax::{linear_minimax, Design, DEFAULT_POLYGON_ORDER};
use crate::series::basis::{chebyshev_eval, chebyshev_monomials};
use crate::series::CompactGrid;

/// Target attached to one of the two partial sums.
#[derive(Debug, Clone)]
pub enum GridTarget {
    /// Real function, usable on real grids only.
    Function(TargetFunction),
    Constant(Complex64),
}

impl GridTarget {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            GridTarget::Constant(c) => Ok(*c),
            GridTarget::Function(f) if z.im == 0.0 => Ok(f.eval(z.re).into()),
            GridTarget::Function(_) => Err(Error::InvalidArgument(
                "function targets need a real grid".into(),
            )),
        }
    }
}

/// Joint fit of `S_mu ~ g2` and `S_lambda ~ g1` over the free coefficients.
#[derive(Debug, Clone)]
pub struct MinimaxProblem {
    pub mu: usize,
    pub lambda_mu: usize,
    pub g1: GridTarget,
    pub g2: GridTarget,
    pub grid: CompactGrid,
    pub polygon_order: usize,
}

impl MinimaxProblem {
    pub fn new(mu: usize, lambda_mu: usize, g1: GridTarget, g2: GridTarget, grid: CompactGrid) -> Self {
        MinimaxProblem {
            mu,
            lambda_mu,
            g1,
            g2,
            grid,
            polygon_order: DEFAULT_POLYGON_ORDER,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleFit {
    pub mu: usize,
    pub lambda_mu: usize,
    /// LP optimum: a lower bound on the discrete minimax value.
    pub lp_value: f64,
    /// Objective re-measured from the basis coefficients.
    pub measured: f64,
    pub relaxation: f64,
    pub rank: usize,
    /// Monomial coefficients `a_0..=a_lambda` (`a_0 = 0` on real grids).
    pub coeffs: Vec<Complex64>,
}

/// Solves `min max(sup |S_mu - g2|, sup |S_lambda - g1|)` on the grid.
///
/// Real grids fix `a_0 = 0` and use the basis `x T_j(x / rho)` for the head
/// `a_1..a_mu` and `x^(mu+1) T_j(x / rho)` for the tail. Complex grids use
/// free complex `a_0..a_lambda` with columns `z^j` scaled by `max |z|^j`.
pub fn minimax_double_fit(prob: &MinimaxProblem) -> Result<DoubleFit> {
    let (mu, lam) = (prob.mu, prob.lambda_mu);
    if !(lam > mu && mu >= 1) {
        return Err(Error::InvalidArgument(format!(
            "need lambda_mu > mu >= 1, got mu = {mu}, lambda_mu = {lam}"
        )));
    }
    if prob.grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let rho = prob.grid.max_modulus();
    if prob.grid.is_real() {
        real_fit(prob, rho)
    } else {
        complex_fit(prob, rho)
    }
}

fn real_fit(prob: &MinimaxProblem, rho: f64) -> Result<DoubleFit> {
    let (mu, lam) = (prob.mu, prob.lambda_mu);
    let head = mu;
    let tail = lam - mu;
    let mut design = Design::new(head + tail, true);
    let row = |x: f64, with_tail: bool| -> Vec<f64> {
        let u = x / rho;
        let mut t = vec![0.0; head.max(tail)];
        chebyshev_values(u, &mut t);
        let lead = x.powi(mu as i32 + 1);
        (0..head)
            .map(|j| x * t[j])
            .chain((0..tail).map(|j| if with_tail { lead * t[j] } else { 0.0 }))
            .collect()
    };
    for z in prob.grid.iter() {
        let x = z.re;
        design.push_real(row(x, false), prob.g2.eval(z)?.re);
        design.push_real(row(x, true), prob.g1.eval(z)?.re);
    }
    let fit = linear_minimax(&design, prob.polygon_order)?;
    let c: Vec<f64> = fit.coeffs.iter().map(|z| z.re).collect();
    let mut coeffs = vec![Complex64::from(0.0); lam + 1];
    let cheb = chebyshev_monomials(head.max(tail));
    // x * sum c_j T_j(x / rho) and x^(mu+1) * sum c_j T_j(x / rho)
    for (j, &cj) in c[..head].iter().enumerate() {
        for (k, &tk) in cheb[j].iter().enumerate() {
            coeffs[k + 1] += cj * tk / rho.powi(k as i32);
        }
    }
    for (j, &cj) in c[head..].iter().enumerate() {
        for (k, &tk) in cheb[j].iter().enumerate() {
            coeffs[k + mu + 1] += cj * tk / rho.powi(k as i32);
        }
    }
    // sanity: the Chebyshev head evaluates like its monomial image
    debug_assert!({
        let x = 0.3 * rho;
        let h: f64 = x * chebyshev_eval(&c[..head], x / rho);
        let m: f64 = (1..=mu).map(|k| coeffs[k].re * x.powi(k as i32)).sum();
        (h - m).abs() <= 1e-6 * (1.0 + h.abs())
    });
    Ok(DoubleFit {
        mu,
        lambda_mu: lam,
        lp_value: fit.lp_value,
        measured: fit.measured,
        relaxation: fit.relaxation,
        rank: fit.rank,
        coeffs,
    })
}

fn chebyshev_values(u: f64, out: &mut [f64]) {
    for j in 0..out.len() {
        out[j] = match j {
            0 => 1.0,
            1 => u,
            _ => 2.0 * u * out[j - 1] - out[j - 2],
        };
    }
}

fn complex_fit(prob: &MinimaxProblem, rho: f64) -> Result<DoubleFit> {
    let (mu, lam) = (prob.mu, prob.lambda_mu);
    let n = lam + 1;
    let mut design = Design::new(n, false);
    for z in prob.grid.iter() {
        let u = z / rho;
        let mut powers = Vec::with_capacity(n);
        let mut p = Complex64::from(1.0);
        for _ in 0..n {
            powers.push(p);
            p *= u;
        }
        let head: Vec<Complex64> = powers
            .iter()
            .enumerate()
            .map(|(j, &v)| if j <= mu { v } else { Complex64::from(0.0) })
            .collect();
        design.push(head, prob.g2.eval(z)?);
        design.push(powers, prob.g1.eval(z)?);
    }
    let fit = linear_minimax(&design, prob.polygon_order)?;
    let coeffs = fit
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| c / rho.powi(j as i32))
        .collect();
    Ok(DoubleFit {
        mu,
        lambda_mu: lam,
        lp_value: fit.lp_value,
        measured: fit.measured,
        relaxation: fit.relaxation,
        rank: fit.rank,
        coeffs,
    })
}

/// Certificate that no polynomial supported on `l..=m` approximates `g`
/// within `tau` on `[-a, a]`.
///
/// Any such `P` has `sup |P| <= M = sup |g| + tau`. Aron-Beauzamy on the circle
/// of radius `a` and Cauchy give `|p_j| <= C^m M / a^j`, so on `|x| <= rho`
/// with `rho = a / (2 C^(m/l))` we get `|P| <= M 2^-l / (1 - q)`,
/// `q = 1/(2 C^(m/l))`. If `g` exceeds that plus `tau` there, the window fails.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowExclusion {
    pub rho: f64,
    pub inner_sup: f64,
    pub allowed: f64,
    pub excluded: bool,
}

pub fn window_exclusion(g: &TargetFunction, l: usize, m: usize, a: f64, tau: f64) -> Result<WindowExclusion> {
    if l == 0 || l > m {
        return Err(Error::InvalidArgument(format!("window needs 1 <= l <= m, got ({l}, {m})")));
    }
    let d = m as f64 / l as f64;
    let q = 0.5 / ARON_BEAUZAMY_C.powf(d);
    let rho = a * q;
    let n = 257;
    let sup_on = |r: f64| {
        (0..n)
            .map(|i| g.eval(-r + 2.0 * r * i as f64 / (n - 1) as f64).abs())
            .fold(0.0, f64::max)
    };
    // Grid maxima under-estimate sup |g| on [-a, a]; allow the sampling slack.
    let outer = sup_on(a) * 1.01 + tau;
    let allowed = outer * 0.5f64.powi(l as i32) / (1.0 - q) + tau;
    let inner_sup = sup_on(rho);
    Ok(WindowExclusion {
        rho,
        inner_sup,
        allowed,
        excluded: inner_sup > allowed,
    })
}
