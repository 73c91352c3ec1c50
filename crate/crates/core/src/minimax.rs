//! Discrete linear minimax fits solved as linear programs.
//!
//! Given basis values `phi_j(z_r)` and targets `g_r`, finds coefficients
//! minimising `max_r |sum_j c_j phi_j(z_r) - g_r|`. Real problems use two
//! half-planes per point. Complex problems replace `|w| <= t` by the circumscribed
//! regular polygon `Re(e^{-i theta_k} w) <= t`, so the LP value is a lower bound
//! on the true discrete optimum and at least `cos(pi / order)` times it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, Dense};

pub const DEFAULT_POLYGON_ORDER: usize = 16;
/// Relative residual below which a basis column is treated as dependent.
const RANK_TOL: f64 = 1e-11;
const PERTURBATION: f64 = 1e-9;

/// Sampled linear approximation problem: one row of basis values per point.
#[derive(Debug, Clone)]
pub struct Design {
    pub columns: usize,
    pub rows: Vec<Vec<Complex64>>,
    pub targets: Vec<Complex64>,
    /// Values and coefficients are real; `|.|` is modelled exactly.
    pub real: bool,
}

impl Design {
    pub fn new(columns: usize, real: bool) -> Self {
        Design {
            columns,
            rows: Vec::new(),
            targets: Vec::new(),
            real,
        }
    }

    pub fn push(&mut self, row: Vec<Complex64>, target: Complex64) {
        debug_assert_eq!(row.len(), self.columns);
        self.rows.push(row);
        self.targets.push(target);
    }

    pub fn push_real(&mut self, row: Vec<f64>, target: f64) {
        self.push(row.into_iter().map(Complex64::from).collect(), target.into());
    }

    /// `max_r |row_r . c - g_r|`.
    pub fn measure(&self, coeffs: &[Complex64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.targets)
            .map(|(row, &g)| {
                let v: Complex64 = row.iter().zip(coeffs).map(|(a, c)| a * c).sum();
                (v - g).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearFit {
    /// Coefficients in the design's column basis.
    pub coeffs: Vec<Complex64>,
    /// Optimal LP value.
    pub lp_value: f64,
    /// Objective re-measured from `coeffs` in the original basis.
    pub measured: f64,
    /// `cos(pi / order)` for complex problems, 1 for real ones.
    pub relaxation: f64,
    /// Numerical rank of the sampled basis.
    pub rank: usize,
    pub lp_iterations: usize,
}

impl LinearFit {
    /// Certified lower bound on the discrete optimum.
    pub fn lower_bound(&self) -> f64 {
        self.lp_value
    }
}

/// Real variable-space rows: the real and imaginary parts of `row . c`.
struct Realified {
    vars: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn realify(d: &Design) -> Realified {
    if d.real {
        Realified {
            vars: d.columns,
            re: d.rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: Vec::new(),
        }
    } else {
        // variables (Re c, Im c)
        let re = d
            .rows
            .iter()
            .map(|r| r.iter().map(|z| z.re).chain(r.iter().map(|z| -z.im)).collect())
            .collect();
        let im = d
            .rows
            .iter()
            .map(|r| r.iter().map(|z| z.im).chain(r.iter().map(|z| z.re)).collect())
            .collect();
        Realified {
            vars: 2 * d.columns,
            re,
            im,
        }
    }
}

/// Modified Gram-Schmidt with reorthogonalisation on the stacked rows.
/// Returns `T` (vars x rank, column-major) with `M T` orthonormal.
fn orthonormalize(r: &Realified) -> Vec<Vec<f64>> {
    let stacked: Vec<&Vec<f64>> = r.re.iter().chain(r.im.iter()).collect();
    let len = stacked.len();
    let column = |j: usize| -> Vec<f64> { stacked.iter().map(|row| row[j]).collect() };
    let mut qs: Vec<Vec<f64>> = Vec::new();
    let mut ts: Vec<Vec<f64>> = Vec::new();
    for j in 0..r.vars {
        let mut v = column(j);
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut t = vec![0.0; r.vars];
        t[j] = 1.0;
        for _ in 0..2 {
            for (q, tq) in qs.iter().zip(&ts) {
                let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                for i in 0..len {
                    v[i] -= dot * q[i];
                }
                for (ti, tqi) in t.iter_mut().zip(tq) {
                    *ti -= dot * tqi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= RANK_TOL * norm0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        t.iter_mut().for_each(|x| *x /= norm);
        qs.push(v);
        ts.push(t);
    }
    ts
}

fn apply(t: &[Vec<f64>], row: &[f64]) -> Vec<f64> {
    t.iter().map(|tk| tk.iter().zip(row).map(|(a, b)| a * b).sum()).collect()
}

/// Solves the discrete minimax problem.
pub fn linear_minimax(design: &Design, polygon_order: usize) -> Result<LinearFit> {
    if design.rows.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !design.real && polygon_order < 3 {
        return Err(Error::InvalidArgument("polygon order must be at least 3".into()));
    }
    let real = realify(design);
    let t = orthonormalize(&real);
    let rank = t.len();
    let q_re: Vec<Vec<f64>> = real.re.iter().map(|r| apply(&t, r)).collect();
    let q_im: Vec<Vec<f64>> = real.im.iter().map(|r| apply(&t, r)).collect();

    // LP rows a^T c - t <= b, as (a, b).
    let mut lp_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, g) in design.targets.iter().enumerate() {
        if design.real {
            lp_rows.push((q_re[i].clone(), g.re));
            lp_rows.push((q_re[i].iter().map(|x| -x).collect(), -g.re));
        } else {
            for k in 0..polygon_order {
                let th = 2.0 * std::f64::consts::PI * k as f64 / polygon_order as f64;
                let (s, c) = th.sin_cos();
                let a = q_re[i].iter().zip(&q_im[i]).map(|(r, m)| c * r + s * m).collect();
                lp_rows.push((a, c * g.re + s * g.im));
            }
        }
    }

    // Dual: min b^T w, sum_r w_r a_r = 0, sum_r w_r = 1, w >= 0.
    let cols = lp_rows.len();
    let mut a = Dense::zeros(rank + 1, cols);
    let mut cost = Vec::with_capacity(cols);
    for (r, (row, b)) in lp_rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            a.set(k, r, v);
        }
        a.set(rank, r, 1.0);
        cost.push(*b);
    }
    // A tiny deterministic perturbation of the (highly degenerate) right-hand
    // side keeps the simplex from stalling.
    let mut rhs: Vec<f64> = (0..rank)
        .map(|k| PERTURBATION * (0.5 + ((k as f64 + 1.0) * 0.618_033_988_749_895).fract()))
        .collect();
    rhs.push(1.0);
    let sol = lp::solve(&a, &rhs, &cost)?;
    let cq = &sol.y[..rank];

    // Weak duality: for w >= 0 with sum 1, every feasible (c, t) has
    // t >= (G^T w) . c - h . w, so this is a lower bound up to the tiny
    // residual G^T w evaluated at our c.
    let total: f64 = sol.x.iter().map(|v| v.max(0.0)).sum();
    let mut residual = vec![0.0; rank];
    let mut hw = 0.0;
    for ((row, b), &wr) in lp_rows.iter().zip(&sol.x) {
        let wr = wr.max(0.0) / total;
        if wr > 0.0 {
            hw += wr * b;
            for (r, v) in residual.iter_mut().zip(row) {
                *r += wr * v;
            }
        }
    }
    let lp_value = residual.iter().zip(cq).map(|(r, c)| r * c).sum::<f64>() - hw;

    let mut x = vec![0.0; real.vars];
    for (tk, &ck) in t.iter().zip(cq) {
        for (xi, ti) in x.iter_mut().zip(tk) {
            *xi += ck * ti;
        }
    }
    let coeffs: Vec<Complex64> = if design.real {
        x.iter().map(|&v| v.into()).collect()
    } else {
        let n = design.columns;
        (0..n).map(|j| Complex64::new(x[j], x[n + j])).collect()
    };
    let measured = design.measure(&coeffs);
    Ok(LinearFit {
        coeffs,
        lp_value,
        measured,
        relaxation: if design.real {
            1.0
        } else {
            (std::f64::consts::PI / polygon_order as f64).cos()
        },
        rank,
        lp_iterations: sol.iterations,
    })
}
