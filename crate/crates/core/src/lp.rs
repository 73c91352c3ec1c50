//! Dense two-phase primal simplex for `min c^T x, A x = b, x >= 0`.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-8;
/// Degenerate pivots in a row before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;
const REFACTOR_EVERY: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Simplex multipliers `y` with `A^T y <= c` at optimality.
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }
}

struct Tableau {
    m: usize,
    /// Structural columns followed by one artificial per row.
    width: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs for the current phase.
    d: Vec<f64>,
    z: f64,
    iterations: usize,
    cap: usize,
    /// `[sign * A | I]` and `sign * b`, kept for refactorisation.
    orig: Vec<f64>,
    orig_rhs: Vec<f64>,
    cost: Vec<f64>,
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.width..(i + 1) * self.width]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.t[r * w + q];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        self.rhs[r] /= p;
        let prow: Vec<f64> = self.row(r).to_vec();
        let prhs = self.rhs[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f != 0.0 {
                let row = &mut self.t[i * w..(i + 1) * w];
                for (v, &pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
                self.rhs[i] -= f * prhs;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, &pv) in self.d.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.d[q] = 0.0;
            self.z -= f * prhs;
        }
        self.basis[r] = q;
        self.iterations += 1;
    }

    /// Rebuilds the tableau as `B^-1 [A | I]` from the original data to
    /// shed accumulated rounding. Leaves it untouched if `B` is singular.
    fn refactor(&mut self) {
        let (m, w) = (self.m, self.width);
        // Gauss-Jordan on [B | I] with partial pivoting.
        let mut aug = vec![0.0; m * 2 * m];
        for i in 0..m {
            for (k, &col) in self.basis.iter().enumerate() {
                aug[i * 2 * m + k] = self.orig[i * w + col];
            }
            aug[i * 2 * m + m + i] = 1.0;
        }
        for k in 0..m {
            let p = (k..m)
                .max_by(|&a, &b| aug[a * 2 * m + k].abs().total_cmp(&aug[b * 2 * m + k].abs()))
                .unwrap();
            if aug[p * 2 * m + k].abs() < 1e-13 {
                return;
            }
            if p != k {
                for j in 0..2 * m {
                    aug.swap(p * 2 * m + j, k * 2 * m + j);
                }
            }
            let piv = aug[k * 2 * m + k];
            for j in 0..2 * m {
                aug[k * 2 * m + j] /= piv;
            }
            for i in 0..m {
                if i != k {
                    let f = aug[i * 2 * m + k];
                    if f != 0.0 {
                        for j in 0..2 * m {
                            aug[i * 2 * m + j] -= f * aug[k * 2 * m + j];
                        }
                    }
                }
            }
        }
        let mut t = vec![0.0; m * w];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            let row = &mut t[i * w..(i + 1) * w];
            for k in 0..m {
                let f = aug[i * 2 * m + m + k];
                if f != 0.0 {
                    for (v, &o) in row.iter_mut().zip(&self.orig[k * w..(k + 1) * w]) {
                        *v += f * o;
                    }
                    rhs[i] += f * self.orig_rhs[k];
                }
            }
        }
        // Basic columns are exact unit vectors.
        for (i, &col) in self.basis.iter().enumerate() {
            for r in 0..m {
                t[r * w + col] = if r == i { 1.0 } else { 0.0 };
            }
        }
        self.t = t;
        self.rhs = rhs;
        let cost = std::mem::take(&mut self.cost);
        self.set_costs(&cost);
    }

    /// Runs the simplex over columns `0..allowed`, refactorising periodically
    /// and once more before accepting optimality.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let mut checks = 0;
        loop {
            self.optimize_inner(allowed)?;
            self.refactor();
            checks += 1;
            let optimal = (0..allowed).all(|j| self.d[j] >= -PIVOT_TOL);
            if optimal || checks >= 4 {
                return Ok(());
            }
        }
    }

    fn optimize_inner(&mut self, allowed: usize) -> Result<()> {
        let mut streak = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if since_refactor >= REFACTOR_EVERY {
                self.refactor();
                since_refactor = 0;
            }
            if self.iterations >= self.cap {
                return Err(Error::LpCycling(self.iterations));
            }
            let bland = streak >= DEGENERATE_STREAK;
            let entering = if bland {
                (0..allowed).find(|&j| self.d[j] < -PIVOT_TOL)
            } else {
                (0..allowed)
                    .filter(|&j| self.d[j] < -PIVOT_TOL)
                    .min_by(|&a, &b| self.d[a].total_cmp(&self.d[b]))
            };
            let Some(q) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i * self.width + q];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    let better = match best {
                        None => true,
                        Some((bi, br, ba)) => {
                            if ratio < br - 1e-12 {
                                true
                            } else if ratio <= br + 1e-12 {
                                if bland {
                                    self.basis[i] < self.basis[bi]
                                } else {
                                    a > ba
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        best = Some((i, ratio, a));
                    }
                }
            }
            let Some((r, ratio, _)) = best else {
                return Err(Error::LpUnbounded);
            };
            streak = if ratio <= 1e-12 { streak + 1 } else { 0 };
            self.pivot(r, q);
            since_refactor += 1;
        }
    }

    fn set_costs(&mut self, cost: &[f64]) {
        self.cost = cost.to_vec();
        self.d = cost.to_vec();
        self.z = 0.0;
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let w = self.width;
                for (v, &a) in self.d.iter_mut().zip(&self.t[i * w..(i + 1) * w]) {
                    *v -= cb * a;
                }
                self.z -= cb * self.rhs[i];
            }
        }
    }
}

/// Solves `min c^T x` subject to `A x = b`, `x >= 0`.
pub fn solve(a: &Dense, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m || c.len() != n {
        return Err(Error::InvalidArgument("LP dimensions do not match".into()));
    }
    let width = n + m;
    let mut t = vec![0.0; m * width];
    let mut rhs = vec![0.0; m];
    let mut sign = vec![1.0; m];
    for i in 0..m {
        sign[i] = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = sign[i] * a.get(i, j);
        }
        t[i * width + n + i] = 1.0;
        rhs[i] = sign[i] * b[i];
    }
    let mut tab = Tableau {
        m,
        width,
        orig: t.clone(),
        orig_rhs: rhs.clone(),
        cost: Vec::new(),
        t,
        rhs,
        basis: (n..n + m).collect(),
        d: vec![],
        z: 0.0,
        iterations: 0,
        cap: 50 * (m + n) + 1000,
    };

    let mut phase1 = vec![0.0; width];
    phase1[n..].iter_mut().for_each(|v| *v = 1.0);
    tab.set_costs(&phase1);
    tab.optimize(width)?;
    if -tab.z > FEAS_TOL * (1.0 + b.iter().map(|v| v.abs()).sum::<f64>()) {
        return Err(Error::LpInfeasible);
    }
    // Drive zero-level artificials out where possible.
    for i in 0..m {
        if tab.basis[i] >= n {
            let row = tab.row(i);
            if let Some(q) = (0..n).max_by(|&p, &q| row[p].abs().total_cmp(&row[q].abs())) {
                if row[q].abs() > PIVOT_TOL {
                    tab.pivot(i, q);
                }
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.resize(width, 0.0);
    tab.set_costs(&phase2);
    tab.optimize(n)?;

    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs[i].max(0.0);
        }
    }
    // Artificial i has cost 0 and column e_i, so its reduced cost is -y_i.
    let y = (0..m).map(|i| -sign[i] * tab.d[n + i]).collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution {
        x,
        y,
        objective,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> Dense {
        let mut d = Dense::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                d.set(i, j, v);
            }
        }
        d
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let a = dense(&[
            &[1.0, 0.0, 1.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0, 1.0, 0.0],
            &[3.0, 2.0, 0.0, 0.0, 1.0],
        ]);
        let s = solve(&a, &[4.0, 12.0, 18.0], &[-3.0, -5.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        // strong duality: b^T y = c^T x
        let by: f64 = [4.0, 12.0, 18.0].iter().zip(&s.y).map(|(b, y)| b * y).sum();
        assert!((by - s.objective).abs() < 1e-9);
        assert!((s.y[1] + 1.5).abs() < 1e-9 && (s.y[2] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_and_duals() {
        // min x + y, -x - y = -2  ->  2, y_dual = -1
        let a = dense(&[&[-1.0, -1.0]]);
        let s = solve(&a, &[-2.0], &[1.0, 1.0]).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!((s.y[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = dense(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(solve(&a, &[1.0, 2.0], &[0.0, 0.0]), Err(Error::LpInfeasible)));
        let a = dense(&[&[1.0, -1.0]]);
        assert!(matches!(solve(&a, &[1.0], &[-1.0, 0.0]), Err(Error::LpUnbounded)));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example in equality form.
        let a = dense(&[
            &[0.25, -8.0, -1.0, 9.0, 1.0, 0.0, 0.0],
            &[0.5, -12.0, -0.5, 3.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ]);
        let c = [-0.75, 20.0, -0.5, 6.0, 0.0, 0.0, 0.0];
        let s = solve(&a, &[0.0, 0.0, 1.0], &c).unwrap();
        assert!((s.objective + 1.25).abs() < 1e-9);
    }
}
