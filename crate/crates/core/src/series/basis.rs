//! Evaluation kernels for the factored forms carried by approximation blocks.

use serde::{Deserialize, Serialize};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `ln C(m, k)` for `k = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LnBinomial {
    table: Vec<f64>,
}

impl LnBinomial {
    pub fn new(m: usize) -> Self {
        let mut table = Vec::with_capacity(m + 1);
        let mut acc = CompensatedSum::default();
        table.push(0.0);
        for k in 1..=m {
            acc.add(((m - k + 1) as f64 / k as f64).ln());
            table.push(acc.value());
        }
        // symmetric entries computed from the shorter side
        for k in (m / 2 + 1)..=m {
            table[k] = table[m - k];
        }
        LnBinomial { table }
    }

    pub fn degree(&self) -> usize {
        self.table.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// Multiplies `C(m, k)` by `factor`. Only used for fault injection.
    #[doc(hidden)]
    pub fn corrupt(&mut self, k: usize, factor: f64) {
        self.table[k] += factor.ln();
    }
}

/// A degree-`m` polynomial in Bernstein form over `[lo, lo + width]`:
/// `sum_k w_k C(m,k) t^k (1-t)^(m-k)` with `t = (x - lo) / width`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinForm {
    pub lo: f64,
    pub width: f64,
    pub weights: Vec<f64>,
    binom: LnBinomial,
}

impl BernsteinForm {
    pub fn new(lo: f64, width: f64, weights: Vec<f64>) -> Self {
        assert!(!weights.is_empty(), "Bernstein form needs at least one weight");
        let binom = LnBinomial::new(weights.len() - 1);
        BernsteinForm {
            lo,
            width,
            weights,
            binom,
        }
    }

    #[doc(hidden)]
    pub fn with_binomials(mut self, binom: LnBinomial) -> Self {
        assert_eq!(binom.degree(), self.degree());
        self.binom = binom;
        self
    }

    pub fn degree(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.width;
        let m = self.degree();
        if m == 0 {
            return self.weights[0];
        }
        if t == 0.0 {
            return self.weights[0];
        }
        if t == 1.0 {
            return self.weights[m];
        }
        if t > 0.0 && t < 1.0 {
            self.eval_inside(t)
        } else {
            self.eval_outside(t)
        }
    }

    /// Convex combination of the weights; only terms within e^-40 of the
    /// dominant basis value are summed (the basis is log-concave in k).
    fn eval_inside(&self, t: f64) -> f64 {
        let m = self.degree();
        let (lt, ls) = (t.ln(), (1.0 - t).ln());
        let log_term = |k: usize| self.binom.get(k) + k as f64 * lt + (m - k) as f64 * ls;
        let mode = ((m as f64 + 1.0) * t).floor().min(m as f64) as usize;
        let peak = log_term(mode);
        let cutoff = peak - 40.0;
        let mut sum = CompensatedSum::default();
        sum.add(self.weights[mode] * peak.exp());
        let mut k = mode;
        while k > 0 {
            k -= 1;
            let l = log_term(k);
            if l < cutoff {
                break;
            }
            sum.add(self.weights[k] * l.exp());
        }
        let mut k = mode;
        while k < m {
            k += 1;
            let l = log_term(k);
            if l < cutoff {
                break;
            }
            sum.add(self.weights[k] * l.exp());
        }
        sum.value()
    }

    fn eval_outside(&self, t: f64) -> f64 {
        let m = self.degree();
        let (lt, ls) = (t.abs().ln(), (1.0 - t).abs().ln());
        let mut sum = CompensatedSum::default();
        for k in 0..=m {
            let w = self.weights[k];
            if w == 0.0 {
                continue;
            }
            let mag = (self.binom.get(k) + k as f64 * lt + (m - k) as f64 * ls).exp();
            let neg = (t < 0.0 && k % 2 == 1) || (t > 1.0 && (m - k) % 2 == 1);
            sum.add(if neg { -w * mag } else { w * mag });
        }
        sum.value()
    }
}

/// Clenshaw evaluation of `sum_j c_j T_j(u)`.
pub fn chebyshev_eval(coeffs: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => u * b1 - b2 + c0,
        None => 0.0,
    }
}

/// Monomial coefficients of `T_0..=T_n`, row `j` holding `T_j`.
pub fn chebyshev_monomials(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    rows.push(vec![1.0]);
    if n >= 1 {
        rows.push(vec![0.0, 1.0]);
    }
    for j in 2..=n {
        let mut next = vec![0.0; j + 1];
        for (k, &c) in rows[j - 1].iter().enumerate() {
            next[k + 1] += 2.0 * c;
        }
        for (k, &c) in rows[j - 2].iter().enumerate() {
            next[k] -= c;
        }
        rows.push(next);
    }
    rows
}

/// Structured evaluation path attached to a block polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Factored {
    Bernstein(BernsteinForm),
    /// `even(x^2) + x * odd(x^2)`.
    EvenOdd {
        even: Box<Factored>,
        odd: Box<Factored>,
    },
    /// `x^shift * sum_j c_j T_j(x / scale)`.
    ShiftedChebyshev {
        shift: usize,
        scale: f64,
        coeffs: Vec<f64>,
    },
    /// `x^power * inner(x)`.
    Times { power: usize, inner: Box<Factored> },
    Jacobi(JacobiForm),
    Sum(Vec<Factored>),
    Zero,
}

impl Factored {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Factored::Bernstein(b) => b.eval(x),
            Factored::EvenOdd { even, odd } => {
                let s = x * x;
                even.eval(s) + x * odd.eval(s)
            }
            Factored::ShiftedChebyshev {
                shift,
                scale,
                coeffs,
            } => x.powi(*shift as i32) * chebyshev_eval(coeffs, x / scale),
            Factored::Times { power, inner } => x.powi(*power as i32) * inner.eval(x),
            Factored::Jacobi(j) => j.eval(x),
            Factored::Sum(parts) => {
                let mut acc = CompensatedSum::default();
                for p in parts {
                    acc.add(p.eval(x));
                }
                acc.value()
            }
            Factored::Zero => 0.0,
        }
    }

    pub fn kind(&self) -> FactoredKind {
        match self {
            Factored::Bernstein(_) => FactoredKind::Bernstein,
            Factored::EvenOdd { .. } => FactoredKind::EvenOdd,
            Factored::ShiftedChebyshev { .. } => FactoredKind::ShiftedChebyshev,
            Factored::Times { .. } => FactoredKind::Times,
            Factored::Jacobi(_) => FactoredKind::Jacobi,
            Factored::Sum(_) => FactoredKind::Sum,
            Factored::Zero => FactoredKind::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactoredKind {
    Bernstein,
    EvenOdd,
    ShiftedChebyshev,
    Times,
    Jacobi,
    Sum,
    Zero,
}

/// `sum_j c_j phi_j(x / scale)` with `phi_j(u) = u^shift P_j(2u^2 - 1) sqrt(2j + beta + 1)`,
/// `P_j` the Jacobi polynomial with parameters `(0, beta)`, `beta = shift - 1/2`.
///
/// The `phi_j` are orthogonal on `[0, 1]` and share the parity of `shift`, so
/// every member has monomial support `shift, shift + 2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiForm {
    pub shift: usize,
    pub scale: f64,
    pub coeffs: Vec<f64>,
}

const RESCALE: f64 = 1e100;

impl JacobiForm {
    pub fn beta(&self) -> f64 {
        self.shift as f64 - 0.5
    }

    /// Values `phi_0(u), ..., phi_{n-1}(u)`.
    pub fn basis_values(shift: usize, u: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        jacobi_walk(shift, u, n, |_, v| out.push(v));
        out
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = CompensatedSum::default();
        jacobi_walk(self.shift, x / self.scale, self.coeffs.len(), |j, v| acc.add(self.coeffs[j] * v));
        acc.value()
    }

    /// Monomial coefficients in `x` (length `shift + 2 * len - 1`).
    pub fn monomial_coefficients(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        if n == 0 {
            return Vec::new();
        }
        let beta = self.beta();
        // Polynomials P_j(2s - 1) in s.
        let mut total = vec![0.0; n];
        let mut prev: Vec<f64> = Vec::new();
        let mut cur = vec![1.0];
        for j in 0..n {
            if j > 0 {
                let next = jacobi_step_poly(j, beta, &cur, &prev);
                prev = std::mem::replace(&mut cur, next);
            }
            let w = self.coeffs[j] * (2.0 * j as f64 + beta + 1.0).sqrt();
            for (i, &c) in cur.iter().enumerate() {
                total[i] += w * c;
            }
        }
        let mut out = vec![0.0; self.shift + 2 * n - 1];
        for (i, &c) in total.iter().enumerate() {
            let k = self.shift + 2 * i;
            out[k] = c / self.scale.powi(k as i32);
        }
        out
    }
}

/// Recurrence coefficients `(p, q, r)` with `P_n = (p t + q) P_{n-1} - r P_{n-2}`.
fn jacobi_coefficients(n: usize, beta: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let k = 2.0 * nf + beta;
    let a = 2.0 * nf * (nf + beta) * (k - 2.0);
    let p = (k - 1.0) * k * (k - 2.0) / a;
    let q = -(k - 1.0) * beta * beta / a;
    let r = 2.0 * (nf - 1.0) * (nf - 1.0 + beta) * k / a;
    (p, q, r)
}

fn jacobi_step_poly(n: usize, beta: f64, cur: &[f64], prev: &[f64]) -> Vec<f64> {
    let (p, q, r) = jacobi_coefficients(n, beta);
    // t = 2s - 1
    let mut next = vec![0.0; cur.len() + 1];
    for (i, &c) in cur.iter().enumerate() {
        next[i + 1] += 2.0 * p * c;
        next[i] += (q - p) * c;
    }
    for (i, &c) in prev.iter().enumerate() {
        next[i] -= r * c;
    }
    next
}

/// Calls `visit(j, phi_j(u))` for `j < n`, keeping the recurrence in range
/// by carrying a separate logarithmic scale.
fn jacobi_walk<F: FnMut(usize, f64)>(shift: usize, u: f64, n: usize, mut visit: F) {
    if n == 0 {
        return;
    }
    let beta = shift as f64 - 0.5;
    let sign = if u < 0.0 && shift % 2 == 1 { -1.0 } else { 1.0 };
    let au = u.abs();
    if au == 0.0 && shift > 0 {
        for j in 0..n {
            visit(j, 0.0);
        }
        return;
    }
    let t = 2.0 * au * au - 1.0;
    let mut log_scale = if shift > 0 { shift as f64 * au.ln() } else { 0.0 };
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..n {
        if j > 0 {
            let (p, q, r) = jacobi_coefficients(j, beta);
            let next = (p * t + q) * cur - r * prev;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE {
                cur /= RESCALE;
                prev /= RESCALE;
                log_scale += RESCALE.ln();
            }
        }
        let norm = (2.0 * j as f64 + beta + 1.0).sqrt();
        let v = if cur == 0.0 { 0.0 } else { sign * norm * cur * log_scale.exp() };
        visit(j, v);
    }
}
