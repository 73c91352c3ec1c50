use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{CompensatedSum, Factored};
use crate::error::{Error, Result};

/// Real polynomial with exact valuation and degree metadata.
///
/// `coeffs` always has length `degree + 1` and every entry below `valuation`
/// is exactly `0.0`. The zero polynomial has `valuation = degree = 0`.
/// Blocks produced by the approximation engines also carry a [`Factored`]
/// form, which is the numerically trustworthy evaluation path when the
/// monomial coefficients are large.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "PolynomialRepr", into = "PolynomialRepr")]
pub struct Polynomial {
    coeffs: Vec<f64>,
    valuation: usize,
    degree: usize,
    factored: Option<Arc<Factored>>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    coeffs: Vec<f64>,
    valuation: usize,
    degree: usize,
}

impl TryFrom<PolynomialRepr> for Polynomial {
    type Error = Error;

    fn try_from(r: PolynomialRepr) -> Result<Self> {
        let p = Polynomial::from_coeffs(r.coeffs);
        if p.valuation != r.valuation || p.degree != r.degree {
            return Err(Error::InvalidArgument(format!(
                "declared valuation/degree ({}, {}) do not match coefficients ({}, {})",
                r.valuation, r.degree, p.valuation, p.degree
            )));
        }
        Ok(p)
    }
}

impl From<Polynomial> for PolynomialRepr {
    fn from(p: Polynomial) -> Self {
        PolynomialRepr {
            valuation: p.valuation,
            degree: p.degree,
            coeffs: p.coeffs,
        }
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![0.0],
            valuation: 0,
            degree: 0,
            factored: None,
        }
    }

    /// Trailing zeros are trimmed; valuation is the first nonzero index.
    pub fn from_coeffs(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        match coeffs.iter().position(|&c| c != 0.0) {
            None => Polynomial::zero(),
            Some(v) => Polynomial {
                degree: coeffs.len() - 1,
                valuation: v,
                coeffs,
                factored: None,
            },
        }
    }

    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Polynomial::from_coeffs(coeffs)
    }

    pub fn with_factored(mut self, f: Factored) -> Self {
        self.factored = Some(Arc::new(f));
        self
    }

    pub fn factored(&self) -> Option<&Factored> {
        self.factored.as_deref()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn valuation(&self) -> usize {
        self.valuation
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.degree == 0 && self.coeffs[0] == 0.0
    }

    /// Number of nonzero coefficients.
    pub fn sparsity(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0.0).count()
    }

    /// Horner evaluation of the monomial form.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Factored form when present, otherwise Horner.
    pub fn eval_stable(&self, x: f64) -> f64 {
        match &self.factored {
            Some(f) => f.eval(x),
            None => self.eval(x),
        }
    }

    /// `sum_k k |c_k| r^(k-1)`: a bound for `|p'|` on `|x| <= r`.
    pub fn derivative_bound(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c.abs() * r.powi(k as i32 - 1))
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Plain convolution.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.degree + other.degree + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }

    /// Coefficients restricted to indices `<= n`.
    pub fn truncate(&self, n: usize) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().take(n + 1).copied().collect())
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polynomial")
            .field("valuation", &self.valuation)
            .field("degree", &self.degree)
            .field("coeffs", &self.coeffs)
            .field("factored", &self.factored.as_ref().map(|f| f.kind()))
            .finish()
    }
}
