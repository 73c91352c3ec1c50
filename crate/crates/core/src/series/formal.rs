use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Append-only real coefficient sequence `a_0, a_1, ...`.
///
/// `current_degree` is the highest index that has been written or reserved;
/// indices at or below it are frozen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalSeries {
    coeffs: Vec<f64>,
    current_degree: usize,
}

impl Default for FormalSeries {
    fn default() -> Self {
        FormalSeries::new()
    }
}

impl FormalSeries {
    /// The empty series `a_0 = 0` with `current_degree = 0`.
    pub fn new() -> Self {
        FormalSeries {
            coeffs: vec![0.0],
            current_degree: 0,
        }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return FormalSeries::new();
        }
        let current_degree = coeffs.len() - 1;
        FormalSeries {
            coeffs,
            current_degree,
        }
    }

    pub fn current_degree(&self) -> usize {
        self.current_degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `a_k`, with unwritten coefficients read as zero.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `S_n = sum_{k <= n} a_k x^k`.
    pub fn partial_sum(&self, n: usize) -> Polynomial {
        Polynomial::from_coeffs((0..=n).map(|k| self.coeff(k)).collect())
    }

    /// Writes `block`'s coefficients past the frozen prefix. The zero
    /// polynomial is accepted and writes nothing.
    pub fn append_block(&mut self, block: &Polynomial) -> Result<()> {
        if block.is_zero() {
            return Ok(());
        }
        if block.valuation() <= self.current_degree {
            return Err(Error::Overlap {
                valuation: block.valuation(),
                current: self.current_degree,
            });
        }
        self.coeffs.resize(block.degree() + 1, 0.0);
        for k in block.valuation()..=block.degree() {
            self.coeffs[k] = block.coeff(k);
        }
        self.current_degree = block.degree();
        Ok(())
    }

    /// Freezes every index up to `n` (zero-filled).
    pub fn reserve_through(&mut self, n: usize) {
        if n > self.current_degree {
            self.coeffs.resize(n + 1, 0.0);
            self.current_degree = n;
        }
    }
}
