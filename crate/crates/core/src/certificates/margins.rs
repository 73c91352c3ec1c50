use serde::Serialize;

use super::inequalities::{tail_sup_bound, turan_constant, ARON_BEAUZAMY_C};
use crate::error::{Error, Result};
use crate::series::grid::DEFAULT_ANGULAR_POINTS;
use crate::series::{Arc, CompactGrid};

#[derive(Debug, Clone, Serialize)]
pub struct ImpossibilityBound {
    pub d: f64,
    pub c: f64,
    /// Lower bound on the larger of the two joint approximation errors.
    pub margin: f64,
    pub trace: Vec<String>,
}

/// Real case: if `sup_[-1,1] |S_mu - x| < e/4`, `sup_[-1,1] |S_lambda| < e/4` and
/// `lambda <= d mu`, then `1/(2 C^d) <= 3e/4`. Hence `max error >= 1/(6 C^d)`.
pub fn impossibility_margin_real(d: f64) -> Result<ImpossibilityBound> {
    if !(d >= 1.0) {
        return Err(Error::InvalidArgument(format!("ratio bound d must be >= 1, got {d}")));
    }
    let c = ARON_BEAUZAMY_C;
    let floor = 1.0 / (2.0 * c.powf(d));
    let margin = floor / 3.0;
    let trace = vec![
        format!("C = 1 + sqrt(2) = {c:.12}"),
        format!("tail block sum_{{mu<j<=lambda}} a_j x^j is small on |x| <= 1/C^d"),
        format!("contradiction threshold 1/(2 C^d) = {floor:.12} <= 3 eps / 4"),
        format!("errors below eps/4 force eps >= 2/(3 C^d); margin = eps/4 = 1/(6 C^d) = {margin:.12}"),
    ];
    Ok(ImpossibilityBound { d, c, margin, trace })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexImpossibility {
    pub bound: ImpossibilityBound,
    pub big_r: f64,
    pub c_delta: f64,
    pub sup_k: f64,
    /// `K` together with the arc `Gamma_{R, delta}`.
    pub augmented: CompactGrid,
    /// Smallest `mu` from which the tail estimate alone stays below `eps/4`
    /// when the Turán exponent counts all `lambda + 1` coefficients.
    pub tail_mu_from: usize,
}

/// Complex case for targets `(g1, g2) = (0, 1)`: with `R = 2 C_delta^d sup_K |z|`
/// the joint error is at least `1/3`.
pub fn impossibility_margin_complex(d: f64, k: &CompactGrid, delta: f64) -> Result<ComplexImpossibility> {
    if !(d >= 1.0) {
        return Err(Error::InvalidArgument(format!("ratio bound d must be >= 1, got {d}")));
    }
    if k.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let min = k.min_modulus();
    if min <= 1.0 {
        return Err(Error::InsideUnitDisk(min));
    }
    let c_delta = turan_constant(delta);
    let sup_k = k.max_modulus();
    let big_r = 2.0 * c_delta.powf(d) * sup_k;
    let arc = Arc::new(big_r, delta)?;
    let augmented = k.union(&CompactGrid::arc(&arc, DEFAULT_ANGULAR_POINTS));
    // Smallest mu with tail(s = 1/4, lambda = floor(d mu)) < 1/4.
    let tail_mu_from = (1..=64usize)
        .find(|&mu| tail_sup_bound(0.25, c_delta, sup_k, big_r, mu, (d * mu as f64).floor() as usize) < 0.25)
        .unwrap_or(usize::MAX);
    let margin = 1.0 / 3.0;
    let trace = vec![
        format!("C_delta = 4 pi e / delta = {c_delta:.12}"),
        format!("R = 2 C_delta^d sup_K |z| = {big_r:.12} > C_delta^d sup_K |z|"),
        "Turán on Gamma_(R,delta) then Cauchy: |a_j| <= (eps/4) C_delta^(lambda+1) / R^j".to_string(),
        format!("tail on K below eps/4 once mu >= {tail_mu_from}"),
        "sup_K |S_mu| < eps/2, so 1 <= |S_mu - 1| + |S_mu| < 3 eps / 4".to_string(),
        format!("margin = eps/4 at eps = 4/3: {margin:.12}"),
    ];
    Ok(ComplexImpossibility {
        bound: ImpossibilityBound {
            d,
            c: c_delta,
            margin,
            trace,
        },
        big_r,
        c_delta,
        sup_k,
        augmented,
        tail_mu_from,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{E, PI};

    #[test]
    fn real_margins() {
        let b = impossibility_margin_real(2.0).unwrap();
        assert!((b.margin - 0.028595).abs() < 1e-5);
        let b1 = impossibility_margin_real(1.0).unwrap();
        assert!((b1.margin - 0.069036).abs() < 1e-5);
        let mut last = f64::INFINITY;
        for d in 1..30 {
            let m = impossibility_margin_real(d as f64).unwrap().margin;
            assert!(m < last && m > 0.0);
            last = m;
        }
        assert!(impossibility_margin_real(0.5).is_err());
    }

    #[test]
    fn complex_margin_single_point() {
        let k = CompactGrid::points(vec![Complex64::new(2.0, 0.0)]).unwrap();
        let c = impossibility_margin_complex(2.0, &k, PI).unwrap();
        assert!((c.c_delta - 4.0 * E).abs() < 1e-12);
        assert!((c.big_r - 472.9).abs() < 0.1);
        assert_eq!(c.bound.margin, 1.0 / 3.0);
        assert_eq!(c.augmented.len(), 1 + DEFAULT_ANGULAR_POINTS);
    }

    #[test]
    fn complex_margin_circle() {
        let k = CompactGrid::circle(1.5, 64).unwrap();
        let c = impossibility_margin_complex(1.0, &k, PI).unwrap();
        assert!((c.big_r - 2.0 * 4.0 * E * 1.5).abs() < 1e-9);
        let inside = CompactGrid::circle(0.9, 8).unwrap();
        assert_eq!(
            impossibility_margin_complex(1.0, &inside, PI).unwrap_err().code(),
            "INSIDE_UNIT_DISK"
        );
    }
}
