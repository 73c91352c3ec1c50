//! Cesàro means of partial sums and finite-horizon natural density estimates.

use num_complex::Complex64;
use serde::Serialize;

use crate::bernstein::{TargetDesc, TargetFunction};
use crate::error::{Error, Result};
use crate::series::{CompactGrid, FormalSeries, Polynomial};

/// `sigma_n(f) = (1/(n+1)) sum_{j<=n} S_j(f)`, i.e. coefficients `(1 - j/(n+1)) a_j`.
pub fn cesaro_mean(f: &FormalSeries, n: usize) -> Polynomial {
    let w = (n + 1) as f64;
    let coeffs = (0..=n).map(|j| (1.0 - j as f64 / w) * f.coeff(j)).collect();
    Polynomial::from_coeffs(coeffs)
}

/// Sorted, duplicate-free set of positive integers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IndexSet {
    members: Vec<u64>,
}

impl IndexSet {
    pub fn from_sorted(mut members: Vec<u64>) -> Self {
        members.sort_unstable();
        members.dedup();
        members.retain(|&n| n > 0);
        IndexSet { members }
    }

    /// `{1 <= n <= horizon : pred(n)}`.
    pub fn from_predicate<F: Fn(u64) -> bool>(horizon: u64, pred: F) -> Self {
        IndexSet {
            members: (1..=horizon).filter(|&n| pred(n)).collect(),
        }
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// `#{n in A : n <= horizon}`.
    pub fn count_upto(&self, horizon: u64) -> u64 {
        self.members.partition_point(|&n| n <= horizon) as u64
    }

    /// Complement within `1..=horizon`.
    pub fn complement(&self, horizon: u64) -> IndexSet {
        IndexSet::from_predicate(horizon, |n| !self.contains(n))
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            members: self.members.iter().copied().filter(|&n| other.contains(n)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPoint {
    pub horizon: u64,
    pub count: u64,
    pub ratio: f64,
}

/// `count / N` along a horizon ladder. `lower_est` and `upper_est` are the
/// minimum and maximum ratio over the tail of the ladder (its second half).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    #[serde(rename = "N")]
    pub horizon: u64,
    pub count: u64,
    pub lower_est: f64,
    pub upper_est: f64,
    pub ladder: Vec<LadderPoint>,
    pub finite_horizon: bool,
}

pub fn density(set: &IndexSet, ladder: &[u64]) -> Result<DensityEstimate> {
    if ladder.is_empty() || ladder[0] == 0 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("ladder must be positive and strictly increasing".into()));
    }
    let points: Vec<LadderPoint> = ladder
        .iter()
        .map(|&n| {
            let count = set.count_upto(n);
            LadderPoint {
                horizon: n,
                count,
                ratio: count as f64 / n as f64,
            }
        })
        .collect();
    let tail = &points[points.len() / 2..];
    let lower = tail.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let upper = tail.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let last = points[points.len() - 1];
    Ok(DensityEstimate {
        horizon: last.horizon,
        count: last.count,
        lower_est: lower,
        upper_est: upper,
        ladder: points,
        finite_horizon: true,
    })
}

/// `sup_K |sigma_n(f) - h|` for `n = 0..=horizon`.
///
/// On a grid with non-real points only constant targets are accepted.
pub fn cesaro_errors(f: &FormalSeries, h: &TargetFunction, k: &CompactGrid, horizon: usize) -> Result<Vec<f64>> {
    if k.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let real = k.is_real();
    let constant = match h.desc() {
        TargetDesc::Constant(c) => Some(*c),
        _ => None,
    };
    if !real && constant.is_none() {
        return Err(Error::InvalidArgument(
            "non-constant targets need a real compact set".into(),
        ));
    }
    let pts: Vec<Complex64> = k.iter().collect();
    let target: Vec<Complex64> = pts
        .iter()
        .map(|z| Complex64::new(constant.unwrap_or_else(|| h.eval(z.re)), 0.0))
        .collect();
    // Running S_n(z), z^n and sum_{j<=n} S_j(z) per point.
    let mut partial = vec![Complex64::new(0.0, 0.0); pts.len()];
    let mut power = vec![Complex64::new(1.0, 0.0); pts.len()];
    let mut total = vec![Complex64::new(0.0, 0.0); pts.len()];
    let mut out = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let a = f.coeff(n);
        let mut sup = 0.0f64;
        for i in 0..pts.len() {
            if a != 0.0 {
                partial[i] += power[i] * a;
            }
            power[i] *= pts[i];
            total[i] += partial[i];
            let e = (total[i] / (n + 1) as f64 - target[i]).norm();
            sup = if e.is_nan() { f64::INFINITY } else { sup.max(e) };
        }
        out.push(sup);
    }
    Ok(out)
}

/// `{1 <= n <= horizon : sup_K |sigma_n(f) - h| < epsilon}`.
pub fn success_set(
    f: &FormalSeries,
    h: &TargetFunction,
    k: &CompactGrid,
    epsilon: f64,
    horizon: usize,
) -> Result<IndexSet> {
    let errs = cesaro_errors(f, h, k, horizon)?;
    Ok(success_from_errors(&errs, epsilon))
}

fn success_from_errors(errs: &[f64], epsilon: f64) -> IndexSet {
    IndexSet {
        members: (1..errs.len()).filter(|&n| errs[n] < epsilon).map(|n| n as u64).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetDensity {
    pub target: TargetDesc,
    pub density: DensityEstimate,
    /// `sup_K |sigma_n - h|` for `n = 0..=N`.
    #[serde(skip)]
    pub errors: Vec<f64>,
    #[serde(skip)]
    pub success: IndexSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointCheck {
    pub first: usize,
    pub second: usize,
    /// `2 epsilon < |c1 - c2|` for two constant targets.
    pub separated: bool,
    pub intersection: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CesaroReport {
    pub epsilon: f64,
    pub targets: Vec<TargetDensity>,
    pub disjoint: Vec<DisjointCheck>,
    /// Complement identity `count(A) + count(A^c) = N` at every ladder horizon.
    pub complement_identity: bool,
    /// Separated targets have disjoint success sets.
    pub exclusion_holds: bool,
    pub finite_horizon: bool,
}

/// Density of the success set of each target. Only calculator identities are
/// checked; nothing is claimed about the asymptotic densities.
pub fn frequent_cesaro_report(
    f: &FormalSeries,
    targets: &[TargetFunction],
    k: &CompactGrid,
    epsilon: f64,
    ladder: &[u64],
) -> Result<CesaroReport> {
    let horizon = *ladder
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty ladder".into()))?;
    let mut rows = Vec::with_capacity(targets.len());
    let mut complement_identity = true;
    for h in targets {
        let errors = cesaro_errors(f, h, k, horizon as usize)?;
        let success = success_from_errors(&errors, epsilon);
        let density = density(&success, ladder)?;
        let comp = success.complement(horizon);
        complement_identity &= ladder
            .iter()
            .all(|&n| success.count_upto(n) + comp.count_upto(n) == n);
        rows.push(TargetDensity {
            target: h.desc().clone(),
            density,
            errors,
            success,
        });
    }
    let mut disjoint = Vec::new();
    let mut exclusion_holds = true;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if let (TargetDesc::Constant(c1), TargetDesc::Constant(c2)) = (&rows[i].target, &rows[j].target) {
                let separated = 2.0 * epsilon < (c1 - c2).abs();
                let intersection = rows[i].success.intersection(&rows[j].success).len();
                exclusion_holds &= !separated || intersection == 0;
                disjoint.push(DisjointCheck {
                    first: i,
                    second: j,
                    separated,
                    intersection,
                });
            }
        }
    }
    Ok(CesaroReport {
        epsilon,
        targets: rows,
        disjoint,
        complement_identity,
        exclusion_holds,
        finite_horizon: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_examples() {
        let one = FormalSeries::from_coeffs(vec![1.0]);
        for n in [0, 1, 7] {
            assert_eq!(cesaro_mean(&one, n).eval(0.3), 1.0);
        }
        let x = FormalSeries::from_coeffs(vec![0.0, 1.0]);
        let s = cesaro_mean(&x, 4);
        assert!((s.coeff(1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        let evens = IndexSet::from_predicate(10_000, |n| n % 2 == 0);
        let d = density(&evens, &[1000]).unwrap();
        assert_eq!(d.lower_est, 0.5);
        let squares = IndexSet::from_predicate(10_000, |n| {
            let r = (n as f64).sqrt().round() as u64;
            r * r == n
        });
        let d = density(&squares, &[100, 1000, 10_000]).unwrap();
        assert_eq!(d.count, 100);
        assert_eq!(d.ladder[2].ratio, 0.01);
        assert!(d.lower_est <= d.upper_est);
        let c = squares.complement(777);
        assert_eq!(squares.count_upto(777) + c.count_upto(777), 777);
        assert!(density(&evens, &[10, 10]).is_err());
    }

    #[test]
    fn success_set_constants() {
        let k = CompactGrid::interval(2.0, 3.0, 33).unwrap();
        let f = FormalSeries::from_coeffs(vec![0.7]);
        let all = success_set(&f, &TargetFunction::constant(0.7), &k, 0.1, 50).unwrap();
        assert_eq!(all.len(), 50);
        let none = success_set(&f, &TargetFunction::constant(0.2), &k, 0.1, 50).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn report_disjoint_constant_targets() {
        let k = CompactGrid::interval(2.0, 3.0, 17).unwrap();
        let f = FormalSeries::from_coeffs(vec![0.5, 0.0, 0.0, -0.01, 0.0, 0.002]);
        let targets = [TargetFunction::constant(0.0), TargetFunction::constant(1.0)];
        let r = frequent_cesaro_report(&f, &targets, &k, 0.25, &[500, 1000, 2000]).unwrap();
        assert!(r.complement_identity && r.exclusion_holds);
        assert!(r.disjoint[0].separated);
        for t in &r.targets {
            let counts: Vec<u64> = t.density.ladder.iter().map(|p| p.count).collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn complex_grid_needs_constant_target() {
        let k = CompactGrid::circle(2.0, 16).unwrap();
        let f = FormalSeries::from_coeffs(vec![1.0]);
        assert!(cesaro_errors(&f, &TargetFunction::identity(), &k, 3).is_err());
        let e = cesaro_errors(&f, &TargetFunction::constant(1.0), &k, 3).unwrap();
        assert!(e.iter().all(|&v| v < 1e-15));
    }
}
