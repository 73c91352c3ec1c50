//! Discretized compact sets and sup-norm estimation on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

pub const DEFAULT_REAL_POINTS: usize = 512;
pub const DEFAULT_ANGULAR_POINTS: usize = 1024;
/// Multiplicative slack applied to every grid-based inequality check.
pub const SLACK: f64 = 1.01;

/// The circle arc `{ |z| = r, -delta/2 <= arg z <= delta/2 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    r: f64,
    delta: f64,
}

impl Arc {
    pub fn new(r: f64, delta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("arc radius must be > 0, got {r}")));
        }
        if !(delta > 0.0 && delta < 2.0 * PI) {
            return Err(Error::InvalidArgument(format!(
                "arc angle must lie in (0, 2pi), got {delta}"
            )));
        }
        Ok(Arc { r, delta })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `n` points including both ends of the arc.
    pub fn points(&self, n: usize) -> Vec<Complex64> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let t = -self.delta / 2.0 + self.delta * k as f64 / (n - 1) as f64;
                Complex64::from_polar(self.r, t)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// Chebyshev extrema, clustered at the endpoints.
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartKind {
    Interval { lo: f64, hi: f64, spacing: Spacing },
    Circle { r: f64 },
    Arc { r: f64, delta: f64 },
    Points,
}

#[derive(Debug, Clone, PartialEq)]
struct Part {
    kind: PartKind,
    points: Vec<Complex64>,
}

/// A finite sample of a compact set: one part, or a union of parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactGrid {
    parts: Vec<Part>,
}

#[derive(Serialize)]
struct GridRepr<'a> {
    kind: &'a str,
    parameters: Vec<&'a PartKind>,
    count: usize,
}

impl Serialize for CompactGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self.parts.as_slice() {
            [p] => match p.kind {
                PartKind::Interval { .. } => "interval",
                PartKind::Circle { .. } => "circle",
                PartKind::Arc { .. } => "arc",
                PartKind::Points => "points",
            },
            _ => "union",
        };
        GridRepr {
            kind,
            parameters: self.parts.iter().map(|p| &p.kind).collect(),
            count: self.len(),
        }
        .serialize(s)
    }
}

impl CompactGrid {
    /// `[lo, hi]` sampled at `n >= 2` uniformly spaced points, endpoints included.
    pub fn interval(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::interval_with(lo, hi, n, Spacing::Uniform)
    }

    pub fn interval_with(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if !(lo < hi) || n < 2 {
            return Err(Error::InvalidArgument(format!(
                "interval grid needs lo < hi and n >= 2, got [{lo}, {hi}] with {n}"
            )));
        }
        let points = (0..n)
            .map(|k| {
                let x = match spacing {
                    Spacing::Uniform => {
                        if k == n - 1 {
                            hi
                        } else {
                            lo + (hi - lo) * k as f64 / (n - 1) as f64
                        }
                    }
                    Spacing::Chebyshev => {
                        let c = -(PI * k as f64 / (n - 1) as f64).cos();
                        if k == 0 {
                            lo
                        } else if k == n - 1 {
                            hi
                        } else {
                            0.5 * (lo + hi) + 0.5 * (hi - lo) * c
                        }
                    }
                };
                Complex64::new(x, 0.0)
            })
            .collect();
        Ok(CompactGrid {
            parts: vec![Part {
                kind: PartKind::Interval { lo, hi, spacing },
                points,
            }],
        })
    }

    /// `[-a, a]` with the default resolution.
    pub fn symmetric(a: f64) -> Result<Self> {
        Self::interval(-a, a, DEFAULT_REAL_POINTS)
    }

    pub fn circle(r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0) || n == 0 {
            return Err(Error::InvalidArgument("circle grid needs r > 0, n > 0".into()));
        }
        let points = (0..n)
            .map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(CompactGrid {
            parts: vec![Part {
                kind: PartKind::Circle { r },
                points,
            }],
        })
    }

    pub fn arc(arc: &Arc, n: usize) -> Self {
        CompactGrid {
            parts: vec![Part {
                kind: PartKind::Arc {
                    r: arc.r,
                    delta: arc.delta,
                },
                points: arc.points(n),
            }],
        }
    }

    pub fn points(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(CompactGrid {
            parts: vec![Part {
                kind: PartKind::Points,
                points,
            }],
        })
    }

    pub fn union(&self, other: &CompactGrid) -> CompactGrid {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        CompactGrid { parts }
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(|p| p.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.parts.iter().flat_map(|p| p.points.iter().copied())
    }

    /// True when every part is a real interval.
    pub fn is_real_interval(&self) -> bool {
        self.parts
            .iter()
            .all(|p| matches!(p.kind, PartKind::Interval { .. }))
    }

    /// Every sample point lies on the real axis.
    pub fn is_real(&self) -> bool {
        self.iter().all(|z| z.im == 0.0)
    }

    /// Real parts of all sample points.
    pub fn real_points(&self) -> Vec<f64> {
        self.iter().map(|z| z.re).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Largest distance between consecutive samples within a part.
    pub fn max_gap(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                let mut g = p
                    .points
                    .windows(2)
                    .map(|w| (w[1] - w[0]).norm())
                    .fold(0.0, f64::max);
                if let PartKind::Circle { .. } = p.kind {
                    if let (Some(a), Some(b)) = (p.points.first(), p.points.last()) {
                        g = g.max((a - b).norm());
                    }
                }
                if let PartKind::Points = p.kind {
                    g = 0.0;
                }
                g
            })
            .fold(0.0, f64::max)
    }
}

/// Grid sup-norm estimate: `value` is attained at a sample (a lower bound of
/// the true sup); `upper` adds a derivative-based allowance for grid gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    pub upper: f64,
    pub argmax: Complex64,
}

const REFINE_TOP: usize = 16;

/// `max |f|` over the grid; real interval parts are refined by golden-section
/// search around their largest local maxima.
pub fn sup_abs_real<F: Fn(f64) -> f64>(grid: &CompactGrid, f: F) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for part in &grid.parts {
        let xs: Vec<f64> = part.points.iter().map(|z| z.re).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| f(x).abs()).collect();
        for (i, &v) in vals.iter().enumerate() {
            if v > best.0 || v.is_nan() {
                best = (v, xs[i]);
            }
        }
        if let PartKind::Interval { .. } = part.kind {
            let mut peaks: Vec<usize> = (0..vals.len())
                .filter(|&i| {
                    (i == 0 || vals[i] >= vals[i - 1]) && (i + 1 == vals.len() || vals[i] >= vals[i + 1])
                })
                .collect();
            peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
            for &i in peaks.iter().take(REFINE_TOP) {
                let a = xs[i.saturating_sub(1)];
                let b = xs[(i + 1).min(xs.len() - 1)];
                let (x, v) = golden_max(|x| f(x).abs(), a.min(b), a.max(b));
                if v > best.0 {
                    best = (v, x);
                }
            }
        }
    }
    Ok(best)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `max |f(z)|` over the grid samples.
pub fn sup_abs_complex<F: Fn(Complex64) -> Complex64>(grid: &CompactGrid, f: F) -> Result<(f64, Complex64)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    for z in grid.iter() {
        let v = f(z).norm();
        if v > best.0 || v.is_nan() {
            best = (v, z);
        }
    }
    Ok(best)
}

/// Sup-norm of a polynomial on a grid.
pub fn sup_norm(p: &Polynomial, grid: &CompactGrid) -> Result<SupEstimate> {
    let r = grid.max_modulus();
    let gap_allowance = {
        let l = p.derivative_bound(r);
        if l.is_finite() {
            0.5 * l * grid.max_gap()
        } else {
            f64::INFINITY
        }
    };
    if grid.is_real_interval() {
        let (value, x) = sup_abs_real(grid, |x| p.eval_stable(x))?;
        Ok(SupEstimate {
            value,
            upper: value + gap_allowance,
            argmax: Complex64::new(x, 0.0),
        })
    } else {
        let (value, z) = sup_abs_complex(grid, |z| p.eval_complex(z))?;
        Ok(SupEstimate {
            value,
            upper: value + gap_allowance,
            argmax: z,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_unit_interval() {
        let g = CompactGrid::interval(-1.0, 1.0, 101).unwrap();
        let s = sup_norm(&Polynomial::monomial(1, 1.0), &g).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn vertex_is_refined() {
        // 100 intervals put a sample at 0.5 anyway; use an even count to force refinement
        let g = CompactGrid::interval(0.0, 1.0, 64).unwrap();
        let p = Polynomial::from_coeffs(vec![0.0, 1.0, -1.0]);
        let s = sup_norm(&p, &g).unwrap();
        assert!((s.value - 0.25).abs() < 1e-14);
        assert!(s.upper >= s.value);
    }

    #[test]
    fn one_plus_z_on_circle() {
        let g = CompactGrid::circle(1.0, DEFAULT_ANGULAR_POINTS).unwrap();
        let s = sup_norm(&Polynomial::from_coeffs(vec![1.0, 1.0]), &g).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.argmax - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn endpoints_and_arc_bounds() {
        let g = CompactGrid::interval_with(-2.0, 3.0, 17, Spacing::Chebyshev).unwrap();
        let xs = g.real_points();
        assert_eq!((xs[0], xs[16]), (-2.0, 3.0));
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        let arc = Arc::new(2.0, PI / 3.0).unwrap();
        for z in arc.points(50) {
            assert!((z.norm() - 2.0).abs() < 1e-12);
            assert!(z.arg().abs() <= PI / 6.0 + 1e-12);
        }
        assert!(Arc::new(1.0, 2.0 * PI).is_err());
        assert!(Arc::new(0.0, 1.0).is_err());
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(matches!(CompactGrid::points(vec![]), Err(Error::EmptyGrid)));
    }

    #[test]
    fn grid_json() {
        let g = CompactGrid::circle(1.5, 8).unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["kind"], "circle");
        assert_eq!(v["count"], 8);
        let u = g.union(&CompactGrid::arc(&Arc::new(3.0, 1.0).unwrap(), 4));
        assert_eq!(serde_json::to_value(&u).unwrap()["kind"], "union");
    }
}
