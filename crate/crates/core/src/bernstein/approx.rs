use serde::{Deserialize, Serialize};

use super::raw::{bernstein_raw, ArithmeticMode};
use super::TargetFunction;
use crate::error::{Error, Result};
use crate::series::{sup_abs_real, BernsteinForm, CompactGrid, Factored, Polynomial};

/// Grid resolution used to locate η.
pub const ETA_GRID: usize = 4000;
/// Tolerance on `|h(0)|`.
pub const ORIGIN_TOL: f64 = 1e-12;

/// Index window `l..=m` for a block polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub l: usize,
    pub m: usize,
}

impl Window {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if l == 0 || l > m {
            return Err(Error::InvalidArgument(format!(
                "window needs 1 <= l <= m (got l = {l}, m = {m})"
            )));
        }
        Ok(Window { l, m })
    }

    /// Windows for the even and odd halves `Q1`, `Q2` in `s = x^2`.
    pub fn split(self) -> (Window, Window) {
        (
            Window {
                l: self.l / 2 + 1,
                m: self.m / 2,
            },
            Window {
                l: self.l / 2,
                m: self.m.saturating_sub(1) / 2,
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModificationParams {
    pub eta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxOptions {
    pub mode: ArithmeticMode,
    /// Points in the a-posteriori verification grid.
    pub verify_points: usize,
    /// Highest degree tried by the unconstrained fit of `h̃ / x^2`.
    pub weierstrass_cap: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            mode: ArithmeticMode::Auto,
            verify_points: 2049,
            weierstrass_cap: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageError {
    pub stage: &'static str,
    pub error: f64,
    pub budget: f64,
}

/// Result of a constrained approximation together with its error report.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxReport {
    pub poly: Polynomial,
    pub window: Window,
    pub eta: f64,
    pub epsilon: f64,
    pub stage_errors: Vec<StageError>,
    pub total_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weierstrass_degree: Option<usize>,
}

fn check_origin(h: &TargetFunction) -> Result<()> {
    let h0 = h.eval(0.0);
    if !(h0.abs() <= ORIGIN_TOL) {
        return Err(Error::TargetNotZeroAtOrigin(h0));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be positive and finite (got {v})")));
    }
    Ok(())
}

/// Picks η on `[0, a]` (or `[-a, a]` when `symmetric`): the largest grid point
/// up to which `|h| <= ε/4`, halved.
pub fn select_eta(h: &TargetFunction, epsilon: f64, a: f64, symmetric: bool) -> Result<ModificationParams> {
    check_positive("epsilon", epsilon)?;
    check_positive("A", a)?;
    check_origin(h)?;
    let bound = epsilon / 4.0;
    let ok = |x: f64| h.eval(x).abs() <= bound && (!symmetric || h.eval(-x).abs() <= bound);
    let step = a / ETA_GRID as f64;
    let mut last = 0;
    for i in 1..=ETA_GRID {
        if !ok(step * i as f64) {
            break;
        }
        last = i;
    }
    let mut grid_eta = step * last as f64;
    if last == 0 {
        // Steeper than the grid: shrink below the first grid point.
        let mut x = step;
        while !ok(x) {
            x *= 0.5;
            if x < f64::MIN_POSITIVE {
                return Err(Error::TargetNotZeroAtOrigin(h.eval(0.0)));
            }
        }
        grid_eta = x;
    }
    Ok(ModificationParams {
        eta: grid_eta / 2.0,
        epsilon,
    })
}

/// `h̃`: zero on `|x| <= η/2`, linear up to `h(±η)` at `±η`, equal to `h` beyond.
pub fn modify_near_zero(h: &TargetFunction, params: ModificationParams, symmetric: bool) -> TargetFunction {
    let eta = params.eta;
    let hp = h.eval(eta);
    let hm = h.eval(-eta);
    let inner = h.clone();
    TargetFunction::from_fn(format!("modified({:?}, eta = {eta})", h.desc()), move |x| {
        let ax = x.abs();
        if x < 0.0 && !symmetric {
            inner.eval(x)
        } else if ax <= eta / 2.0 {
            0.0
        } else if ax <= eta {
            if x > 0.0 {
                2.0 * hp / eta * (x - eta / 2.0)
            } else {
                -2.0 * hm / eta * (x + eta / 2.0)
            }
        } else {
            inner.eval(x)
        }
    })
}

fn sup_diff<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> Result<f64> {
    let grid = CompactGrid::interval(lo, hi, n.max(2))?;
    Ok(sup_abs_real(&grid, f)?.0)
}

/// Cheap feasibility test `a l / m <= η / 2`.
pub fn check_window(w: Window, a: f64, eta: f64) -> Result<()> {
    let ratio = a * w.l as f64 / w.m as f64;
    if ratio > eta / 2.0 {
        return Err(Error::InfeasibleWindow {
            ratio,
            half_eta: eta / 2.0,
        });
    }
    Ok(())
}

/// Polynomial supported on `w.l..=w.m` with `sup_[0,a] |P - h| < ε`.
pub fn constrained_approx_positive(
    h: &TargetFunction,
    w: Window,
    a: f64,
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<ApproxReport> {
    Window::new(w.l, w.m)?;
    positive_inner(h, w, a, epsilon, opts)
}

/// Same as the public op, but the window floor may be 0.
fn positive_inner(
    h: &TargetFunction,
    w: Window,
    a: f64,
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<ApproxReport> {
    let params = select_eta(h, epsilon, a, false)?;
    check_window(w, a, params.eta)?;
    let ht = modify_near_zero(h, params, false);
    let n = opts.verify_points;
    let modification = sup_diff(0.0, a, n, |x| h.eval(x) - ht.eval(x))?;
    let poly = bernstein_raw(&ht, w.m, a, opts.mode)?;
    debug_assert!(poly.is_zero() || poly.valuation() > w.l || w.l == 0);
    let bern = sup_diff(0.0, a, n, |x| poly.eval_stable(x) - ht.eval(x))?;
    let total = sup_diff(0.0, a, n, |x| poly.eval_stable(x) - h.eval(x))?;
    if !(total < epsilon) {
        return Err(Error::ApproxNotReached {
            achieved: total,
            tolerance: epsilon,
            degree: w.m,
        });
    }
    Ok(ApproxReport {
        poly,
        window: w,
        eta: params.eta,
        epsilon,
        stage_errors: vec![
            StageError {
                stage: "modification",
                error: modification,
                budget: epsilon / 2.0,
            },
            StageError {
                stage: "bernstein",
                error: bern,
                budget: epsilon / 2.0,
            },
        ],
        total_error: total,
        weierstrass_degree: None,
    })
}

/// Unconstrained fit `W = x^2 B_N(h̃ / x^2)` on `[-a, a]`, doubling `N`
/// until `sup |W - h̃| < budget`.
fn weierstrass_step(
    ht: &TargetFunction,
    eta: f64,
    a: f64,
    budget: f64,
    opts: &ApproxOptions,
) -> Result<(BernsteinForm, usize, f64)> {
    let g = |x: f64| {
        if x.abs() < eta / 4.0 {
            0.0
        } else {
            ht.eval(x) / (x * x)
        }
    };
    let mut degree = 32usize;
    loop {
        let weights = (0..=degree)
            .map(|k| g(-a + 2.0 * a * k as f64 / degree as f64))
            .collect();
        let form = BernsteinForm::new(-a, 2.0 * a, weights);
        let err = sup_diff(-a, a, opts.verify_points, |x| x * x * form.eval(x) - ht.eval(x))?;
        if err < budget {
            return Ok((form, degree, err));
        }
        if degree * 2 > opts.weierstrass_cap {
            return Err(Error::ApproxNotReached {
                achieved: err,
                tolerance: budget,
                degree,
            });
        }
        degree *= 2;
    }
}

/// Polynomial supported on `w.l..=w.m` with `sup_[-a,a] |P - h| < ε`, built as
/// `P1(x^2) + x P2(x^2)` from constrained fits of the even and odd parts.
pub fn constrained_approx_symmetric(
    h: &TargetFunction,
    w: Window,
    a: f64,
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<ApproxReport> {
    let w = Window::new(w.l, w.m)?;
    let params = select_eta(h, epsilon, a, true)?;
    check_window(w, a, params.eta)?;
    let ht = modify_near_zero(h, params, true);
    let n = opts.verify_points;
    let modification = sup_diff(-a, a, n, |x| h.eval(x) - ht.eval(x))?;

    let (form, wdeg, werr) = weierstrass_step(&ht, params.eta, a, epsilon / 4.0, opts)?;
    let form = std::sync::Arc::new(form);
    let (f1, f2) = (form.clone(), form.clone());
    let q1 = TargetFunction::from_fn("even part", move |s: f64| {
        let r = s.max(0.0).sqrt();
        0.5 * r * r * (f1.eval(r) + f1.eval(-r))
    });
    let q2 = TargetFunction::from_fn("odd part", move |s: f64| {
        let r = s.max(0.0).sqrt();
        0.5 * r * (f2.eval(r) - f2.eval(-r))
    });

    let (w1, w2) = w.split();
    let a2 = a * a;
    let (p1, e1) = half_fit(&q1, w1, a2, epsilon / 8.0, opts)?;
    let (p2, e2) = half_fit(&q2, w2, a2, epsilon / (8.0 * a), opts)?;

    let mut coeffs = vec![0.0; w.m + 1];
    for (k, &c) in p1.coeffs().iter().enumerate() {
        coeffs[2 * k] = c;
    }
    for (k, &c) in p2.coeffs().iter().enumerate() {
        coeffs[2 * k + 1] = c;
    }
    let factor = |p: &Polynomial| p.factored().cloned().unwrap_or(Factored::Zero);
    let poly = Polynomial::from_coeffs(coeffs).with_factored(Factored::EvenOdd {
        even: Box::new(factor(&p1)),
        odd: Box::new(factor(&p2)),
    });
    let total = sup_diff(-a, a, n, |x| poly.eval_stable(x) - h.eval(x))?;
    let stages = vec![
        StageError {
            stage: "modification",
            error: modification,
            budget: epsilon / 2.0,
        },
        StageError {
            stage: "weierstrass",
            error: werr,
            budget: epsilon / 4.0,
        },
        StageError {
            stage: "even",
            error: e1,
            budget: epsilon / 8.0,
        },
        StageError {
            stage: "odd",
            error: a * e2,
            budget: epsilon / 8.0,
        },
    ];
    if let Some(s) = stages.iter().find(|s| s.error > s.budget) {
        return Err(Error::ApproxNotReached {
            achieved: s.error,
            tolerance: s.budget,
            degree: w.m,
        });
    }
    if !(total < epsilon) {
        return Err(Error::ApproxNotReached {
            achieved: total,
            tolerance: epsilon,
            degree: w.m,
        });
    }
    Ok(ApproxReport {
        poly,
        window: w,
        eta: params.eta,
        epsilon,
        stage_errors: stages,
        total_error: total,
        weierstrass_degree: Some(wdeg),
    })
}

fn half_fit(
    q: &TargetFunction,
    w: Window,
    a: f64,
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<(Polynomial, f64)> {
    if w.m < w.l {
        return Err(Error::InfeasibleWindow {
            ratio: f64::INFINITY,
            half_eta: 0.0,
        });
    }
    let r = positive_inner(q, w, a, epsilon, opts)?;
    Ok((r.poly, r.total_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::Builtin;

    #[test]
    fn eta_examples() {
        let p = select_eta(&TargetFunction::identity(), 0.1, 1.0, false).unwrap();
        assert!((p.eta - 0.0125).abs() < 1e-12);
        let p = select_eta(&TargetFunction::zero(), 0.1, 3.0, true).unwrap();
        assert_eq!(p.eta, 1.5);
        let p = select_eta(&TargetFunction::builtin(Builtin::X2), 0.4, 1.0, false).unwrap();
        assert!((p.eta - 0.1f64.sqrt() / 2.0).abs() < 1e-3);
        let err = select_eta(&TargetFunction::constant(1.0), 0.1, 1.0, false).unwrap_err();
        assert_eq!(err.code(), "TARGET_NOT_ZERO_AT_ORIGIN");
    }

    #[test]
    fn eta_for_steep_target_is_positive() {
        let h = TargetFunction::from_fn("steep", |x| 1e6 * x);
        let p = select_eta(&h, 0.1, 1.0, false).unwrap();
        assert!(p.eta > 0.0 && 1e6 * 2.0 * p.eta <= 0.025);
    }

    #[test]
    fn modification_examples() {
        let params = ModificationParams { eta: 0.2, epsilon: 1.0 };
        let one = modify_near_zero(&TargetFunction::identity(), params, false);
        assert_eq!(one.eval(0.1), 0.0);
        assert!((one.eval(0.2) - 0.2).abs() < 1e-15);
        assert!((one.eval(0.15) - 0.1).abs() < 1e-15);
        assert_eq!(one.eval(0.5), 0.5);
        let sym = modify_near_zero(&TargetFunction::identity(), params, true);
        assert!((sym.eval(-0.15) + 0.1).abs() < 1e-15);
        assert_eq!(sym.eval(-0.05), 0.0);
        let z = modify_near_zero(&TargetFunction::zero(), params, true);
        assert_eq!(z.eval(0.7), 0.0);
    }

    #[test]
    fn split_indices() {
        let (a, b) = Window::new(7, 20).unwrap().split();
        assert_eq!((a.l, a.m, b.l, b.m), (4, 10, 3, 9));
    }

    #[test]
    fn positive_examples() {
        let opts = ApproxOptions {
            mode: ArithmeticMode::Rational,
            ..Default::default()
        };
        let w = Window::new(1, 400).unwrap();
        let r = constrained_approx_positive(&TargetFunction::identity(), w, 1.0, 0.1, &opts).unwrap();
        assert!(r.poly.valuation() >= 1 && r.poly.degree() <= 400);
        assert!(r.total_error < 0.1);

        let r = constrained_approx_positive(&TargetFunction::zero(), Window::new(1, 10).unwrap(), 1.0, 0.1, &opts)
            .unwrap();
        assert!(r.poly.is_zero());
        assert_eq!(r.total_error, 0.0);

        let err = constrained_approx_positive(
            &TargetFunction::identity(),
            Window::new(50, 100).unwrap(),
            1.0,
            0.1,
            &opts,
        )
        .unwrap_err();
        assert_eq!(err.code(), "INFEASIBLE_WINDOW");
    }

    #[test]
    fn symmetric_zero() {
        let opts = ApproxOptions::default();
        let r = constrained_approx_symmetric(&TargetFunction::zero(), Window::new(2, 40).unwrap(), 1.0, 0.1, &opts)
            .unwrap();
        assert!(r.poly.is_zero());
    }

    fn assert_window(r: &ApproxReport, w: Window) {
        let c = r.poly.coeffs();
        assert!(c.iter().take(w.l).all(|&x| x == 0.0));
        assert!(r.poly.degree() <= w.m);
    }

    #[test]
    fn symmetric_smooth_odd_target() {
        let opts = ApproxOptions::default();
        let h = TargetFunction::polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        let w = Window::new(2, 600).unwrap();
        let r = constrained_approx_symmetric(&h, w, 1.0, 0.5, &opts).unwrap();
        assert_window(&r, w);
        assert!(r.total_error < 0.5);
        assert_eq!(r.stage_errors.len(), 4);
        assert!(r.stage_errors.iter().all(|s| s.error <= s.budget));
        let sum: f64 = r.stage_errors.iter().map(|s| s.error).sum();
        assert!(r.total_error <= sum + 1e-9);
    }

    #[test]
    fn symmetric_identity_coarse_tolerance() {
        let opts = ApproxOptions::default();
        let w = Window::new(1, 200).unwrap();
        let r = constrained_approx_symmetric(&TargetFunction::identity(), w, 1.0, 0.5, &opts).unwrap();
        assert_window(&r, w);
        for x in [-1.0, -0.4, 0.0, 0.3, 1.0] {
            assert!((r.poly.eval_stable(x) - x).abs() < 0.5);
        }
    }

    #[test]
    fn symmetric_identity_tight_tolerance_fails() {
        let opts = ApproxOptions::default();
        let w = Window::new(2, 4000).unwrap();
        let err = constrained_approx_symmetric(&TargetFunction::identity(), w, 1.0, 0.1, &opts).unwrap_err();
        assert!(matches!(err.code(), "COEFFICIENT_OVERFLOW" | "APPROX_NOT_REACHED" | "INFEASIBLE_WINDOW"));
    }

    #[test]
    fn symmetric_converges_on_cubic_schedule() {
        let opts = ApproxOptions::default();
        let h = TargetFunction::polynomial(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let mut seen_success = false;
        for n in 1..=6usize {
            let w = Window::new(n, n * n * n).unwrap();
            match constrained_approx_symmetric(&h, w, 1.0, 1.0, &opts) {
                Ok(r) => {
                    assert_window(&r, w);
                    seen_success = true;
                }
                Err(e) => assert!(!seen_success, "n = {n} regressed: {e}"),
            }
        }
        assert!(seen_success);
    }
}
