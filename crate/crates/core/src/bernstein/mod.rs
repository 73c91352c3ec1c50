//! Windowed Bernstein approximation of continuous functions vanishing at 0.

mod approx;
mod raw;
mod target;

pub use approx::{
    check_window, constrained_approx_positive, constrained_approx_symmetric, modify_near_zero, select_eta,
    ApproxOptions, ApproxReport, ModificationParams, StageError, Window, ETA_GRID, ORIGIN_TOL,
};
pub use raw::{bernstein_raw, bernstein_samples, bernstein_to_monomial, ArithmeticMode, FLOAT_DEGREE_CAP};
pub use target::{Builtin, TargetDesc, TargetFunction};
