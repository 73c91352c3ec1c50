//! Polynomial inequalities, impossibility margins and the minimax LP oracle
//! for the regime `lambda_n <= d n`.

mod double_fit;
pub mod fuzz;
mod inequalities;
mod margins;

pub use double_fit::{minimax_double_fit, window_exclusion, DoubleFit, GridTarget, MinimaxProblem, WindowExclusion};
pub use inequalities::{
    cauchy_coefficient_bounds, real_to_complex_bound, real_to_complex_bound_with, tail_sup_bound, turan_bound,
    turan_bound_with, turan_constant, CauchyReport, CoefficientBound, RealToComplexReport, TuranReport,
    ARON_BEAUZAMY_C,
};
pub use margins::{impossibility_margin_complex, impossibility_margin_real, ComplexImpossibility, ImpossibilityBound};
