//! Polynomial and formal-series arithmetic, evaluation, grids and sup-norms.

pub mod basis;
mod formal;
pub mod grid;
mod lambda;
mod polynomial;

pub use basis::{BernsteinForm, CompensatedSum, Factored, FactoredKind, JacobiForm, LnBinomial};
pub use formal::FormalSeries;
pub use grid::{sup_abs_complex, sup_abs_real, sup_norm, Arc, CompactGrid, Spacing, SupEstimate};
pub use lambda::{ratio_profile, LambdaSequence, LambdaSpec, RatioProfile};
pub use polynomial::Polynomial;
