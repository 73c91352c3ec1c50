//! Desk-scale construction and certification of doubly universal power series.
//!
//! The crate builds coefficient sequences whose partial sums `S_mu` and
//! `S_{lambda_mu}` jointly approximate prescribed target pairs, and checks
//! the converse regime `lambda_n <= d n` with polynomial inequalities and a
//! minimax linear program.

pub mod bernstein;
pub mod builder;
pub mod certificates;
pub mod cesaro;
pub mod engine;
pub mod error;
pub mod lp;
pub mod minimax;
pub mod selftest;
pub mod sequence;
pub mod series;

pub use error::{Error, Result};
pub use bernstein::{TargetFunction, Window};
pub use series::{CompactGrid, FormalSeries, LambdaSequence, Polynomial};
pub use builder::{ApproximationRequest, BuildConfig, WitnessLog};
pub use cesaro::{DensityEstimate, IndexSet};
pub use engine::Engine;
pub use sequence::SequencePoint;
