use thiserror::Error;

/// Why a witness search gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessFailure {
    /// Every probed window failed the Bernstein feasibility precheck.
    BernsteinPrecheck,
    /// Every probed window was excluded by the Cauchy/Aron-Beauzamy tail bound.
    CertifiedImpossible,
    /// Windows not excluded by the bound needed more than the engine can fit.
    BeyondCapacity,
    /// Fits were attempted and none reached the tolerance.
    ApproxNotReached,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty grid")]
    EmptyGrid,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target does not vanish at 0: h(0) = {0}")]
    TargetNotZeroAtOrigin(f64),
    #[error("window ratio A*l/m = {ratio} exceeds eta/2 = {half_eta}")]
    InfeasibleWindow { ratio: f64, half_eta: f64 },
    #[error("approximation error {achieved} not below tolerance {tolerance} at degree {degree}")]
    ApproxNotReached {
        achieved: f64,
        tolerance: f64,
        degree: usize,
    },
    #[error("degree {degree} exceeds float-mode cap {cap}; use rational mode")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("monomial coefficient overflow at degree {0}")]
    CoefficientOverflow(usize),
    #[error("block valuation {valuation} does not exceed current degree {current}")]
    Overlap { valuation: usize, current: usize },
    #[error("request {request}: no feasible witness up to horizon {horizon} ({reason:?})")]
    NoFeasibleWitness {
        request: usize,
        horizon: usize,
        reason: WitnessFailure,
    },
    #[error("request {request}: {source}")]
    Request {
        request: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("simplex exceeded {0} iterations")]
    LpCycling(usize),
    #[error("lambda sequence not strictly increasing at n = {0}")]
    NotIncreasing(u64),
    #[error("lambda expression: {0}")]
    Expression(String),
    #[error("lambda_n = n for every admissible n up to {0}")]
    LambdaIsIdentity(u64),
    #[error("compact set meets the closed unit disk (min |z| = {0})")]
    InsideUnitDisk(f64),
}

impl Error {
    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyGrid => "EMPTY_GRID",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::TargetNotZeroAtOrigin(_) => "TARGET_NOT_ZERO_AT_ORIGIN",
            Error::InfeasibleWindow { .. } => "INFEASIBLE_WINDOW",
            Error::ApproxNotReached { .. } => "APPROX_NOT_REACHED",
            Error::DegreeCapExceeded { .. } => "DEGREE_CAP_EXCEEDED",
            Error::CoefficientOverflow(_) => "COEFFICIENT_OVERFLOW",
            Error::Overlap { .. } => "OVERLAP",
            Error::NoFeasibleWitness { .. } => "NO_FEASIBLE_WITNESS",
            Error::Request { source, .. } => source.code(),
            Error::LpUnbounded => "LP_UNBOUNDED",
            Error::LpInfeasible => "LP_INFEASIBLE",
            Error::LpCycling(_) => "LP_CYCLING",
            Error::NotIncreasing(_) => "NOT_INCREASING",
            Error::Expression(_) => "BAD_EXPRESSION",
            Error::LambdaIsIdentity(_) => "LAMBDA_IS_IDENTITY",
            Error::InsideUnitDisk(_) => "INSIDE_UNIT_DISK",
        }
    }

    /// Strips `Request` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Request { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
