//! Greedy block-wise construction of doubly universal coefficient sequences.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bernstein::{check_window, select_eta, ApproxOptions, TargetFunction, Window};
use crate::certificates::window_exclusion;
use crate::engine::{fit_window, verify_sup, BlockFit, Engine, BERNSTEIN_MAX_DEGREE, MINIMAX_COLUMNS};
use crate::error::{Error, Result, WitnessFailure};
use crate::series::{FormalSeries, LambdaSequence, Polynomial};

/// Targets `h1` for `S_{lambda_mu}` and `h2` for `S_mu` on `[-a, a]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximationRequest {
    pub h1: TargetFunction,
    pub h2: TargetFunction,
    #[serde(rename = "A", alias = "a", default = "one")]
    pub a: f64,
    pub epsilon: f64,
}

fn one() -> f64 {
    1.0
}

impl ApproximationRequest {
    pub fn new(h1: TargetFunction, h2: TargetFunction, a: f64, epsilon: f64) -> Result<Self> {
        let r = ApproximationRequest { h1, h2, a, epsilon };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !(self.a > 0.0) {
            return Err(Error::InvalidArgument("request needs epsilon > 0 and A > 0".into()));
        }
        for h in [&self.h1, &self.h2] {
            let v = h.eval(0.0);
            if !(v.abs() <= crate::bernstein::ORIGIN_TOL) {
                return Err(Error::TargetNotZeroAtOrigin(v));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessEntry {
    pub request_id: usize,
    pub mu: usize,
    pub lambda_mu: usize,
    pub err_at_mu: f64,
    pub err_at_lambda_mu: f64,
    /// `sup |block_2 - (h1 - h2)|`.
    pub block2_error: f64,
    pub engine_block1: Engine,
    pub engine_block2: Engine,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct WitnessLog {
    pub entries: Vec<WitnessEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptStatus {
    Accepted,
    /// `lambda_mu = mu` while the two targets differ.
    EmptyWindow,
    BernsteinPrecheck,
    CertifiedImpossible,
    ApproxNotReached,
}

/// One probed witness candidate; the sequence per request is its convergence curve.
#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub request_id: usize,
    pub mu: usize,
    pub lambda_mu: usize,
    pub block: u8,
    pub status: AttemptStatus,
    /// Achieved or lower-bounded error when known.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Largest witness index probed per request.
    pub horizon: u64,
    pub engine: Engine,
    /// Fit attempts per request before giving up.
    pub max_fit_attempts: usize,
    #[serde(skip)]
    pub approx: ApproxOptions,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            horizon: 10_000,
            engine: Engine::Auto,
            max_fit_attempts: 64,
            approx: ApproxOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    poly: Polynomial,
}

#[derive(Debug, Clone)]
pub struct BuildState {
    pub series: FormalSeries,
    pub log: WitnessLog,
    pub lambda: LambdaSequence,
    pub attempts: Vec<Attempt>,
    blocks: Arc<Vec<Block>>,
}

impl BuildState {
    pub fn new(lambda: LambdaSequence) -> Self {
        BuildState {
            series: FormalSeries::new(),
            log: WitnessLog::default(),
            lambda,
            attempts: Vec::new(),
            blocks: Arc::new(Vec::new()),
        }
    }

    /// Appends `block` and freezes the series through its degree.
    pub fn append_block(&mut self, block: &Polynomial) -> Result<()> {
        let end = block.degree().max(self.series.current_degree());
        self.append_through(block, end)
    }

    /// Appends `block` and freezes every index up to `end`.
    pub fn append_through(&mut self, block: &Polynomial, end: usize) -> Result<()> {
        self.series.append_block(block)?;
        self.series.reserve_through(end);
        if !block.is_zero() {
            Arc::make_mut(&mut self.blocks).push(Block { poly: block.clone() });
        }
        Ok(())
    }

    /// `S_n(x)` through the stable block forms. `n` must not split a block.
    pub fn eval_partial(&self, n: usize, x: f64) -> Result<f64> {
        eval_blocks(&self.blocks, n, x)
    }

    /// `S_n` as a target function (frozen snapshot).
    fn partial_target(&self, n: usize) -> TargetFunction {
        let blocks = self.blocks.clone();
        TargetFunction::from_fn(format!("S_{n}"), move |x| eval_blocks(&blocks, n, x).unwrap_or(f64::NAN))
    }
}

fn eval_blocks(blocks: &[Block], n: usize, x: f64) -> Result<f64> {
    let mut s = 0.0;
    for b in blocks {
        if b.poly.degree() <= n {
            s += b.poly.eval_stable(x);
        } else if b.poly.valuation() <= n {
            return Err(Error::InvalidArgument(format!(
                "index {n} falls inside a block spanning {}..={}",
                b.poly.valuation(),
                b.poly.degree()
            )));
        }
    }
    Ok(s)
}

/// Witness index with the two fitted blocks.
#[derive(Debug, Clone)]
pub struct WitnessPlan {
    pub mu: usize,
    pub lambda_mu: usize,
    pub block1: BlockFit,
    pub block2: BlockFit,
}

fn is_zero_target(h: &TargetFunction, a: f64) -> Result<bool> {
    Ok(verify_sup(a, |x| h.eval(x))? == 0.0)
}

fn zero_fit(w: Window) -> BlockFit {
    BlockFit {
        poly: Polynomial::zero(),
        window: w,
        error: 0.0,
        engine: Engine::Auto,
        stage_errors: Vec::new(),
        eta: None,
    }
}

/// Finds the smallest witness `mu` past the current degree whose two windows
/// `(deg+1, mu)` for `h2 - S_deg` and `(mu+1, lambda_mu)` for `h1 - h2` can be
/// fitted within `epsilon / 2` each.
pub fn plan_witness(
    state: &mut BuildState,
    request: &ApproximationRequest,
    request_id: usize,
    config: &BuildConfig,
) -> Result<WitnessPlan> {
    request.validate()?;
    let deg = state.series.current_degree();
    let (a, eps) = (request.a, request.epsilon);
    let g1 = request.h2.sub(&state.partial_target(deg));
    let g2 = request.h1.sub(&request.h2);
    let zero1 = is_zero_target(&g1, a)?;
    let zero2 = is_zero_target(&g2, a)?;
    let half = eps / 2.0;
    // eta depends only on the target, so it is computed once.
    let eta1 = if zero1 { a } else { select_eta(&g1, half, a, true)?.eta };
    let eta2 = if zero2 { a } else { select_eta(&g2, half, a, true)?.eta };

    let mut fits = 0usize;
    let mut any_fit = false;
    let mut any_precheck = false;
    let mut w1_saturated_failure = false;
    let no_witness = |reason| Error::NoFeasibleWitness {
        request: request_id,
        horizon: config.horizon as usize,
        reason,
    };
    let horizon = config.horizon as usize;
    if !zero2 {
        let mut identity = true;
        for n in deg + 1..=horizon {
            if state.lambda.get(n as u64)? as usize != n {
                identity = false;
                break;
            }
        }
        if identity {
            return Err(Error::LambdaIsIdentity(config.horizon));
        }
    }
    for mu in deg + 1..=horizon {
        let lam = state.lambda.get(mu as u64)? as usize;
        let w1 = Window { l: deg + 1, m: mu };
        let w2 = Window { l: mu + 1, m: lam };
        let record = |state: &mut BuildState, block, status, error| {
            state.attempts.push(Attempt {
                request_id,
                mu,
                lambda_mu: lam,
                block,
                status,
                error,
            })
        };
        if lam <= mu && !zero2 {
            record(state, 2, AttemptStatus::EmptyWindow, None);
            continue;
        }
        if config.engine == Engine::Bernstein {
            let ok1 = zero1 || check_window(w1, a, eta1).is_ok();
            let ok2 = zero2 || lam <= mu || check_window(w2, a, eta2).is_ok();
            if !(ok1 && ok2) {
                any_precheck = true;
                record(state, if ok1 { 2 } else { 1 }, AttemptStatus::BernsteinPrecheck, None);
                continue;
            }
        } else {
            if !zero2 && window_exclusion(&g2, w2.l, w2.m, a, 2.0 * eps)?.excluded {
                record(state, 2, AttemptStatus::CertifiedImpossible, None);
                continue;
            }
            if !zero1 && window_exclusion(&g1, w1.l, w1.m, a, eps)?.excluded {
                record(state, 1, AttemptStatus::CertifiedImpossible, None);
                continue;
            }
            if w1_saturated_failure {
                let bernstein_possible =
                    config.engine == Engine::Auto && mu <= BERNSTEIN_MAX_DEGREE && check_window(w1, a, eta1).is_ok();
                if !bernstein_possible {
                    if mu > BERNSTEIN_MAX_DEGREE || config.engine == Engine::Minimax {
                        return Err(no_witness(WitnessFailure::BeyondCapacity));
                    }
                    continue;
                }
            }
            if fits >= config.max_fit_attempts {
                return Err(no_witness(WitnessFailure::BeyondCapacity));
            }
        }

        any_fit = true;
        fits += 1;
        let block2 = if zero2 || lam <= mu {
            Ok(zero_fit(w2))
        } else {
            fit_window(&g2, w2, a, half, config.engine, &config.approx)
        };
        let block2 = match block2 {
            Ok(b) => b,
            Err(e) => {
                let achieved = achieved(&e)?;
                if config.engine == Engine::Bernstein {
                    return Err(e);
                }
                record(state, 2, AttemptStatus::ApproxNotReached, achieved);
                continue;
            }
        };
        let block1 = if zero1 {
            Ok(zero_fit(w1))
        } else {
            fit_window(&g1, w1, a, half, config.engine, &config.approx)
        };
        let block1 = match block1 {
            Ok(b) => b,
            Err(e) => {
                let achieved = achieved(&e)?;
                if config.engine == Engine::Bernstein {
                    return Err(e);
                }
                record(state, 1, AttemptStatus::ApproxNotReached, achieved);
                // Minimax columns are capped, so past saturation only a
                // Bernstein fit can still change the outcome.
                if mu - deg >= 2 * MINIMAX_COLUMNS {
                    w1_saturated_failure = true;
                }
                continue;
            }
        };
        record(state, 0, AttemptStatus::Accepted, Some(block1.error.max(block2.error)));
        return Ok(WitnessPlan {
            mu,
            lambda_mu: lam,
            block1,
            block2,
        });
    }
    let reason = if any_fit {
        WitnessFailure::ApproxNotReached
    } else if any_precheck {
        WitnessFailure::BernsteinPrecheck
    } else {
        WitnessFailure::CertifiedImpossible
    };
    Err(no_witness(reason))
}

/// Approximation failures are recoverable by a later witness; anything
/// else aborts the search.
fn achieved(e: &Error) -> Result<Option<f64>> {
    match e {
        Error::ApproxNotReached { achieved, .. } => Ok(Some(*achieved)),
        Error::InfeasibleWindow { .. } | Error::CoefficientOverflow(_) | Error::DegreeCapExceeded { .. } => Ok(None),
        other => Err(Error::InvalidArgument(other.to_string())),
    }
}

/// Result of a build.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub series: FormalSeries,
    pub log: WitnessLog,
    pub attempts: Vec<Attempt>,
    state: BuildState,
}

impl BuildOutput {
    /// `S_n(x)` through the stable block forms.
    pub fn eval_partial(&self, n: usize, x: f64) -> Result<f64> {
        self.state.eval_partial(n, x)
    }

    /// Re-measures `(sup |S_mu - h2|, sup |S_lambda_mu - h1|)` for a log entry.
    pub fn remeasure(&self, entry: &WitnessEntry, request: &ApproximationRequest) -> Result<(f64, f64)> {
        measure(&self.state, entry.mu, entry.lambda_mu, request)
    }
}

fn measure(state: &BuildState, mu: usize, lam: usize, req: &ApproximationRequest) -> Result<(f64, f64)> {
    let e1 = verify_sup(req.a, |x| state.eval_partial(mu, x).unwrap_or(f64::NAN) - req.h2.eval(x))?;
    let e2 = verify_sup(req.a, |x| state.eval_partial(lam, x).unwrap_or(f64::NAN) - req.h1.eval(x))?;
    Ok((e1, e2))
}

/// Processes `requests` in order, appending two blocks per request.
pub fn build_double_universal(
    requests: &[ApproximationRequest],
    lambda: LambdaSequence,
    config: &BuildConfig,
) -> Result<BuildOutput> {
    let mut state = BuildState::new(lambda);
    for (id, req) in requests.iter().enumerate() {
        let wrap = |e: Error| match e {
            Error::NoFeasibleWitness { .. } => e,
            e => Error::Request {
                request: id,
                source: Box::new(e),
            },
        };
        let plan = plan_witness(&mut state, req, id, config).map_err(wrap)?;
        state.append_through(&plan.block1.poly, plan.mu).map_err(wrap)?;
        state
            .append_through(&plan.block2.poly, plan.lambda_mu.max(plan.mu))
            .map_err(wrap)?;
        let (err_mu, err_lam) = measure(&state, plan.mu, plan.lambda_mu.max(plan.mu), req).map_err(wrap)?;
        for err in [err_mu, err_lam] {
            if !(err < req.epsilon) {
                return Err(wrap(Error::ApproxNotReached {
                    achieved: err,
                    tolerance: req.epsilon,
                    degree: plan.lambda_mu,
                }));
            }
        }
        state.log.entries.push(WitnessEntry {
            request_id: id,
            mu: plan.mu,
            lambda_mu: plan.lambda_mu,
            err_at_mu: err_mu,
            err_at_lambda_mu: err_lam,
            block2_error: plan.block2.error,
            engine_block1: plan.block1.engine,
            engine_block2: plan.block2.engine,
        });
    }
    Ok(BuildOutput {
        series: state.series.clone(),
        log: state.log.clone(),
        attempts: state.attempts.clone(),
        state,
    })
}

/// Single universality: each request approximates one target `h` at one
/// witness (`h1 = h2 = h`, `lambda` the identity).
pub fn single_universal_mode(
    targets: &[(TargetFunction, f64, f64)],
    config: &BuildConfig,
) -> Result<BuildOutput> {
    let requests: Vec<ApproximationRequest> = targets
        .iter()
        .map(|(h, a, eps)| ApproximationRequest::new(h.clone(), h.clone(), *a, *eps))
        .collect::<Result<_>>()?;
    build_double_universal(&requests, LambdaSequence::power(1), config)
}
