//! Seeded invariant suite with optional fault injection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::fuzz::{aron_beauzamy_suite, cauchy_suite, turan_suite_with, FuzzSummary};
use crate::cesaro::{cesaro_mean, density, IndexSet};
use crate::error::Result;
use crate::series::{BernsteinForm, FormalSeries, LnBinomial};

/// Deliberate defects used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Middle binomial coefficient scaled by 1.5.
    CorruptBinomial,
    /// Turán constant scaled down to `C_delta / 50`.
    TuranConstant,
}

impl std::str::FromStr for Fault {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrupt-binomial" | "corrupt_binomial" => Ok(Fault::CorruptBinomial),
            "turan-constant" | "turan_constant" => Ok(Fault::TuranConstant),
            other => Err(crate::Error::InvalidArgument(format!("unknown fault '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SelftestConfig {
    pub seed: u64,
    pub cases: usize,
    pub fault: Option<Fault>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 20240611,
            cases: 1000,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub fault: Option<Fault>,
    pub suites: Vec<FuzzSummary>,
    pub failed_suites: Vec<&'static str>,
    pub passed: bool,
}

pub fn selftest(config: &SelftestConfig) -> Result<SelftestReport> {
    let (seed, cases) = (config.seed, config.cases);
    let turan_scale = if config.fault == Some(Fault::TuranConstant) { 0.02 } else { 1.0 };
    let mut suites = vec![
        turan_suite_with(seed, cases, turan_scale)?,
        aron_beauzamy_suite(seed, cases)?,
        cauchy_suite(seed, cases.min(200))?,
        bernstein_identities(seed, cases.min(200), config.fault == Some(Fault::CorruptBinomial)),
        cesaro_identity(seed, cases.min(100)),
        density_identities(seed, cases.min(100))?,
    ];
    suites.retain(|s| s.cases > 0);
    let failed_suites: Vec<&'static str> = suites.iter().filter(|s| s.failures > 0).map(|s| s.suite).collect();
    Ok(SelftestReport {
        seed,
        fault: config.fault,
        passed: failed_suites.is_empty(),
        failed_suites,
        suites,
    })
}

/// Partition of unity and linear reproduction of Bernstein forms of random
/// degree, evaluated at random points. `worst_ratio` is the largest error in
/// units of `1e-12`.
pub fn bernstein_identities(seed: u64, cases: usize, corrupt: bool) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB3);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let m = rng.gen_range(2..=80usize);
        let a = rng.gen_range(0.5..3.0);
        let x = rng.gen_range(0.0..a);
        let mut binom = LnBinomial::new(m);
        if corrupt {
            binom.corrupt(m / 2, 1.5);
        }
        let ones = BernsteinForm::new(0.0, a, vec![1.0; m + 1]).with_binomials(binom.clone());
        let line = BernsteinForm::new(0.0, a, (0..=m).map(|k| a * k as f64 / m as f64).collect()).with_binomials(binom);
        let err = (ones.eval(x) - 1.0).abs().max((line.eval(x) - x).abs());
        let ratio = err / 1e-12;
        worst = worst.max(ratio);
        if ratio > 1.0 {
            failures += 1;
        }
    }
    FuzzSummary {
        suite: "bernstein_identities",
        seed,
        cases,
        failures,
        worst_ratio: worst,
    }
}

/// Coefficient formula against direct averaging of partial sums.
pub fn cesaro_identity(seed: u64, cases: usize) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xCE);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let n = rng.gen_range(0..=200usize);
        let f = FormalSeries::from_coeffs((0..=n + 5).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let sigma = cesaro_mean(&f, n);
        for j in 0..=n {
            // sum_{i=j}^n a_j / (n+1), accumulated the direct way
            let direct: f64 = (j..=n).map(|_| f.coeff(j)).sum::<f64>() / (n + 1) as f64;
            let err = (sigma.coeff(j) - direct).abs();
            let ratio = err / 1e-12;
            worst = worst.max(ratio);
            if ratio > 1.0 {
                failures += 1;
            }
        }
    }
    FuzzSummary {
        suite: "cesaro_identity",
        seed,
        cases,
        failures,
        worst_ratio: worst,
    }
}

/// Complement identity and range of the density estimates on random sets.
pub fn density_identities(seed: u64, cases: usize) -> Result<FuzzSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xDE);
    let mut failures = 0;
    for _ in 0..cases {
        let horizon = rng.gen_range(10..=2000u64);
        let p = rng.gen_range(0.0..1.0);
        let set = IndexSet::from_sorted((1..=horizon).filter(|_| rng.gen_bool(p)).collect());
        let comp = set.complement(horizon);
        let ladder = [horizon / 4 + 1, horizon / 2 + 2, horizon];
        let d = density(&set, &ladder)?;
        let ok = set.count_upto(horizon) + comp.count_upto(horizon) == horizon
            && set.intersection(&comp).is_empty()
            && 0.0 <= d.lower_est
            && d.lower_est <= d.upper_est
            && d.upper_est <= 1.0;
        if !ok {
            failures += 1;
        }
    }
    Ok(FuzzSummary {
        suite: "density_identities",
        seed,
        cases,
        failures,
        worst_ratio: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64, fault: Option<Fault>) -> SelftestReport {
        selftest(&SelftestConfig { seed, cases: 100, fault }).unwrap()
    }

    #[test]
    fn default_passes() {
        let r = small(7, None);
        assert!(r.passed, "{:?}", r.suites);
        assert_eq!(r.suites.len(), 6);
    }

    #[test]
    fn verdict_is_seed_independent() {
        assert!(small(1, None).passed && small(99, None).passed);
    }

    #[test]
    fn faults_are_detected() {
        let r = small(7, Some(Fault::CorruptBinomial));
        assert_eq!(r.failed_suites, vec!["bernstein_identities"]);
        let r = small(7, Some(Fault::TuranConstant));
        assert_eq!(r.failed_suites, vec!["turan"]);
    }
}
