use std::fs;
use std::path::Path;

use duos_core::bernstein::{constrained_approx_positive, ApproxOptions, ArithmeticMode, TargetFunction, Window};
use duos_core::builder::{build_double_universal, ApproximationRequest, BuildConfig};
use duos_core::certificates::fuzz::{aron_beauzamy_suite, cauchy_suite, turan_suite};
use duos_core::certificates::{
    impossibility_margin_complex, impossibility_margin_real, minimax_double_fit, GridTarget, MinimaxProblem,
};
use duos_core::cesaro::frequent_cesaro_report;
use duos_core::engine::{fit_window, Engine};
use duos_core::minimax::DEFAULT_POLYGON_ORDER;
use duos_core::selftest::{selftest, Fault, SelftestConfig};
use duos_core::sequence::{diagonal_universal_sequence, witness_ulps, ScheduleEntry, SumConvention};
use duos_core::series::{CompactGrid, FormalSeries, LambdaSequence, Polynomial, Spacing};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::output::{num, Meta, Sink};
use crate::{
    ApproxArgs, BuildArgs, CertifyArgs, CesaroArgs, Cli, Command, EngineArg, ModeArg, PairArg, SelftestArgs, SeqArgs,
    SuiteArgs,
};

#[derive(Debug)]
pub struct CliError {
    code: String,
    message: String,
    flag: Option<&'static str>,
}

impl CliError {
    fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: "USAGE".into(),
            message: message.into(),
            flag: Some(flag),
        }
    }

    fn domain(code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.into(),
            message: message.into(),
            flag: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.flag.is_some() {
            2
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        let mut e = json!({ "code": self.code, "message": self.message });
        if let Some(f) = self.flag {
            e["flag"] = json!(format!("--{f}"));
        }
        json!({ "error": e })
    }
}

impl From<duos_core::Error> for CliError {
    fn from(e: duos_core::Error) -> Self {
        CliError::domain(e.code(), e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::domain("IO_ERROR", e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected a range like 4..12, got '{s}'");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn parse_ladder(s: &str) -> Result<Vec<u64>, String> {
    let v: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected comma-separated integers, got '{s}'"))?;
    if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err("ladder must be positive and strictly increasing".into());
    }
    Ok(v)
}

pub fn run(cli: &Cli) -> CliResult<Value> {
    let meta = Meta::new(cli, cli.seed);
    let mut sink = Sink::new(&cli.out_dir, meta)?;
    let (name, body) = match &cli.command {
        Command::Approx(a) => ("approx", approx(a, &mut sink)?),
        Command::Build(a) => ("build", build(a, &mut sink)?),
        Command::Certify(a) => ("certify", certify(a, &mut sink)?),
        Command::Cesaro(a) => ("cesaro", cesaro(a, &mut sink)?),
        Command::Seq(a) => ("seq", seq(a, &mut sink)?),
        Command::TuranTest(a) => ("turan-test", turan_test(a, cli.seed, &mut sink)?),
        Command::Selftest(a) => ("selftest", run_selftest(a, cli.seed, &mut sink)?),
    };
    let files: Vec<String> = sink.written().iter().map(|p| p.display().to_string()).collect();
    Ok(json!({ "command": name, "meta": sink.meta(), "files": files, "result": body }))
}

fn engine(e: EngineArg) -> Engine {
    match e {
        EngineArg::Bernstein => Engine::Bernstein,
        EngineArg::Minimax => Engine::Minimax,
        EngineArg::Auto => Engine::Auto,
    }
}

fn target(flag: &'static str, s: &str) -> CliResult<TargetFunction> {
    TargetFunction::parse(s).map_err(|e| CliError::usage(flag, e.to_string()))
}

fn lambda(flag: &'static str, s: &str) -> CliResult<LambdaSequence> {
    let path = Path::new(s);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let values: Vec<u64> = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(_) => text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::usage(flag, format!("table file {s} holds non-integers")))?,
        };
        return Ok(LambdaSequence::table(values)?);
    }
    LambdaSequence::parse(s).map_err(|e| CliError::usage(flag, e.to_string()))
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::domain("BAD_INPUT", format!("{}: {e}", path.display())))
}

fn coefficient_rows(p: &Polynomial) -> Vec<[String; 2]> {
    p.coeffs()
        .iter()
        .enumerate()
        .skip(p.valuation())
        .map(|(k, &c)| [k.to_string(), num(c)])
        .collect()
}

fn approx(a: &ApproxArgs, sink: &mut Sink) -> CliResult<Value> {
    let h = target("target", &a.target)?;
    let w = Window::new(a.l, a.m).map_err(|e| CliError::usage("l", e.to_string()))?;
    let opts = ApproxOptions {
        mode: match a.mode {
            ModeArg::Float => ArithmeticMode::Float,
            ModeArg::Rational => ArithmeticMode::Rational,
            ModeArg::Auto => ArithmeticMode::Auto,
        },
        ..Default::default()
    };
    let body = if a.positive {
        let r = constrained_approx_positive(&h, w, a.a, a.epsilon, &opts)?;
        json!({
            "target": h,
            "A": a.a,
            "window": r.window,
            "engine": "bernstein",
            "eta": r.eta,
            "stage_errors": r.stage_errors,
            "total_error": r.total_error,
            "polynomial": r.poly,
        })
    } else {
        let fit = fit_window(&h, w, a.a, a.epsilon, engine(a.engine), &opts)?;
        json!({
            "target": h,
            "A": a.a,
            "window": fit.window,
            "engine": fit.engine,
            "eta": fit.eta,
            "stage_errors": fit.stage_errors,
            "total_error": fit.error,
            "polynomial": fit.poly,
        })
    };
    sink.json("approx.json", &body)?;
    let poly: Polynomial = serde_json::from_value(body["polynomial"].clone()).expect("round trip");
    sink.csv("approx.csv", &["k", "coefficient"], coefficient_rows(&poly))?;
    Ok(json!({ "total_error": body["total_error"], "engine": body["engine"], "degree": poly.degree() }))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScheduleFile {
    List(Vec<ApproximationRequest>),
    Full {
        #[serde(default)]
        lambda: Option<String>,
        requests: Vec<ApproximationRequest>,
    },
}

fn build(a: &BuildArgs, sink: &mut Sink) -> CliResult<Value> {
    let raw = read_json(&a.schedule)?;
    let file: ScheduleFile =
        serde_json::from_value(raw).map_err(|e| CliError::domain("BAD_INPUT", format!("schedule: {e}")))?;
    let (file_lambda, requests) = match file {
        ScheduleFile::List(r) => (None, r),
        ScheduleFile::Full { lambda, requests } => (lambda, requests),
    };
    let spec = a.lambda.clone().or(file_lambda).unwrap_or_else(|| "n^2".into());
    let lam = lambda("lambda", &spec)?;
    let config = BuildConfig {
        horizon: a.horizon,
        engine: engine(a.engine),
        max_fit_attempts: a.max_fit_attempts,
        ..Default::default()
    };
    let out = build_double_universal(&requests, lam, &config)?;
    let series = Polynomial::from_coeffs(out.series.coeffs().to_vec());
    sink.json(
        "build.json",
        &json!({
            "lambda": spec,
            "horizon": a.horizon,
            "requests": requests,
            "witnesses": out.log.entries,
            "series": series,
        }),
    )?;
    sink.csv("coefficients.csv", &["k", "coefficient"], coefficient_rows(&series))?;
    sink.csv(
        "witness_log.csv",
        &["request_id", "mu", "lambda_mu", "err1", "err2"],
        out.log.entries.iter().map(|e| {
            [
                e.request_id.to_string(),
                e.mu.to_string(),
                e.lambda_mu.to_string(),
                num(e.err_at_mu),
                num(e.err_at_lambda_mu),
            ]
        }),
    )?;
    sink.csv(
        "convergence.csv",
        &["request_id", "mu", "lambda_mu", "block", "status", "error"],
        out.attempts.iter().map(|t| {
            [
                t.request_id.to_string(),
                t.mu.to_string(),
                t.lambda_mu.to_string(),
                t.block.to_string(),
                serde_json::to_value(t.status).expect("status").as_str().unwrap_or("").to_string(),
                t.error.map(num).unwrap_or_default(),
            ]
        }),
    )?;
    let w: Vec<(usize, usize)> = out.log.entries.iter().map(|e| (e.mu, e.lambda_mu)).collect();
    Ok(json!({ "witnesses": w, "degree": series.degree() }))
}

fn certify(a: &CertifyArgs, sink: &mut Sink) -> CliResult<Value> {
    let (lo, hi) = a.mu;
    let mut rows = Vec::new();
    let (margin, floor, grid, g1, g2, extra) = match a.pair {
        PairArg::ZeroX => {
            let b = impossibility_margin_real(a.d)?;
            let grid = CompactGrid::interval_with(-1.0, 1.0, a.points, Spacing::Chebyshev)?;
            (
                b.margin,
                b.margin,
                grid,
                GridTarget::Function(TargetFunction::zero()),
                GridTarget::Function(TargetFunction::identity()),
                json!({ "constant": b.c }),
            )
        }
        PairArg::ZeroOne => {
            let k = CompactGrid::circle(a.circle_radius, a.points)?;
            let c = impossibility_margin_complex(a.d, &k, a.delta)?;
            let floor = c.bound.margin * (std::f64::consts::PI / DEFAULT_POLYGON_ORDER as f64).cos();
            (
                c.bound.margin,
                floor,
                c.augmented.clone(),
                GridTarget::Constant(Complex64::new(0.0, 0.0)),
                GridTarget::Constant(Complex64::new(1.0, 0.0)),
                json!({ "R": c.big_r, "c_delta": c.c_delta, "tail_mu_from": c.tail_mu_from }),
            )
        }
    };
    for mu in lo..=hi {
        let lam = ((a.d * mu as f64).floor() as usize).max(mu + 1);
        let fit = minimax_double_fit(&MinimaxProblem::new(mu, lam, g1.clone(), g2.clone(), grid.clone()))?;
        rows.push((mu, lam, fit.lp_value, fit.measured, fit.lp_value >= floor));
    }
    sink.csv(
        "certify.csv",
        &["mu", "lambda_mu", "lp_opt", "analytic_margin", "pass"],
        rows.iter()
            .map(|r| [r.0.to_string(), r.1.to_string(), num(r.2), num(margin), r.4.to_string()]),
    )?;
    let all = rows.iter().all(|r| r.4);
    let body = json!({
        "d": a.d,
        "pair": a.pair,
        "analytic_margin": margin,
        "pass_floor": floor,
        "certificate": extra,
        "rows": rows.iter().map(|r| json!({"mu": r.0, "lambda_mu": r.1, "lp_opt": r.2, "measured": r.3, "pass": r.4})).collect::<Vec<_>>(),
        "all_pass": all,
    });
    sink.json("certify.json", &body)?;
    Ok(json!({ "all_pass": all, "rows": rows.len() }))
}

fn grid(s: &str) -> CliResult<CompactGrid> {
    let bad = || CliError::usage("grid", format!("expected interval:lo,hi,n or circle:r,n, got '{s}'"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let vals: Vec<f64> = rest
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match (kind, vals.as_slice()) {
        ("interval", [lo, hi, n]) => Ok(CompactGrid::interval(*lo, *hi, *n as usize)?),
        ("circle", [r, n]) => Ok(CompactGrid::circle(*r, *n as usize)?),
        _ => Err(bad()),
    }
}

fn load_series(path: &Path) -> CliResult<FormalSeries> {
    let v = read_json(path)?;
    let arr = match &v {
        Value::Array(_) => Some(&v),
        Value::Object(o) => o
            .get("coeffs")
            .or_else(|| o.get("series").and_then(|s| s.get("coeffs"))),
        _ => None,
    };
    let coeffs: Vec<f64> = arr
        .and_then(|a| serde_json::from_value(a.clone()).ok())
        .ok_or_else(|| CliError::domain("BAD_INPUT", format!("{}: no coefficient array", path.display())))?;
    Ok(FormalSeries::from_coeffs(coeffs))
}

fn cesaro(a: &CesaroArgs, sink: &mut Sink) -> CliResult<Value> {
    let f = load_series(&a.series)?;
    let k = grid(&a.grid)?;
    let specs = if a.targets.is_empty() {
        vec!["const:0".to_string(), "const:1".to_string()]
    } else {
        a.targets.clone()
    };
    let targets: Vec<TargetFunction> = specs.iter().map(|s| target("target", s)).collect::<CliResult<_>>()?;
    let ladder = parse_ladder(&a.ladder).map_err(|e| CliError::usage("ladder", e))?;
    let report = frequent_cesaro_report(&f, &targets, &k, a.epsilon, &ladder)?;
    let mut rows = Vec::new();
    for (i, t) in report.targets.iter().enumerate() {
        for (n, &e) in t.errors.iter().enumerate().skip(1) {
            rows.push([
                n.to_string(),
                specs[i].clone(),
                num(e),
                t.success.contains(n as u64).to_string(),
            ]);
        }
    }
    sink.csv("cesaro_series.csv", &["n", "target", "sup_error", "in_set"], rows)?;
    sink.json("cesaro_density.json", &report)?;
    Ok(json!({
        "densities": report.targets.iter().map(|t| json!({"lower": t.density.lower_est, "upper": t.density.upper_est})).collect::<Vec<_>>(),
        "exclusion_holds": report.exclusion_holds,
        "complement_identity": report.complement_identity,
    }))
}

fn seq(a: &SeqArgs, sink: &mut Sink) -> CliResult<Value> {
    let lam = lambda("lambda", &a.lambda)?;
    let raw = read_json(&a.schedule)?;
    let schedule: Vec<ScheduleEntry> =
        serde_json::from_value(raw).map_err(|e| CliError::domain("BAD_INPUT", format!("schedule: {e}")))?;
    let convention = if a.paper_literal {
        SumConvention::PaperLiteral
    } else {
        SumConvention::Corrected
    };
    let body = if a.mode == "rational" {
        let s = diagonal_universal_sequence::<BigRational>(&lam, &schedule, a.max_stages, convention)?;
        let exact = s
            .witnesses
            .iter()
            .all(|w| s.point.partial_sum(w.n) == w.r2 && s.point.partial_sum(w.lambda_n) == w.r1);
        json!({
            "mode": "rational",
            "convention": convention,
            "terms": s.point.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "witnesses": s.witnesses,
            "exact": exact,
        })
    } else {
        let s = diagonal_universal_sequence::<f64>(&lam, &schedule, a.max_stages, convention)?;
        json!({
            "mode": "float",
            "convention": convention,
            "terms": s.point.terms,
            "witnesses": s.witnesses,
            "max_ulps": witness_ulps(&s),
        })
    };
    sink.json("seq.json", &body)?;
    Ok(json!({ "stages": body["witnesses"].as_array().map(|w| w.len()), "exact": body.get("exact") }))
}

fn turan_test(a: &SuiteArgs, seed: u64, sink: &mut Sink) -> CliResult<Value> {
    let suites = vec![
        turan_suite(seed, a.cases)?,
        aron_beauzamy_suite(seed, a.cases)?,
        cauchy_suite(seed, a.cases)?,
    ];
    let failures: usize = suites.iter().map(|s| s.failures).sum();
    sink.json("turan_test.json", &json!({ "suites": suites, "failures": failures }))?;
    if failures > 0 {
        return Err(CliError::domain("INEQUALITY_FAILED", format!("{failures} failing cases")));
    }
    Ok(json!({ "failures": 0, "cases": a.cases }))
}

fn run_selftest(a: &SelftestArgs, seed: u64, sink: &mut Sink) -> CliResult<Value> {
    let fault = match &a.fault {
        Some(f) => Some(f.parse::<Fault>().map_err(|e| CliError::usage("fault", e.to_string()))?),
        None => None,
    };
    let report = selftest(&SelftestConfig {
        seed,
        cases: a.cases,
        fault,
    })?;
    sink.json("selftest.json", &report)?;
    if !report.passed {
        return Err(CliError::domain(
            "SELFTEST_FAILED",
            format!("failing suites: {}", report.failed_suites.join(", ")),
        ));
    }
    Ok(json!({ "passed": true, "suites": report.suites.len() }))
}
