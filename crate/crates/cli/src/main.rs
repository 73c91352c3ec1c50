mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "duos", version, about = "Doubly universal series toolkit")]
struct Cli {
    /// Directory for artifacts.
    #[arg(long, global = true, env = "DUOS_OUT_DIR", default_value = "duos-out")]
    #[serde(skip)]
    out_dir: PathBuf,
    /// Seed for randomized suites; recorded in every artifact.
    #[arg(long, global = true, default_value_t = 20240611)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Approximate a target by a polynomial supported on a window.
    Approx(ApproxArgs),
    /// Build a doubly universal coefficient sequence from a request schedule.
    Build(BuildArgs),
    /// Minimax LP certificates for lambda_mu = floor(d mu).
    Certify(CertifyArgs),
    /// Cesàro success sets and density estimates of a series.
    Cesaro(CesaroArgs),
    /// Doubly universal numerical series in the sequence space.
    Seq(SeqArgs),
    /// Randomized Turán, Aron-Beauzamy and Cauchy suites.
    TuranTest(SuiteArgs),
    /// Full invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum EngineArg {
    Bernstein,
    Minimax,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModeArg {
    Float,
    Rational,
    Auto,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

#[derive(Debug, Args, Serialize)]
struct ApproxArgs {
    /// Target: 0, x, -x, x^2, abs, sin, 1-cos, xexp, const:c or poly:c0,c1,...
    #[arg(long)]
    target: String,
    /// Half-width of the interval [-A, A].
    #[arg(short = 'A', long = "radius", default_value_t = 1.0, value_parser = positive)]
    a: f64,
    #[arg(long, value_parser = positive)]
    epsilon: f64,
    /// Lowest allowed monomial index.
    #[arg(short, long)]
    l: usize,
    /// Highest allowed monomial index.
    #[arg(short, long)]
    m: usize,
    #[arg(long, value_enum, default_value = "auto")]
    engine: EngineArg,
    /// Arithmetic for Bernstein coefficient conversion.
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Approximate on [0, A] only (one-sided lemma).
    #[arg(long)]
    positive: bool,
}

#[derive(Debug, Args, Serialize)]
struct BuildArgs {
    /// JSON schedule: a list of requests or {"lambda": .., "requests": [..]}.
    #[arg(long)]
    schedule: PathBuf,
    /// Lambda expression (n^2, 2*n, n*ceil(log2(n+1))) or a table file.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, value_enum, default_value = "auto")]
    engine: EngineArg,
    #[arg(long, default_value_t = 64)]
    max_fit_attempts: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PairArg {
    /// (g1, g2) = (0, x) on [-1, 1].
    ZeroX,
    /// (g1, g2) = (0, 1) on a circle plus the Turán arc.
    ZeroOne,
}

#[derive(Debug, Args, Serialize)]
struct CertifyArgs {
    #[arg(long, default_value_t = 2.0, value_parser = positive)]
    d: f64,
    /// Range such as 4..12 (inclusive) or a single value.
    #[arg(long, default_value = "4..12", value_parser = commands::parse_range)]
    mu: (usize, usize),
    #[arg(long, value_enum, default_value = "zero-x")]
    pair: PairArg,
    /// Grid points on [-1, 1] or on the circle.
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// Circle radius for the complex pair.
    #[arg(long, default_value_t = 1.5, value_parser = positive)]
    circle_radius: f64,
    /// Arc opening for the complex pair.
    #[arg(long, default_value_t = std::f64::consts::PI, value_parser = positive)]
    delta: f64,
}

#[derive(Debug, Args, Serialize)]
struct CesaroArgs {
    /// JSON coefficients: an array, {"coeffs": [..]}, or a build.json.
    #[arg(long)]
    series: PathBuf,
    /// Target (repeatable); defaults to const:0 and const:1.
    #[arg(long = "target")]
    targets: Vec<String>,
    #[arg(long, value_parser = positive)]
    epsilon: f64,
    /// Comma-separated increasing horizons.
    #[arg(long, default_value = "500,1000,2000")]
    ladder: String,
    /// interval:lo,hi,n or circle:r,n
    #[arg(long, default_value = "interval:2,3,65")]
    grid: String,
}

#[derive(Debug, Args, Serialize)]
struct SeqArgs {
    #[arg(long, default_value = "n^2")]
    lambda: String,
    /// JSON list of {"r1": .., "r2": .., "s": ..}.
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, default_value_t = 64)]
    max_stages: usize,
    #[arg(long, value_parser = ["float", "rational"], default_value = "rational")]
    mode: String,
    /// Use the printed sum through index n for a_n.
    #[arg(long)]
    paper_literal: bool,
}

#[derive(Debug, Args, Serialize)]
struct SuiteArgs {
    #[arg(long, default_value_t = 1000)]
    cases: usize,
}

#[derive(Debug, Args, Serialize)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Negative control: corrupt-binomial or turan-constant.
    #[arg(long)]
    fault: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).expect("error serializes"));
            ExitCode::from(e.exit_code())
        }
    }
}
