use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Zero,
    X,
    NegX,
    X2,
    Abs,
    Sin,
    /// `1 - cos x`
    OneMinusCos,
    /// `x e^x`
    XExp,
}

impl Builtin {
    fn eval(self, x: f64) -> f64 {
        match self {
            Builtin::Zero => 0.0,
            Builtin::X => x,
            Builtin::NegX => -x,
            Builtin::X2 => x * x,
            Builtin::Abs => x.abs(),
            Builtin::Sin => x.sin(),
            Builtin::OneMinusCos => 2.0 * (0.5 * x).sin().powi(2),
            Builtin::XExp => x * x.exp(),
        }
    }
}

/// How a target was specified. `Derived` targets come from arithmetic on
/// other targets and cannot be reconstructed from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetDesc {
    Builtin(Builtin),
    Constant(f64),
    /// Monomial coefficients `c_0, c_1, ...`.
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolation of sorted `(x, y)` samples, clamped
    /// outside the table.
    Table(Vec<(f64, f64)>),
    #[serde(skip_deserializing)]
    Derived(String),
}

/// A real function of one variable used as an approximation target.
#[derive(Clone)]
pub struct TargetFunction {
    desc: TargetDesc,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("TargetFunction").field(&self.desc).finish()
    }
}

impl Serialize for TargetFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.desc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TargetFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
            Desc(TargetDesc),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => TargetFunction::parse(&s),
            Raw::Number(c) => Ok(TargetFunction::constant(c)),
            Raw::Desc(desc) => TargetFunction::from_desc(desc),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl TargetFunction {
    pub fn builtin(b: Builtin) -> Self {
        TargetFunction {
            desc: TargetDesc::Builtin(b),
            f: Arc::new(move |x| b.eval(x)),
        }
    }

    pub fn zero() -> Self {
        Self::builtin(Builtin::Zero)
    }

    pub fn identity() -> Self {
        Self::builtin(Builtin::X)
    }

    pub fn constant(c: f64) -> Self {
        TargetFunction {
            desc: TargetDesc::Constant(c),
            f: Arc::new(move |_| c),
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let c = coeffs.clone();
        TargetFunction {
            desc: TargetDesc::Polynomial(coeffs),
            f: Arc::new(move |x| c.iter().rev().fold(0.0, |acc, &a| acc * x + a)),
        }
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() || points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidArgument(
                "table needs at least one point with strictly increasing x".into(),
            ));
        }
        let pts = points.clone();
        Ok(TargetFunction {
            desc: TargetDesc::Table(points),
            f: Arc::new(move |x| interpolate(&pts, x)),
        })
    }

    pub fn from_desc(desc: TargetDesc) -> Result<Self> {
        match desc {
            TargetDesc::Builtin(b) => Ok(Self::builtin(b)),
            TargetDesc::Constant(c) => Ok(Self::constant(c)),
            TargetDesc::Polynomial(c) => Ok(Self::polynomial(c)),
            TargetDesc::Table(t) => Self::table(t),
            TargetDesc::Derived(s) => Err(Error::InvalidArgument(format!(
                "derived target '{s}' cannot be rebuilt"
            ))),
        }
    }

    /// Short command-line syntax: `0`, `x`, `-x`, `x^2`, `abs`, `sin`,
    /// `1-cos`, `xexp`, `const:<c>`, `poly:<c0>,<c1>,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let b = match s {
            "0" | "zero" => Some(Builtin::Zero),
            "x" => Some(Builtin::X),
            "-x" => Some(Builtin::NegX),
            "x^2" | "x2" => Some(Builtin::X2),
            "abs" | "|x|" => Some(Builtin::Abs),
            "sin" => Some(Builtin::Sin),
            "1-cos" => Some(Builtin::OneMinusCos),
            "xexp" | "x*exp" => Some(Builtin::XExp),
            _ => None,
        };
        if let Some(b) = b {
            return Ok(Self::builtin(b));
        }
        let bad = || Error::InvalidArgument(format!("unrecognised target '{s}'"));
        if let Some(c) = s.strip_prefix("const:") {
            return Ok(Self::constant(c.trim().parse().map_err(|_| bad())?));
        }
        if let Some(list) = s.strip_prefix("poly:") {
            let coeffs = list
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            return Ok(Self::polynomial(coeffs));
        }
        Err(bad())
    }

    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(label: impl Into<String>, f: F) -> Self {
        TargetFunction {
            desc: TargetDesc::Derived(label.into()),
            f: Arc::new(f),
        }
    }

    pub fn desc(&self) -> &TargetDesc {
        &self.desc
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// `self - other`.
    pub fn sub(&self, other: &TargetFunction) -> TargetFunction {
        let (a, b) = (self.f.clone(), other.f.clone());
        TargetFunction::from_fn(format!("({:?}) - ({:?})", self.desc, other.desc), move |x| {
            a(x) - b(x)
        })
    }
}

fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    let first = pts[0];
    let last = pts[pts.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = pts.partition_point(|p| p.0 <= x);
    let (x0, y0) = pts[i - 1];
    let (x1, y1) = pts[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
