//! Doubly universal numerical series in the sequence space with the product metric.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::LambdaSequence;

/// Enumeration of the rationals by height `|p| + q`, `r_0 = 0`, then for each
/// height `p/q` and `-p/q` in lowest terms with increasing `q`.
#[derive(Debug, Clone, Default)]
pub struct RationalEnumeration {
    height: i64,
    q: i64,
    negative: bool,
    started: bool,
}

impl RationalEnumeration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nth_rational(j: usize) -> BigRational {
        Self::new().nth(j).expect("enumeration is infinite")
    }
}

impl Iterator for RationalEnumeration {
    type Item = BigRational;

    fn next(&mut self) -> Option<BigRational> {
        if !self.started {
            self.started = true;
            self.height = 2;
            self.q = 0;
            return Some(BigRational::zero());
        }
        loop {
            if self.negative {
                self.negative = false;
                let p = self.height - self.q;
                return Some(BigRational::new(BigInt::from(-p), BigInt::from(self.q)));
            }
            self.q += 1;
            if self.q >= self.height {
                self.height += 1;
                self.q = 0;
                continue;
            }
            let p = self.height - self.q;
            if p.gcd(&self.q) == 1 {
                self.negative = true;
                return Some(BigRational::new(BigInt::from(p), BigInt::from(self.q)));
            }
        }
    }
}

/// Scalars usable as sequence terms: `f64` or exact rationals.
pub trait Term: Clone + Debug + PartialEq + Signed + ToPrimitive {
    fn from_rational(r: &BigRational) -> Self;
}

impl Term for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Term for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Finite prefix `(u_0, ..., u_M)`; later terms are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePoint<T> {
    pub terms: Vec<T>,
}

impl<T: Term> SequencePoint<T> {
    pub fn zero() -> Self {
        SequencePoint { terms: Vec::new() }
    }

    pub fn new(terms: Vec<T>) -> Self {
        SequencePoint { terms }
    }

    pub fn term(&self, k: usize) -> T {
        self.terms.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// `sum_{k<=n} u_k`, accumulated left to right.
    pub fn partial_sum(&self, n: usize) -> T {
        self.terms
            .iter()
            .take(n + 1)
            .fold(T::zero(), |s, t| s + t.clone())
    }
}

/// `[low, low + 2^-M]` enclosing the product-metric distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricInterval {
    pub low: f64,
    pub high: f64,
}

/// `d(u, v) = sum_n 2^-n m_n / (1 + m_n)`, `m_n = max_{j<=n} |u_j - v_j|`,
/// summed for `n <= m` with the tail bounded by `2^-m`.
pub fn product_metric<T: Term>(u: &SequencePoint<T>, v: &SequencePoint<T>, m: usize) -> MetricInterval {
    let mut running = 0.0f64;
    let mut low = 0.0;
    let mut weight = 1.0;
    for n in 0..=m {
        let d = (u.term(n) - v.term(n)).abs().to_f64().unwrap_or(f64::INFINITY);
        running = running.max(d);
        if running > 0.0 {
            let frac = if running.is_infinite() { 1.0 } else { running / (1.0 + running) };
            low += weight * frac;
        }
        weight *= 0.5;
    }
    MetricInterval {
        low,
        high: low + 2f64.powi(-(m as i32)),
    }
}

/// Which prefix sum the value `a_n` compensates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumConvention {
    /// `a_n = r2 - sum_{k<n} b_k`, so that `S_n = r2`.
    #[default]
    Corrected,
    /// `a_n = r2 - sum_{k<=n} b_k`, giving `S_n = r2 - b_n`.
    PaperLiteral,
}

#[derive(Debug, Clone, Serialize)]
pub struct Hit {
    pub n: usize,
    pub lambda_n: usize,
    /// Upper end of the product-metric enclosure of `d(a, b)`.
    pub distance: f64,
}

/// Smallest `n >= min_n` with `2^(1-n) < epsilon` and `lambda_n > n`.
fn choose_index(lambda: &LambdaSequence, min_n: usize, epsilon: f64, limit: usize) -> Result<(usize, usize)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let mut n = min_n.max(1);
    while 2f64.powi(1 - n as i32) >= epsilon {
        n += 1;
    }
    let start = n;
    while n <= limit {
        let l = lambda.get(n as u64)? as usize;
        if l > n {
            return Ok((n, l));
        }
        n += 1;
    }
    Err(Error::LambdaIsIdentity(start.max(limit) as u64))
}

/// Largest index probed for `lambda_n > n`.
pub const INDEX_SEARCH_LIMIT: usize = 1 << 20;

/// Modifies `b` from index `n` on so that `S_n = r2` and `S_{lambda_n} = r1`.
pub fn hit_e_set<T: Term>(
    b: &SequencePoint<T>,
    lambda: &LambdaSequence,
    r1: &BigRational,
    r2: &BigRational,
    epsilon: f64,
    min_n: usize,
    convention: SumConvention,
) -> Result<(SequencePoint<T>, Hit)> {
    let (n, l) = choose_index(lambda, min_n, epsilon, INDEX_SEARCH_LIMIT)?;
    let mut terms: Vec<T> = (0..n).map(|k| b.term(k)).collect();
    let upto = match convention {
        SumConvention::Corrected => n.checked_sub(1),
        SumConvention::PaperLiteral => Some(n),
    };
    let prefix = match upto {
        Some(m) => {
            let mut s = T::zero();
            for k in 0..=m {
                s = s + b.term(k);
            }
            s
        }
        None => T::zero(),
    };
    let (r1, r2) = (T::from_rational(r1), T::from_rational(r2));
    terms.push(r2.clone() - prefix);
    terms.resize(l, T::zero());
    terms.push(r1 - r2);
    let a = SequencePoint { terms };
    let distance = product_metric(&a, b, l + 64).high;
    Ok((a, Hit { n, lambda_n: l, distance }))
}

fn de_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Float(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(i) => Ok(BigRational::from_integer(BigInt::from(i))),
        Raw::Float(f) => BigRational::from_float(f).ok_or_else(|| serde::de::Error::custom("non-finite rational")),
        Raw::Str(s) => parse_rational(&s).map_err(serde::de::Error::custom),
    }
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Parses `p`, `p/q` or a decimal literal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r);
    }
    s.parse::<f64>()
        .ok()
        .and_then(BigRational::from_float)
        .ok_or_else(|| Error::InvalidArgument(format!("not a rational: '{s}'")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    #[serde(deserialize_with = "de_rational", serialize_with = "ser_rational")]
    pub r1: BigRational,
    #[serde(deserialize_with = "de_rational", serialize_with = "ser_rational")]
    pub r2: BigRational,
    /// Optional precision: the stage radius is at most `1 / s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
}

impl ScheduleEntry {
    pub fn new(r1: BigRational, r2: BigRational) -> Self {
        ScheduleEntry { r1, r2, s: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceWitness {
    pub stage: usize,
    pub n: usize,
    pub lambda_n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub r1: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub r2: BigRational,
    pub epsilon: f64,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct DiagonalSequence<T> {
    pub point: SequencePoint<T>,
    pub witnesses: Vec<SequenceWitness>,
}

/// Applies the schedule stage by stage with radius `2^-j` (stage `j` from 1),
/// each stage starting past the previous `lambda_n`.
pub fn diagonal_universal_sequence<T: Term>(
    lambda: &LambdaSequence,
    schedule: &[ScheduleEntry],
    max_stages: usize,
    convention: SumConvention,
) -> Result<DiagonalSequence<T>> {
    let mut point = SequencePoint::zero();
    let mut witnesses = Vec::new();
    let mut min_n = 1;
    for (j, entry) in schedule.iter().take(max_stages).enumerate() {
        let stage = j + 1;
        let mut epsilon = 2f64.powi(-(stage as i32));
        if let Some(s) = entry.s.filter(|&s| s > 0) {
            epsilon = epsilon.min(1.0 / s as f64);
        }
        let (next, hit) = hit_e_set(&point, lambda, &entry.r1, &entry.r2, epsilon, min_n, convention)?;
        point = next;
        min_n = hit.lambda_n + 1;
        witnesses.push(SequenceWitness {
            stage,
            n: hit.n,
            lambda_n: hit.lambda_n,
            r1: entry.r1.clone(),
            r2: entry.r2.clone(),
            epsilon,
            distance: hit.distance,
        });
    }
    Ok(DiagonalSequence { point, witnesses })
}

/// Largest deviation of the witness partial sums from their targets, in
/// units of the last place of the largest partial sum magnitude involved.
pub fn witness_ulps(seq: &DiagonalSequence<f64>) -> f64 {
    let mut worst = 0.0f64;
    for w in &seq.witnesses {
        for (idx, r) in [(w.n, &w.r2), (w.lambda_n, &w.r1)] {
            let mut s = 0.0f64;
            let mut scale = 0.0f64;
            for k in 0..=idx {
                s += seq.point.term(k);
                scale = scale.max(s.abs());
            }
            let target = r.to_f64().unwrap_or(f64::NAN);
            let ulp = f64::EPSILON * scale.max(target.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max((s - target).abs() / ulp);
        }
    }
    worst
}
