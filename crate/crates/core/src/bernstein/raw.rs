use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::TargetFunction;
use crate::error::{Error, Result};
use crate::series::{BernsteinForm, CompensatedSum, Factored, LnBinomial, Polynomial};

/// Largest degree converted to monomials in floating point.
pub const FLOAT_DEGREE_CAP: usize = 120;

/// How Bernstein weights are converted to monomial coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    /// Log-space binomials with compensated sums. Refuses degrees above
    /// [`FLOAT_DEGREE_CAP`].
    #[default]
    Float,
    /// Exact forward differences of the (dyadic) samples, rounded once.
    Rational,
    /// `Float` up to the cap, `Rational` above it.
    Auto,
}

impl ArithmeticMode {
    fn resolve(self, m: usize) -> Result<ArithmeticMode> {
        match self {
            ArithmeticMode::Float if m > FLOAT_DEGREE_CAP => Err(Error::DegreeCapExceeded {
                degree: m,
                cap: FLOAT_DEGREE_CAP,
            }),
            ArithmeticMode::Auto if m > FLOAT_DEGREE_CAP => Ok(ArithmeticMode::Rational),
            ArithmeticMode::Auto => Ok(ArithmeticMode::Float),
            other => Ok(other),
        }
    }
}

/// Samples `h(a k / m)` for `k = 0..=m`.
pub fn bernstein_samples(h: &TargetFunction, m: usize, a: f64) -> Vec<f64> {
    (0..=m).map(|k| h.eval(a * k as f64 / m as f64)).collect()
}

/// The degree-`m` Bernstein polynomial of `h` on `[0, a]`.
///
/// Coefficient `k` is `C(m,k) Δ^k b_0 / a^k`, so it is exactly zero whenever
/// the samples `b_0..=b_k` all vanish. The returned polynomial carries the
/// Bernstein weights as its stable evaluation path.
pub fn bernstein_raw(h: &TargetFunction, m: usize, a: f64, mode: ArithmeticMode) -> Result<Polynomial> {
    if m == 0 || !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bernstein_raw needs m >= 1 and a > 0 (got m = {m}, a = {a})"
        )));
    }
    let samples = bernstein_samples(h, m, a);
    if let Some(k) = samples.iter().position(|b| !b.is_finite()) {
        return Err(Error::InvalidArgument(format!("target is not finite at sample {k}")));
    }
    let coeffs = bernstein_to_monomial(&samples, a, mode)?;
    let form = BernsteinForm::new(0.0, a, samples);
    Ok(Polynomial::from_coeffs(coeffs).with_factored(Factored::Bernstein(form)))
}

/// Converts Bernstein weights on `[0, a]` into monomial coefficients.
pub fn bernstein_to_monomial(samples: &[f64], a: f64, mode: ArithmeticMode) -> Result<Vec<f64>> {
    let m = samples.len().saturating_sub(1);
    let coeffs = match mode.resolve(m)? {
        ArithmeticMode::Rational => exact_coefficients(samples, a),
        _ => float_coefficients(samples, a),
    };
    if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::CoefficientOverflow(k));
    }
    Ok(coeffs)
}

fn float_coefficients(samples: &[f64], a: f64) -> Vec<f64> {
    let m = samples.len() - 1;
    let outer = LnBinomial::new(m);
    let ln_a = a.ln();
    (0..=m)
        .map(|k| {
            if samples[..=k].iter().all(|&b| b == 0.0) {
                return 0.0;
            }
            let inner = LnBinomial::new(k);
            let mut diff = CompensatedSum::default();
            for (j, &b) in samples[..=k].iter().enumerate() {
                if b != 0.0 {
                    let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                    diff.add(sign * b * inner.get(j).exp());
                }
            }
            diff.value() * (outer.get(k) - k as f64 * ln_a).exp()
        })
        .collect()
}

/// `x` as `(mantissa, exponent)` with `x = mantissa * 2^exponent`.
fn dyadic(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    (BigInt::from(sign) * BigInt::from(mant), e)
}

fn pow2(e: u32) -> BigInt {
    BigInt::from(1u8) << e
}

fn exact_coefficients(samples: &[f64], a: f64) -> Vec<f64> {
    let m = samples.len() - 1;
    let parts: Vec<(BigInt, i32)> = samples.iter().map(|&b| dyadic(b)).collect();
    let e_min = parts
        .iter()
        .filter(|(n, _)| !n.is_zero())
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    // Integer numerators over the common denominator 2^-e_min.
    let mut row: Vec<BigInt> = parts
        .into_iter()
        .map(|(n, e)| n << ((e - e_min) as u32))
        .collect();
    let (a_num, a_exp) = dyadic(a);
    let mut binom = BigInt::from(1u8);
    let mut out = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k > 0 {
            for j in 0..=(m - k) {
                row[j] = &row[j + 1] - &row[j];
            }
            binom = binom * BigInt::from(m - k + 1) / BigInt::from(k);
        }
        let d = &row[0];
        if d.is_zero() {
            out.push(0.0);
            continue;
        }
        // c_k = binom * d * 2^e_min / (a_num * 2^a_exp)^k
        let mut num = &binom * d;
        let mut den = num_traits::pow(a_num.clone(), k);
        let shift = e_min as i64 - a_exp as i64 * k as i64;
        if shift >= 0 {
            num <<= shift as u32;
        } else {
            den *= pow2((-shift) as u32);
        }
        let c = BigRational::new_raw(num, den).to_f64().unwrap_or(f64::NAN);
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::Builtin;

    #[test]
    fn identity_is_reproduced() {
        let h = TargetFunction::identity();
        for mode in [ArithmeticMode::Float, ArithmeticMode::Rational] {
            let p = bernstein_raw(&h, 2, 1.0, mode).unwrap();
            assert_eq!(p.coeffs(), &[0.0, 1.0]);
            assert_eq!(p.valuation(), 1);
        }
    }

    #[test]
    fn square_picks_up_variance_term() {
        // x^2 + x(1-x)/2 = x/2 + x^2/2
        let h = TargetFunction::builtin(Builtin::X2);
        for mode in [ArithmeticMode::Float, ArithmeticMode::Rational] {
            let p = bernstein_raw(&h, 2, 1.0, mode).unwrap();
            assert_eq!(p.coeffs(), &[0.0, 0.5, 0.5]);
        }
    }

    #[test]
    fn float_cap_enforced() {
        let h = TargetFunction::identity();
        let err = bernstein_raw(&h, 400, 1.0, ArithmeticMode::Float).unwrap_err();
        assert_eq!(err.code(), "DEGREE_CAP_EXCEEDED");
        assert!(bernstein_raw(&h, 400, 1.0, ArithmeticMode::Auto).is_ok());
    }

    #[test]
    fn leading_zero_samples_give_exact_zero_coefficients() {
        let h = TargetFunction::from_fn("ramp", |x| (x - 0.3).max(0.0));
        for mode in [ArithmeticMode::Float, ArithmeticMode::Rational] {
            let p = bernstein_raw(&h, 30, 1.0, mode).unwrap();
            // samples k/30 <= 0.3 for k <= 9
            assert!(p.coeffs()[..=9].iter().all(|&c| c == 0.0));
            assert!(p.valuation() >= 10);
        }
    }

    #[test]
    fn modes_agree_on_moderate_degree() {
        let h = TargetFunction::builtin(Builtin::Sin);
        let f = bernstein_raw(&h, 24, 2.0, ArithmeticMode::Float).unwrap();
        let r = bernstein_raw(&h, 24, 2.0, ArithmeticMode::Rational).unwrap();
        for x in [0.0, 0.3, 1.1, 2.0] {
            // Float conversion loses digits to cancellation in the forward differences.
            assert!((f.eval(x) - r.eval_stable(x)).abs() < 1e-4);
            assert!((r.eval(x) - r.eval_stable(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn dyadic_roundtrip() {
        for x in [1.0, -0.375, 1e-310, std::f64::consts::PI, 1e300] {
            let (n, e) = dyadic(x);
            let v = BigRational::new_raw(n, BigInt::from(1u8)).to_f64().unwrap() * 2f64.powi(e.max(-1000));
            if e >= -1000 {
                assert_eq!(v, x);
            }
        }
    }
}
