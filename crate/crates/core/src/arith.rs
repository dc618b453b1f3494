//! Probability values and the scalar types inference runs over.
//!
//! Rules store [`Probability`] values exactly as they were written: decimal
//! and fraction literals become exact rationals, values computed from float
//! tables stay floats. Inference is generic over [`Scalar`], with `f64` for
//! oracle comparisons and [`BigRational`] when exact answers are wanted.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid probability literal `{0}`")]
pub struct ProbabilityParseError(pub String);

/// A probability as stored in a rule.
#[derive(Debug, Clone)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn exact(numer: i64, denom: i64) -> Self {
        Probability::Exact(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => rational_to_f64(r),
            Probability::Float(f) => *f,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Probability::Exact(r) => r.is_zero(),
            Probability::Float(f) => *f == 0.0,
        }
    }

    /// True when the value lies in `[0, 1]`.
    pub fn in_unit_interval(&self) -> bool {
        match self {
            Probability::Exact(r) => !r.is_negative() && *r <= BigRational::one(),
            Probability::Float(f) => (0.0..=1.0).contains(f),
        }
    }
}

impl PartialEq for Probability {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Probability::Exact(a), Probability::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{}", render_rational(r)),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Probability {
    type Err = ProbabilityParseError;

    /// Accepts `p/q`, decimals such as `0.75` or `.5`, and integers. All of
    /// them are exact.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s)
            .map(Probability::Exact)
            .ok_or_else(|| ProbabilityParseError(s.to_string()))
    }
}

/// Parses a fraction, decimal or integer literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = BigRational::new(numer, denom);
    Some(if negative { -r } else { r })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// `p/q` in lowest terms, or just `p` when the denominator is one.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Arithmetic used by the inference engine and the oracle.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether values are exact rationals.
    const EXACT: bool;

    fn from_probability(p: &Probability) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Human-readable form: `27/34` for rationals, shortest round-trip
    /// decimal for floats.
    fn render(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_probability(p: &Probability) -> Self {
        p.to_f64()
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_probability(p: &Probability) -> Self {
        match p {
            Probability::Exact(r) => r.clone(),
            Probability::Float(f) => BigRational::from_float(*f).unwrap_or_else(BigRational::zero),
        }
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn render(&self) -> String {
        render_rational(self)
    }
}
