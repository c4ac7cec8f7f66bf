//! Numeric backends.
//!
//! Every rank, equality and level-set decision in a computation goes through
//! one [`Scalar`] implementation: [`Rational`] decides exactly, `f64` decides
//! with the fixed tolerances below.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Rational = BigRational;

/// Rank threshold for the float backend.
pub const RANK_TOL: f64 = 1e-9;
/// Gap threshold used when grouping float values into level sets.
pub const LEVEL_TOL: f64 = 1e-7;
/// Allowed deviation of a float probability vector from total mass 1.
pub const MASS_TOL: f64 = 1e-12;

/// Field operations plus the decision procedures a backend must supply.
///
/// Arithmetic is by reference so the rational backend does not clone on
/// every operation.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + PartialOrd + Send + Sync + 'static {
    /// True when every decision is exact.
    const EXACT: bool;
    /// Backend name used in reports.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn divide(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;

    /// `self += a * b`
    fn add_prod(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }

    /// Zero for rank purposes.
    fn is_zero(&self) -> bool;

    /// Strictly positive beyond the rank threshold.
    fn is_positive(&self) -> bool;

    /// Equality for rank and identity checks.
    fn approx_eq(&self, other: &Self) -> bool {
        self.minus(other).is_zero()
    }

    /// Equality for level-set grouping (coarser than [`Scalar::approx_eq`]
    /// in float mode).
    fn level_eq(&self, other: &Self) -> bool;

    /// Square root when representable; `None` in exact mode.
    fn sqrt(&self) -> Option<Self>;

    /// Parses `"p/q"`, an integer, or a decimal literal.
    fn parse_value(text: &str) -> Result<Self>;

    /// Rescales a vector whose span is all that matters. The exact backend
    /// makes it a primitive integer vector to keep coefficients small.
    fn rescale(_v: &mut [Self]) {}
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn divide(&self, other: &Self) -> Self {
        self / other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn add_prod(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        *self += a * b;
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn level_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn sqrt(&self) -> Option<Self> {
        None
    }
    fn parse_value(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse(format!("not a rational number: {text:?}"));
        if let Some((n, d)) = text.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if Zero::is_zero(&d) {
                return Err(bad());
            }
            return Ok(BigRational::new(n, d));
        }
        if let Ok(n) = BigInt::from_str(text) {
            return Ok(BigRational::from_integer(n));
        }
        // Decimal literal: read digits exactly rather than through f64.
        let (sign, body) = match text.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, text),
        };
        let (int, frac) = body.split_once('.').ok_or_else(bad)?;
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        Ok(BigRational::new(num * sign, den))
    }
    fn rescale(v: &mut [Self]) {
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for x in v.iter() {
            if !Zero::is_zero(x) {
                den = den.lcm(x.denom());
                num = num.gcd(x.numer());
            }
        }
        if num.is_zero() || (den.is_one() && num.is_one()) {
            return;
        }
        let factor = BigRational::new(den, num);
        for x in v.iter_mut() {
            *x = &*x * &factor;
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn divide(&self, other: &Self) -> Self {
        self / other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn add_prod(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn is_zero(&self) -> bool {
        self.abs() < RANK_TOL
    }
    fn is_positive(&self) -> bool {
        *self >= RANK_TOL
    }
    fn level_eq(&self, other: &Self) -> bool {
        (self - other).abs() < LEVEL_TOL
    }
    fn sqrt(&self) -> Option<Self> {
        Some(f64::sqrt(*self))
    }
    fn parse_value(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::Parse(text.into()))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::Parse(text.into()))?;
            return Ok(n / d);
        }
        text.parse()
            .map_err(|_| Error::Parse(format!("not a number: {text:?}")))
    }
}

/// Backend selector used by front ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Rational,
    Float,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" | "exact" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown numeric mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        })
    }
}
