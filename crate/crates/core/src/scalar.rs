//! Scalar fields the Weil machinery is generic over.
//!
//! Two base modes exist: exact rationals ([`Rational`]) and binary floats
//! (`f64`). [`crate::number::WeilNumber`] itself implements [`Scalar`], which is
//! how nested evaluation (numbers whose coefficients are numbers) is built.
//! Mixing modes is impossible without an explicit conversion because the mode
//! is part of the type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::number::NumError;

/// Arbitrary-precision rational number, the base field `k`.
pub type Rational = num::BigRational;

/// Runtime tag for the two base scalar modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Rational => f.write_str("rational"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

impl std::str::FromStr for ScalarMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" | "exact" => Ok(ScalarMode::Rational),
            "float" | "f64" => Ok(ScalarMode::Float),
            other => Err(format!("unknown scalar mode `{other}`")),
        }
    }
}

/// Transcendental functions a scalar type must evaluate at its own values.
///
/// Everything else (derivatives, powers, reciprocals) is derived from these and
/// ring arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transcendental {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Tanh,
    Atan,
    Sqrt,
}

impl Transcendental {
    pub fn name(self) -> &'static str {
        match self {
            Transcendental::Exp => "exp",
            Transcendental::Log => "log",
            Transcendental::Sin => "sin",
            Transcendental::Cos => "cos",
            Transcendental::Tan => "tan",
            Transcendental::Tanh => "tanh",
            Transcendental::Atan => "atan",
            Transcendental::Sqrt => "sqrt",
        }
    }

    pub fn eval_f64(self, x: f64) -> Result<f64, NumError> {
        let value = match self {
            Transcendental::Exp => x.exp(),
            Transcendental::Log => {
                if x <= 0.0 {
                    return Err(NumError::Domain {
                        primitive: "log",
                        detail: format!("argument {x} is not positive"),
                    });
                }
                x.ln()
            }
            Transcendental::Sin => x.sin(),
            Transcendental::Cos => x.cos(),
            Transcendental::Tan => x.tan(),
            Transcendental::Tanh => x.tanh(),
            Transcendental::Atan => x.atan(),
            Transcendental::Sqrt => {
                if x < 0.0 {
                    return Err(NumError::Domain {
                        primitive: "sqrt",
                        detail: format!("argument {x} is negative"),
                    });
                }
                x.sqrt()
            }
        };
        Ok(value)
    }
}

/// A commutative ring with enough structure to run truncated Taylor
/// arithmetic over it.
///
/// `Ctx` carries whatever is needed to manufacture constants of the type: unit
/// for the base modes, the algebra (and inner context) for Weil numbers.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Clone + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;

    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;

    fn zero_in(ctx: &Self::Ctx) -> Self {
        Self::from_rational(ctx, &Rational::zero())
    }

    fn one_in(ctx: &Self::Ctx) -> Self {
        Self::from_rational(ctx, &Rational::one())
    }

    fn is_null(&self) -> bool;

    fn mul_rational(&self, q: &Rational) -> Self {
        self.clone() * Self::from_rational(&self.ctx(), q)
    }

    /// Multiplicative inverse, `None` when the value is not a unit.
    fn try_recip(&self) -> Option<Self>;

    fn eval_transcendental(&self, f: Transcendental) -> Result<Self, NumError>;

    /// Appends every base-field coefficient as an `f64` (used for error norms).
    fn flatten_f64(&self, out: &mut Vec<f64>);

    fn mode() -> ScalarMode;
}

impl Scalar for f64 {
    type Ctx = ();

    fn ctx(&self) {}

    fn from_rational(_: &(), q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn zero_in(_: &()) -> Self {
        0.0
    }

    fn one_in(_: &()) -> Self {
        1.0
    }

    fn is_null(&self) -> bool {
        *self == 0.0
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        if q.is_one() {
            *self
        } else {
            self * rational_to_f64(q)
        }
    }

    fn try_recip(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn eval_transcendental(&self, f: Transcendental) -> Result<Self, NumError> {
        f.eval_f64(*self)
    }

    fn flatten_f64(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }

    fn mode() -> ScalarMode {
        ScalarMode::Float
    }
}

impl Scalar for Rational {
    type Ctx = ();

    fn ctx(&self) {}

    fn from_rational(_: &(), q: &Rational) -> Self {
        q.clone()
    }

    fn is_null(&self) -> bool {
        Zero::is_zero(self)
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        self * q
    }

    fn try_recip(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn eval_transcendental(&self, f: Transcendental) -> Result<Self, NumError> {
        Err(NumError::UnsupportedInRationalMode(f.name()))
    }

    fn flatten_f64(&self, out: &mut Vec<f64>) {
        out.push(rational_to_f64(self));
    }

    fn mode() -> ScalarMode {
        ScalarMode::Rational
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `1 / n!` as an exact rational.
pub fn inv_factorial(n: usize) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rational::new(BigInt::one(), f)
}

/// Exact conversion of a finite `f64` into a rational.
pub fn f64_to_rational(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `p`, `p/q` or a decimal literal (optionally with exponent) exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if Zero::is_zero(&d) {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Normwise relative error `max|a-b| / max|b|`, with zero reference handled as
/// an absolute error.
pub fn normwise_rel_error(actual: &[f64], reference: &[f64]) -> f64 {
    let diff = actual
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let scale = reference.iter().map(|b| b.abs()).fold(0.0_f64, f64::max);
    if actual.len() != reference.len() || diff.is_nan() {
        return f64::INFINITY;
    }
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals_exactly() {
        assert_eq!(parse_rational("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("0.3"), Some(ratio(3, 10)));
        assert_eq!(parse_rational("-1.25e2"), Some(int(-125)));
        assert_eq!(parse_rational("1e-3"), Some(ratio(1, 1000)));
        assert_eq!(parse_rational("2/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn rational_mode_rejects_transcendentals() {
        let err = int(1).eval_transcendental(Transcendental::Exp).unwrap_err();
        assert!(matches!(err, NumError::UnsupportedInRationalMode("exp")));
    }

    #[test]
    fn inverse_factorials() {
        assert_eq!(inv_factorial(0), int(1));
        assert_eq!(inv_factorial(5), ratio(1, 120));
    }

    #[test]
    fn relative_error_norm() {
        assert_eq!(normwise_rel_error(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert!((normwise_rel_error(&[1.0, 2.1], &[1.0, 2.0]) - 0.05).abs() < 1e-12);
        assert_eq!(normwise_rel_error(&[1e-3], &[0.0]), 1e-3);
    }
}
