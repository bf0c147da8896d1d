//! Helpers for the exact rational type used throughout the solvers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GameError, Result};
use crate::Rational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_u64(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Renders as `"num/den"`, always with an explicit denominator.
pub fn to_fraction_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_fraction(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parse_int = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|e| GameError::Parse(format!("bad rational {text:?}: {e}")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(GameError::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(text)?)),
    }
}

/// Decimal rendering for display only.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales every value by `den` and returns the integer numerators.
/// `den` must be a multiple of every denominator.
pub fn scaled_numerators(values: &[Rational], den: &BigInt) -> Vec<BigInt> {
    values
        .iter()
        .map(|v| {
            let scaled = v * Rational::from_integer(den.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect()
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}
