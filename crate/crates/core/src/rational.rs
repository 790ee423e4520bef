//! Exact rational helpers: parsing user input and rendering for reports.
//!
//! Accepted input forms are integers (`3`, `-2`), fractions (`5/6`, `-1/3`)
//! and terminating decimals (`0.5`, `-1.25`, `.75`). Rendering produces the
//! lowest-terms fraction and a decimal with 15 significant digits.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as a rational: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

fn parse_err(input: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        input: input.to_string(),
        reason,
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses an integer, `p/q` fraction or terminating decimal into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(parse_err(input, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim()).ok_or_else(|| parse_err(input, "bad numerator"))?;
        let den = parse_int(den.trim()).ok_or_else(|| parse_err(input, "bad denominator"))?;
        if den.is_zero() {
            return Err(parse_err(input, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(parse_err(input, "no digits"));
        }
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(whole) || !all_digits(frac) {
            return Err(parse_err(input, "bad decimal"));
        }
        let digits = format!("{whole}{frac}");
        let mantissa: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits
                .parse()
                .map_err(|_| parse_err(input, "bad decimal"))?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_int(s)
        .map(Rational::from_integer)
        .ok_or_else(|| parse_err(input, "not a number"))
}

/// Renders `p/q` in lowest terms; integers render without a denominator.
pub fn to_fraction_string(value: &Rational) -> String {
    value.to_string()
}

/// Renders a decimal with 15 significant digits, trailing zeros trimmed.
pub fn to_decimal_string(value: &Rational) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let v = value.to_f64().unwrap_or(f64::NAN);
    if !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if !(-6..=15).contains(&exponent) {
        return format!("{:.14e}", v);
    }
    let decimals = (14 - exponent).max(0) as usize;
    let mut text = format!("{:.*}", decimals, v);
    if text.contains('.') {
        while text.ends_with('0') {
            text.pop();
        }
        if text.ends_with('.') {
            text.pop();
        }
    }
    if text == "-0" {
        text = "0".to_string();
    }
    text
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn is_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}

pub fn is_interior(value: &Rational) -> bool {
    value.is_positive() && *value < Rational::one()
}

pub fn from_ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Exact value paired with its decimal rendering, as emitted in JSON reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: String,
}

impl From<&Rational> for ExactValue {
    fn from(value: &Rational) -> Self {
        ExactValue {
            exact: to_fraction_string(value),
            decimal: to_decimal_string(value),
        }
    }
}

impl ExactValue {
    pub fn value(&self) -> Result<Rational, ParseRationalError> {
        parse_rational(&self.exact)
    }
}

/// Parses a comma separated list of rationals, e.g. `0,5/6,1`.
pub fn parse_rational_list(input: &str) -> Result<Vec<Rational>, ParseRationalError> {
    if input.trim().is_empty() {
        return Err(parse_err(input, "empty list"));
    }
    input.split(',').map(parse_rational).collect()
}
