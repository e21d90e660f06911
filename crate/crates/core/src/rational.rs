//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

fn parse_digits(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::Malformed(whole.to_string()))
}

/// Accepts `n`, `p/q` and finite decimals such as `2.25`. Exponents are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = parse_digits(p, s)?;
        let q = parse_digits(q, s)?;
        if q.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        Rational::new(p, q)
    } else if let Some((whole, frac)) = body.split_once('.') {
        let whole_part = if whole.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(whole, s)?
        };
        let frac_part = parse_digits(frac, s)?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Rational::new(whole_part * &scale + frac_part, scale)
    } else {
        Rational::from_integer(parse_digits(body, s)?)
    };
    Ok(if negative { -value } else { value })
}

/// Canonical text: an integer when integral, otherwise `p/q` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_to_u64(r: &Rational) -> Option<u64> {
    if r.is_negative() {
        return None;
    }
    let q = r.numer().div_floor(r.denom());
    u64::try_from(q).ok()
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / a.gcd(&b) * b
}

/// Base-2 logarithm as f64, used only for reporting ratios.
pub fn lg(x: f64) -> f64 {
    x.log2()
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn recip(r: &Rational) -> Rational {
    if r.is_zero() {
        panic!("reciprocal of zero");
    }
    Rational::one() / r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("40").unwrap(), int(40));
        assert_eq!(parse_rational("7/6").unwrap(), ratio(7, 6));
        assert_eq!(parse_rational("14/12").unwrap(), ratio(7, 6));
        assert_eq!(parse_rational("2.25").unwrap(), ratio(9, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_floats_and_garbage() {
        for bad in ["1e3", "1.5e2", "inf", "nan", "", "1/", "/2", "1//2", "1.", "a/b"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(
            parse_rational("3/0"),
            Err(ParseRationalError::ZeroDenominator("3/0".into()))
        );
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&int(160)), "160");
        assert_eq!(format_rational(&ratio(14, 12)), "7/6");
        assert_eq!(format_rational(&ratio(-3, 6)), "-1/2");
    }

    #[test]
    fn floor_conversion() {
        assert_eq!(floor_to_u64(&ratio(160, 16)), Some(10));
        assert_eq!(floor_to_u64(&ratio(159, 16)), Some(9));
        assert_eq!(floor_to_u64(&ratio(-1, 2)), None);
    }
}
