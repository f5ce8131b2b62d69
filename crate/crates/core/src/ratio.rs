//! Exact rational helpers shared by every module.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every weight and probability.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Parses `p/q` (or a bare integer `p`). The fraction must already be in
/// lowest terms with a positive denominator.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let invalid = || Error::InvalidRational(text.to_string());
    let trimmed = text.trim();
    if trimmed != text || trimmed.is_empty() {
        return Err(invalid());
    }
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d),
        None => (trimmed, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| invalid())?;
    let denom: BigInt = denom.parse().map_err(|_| invalid())?;
    if !denom.is_positive() || !numer.gcd(&denom).is_one() {
        return Err(invalid());
    }
    Ok(Rational::new_raw(numer, denom))
}

/// Formats as `p/q`, always with an explicit denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigUint {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
        .to_biguint()
        .expect("denominators are positive")
}

/// Numerators of `values` over the common denominator `denom`.
pub fn scaled_numerators(values: &[Rational], denom: &BigUint) -> Vec<BigUint> {
    let denom = BigInt::from_biguint(Sign::Plus, denom.clone());
    values
        .iter()
        .map(|v| {
            let scaled = v * Rational::from_integer(denom.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer().to_biguint().expect("weights are non-negative")
        })
        .collect()
}

/// Total variation `½ Σ |p_i − q_i|` between two aligned weight vectors.
pub fn total_variation_aligned(left: &[Rational], right: &[Rational]) -> Rational {
    debug_assert_eq!(left.len(), right.len());
    let total = left
        .iter()
        .zip(right)
        .fold(Rational::zero(), |acc, (a, b)| acc + (a - b).abs());
    total / rational(2, 1)
}

/// Parses a non-negative parameter written as `p/q`, an integer or a
/// decimal such as `0.05`, exactly.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let invalid = || Error::InvalidRational(text.to_string());
    let value = match text.split_once('.') {
        Some((int, frac)) => {
            let digits = format!("{int}{frac}");
            if int.is_empty() || frac.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(invalid());
            }
            let numer: BigInt = digits.parse().map_err(|_| invalid())?;
            Rational::new(numer, BigInt::from(10u32).pow(frac.len() as u32))
        }
        None => {
            let (n, d) = text.split_once('/').unwrap_or((text, "1"));
            let numer: BigInt = n.parse().map_err(|_| invalid())?;
            let denom: BigInt = d.parse().map_err(|_| invalid())?;
            if denom.is_zero() {
                return Err(invalid());
            }
            Rational::new(numer, denom)
        }
    };
    if value.is_negative() {
        return Err(invalid());
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_reduced_fractions() {
        assert_eq!(parse_rational("2/3").unwrap(), rational(2, 3));
        assert_eq!(parse_rational("1").unwrap(), rational(1, 1));
        assert_eq!(parse_rational("0/1").unwrap(), rational(0, 1));
    }

    #[test]
    fn parse_rejects_unreduced_and_malformed() {
        for bad in ["2/4", "1/0", "1/-2", "-1/-2", " 1/2", "a/b", "", "1/2/3", "0/5"] {
            assert!(parse_rational(bad).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn format_round_trips() {
        let r = rational(-7, 12);
        assert_eq!(format_rational(&r), "-7/12");
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        assert_eq!(format_rational(&rational(1, 1)), "1/1");
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.05").unwrap(), rational(1, 20));
        assert_eq!(parse_decimal("1/100").unwrap(), rational(1, 100));
        assert_eq!(parse_decimal("2/4").unwrap(), rational(1, 2));
        assert_eq!(parse_decimal("3").unwrap(), rational(3, 1));
        for bad in ["-0.1", ".5", "1.", "1/0", "x", "1.2.3", "-1/2"] {
            assert!(parse_decimal(bad).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn common_denominator_is_lcm() {
        let values = [rational(1, 4), rational(1, 6), rational(7, 12)];
        let d = common_denominator(&values);
        assert_eq!(d, BigUint::from(12u32));
        let nums = scaled_numerators(&values, &d);
        assert_eq!(
            nums,
            vec![3u32, 2, 7].into_iter().map(BigUint::from).collect::<Vec<_>>()
        );
    }
}
