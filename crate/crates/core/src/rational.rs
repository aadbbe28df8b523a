//! Exact scalars. Probabilities are arbitrary-precision rationals kept in
//! lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `num/den` from machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"n/d"` or `"n"`. Rejects zero denominators and surrounding junk.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    text.parse::<Rational>().ok()
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn is_zero_or_one(value: &Rational) -> bool {
    value.is_zero() || value.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("2/4"), Some(ratio(1, 2)));
        assert_eq!(parse("3"), Some(ratio(3, 1)));
        assert_eq!(parse(" 0 "), Some(zero()));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("a/b"), None);
        assert_eq!(parse(""), None);
        assert_eq!(format(&ratio(6, 8)), "3/4");
        assert_eq!(format(&ratio(4, 2)), "2");
        assert_eq!(format(&zero()), "0");
    }
}
