//! Exact rational numbers and the few helpers the rest of the crate needs.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use num_rational::BigRational as Rational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// `(-1)^k` for a signed exponent.
pub fn sign_pow(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`; whitespace around the parts is ignored.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Canonical text form: `p/q` with `q > 0` and `gcd(p, q) = 1`, or `p` when `q = 1`.
pub fn format(value: &Rational) -> String {
    // `Ratio` keeps itself reduced with a positive denominator.
    value.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_are_canonical() {
        assert_eq!(parse("6/-4"), Some(frac(-3, 2)));
        assert_eq!(format(&parse(" 10 / 4 ").unwrap()), "5/2");
        assert_eq!(format(&parse("-7").unwrap()), "-7");
        assert_eq!(format(&parse("0/9").unwrap()), "0");
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn factorials_and_signs() {
        assert_eq!(factorial(0), one());
        assert_eq!(factorial(5), int(120));
        assert_eq!(sign_pow(-1), int(-1));
        assert_eq!(sign_pow(-2), one());
    }
}
