//! Exact rational helpers built on `num`'s big rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"num/den"` or a plain integer. Decimal points are refused.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected an integer or num/den, got {s:?}"));
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(bad());
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Always renders as `num/den`, with `den > 0` in lowest terms.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down so the quotient stays representable
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Binomial with a possibly negative or large upper index, `binom(n, k)` for `k >= 0`.
pub fn binomial_big(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i));
    }
    acc / factorial(k)
}

pub fn multinomial(parts: &[usize]) -> BigInt {
    let n: usize = parts.iter().sum();
    parts.iter().fold(factorial(n), |acc, &p| acc / factorial(p))
}

/// `n (n-1) ... (n-k+1)`, zero when `k > n`.
pub fn falling(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i))
}

pub fn pow(r: &Rational, e: usize) -> Rational {
    num_traits::pow(r.clone(), e)
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && r <= &Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational(" 7 / 10 ").unwrap(), rat(7, 10));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn renders_lowest_terms() {
        assert_eq!(fmt_rational(&rat(6, -4)), "-3/2");
        assert_eq!(fmt_rational(&int(1)), "1/1");
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(multinomial(&[2, 0, 2]), BigInt::from(6));
        assert_eq!(falling(5, 2), BigInt::from(20));
        assert_eq!(falling(1, 2), BigInt::zero());
        assert_eq!(binomial_big(&BigInt::from(-1), 3), BigInt::from(-1));
        assert_eq!(factorial(0), BigInt::one());
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let r = Rational::new(factorial(400), factorial(399));
        assert!((to_f64(&r) - 400.0).abs() < 1e-9);
    }
}
