//! Exact rational scalars and their canonical text form `p/q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The base field of every stored structure.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Canonical `p/q` rendering: reduced, positive denominator, `1/1` style for integers.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `p/q`, `p`, or a negative numerator. Denominators must be positive.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 0,
        message: format!("not a rational: `{s}`"),
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if !d.is_positive() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn format_vec(v: &[Q]) -> String {
    v.iter().map(format_q).collect::<Vec<_>>().join(" ")
}

pub fn parse_vec(s: &str) -> Result<Vec<Q>> {
    s.split_whitespace().map(parse_q).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(format_q(&frac(2, 4)), "1/2");
        assert_eq!(format_q(&frac(3, -6)), "-1/2");
        assert_eq!(format_q(&q(7)), "7/1");
        assert_eq!(format_q(&zero()), "0/1");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["1/2", "-3/7", "0/1", "12/1"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("4/6").unwrap(), frac(2, 3));
        assert_eq!(parse_q("5").unwrap(), q(5));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("1/-2").is_err());
        assert!(parse_q("x").is_err());
    }
}
