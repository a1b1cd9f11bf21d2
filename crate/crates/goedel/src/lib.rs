//! A workbench for first-order Gödel logics.
//!
//! Truth values are exact rationals in `[0, 1]`. Conjunction is `min`,
//! disjunction is `max`, `a -> b` is `1` when `a <= b` and `b` otherwise,
//! and the quantifiers are infimum and supremum.

pub mod decide;
pub mod formula;
pub mod goedelset;
pub mod herbrand;
pub mod proofkit;
pub mod random;
pub mod semantics;
pub mod transforms;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use formula::{parse, Formula, Term};

/// Exact truth value.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `p/q`, an integer, or a decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Option<Q> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let mag = Q::new(int.clone() * &scale + if neg { -frac } else { frac }, scale);
        return Some(mag);
    }
    s.parse::<BigInt>().ok().map(Q::from_integer)
}

/// Renders a rational as `p/q`, or as an integer when the denominator is 1.
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        assert_eq!(parse_rational("2/3"), Some(q(2, 3)));
        assert_eq!(parse_rational("4/6"), Some(q(2, 3)));
        assert_eq!(parse_rational("1"), Some(one()));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_q(&q(3, 6)), "1/2");
        assert_eq!(fmt_q(&zero()), "0");
    }
}
