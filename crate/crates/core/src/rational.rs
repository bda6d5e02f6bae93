//! Exact rational coordinates for distribution atoms.
//!
//! Values on the support of every distribution in this crate are kept as
//! reduced fractions so that an atom `s` and its mirror `-s` can be paired
//! by exact equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default denominator bound when snapping a float to a rational.
pub const DEFAULT_MAX_DENOMINATOR: i64 = 1_000_000;

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRational", into = "RawRational")]
pub struct Rational(Ratio<i64>);

#[derive(Serialize, Deserialize)]
struct RawRational {
    num: i64,
    den: i64,
}

impl TryFrom<RawRational> for Rational {
    type Error = Error;

    fn try_from(raw: RawRational) -> Result<Self> {
        Rational::new(raw.num, raw.den)
    }
}

impl From<Rational> for RawRational {
    fn from(r: Rational) -> Self {
        RawRational {
            num: r.num(),
            den: r.den(),
        }
    }
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidRational(format!("{num}/0")));
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        // i64 -> f64 conversion of a reduced fraction cannot fail
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Best rational approximation of `x` with denominator at most
    /// `max_den`, by continued-fraction convergents and semiconvergents.
    pub fn approximate(x: f64, max_den: i64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidRational(format!("{x} is not finite")));
        }
        if max_den < 1 {
            return Err(Error::InvalidRational(format!(
                "denominator bound {max_den} must be positive"
            )));
        }
        if x.abs() >= (i64::MAX / 2) as f64 {
            return Err(Error::InvalidRational(format!("{x} is out of range")));
        }

        let negative = x < 0.0;
        let target = x.abs();
        let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
        let mut rem = target;
        loop {
            let a = rem.floor();
            let a_int = a as i64;
            let q2 = a_int.saturating_mul(q1).saturating_add(q0);
            if q2 > max_den {
                // Largest semiconvergent that still fits, if it beats the last convergent.
                let k = (max_den - q0) / q1.max(1);
                let (ps, qs) = (p0 + k * p1, q0 + k * q1);
                let best = if qs > 0
                    && (ps as f64 / qs as f64 - target).abs() < (p1 as f64 / q1 as f64 - target).abs()
                {
                    (ps, qs)
                } else {
                    (p1, q1)
                };
                return Rational::new(if negative { -best.0 } else { best.0 }, best.1);
            }
            let p2 = a_int * p1 + p0;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let frac = rem - a;
            if frac < 1e-15 || (p1 as f64 / q1 as f64 - target).abs() == 0.0 {
                break;
            }
            rem = 1.0 / frac;
        }
        Rational::new(if negative { -p1 } else { p1 }, q1)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"n"` or `"n/d"`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRational(format!("cannot parse {s:?} as a fraction"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => s.parse::<i64>().map(Rational::integer).map_err(|_| bad()),
        }
    }
}

/// Integer multiples of `step` in the closed range `[lo, hi]`.
pub fn grid(lo: Rational, hi: Rational, step: Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() {
        return Err(Error::InvalidArgument(format!("grid step {step} must be positive")));
    }
    if lo > hi {
        return Err(Error::InvalidArgument(format!("grid range {lo}..{hi} is empty")));
    }
    // smallest k with k*step >= lo, largest k with k*step <= hi
    let first = (lo.0 / step.0).ceil().to_integer();
    let last = (hi.0 / step.0).floor().to_integer();
    Ok((first..=last).map(|k| Rational::integer(k) * step).collect())
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values.into_iter().fold(1i64, |acc, v| acc.lcm(&v.den()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn reduced_and_positive_denominator() {
        let x = r(6, -20);
        assert_eq!((x.num(), x.den()), (-3, 10));
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn exact_negation_pairs() {
        assert_eq!(-(r(1, 10) + r(1, 5)), r(-3, 10));
        assert_eq!(r(7, 10) + r(-7, 10), Rational::ZERO);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/10".parse::<Rational>().unwrap(), r(3, 10));
        assert_eq!("-2".parse::<Rational>().unwrap(), Rational::integer(-2));
        assert_eq!(r(-1, 2).to_string(), "-1/2");
        assert!("0.3".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn approximate_snaps_decimals() {
        assert_eq!(Rational::approximate(0.3, 1_000_000).unwrap(), r(3, 10));
        assert_eq!(Rational::approximate(-0.7, 1_000_000).unwrap(), r(-7, 10));
        assert_eq!(Rational::approximate(0.125, 1_000_000).unwrap(), r(1, 8));
        assert_eq!(Rational::approximate(1.0 / 3.0, 1_000_000).unwrap(), r(1, 3));
        assert_eq!(Rational::approximate(std::f64::consts::PI, 1000).unwrap(), r(355, 113));
        assert_eq!(Rational::approximate(0.0, 10).unwrap(), Rational::ZERO);
        assert!(Rational::approximate(f64::NAN, 10).is_err());
    }

    #[test]
    fn grid_contains_endpoints() {
        let g = grid(Rational::integer(-2), Rational::integer(1), r(1, 20)).unwrap();
        assert_eq!(g.len(), 61);
        assert_eq!(g[0], Rational::integer(-2));
        assert_eq!(*g.last().unwrap(), Rational::ONE);
        assert!(g.contains(&r(-1, 2)));
    }

    #[test]
    fn json_shape() {
        let v: Rational = serde_json::from_str(r#"{"num": 4, "den": -8}"#).unwrap();
        assert_eq!(v, r(-1, 2));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"num":-1,"den":2}"#);
    }
}
