//! Exact points and lines over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The line `a x + b y + c = 0` with coprime integer coefficients whose
/// first nonzero entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalLine {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl RationalLine {
    /// Normalizes arbitrary rational coefficients. Returns `None` when
    /// `a` and `b` are both zero.
    pub fn from_coefficients(a: &BigRational, b: &BigRational, c: &BigRational) -> Option<Self> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        let l = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = |r: &BigRational| r.numer() * (&l / r.denom());
        let (mut a, mut b, mut c) = (scale(a), scale(b), scale(c));
        let g = a.gcd(&b).gcd(&c);
        a /= &g;
        b /= &g;
        c /= &g;
        let first = if !a.is_zero() { &a } else { &b };
        if first.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        Some(RationalLine { a, b, c })
    }

    pub fn through(p: &RationalPoint, q: &RationalPoint) -> Option<Self> {
        let a = &q.y - &p.y;
        let b = &p.x - &q.x;
        let c = -(&a * &p.x + &b * &p.y);
        Self::from_coefficients(&a, &b, &c)
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let c = BigRational::from_integer(self.c.clone());
        (a * &p.x + b * &p.y + c).is_zero()
    }

    /// The unique common point, or `None` for parallel or equal lines.
    pub fn intersect(&self, other: &RationalLine) -> Option<RationalPoint> {
        let det = &self.a * &other.b - &other.a * &self.b;
        if det.is_zero() {
            return None;
        }
        let x = &self.b * &other.c - &other.b * &self.c;
        let y = &self.c * &other.a - &other.c * &self.a;
        Some(RationalPoint {
            x: BigRational::new(x, det.clone()),
            y: BigRational::new(y, det),
        })
    }
}

impl fmt::Display for RationalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y + {} = 0", self.a, self.b, self.c)
    }
}

/// Parses `n` or `n/d` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let l = RationalLine::from_coefficients(&rational(-2, 1), &rational(4, 3), &rational(0, 1))
            .unwrap();
        assert_eq!((l.a.clone(), l.b.clone(), l.c.clone()), (3.into(), (-2).into(), 0.into()));
        let v = RationalLine::from_coefficients(&rational(0, 1), &rational(-5, 1), &rational(10, 1))
            .unwrap();
        assert_eq!((v.b, v.c), (1.into(), (-2).into()));
        assert!(RationalLine::from_coefficients(&rational(0, 1), &rational(0, 1), &one()).is_none());
    }

    #[test]
    fn through_and_intersect() {
        let p = RationalPoint::from_ints(0, 0);
        let q = RationalPoint::from_ints(2, 2);
        let r = RationalPoint::from_ints(0, 2);
        let s = RationalPoint::from_ints(2, 0);
        let l1 = RationalLine::through(&p, &q).unwrap();
        let l2 = RationalLine::through(&r, &s).unwrap();
        assert!(l1.contains(&p) && l1.contains(&q));
        assert_eq!(l1.intersect(&l2), Some(RationalPoint::from_ints(1, 1)));
        assert_eq!(l1.intersect(&l1), None);
        assert!(RationalLine::through(&p, &p).is_none());
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("-3/6"), Some(rational(-1, 2)));
        assert_eq!(parse_rational("7"), Some(rational(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
