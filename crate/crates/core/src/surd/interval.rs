use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `Some(sign)` when the interval excludes zero or is exactly zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            RatInterval { lo: b, hi: a }
        } else {
            RatInterval { lo: a, hi: b }
        }
    }

    /// Enclosure of `sqrt(d)` of width at most `2^-bits`.
    pub fn sqrt_of(d: &BigUint, bits: u64) -> Self {
        let scaled = d << (2 * bits);
        let r = scaled.sqrt();
        let den = BigInt::one() << bits;
        let lo = BigRational::new(BigInt::from(r.clone()), den.clone());
        if &r * &r == scaled {
            return RatInterval::point(lo);
        }
        let hi = BigRational::new(BigInt::from(r + 1u32), den);
        RatInterval { lo, hi }
    }

    /// Hull of the two intervals.
    pub fn hull(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    pub fn disjoint_from(&self, o: &RatInterval) -> bool {
        self.hi < o.lo || o.hi < self.lo
    }

    /// Approximate midpoint for display only.
    pub fn mid_f64(&self) -> f64 {
        let m = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        rat_to_f64(&m)
    }
}

pub(crate) fn rat_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_enclosure_is_tight_and_correct() {
        let d = BigUint::from(2u32);
        for bits in [1u64, 10, 60, 200] {
            let iv = RatInterval::sqrt_of(&d, bits);
            let two = BigRational::from_integer(2.into());
            assert!(&iv.lo * &iv.lo <= two && two <= &iv.hi * &iv.hi);
            assert!(iv.width() <= BigRational::new(1.into(), BigInt::one() << bits));
        }
        assert_eq!(RatInterval::sqrt_of(&BigUint::from(49u32), 5).sign(), Some(1));
        assert_eq!(RatInterval::sqrt_of(&BigUint::from(49u32), 5).width(), BigRational::zero());
    }

    #[test]
    fn arithmetic_is_outward() {
        let a = RatInterval::new(BigRational::from_integer((-1).into()), BigRational::from_integer(2.into()));
        let b = RatInterval::point(BigRational::from_integer(3.into()));
        assert_eq!((&a - &b).lo, BigRational::from_integer((-4).into()));
        assert_eq!(a.scale(&BigRational::from_integer((-2).into())).hi, BigRational::from_integer(2.into()));
        assert_eq!(a.sign(), None);
    }
}
