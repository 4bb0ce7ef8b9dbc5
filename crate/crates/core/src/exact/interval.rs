//! Closed intervals with rational endpoints.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{MultiPoly, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rat::zero())
    }

    /// `Some(sign)` if every element of the interval has that sign.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn bisect(&self) -> (RatInterval, RatInterval) {
        let m = self.midpoint();
        (
            RatInterval::new(self.lo.clone(), m.clone()),
            RatInterval::new(m, self.hi.clone()),
        )
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn pow(&self, k: u32) -> RatInterval {
        if k == 0 {
            return RatInterval::point(Rat::one());
        }
        let a = pow_rat(&self.lo, k);
        let b = pow_rat(&self.hi, k);
        if k % 2 == 1 {
            return RatInterval { lo: a, hi: b };
        }
        if self.contains_zero() {
            RatInterval {
                lo: Rat::zero(),
                hi: a.max(b),
            }
        } else {
            RatInterval {
                lo: a.clone().min(b.clone()),
                hi: a.max(b),
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> RatInterval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            RatInterval { lo: b, hi: a }
        } else {
            RatInterval { lo: a, hi: b }
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (super::rat_to_f64(&self.lo), super::rat_to_f64(&self.hi))
    }
}

fn pow_rat(x: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo.to_string(), self.hi.to_string()].serialize(s)
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

/// Enclosure of a polynomial's range over a box (term-by-term evaluation).
pub fn eval_multi(f: &MultiPoly, boxes: &[RatInterval]) -> RatInterval {
    let mut acc = RatInterval::point(Rat::zero());
    for (exps, c) in f.terms() {
        let mut term = RatInterval::point(Rat::from_integer(c.clone()));
        for (x, &e) in boxes.iter().zip(exps) {
            if e > 0 {
                term = &term * &x.pow(e);
            }
        }
        acc = &acc + &term;
    }
    acc
}
