//! Interval enclosures used by sign determination.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

/// Closed floating interval with outward rounding.
#[derive(Clone, Copy, Debug)]
pub struct FInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FInterval {
    pub fn point(x: f64) -> Self {
        FInterval { lo: x, hi: x }
    }

    /// Enclosure of a rational, two ulps wide on each side.
    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_zero() {
            return FInterval::point(0.0);
        }
        let v = q.to_f64().unwrap_or(f64::NAN);
        if !v.is_finite() {
            return FInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
        }
        FInterval { lo: down(down(v)), hi: up(up(v)) }
    }

    pub fn add(self, o: FInterval) -> Self {
        FInterval { lo: down(self.lo + o.lo), hi: up(self.hi + o.hi) }
    }

    pub fn mul(self, o: FInterval) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if c.iter().any(|x| x.is_nan()) {
            return FInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
        }
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        FInterval { lo: down(lo), hi: up(hi) }
    }

    /// Sign if the interval excludes zero.
    pub fn sign(self) -> Option<i32> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq)]
pub struct QInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl QInterval {
    pub fn point(q: BigRational) -> Self {
        QInterval { lo: q.clone(), hi: q }
    }

    pub fn add(&self, o: &QInterval) -> QInterval {
        QInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn mul(&self, o: &QInterval) -> QInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for x in &c[1..] {
            if *x < lo {
                lo = x.clone();
            }
            if *x > hi {
                hi = x.clone();
            }
        }
        QInterval { lo, hi }
    }

    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn to_f(&self) -> FInterval {
        let a = FInterval::from_rational(&self.lo);
        let b = FInterval::from_rational(&self.hi);
        FInterval { lo: a.lo, hi: b.hi }
    }
}

/// Horner evaluation of a rational polynomial over an interval.
pub fn eval_q(coeffs: &[BigRational], x: &QInterval) -> QInterval {
    let mut acc = QInterval::point(BigRational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(&QInterval::point(c.clone()));
    }
    acc
}

pub fn eval_f(coeffs: &[FInterval], x: FInterval) -> FInterval {
    let mut acc = FInterval::point(0.0);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(*c);
    }
    acc
}

