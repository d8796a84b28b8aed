//! Arithmetic shared by the floating and exact flow engines.

use std::fmt::Debug;

use crate::field::FieldElement;

/// Absolute tolerance of the floating engine. Local coordinates are cell
/// bounded, so an absolute threshold is adequate.
pub const F64_TOL: f64 = 1e-10;

pub trait Scalar: Clone + Debug {
    const EXACT: bool;
    fn zero_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Sign, with values within tolerance of zero reported as 0.
    fn sgn(&self) -> i32;
    fn to_f64(&self) -> f64;

    fn cmp_s(&self, o: &Self) -> i32 {
        self.sub(o).sgn()
    }
    /// Comparison with a tolerance relative to the operands.
    fn cmp_rel(&self, o: &Self) -> i32 {
        self.cmp_s(o)
    }
    fn min_s(&self, o: &Self) -> Self {
        if self.cmp_s(o) <= 0 {
            self.clone()
        } else {
            o.clone()
        }
    }
    fn abs_s(&self) -> Self {
        if self.sgn() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
    fn half(&self) -> Self {
        self.div(&self.int_like(2))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero_like(&self) -> f64 {
        0.0
    }
    fn int_like(&self, n: i64) -> f64 {
        n as f64
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn div(&self, o: &f64) -> f64 {
        self / o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn sgn(&self) -> i32 {
        if *self > F64_TOL {
            1
        } else if *self < -F64_TOL {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cmp_rel(&self, o: &f64) -> i32 {
        let d = self - o;
        let tol = 1e-13 * (self.abs() + o.abs());
        if d > tol {
            1
        } else if d < -tol {
            -1
        } else {
            0
        }
    }
}

impl Scalar for FieldElement {
    const EXACT: bool = true;
    fn zero_like(&self) -> FieldElement {
        FieldElement::zero(self.field())
    }
    fn int_like(&self, n: i64) -> FieldElement {
        FieldElement::from_int(self.field(), n)
    }
    fn add(&self, o: &FieldElement) -> FieldElement {
        self + o
    }
    fn sub(&self, o: &FieldElement) -> FieldElement {
        self - o
    }
    fn mul(&self, o: &FieldElement) -> FieldElement {
        self * o
    }
    fn div(&self, o: &FieldElement) -> FieldElement {
        self / o
    }
    fn neg(&self) -> FieldElement {
        -self
    }
    fn sgn(&self) -> i32 {
        self.sign()
    }
    fn to_f64(&self) -> f64 {
        FieldElement::to_f64(self)
    }
}

/// Point or vector in local cell coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }
    pub fn add(&self, o: &Self) -> Self {
        Vec2::new(self.x.add(&o.x), self.y.add(&o.y))
    }
    pub fn sub(&self, o: &Self) -> Self {
        Vec2::new(self.x.sub(&o.x), self.y.sub(&o.y))
    }
    pub fn scale(&self, s: &T) -> Self {
        Vec2::new(self.x.mul(s), self.y.mul(s))
    }
    pub fn neg(&self) -> Self {
        Vec2::new(self.x.neg(), self.y.neg())
    }
    pub fn cross(&self, o: &Self) -> T {
        self.x.mul(&o.y).sub(&self.y.mul(&o.x))
    }
    pub fn dot(&self, o: &Self) -> T {
        self.x.mul(&o.x).add(&self.y.mul(&o.y))
    }
    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
    fn half_plane(&self) -> u8 {
        let (sy, sx) = (self.y.sgn(), self.x.sgn());
        if sy > 0 || (sy == 0 && sx > 0) {
            0
        } else {
            1
        }
    }
}

/// Counterclockwise angle from `a` to `u` compared with the angle from `a` to
/// `b`; both measured in [0, 2π).
pub fn ccw_less<T: Scalar>(a: &Vec2<T>, u: &Vec2<T>, b: &Vec2<T>) -> bool {
    // Rotate so that a points along +x: coordinates (a·v, a×v).
    let rel = |v: &Vec2<T>| Vec2::new(a.dot(v), a.cross(v));
    let (ru, rb) = (rel(u), rel(b));
    let (hu, hb) = (ru.half_plane(), rb.half_plane());
    if hu != hb {
        return hu < hb;
    }
    ru.cross(&rb).sgn() > 0
}
