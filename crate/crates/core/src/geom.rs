//! Exact planar vectors and predicates over a number field.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

use crate::field::{Embedding, FieldElement, NumberField};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarVector {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl PlanarVector {
    pub fn new(x: FieldElement, y: FieldElement) -> PlanarVector {
        assert!(NumberField::same(x.field(), y.field()), "coordinates in different fields");
        PlanarVector { x, y }
    }

    pub fn zero(f: &Arc<NumberField>) -> PlanarVector {
        PlanarVector { x: FieldElement::zero(f), y: FieldElement::zero(f) }
    }

    pub fn from_ints(f: &Arc<NumberField>, x: i64, y: i64) -> PlanarVector {
        PlanarVector { x: FieldElement::from_int(f, x), y: FieldElement::from_int(f, y) }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.x.field()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, s: &FieldElement) -> PlanarVector {
        PlanarVector { x: &self.x * s, y: &self.y * s }
    }

    pub fn cross(&self, o: &PlanarVector) -> FieldElement {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }

    pub fn dot(&self, o: &PlanarVector) -> FieldElement {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    pub fn map(&self, e: &Embedding) -> PlanarVector {
        PlanarVector { x: e.apply(&self.x), y: e.apply(&self.y) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// 0 for arguments in [0, π), 1 for [π, 2π).
    fn half(&self) -> u8 {
        let sy = self.y.sign();
        if sy > 0 || (sy == 0 && self.x.sign() > 0) {
            0
        } else {
            1
        }
    }
}

impl Add for &PlanarVector {
    type Output = PlanarVector;
    fn add(self, o: &PlanarVector) -> PlanarVector {
        PlanarVector { x: &self.x + &o.x, y: &self.y + &o.y }
    }
}

impl Sub for &PlanarVector {
    type Output = PlanarVector;
    fn sub(self, o: &PlanarVector) -> PlanarVector {
        PlanarVector { x: &self.x - &o.x, y: &self.y - &o.y }
    }
}

impl Neg for &PlanarVector {
    type Output = PlanarVector;
    fn neg(self) -> PlanarVector {
        PlanarVector { x: -&self.x, y: -&self.y }
    }
}

/// Compare arguments in [0, 2π) of two nonzero vectors.
pub fn angle_cmp(u: &PlanarVector, v: &PlanarVector) -> Ordering {
    let (hu, hv) = (u.half(), v.half());
    if hu != hv {
        return hu.cmp(&hv);
    }
    match u.cross(v).sign() {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// Sign of the turn a → b → c.
pub fn orientation(a: &PlanarVector, b: &PlanarVector, c: &PlanarVector) -> i32 {
    (b - a).cross(&(c - a)).sign()
}

fn on_segment(p: &PlanarVector, a: &PlanarVector, b: &PlanarVector) -> bool {
    let lo_x = if a.x.cmp_value(&b.x).is_le() { &a.x } else { &b.x };
    let hi_x = if a.x.cmp_value(&b.x).is_le() { &b.x } else { &a.x };
    let lo_y = if a.y.cmp_value(&b.y).is_le() { &a.y } else { &b.y };
    let hi_y = if a.y.cmp_value(&b.y).is_le() { &b.y } else { &a.y };
    p.x.cmp_value(lo_x).is_ge() && p.x.cmp_value(hi_x).is_le() && p.y.cmp_value(lo_y).is_ge() && p.y.cmp_value(hi_y).is_le()
}

/// True if the closed segments [a,b] and [c,d] share a point.
pub fn segments_intersect(a: &PlanarVector, b: &PlanarVector, c: &PlanarVector, d: &PlanarVector) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(c, a, b))
        || (o2 == 0 && on_segment(d, a, b))
        || (o3 == 0 && on_segment(a, c, d))
        || (o4 == 0 && on_segment(b, c, d))
}

/// Twice the signed area of a closed polygon given by edge vectors.
pub fn doubled_area(edges: &[PlanarVector]) -> FieldElement {
    let f = edges[0].field();
    let mut p = PlanarVector::zero(f);
    let mut acc = FieldElement::zero(f);
    for e in edges {
        let q = &p + e;
        acc = &acc + &p.cross(&q);
        p = q;
    }
    acc
}

/// Vertex positions starting at the origin.
pub fn vertices(edges: &[PlanarVector]) -> Vec<PlanarVector> {
    let mut out = Vec::with_capacity(edges.len());
    let mut p = PlanarVector::zero(edges[0].field());
    for e in edges {
        out.push(p.clone());
        p = &p + e;
    }
    out
}
