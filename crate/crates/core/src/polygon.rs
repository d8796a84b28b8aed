//! Rational polygons: angles in ℚ·π, side lengths in a number field.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{angle_field, compose_fields, FieldElement, NumberField};
use crate::geom::{doubled_area, segments_intersect, vertices, PlanarVector};

/// An angle (num/den)·π with the fraction in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalAngle {
    pub num: i64,
    pub den: i64,
}

impl RationalAngle {
    pub fn new(num: i64, den: i64) -> Result<RationalAngle> {
        if num <= 0 || den <= 0 {
            return Err(Error::InvalidAngle(format!("{num}/{den} is not positive")));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if num >= 2 * den || num == den {
            return Err(Error::InvalidAngle(format!("{num}/{den} is outside (0,1) ∪ (1,2)")));
        }
        Ok(RationalAngle { num, den })
    }

    pub fn parse(s: &str) -> Result<RationalAngle> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n = n.parse::<i64>().map_err(|_| Error::Parse(format!("bad angle {s:?}")))?;
        let d = d.parse::<i64>().map_err(|_| Error::Parse(format!("bad angle {s:?}")))?;
        RationalAngle::new(n, d)
    }
}

impl std::fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A validated simple polygon, oriented counterclockwise, with edge 0 along
/// the positive x-axis. Angle i sits at the end of edge i.
#[derive(Clone, Debug)]
pub struct RationalPolygon {
    pub angles: Vec<RationalAngle>,
    /// Side lengths in the ambient field.
    pub lengths: Vec<FieldElement>,
    pub field: Arc<NumberField>,
    pub edges: Vec<PlanarVector>,
    /// Direction of edge i as a multiple of π/k, in 0..2k.
    pub dirs: Vec<i64>,
    pub k: i64,
    /// Unit vectors at angle πj/k, j = 0..2k, in the ambient field.
    pub units: Vec<PlanarVector>,
}

fn lcm_dens(angles: &[RationalAngle]) -> i64 {
    angles.iter().fold(1i64, |acc, a| acc.lcm(&a.den))
}

fn check_angles(angles: &[RationalAngle]) -> Result<()> {
    let n = angles.len() as i64;
    let sum = angles.iter().fold(BigRational::zero(), |acc, a| acc + BigRational::new(a.num.into(), a.den.into()));
    if sum != BigRational::from_integer((n - 2).into()) {
        return Err(Error::AngleSum);
    }
    Ok(())
}

/// Validate angles and side lengths; builds exact edge vectors in the
/// compositum of `field` with the angle field of k.
pub fn validate_polygon(
    angles: &[RationalAngle],
    lengths: &[FieldElement],
    field: &Arc<NumberField>,
) -> Result<RationalPolygon> {
    let n = angles.len();
    if n < 3 || lengths.len() != n {
        return Err(Error::LengthMismatch);
    }
    for a in angles {
        RationalAngle::new(a.num, a.den)?;
    }
    check_angles(angles)?;
    if lengths.iter().any(|l| !NumberField::same(l.field(), field)) {
        return Err(Error::FieldMismatch);
    }
    if lengths.iter().any(|l| l.sign() <= 0) {
        return Err(Error::NonpositiveLength);
    }
    let k = lcm_dens(angles);
    let table = angle_field(k as u64);
    let (amb, e_ang, e_user) = compose_fields(&table.field, field)?;
    let units: Vec<PlanarVector> = (0..2 * k)
        .map(|j| {
            let (c, s) = table.unit(j);
            PlanarVector::new(e_ang.apply(&c), e_ang.apply(&s))
        })
        .collect();
    let lengths: Vec<FieldElement> = lengths.iter().map(|l| e_user.apply(l)).collect();
    build(angles, lengths, amb, k, units)
}

fn build(
    angles: &[RationalAngle],
    lengths: Vec<FieldElement>,
    field: Arc<NumberField>,
    k: i64,
    units: Vec<PlanarVector>,
) -> Result<RationalPolygon> {
    let n = angles.len();
    let mut dirs = Vec::with_capacity(n);
    let mut d = 0i64;
    for a in angles {
        dirs.push(d);
        d = (d + k - a.num * (k / a.den)).rem_euclid(2 * k);
    }
    let edges: Vec<PlanarVector> = (0..n).map(|i| units[dirs[i] as usize].scale(&lengths[i])).collect();
    let mut sum = PlanarVector::zero(&field);
    for e in &edges {
        sum = &sum + e;
    }
    if !sum.is_zero() {
        return Err(Error::NotClosed);
    }
    let vs = vertices(&edges);
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (&vs[i], &vs[(i + 1) % n]);
            let (c, dd) = (&vs[j], &vs[(j + 1) % n]);
            if segments_intersect(a, b, c, dd) {
                return Err(Error::SelfIntersecting);
            }
        }
    }
    Ok(RationalPolygon { angles: angles.to_vec(), lengths, field, edges, dirs, k, units })
}

/// Triangle with the given angles, side lengths from the law of sines with
/// the first side equal to 1.
pub fn triangle(angles: [RationalAngle; 3]) -> Result<RationalPolygon> {
    for a in &angles {
        if a.num >= a.den {
            return Err(Error::InvalidAngle(format!("{a} is not below π")));
        }
    }
    check_angles(&angles)?;
    let k = lcm_dens(&angles);
    let table = angle_field(k as u64);
    let sin_of = |a: &RationalAngle| table.sin[(a.num * (k / a.den)) as usize].clone();
    let s1 = sin_of(&angles[1]);
    let lengths: Vec<FieldElement> = (0..3).map(|i| &sin_of(&angles[(i + 1) % 3]) / &s1).collect();
    let units: Vec<PlanarVector> = (0..2 * k)
        .map(|j| {
            let (c, s) = table.unit(j);
            PlanarVector::new(c, s)
        })
        .collect();
    build(&angles, lengths, table.field.clone(), k, units)
}

impl RationalPolygon {
    /// k = lcm of the angle denominators.
    pub fn angle_lcd(&self) -> i64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn area(&self) -> FieldElement {
        doubled_area(&self.edges).scale(&BigRational::new(1.into(), 2.into()))
    }

    /// Same angles with every side multiplied by a positive element of the
    /// ambient field.
    pub fn scaled(&self, s: &FieldElement) -> Result<RationalPolygon> {
        if s.sign() <= 0 {
            return Err(Error::NonpositiveLength);
        }
        let lengths: Vec<FieldElement> = self.lengths.iter().map(|l| l * s).collect();
        build(&self.angles, lengths, self.field.clone(), self.k, self.units.clone())
    }

    /// The mirror image traversed counterclockwise: angle and length lists reversed.
    pub fn reversed(&self) -> Result<RationalPolygon> {
        let n = self.n();
        // Angle i ends edge i; after reversal edge i is old edge n-1-i, and
        // the angle ending it is the one ending old edge n-2-i.
        let angles: Vec<RationalAngle> = (0..n).map(|i| self.angles[(2 * n - 2 - i) % n]).collect();
        let lengths: Vec<FieldElement> = (0..n).map(|i| self.lengths[n - 1 - i].clone()).collect();
        build(&angles, lengths, self.field.clone(), self.k, self.units.clone())
    }
}

/// An L-shaped table: a (w1+w2)×h1 rectangle with a w1×h2 rectangle on top
/// of its left part.
pub fn l_shaped_table(
    w1: &FieldElement,
    w2: &FieldElement,
    h1: &FieldElement,
    h2: &FieldElement,
) -> Result<RationalPolygon> {
    let a = |n, d| RationalAngle::new(n, d).unwrap();
    let angles = [a(1, 2), a(1, 2), a(3, 2), a(1, 2), a(1, 2), a(1, 2)];
    let lengths = vec![w1 + w2, h1.clone(), w2.clone(), h2.clone(), w1.clone(), h1 + h2];
    validate_polygon(&angles, &lengths, w1.field())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: i64, d: i64) -> RationalAngle {
        RationalAngle::new(n, d).unwrap()
    }

    #[test]
    fn unit_square() {
        let q = NumberField::rationals();
        let one = FieldElement::one(&q);
        let p = validate_polygon(&[a(1, 2); 4], &vec![one; 4], &q).unwrap();
        let want = [(1, 0), (0, 1), (-1, 0), (0, -1)];
        for (e, (x, y)) in p.edges.iter().zip(want) {
            assert_eq!(*e, PlanarVector::from_ints(&p.field, x, y));
        }
        assert_eq!(p.angle_lcd(), 2);
    }

    #[test]
    fn right_isoceles() {
        let f = NumberField::quadratic(2).unwrap();
        let one = FieldElement::one(&f);
        let ok = validate_polygon(&[a(1, 2), a(1, 4), a(1, 4)], &[one.clone(), one.clone(), FieldElement::theta(&f)], &f);
        // Angle 0 ends edge 0: the right angle sits between the two unit legs.
        let p = ok.unwrap();
        assert_eq!(p.angle_lcd(), 4);
        let bad = validate_polygon(&[a(1, 2), a(1, 4), a(1, 4)], &[one.clone(), one.clone(), one], &f);
        assert_eq!(bad.unwrap_err(), Error::NotClosed);
    }

    #[test]
    fn errors() {
        let q = NumberField::rationals();
        let one = FieldElement::one(&q);
        let e = validate_polygon(&[a(1, 2), a(1, 2), a(1, 3)], &vec![one.clone(); 3], &q).unwrap_err();
        assert_eq!(e, Error::AngleSum);
        let mut ls = vec![one.clone(); 4];
        ls[2] = FieldElement::from_int(&q, -1);
        let e = validate_polygon(&[a(1, 2); 4], &ls, &q).unwrap_err();
        assert_eq!(e, Error::NonpositiveLength);
        assert!(RationalAngle::new(2, 2).is_err());
        assert!(RationalAngle::new(5, 2).is_err());
    }

    #[test]
    fn self_intersecting_rejected() {
        let q = NumberField::rationals();
        let i = |n| FieldElement::from_int(&q, n);
        let angles = [a(1, 2), a(1, 2), a(3, 2), a(3, 2), a(1, 2), a(1, 2), a(1, 2), a(1, 2)];
        let lengths = vec![i(1), i(1), i(3), i(1), i(4), i(1), i(2), i(3)];
        let r = validate_polygon(&angles, &lengths, &q);
        assert_eq!(r.unwrap_err(), Error::SelfIntersecting);
    }

    #[test]
    fn triangles_and_lcd() {
        assert_eq!(triangle([a(1, 2), a(1, 4), a(1, 4)]).unwrap().angle_lcd(), 4);
        assert_eq!(triangle([a(2, 3), a(1, 6), a(1, 6)]).unwrap().angle_lcd(), 6);
        let t = triangle([a(1, 5), a(1, 5), a(3, 5)]).unwrap();
        assert_eq!(t.angle_lcd(), 5);
        assert!(t.lengths[0].is_one());
        let one = FieldElement::one(&NumberField::rationals());
        let l = l_shaped_table(&one, &one, &one, &one).unwrap();
        assert_eq!(l.area(), FieldElement::from_int(&l.field, 3));
    }

    #[test]
    fn reversal_keeps_k() {
        let t = triangle([a(1, 7), a(2, 7), a(4, 7)]).unwrap();
        let r = t.reversed().unwrap();
        assert_eq!(r.angle_lcd(), 7);
        assert_eq!(r.area(), t.area());
    }
}
