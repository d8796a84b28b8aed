//! Exact arithmetic in real number fields ℚ(θ) with a distinguished real
//! embedding, plus the real cyclotomic fields carrying angle data.

mod compose;
mod cyclotomic;
pub mod interval;
pub mod poly;

pub use compose::{compose_fields, compose_fields_with_bound, Embedding, DEFAULT_DEGREE_BOUND};
pub use cyclotomic::{angle_field, AngleTable};

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use interval::{eval_f, eval_q, FInterval, QInterval};
use poly::QPoly;

/// A number field ℚ[x]/(f) together with a real root of `f` isolated by a
/// rational interval.
pub struct NumberField {
    min_poly: Vec<BigInt>,
    qpoly: QPoly,
    embedding: (BigRational, BigRational),
    /// x^{d+j} reduced mod f, for j = 0..d-1.
    reduction: Vec<QPoly>,
    refined: Mutex<QInterval>,
    theta_f: FInterval,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({:?} @ [{}, {}])", self.min_poly, self.embedding.0, self.embedding.1)
    }
}

impl NumberField {
    /// Validated constructor: `min_poly` must be monic and irreducible with
    /// exactly one real root in `(lo, hi]`.
    pub fn new(min_poly: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Result<Arc<NumberField>> {
        let mut p = min_poly.clone();
        poly::trim_z(&mut p);
        if p.len() < 2 {
            return Err(Error::InvalidField("constant minimal polynomial".into()));
        }
        if !p.last().unwrap().is_one() {
            return Err(Error::InvalidField("minimal polynomial is not monic".into()));
        }
        if p.len() > 2 && !compose::is_irreducible(&p) {
            return Err(Error::InvalidField("minimal polynomial is reducible".into()));
        }
        Self::new_irreducible(p, lo, hi)
    }

    /// Constructor for a polynomial already known to be irreducible.
    pub(crate) fn new_irreducible(p: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Result<Arc<NumberField>> {
        if lo > hi {
            return Err(Error::InvalidField("empty embedding interval".into()));
        }
        let qpoly = poly::to_q(&p);
        let d = p.len() - 1;
        if d == 1 {
            let root = -&qpoly[0];
            if root < lo || root > hi {
                return Err(Error::InvalidField("root outside embedding interval".into()));
            }
        } else {
            let seq = poly::sturm_sequence(&qpoly);
            if poly::count_roots(&seq, &lo, &hi) != 1 {
                return Err(Error::InvalidField("embedding interval does not isolate one root".into()));
            }
        }
        let mut reduction = Vec::with_capacity(d);
        let mut cur: QPoly = vec![BigRational::zero(); d + 1];
        cur[d] = BigRational::one();
        for _ in 0..d {
            let r = poly::rem(&cur, &qpoly);
            reduction.push(pad(r, d));
            cur = poly::mul(&reduction[reduction.len() - 1], &[BigRational::zero(), BigRational::one()]);
        }
        let start = if d == 1 {
            QInterval::point(-&qpoly[0])
        } else {
            QInterval { lo: lo.clone(), hi: hi.clone() }
        };
        let field = NumberField {
            min_poly: p,
            qpoly,
            embedding: (lo, hi),
            reduction,
            refined: Mutex::new(start),
            theta_f: FInterval::point(0.0),
        };
        let theta = field.root_enclosure(70).to_f();
        Ok(Arc::new(NumberField { theta_f: theta, ..field }))
    }

    /// The field ℚ, represented with generator θ = 0.
    pub fn rationals() -> Arc<NumberField> {
        static Q: std::sync::OnceLock<Arc<NumberField>> = std::sync::OnceLock::new();
        Q.get_or_init(|| {
            NumberField::new_irreducible(
                vec![BigInt::zero(), BigInt::one()],
                BigRational::from_integer((-1).into()),
                BigRational::one(),
            )
            .unwrap()
        })
        .clone()
    }

    /// ℚ(√n) for a non-square positive integer n, embedded at the positive root.
    pub fn quadratic(n: i64) -> Result<Arc<NumberField>> {
        let r = (n as f64).sqrt();
        if n <= 0 || (r.round() as i64).pow(2) == n {
            return Err(Error::InvalidField(format!("{n} is not a positive non-square")));
        }
        let lo = BigRational::from_integer(BigInt::from(r.floor() as i64));
        let hi = lo.clone() + BigRational::one();
        NumberField::new_irreducible(vec![BigInt::from(-n), BigInt::zero(), BigInt::one()], lo, hi)
    }

    /// ℚ(φ) with φ = (1+√5)/2, minimal polynomial x² − x − 1.
    pub fn golden() -> Arc<NumberField> {
        static F: std::sync::OnceLock<Arc<NumberField>> = std::sync::OnceLock::new();
        F.get_or_init(|| {
            NumberField::new_irreducible(
                vec![BigInt::from(-1), BigInt::from(-1), BigInt::one()],
                BigRational::one(),
                BigRational::from_integer(2.into()),
            )
            .unwrap()
        })
        .clone()
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn embedding(&self) -> (&BigRational, &BigRational) {
        (&self.embedding.0, &self.embedding.1)
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    /// Rational enclosure of θ of width at most 2^-bits.
    pub fn root_enclosure(&self, bits: u32) -> QInterval {
        let mut guard = self.refined.lock().unwrap();
        if self.degree() == 1 {
            return guard.clone();
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let lo_sign = poly::eval_sign(&self.qpoly, &guard.lo);
        while guard.width() > target {
            let mid = (&guard.lo + &guard.hi) / BigRational::from_integer(2.into());
            let s = poly::eval_sign(&self.qpoly, &mid);
            if s == 0 {
                unreachable!("irreducible polynomial of degree > 1 has a rational root");
            }
            if s == lo_sign {
                guard.lo = mid;
            } else {
                guard.hi = mid;
            }
        }
        guard.clone()
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta_f.mid()
    }

    /// True if both describe the same embedded field.
    pub fn same(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
        if Arc::ptr_eq(a, b) {
            return true;
        }
        if a.min_poly != b.min_poly {
            return false;
        }
        if a.degree() == 1 {
            return true;
        }
        let (alo, ahi) = a.embedding();
        let (blo, bhi) = b.embedding();
        let lo = if alo < blo { alo } else { blo };
        let hi = if ahi > bhi { ahi } else { bhi };
        if ahi < blo || bhi < alo {
            return false;
        }
        let seq = poly::sturm_sequence(&a.qpoly);
        poly::count_roots(&seq, lo, hi) == 1
    }

    fn reduce(&self, mut prod: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        if prod.len() <= d {
            prod.resize(d, BigRational::zero());
            return prod;
        }
        let mut out: Vec<BigRational> = prod.drain(..d).collect();
        for (j, c) in prod.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, r) in self.reduction[j].iter().enumerate() {
                if !r.is_zero() {
                    out[i] += &c * r;
                }
            }
        }
        out
    }
}

fn pad(mut p: QPoly, d: usize) -> QPoly {
    p.resize(d, BigRational::zero());
    p
}

/// An element of a [`NumberField`], stored as power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("({c})θ"),
                _ => format!("({c})θ^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl FieldElement {
    pub fn new(field: &Arc<NumberField>, mut coords: Vec<BigRational>) -> Result<FieldElement> {
        let d = field.degree();
        if coords.len() > d {
            if coords[d..].iter().any(|c| !c.is_zero()) {
                return Err(Error::DimensionMismatch { expected: d, got: coords.len() });
            }
            coords.truncate(d);
        }
        coords.resize(d, BigRational::zero());
        Ok(FieldElement { field: field.clone(), coords })
    }

    /// Element given by an arbitrary polynomial in θ, reduced mod f.
    pub fn from_poly(field: &Arc<NumberField>, p: Vec<BigRational>) -> FieldElement {
        FieldElement { field: field.clone(), coords: field.reduce(p) }
    }

    pub fn zero(field: &Arc<NumberField>) -> FieldElement {
        FieldElement { field: field.clone(), coords: vec![BigRational::zero(); field.degree()] }
    }

    pub fn one(field: &Arc<NumberField>) -> FieldElement {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> FieldElement {
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[0] = q;
        FieldElement { field: field.clone(), coords }
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> FieldElement {
        Self::from_rational(field, BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(field: &Arc<NumberField>, n: i64, d: i64) -> FieldElement {
        Self::from_rational(field, BigRational::new(n.into(), d.into()))
    }

    /// The generator θ.
    pub fn theta(field: &Arc<NumberField>) -> FieldElement {
        if field.degree() == 1 {
            return Self::from_rational(field, -&field.qpoly[0]);
        }
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[1] = BigRational::one();
        FieldElement { field: field.clone(), coords }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn rational_coords(&self) -> Vec<BigRational> {
        self.coords.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check(&self, other: &FieldElement) {
        assert!(NumberField::same(&self.field, &other.field), "field mismatch in arithmetic");
    }

    pub fn try_inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.field.degree();
        if d == 1 {
            return Ok(Self::from_rational(&self.field, self.coords[0].recip()));
        }
        // Extended Euclid: s·a + t·f = 1.
        let mut a = self.coords.clone();
        poly::trim(&mut a);
        let (mut r0, mut r1) = (self.field.qpoly.clone(), a);
        let (mut s0, mut s1): (QPoly, QPoly) = (Vec::new(), vec![BigRational::one()]);
        while poly::degree(&r1).is_some() {
            let (q, r) = poly::divrem(&r0, &r1);
            let s2 = poly::sub(&s0, &poly::mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant because f is irreducible.
        let c = r0[0].clone();
        let s = poly::scale(&s0, &c.recip());
        Ok(Self::from_poly(&self.field, s))
    }

    pub fn inv(&self) -> FieldElement {
        self.try_inv().expect("inverse of zero")
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    fn coeff_intervals(&self) -> Vec<FInterval> {
        self.coords.iter().map(FInterval::from_rational).collect()
    }

    /// Sign of the real embedding: −1, 0 or +1.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.field.degree() == 1 {
            return if self.coords[0].is_positive() { 1 } else { -1 };
        }
        if let Some(s) = eval_f(&self.coeff_intervals(), self.field.theta_f).sign() {
            return s;
        }
        let mut bits = 96;
        loop {
            let enc = self.field.root_enclosure(bits);
            if let Some(s) = eval_q(&self.coords, &enc).sign() {
                return s;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn cmp_value(&self, other: &FieldElement) -> std::cmp::Ordering {
        (self - other).sign().cmp(&0)
    }

    pub fn abs(&self) -> FieldElement {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Floating approximation of the real embedding.
    pub fn to_f64(&self) -> f64 {
        if self.field.degree() == 1 {
            return self.coords[0].to_f64().unwrap_or(f64::NAN);
        }
        let e = eval_f(&self.coeff_intervals(), self.field.theta_f);
        if e.lo.is_finite() && e.hi.is_finite() && (e.hi - e.lo) <= 1e-12 * e.mid().abs().max(1e-300) {
            return e.mid();
        }
        let enc = self.field.root_enclosure(200);
        let q = eval_q(&self.coords, &enc);
        ((&q.lo + &q.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, q: &BigRational) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c * q).collect() }
    }

    /// Re-express the element in another field through an embedding.
    pub fn map(&self, e: &Embedding) -> FieldElement {
        e.apply(self)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        NumberField::same(&self.field, &other.field) && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        self.check(o);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        self.check(o);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        self.check(o);
        let d = self.field.degree();
        if d == 1 {
            return FieldElement { field: self.field.clone(), coords: vec![&self.coords[0] * &o.coords[0]] };
        }
        let (a, da) = common_denominator(&self.coords);
        let (b, db) = common_denominator(&o.coords);
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let f = &self.field.min_poly;
        for i in (d..2 * d - 1).rev() {
            let c = std::mem::take(&mut prod[i]);
            if c.is_zero() {
                continue;
            }
            for (j, fj) in f[..d].iter().enumerate() {
                if !fj.is_zero() {
                    prod[i - d + j] -= &c * fj;
                }
            }
        }
        let den = da * db;
        let coords = prod.into_iter().take(d).map(|n| BigRational::new(n, den.clone())).collect();
        FieldElement { field: self.field.clone(), coords }
    }
}

/// Integer numerators over the least common denominator.
fn common_denominator(c: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    use num_integer::Integer;
    let den = c.iter().fold(BigInt::one(), |l, x| if x.denom().is_one() { l } else { l.lcm(x.denom()) });
    let nums = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (nums, den)
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn div(self, o: &FieldElement) -> FieldElement {
        self * &o.inv()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);
