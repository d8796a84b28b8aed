//! Compositum of two embedded number fields via a primitive element.

use std::sync::{Arc, Mutex, OnceLock};

use algebraics::polynomial::Polynomial;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{self, QPoly};
use super::{FieldElement, NumberField};
use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_BOUND: usize = 64;

/// Field homomorphism determined by the image of the generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub from: Arc<NumberField>,
    pub to: Arc<NumberField>,
    pub image_of_theta: FieldElement,
}

impl Embedding {
    pub fn identity(f: &Arc<NumberField>) -> Embedding {
        Embedding { from: f.clone(), to: f.clone(), image_of_theta: FieldElement::theta(f) }
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        assert!(NumberField::same(x.field(), &self.from), "embedding applied to foreign element");
        if self.from.degree() == 1 {
            return FieldElement::from_rational(&self.to, x.coords()[0].clone());
        }
        let mut acc = FieldElement::zero(&self.to);
        for c in x.coords().iter().rev() {
            acc = &(&acc * &self.image_of_theta) + &FieldElement::from_rational(&self.to, c.clone());
        }
        acc
    }
}

/// True if the integer polynomial is irreducible over ℚ.
pub fn is_irreducible(p: &[BigInt]) -> bool {
    let f = Polynomial::<BigInt>::from(p.to_vec());
    if f.degree().unwrap_or(0) < 1 {
        return false;
    }
    let fs = f.factor();
    fs.polynomial_factors.len() == 1 && fs.polynomial_factors[0].power == 1
}

fn irreducible_factors(p: &[BigInt]) -> Vec<Vec<BigInt>> {
    let fs = Polynomial::<BigInt>::from(p.to_vec()).factor();
    fs.polynomial_factors.into_iter().map(|f| f.polynomial.into_coefficients()).collect()
}

/// Compositum with the default degree bound.
pub fn compose_fields(
    f1: &Arc<NumberField>,
    f2: &Arc<NumberField>,
) -> Result<(Arc<NumberField>, Embedding, Embedding)> {
    type Entry = (Arc<NumberField>, Arc<NumberField>, (Arc<NumberField>, Embedding, Embedding));
    static CACHE: OnceLock<Mutex<Vec<Entry>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let hit = cache
        .lock()
        .unwrap()
        .iter()
        .find(|(a, b, _)| NumberField::same(a, f1) && NumberField::same(b, f2))
        .map(|(_, _, r)| r.clone());
    if let Some(r) = hit {
        return Ok(r);
    }
    let r = compose_fields_with_bound(f1, f2, DEFAULT_DEGREE_BOUND)?;
    let mut c = cache.lock().unwrap();
    if c.len() >= 32 {
        c.remove(0);
    }
    c.push((f1.clone(), f2.clone(), r.clone()));
    Ok(r)
}

/// Returns a field K with embeddings f1 → K and f2 → K compatible with the
/// distinguished real embeddings.
pub fn compose_fields_with_bound(
    f1: &Arc<NumberField>,
    f2: &Arc<NumberField>,
    bound: usize,
) -> Result<(Arc<NumberField>, Embedding, Embedding)> {
    if NumberField::same(f1, f2) {
        return Ok((f1.clone(), Embedding::identity(f1), Embedding::identity(f1)));
    }
    if f1.degree() == 1 {
        let e1 = Embedding { from: f1.clone(), to: f2.clone(), image_of_theta: FieldElement::zero(f2) };
        return Ok((f2.clone(), e1, Embedding::identity(f2)));
    }
    if f2.degree() == 1 {
        let e2 = Embedding { from: f2.clone(), to: f1.clone(), image_of_theta: FieldElement::zero(f1) };
        return Ok((f1.clone(), Embedding::identity(f1), e2));
    }
    let n = f1.degree() * f2.degree();
    if n > 4 * bound {
        return Err(Error::FieldTooLarge { degree: n, bound });
    }
    for c in [1i64, 2, -1, 3, -2, 5, -3, 7, 11, -5] {
        let cq = BigRational::from_integer(c.into());
        let r = char_poly(&product_matrix(f1.min_poly(), f2.min_poly(), &cq));
        if !poly::is_squarefree(&r) {
            continue;
        }
        let g = select_factor(&r, f1, f2, &cq);
        if g.len() - 1 > bound {
            return Err(Error::FieldTooLarge { degree: g.len() - 1, bound });
        }
        let k = isolate(&g, f1, f2, &cq)?;
        let gamma = FieldElement::theta(&k);
        let Some(t2) = common_root(f1, f2, &gamma, &cq, &k) else { continue };
        let t1 = &gamma - &t2.scale(&cq);
        let e1 = Embedding { from: f1.clone(), to: k.clone(), image_of_theta: t1 };
        let e2 = Embedding { from: f2.clone(), to: k.clone(), image_of_theta: t2 };
        return Ok((k, e1, e2));
    }
    Err(Error::InvalidField("no primitive element found for compositum".into()))
}

/// Matrix of multiplication by θ1 + cθ2 on the basis θ1^i θ2^j.
fn product_matrix(p1: &[BigInt], p2: &[BigInt], c: &BigRational) -> Vec<Vec<BigRational>> {
    let c1 = companion(p1);
    let c2 = companion(p2);
    let (d1, d2) = (c1.len(), c2.len());
    let n = d1 * d2;
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for i in 0..d1 {
        for j in 0..d2 {
            for ip in 0..d1 {
                if !c1[i][ip].is_zero() {
                    m[i * d2 + j][ip * d2 + j] += &c1[i][ip];
                }
            }
            for jp in 0..d2 {
                if !c2[j][jp].is_zero() {
                    m[i * d2 + j][i * d2 + jp] += c * &c2[j][jp];
                }
            }
        }
    }
    m
}

fn companion(p: &[BigInt]) -> Vec<Vec<BigRational>> {
    let d = p.len() - 1;
    let mut c = vec![vec![BigRational::zero(); d]; d];
    for i in 1..d {
        c[i][i - 1] = BigRational::one();
    }
    for (i, row) in c.iter_mut().enumerate() {
        row[d - 1] = BigRational::from_integer(-&p[i]);
    }
    c
}

/// Characteristic polynomial by reduction to Hessenberg form.
pub(crate) fn char_poly(m: &[Vec<BigRational>]) -> QPoly {
    let n = m.len();
    let mut h: Vec<Vec<BigRational>> = m.to_vec();
    for col in 1..n {
        let Some(piv) = (col..n).find(|&i| !h[i][col - 1].is_zero()) else { continue };
        if piv != col {
            h.swap(piv, col);
            for row in h.iter_mut() {
                row.swap(piv, col);
            }
        }
        let t = h[col][col - 1].clone();
        for i in col + 1..n {
            if h[i][col - 1].is_zero() {
                continue;
            }
            let u = &h[i][col - 1] / &t;
            for j in 0..n {
                let v = &u * &h[col][j];
                h[i][j] -= v;
            }
            for row in h.iter_mut() {
                let v = &u * &row[i];
                row[col] += v;
            }
        }
    }
    let x: QPoly = vec![BigRational::zero(), BigRational::one()];
    let mut ps: Vec<QPoly> = vec![vec![BigRational::one()]];
    for mm in 1..=n {
        let mut p = poly::mul(&poly::sub(&x, &[h[mm - 1][mm - 1].clone()]), &ps[mm - 1]);
        let mut t = BigRational::one();
        for i in 1..mm {
            t *= &h[mm - i][mm - i - 1];
            if t.is_zero() {
                break;
            }
            let s = &t * &h[mm - i - 1][mm - 1];
            p = poly::sub(&p, &poly::scale(&ps[mm - i - 1], &s));
        }
        ps.push(p);
    }
    ps.pop().unwrap()
}

fn to_primitive_z(p: &[BigRational]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let z: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = z.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = z.into_iter().map(|c| c / &g).collect();
    if out.last().is_some_and(|c| c.is_negative()) {
        out = out.into_iter().map(|c| -c).collect();
    }
    out
}

/// Enclosure of θ1 + cθ2 of width about 2^-bits.
fn gamma_enclosure(f1: &NumberField, f2: &NumberField, c: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let a = f1.root_enclosure(bits);
    let b = f2.root_enclosure(bits);
    let (blo, bhi) = if c.is_negative() { (&b.hi * c, &b.lo * c) } else { (&b.lo * c, &b.hi * c) };
    (&a.lo + blo, &a.hi + bhi)
}

fn select_factor(r: &[BigRational], f1: &NumberField, f2: &NumberField, c: &BigRational) -> Vec<BigInt> {
    let seq = poly::sturm_sequence(r);
    let mut bits = 32;
    let (lo, hi) = loop {
        let (lo, hi) = gamma_enclosure(f1, f2, c, bits);
        let lo = lo - BigRational::new(BigInt::one(), BigInt::one() << (bits + 2));
        if poly::count_roots(&seq, &lo, &hi) == 1 {
            break (lo, hi);
        }
        bits *= 2;
    };
    let factors = irreducible_factors(&to_primitive_z(r));
    for f in factors {
        let q = poly::to_q(&f);
        if poly::degree(&q) == Some(0) {
            continue;
        }
        if poly::count_roots(&poly::sturm_sequence(&q), &lo, &hi) == 1 {
            let lead = f.last().unwrap().clone();
            assert!(lead.is_one() || (-lead).is_one(), "factor of a monic integer polynomial is monic");
            return if f.last().unwrap().is_negative() { f.into_iter().map(|c| -c).collect() } else { f };
        }
    }
    unreachable!("some factor vanishes at θ1 + cθ2")
}

fn isolate(g: &[BigInt], f1: &NumberField, f2: &NumberField, c: &BigRational) -> Result<Arc<NumberField>> {
    if g.len() == 2 {
        let v = BigRational::from_integer(-&g[0]);
        return NumberField::new_irreducible(g.to_vec(), v.clone(), v);
    }
    let seq = poly::sturm_sequence(&poly::to_q(g));
    let mut bits = 32;
    loop {
        let (lo, hi) = gamma_enclosure(f1, f2, c, bits);
        let lo = lo - BigRational::new(BigInt::one(), BigInt::one() << (bits + 2));
        if poly::count_roots(&seq, &lo, &hi) == 1 {
            return NumberField::new_irreducible(g.to_vec(), lo, hi);
        }
        bits *= 2;
    }
}

type KPoly = Vec<FieldElement>;

fn k_trim(p: &mut KPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn k_rem(a: &KPoly, b: &KPoly) -> KPoly {
    let mut r = a.clone();
    k_trim(&mut r);
    let db = b.len() - 1;
    let inv = b[db].inv();
    while r.len() > db {
        let dr = r.len() - 1;
        let q = &r[dr] * &inv;
        for i in 0..=db {
            let t = &q * &b[i];
            r[dr - db + i] = &r[dr - db + i] - &t;
        }
        r.pop();
        k_trim(&mut r);
    }
    r
}

/// θ2 as the unique common root of f1(γ − c·y) and f2(y) over K.
fn common_root(
    f1: &NumberField,
    f2: &NumberField,
    gamma: &FieldElement,
    c: &BigRational,
    k: &Arc<NumberField>,
) -> Option<FieldElement> {
    let konst = |q: &BigRational| FieldElement::from_rational(k, q.clone());
    let lin: KPoly = vec![gamma.clone(), konst(&-c)];
    let mut a: KPoly = vec![FieldElement::zero(k)];
    for coef in f1.min_poly().iter().rev() {
        let mut next: KPoly = vec![FieldElement::zero(k); a.len() + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in lin.iter().enumerate() {
                next[i + j] = &next[i + j] + &(x * y);
            }
        }
        next[0] = &next[0] + &konst(&BigRational::from_integer(coef.clone()));
        a = next;
    }
    k_trim(&mut a);
    let mut b: KPoly = f2.min_poly().iter().map(|x| konst(&BigRational::from_integer(x.clone()))).collect();
    while !b.is_empty() {
        let r = k_rem(&a, &b);
        a = b;
        b = r;
    }
    if a.len() != 2 {
        return None;
    }
    Some(-(&a[0] / &a[1]))
}
