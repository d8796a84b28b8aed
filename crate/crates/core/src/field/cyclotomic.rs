//! Real cyclotomic fields ℚ(2cos(2π/n)) and exact tables of cos(πj/k), sin(πj/k).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{self, QPoly};
use super::{FieldElement, NumberField};

/// cos(πj/k) and sin(πj/k) for j = 0..2k, exact in the smallest real
/// cyclotomic field containing both.
#[derive(Clone, Debug)]
pub struct AngleTable {
    pub k: u64,
    pub field: Arc<NumberField>,
    pub cos: Vec<FieldElement>,
    pub sin: Vec<FieldElement>,
}

impl AngleTable {
    /// Unit vector at angle πj/k (j taken mod 2k).
    pub fn unit(&self, j: i64) -> (FieldElement, FieldElement) {
        let m = j.rem_euclid(2 * self.k as i64) as usize;
        (self.cos[m].clone(), self.sin[m].clone())
    }
}

/// Vieta–Lucas polynomials: L_m(x + 1/x) = x^m + x^-m.
fn lucas(m: usize) -> QPoly {
    let two = BigRational::from_integer(2.into());
    let mut a: QPoly = vec![two];
    let mut b: QPoly = vec![BigRational::zero(), BigRational::one()];
    if m == 0 {
        return a;
    }
    let x: QPoly = vec![BigRational::zero(), BigRational::one()];
    for _ in 1..m {
        let c = poly::sub(&poly::mul(&x, &b), &a);
        a = b;
        b = c;
    }
    b
}

/// Minimal polynomial Ψ_n of 2cos(2π/n), n ≥ 3.
fn real_cyclotomic(n: u64) -> QPoly {
    let phi = poly::to_q(&poly::cyclotomic(n));
    let deg = phi.len() - 1;
    let m = deg / 2;
    // Φ_n(x)/x^m = c_m + Σ_j c_{m+j}(x^j + x^-j), by palindromy.
    let mut out: QPoly = vec![phi[m].clone()];
    for j in 1..=m {
        out = poly::add(&out, &poly::scale(&lucas(j), &phi[m + j]));
    }
    out
}

fn build(k: u64) -> AngleTable {
    let n = if k % 2 == 0 { 2 * k } else { 4 * k };
    // n = 4 gives θ = 0, which is how ℚ is represented.
    let field = if n <= 4 {
        NumberField::rationals()
    } else {
        let psi = real_cyclotomic(n);
        let ipoly: Vec<BigInt> = psi.iter().map(|c| c.to_integer()).collect();
        let v = 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
        let eps = 1e-6;
        let lo = BigRational::from_float(v - eps).unwrap();
        let hi = BigRational::from_float(v + eps).unwrap();
        NumberField::new_irreducible(ipoly, lo, hi).expect("isolating interval for 2cos(2π/n)")
    };
    let theta = FieldElement::theta(&field);
    let half = BigRational::new(BigInt::one(), 2.into());
    // cos(2πm/n) = L_m(θ)/2, evaluated in the field.
    let cos_2pi = |m: i64| -> FieldElement {
        let m = m.unsigned_abs() as usize % n as usize;
        let p = lucas(m);
        let mut acc = FieldElement::zero(&field);
        for c in p.iter().rev() {
            acc = &(&acc * &theta) + &FieldElement::from_rational(&field, c.clone());
        }
        acc.scale(&half)
    };
    let ratio = (n / (2 * k)) as i64;
    let mut cos = Vec::with_capacity(2 * k as usize);
    let mut sin = Vec::with_capacity(2 * k as usize);
    for j in 0..(2 * k as i64) {
        cos.push(cos_2pi(j * ratio));
        // sin(πj/k) = cos(2π(k-2j)/(4k)).
        sin.push(cos_2pi((k as i64 - 2 * j) * (n as i64) / (4 * k as i64)));
    }
    AngleTable { k, field, cos, sin }
}

/// Angle table for denominator k ≥ 1 (cached).
pub fn angle_field(k: u64) -> AngleTable {
    static CACHE: OnceLock<Mutex<HashMap<u64, AngleTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&k) {
        return t.clone();
    }
    let t = build(k);
    cache.lock().unwrap().insert(k, t.clone());
    t
}
