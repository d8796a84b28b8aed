//! Dense univariate polynomials over ℚ and ℤ, constant coefficient first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QPoly = Vec<BigRational>;
pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn trim_z(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn to_q(p: &[BigInt]) -> QPoly {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn add(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            match b.get(i) {
                Some(y) => x + y,
                None => x,
            }
        })
        .collect();
    trim(&mut out);
    out
}

pub fn neg(a: &[BigRational]) -> QPoly {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    add(a, &neg(b))
}

pub fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[BigRational], s: &BigRational) -> QPoly {
    let mut out: QPoly = a.iter().map(|c| c * s).collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by nonzero `b`.
pub fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            let t = &c * bc;
            r[i + shift] -= t;
        }
        q[shift] = c;
        r.truncate(dr);
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &[BigRational], b: &[BigRational]) -> QPoly {
    divrem(a, b).1
}

pub fn monic(a: &[BigRational]) -> QPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = a[d].recip();
            scale(a, &inv)
        }
    }
}

pub fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while degree(&y).is_some() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

pub fn derivative(a: &[BigRational]) -> QPoly {
    let mut out: QPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut out);
    out
}

pub fn eval(a: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in a.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn eval_sign(a: &[BigRational], x: &BigRational) -> i32 {
    let v = eval(a, x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(a: &[BigRational]) -> bool {
    degree(&gcd(a, &derivative(a))) == Some(0)
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(a: &[BigRational]) -> Vec<QPoly> {
    let mut seq = vec![a.to_vec(), derivative(a)];
    loop {
        let n = seq.len();
        if degree(&seq[n - 1]).is_none() {
            seq.pop();
            break;
        }
        if degree(&seq[n - 1]) == Some(0) {
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if degree(&r).is_none() {
            break;
        }
        seq.push(neg(&r));
    }
    seq
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for p in seq {
        let s = eval_sign(p, x);
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`.
pub fn count_roots(seq: &[QPoly], lo: &BigRational, hi: &BigRational) -> usize {
    sign_changes(seq, lo) - sign_changes(seq, hi)
}

/// Cauchy bound: every real root lies in `[-B, B]`.
pub fn root_bound(a: &[BigRational]) -> BigRational {
    let d = degree(a).expect("zero polynomial");
    let lead = a[d].abs();
    let mut m = BigRational::zero();
    for c in &a[..d] {
        let r = c.abs() / &lead;
        if r > m {
            m = r;
        }
    }
    m + BigRational::one()
}

pub fn z_divrem_exact(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let (q, r) = divrem(&to_q(a), &to_q(b));
    assert!(r.is_empty(), "inexact integer polynomial division");
    q.into_iter()
        .map(|c| {
            assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// The n-th cyclotomic polynomial Φ_n.
pub fn cyclotomic(n: u64) -> ZPoly {
    let mut p: ZPoly = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = z_divrem_exact(&p, &cyclotomic(d));
        }
    }
    p
}

/// Compose `p(q(x))`.
pub fn compose(p: &[BigRational], q: &[BigRational]) -> QPoly {
    let mut acc: QPoly = Vec::new();
    for c in p.iter().rev() {
        acc = add(&mul(&acc, q), std::slice::from_ref(c));
    }
    acc
}
