//! Virtual-eigenvalue tracker along Zorich renormalization.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowSurface, Iet, Scalar, Start, Transversal, WalkEnd};

/// Distortion (longest over shortest interval) beyond which a step is
/// marked as an excursion.
pub const EXCURSION_DISTORTION: f64 = 1e3;

#[derive(Clone, Debug, Serialize)]
pub struct TrackerStep {
    pub step: usize,
    /// log of the max-row-sum norm of the accumulated cocycle.
    pub log_norm: f64,
    /// ℓ∞ distance of the transported vector to ℤ^d.
    pub distance: f64,
    pub distortion: f64,
    pub excursion: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackerTrace {
    pub alpha: f64,
    pub direction: (f64, f64),
    pub dim: usize,
    pub steps: Vec<TrackerStep>,
}

fn frac_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Reduce each coordinate into [-1/2, 1/2].
fn reduce(v: &mut [f64]) {
    for x in v.iter_mut() {
        *x -= x.round();
    }
}

/// Horizontal saddle connection starting at the first stop vertex, or the
/// rightward segment of length `fallback` from it.
pub fn default_transversal<T: Scalar>(fs: &FlowSurface<T>, fallback: &T) -> Result<Transversal<T>> {
    let z = fallback.zero_like();
    let right = crate::flow::Vec2::new(z.int_like(1), z.clone());
    let v = (0..fs.stop.len())
        .find(|&v| fs.stop[v])
        .ok_or_else(|| Error::InvalidSurface("no cone point or marked point for a transversal".into()))?;
    let corner = fs.corners_containing(v, &right)[0];
    let big = z.int_like(1 << 20);
    let w = fs.walk(Start::Corner(corner.0, corner.1), &right, &big, &[], 100_000);
    match w {
        Ok(w) if matches!(w.end, WalkEnd::Stop(_)) => fs.transversal(Start::Corner(corner.0, corner.1), &w.t),
        _ => fs.transversal(Start::Corner(corner.0, corner.1), fallback),
    }
}

fn distortion<T: Scalar>(iet: &Iet<T>) -> f64 {
    let l: Vec<f64> = iet.lengths.iter().map(|x| x.to_f64()).collect();
    let max = l.iter().cloned().fold(0.0, f64::max);
    let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Transport α·(return times) by the Zorich cocycle, reducing modulo ℤ^d
/// after each step. Floating lengths are renormalized to total 1 after every
/// step; this leaves the combinatorics unchanged.
pub fn veech_tracker<T: Scalar>(iet: &Iet<T>, direction: (f64, f64), alpha: f64, n_steps: usize) -> Result<TrackerTrace> {
    let mut iet = iet.clone();
    let d = iet.dim();
    let mut v: Vec<f64> = iet.return_times.iter().map(|h| alpha * h.to_f64()).collect();
    reduce(&mut v);
    let mut acc: Vec<Vec<i128>> = (0..d).map(|i| (0..d).map(|j| i128::from(i == j)).collect()).collect();
    let mut steps = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let st = iet.zorich_step()?;
        // h_new = Mᵀ h_old
        let mut w = vec![0.0; d];
        for (i, wi) in w.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *wi += st.matrix[j][i] as f64 * vj;
            }
        }
        reduce(&mut w);
        v = w;
        let mut next = vec![vec![0i128; d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0i128;
                for k in 0..d {
                    s = acc[i][k]
                        .checked_mul(i128::from(st.matrix[k][j]))
                        .and_then(|x| s.checked_add(x))
                        .ok_or_else(|| Error::Precision("cocycle entries overflow i128".into()))?;
                }
                next[i][j] = s;
            }
        }
        acc = next;
        if !T::EXACT {
            let total = iet.total_length();
            for l in iet.lengths.iter_mut() {
                *l = l.div(&total);
            }
        }
        let norm = acc.iter().map(|r| r.iter().map(|x| x.abs() as f64).sum::<f64>()).fold(0.0, f64::max);
        let dist = distortion(&iet);
        steps.push(TrackerStep {
            step: n,
            log_norm: norm.ln(),
            distance: v.iter().map(|&x| frac_dist(x)).fold(0.0, f64::max),
            distortion: dist,
            excursion: dist > EXCURSION_DISTORTION,
        });
    }
    Ok(TrackerTrace { alpha, direction, dim: d, steps })
}
