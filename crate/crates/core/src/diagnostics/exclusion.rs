//! Exclusion of candidate eigenvalues by rigidity configurations.
//!
//! A configuration with normalized area σ/area ≥ ε forces every eigenvalue α
//! to satisfy d(αV, ℤ) < ε. Intervals are kept with exact rational endpoints
//! built from the binary64 values of V and ε, so each exclusion can be
//! replayed exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowSurface, RigidityOptions, Scalar};

#[derive(Clone, Debug, Serialize)]
pub struct UsedConfig {
    pub l: f64,
    pub v: f64,
    pub sigma: f64,
    pub normalized_sigma: f64,
    pub case: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct Excluded {
    #[serde(serialize_with = "ser_q")]
    pub lo: BigRational,
    #[serde(serialize_with = "ser_q")]
    pub hi: BigRational,
    /// Index into `configs_used`.
    pub config: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionReport {
    pub epsilon: f64,
    pub window: (f64, f64),
    pub configs_used: Vec<UsedConfig>,
    /// Scales whose configuration imposed no constraint, with the reason.
    pub skipped: Vec<(f64, String)>,
    pub intervals: Vec<Excluded>,
    #[serde(serialize_with = "ser_intervals")]
    pub survivors: Vec<(BigRational, BigRational)>,
    /// Survivor measure after each used configuration.
    pub survivor_measure: Vec<f64>,
    pub note: String,
}

fn ser_q<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::io::rational_string(q))
}

fn ser_intervals<S: serde::Serializer>(v: &[(BigRational, BigRational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (a, b) in v {
        seq.serialize_element(&[crate::io::rational_string(a), crate::io::rational_string(b)])?;
    }
    seq.end()
}

pub fn q_of(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Precision(format!("non-finite value {x}")))
}

fn measure(v: &[(BigRational, BigRational)]) -> f64 {
    v.iter().map(|(a, b)| (b - a).to_f64().unwrap_or(f64::NAN)).sum()
}

/// Closed windows ((n − ε)/V, (n + ε)/V) ∩ [lo, hi] of α with d(αV, ℤ) < ε
/// (the open condition is tracked by the replay, which checks exclusions).
fn allowed(v: &BigRational, eps: &BigRational, lo: &BigRational, hi: &BigRational) -> Vec<(BigRational, BigRational)> {
    let (a, b) = if v.is_positive() { (lo * v, hi * v) } else { (hi * v, lo * v) };
    let n0 = (&a - eps).ceil().to_integer();
    let n1 = (&b + eps).floor().to_integer();
    let mut out: Vec<(BigRational, BigRational)> = Vec::new();
    let mut n = n0;
    while n <= n1 {
        let c = BigRational::from_integer(n.clone());
        let (mut x, mut y) = ((&c - eps) / v, (&c + eps) / v);
        if x > y {
            std::mem::swap(&mut x, &mut y);
        }
        let x = x.max(lo.clone());
        let y = y.min(hi.clone());
        if x < y {
            match out.last_mut() {
                Some(last) if last.1 >= x => last.1 = last.1.clone().max(y),
                _ => out.push((x, y)),
            }
        }
        n += BigInt::one();
    }
    out.sort();
    out
}

fn intersect(a: &[(BigRational, BigRational)], b: &[(BigRational, BigRational)]) -> Vec<(BigRational, BigRational)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.clone().max(b[j].0.clone());
        let hi = a[i].1.clone().min(b[j].1.clone());
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// a \ b for sorted disjoint lists.
fn difference(a: &[(BigRational, BigRational)], b: &[(BigRational, BigRational)]) -> Vec<(BigRational, BigRational)> {
    let mut out = Vec::new();
    for (lo, hi) in a {
        let mut cur = lo.clone();
        for (x, y) in b.iter().filter(|(x, y)| y > lo && x < hi) {
            if *x > cur {
                out.push((cur.clone(), x.clone()));
            }
            cur = cur.max(y.clone());
        }
        if cur < *hi {
            out.push((cur, hi.clone()));
        }
    }
    out
}

/// Scan α ∈ window against the configurations built at each scale.
pub fn rigidity_exclusion_scan<T: Scalar>(
    fs: &FlowSurface<T>,
    epsilon: f64,
    l_schedule: &[T],
    window: (f64, f64),
    opts: &RigidityOptions,
) -> Result<ExclusionReport> {
    let eps = q_of(epsilon)?;
    let (lo, hi) = (q_of(window.0)?, q_of(window.1)?);
    let area = fs.area.to_f64();
    let mut survivors = vec![(lo.clone(), hi.clone())];
    let mut report = ExclusionReport {
        epsilon,
        window,
        configs_used: Vec::new(),
        skipped: Vec::new(),
        intervals: Vec::new(),
        survivors: Vec::new(),
        survivor_measure: Vec::new(),
        note: "only configurations built by the scanner are used; survivors may contain non-eigenvalues".into(),
    };
    for l in l_schedule {
        let cfg = match fs.rigidity_configuration(l, None, opts) {
            Ok(c) => c,
            Err(e) => {
                report.skipped.push((l.to_f64(), e.code().to_string()));
                continue;
            }
        };
        let (v, sigma) = (cfg.v.to_f64(), cfg.sigma.to_f64());
        if sigma / area < epsilon {
            report.skipped.push((l.to_f64(), "SIGMA_BELOW_EPSILON".into()));
            continue;
        }
        let idx = report.configs_used.len();
        report.configs_used.push(UsedConfig { l: l.to_f64(), v, sigma, normalized_sigma: sigma / area, case: cfg.case.number() });
        let ok = allowed(&q_of(v)?, &eps, &lo, &hi);
        for (a, b) in difference(&survivors, &ok) {
            report.intervals.push(Excluded { lo: a, hi: b, config: idx });
        }
        survivors = intersect(&survivors, &ok);
        report.survivor_measure.push(measure(&survivors));
    }
    report.survivors = survivors;
    Ok(report)
}

/// Outcome of re-checking every excluded interval against its configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Replay {
    pub checked: usize,
    pub violations: usize,
}

/// Exact check that for all α in each excluded [lo, hi], d(αV, ℤ) ≥ ε: both
/// endpoints lie in one band [n + ε, n + 1 − ε] after scaling by V.
pub fn replay_exclusions(r: &ExclusionReport) -> Result<Replay> {
    let eps = q_of(r.epsilon)?;
    let band = |x: &BigRational| -> (BigInt, BigRational) {
        let f = x.floor();
        (f.to_integer(), x - f)
    };
    let mut out = Replay { checked: 0, violations: 0 };
    for ex in &r.intervals {
        let v = q_of(r.configs_used[ex.config].v)?;
        let (na, fa) = band(&(&ex.lo * &v));
        let (nb, fb) = band(&(&ex.hi * &v));
        let one = BigRational::one();
        let ok = na == nb && fa >= eps && fa <= &one - &eps && fb >= eps && fb <= &one - &eps;
        out.checked += 1;
        if !ok {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// d(x, ℤ) for a rational.
pub fn dist_to_z(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// True when α survives a single configuration.
pub fn survives(alpha: &BigRational, v: f64, epsilon: f64) -> Result<bool> {
    let d = dist_to_z(&(alpha * q_of(v)?));
    Ok(d < q_of(epsilon)?)
}
