use num_rational::BigRational;

use super::*;
use crate::field::{FieldElement, NumberField};
use crate::flow::{first_return_iet, FlowSurface, RigidityOptions, Start};
use crate::geom::PlanarVector;
use crate::surface::square_torus;

fn golden_iet() -> crate::flow::Iet<FieldElement> {
    let f = NumberField::golden();
    let d = PlanarVector::new(FieldElement::one(&f), FieldElement::theta(&f));
    let (fs, _) = FlowSurface::exact(&square_torus(), &d, &[0]).unwrap();
    let tr = fs.transversal(Start::Corner(0, 0), &FieldElement::one(&fs.area.field().clone())).unwrap();
    first_return_iet(&fs, &tr, None, 10_000).unwrap()
}

/// ‖q_n γ‖ = |q_n γ − p_n| for γ = φ − 1, from convergents of its
/// continued fraction expanded in floating point.
fn cf_oracle(n: usize) -> Vec<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x = 1.0 / g;
    let (mut p0, mut q0, mut p1, mut q1) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    let mut out = vec![g.min(1.0 - g)];
    while out.len() < n {
        let a = x.floor();
        x = 1.0 / (x - a);
        (p0, q0, p1, q1) = (p1, q1, a * p1 + p0, a * q1 + q0);
        out.push((q1 * g - p1).abs());
    }
    out
}

#[test]
fn tracker_alpha_one_follows_convergents() {
    let tr = veech_tracker(&golden_iet(), (1.0, 1.618), 1.0, 20).unwrap();
    let oracle = cf_oracle(40);
    // Zorich step n lands on the n-th convergent denominator.
    for s in &tr.steps {
        assert!((s.distance - oracle[s.step]).abs() < 1e-9, "step {}", s.step);
    }
}

#[test]
fn tracker_zero_and_linearity() {
    let iet = golden_iet();
    let z = veech_tracker(&iet, (1.0, 1.618), 0.0, 15).unwrap();
    assert!(z.steps.iter().all(|s| s.distance == 0.0));
    let a = veech_tracker(&iet, (1.0, 1.618), 0.3, 15).unwrap();
    let b = veech_tracker(&iet, (1.0, 1.618), 0.45, 15).unwrap();
    let ab = veech_tracker(&iet, (1.0, 1.618), 0.75, 15).unwrap();
    for i in 0..15 {
        assert!(ab.steps[i].distance <= a.steps[i].distance + b.steps[i].distance + 1e-9);
    }
}

#[test]
fn tracker_sqrt2_recurs() {
    let tr = veech_tracker(&golden_iet(), (1.0, 1.618), 2f64.sqrt(), 50).unwrap();
    for w in tr.steps.windows(10) {
        assert!(w.iter().any(|s| s.distance > 0.1));
    }
}

#[test]
fn exclusion_slope_one_progression() {
    let fs = FlowSurface::float(&square_torus(), 1.0, 1.0, &[0]);
    let r = rigidity_exclusion_scan(&fs, 0.05, &[10.0, 20.0], (0.0, 3.0), &RigidityOptions::default()).unwrap();
    assert_eq!(r.configs_used.len(), 2);
    let rp = replay_exclusions(&r).unwrap();
    assert_eq!(rp.violations, 0);
    assert!(rp.checked > 0);
    // H = 0 at every scale, so the integers survive.
    for a in [0, 1, 2, 3] {
        assert!(exclusion::survives(&BigRational::from_integer(a.into()), 1.0, 0.05).unwrap());
    }
}

#[test]
fn exclusion_golden_keeps_eigenvalue() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let fs = FlowSurface::float(&square_torus(), 1.0, phi, &[0]);
    let sched: Vec<f64> = [21.0, 55.0, 144.0, 377.0].to_vec();
    let wide = rigidity_exclusion_scan(&fs, 0.1, &sched, (0.5, 1.5), &RigidityOptions::default()).unwrap();
    let narrow = rigidity_exclusion_scan(&fs, 0.05, &sched, (0.5, 1.5), &RigidityOptions::default()).unwrap();
    assert_eq!(replay_exclusions(&wide).unwrap().violations, 0);
    assert_eq!(replay_exclusions(&narrow).unwrap().violations, 0);
    let one = BigRational::from_integer(1.into());
    let inside = |r: &ExclusionReport, x: &BigRational| r.survivors.iter().any(|(a, b)| a < x && x < b);
    assert!(inside(&wide, &one) && inside(&narrow, &one));
    for (a, b) in &narrow.survivors {
        let m = (a + b) / BigRational::from_integer(2.into());
        assert!(inside(&wide, &m));
    }
    let m = &narrow.survivor_measure;
    assert!(m.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn torus_character_does_not_decay() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ch = Observable::Character { m: 1, n: 0 };
    let opts = CorrelationOptions { t_values: vec![10.0, 100.0], n_samples: 200, replicates: 4, steps_per_segment: 100, seed: 7 };
    let c = correlation_cesaro(&square_torus(), (1.0, phi), &ch, &ch, &opts).unwrap();
    assert!(c.cesaro_values.iter().all(|&v| v > 0.9), "{:?}", c.cesaro_values);
    assert!(!c.nonergodic_suspected);
    let again = correlation_cesaro(&square_torus(), (1.0, phi), &ch, &ch, &opts).unwrap();
    assert_eq!(again.cesaro_values, c.cesaro_values);
}

#[test]
fn constant_observable_is_uncorrelated() {
    let k = Observable::Constant { value: 2.0 };
    let opts = CorrelationOptions { t_values: vec![5.0], n_samples: 40, replicates: 4, steps_per_segment: 20, seed: 1 };
    let c = correlation_cesaro(&square_torus(), (0.3, 1.0), &k, &k, &opts).unwrap();
    assert!(c.cesaro_values[0].abs() < 1e-12);
}

#[test]
fn periodic_direction_flags_nonergodic() {
    let s = crate::surface::square_torus();
    let b = Observable::Bump { cell: 0, center: (0.5, 0.5), radius: 0.2 };
    let opts = CorrelationOptions { t_values: vec![50.0], n_samples: 40, replicates: 4, steps_per_segment: 400, seed: 3 };
    // Vertical orbits through the bump stay in its column.
    let c = correlation_cesaro(&s, (0.0, 1.0), &b, &b, &opts).unwrap();
    assert!(c.nonergodic_suspected);
}
