use num_bigint::BigInt;

use super::*;
use crate::field::{FieldElement, NumberField};
use crate::geom::PlanarVector;
use crate::homology::{homology_basis, period_matrix, pairing};
use crate::surface::square_torus;

fn golden_torus() -> (ExactFlowSurface, crate::surface::TranslationSurface) {
    let f = NumberField::golden();
    let d = PlanarVector::new(FieldElement::one(&f), FieldElement::theta(&f));
    FlowSurface::exact(&square_torus(), &d, &[0]).unwrap()
}

#[test]
fn golden_rotation_iet() {
    let (fs, framed) = golden_torus();
    let f = framed.field.clone();
    let tr = fs.transversal(Start::Corner(0, 0), &FieldElement::one(&f)).unwrap();
    let b = homology_basis(&framed).unwrap();
    let iet = first_return_iet(&fs, &tr, Some(&b), 10_000).unwrap();
    let phi = FieldElement::theta(&f);
    let one = FieldElement::one(&f);
    assert_eq!(iet.lengths, vec![&FieldElement::from_int(&f, 2) - &phi, &phi - &one]);
    assert_eq!(iet.bottom, vec![1, 0]);
    let pm = period_matrix(&framed, &b);
    for s in 0..2 {
        assert_eq!(iet.return_times[s], &phi - &one);
        assert_eq!(pairing(&pm.im, &iet.symbol_cycles[s]).unwrap(), iet.return_times[s]);
        assert_eq!(pairing(&pm.re, &iet.symbol_cycles[s]).unwrap(), -&iet.translations[s]);
    }
}

#[test]
fn golden_zorich_matrices() {
    let (fs, framed) = golden_torus();
    let f = framed.field.clone();
    let tr = fs.transversal(Start::Corner(0, 0), &FieldElement::one(&f)).unwrap();
    let b = homology_basis(&framed).unwrap();
    let mut iet = first_return_iet(&fs, &tr, Some(&b), 10_000).unwrap();
    let pm = period_matrix(&framed, &b);
    let mut ratios = Vec::new();
    for _ in 0..12 {
        let before = iet.lengths.clone();
        let st = iet.zorich_step().unwrap();
        assert_eq!(st.rauzy_steps, 1);
        let det = st.matrix[0][0] * st.matrix[1][1] - st.matrix[0][1] * st.matrix[1][0];
        assert_eq!(det.abs(), 1);
        for i in 0..2 {
            let mut acc = FieldElement::zero(&f);
            for j in 0..2 {
                acc = &acc + &(&iet.lengths[j] * &FieldElement::from_int(&f, st.matrix[i][j]));
            }
            assert_eq!(acc, before[i]);
        }
        for s in 0..2 {
            assert_eq!(pairing(&pm.im, &iet.symbol_cycles[s]).unwrap(), iet.return_times[s]);
        }
        ratios.push(before.iter().map(|x| x.to_f64()).sum::<f64>() / iet.total_length().to_f64());
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((ratios.last().unwrap() - phi).abs() < 1e-6);
}

#[test]
fn rational_rotation_ties() {
    let q = NumberField::rationals();
    let mut iet = Iet {
        lengths: vec![FieldElement::from_ratio(&q, 1, 3), FieldElement::from_ratio(&q, 2, 3)],
        top: vec![0, 1],
        bottom: vec![1, 0],
        return_times: vec![FieldElement::one(&q); 2],
        translations: vec![FieldElement::from_ratio(&q, 2, 3), FieldElement::from_ratio(&q, -1, 3)],
        symbol_cycles: Vec::new(),
    };
    let mut err = None;
    for _ in 0..10 {
        if let Err(e) = iet.zorich_step() {
            err = Some(e);
            break;
        }
    }
    assert!(matches!(err, Some(crate::error::Error::Tie) | Some(crate::error::Error::Degenerate)));
}

#[test]
fn float_matches_exact() {
    let (fs, _) = golden_torus();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ff = FlowSurface::float(&square_torus(), 1.0, phi, &[0]);
    let tr = ff.transversal(Start::Corner(0, 0), &1.0).unwrap();
    let iet = first_return_iet(&ff, &tr, None, 10_000).unwrap();
    assert!((iet.lengths[0] - (2.0 - phi)).abs() < 1e-12);
    assert_eq!(fs.num_cells(), 1);
    let _ = BigInt::from(0);
}

fn pentagon_surface() -> crate::surface::TranslationSurface {
    use crate::polygon::{triangle, RationalAngle};
    let a = |n, d| RationalAngle::new(n, d).unwrap();
    crate::unfold::unfold(&triangle([a(1, 5), a(1, 5), a(3, 5)]).unwrap()).unwrap()
}

#[test]
fn torus_cylinders() {
    let s = square_torus();
    let q = s.field.clone();
    let d = PlanarVector::new(FieldElement::one(&q), FieldElement::zero(&q));
    let (fs, framed) = FlowSurface::exact(&s, &d, &[]).unwrap();
    let b = homology_basis(&framed).unwrap();
    let cyl = fs.cylinders(Some(&b), 1000).unwrap();
    assert_eq!(cyl.len(), 1);
    assert!(cyl[0].circumference.is_one() && cyl[0].height.is_one());
    let pm = period_matrix(&framed, &b);
    assert!(pairing(&pm.im, &cyl[0].waist).unwrap().is_one());
}

#[test]
fn unfolded_square_cylinders() {
    use crate::polygon::{validate_polygon, RationalAngle};
    let q = NumberField::rationals();
    let sq = validate_polygon(&[RationalAngle::new(1, 2).unwrap(); 4], &vec![FieldElement::one(&q); 4], &q).unwrap();
    let s = crate::unfold::unfold(&sq).unwrap();
    let d = PlanarVector::new(FieldElement::one(&q), FieldElement::zero(&q));
    let (fs, _) = FlowSurface::exact(&s, &d, &[]).unwrap();
    let cyl = fs.cylinders(None, 1000).unwrap();
    let total = cyl.iter().fold(FieldElement::zero(&q), |acc, c| &acc + &(&c.circumference * &c.height));
    assert_eq!(total, FieldElement::from_int(&q, 4));
}

#[test]
fn pentagon_diagonal_cylinders() {
    let s = pentagon_surface();
    // Horizontal is the direction of the first side, parallel to a diagonal.
    let f = s.field.clone();
    let d = PlanarVector::new(FieldElement::one(&f), FieldElement::zero(&f));
    let (fs, framed) = FlowSurface::exact(&s, &d, &[]).unwrap();
    let b = homology_basis(&framed).unwrap();
    let cyl = fs.cylinders(Some(&b), 10_000).unwrap();
    let total = cyl.iter().fold(FieldElement::zero(&framed.field), |acc, c| &acc + &c.area);
    assert_eq!(total, fs.area);
    assert_eq!(cyl.len(), 2);
    let r = &cyl[0].circumference / &cyl[1].circumference;
    assert!(r.as_rational().is_none());
    let pm = period_matrix(&framed, &b);
    for c in &cyl {
        assert_eq!(pairing(&pm.im, &c.waist).unwrap(), c.circumference);
    }
}

#[test]
fn pentagon_vertical_iet() {
    let s = pentagon_surface();
    let f = s.field.clone();
    let d = PlanarVector::new(FieldElement::zero(&f), FieldElement::one(&f));
    let (fs, framed) = FlowSurface::exact(&s, &d, &[]).unwrap();
    let b = homology_basis(&framed).unwrap();
    // Cell 0 edge 0 is horizontal and starts at the cone point.
    let start = (0..3).find(|&j| fs.stop[fs.vertex_of((0, j))] && fs.edges[0][j].y.is_zero() && fs.edges[0][j].x.is_positive()).unwrap();
    let len = fs.edges[0][start].x.clone();
    let tr = fs.transversal(Start::Corner(0, start), &len).unwrap();
    let iet = first_return_iet(&fs, &tr, Some(&b), 100_000).unwrap();
    assert!(iet.dim() <= 2 * framed.genus + framed.cone_points().len() - 1, "{}", iet.dim());
    let pm = period_matrix(&framed, &b);
    for sym in 0..iet.dim() {
        assert_eq!(pairing(&pm.im, &iet.symbol_cycles[sym]).unwrap(), iet.return_times[sym]);
        assert_eq!(pairing(&pm.re, &iet.symbol_cycles[sym]).unwrap(), -&iet.translations[sym]);
    }
}

fn fib(n: usize) -> i64 {
    let (mut a, mut b) = (0i64, 1i64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

#[test]
fn golden_rigidity_exact() {
    let (fs, framed) = golden_torus();
    let f = framed.field.clone();
    let b = homology_basis(&framed).unwrap();
    let pm = period_matrix(&framed, &b);
    let l = FieldElement::from_int(&f, fib(8));
    let opts = RigidityOptions::default();
    let cfg = fs.rigidity_configuration(&l, Some(&b), &opts).unwrap();
    let rep = fs.check_rigidity(&cfg, &opts).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(pairing(&pm.im, &cfg.curve_class).unwrap(), cfg.v);
    assert_eq!(pairing(&pm.re, &cfg.curve_class).unwrap(), -&cfg.displacement);
    assert!(cfg.constant < 100.0, "C = {}", cfg.constant);
}

#[test]
fn golden_rigidity_float() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let fs = FlowSurface::float(&square_torus(), 1.0, phi, &[0]);
    let opts = RigidityOptions::default();
    for n in [8, 10, 12] {
        let l = fib(n) as f64;
        let cfg = fs.rigidity_configuration(&l, None, &opts).unwrap();
        assert!(fs.check_rigidity(&cfg, &opts).unwrap().passed());
        assert!(cfg.v / l <= cfg.constant && l / cfg.v <= cfg.constant);
        assert!(cfg.h * l <= cfg.constant);
    }
}

#[test]
fn pentagon_and_periodic_rigidity() {
    let opts = RigidityOptions::default();
    let fs = FlowSurface::float(&pentagon_surface(), 0.3, 1.0, &[]);
    let cfg = fs.rigidity_configuration(&10.0, None, &opts).unwrap();
    assert!(fs.check_rigidity(&cfg, &opts).unwrap().passed());
    assert!(cfg.constant < 20.0);
    let fs = FlowSurface::float(&square_torus(), 1.0, 1.0, &[0]);
    let cfg = fs.rigidity_configuration(&10.0, None, &opts).unwrap();
    assert_eq!((cfg.case, cfg.v, cfg.h), (RigidityCase::LongReturn, 1.0, 0.0));
}
