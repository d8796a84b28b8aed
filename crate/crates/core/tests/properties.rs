use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use wmflat_core::classify::taut_rational_subspace;
use wmflat_core::field::angle_field;
use wmflat_core::homology::cup;
use wmflat_core::io::{polygon_from_json, polygon_to_json, surface_from_json, surface_to_json};
use wmflat_core::polygon::triangle;
use wmflat_core::*;

fn field_for(k: u64) -> Arc<NumberField> {
    angle_field(k).field
}

fn element(f: &Arc<NumberField>, c: &[(i64, i64)]) -> FieldElement {
    let coords = c.iter().take(f.degree()).map(|&(n, d)| BigRational::new(n.into(), d.into())).collect();
    FieldElement::new(f, coords).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), 12)
}

fn field_k() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 8, 9, 11, 12])
}

/// Labeled triangle aπ/k, bπ/k, cπ/k.
fn triangle_angles() -> impl Strategy<Value = [RationalAngle; 3]> {
    (3i64..=10)
        .prop_flat_map(|k| (Just(k), 1..k - 1))
        .prop_flat_map(|(k, a)| (Just(k), Just(a), 1..k - a))
        .prop_map(|(k, a, b)| {
            let c = k - a - b;
            [a, b, c].map(|x| RationalAngle::new(x, k).unwrap())
        })
}

fn schoolbook(x: &FieldElement, y: &FieldElement) -> FieldElement {
    let d = x.field().degree();
    let mut p = vec![BigRational::zero(); 2 * d - 1];
    for (i, a) in x.coords().iter().enumerate() {
        for (j, b) in y.coords().iter().enumerate() {
            p[i + j] += a * b;
        }
    }
    FieldElement::from_poly(x.field(), p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_ring_laws(k in field_k(), a in coords(), b in coords(), c in coords()) {
        let f = field_for(k);
        let (x, y, z) = (element(&f, &a), element(&f, &b), element(&f, &c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &y, schoolbook(&x, &y));
        if !x.is_zero() {
            prop_assert!((&x * &x.inv()).is_one());
        }
    }

    #[test]
    fn sign_agrees_with_float(k in field_k(), a in coords()) {
        let x = element(&field_for(k), &a);
        let v = x.to_f64();
        if v.abs() > 1e-9 {
            prop_assert_eq!(x.sign(), if v > 0.0 { 1 } else { -1 });
        }
        prop_assert_eq!(x.sign() == 0, x.is_zero());
        prop_assert_eq!((&x - &x.abs()).sign() <= 0, true);
    }

    #[test]
    fn rational_elements_round_trip(n in -1000i64..1000, d in 1i64..1000, k in field_k()) {
        let q = BigRational::new(n.into(), d.into());
        let x = FieldElement::from_rational(&field_for(k), q.clone());
        prop_assert_eq!(x.as_rational(), Some(q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unfolding_invariants(t in triangle_angles()) {
        let p = triangle(t).unwrap();
        let s = unfold(&p).unwrap();
        let k = p.k;
        prop_assert_eq!(s.cells.len() as i64, 2 * k);
        prop_assert_eq!(&s.area, &p.area().scale(&BigRational::from_integer((2 * k).into())));
        let chi = s.vertices.len() as i64 - s.num_edges() as i64 + s.cells.len() as i64;
        prop_assert_eq!(2 - chi, 2 * s.genus as i64);
        // Cone angle excesses, in units of 2π, sum to 2g - 2.
        let excess: i64 = s.vertices.iter().map(|v| v.angle_multiple as i64 - 1).sum();
        prop_assert_eq!(excess, 2 * s.genus as i64 - 2);
    }

    #[test]
    fn periods_are_symplectic(t in triangle_angles()) {
        let s = unfold(&triangle(t).unwrap()).unwrap();
        let b = homology_basis(&s).unwrap();
        prop_assert_eq!(b.rank(), 2 * s.genus);
        let pm = period_matrix(&s, &b);
        prop_assert_eq!(cup(&b, &pm.re, &pm.im), s.area.clone());
        prop_assert!(cup(&b, &pm.re, &pm.re).is_zero());
    }

    #[test]
    fn verdict_is_similarity_invariant(t in triangle_angles(), n in 1i64..9, d in 1i64..9) {
        let p = triangle(t).unwrap();
        let base = classify_polygon(&p).unwrap();
        let q = BigRational::new(n.into(), d.into());
        let scaled = p.scaled(&FieldElement::from_rational(&p.field, q)).unwrap();
        let v = classify_polygon(&scaled).unwrap();
        prop_assert_eq!(v.weakly_mixing, base.weakly_mixing);
        prop_assert_eq!(v.kernel_dim, base.kernel_dim);
        let mirror = classify_polygon(&p.reversed().unwrap()).unwrap();
        prop_assert_eq!(mirror.weakly_mixing, base.weakly_mixing);
        let rotated = triangle([t[1], t[2], t[0]]).unwrap();
        prop_assert_eq!(classify_polygon(&rotated).unwrap().weakly_mixing, base.weakly_mixing);
    }

    #[test]
    fn basis_change_preserves_taut_dimension(t in triangle_angles(), ops in prop::collection::vec((0usize..64, 0usize..64, any::<bool>()), 1..12)) {
        let s = unfold(&triangle(t).unwrap()).unwrap();
        let b = homology_basis(&s).unwrap();
        let n = b.rank();
        prop_assume!(n >= 2);
        let dim = taut_rational_subspace(&period_matrix(&s, &b)).dim();
        let mut u: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect()).collect();
        for (i, j, plus) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            let c = BigInt::from(if plus { 1 } else { -1 });
            for col in 0..n {
                let v = &u[j][col] * &c;
                u[i][col] += v;
            }
        }
        let b2 = b.change_basis(&u).unwrap();
        let pm2 = period_matrix(&s, &b2);
        prop_assert_eq!(taut_rational_subspace(&pm2).dim(), dim);
        prop_assert_eq!(cup(&b2, &pm2.re, &pm2.im), s.area.clone());
    }

    #[test]
    fn json_round_trip(t in triangle_angles()) {
        let p = triangle(t).unwrap();
        let p2 = polygon_from_json(&polygon_to_json(&p)).unwrap();
        prop_assert_eq!(&p2.lengths, &p.lengths);
        let s = unfold(&p).unwrap();
        let s2 = surface_from_json(&surface_to_json(&s)).unwrap();
        prop_assert_eq!(&s2.cells, &s.cells);
        prop_assert_eq!(s2.gluings(), s.gluings());
        prop_assert_eq!(&s2.area, &s.area);
    }
}
