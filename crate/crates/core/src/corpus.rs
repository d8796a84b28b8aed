//! Built-in test corpus: rational triangles by angle denominator, tori,
//! L-shaped tables and the double pentagon; random polygons for sweeps.

use num_integer::Integer;
use rand::Rng;
use serde_json::{json, Value};

use crate::classify::{classify_polygon_with, classify_surface, ClassifyOptions, Verdict};
use crate::error::Result;
use crate::field::{angle_field, FieldElement, NumberField};
use crate::io::{polygon_to_json, verdict_to_json};
use crate::polygon::{l_shaped_table, triangle, validate_polygon, RationalAngle, RationalPolygon};
use crate::surface::{square_torus, TranslationSurface};
use crate::unfold::unfold;

/// Labeled rational triangles (p₁, p₂, p₃)·π/k with gcd(p₁, p₂, p₃, k) = 1,
/// ordered by k and then lexicographically; the first `count` are returned.
pub fn triangle_enumeration(count: usize) -> Vec<[RationalAngle; 3]> {
    let mut out = Vec::with_capacity(count);
    let mut k = 3i64;
    while out.len() < count {
        for a in 1..k {
            for b in 1..k - a {
                let c = k - a - b;
                if a.gcd(&b).gcd(&c).gcd(&k) == 1 && out.len() < count {
                    out.push([a, b, c].map(|m| RationalAngle::new(m, k).expect("angle in (0, 1)")));
                }
            }
        }
        k += 1;
    }
    out
}

pub fn angles_label(a: &[RationalAngle]) -> String {
    a.iter().map(|x| format!("{}/{}", x.num, x.den)).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug)]
pub enum CorpusInput {
    Polygon(RationalPolygon),
    Surface(TranslationSurface),
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub name: String,
    pub input: CorpusInput,
}

impl CorpusItem {
    /// The translation surface of the item (unfolding for polygons).
    pub fn surface(&self) -> Result<TranslationSurface> {
        match &self.input {
            CorpusInput::Polygon(p) => unfold(p),
            CorpusInput::Surface(s) => Ok(s.clone()),
        }
    }

    pub fn classify(&self, opts: ClassifyOptions) -> Result<Verdict> {
        match &self.input {
            CorpusInput::Polygon(p) => classify_polygon_with(p, opts),
            CorpusInput::Surface(s) => classify_surface(s),
        }
    }
}

pub fn double_pentagon() -> TranslationSurface {
    let a = |n, d| RationalAngle::new(n, d).expect("valid angle");
    unfold(&triangle([a(1, 5), a(1, 5), a(3, 5)]).expect("valid triangle")).expect("unfolds")
}

pub fn built_in_corpus() -> Result<Vec<CorpusItem>> {
    let mut items = Vec::new();
    for t in triangle_enumeration(200) {
        items.push(CorpusItem { name: format!("triangle {}", angles_label(&t)), input: CorpusInput::Polygon(triangle(t)?) });
    }
    items.push(CorpusItem { name: "square torus".into(), input: CorpusInput::Surface(square_torus()) });
    let q = NumberField::rationals();
    let one = FieldElement::one(&q);
    items.push(CorpusItem { name: "L-shape 1,1,1,1".into(), input: CorpusInput::Polygon(l_shaped_table(&one, &one, &one, &one)?) });
    let f = NumberField::golden();
    let (o, phi) = (FieldElement::one(&f), FieldElement::theta(&f));
    items.push(CorpusItem { name: "L-shape 1,phi,1,phi".into(), input: CorpusInput::Polygon(l_shaped_table(&o, &phi, &o, &phi)?) });
    items.push(CorpusItem { name: "double pentagon".into(), input: CorpusInput::Surface(double_pentagon()) });
    Ok(items)
}

/// Verdict table as JSON, in corpus order.
pub fn corpus_table(items: &[CorpusItem], opts: ClassifyOptions) -> Result<Value> {
    let mut rows = Vec::with_capacity(items.len());
    for it in items {
        let v = it.classify(opts)?;
        let kind = match &it.input {
            CorpusInput::Polygon(_) => "polygon",
            CorpusInput::Surface(_) => "surface",
        };
        let vj = verdict_to_json(&v);
        rows.push(json!({
            "name": it.name,
            "kind": kind,
            "weakly_mixing": v.weakly_mixing,
            "reason": v.reason.code(),
            "k": v.k,
            "kernel_dim": v.kernel_dim,
            "cross_checks": vj["cross_checks"],
        }));
    }
    Ok(json!({ "corpus": rows }))
}

fn random_angles<R: Rng>(rng: &mut R, k: i64, n: usize, total: i64) -> Option<Vec<RationalAngle>> {
    // Compositions of `total` into n parts in [1, 2k − 1].
    let mut cuts: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(1..total)).collect();
    cuts.sort();
    cuts.dedup();
    if cuts.len() != n - 1 {
        return None;
    }
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.iter().chain(std::iter::once(&total)) {
        parts.push(c - prev);
        prev = *c;
    }
    if parts.iter().any(|&m| m >= 2 * k) {
        return None;
    }
    let angles: Vec<RationalAngle> = parts.iter().map(|&m| RationalAngle::new(m, k).ok()).collect::<Option<_>>()?;
    let lcd = angles.iter().fold(1i64, |acc, a| acc.lcm(&a.den));
    (lcd == k).then_some(angles)
}

/// Random triangle or quadrilateral whose angles have common denominator
/// exactly k; quadrilaterals get two random rational sides and close up.
pub fn random_polygon<R: Rng>(rng: &mut R, k: i64) -> RationalPolygon {
    loop {
        if rng.gen_bool(0.5) {
            if let Some(a) = random_angles(rng, k, 3, k) {
                if a.iter().all(|x| x.num < x.den) {
                    if let Ok(p) = triangle([a[0], a[1], a[2]]) {
                        return p;
                    }
                }
            }
            continue;
        }
        let Some(a) = random_angles(rng, k, 4, 2 * k) else { continue };
        let table = angle_field(k as u64);
        let f = table.field.clone();
        let mut d = 0i64;
        let mut units = Vec::new();
        for x in &a {
            units.push(table.unit(d));
            d += k - x.num * (k / x.den);
        }
        let l0 = FieldElement::from_ratio(&f, rng.gen_range(1..8), rng.gen_range(1..5));
        let l1 = FieldElement::from_ratio(&f, rng.gen_range(1..8), rng.gen_range(1..5));
        let wx = -&(&(&l0 * &units[0].0) + &(&l1 * &units[1].0));
        let wy = -&(&(&l0 * &units[0].1) + &(&l1 * &units[1].1));
        let cross = |ax: &FieldElement, ay: &FieldElement, bx: &FieldElement, by: &FieldElement| &(ax * by) - &(ay * bx);
        let den = cross(&units[2].0, &units[2].1, &units[3].0, &units[3].1);
        if den.is_zero() {
            continue;
        }
        let l2 = &cross(&wx, &wy, &units[3].0, &units[3].1) / &den;
        let l3 = &cross(&units[2].0, &units[2].1, &wx, &wy) / &den;
        if let Ok(p) = validate_polygon(&a, &[l0, l1, l2, l3], &f) {
            return p;
        }
    }
}

/// JSON description of a corpus item's input.
pub fn item_json(it: &CorpusItem) -> Value {
    match &it.input {
        CorpusInput::Polygon(p) => polygon_to_json(p),
        CorpusInput::Surface(s) => crate::io::surface_to_json(s),
    }
}
