//! JSON serialization of fields, polygons, surfaces and verdicts.
//!
//! Rationals are written as lowest-terms "p/q" strings; object keys are
//! emitted in sorted order, so equal values give byte-identical output.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::classify::Verdict;
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::geom::PlanarVector;
use crate::polygon::{triangle, validate_polygon, RationalAngle, RationalPolygon};
use crate::surface::{Edge, TranslationSurface};

pub const SCHEMA_VERSION: &str = "1";

pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn int_of(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        _ => Err(Error::Parse(format!("not an integer: {v}"))),
    }
}

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => json!(n.to_string()),
    }
}

fn rational_of(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(_) => Ok(BigRational::from_integer(int_of(v)?)),
        _ => Err(Error::Parse(format!("not a rational: {v}"))),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn field_key<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing key {key:?}")))
}

pub fn field_to_json(f: &NumberField) -> Value {
    let (lo, hi) = f.embedding();
    json!({
        "min_poly": f.min_poly().iter().map(int_value).collect::<Vec<_>>(),
        "embedding": [int_value(lo.numer()), int_value(lo.denom()), int_value(hi.numer()), int_value(hi.denom())],
    })
}

pub fn field_from_json(v: &Value) -> Result<Arc<NumberField>> {
    let poly: Vec<BigInt> = array(field_key(v, "min_poly")?, "min_poly")?.iter().map(int_of).collect::<Result<_>>()?;
    let e: Vec<BigInt> = array(field_key(v, "embedding")?, "embedding")?.iter().map(int_of).collect::<Result<_>>()?;
    if e.len() != 4 || e[1].is_zero() || e[3].is_zero() {
        return Err(Error::Parse("embedding must be [lo_num, lo_den, hi_num, hi_den] with nonzero denominators".into()));
    }
    if poly.len() == 2 && poly[1].is_one() && poly[0].is_zero() {
        return Ok(NumberField::rationals());
    }
    NumberField::new(poly, BigRational::new(e[0].clone(), e[1].clone()), BigRational::new(e[2].clone(), e[3].clone()))
}

pub fn element_to_json(x: &FieldElement) -> Value {
    let d = x.field().degree();
    let mut c: Vec<BigRational> = x.coords().to_vec();
    c.resize(d, BigRational::zero());
    Value::Array(c.iter().map(|q| Value::String(rational_string(q))).collect())
}

/// Coordinate array, or a single rational for an element of ℚ.
pub fn element_from_json(f: &Arc<NumberField>, v: &Value) -> Result<FieldElement> {
    match v {
        Value::Array(a) => {
            if a.len() > f.degree() {
                return Err(Error::Parse(format!("{} coordinates for a field of degree {}", a.len(), f.degree())));
            }
            FieldElement::new(f, a.iter().map(rational_of).collect::<Result<_>>()?)
        }
        _ => Ok(FieldElement::from_rational(f, rational_of(v)?)),
    }
}

pub fn vector_to_json(p: &PlanarVector) -> Value {
    json!([element_to_json(&p.x), element_to_json(&p.y)])
}

pub fn vector_from_json(f: &Arc<NumberField>, v: &Value) -> Result<PlanarVector> {
    let a = array(v, "vector")?;
    if a.len() != 2 {
        return Err(Error::Parse("vector must have two entries".into()));
    }
    Ok(PlanarVector::new(element_from_json(f, &a[0])?, element_from_json(f, &a[1])?))
}

fn angle_of(v: &Value) -> Result<RationalAngle> {
    match v {
        Value::String(s) => RationalAngle::parse(s),
        _ => {
            let a = array(v, "angle")?;
            if a.len() != 2 {
                return Err(Error::Parse("angle must be [num, den]".into()));
            }
            let n = int_of(&a[0])?.to_i64().ok_or_else(|| Error::Parse("angle numerator too large".into()))?;
            let d = int_of(&a[1])?.to_i64().ok_or_else(|| Error::Parse("angle denominator too large".into()))?;
            RationalAngle::new(n, d)
        }
    }
}

pub fn polygon_to_json(p: &RationalPolygon) -> Value {
    json!({
        "angles": p.angles.iter().map(|a| json!([a.num, a.den])).collect::<Vec<_>>(),
        "lengths": p.lengths.iter().map(element_to_json).collect::<Vec<_>>(),
        "field": field_to_json(&p.field),
    })
}

/// Full polygon format, or the shorthand {"triangle": [[n,d],…]}.
pub fn polygon_from_json(v: &Value) -> Result<RationalPolygon> {
    if let Some(t) = v.get("triangle") {
        let a = array(t, "triangle")?;
        if a.len() != 3 {
            return Err(Error::LengthMismatch);
        }
        return triangle([angle_of(&a[0])?, angle_of(&a[1])?, angle_of(&a[2])?]);
    }
    let f = match v.get("field") {
        Some(fv) => field_from_json(fv)?,
        None => NumberField::rationals(),
    };
    let angles: Vec<RationalAngle> = array(field_key(v, "angles")?, "angles")?.iter().map(angle_of).collect::<Result<_>>()?;
    let lengths: Vec<FieldElement> =
        array(field_key(v, "lengths")?, "lengths")?.iter().map(|x| element_from_json(&f, x)).collect::<Result<_>>()?;
    validate_polygon(&angles, &lengths, &f)
}

pub fn surface_to_json(s: &TranslationSurface) -> Value {
    let gluings: Vec<Value> = s.gluings().iter().map(|((c, p), (d, q))| json!([c, p, d, q])).collect();
    json!({
        "cells": s.cells.iter().map(|c| c.iter().map(vector_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "gluings": gluings,
        "field": field_to_json(&s.field),
    })
}

pub fn surface_from_json(v: &Value) -> Result<TranslationSurface> {
    let f = match v.get("field") {
        Some(fv) => field_from_json(fv)?,
        None => NumberField::rationals(),
    };
    let cells: Vec<Vec<PlanarVector>> = array(field_key(v, "cells")?, "cells")?
        .iter()
        .map(|c| array(c, "cell")?.iter().map(|e| vector_from_json(&f, e)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let idx = |x: &Value| -> Result<usize> {
        x.as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse(format!("not an index: {x}")))
    };
    let gluings: Vec<(Edge, Edge)> = array(field_key(v, "gluings")?, "gluings")?
        .iter()
        .map(|g| {
            let a = array(g, "gluing")?;
            if a.len() != 4 {
                return Err(Error::Parse("gluing must be [cell, edge, cell, edge]".into()));
            }
            Ok(((idx(&a[0])?, idx(&a[1])?), (idx(&a[2])?, idx(&a[3])?)))
        })
        .collect::<Result<_>>()?;
    TranslationSurface::new(&f, cells, &gluings)
}

fn opt<T: Into<Value>>(x: Option<T>) -> Value {
    x.map(Into::into).unwrap_or(Value::Null)
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    let cc = &v.cross_checks;
    let mut m = Map::new();
    m.insert("weakly_mixing".into(), json!(v.weakly_mixing));
    m.insert("reason".into(), json!(v.reason.code()));
    m.insert("k".into(), opt(v.k));
    m.insert("kernel_dim".into(), json!(v.kernel_dim));
    m.insert(
        "witness".into(),
        match &v.witness {
            None => Value::Null,
            Some(w) => json!({
                "integer_class": w.integer_class.iter().map(int_value).collect::<Vec<_>>(),
                "a": element_to_json(&w.circle.a),
                "b": element_to_json(&w.circle.b),
                "periods": w.circle.periods.iter().map(int_value).collect::<Vec<_>>(),
                "circle_factor": w.circle.description(),
            }),
        },
    );
    m.insert(
        "certificate".into(),
        match v.certificate {
            None => Value::Null,
            Some((rank, rows)) => json!({"rank": rank, "num_equations": rows}),
        },
    );
    m.insert(
        "cross_checks".into(),
        json!({
            "fast_path_weakly_mixing": opt(cc.fast_path_weakly_mixing),
            "exact_kernel_dim": opt(cc.exact_kernel_dim),
            "agree": opt(cc.agree),
            "deck_invariant": opt(cc.deck_invariant),
            "horizontal_commensurable": opt(cc.horizontal_commensurable),
            "vertical_commensurable": opt(cc.vertical_commensurable),
            "lattice": opt(cc.lattice.clone()),
        }),
    );
    Value::Object(m)
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub const SCHEMA: &str = r#"wmflat JSON schemas, version 1

number field   {"min_poly": [c0, c1, ..., 1], "embedding": [lo_num, lo_den, hi_num, hi_den]}
               monic irreducible integer polynomial, constant term first; the
               embedding interval (lo, hi] isolates one real root.
field element  ["p/q", ...]  coordinates in the power basis 1, θ, θ², ...
               a bare "p/q" string or integer is accepted for rationals.
vector         [element, element]
polygon        {"angles": [[num, den], ...], "lengths": [element, ...], "field": field}
               angle i (in units of π) sits at the end of side i; the field
               defaults to ℚ.
triangle       {"triangle": [[n1, d1], [n2, d2], [n3, d3]]}  side lengths by the
               law of sines, first side 1.
surface        {"cells": [[vector, ...], ...], "gluings": [[cell, edge, cell, edge], ...], "field": field}
               cells are counterclockwise edge-vector lists; glued edges are
               opposite vectors.
verdict        {"weakly_mixing", "reason", "k", "kernel_dim", "witness", "certificate", "cross_checks"}
"#;
