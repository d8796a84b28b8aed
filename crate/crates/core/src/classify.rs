//! Decide whether Taut(X, ω) contains nonzero integral classes, and dispatch
//! rational polygons by their angle denominator.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::homology::{homology_basis, period_matrix, HomologyBasis, PeriodMatrix};
use crate::linalg;
use crate::polygon::RationalPolygon;
use crate::surface::TranslationSurface;
use crate::unfold::{deck_rotation, unfold};

/// Rational points of the tautological plane, in coordinates dual to the
/// homology basis.
#[derive(Clone, Debug)]
pub struct TautRationalSubspace {
    /// Primitive integer vectors spanning the integral points.
    pub basis: Vec<Vec<BigInt>>,
    /// (a, b) with a·Re ω + b·Im ω = n for each basis vector n.
    pub coefficients: Vec<(FieldElement, FieldElement)>,
    pub num_equations: usize,
    pub rank: usize,
}

impl TautRationalSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn taut_rational_subspace(pm: &PeriodMatrix) -> TautRationalSubspace {
    let n = pm.re.len();
    let x = &pm.re;
    let y = &pm.im;
    let det2 = |i: usize, j: usize| &(&x[i] * &y[j]) - &(&x[j] * &y[i]);
    let Some((pi, pj, m)) = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, det2(i, j)))
        .find(|(_, _, m)| !m.is_zero())
    else {
        return TautRationalSubspace { basis: Vec::new(), coefficients: Vec::new(), num_equations: 0, rank: 0 };
    };
    let d = m.field().degree();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for l in (0..n).filter(|&l| l != pi && l != pj) {
        // det[[x_i x_j x_l], [y_i y_j y_l], [n_i n_j n_l]] = 0
        let mut coef = vec![FieldElement::zero(m.field()); n];
        coef[pi] = det2(pj, l);
        coef[pj] = -det2(pi, l);
        coef[l] = m.clone();
        for r in 0..d {
            rows.push(coef.iter().map(|c| c.coords()[r].clone()).collect());
        }
    }
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            r.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .filter(|r: &Vec<BigInt>| r.iter().any(|v| !v.is_zero()))
        .collect();
    let rank = if int_rows.is_empty() { 0 } else { linalg::rank(&int_rows) };
    let basis = linalg::integer_kernel(&int_rows, n);
    let coefficients = basis
        .iter()
        .map(|v| {
            let ni = FieldElement::from_rational(m.field(), BigRational::from_integer(v[pi].clone()));
            let nj = FieldElement::from_rational(m.field(), BigRational::from_integer(v[pj].clone()));
            let a = &(&(&ni * &y[pj]) - &(&nj * &y[pi])) / &m;
            let b = &(&(&x[pi] * &nj) - &(&x[pj] * &ni)) / &m;
            (a, b)
        })
        .collect();
    TautRationalSubspace { basis, coefficients, num_equations: rows.len(), rank }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reason {
    KTrivial,
    GenericK,
    TorusCover,
    AlmostIntegrable,
    Integrable,
    CommensurableK2,
    TorusFactor,
}

impl Reason {
    pub fn code(&self) -> &'static str {
        match self {
            Reason::KTrivial => "K_TRIVIAL",
            Reason::GenericK => "GENERIC_K",
            Reason::TorusCover => "TORUS_COVER",
            Reason::AlmostIntegrable => "ALMOST_INTEGRABLE",
            Reason::Integrable => "INTEGRABLE",
            Reason::CommensurableK2 => "COMMENSURABLE_K2",
            Reason::TorusFactor => "TORUS_FACTOR",
        }
    }
}

/// Affine circle map Hol(x) = ∫_{x₀}^x (a Re ω + b Im ω) mod 1.
#[derive(Clone, Debug)]
pub struct CircleFactor {
    pub a: FieldElement,
    pub b: FieldElement,
    /// Integer periods over the homology basis.
    pub periods: Vec<BigInt>,
    /// Value of Hol at the first vertex of each cell.
    pub cell_offsets: Vec<FieldElement>,
}

impl CircleFactor {
    /// Hol at a point with local coordinates (u, v) relative to the first
    /// vertex of a cell, as a representative in [0, 1) of the value mod 1.
    pub fn value(&self, cell: usize, u: &FieldElement, v: &FieldElement) -> BigRational {
        let t = &(&self.cell_offsets[cell] + &(&self.a * u)) + &(&self.b * v);
        let f = t.to_f64();
        // Exact fractional part is not needed downstream; report the floor-reduced float.
        BigRational::from_float(f - f.floor()).unwrap_or_else(BigRational::zero)
    }

    pub fn description(&self) -> String {
        format!("x ↦ ∫ ({}) Re ω + ({}) Im ω  mod 1", self.a, self.b)
    }
}

/// Build and verify the circle factor for coefficients (a, b).
pub fn circle_factor(
    s: &TranslationSurface,
    pm: &PeriodMatrix,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<CircleFactor> {
    let mut periods = Vec::with_capacity(pm.re.len());
    for (x, y) in pm.re.iter().zip(&pm.im) {
        let v = &(a * x) + &(b * y);
        match v.as_rational() {
            Some(q) if q.is_integer() => periods.push(q.to_integer()),
            _ => return Err(Error::NotAWitness),
        }
    }
    // Develop Hol over the cells; every gluing must then agree mod ℤ.
    let lin = |p: &crate::geom::PlanarVector| &(a * &p.x) + &(b * &p.y);
    let verts: Vec<Vec<crate::geom::PlanarVector>> = (0..s.cells.len()).map(|c| s.cell_vertices(c)).collect();
    let mut offsets: Vec<Option<FieldElement>> = vec![None; s.cells.len()];
    offsets[0] = Some(FieldElement::zero(&s.field));
    let mut q = VecDeque::from([0usize]);
    while let Some(c) = q.pop_front() {
        let oc = offsets[c].clone().unwrap();
        let n = s.cells[c].len();
        for p in 0..n {
            let (d, e) = s.partner[c][p];
            let m = s.cells[d].len();
            // start of (c,p) is the end of (d,e)
            let val = &oc + &lin(&verts[c][p]);
            let od = &val - &lin(&verts[d][(e + 1) % m]);
            match &offsets[d] {
                None => {
                    offsets[d] = Some(od);
                    q.push_back(d);
                }
                Some(prev) => {
                    let diff = prev - &od;
                    if !diff.as_rational().is_some_and(|r| r.is_integer()) {
                        return Err(Error::NotAWitness);
                    }
                }
            }
        }
    }
    let cell_offsets = offsets.into_iter().map(|o| o.unwrap()).collect();
    Ok(CircleFactor { a: a.clone(), b: b.clone(), periods, cell_offsets })
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub integer_class: Vec<BigInt>,
    pub circle: CircleFactor,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossChecks {
    /// Verdict predicted by the k-dispatch or commensurability fast path.
    pub fast_path_weakly_mixing: Option<bool>,
    /// Kernel dimension from the exact computation, when run.
    pub exact_kernel_dim: Option<usize>,
    pub agree: Option<bool>,
    /// The integral subspace is invariant under the deck rotation.
    pub deck_invariant: Option<bool>,
    pub horizontal_commensurable: Option<bool>,
    pub vertical_commensurable: Option<bool>,
    /// Lattice type of the torus factor: "hexagonal", "rectangular" or "oblique".
    pub lattice: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub weakly_mixing: bool,
    pub reason: Reason,
    pub k: Option<i64>,
    pub kernel_dim: usize,
    pub witness: Option<Witness>,
    /// Rank of the rational equation system and its number of rows, when the
    /// exact kernel was computed.
    pub certificate: Option<(usize, usize)>,
    pub cross_checks: CrossChecks,
}

struct Analysis {
    pm: PeriodMatrix,
    basis: HomologyBasis,
    taut: TautRationalSubspace,
}

fn analyze(s: &TranslationSurface) -> Result<Analysis> {
    let basis = homology_basis(s)?;
    let pm = period_matrix(s, &basis);
    let taut = taut_rational_subspace(&pm);
    Ok(Analysis { pm, basis, taut })
}

fn witness_of(s: &TranslationSurface, an: &Analysis) -> Result<Option<Witness>> {
    let Some(n) = an.taut.basis.first() else { return Ok(None) };
    let (a, b) = &an.taut.coefficients[0];
    let circle = circle_factor(s, &an.pm, a, b)?;
    Ok(Some(Witness { integer_class: n.clone(), circle }))
}

fn axis_parallel(s: &TranslationSurface) -> bool {
    s.cells.iter().flatten().all(|e| e.x.is_zero() || e.y.is_zero())
}

pub fn classify_surface(s: &TranslationSurface) -> Result<Verdict> {
    let an = analyze(s)?;
    let dim = an.taut.dim();
    let reason = if dim == 0 {
        Reason::KTrivial
    } else if s.genus == 1 {
        Reason::TorusFactor
    } else if axis_parallel(s) {
        Reason::CommensurableK2
    } else if dim == 2 {
        Reason::TorusCover
    } else {
        Reason::TorusFactor
    };
    let witness = witness_of(s, &an)?;
    let mut cc = CrossChecks { exact_kernel_dim: Some(dim), ..Default::default() };
    if dim == 2 {
        cc.lattice = Some(lattice_type(&an.taut));
    }
    Ok(Verdict {
        weakly_mixing: dim == 0,
        reason,
        k: None,
        kernel_dim: dim,
        witness,
        certificate: Some((an.taut.rank, an.taut.num_equations)),
        cross_checks: cc,
    })
}

/// Integrable tables: rectangles and the triangles (π/2,π/4,π/4),
/// (π/3,π/3,π/3), (π/2,π/3,π/6).
fn is_integrable(p: &RationalPolygon) -> bool {
    let unit_fractions = p.angles.iter().all(|a| a.num == 1);
    (p.n() == 3 && unit_fractions) || (p.n() == 4 && p.angles.iter().all(|a| (a.num, a.den) == (1, 2)))
}

/// Lattice of the two witness functionals (a, b) in the plane.
fn lattice_type(t: &TautRationalSubspace) -> String {
    let v: Vec<(f64, f64)> = t.coefficients.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect();
    let (mut u, mut w) = (v[0], v[1]);
    let dot = |p: (f64, f64), q: (f64, f64)| p.0 * q.0 + p.1 * q.1;
    // Lagrange–Gauss reduction.
    loop {
        if dot(w, w) < dot(u, u) {
            std::mem::swap(&mut u, &mut w);
        }
        let mu = (dot(u, w) / dot(u, u)).round();
        w = (w.0 - mu * u.0, w.1 - mu * u.1);
        if dot(w, w) >= dot(u, u) * (1.0 - 1e-12) {
            break;
        }
    }
    let (nu, nw, uw) = (dot(u, u), dot(w, w), dot(u, w).abs());
    let tol = 1e-9 * nw;
    if uw < tol {
        "rectangular".into()
    } else if (nu - nw).abs() < tol && (2.0 * uw - nu).abs() < tol {
        "hexagonal".into()
    } else {
        "oblique".into()
    }
}

/// All horizontal (resp. vertical) sides have pairwise rational ratios.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Commensurability {
    pub horizontal_commensurable: bool,
    pub vertical_commensurable: bool,
}

pub fn commensurability_check_k2(p: &RationalPolygon) -> Result<Commensurability> {
    if p.k != 2 {
        return Err(Error::NotK2);
    }
    let ratios_rational = |dirs: [i64; 2]| {
        let ls: Vec<&FieldElement> = p.dirs.iter().zip(&p.lengths).filter(|(d, _)| dirs.contains(d)).map(|(_, l)| l).collect();
        ls.windows(2).all(|w| (w[1] / w[0]).as_rational().is_some())
    };
    Ok(Commensurability { horizontal_commensurable: ratios_rational([0, 2]), vertical_commensurable: ratios_rational([1, 3]) })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    /// Also run the exact kernel when the angle denominator alone decides.
    pub exact_cross_check: bool,
}

pub fn classify_polygon(p: &RationalPolygon) -> Result<Verdict> {
    classify_polygon_with(p, ClassifyOptions::default())
}

pub fn classify_polygon_with(p: &RationalPolygon, opts: ClassifyOptions) -> Result<Verdict> {
    let k = p.k;
    let mut cc = CrossChecks::default();
    if ![2, 3, 4, 6].contains(&k) {
        cc.fast_path_weakly_mixing = Some(true);
        let mut cert = None;
        if opts.exact_cross_check {
            let an = analyze(&unfold(p)?)?;
            cc.exact_kernel_dim = Some(an.taut.dim());
            cc.agree = Some(an.taut.dim() == 0);
            cert = Some((an.taut.rank, an.taut.num_equations));
        }
        return Ok(Verdict {
            weakly_mixing: true,
            reason: Reason::GenericK,
            k: Some(k),
            kernel_dim: 0,
            witness: None,
            certificate: cert,
            cross_checks: cc,
        });
    }
    let s = unfold(p)?;
    let an = analyze(&s)?;
    let dim = an.taut.dim();
    cc.exact_kernel_dim = Some(dim);
    cc.deck_invariant = Some(deck_invariant(&s, p, &an)?);
    let reason;
    if k == 2 {
        let c = commensurability_check_k2(p)?;
        cc.horizontal_commensurable = Some(c.horizontal_commensurable);
        cc.vertical_commensurable = Some(c.vertical_commensurable);
        let fast_wm = !(c.horizontal_commensurable || c.vertical_commensurable);
        cc.fast_path_weakly_mixing = Some(fast_wm);
        cc.agree = Some(fast_wm == (dim == 0));
        reason = if dim == 0 { Reason::KTrivial } else { Reason::CommensurableK2 };
    } else {
        cc.agree = Some(dim == 0 || dim == 2);
        reason = if dim == 0 {
            Reason::KTrivial
        } else if is_integrable(p) {
            Reason::Integrable
        } else {
            Reason::AlmostIntegrable
        };
    }
    if dim == 2 {
        cc.lattice = Some(lattice_type(&an.taut));
    }
    let witness = witness_of(&s, &an)?;
    Ok(Verdict {
        weakly_mixing: dim == 0,
        reason,
        k: Some(k),
        kernel_dim: dim,
        witness,
        certificate: Some((an.taut.rank, an.taut.num_equations)),
        cross_checks: cc,
    })
}

/// Check that the deck rotation maps the integral subspace of the
/// tautological plane into itself (dual action on coclasses).
fn deck_invariant(s: &TranslationSurface, p: &RationalPolygon, an: &Analysis) -> Result<bool> {
    let t = deck_rotation(s, p)?;
    let b = &an.basis;
    let r = b.rank();
    // M[j] = class of T(z_j).
    let mut images = Vec::with_capacity(r);
    for z in &b.cycles {
        let mut chain = vec![BigInt::zero(); z.len()];
        for (id, c) in z.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let img = t.edge_image(b.edges.reps[id]);
            let (jd, sg) = b.edges.class[b.edges.directed(img)];
            chain[jd] += c * sg;
        }
        images.push(b.class_of_chain(&chain));
    }
    let span = &an.taut.basis;
    for n in span {
        // (T*n)_j = n(T z_j) = Σ_i images[j][i]·n_i
        let tn: Vec<BigInt> = images.iter().map(|m| m.iter().zip(n).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)).collect();
        let mut stacked = span.clone();
        stacked.push(tn);
        if linalg::rank(&stacked) != span.len() {
            return Ok(false);
        }
    }
    Ok(true)
}
