//! Translation surfaces: polygons with edges glued by translations.

use std::collections::VecDeque;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{compose_fields, Embedding, FieldElement, NumberField};
use crate::geom::{angle_cmp, doubled_area, segments_intersect, vertices, PlanarVector};

/// A directed edge: (cell, position).
pub type Edge = (usize, usize);

/// Vertex class of the glued surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    /// Corners (cell, position of the outgoing edge) in counterclockwise order.
    pub corners: Vec<Edge>,
    /// Total angle divided by 2π.
    pub angle_multiple: u64,
}

impl Vertex {
    pub fn is_singular(&self) -> bool {
        self.angle_multiple > 1
    }
}

/// Record of how a surface was produced by unfolding: cell i is the image of
/// the polygon under the dihedral element `group[i]`.
#[derive(Clone, Debug)]
pub struct UnfoldData {
    pub k: i64,
    pub group: Vec<(bool, i64)>,
    pub polygon_dirs: Vec<i64>,
    pub polygon_lengths: Vec<FieldElement>,
}

#[derive(Clone, Debug)]
pub struct TranslationSurface {
    pub field: Arc<NumberField>,
    pub cells: Vec<Vec<PlanarVector>>,
    /// partner[c][p] is the edge glued to (c, p).
    pub partner: Vec<Vec<Edge>>,
    pub vertices: Vec<Vertex>,
    /// corner_vertex[c][p]: vertex class at the start of edge (c, p).
    pub corner_vertex: Vec<Vec<usize>>,
    pub genus: usize,
    pub area: FieldElement,
    pub unfold: Option<UnfoldData>,
}

impl TranslationSurface {
    /// Build and validate a surface from cells and a list of gluings.
    pub fn new(field: &Arc<NumberField>, cells: Vec<Vec<PlanarVector>>, gluings: &[(Edge, Edge)]) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidSurface(m.to_string()));
        if cells.is_empty() {
            return bad("no cells");
        }
        for (ci, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return bad(&format!("cell {ci} has fewer than 3 edges"));
            }
            if cell.iter().any(|e| !NumberField::same(e.field(), field)) {
                return Err(Error::FieldMismatch);
            }
            if cell.iter().any(|e| e.is_zero()) {
                return bad(&format!("cell {ci} has a zero edge"));
            }
            let mut s = PlanarVector::zero(field);
            for e in cell {
                s = &s + e;
            }
            if !s.is_zero() {
                return bad(&format!("cell {ci} does not close"));
            }
            if doubled_area(cell).sign() <= 0 {
                return bad(&format!("cell {ci} is not counterclockwise"));
            }
            if !is_simple(cell) {
                return bad(&format!("cell {ci} is self-intersecting"));
            }
        }
        let mut partner: Vec<Vec<Option<Edge>>> = cells.iter().map(|c| vec![None; c.len()]).collect();
        for &((c1, p1), (c2, p2)) in gluings {
            if c1 >= cells.len() || c2 >= cells.len() || p1 >= cells[c1].len() || p2 >= cells[c2].len() {
                return bad("gluing refers to a missing edge");
            }
            if (c1, p1) == (c2, p2) {
                return bad("edge glued to itself");
            }
            if partner[c1][p1].is_some() || partner[c2][p2].is_some() {
                return bad("edge glued twice");
            }
            if !(&cells[c1][p1] + &cells[c2][p2]).is_zero() {
                return bad(&format!("edges ({c1},{p1}) and ({c2},{p2}) are not opposite"));
            }
            partner[c1][p1] = Some((c2, p2));
            partner[c2][p2] = Some((c1, p1));
        }
        let mut full = Vec::with_capacity(cells.len());
        for row in partner {
            let mut r = Vec::with_capacity(row.len());
            for x in row {
                match x {
                    Some(e) => r.push(e),
                    None => return bad("unglued edge"),
                }
            }
            full.push(r);
        }
        Self::assemble(field.clone(), cells, full, None)
    }

    pub(crate) fn assemble(
        field: Arc<NumberField>,
        cells: Vec<Vec<PlanarVector>>,
        partner: Vec<Vec<Edge>>,
        unfold: Option<UnfoldData>,
    ) -> Result<Self> {
        if !connected(&partner) {
            return Err(Error::Disconnected);
        }
        let (vertices, corner_vertex) = vertex_classes(&cells, &partner);
        let nedges: usize = cells.iter().map(|c| c.len()).sum::<usize>() / 2;
        let chi = vertices.len() as i64 - nedges as i64 + cells.len() as i64;
        debug_assert!(chi <= 2 && chi % 2 == 0);
        let genus = ((2 - chi) / 2) as usize;
        let two_area = cells.iter().fold(FieldElement::zero(&field), |acc, c| &acc + &doubled_area(c));
        let area = two_area.scale(&BigRational::new(1.into(), 2.into()));
        Ok(TranslationSurface { field, cells, partner, vertices, corner_vertex, genus, area, unfold })
    }

    pub fn gluings(&self) -> Vec<(Edge, Edge)> {
        let mut out = Vec::new();
        for (c, row) in self.partner.iter().enumerate() {
            for (p, &q) in row.iter().enumerate() {
                if (c, p) < q {
                    out.push(((c, p), q));
                }
            }
        }
        out
    }

    pub fn edge(&self, e: Edge) -> &PlanarVector {
        &self.cells[e.0][e.1]
    }

    pub fn num_edges(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum::<usize>() / 2
    }

    /// Cone points: vertex classes with angle greater than 2π.
    pub fn cone_points(&self) -> Vec<&Vertex> {
        self.vertices.iter().filter(|v| v.is_singular()).collect()
    }

    /// Multiset {m : cone angle 2π(m+1)} in decreasing order.
    pub fn stratum_signature(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.cone_points().iter().map(|v| v.angle_multiple - 1).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Vertex positions of a cell, starting at the origin.
    pub fn cell_vertices(&self, c: usize) -> Vec<PlanarVector> {
        vertices(&self.cells[c])
    }

    /// Apply the linear map [[a, b], [c, d]] (positive determinant) to every edge.
    pub fn transformed(&self, a: &FieldElement, b: &FieldElement, c: &FieldElement, d: &FieldElement) -> Result<Self> {
        if (&(a * d) - &(b * c)).sign() <= 0 {
            return Err(Error::InvalidSurface("linear map must preserve orientation".into()));
        }
        let cells = self
            .cells
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|e| PlanarVector::new(&(a * &e.x) + &(b * &e.y), &(c * &e.x) + &(d * &e.y)))
                    .collect()
            })
            .collect();
        Self::assemble(self.field.clone(), cells, self.partner.clone(), None)
    }

    pub fn scaled(&self, s: &FieldElement) -> Result<Self> {
        let z = FieldElement::zero(&self.field);
        self.transformed(s, &z, &z, s)
    }

    /// The same surface with coordinates moved into a larger field.
    pub fn mapped(&self, e: &Embedding) -> Result<Self> {
        let cells = self.cells.iter().map(|c| c.iter().map(|v| v.map(e)).collect()).collect();
        let unfold = self.unfold.as_ref().map(|u| UnfoldData {
            k: u.k,
            group: u.group.clone(),
            polygon_dirs: u.polygon_dirs.clone(),
            polygon_lengths: u.polygon_lengths.iter().map(|l| e.apply(l)).collect(),
        });
        Self::assemble(e.to.clone(), cells, self.partner.clone(), unfold)
    }

    /// Extend the coordinate field so that it contains `other`; returns the
    /// new surface and the embedding of `other`.
    pub fn extend_field(&self, other: &Arc<NumberField>) -> Result<(Self, Embedding)> {
        let (_, e1, e2) = compose_fields(&self.field, other)?;
        Ok((self.mapped(&e1)?, e2))
    }
}

fn is_simple(cell: &[PlanarVector]) -> bool {
    let n = cell.len();
    let vs = vertices(cell);
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(&vs[i], &vs[(i + 1) % n], &vs[j], &vs[(j + 1) % n]) {
                return false;
            }
        }
    }
    // Adjacent edges may only meet at their shared vertex.
    for i in 0..n {
        let a = &cell[i];
        let b = &cell[(i + 1) % n];
        if a.cross(b).is_zero() && a.dot(b).sign() < 0 {
            return false;
        }
    }
    true
}

fn connected(partner: &[Vec<Edge>]) -> bool {
    let mut seen = vec![false; partner.len()];
    let mut q = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(c) = q.pop_front() {
        for &(d, _) in &partner[c] {
            if !seen[d] {
                seen[d] = true;
                q.push_back(d);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Next corner counterclockwise around the same vertex.
pub fn next_corner(cells: &[Vec<PlanarVector>], partner: &[Vec<Edge>], (c, p): Edge) -> Edge {
    let n = cells[c].len();
    partner[c][(p + n - 1) % n]
}

fn vertex_classes(cells: &[Vec<PlanarVector>], partner: &[Vec<Edge>]) -> (Vec<Vertex>, Vec<Vec<usize>>) {
    let mut cv: Vec<Vec<usize>> = cells.iter().map(|c| vec![usize::MAX; c.len()]).collect();
    let mut out = Vec::new();
    for c in 0..cells.len() {
        for p in 0..cells[c].len() {
            if cv[c][p] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut corners = Vec::new();
            let mut wraps = 0u64;
            let mut cur = (c, p);
            loop {
                cv[cur.0][cur.1] = id;
                corners.push(cur);
                let n = cells[cur.0].len();
                let out_dir = &cells[cur.0][cur.1];
                let in_rev = -&cells[cur.0][(cur.1 + n - 1) % n];
                // The sector sweeps from out_dir to in_rev; count passes through angle 0.
                if angle_cmp(&in_rev, out_dir).is_lt() {
                    wraps += 1;
                }
                cur = next_corner(cells, partner, cur);
                if cur == (c, p) {
                    break;
                }
            }
            out.push(Vertex { corners, angle_multiple: wraps });
        }
    }
    (out, cv)
}

/// Unit square torus over ℚ: one cell, opposite sides glued.
pub fn square_torus() -> TranslationSurface {
    let q = NumberField::rationals();
    torus(&PlanarVector::from_ints(&q, 1, 0), &PlanarVector::from_ints(&q, 0, 1)).unwrap()
}

/// Torus ℂ / (ℤu + ℤv) as a parallelogram; u × v must be positive.
pub fn torus(u: &PlanarVector, v: &PlanarVector) -> Result<TranslationSurface> {
    let cell = vec![u.clone(), v.clone(), -u, -v];
    TranslationSurface::new(u.field(), vec![cell], &[((0, 0), (0, 2)), ((0, 1), (0, 3))])
}

/// L-shaped surface: a (w1+w2)×h1 rectangle with a w1×h2 rectangle on top
/// of its left part, opposite sides identified.
pub fn l_shaped_surface(
    w1: &FieldElement,
    w2: &FieldElement,
    h1: &FieldElement,
    h2: &FieldElement,
) -> Result<TranslationSurface> {
    let f = w1.field().clone();
    let z = FieldElement::zero(&f);
    let v = |x: &FieldElement, y: &FieldElement| PlanarVector::new(x.clone(), y.clone());
    let cell = vec![
        v(w1, &z),
        v(w2, &z),
        v(&z, h1),
        v(&-w2, &z),
        v(&z, h2),
        v(&-w1, &z),
        v(&z, &-h2),
        v(&z, &-h1),
    ];
    let g = [((0, 0), (0, 5)), ((0, 1), (0, 3)), ((0, 2), (0, 7)), ((0, 4), (0, 6))];
    TranslationSurface::new(&f, vec![cell], &g)
}
