//! Surfaces in a frame where the flow direction is the unit vertical.

use crate::error::{Error, Result};
use crate::field::{compose_fields, FieldElement};
use crate::geom::PlanarVector;
use crate::surface::{Edge, TranslationSurface};

use super::scalar::{ccw_less, Scalar, Vec2};

/// Flow direction: the flow moves by t·(dx, dy) in time t.
#[derive(Clone, Debug)]
pub enum Direction {
    Exact(PlanarVector),
    Float(f64, f64),
}

impl Direction {
    pub fn to_f64(&self) -> (f64, f64) {
        match self {
            Direction::Exact(v) => v.to_f64(),
            Direction::Float(x, y) => (*x, *y),
        }
    }
}

/// Matrix A (row-major) with A·(dx, dy) = (0, 1); horizontal vectors stay
/// horizontal whenever dy ≠ 0.
pub fn exact_frame(d: &PlanarVector) -> Result<[FieldElement; 4]> {
    let f = d.field();
    let z = FieldElement::zero(f);
    let one = FieldElement::one(f);
    if d.is_zero() {
        return Err(Error::ParallelTransversal);
    }
    if !d.y.is_zero() {
        let s = if d.y.is_negative() { -&one } else { one.clone() };
        return Ok([s.clone(), -&(&(&d.x / &d.y) * &s), z, d.y.inv()]);
    }
    if d.x.is_positive() {
        Ok([z.clone(), -&one, d.x.inv(), z])
    } else {
        Ok([z.clone(), one, d.x.inv(), z])
    }
}

pub fn float_frame(dx: f64, dy: f64) -> [f64; 4] {
    if dy != 0.0 {
        let s = dy.signum();
        [s, -s * dx / dy, 0.0, 1.0 / dy]
    } else if dx > 0.0 {
        [0.0, -1.0, 1.0 / dx, 0.0]
    } else {
        [0.0, 1.0, 1.0 / dx, 0.0]
    }
}

#[derive(Clone, Debug)]
pub struct FlowSurface<T> {
    /// Local vertex coordinates; verts[c][0] is the origin of cell c.
    pub verts: Vec<Vec<Vec2<T>>>,
    pub edges: Vec<Vec<Vec2<T>>>,
    pub partner: Vec<Vec<Edge>>,
    pub corner_vertex: Vec<Vec<usize>>,
    pub vertex_corners: Vec<Vec<Edge>>,
    /// Cone points and marked points stop the flow.
    pub stop: Vec<bool>,
    pub area: T,
    /// Frame matrix applied to the original coordinates.
    pub frame: [f64; 4],
}

pub type ExactFlowSurface = FlowSurface<FieldElement>;

/// Hit of a ray with the boundary of a cell.
#[derive(Clone, Debug)]
pub enum HitKind {
    /// Crossing the interior of an edge.
    Edge(usize),
    /// Reaching a vertex.
    Vertex(usize),
}

#[derive(Clone, Debug)]
pub struct Hit<T> {
    pub t: T,
    pub kind: HitKind,
}

impl<T: Scalar> FlowSurface<T> {
    fn build(s: &TranslationSurface, edges: Vec<Vec<Vec2<T>>>, marked: &[usize], frame: [f64; 4], zero: T) -> Self {
        let verts: Vec<Vec<Vec2<T>>> = edges
            .iter()
            .map(|cell| {
                let mut p = Vec2::new(zero.clone(), zero.clone());
                cell.iter()
                    .map(|e| {
                        let q = p.clone();
                        p = p.add(e);
                        q
                    })
                    .collect()
            })
            .collect();
        let mut area = zero.clone();
        for cell in &verts {
            let n = cell.len();
            for i in 0..n {
                area = area.add(&cell[i].cross(&cell[(i + 1) % n]));
            }
        }
        let stop = s.vertices.iter().enumerate().map(|(i, v)| v.is_singular() || marked.contains(&i)).collect();
        FlowSurface {
            verts,
            edges,
            partner: s.partner.clone(),
            corner_vertex: s.corner_vertex.clone(),
            vertex_corners: s.vertices.iter().map(|v| v.corners.clone()).collect(),
            stop,
            area: area.half(),
            frame,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.verts.len()
    }

    /// First point where the ray o + t·d, t > 0, meets the boundary of cell c.
    pub fn ray_cast(&self, c: usize, o: &Vec2<T>, d: &Vec2<T>) -> Option<Hit<T>> {
        let vs = &self.verts[c];
        let n = vs.len();
        let mut best: Option<Hit<T>> = None;
        let consider = |t: T, kind: HitKind, best: &mut Option<Hit<T>>| {
            if t.sgn() <= 0 {
                return;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    let c = t.cmp_s(&b.t);
                    c < 0 || (c == 0 && matches!(kind, HitKind::Vertex(_)) && matches!(b.kind, HitKind::Edge(_)))
                }
            };
            if better {
                *best = Some(Hit { t, kind });
            }
        };
        for i in 0..n {
            let e = &self.edges[c][i];
            let w = vs[i].sub(o);
            let den = d.cross(e);
            if den.sgn() != 0 {
                let t = w.cross(e).div(&den);
                let s = w.cross(d).div(&den);
                let one = s.int_like(1);
                if s.sgn() < 0 || s.cmp_s(&one) > 0 {
                    continue;
                }
                let kind = if s.sgn() == 0 {
                    HitKind::Vertex(i)
                } else if s.cmp_s(&one) == 0 {
                    HitKind::Vertex((i + 1) % n)
                } else {
                    HitKind::Edge(i)
                };
                consider(t, kind, &mut best);
            } else if w.cross(d).sgn() == 0 {
                let dd = d.dot(d);
                for j in [i, (i + 1) % n] {
                    let t = vs[j].sub(o).dot(d).div(&dd);
                    consider(t, HitKind::Vertex(j), &mut best);
                }
            }
        }
        best
    }

    /// Direction d points into the corner of (c, j), between the outgoing edge
    /// (inclusive) and the reversed incoming edge.
    pub fn sector_contains(&self, (c, j): Edge, d: &Vec2<T>) -> bool {
        let n = self.edges[c].len();
        let out = &self.edges[c][j];
        let back = self.edges[c][(j + n - 1) % n].neg();
        ccw_less(out, d, &back)
    }

    /// Corner counterclockwise after (c, j) around the same vertex, reached by
    /// crossing the incoming edge of (c, j).
    pub fn next_corner(&self, (c, j): Edge) -> (Edge, Edge) {
        let n = self.edges[c].len();
        let inc = (c, (j + n - 1) % n);
        (self.partner[c][inc.1], inc)
    }

    /// Rotate around a nonstopping vertex until reaching the corner whose
    /// sector contains d, recording the edges exited on the way.
    pub fn rotate_to(&self, start: Edge, d: &Vec2<T>, exits: &mut Vec<Edge>) -> Result<Edge> {
        let mut cur = start;
        let total = self.vertex_corners[self.corner_vertex[start.0][start.1]].len();
        for _ in 0..=total {
            if self.sector_contains(cur, d) {
                return Ok(cur);
            }
            let (nxt, crossed) = self.next_corner(cur);
            exits.push(crossed);
            cur = nxt;
        }
        Err(Error::Precision("no sector contains the flow direction".into()))
    }

    /// All corners of a vertex whose sectors contain d.
    pub fn corners_containing(&self, v: usize, d: &Vec2<T>) -> Vec<Edge> {
        self.vertex_corners[v].iter().copied().filter(|&e| self.sector_contains(e, d)).collect()
    }

    /// Translation from local coordinates of c to those of the cell across
    /// edge (c, p).
    pub fn crossing(&self, (c, p): Edge) -> (Edge, Vec2<T>) {
        let (d, q) = self.partner[c][p];
        let m = self.verts[d].len();
        (self.partner[c][p], self.verts[d][(q + 1) % m].sub(&self.verts[c][p]))
    }

    pub fn vertex_of(&self, (c, j): Edge) -> usize {
        self.corner_vertex[c][j]
    }

    pub fn origin_like(&self) -> &T {
        &self.verts[0][0].x
    }
}

impl FlowSurface<f64> {
    /// Floating frame for direction (dx, dy).
    pub fn float(s: &TranslationSurface, dx: f64, dy: f64, marked: &[usize]) -> Self {
        let a = float_frame(dx, dy);
        let edges = s
            .cells
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|e| {
                        let (x, y) = e.to_f64();
                        Vec2::new(a[0] * x + a[1] * y, a[2] * x + a[3] * y)
                    })
                    .collect()
            })
            .collect();
        Self::build(s, edges, marked, a, 0.0)
    }

    pub fn from_direction(s: &TranslationSurface, d: &Direction, marked: &[usize]) -> Self {
        let (dx, dy) = d.to_f64();
        Self::float(s, dx, dy, marked)
    }
}

impl FlowSurface<FieldElement> {
    /// Exact frame; the surface is moved to a common field with the direction.
    /// Returns the flow surface together with the framed exact surface.
    pub fn exact(s: &TranslationSurface, d: &PlanarVector, marked: &[usize]) -> Result<(Self, TranslationSurface)> {
        let (s2, d2) = if crate::field::NumberField::same(&s.field, d.field()) {
            (s.clone(), d.clone())
        } else {
            let (_, e1, e2) = compose_fields(&s.field, d.field())?;
            (s.mapped(&e1)?, d.map(&e2))
        };
        let a = exact_frame(&d2)?;
        let framed = s2.transformed(&a[0], &a[1], &a[2], &a[3])?;
        let edges = framed
            .cells
            .iter()
            .map(|cell| cell.iter().map(|e| Vec2::new(e.x.clone(), e.y.clone())).collect())
            .collect();
        let af = [a[0].to_f64(), a[1].to_f64(), a[2].to_f64(), a[3].to_f64()];
        let fs = Self::build(&framed, edges, marked, af, FieldElement::zero(&framed.field));
        Ok((fs, framed))
    }
}
