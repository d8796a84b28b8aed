//! Straight-line motion of a single point across cells.

use crate::error::{Error, Result};
use crate::surface::Edge;

use super::frame::{FlowSurface, HitKind};
use super::scalar::{Scalar, Vec2};

#[derive(Clone, Debug)]
pub enum Start<T> {
    /// A point of a cell (interior or on an edge), moving into the cell.
    Point(usize, Vec2<T>),
    /// A vertex, leaving through the sector of corner (cell, j).
    Corner(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkEnd {
    TimeUp,
    /// Reached a stopping vertex (cone point or marked point).
    Stop(usize),
    Obstacle(usize),
}

/// Straight piece of the path inside one cell.
#[derive(Clone, Debug)]
pub struct Segment<T> {
    pub cell: usize,
    pub from: Vec2<T>,
    pub to: Vec2<T>,
    /// Time at `from`.
    pub t0: T,
    /// Number of exits recorded before this segment.
    pub exit_mark: usize,
}

#[derive(Clone, Debug)]
pub struct Walk<T> {
    pub end: WalkEnd,
    pub cell: usize,
    pub point: Vec2<T>,
    /// Corner index when the walk ended at a vertex.
    pub corner: Option<usize>,
    pub t: T,
    /// Directed edges exited, in order.
    pub exits: Vec<Edge>,
    pub segments: Vec<Segment<T>>,
}

/// Segment obstacle in a fixed cell.
#[derive(Clone, Debug)]
pub struct Barrier<T> {
    pub cell: usize,
    pub a: Vec2<T>,
    pub b: Vec2<T>,
    pub id: usize,
    /// Ignore hits at the two endpoints.
    pub open: bool,
}

/// Earliest time t (t > 0, or t ≥ 0 when `closed`) at which o + t·d meets a
/// barrier of the cell, no later than `limit`.
pub fn first_barrier<T: Scalar>(
    bars: &[Barrier<T>],
    cell: usize,
    o: &Vec2<T>,
    d: &Vec2<T>,
    limit: &T,
    closed: bool,
) -> Option<(T, usize)> {
    let mut best: Option<(T, usize)> = None;
    for bar in bars.iter().filter(|b| b.cell == cell) {
        let e = bar.b.sub(&bar.a);
        let den = d.cross(&e);
        if den.sgn() == 0 {
            continue;
        }
        let w = bar.a.sub(o);
        let t = w.cross(&e).div(&den);
        let s = w.cross(d).div(&den);
        let one = s.int_like(1);
        let ts = t.sgn();
        let (s0, s1) = (s.sgn(), s.cmp_s(&one));
        let outside = if bar.open { s0 <= 0 || s1 >= 0 } else { s0 < 0 || s1 > 0 };
        if ts < 0 || (ts == 0 && !closed) || outside || t.cmp_s(limit) > 0 {
            continue;
        }
        if best.as_ref().is_none_or(|(bt, _)| t.cmp_s(bt) < 0) {
            best = Some((t, bar.id));
        }
    }
    best
}

impl<T: Scalar> FlowSurface<T> {
    /// Cell and local point from which d points into the cell, crossing an
    /// edge or rotating about a vertex the start lies on.
    fn settle(&self, start: &Start<T>, d: &Vec2<T>, exits: &mut Vec<Edge>) -> Result<(usize, Vec2<T>)> {
        let (c, p) = match start {
            Start::Point(c, p) => (*c, p.clone()),
            Start::Corner(c, j) => {
                let (c2, j2) = self.rotate_to((*c, *j), d, exits)?;
                return Ok((c2, self.verts[c2][j2].clone()));
            }
        };
        let vs = &self.verts[c];
        if let Some(j) = vs.iter().position(|v| v.sub(&p).x.sgn() == 0 && v.sub(&p).y.sgn() == 0) {
            let (c2, j2) = self.rotate_to((c, j), d, exits)?;
            return Ok((c2, self.verts[c2][j2].clone()));
        }
        for (i, e) in self.edges[c].iter().enumerate() {
            let w = p.sub(&vs[i]);
            if w.cross(e).sgn() != 0 || w.dot(e).sgn() < 0 || w.dot(e).cmp_s(&e.dot(e)) > 0 {
                continue;
            }
            if e.cross(d).sgn() < 0 {
                exits.push((c, i));
                let ((c2, _), tr) = self.crossing((c, i));
                return Ok((c2, p.add(&tr)));
            }
        }
        Ok((c, p))
    }

    /// Move from `start` along d for time at most `t_max`, stopping at the
    /// first barrier or stopping vertex.
    pub fn walk(&self, start: Start<T>, d: &Vec2<T>, t_max: &T, bars: &[Barrier<T>], max_cells: usize) -> Result<Walk<T>> {
        let mut exits = Vec::new();
        let (mut cell, mut p) = self.settle(&start, d, &mut exits)?;
        let mut t = t_max.zero_like();
        let mut segments = Vec::new();
        let mut closed = false;
        for _ in 0..max_cells {
            let hit = self
                .ray_cast(cell, &p, d)
                .ok_or_else(|| Error::Precision(format!("ray leaves no boundary of cell {cell}")))?;
            let remaining = t_max.sub(&t);
            let limit = hit.t.min_s(&remaining);
            if let Some((tb, id)) = first_barrier(bars, cell, &p, d, &limit, closed) {
                let q = p.add(&d.scale(&tb));
                segments.push(Segment { cell, from: p, to: q.clone(), t0: t.clone(), exit_mark: exits.len() });
                return Ok(Walk { end: WalkEnd::Obstacle(id), cell, point: q, corner: None, t: t.add(&tb), exits, segments });
            }
            if remaining.cmp_s(&hit.t) <= 0 {
                let q = p.add(&d.scale(&remaining));
                let corner = match hit.kind {
                    HitKind::Vertex(j) if remaining.cmp_s(&hit.t) == 0 => Some(j),
                    _ => None,
                };
                segments.push(Segment { cell, from: p, to: q.clone(), t0: t.clone(), exit_mark: exits.len() });
                return Ok(Walk { end: WalkEnd::TimeUp, cell, point: q, corner, t: t_max.clone(), exits, segments });
            }
            let q = p.add(&d.scale(&hit.t));
            segments.push(Segment { cell, from: p, to: q.clone(), t0: t.clone(), exit_mark: exits.len() });
            t = t.add(&hit.t);
            closed = true;
            match hit.kind {
                HitKind::Edge(e) => {
                    exits.push((cell, e));
                    let ((c2, _), tr) = self.crossing((cell, e));
                    cell = c2;
                    p = q.add(&tr);
                }
                HitKind::Vertex(j) => {
                    let v = self.vertex_of((cell, j));
                    if self.stop[v] {
                        return Ok(Walk { end: WalkEnd::Stop(v), cell, point: q, corner: Some(j), t, exits, segments });
                    }
                    let (c2, j2) = self.rotate_to((cell, j), d, &mut exits)?;
                    cell = c2;
                    p = self.verts[c2][j2].clone();
                }
            }
        }
        Err(Error::NoReturn(format!("walk exceeded {max_cells} cells")))
    }
}
