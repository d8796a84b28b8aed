//! Upward flow of horizontal intervals, split at cell vertices.

use crate::error::{Error, Result};
use crate::surface::Edge;

use super::frame::{FlowSurface, HitKind};
use super::scalar::{Scalar, Vec2};

/// Horizontal segment y = const, x ∈ [x0, x1] in a cell. Points carry a
/// global parameter: `base` at x0, increasing with x.
#[derive(Clone, Debug)]
pub struct HSeg<T> {
    pub cell: usize,
    pub y: T,
    pub x0: T,
    pub x1: T,
    pub base: T,
}

impl<T: Scalar> HSeg<T> {
    pub fn param(&self, x: &T) -> T {
        self.base.add(&x.sub(&self.x0))
    }
    pub fn end(&self) -> T {
        self.param(&self.x1)
    }
}

/// A flow box from a source interval to a target interval.
#[derive(Clone, Debug)]
pub struct Landing<T> {
    /// Index of the source group.
    pub source: usize,
    pub src_lo: T,
    pub src_hi: T,
    pub dst_lo: T,
    pub dst_hi: T,
    /// Index of the target group that was hit.
    pub target: usize,
    pub time: T,
    pub exits: Vec<Edge>,
}

impl<T: Scalar> Landing<T> {
    pub fn width(&self) -> T {
        self.src_hi.sub(&self.src_lo)
    }
    pub fn translation(&self) -> T {
        self.dst_lo.sub(&self.src_lo)
    }
}

#[derive(Clone, Debug)]
struct Piece<T> {
    cell: usize,
    lo: T,
    hi: T,
    /// time at local point (x, y) is y − oy; parameter is x − ou.
    oy: T,
    ou: T,
    bottom: Bottom<T>,
    exits: Vec<Edge>,
    source: usize,
}

#[derive(Clone, Debug)]
enum Bottom<T> {
    Line(T),
    Edge(usize),
}

impl<T: Scalar> FlowSurface<T> {
    fn bottom_y(&self, cell: usize, b: &Bottom<T>, x: &T) -> T {
        match b {
            Bottom::Line(y) => y.clone(),
            Bottom::Edge(p) => {
                let v = &self.verts[cell][*p];
                let e = &self.edges[cell][*p];
                v.y.add(&x.sub(&v.x).mul(&e.y).div(&e.x))
            }
        }
    }

    /// Flow every source segment upward until it lands on a target segment.
    /// Sources and targets are grouped, each group sharing one parameter.
    /// Returns flow boxes in source order, with boxes that continue each
    /// other merged.
    pub fn flow_segments(
        &self,
        sources: &[Vec<HSeg<T>>],
        targets: &[Vec<HSeg<T>>],
        time_cap: Option<&T>,
        max_pieces: usize,
    ) -> Result<Vec<Landing<T>>> {
        let up = {
            let z = self.origin_like().zero_like();
            Vec2::new(z.clone(), z.int_like(1))
        };
        let mut stack: Vec<(Piece<T>, bool)> = sources
            .iter()
            .enumerate()
            .flat_map(|(gi, g)| g.iter().map(move |s| (gi, s)))
            .map(|(gi, s)| {
                (
                    Piece {
                        cell: s.cell,
                        lo: s.x0.clone(),
                        hi: s.x1.clone(),
                        oy: s.y.clone(),
                        ou: s.x0.sub(&s.base),
                        bottom: Bottom::Line(s.y.clone()),
                        exits: Vec::new(),
                        source: gi,
                    },
                    true,
                )
            })
            .collect();
        stack.reverse();
        let mut out = Vec::new();
        let mut budget = max_pieces;
        while let Some((pc, initial)) = stack.pop() {
            if budget == 0 {
                return Err(Error::NoReturn(format!("segment flow exceeded {max_pieces} pieces")));
            }
            budget -= 1;
            let c = pc.cell;
            let mut cuts: Vec<T> = self.verts[c].iter().map(|v| v.x.clone()).collect();
            for g in targets {
                for t in g.iter().filter(|t| t.cell == c) {
                    cuts.push(t.x0.clone());
                    cuts.push(t.x1.clone());
                }
            }
            let mut inner: Vec<T> = cuts.into_iter().filter(|x| x.cmp_s(&pc.lo) > 0 && x.cmp_s(&pc.hi) < 0).collect();
            inner.sort_by(|a, b| a.cmp_s(b).cmp(&0));
            inner.dedup_by(|a, b| a.cmp_s(b) == 0);
            let mut bounds = vec![pc.lo.clone()];
            bounds.extend(inner);
            bounds.push(pc.hi.clone());
            let mut next = Vec::new();
            for w in bounds.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                let m = a.add(b).half();
                let ym = self.bottom_y(c, &pc.bottom, &m);
                let Some(hit) = self.ray_cast(c, &Vec2::new(m.clone(), ym.clone()), &up) else {
                    // A source lying on a top edge starts in the cell above.
                    let top = (0..self.edges[c].len()).find(|&i| {
                        let e = &self.edges[c][i];
                        let w = Vec2::new(m.clone(), ym.clone()).sub(&self.verts[c][i]);
                        e.x.sgn() < 0 && w.cross(e).sgn() == 0
                    });
                    let (Some(p), true) = (top, initial) else {
                        return Err(Error::Precision("vertical ray leaves no boundary".into()));
                    };
                    let ((d, q), tr) = self.crossing((c, p));
                    let mut exits = pc.exits.clone();
                    exits.push((c, p));
                    next.push((
                        Piece {
                            cell: d,
                            lo: a.add(&tr.x),
                            hi: b.add(&tr.x),
                            oy: pc.oy.add(&tr.y),
                            ou: pc.ou.add(&tr.x),
                            bottom: Bottom::Edge(q),
                            exits,
                            source: pc.source,
                        },
                        true,
                    ));
                    continue;
                };
                let mut best: Option<(T, usize, &HSeg<T>)> = None;
                for (gi, g) in targets.iter().enumerate() {
                    for t in g.iter().filter(|t| t.cell == c) {
                        if t.x0.cmp_s(&m) >= 0 || t.x1.cmp_s(&m) <= 0 {
                            continue;
                        }
                        let dt = t.y.sub(&ym);
                        let s = dt.sgn();
                        if s < 0 || (s == 0 && initial) || dt.cmp_s(&hit.t) > 0 {
                            continue;
                        }
                        if best.as_ref().is_none_or(|(bt, _, _)| dt.cmp_s(bt) < 0) {
                            best = Some((dt, gi, t));
                        }
                    }
                }
                if let Some((_, gi, t)) = best {
                    let time = t.y.sub(&pc.oy);
                    out.push(Landing {
                        source: pc.source,
                        src_lo: a.sub(&pc.ou),
                        src_hi: b.sub(&pc.ou),
                        dst_lo: t.param(a),
                        dst_hi: t.param(b),
                        target: gi,
                        time,
                        exits: pc.exits.clone(),
                    });
                    continue;
                }
                if let Some(cap) = time_cap {
                    if ym.add(&hit.t).sub(&pc.oy).cmp_s(cap) > 0 {
                        return Err(Error::NoReturn("segment flow exceeded its time cap".into()));
                    }
                }
                let HitKind::Edge(p) = hit.kind else {
                    return Err(Error::Precision("vertical ray through a vertex inside a piece".into()));
                };
                let ((d, q), tr) = self.crossing((c, p));
                let mut exits = pc.exits.clone();
                exits.push((c, p));
                next.push((
                    Piece {
                        cell: d,
                        lo: a.add(&tr.x),
                        hi: b.add(&tr.x),
                        oy: pc.oy.add(&tr.y),
                        ou: pc.ou.add(&tr.x),
                        bottom: Bottom::Edge(q),
                        exits,
                        source: pc.source,
                    },
                    false,
                ));
            }
            next.reverse();
            stack.extend(next);
        }
        out.sort_by(|a, b| a.source.cmp(&b.source).then(a.src_lo.cmp_s(&b.src_lo).cmp(&0)));
        Ok(merge_landings(out))
    }
}

fn merge_landings<T: Scalar>(v: Vec<Landing<T>>) -> Vec<Landing<T>> {
    let mut out: Vec<Landing<T>> = Vec::new();
    for l in v {
        if let Some(last) = out.last_mut() {
            if last.source == l.source
                && last.target == l.target
                && last.src_hi.cmp_s(&l.src_lo) == 0
                && last.dst_hi.cmp_s(&l.dst_lo) == 0
                && last.time.cmp_s(&l.time) == 0
            {
                last.src_hi = l.src_hi;
                last.dst_hi = l.dst_hi;
                continue;
            }
        }
        out.push(l);
    }
    out
}
