//! Cylinder decomposition of a completely periodic vertical direction.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::homology::HomologyBasis;
use crate::surface::Edge;

use super::frame::{FlowSurface, HitKind};
use super::iet::exit_counts;
use super::scalar::{Scalar, Vec2};
use super::walk::{Barrier, Start, WalkEnd};

#[derive(Clone, Debug)]
pub struct Cylinder<T> {
    pub circumference: T,
    pub height: T,
    pub area: T,
    /// Class of a closed vertical orbit (empty without a basis).
    pub waist: Vec<BigInt>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Piece of an entry edge (an edge the upward flow crosses into its cell).
struct EdgePiece<T> {
    edge: Edge,
    lo: T,
    hi: T,
}

impl<T: Scalar> FlowSurface<T> {
    fn edge_y(&self, (c, p): Edge, x: &T) -> T {
        let v = &self.verts[c][p];
        let e = &self.edges[c][p];
        v.y.add(&x.sub(&v.x).mul(&e.y).div(&e.x))
    }

    /// Decompose the surface into vertical cylinders. Every upward separatrix
    /// must close within `max_cells` cell crossings.
    pub fn cylinders(&self, basis: Option<&HomologyBasis>, max_cells: usize) -> Result<Vec<Cylinder<T>>> {
        let z = self.origin_like().zero_like();
        let up = Vec2::new(z.clone(), z.int_like(1));
        let mut fs = self.clone();
        if !fs.stop.iter().any(|&s| s) {
            fs.stop[0] = true;
        }
        let big = z.int_like(i64::MAX / 4);
        // Split points on entry edges, in local coordinates of the entered cell.
        let mut cuts: Vec<Vec<Vec<T>>> = fs.verts.iter().map(|c| vec![Vec::new(); c.len()]).collect();
        for v in 0..fs.stop.len() {
            if !fs.stop[v] {
                continue;
            }
            for (c, j) in fs.corners_containing(v, &up) {
                let w = fs.walk(Start::Corner(c, j), &up, &big, &[], max_cells).map_err(|e| match e {
                    Error::NoReturn(m) => Error::NotPeriodic(m),
                    e => e,
                })?;
                if !matches!(w.end, WalkEnd::Stop(_)) {
                    return Err(Error::NotPeriodic("separatrix did not close".into()));
                }
                for s in &w.segments {
                    // The segment's start lies on the edge it entered through.
                    if s.exit_mark == 0 {
                        continue;
                    }
                    let (c0, p0) = w.exits[s.exit_mark - 1];
                    let ((d, q), _) = fs.crossing((c0, p0));
                    if d == s.cell && fs.edges[d][q].x.sgn() > 0 {
                        cuts[d][q].push(s.from.x.clone());
                    }
                }
            }
        }
        let mut pieces: Vec<EdgePiece<T>> = Vec::new();
        let mut by_edge: Vec<Vec<Vec<usize>>> = fs.verts.iter().map(|c| vec![Vec::new(); c.len()]).collect();
        for c in 0..fs.num_cells() {
            for p in 0..fs.verts[c].len() {
                let e = &fs.edges[c][p];
                if e.x.sgn() <= 0 {
                    continue;
                }
                let a = fs.verts[c][p].x.clone();
                let b = a.add(&e.x);
                let mut xs: Vec<T> = cuts[c][p].iter().filter(|x| x.cmp_s(&a) > 0 && x.cmp_s(&b) < 0).cloned().collect();
                xs.sort_by(|u, v| u.cmp_s(v).cmp(&0));
                xs.dedup_by(|u, v| u.cmp_s(v) == 0);
                let mut bounds = vec![a];
                bounds.extend(xs);
                bounds.push(b);
                for w in bounds.windows(2) {
                    by_edge[c][p].push(pieces.len());
                    pieces.push(EdgePiece { edge: (c, p), lo: w[0].clone(), hi: w[1].clone() });
                }
            }
        }
        let mut dsu = Dsu((0..pieces.len()).collect());
        let mut areas: Vec<T> = vec![z.clone(); pieces.len()];
        for (i, pc) in pieces.iter().enumerate() {
            let (c, p) = pc.edge;
            let mut xs: Vec<T> = fs.verts[c].iter().map(|v| v.x.clone()).filter(|x| x.cmp_s(&pc.lo) > 0 && x.cmp_s(&pc.hi) < 0).collect();
            xs.sort_by(|u, v| u.cmp_s(v).cmp(&0));
            xs.dedup_by(|u, v| u.cmp_s(v) == 0);
            let mut bounds = vec![pc.lo.clone()];
            bounds.extend(xs);
            bounds.push(pc.hi.clone());
            for w in bounds.windows(2) {
                let m = w[0].add(&w[1]).half();
                let ym = fs.edge_y((c, p), &m);
                let hit = fs
                    .ray_cast(c, &Vec2::new(m.clone(), ym), &up)
                    .ok_or_else(|| Error::Precision("vertical ray leaves no boundary".into()))?;
                let HitKind::Edge(r) = hit.kind else {
                    return Err(Error::Precision("vertical ray through a vertex inside a piece".into()));
                };
                areas[i] = areas[i].add(&w[1].sub(&w[0]).mul(&hit.t));
                let ((d, q), tr) = fs.crossing((c, r));
                let (a2, b2) = (w[0].add(&tr.x), w[1].add(&tr.x));
                for &k in &by_edge[d][q] {
                    let o = &pieces[k];
                    if o.lo.cmp_s(&b2) < 0 && o.hi.cmp_s(&a2) > 0 {
                        dsu.union(i, k);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..pieces.len()).map(|i| dsu.find(i)).collect();
        let mut order: Vec<usize> = roots.clone();
        order.sort();
        order.dedup();
        let mut out = Vec::new();
        for r in order {
            let members: Vec<usize> = (0..pieces.len()).filter(|&i| roots[i] == r).collect();
            let area = members.iter().fold(z.clone(), |acc, &i| acc.add(&areas[i]));
            let pc = &pieces[members[0]];
            let m = pc.lo.add(&pc.hi).half();
            let start = Vec2::new(m.clone(), fs.edge_y(pc.edge, &m));
            let (c, p) = pc.edge;
            let bar = Barrier {
                cell: c,
                a: Vec2::new(pc.lo.clone(), fs.edge_y(pc.edge, &pc.lo)),
                b: Vec2::new(pc.hi.clone(), fs.edge_y(pc.edge, &pc.hi)),
                id: 0,
                open: false,
            };
            let w = fs.walk(Start::Point(c, start.clone()), &up, &big, &[bar], max_cells)?;
            if w.end != WalkEnd::Obstacle(0) || w.point.x.cmp_s(&start.x) != 0 {
                return Err(Error::NotPeriodic(format!("orbit through edge ({c},{p}) does not close")));
            }
            let waist = basis.map(|b| b.class_of_crossings(&exit_counts(b, &w.exits))).unwrap_or_default();
            let height = area.div(&w.t);
            out.push(Cylinder { circumference: w.t, height, area, waist });
        }
        Ok(out)
    }
}
