//! First-return interval exchanges and their Rauzy–Veech renormalization.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::homology::HomologyBasis;
use crate::surface::Edge;

use super::frame::FlowSurface;
use super::scalar::{Scalar, Vec2};
use super::segment::HSeg;
use super::walk::{Start, WalkEnd};

/// Horizontal segment of the surface traced to the right from a start point.
#[derive(Clone, Debug)]
pub struct Transversal<T> {
    pub start: Start<T>,
    pub length: T,
    pub segs: Vec<HSeg<T>>,
    /// Parameter of each cell change and the edges exited there when moving right.
    pub crossings: Vec<(T, Vec<Edge>)>,
}

impl<T: Scalar> FlowSurface<T> {
    pub fn transversal(&self, start: Start<T>, length: &T) -> Result<Transversal<T>> {
        let z = length.zero_like();
        let right = Vec2::new(z.int_like(1), z.clone());
        let w = self.walk(start.clone(), &right, length, &[], 1_000_000)?;
        if let WalkEnd::Stop(v) = w.end {
            return Err(Error::SaddleConnectionHit(format!("transversal runs into vertex {v}")));
        }
        let mut segs: Vec<HSeg<T>> = Vec::new();
        let mut crossings = Vec::new();
        let mut mark = 0;
        for s in &w.segments {
            if s.to.x.cmp_s(&s.from.x) <= 0 {
                continue;
            }
            if !segs.is_empty() && s.exit_mark > mark {
                crossings.push((s.t0.clone(), w.exits[mark..s.exit_mark].to_vec()));
            }
            mark = s.exit_mark;
            segs.push(HSeg { cell: s.cell, y: s.from.y.clone(), x0: s.from.x.clone(), x1: s.to.x.clone(), base: s.t0.clone() });
        }
        Ok(Transversal { start, length: length.clone(), segs, crossings })
    }

    /// Edges exited when moving along the transversal from parameter `a` to `b`.
    pub fn along_exits(&self, tr: &Transversal<T>, a: &T, b: &T) -> Vec<Edge> {
        let mut out = Vec::new();
        if a.cmp_s(b) < 0 {
            for (u, ex) in &tr.crossings {
                if u.cmp_s(a) > 0 && u.cmp_s(b) < 0 {
                    out.extend(ex.iter().copied());
                }
            }
        } else {
            for (u, ex) in tr.crossings.iter().rev() {
                if u.cmp_s(b) > 0 && u.cmp_s(a) < 0 {
                    out.extend(ex.iter().rev().map(|&(c, p)| self.partner[c][p]));
                }
            }
        }
        out
    }
}

/// Exit counts per directed edge, in the numbering of the homology basis.
pub fn exit_counts(b: &HomologyBasis, exits: &[Edge]) -> Vec<i64> {
    let mut v = vec![0i64; b.edges.num_directed()];
    for &e in exits {
        v[b.edges.directed(e)] += 1;
    }
    v
}

#[derive(Clone, Debug)]
pub struct Iet<T> {
    /// Lengths by symbol.
    pub lengths: Vec<T>,
    /// Symbols in domain order and in image order.
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    pub return_times: Vec<T>,
    /// Image start minus domain start, by symbol.
    pub translations: Vec<T>,
    /// Homology class of return orbit plus closing segment, by symbol
    /// (empty when no basis was supplied).
    pub symbol_cycles: Vec<Vec<BigInt>>,
}

pub fn first_return_iet<T: Scalar>(
    fs: &FlowSurface<T>,
    tr: &Transversal<T>,
    basis: Option<&HomologyBasis>,
    max_pieces: usize,
) -> Result<Iet<T>> {
    let boxes = fs.flow_segments(std::slice::from_ref(&tr.segs), std::slice::from_ref(&tr.segs), None, max_pieces)?;
    let total = boxes.iter().fold(tr.length.zero_like(), |acc, b| acc.add(&b.width()));
    if total.cmp_rel(&tr.length) != 0 {
        return Err(Error::Precision("return boxes do not cover the transversal".into()));
    }
    let d = boxes.len();
    let mut bottom: Vec<usize> = (0..d).collect();
    bottom.sort_by(|&a, &b| boxes[a].dst_lo.cmp_s(&boxes[b].dst_lo).cmp(&0));
    let symbol_cycles = match basis {
        None => Vec::new(),
        Some(b) => boxes
            .iter()
            .map(|bx| {
                let mid = bx.src_lo.add(&bx.src_hi).half();
                let land = mid.add(&bx.translation());
                let mut ex = bx.exits.clone();
                ex.extend(fs.along_exits(tr, &land, &mid));
                b.class_of_crossings(&exit_counts(b, &ex))
            })
            .collect(),
    };
    Ok(Iet {
        lengths: boxes.iter().map(|b| b.width()).collect(),
        top: (0..d).collect(),
        bottom,
        return_times: boxes.iter().map(|b| b.time.clone()).collect(),
        translations: boxes.iter().map(|b| b.translation()).collect(),
        symbol_cycles,
    })
}

/// One accelerated renormalization step: old lengths = matrix · new lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleStep {
    pub matrix: Vec<Vec<i64>>,
    /// Transpose of `matrix`; acts on return times and symbol cycles.
    pub homology_update: Vec<Vec<i64>>,
    /// Whether the top row won (the last domain interval was longer).
    pub top: bool,
    pub rauzy_steps: usize,
}

impl<T: Scalar> Iet<T> {
    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn total_length(&self) -> T {
        self.lengths.iter().skip(1).fold(self.lengths[0].clone(), |acc, l| acc.add(l))
    }

    fn step_type(&self) -> Result<bool> {
        let d = self.dim();
        let (a, b) = (self.top[d - 1], self.bottom[d - 1]);
        match self.lengths[a].cmp_rel(&self.lengths[b]) {
            1 => Ok(true),
            -1 => Ok(false),
            _ => Err(Error::Tie),
        }
    }

    /// One Rauzy–Veech step; returns (top won, winner, loser).
    pub fn rauzy_step(&mut self) -> Result<(bool, usize, usize)> {
        if self.dim() < 2 {
            return Err(Error::Degenerate);
        }
        let top = self.step_type()?;
        let d = self.dim();
        let (a, b) = (self.top[d - 1], self.bottom[d - 1]);
        let (win, lose) = if top { (a, b) } else { (b, a) };
        self.lengths[win] = self.lengths[win].sub(&self.lengths[lose]);
        if self.lengths[win].sgn() <= 0 {
            return Err(Error::Degenerate);
        }
        self.return_times[lose] = self.return_times[lose].add(&self.return_times[win]);
        self.translations[lose] = self.translations[lose].add(&self.translations[win]);
        if !self.symbol_cycles.is_empty() {
            let w = self.symbol_cycles[win].clone();
            for (x, y) in self.symbol_cycles[lose].iter_mut().zip(&w) {
                *x += y;
            }
        }
        let row = if top { &mut self.bottom } else { &mut self.top };
        row.pop();
        let pos = row.iter().position(|&s| s == win).expect("winner in row");
        row.insert(pos + 1, lose);
        Ok((top, win, lose))
    }

    /// Zorich step: Rauzy steps of one type until the type changes.
    pub fn zorich_step(&mut self) -> Result<CocycleStep> {
        let d = self.dim();
        let mut m: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        let (top, win, lose) = self.rauzy_step()?;
        add_elementary(&mut m, win, lose);
        let mut steps = 1;
        while let Ok(t) = self.step_type() {
            if t != top || steps >= 1_000_000 {
                break;
            }
            let (_, w, l) = self.rauzy_step()?;
            add_elementary(&mut m, w, l);
            steps += 1;
        }
        let mt = (0..d).map(|i| (0..d).map(|j| m[j][i]).collect()).collect();
        Ok(CocycleStep { matrix: m, homology_update: mt, top, rauzy_steps: steps })
    }
}

/// m ← m · (I + E_{win, lose}).
fn add_elementary(m: &mut [Vec<i64>], win: usize, lose: usize) {
    for row in m.iter_mut() {
        row[lose] += row[win];
    }
}

/// Functional form of a Zorich step.
pub fn zorich_step<T: Scalar>(t: &Iet<T>) -> Result<(Iet<T>, CocycleStep)> {
    let mut n = t.clone();
    let s = n.zorich_step()?;
    Ok((n, s))
}
