//! Rigidity configurations (J, R) built from downward prongs and horizontal
//! rays, and an independent checker that re-flows them.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::homology::HomologyBasis;
use crate::surface::Edge;

use super::frame::FlowSurface;
use super::iet::{exit_counts, first_return_iet, Transversal};
use super::scalar::{Scalar, Vec2};
use super::segment::{HSeg, Landing};
use super::walk::{Barrier, Segment, Start, WalkEnd};

#[derive(Clone, Debug)]
pub struct RigidityOptions {
    /// Stand-in for the shortest saddle connection length in the short-base
    /// case.
    pub case1_epsilon: f64,
    pub max_cells: usize,
    pub max_pieces: usize,
}

impl Default for RigidityOptions {
    fn default() -> Self {
        RigidityOptions { case1_epsilon: 1.0, max_cells: 200_000, max_pieces: 2_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RigidityCase {
    /// J is a short initial piece of J′; R is the tower over its longest interval.
    ShortBase,
    /// J = J′ with long returns; R is the tower over its longest interval.
    LongReturn,
    /// Short return to J′: R stacks k returns of J′.
    Stacked,
}

impl RigidityCase {
    pub fn number(&self) -> u8 {
        match self {
            RigidityCase::ShortBase => 1,
            RigidityCase::LongReturn => 2,
            RigidityCase::Stacked => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RigidityConfig<T> {
    pub v: T,
    pub h: T,
    pub sigma: T,
    pub l: T,
    /// Parameter of the top of a vertical segment of R minus that of its bottom.
    pub displacement: T,
    pub j: Transversal<T>,
    /// Base of R in the parameter of J.
    pub base: (T, T),
    pub case: RigidityCase,
    /// Edges exited by the rigidity curve.
    pub curve_exits: Vec<Edge>,
    pub curve_class: Vec<BigInt>,
    /// Realized constant max(V/L, L/V, H·L, area/σ).
    pub constant: f64,
}

struct Prong<T> {
    segments: Vec<Segment<T>>,
    end: Option<(usize, Vec2<T>)>,
}

fn unit<T: Scalar>(z: &T, x: i64, y: i64) -> Vec2<T> {
    Vec2::new(z.int_like(x), z.int_like(y))
}

impl<T: Scalar> FlowSurface<T> {
    fn stop_vertices(&self) -> Vec<usize> {
        (0..self.stop.len()).filter(|&v| self.stop[v]).collect()
    }

    fn prongs(&self, len: &T, max_cells: usize) -> Result<Vec<Prong<T>>> {
        let down = unit(len, 0, -1);
        let mut out = Vec::new();
        for v in self.stop_vertices() {
            for (c, j) in self.corners_containing(v, &down) {
                let w = self.walk(Start::Corner(c, j), &down, len, &[], max_cells)?;
                let end = match w.end {
                    WalkEnd::TimeUp => Some((w.cell, w.point.clone())),
                    _ => None,
                };
                out.push(Prong { segments: w.segments, end });
            }
        }
        Ok(out)
    }

    /// Horizontal ray as a group of segments parametrized from its left end.
    fn ray(&self, start: Start<T>, leftward: bool, bars: &[Barrier<T>], max_cells: usize) -> Result<Vec<HSeg<T>>> {
        let z = bars.first().map(|b| b.a.x.zero_like()).unwrap_or_else(|| self.origin_like().zero_like());
        let d = unit(&z, if leftward { -1 } else { 1 }, 0);
        let big = z.int_like(1 << 40);
        let w = self.walk(start, &d, &big, bars, max_cells)?;
        if w.end == WalkEnd::TimeUp {
            return Err(Error::BelowL0);
        }
        let total = w.t.clone();
        let mut segs = Vec::new();
        for s in &w.segments {
            let len = s.to.x.sub(&s.from.x).abs_s();
            if len.sgn() <= 0 {
                continue;
            }
            if leftward {
                let base = total.sub(&s.t0).sub(&len);
                segs.push(HSeg { cell: s.cell, y: s.from.y.clone(), x0: s.to.x.clone(), x1: s.from.x.clone(), base });
            } else {
                segs.push(HSeg { cell: s.cell, y: s.from.y.clone(), x0: s.from.x.clone(), x1: s.to.x.clone(), base: s.t0.clone() });
            }
        }
        if leftward {
            segs.reverse();
        }
        Ok(segs)
    }

    /// Point of a parametrized group at parameter u, preferring the segment
    /// that continues to the right of u.
    fn point_at(group: &[HSeg<T>], u: &T) -> Option<(usize, Vec2<T>)> {
        let inside = |s: &HSeg<T>| s.base.cmp_s(u) <= 0 && s.end().cmp_s(u) > 0;
        let s = group.iter().find(|s| inside(s)).or_else(|| group.iter().find(|s| s.end().cmp_s(u) == 0))?;
        Some((s.cell, Vec2::new(s.x0.add(&u.sub(&s.base)), s.y.clone())))
    }

    /// Parameter of a point lying on the transversal, if it does.
    pub fn param_on(&self, tr: &Transversal<T>, cell: usize, p: &Vec2<T>) -> Option<T> {
        let find = |cell: usize, p: &Vec2<T>| {
            tr.segs
                .iter()
                .find(|s| s.cell == cell && s.y.cmp_s(&p.y) == 0 && s.x0.cmp_s(&p.x) <= 0 && s.x1.cmp_s(&p.x) >= 0)
                .map(|s| s.param(&p.x))
        };
        if let Some(u) = find(cell, p) {
            return Some(u);
        }
        // The same point seen from the cell across an edge it lies on.
        let vs = &self.verts[cell];
        for (i, e) in self.edges[cell].iter().enumerate() {
            let w = p.sub(&vs[i]);
            if w.cross(e).sgn() != 0 || w.dot(e).sgn() < 0 || w.dot(e).cmp_s(&e.dot(e)) > 0 {
                continue;
            }
            let ((c2, _), tr2) = self.crossing((cell, i));
            if let Some(u) = find(c2, &p.add(&tr2)) {
                return Some(u);
            }
        }
        None
    }

    fn sub_transversal(&self, group: &[HSeg<T>], lo: &T, len: &T) -> Result<Transversal<T>> {
        let (c, p) = Self::point_at(group, lo).ok_or_else(|| Error::Precision("base point not on its ray".into()))?;
        self.transversal(Start::Point(c, p), len)
    }

    /// Rectangles of the complement of prongs and rays: (ray, landing).
    fn rectangles(&self, l: &T, opts: &RigidityOptions) -> Result<(Vec<Vec<HSeg<T>>>, Vec<Landing<T>>)> {
        let two_l = l.add(l);
        let prongs = self.prongs(&two_l, opts.max_cells)?;
        let mut bars = Vec::new();
        for (i, p) in prongs.iter().enumerate() {
            for s in &p.segments {
                bars.push(Barrier { cell: s.cell, a: s.from.clone(), b: s.to.clone(), id: i, open: false });
            }
        }
        let z = l.zero_like();
        let mut rays = Vec::new();
        for v in self.stop_vertices() {
            for leftward in [false, true] {
                let d = unit(&z, if leftward { -1 } else { 1 }, 0);
                for (c, j) in self.corners_containing(v, &d) {
                    rays.push(self.ray(Start::Corner(c, j), leftward, &bars, opts.max_cells)?);
                }
            }
        }
        for p in &prongs {
            if let Some((c, pt)) = &p.end {
                for leftward in [false, true] {
                    rays.push(self.ray(Start::Point(*c, pt.clone()), leftward, &bars, opts.max_cells)?);
                }
            }
        }
        rays.retain(|r| !r.is_empty());
        let boxes = self.flow_segments(&rays, &rays, None, opts.max_pieces)?;
        Ok((rays, boxes))
    }

    fn curve_class(&self, basis: Option<&HomologyBasis>, exits: &[Edge]) -> Vec<BigInt> {
        basis.map(|b| b.class_of_crossings(&exit_counts(b, exits))).unwrap_or_default()
    }

    fn constant(&self, v: &T, h: &T, sigma: &T, l: &T) -> f64 {
        let (v, h, s, l) = (v.to_f64(), h.to_f64(), sigma.to_f64(), l.to_f64());
        let area = self.area.to_f64();
        (v / l).max(l / v).max(h * l).max(area / s)
    }

    /// Tower over the longest interval of the first return to J.
    fn tower(&self, j: Transversal<T>, l: &T, case: RigidityCase, basis: Option<&HomologyBasis>, opts: &RigidityOptions) -> Result<RigidityConfig<T>> {
        let boxes = self.flow_segments(std::slice::from_ref(&j.segs), std::slice::from_ref(&j.segs), None, opts.max_pieces)?;
        let best = boxes
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.width().cmp_s(&b.width()).cmp(&0).then(ib.cmp(ia)))
            .map(|(_, b)| b.clone())
            .ok_or_else(|| Error::NoReturn("empty first-return map".into()))?;
        let mid = best.src_lo.add(&best.src_hi).half();
        let top = mid.add(&best.translation());
        let mut exits = best.exits.clone();
        exits.extend(self.along_exits(&j, &top, &mid));
        let v = best.time.clone();
        let disp = best.translation();
        let h = disp.abs_s();
        let sigma = best.width().mul(&v);
        Ok(RigidityConfig {
            constant: self.constant(&v, &h, &sigma, l),
            curve_class: self.curve_class(basis, &exits),
            curve_exits: exits,
            v,
            h,
            sigma,
            l: l.clone(),
            displacement: disp,
            j,
            base: (best.src_lo.clone(), best.src_hi.clone()),
            case,
        })
    }

    fn stacked(&self, jp: &Transversal<T>, s: &T, w: &T, l: &T, basis: Option<&HomologyBasis>, opts: &RigidityOptions) -> Result<RigidityConfig<T>> {
        let k = ((l.to_f64() / s.to_f64()).ceil() as i64 - 1).max(1);
        let kk = s.int_like(k);
        let shift = w.mul(&kk);
        let len = jp.length.add(&shift.abs_s());
        let (start, base_lo) = if shift.sgn() >= 0 {
            (jp.start.clone(), s.zero_like())
        } else {
            // Walk left from the start of J′ by k|w|.
            let left = unit(s, -1, 0);
            let w0 = self.walk(jp.start.clone(), &left, &shift.abs_s(), &[], opts.max_cells)?;
            if w0.end != WalkEnd::TimeUp {
                return Err(Error::SaddleConnectionHit("stacked transversal runs into a singularity".into()));
            }
            (Start::Point(w0.cell, w0.point), shift.abs_s())
        };
        let j = self.transversal(start, &len)?;
        let v = s.mul(&kk);
        let base = (base_lo.clone(), base_lo.add(&jp.length));
        let mid = base.0.add(&base.1).half();
        let (c, p) = Self::point_at(&j.segs, &mid).ok_or_else(|| Error::Precision("base midpoint".into()))?;
        let up = unit(s, 0, 1);
        let wk = self.walk(Start::Point(c, p), &up, &v, &[], opts.max_cells)?;
        if wk.end != WalkEnd::TimeUp {
            return Err(Error::SaddleConnectionHit("stacked rectangle meets a singularity".into()));
        }
        let top = self.param_on(&j, wk.cell, &wk.point).ok_or_else(|| Error::Precision("stacked top is off J".into()))?;
        let mut exits = wk.exits.clone();
        exits.extend(self.along_exits(&j, &top, &mid));
        let disp = top.sub(&mid);
        let h = disp.abs_s();
        let sigma = jp.length.mul(s);
        Ok(RigidityConfig {
            constant: self.constant(&v, &h, &sigma, l),
            curve_class: self.curve_class(basis, &exits),
            curve_exits: exits,
            v,
            h,
            sigma,
            l: l.clone(),
            displacement: disp,
            j,
            base,
            case: RigidityCase::Stacked,
        })
    }

    /// Build a (V, H, σ, L)-rigidity configuration following the prong and
    /// ray construction with its three cases; each candidate is checked and
    /// the first that passes is returned.
    pub fn rigidity_configuration(&self, l: &T, basis: Option<&HomologyBasis>, opts: &RigidityOptions) -> Result<RigidityConfig<T>> {
        if !self.stop.iter().any(|&s| s) {
            return Err(Error::InvalidSurface("no cone point or marked point to seed prongs".into()));
        }
        let (rays, boxes) = self.rectangles(l, opts)?;
        let rp = boxes
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.width().mul(&a.time).cmp_s(&b.width().mul(&b.time)).cmp(&0).then(ib.cmp(ia)))
            .map(|(_, b)| b.clone())
            .ok_or_else(|| Error::NoReturn("no rectangles".into()))?;
        let group = &rays[rp.source];
        let jp = self.sub_transversal(group, &rp.src_lo, &rp.width())?;
        let ret = first_return_iet(self, &jp, None, opts.max_pieces)?;
        let (imin, s) = ret
            .return_times
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp_s(b.1).cmp(&0))
            .map(|(i, t)| (i, t.clone()))
            .ok_or_else(|| Error::NoReturn("empty first-return map".into()))?;
        let mut candidates: Vec<RigidityConfig<T>> = Vec::new();
        // Case 1: leftmost piece of J′ of length min(ε/2L, |J′|).
        let eps = l.int_like(1).mul(&from_f64_like(l, opts.case1_epsilon));
        let short = eps.div(&l.add(l)).min_s(&jp.length);
        let j1 = self.sub_transversal(group, &rp.src_lo, &short)?;
        if let Ok(r1) = first_return_iet(self, &j1, None, opts.max_pieces) {
            let claim = l.mul(&eps).half();
            if r1.return_times.iter().all(|t| t.cmp_s(&claim) >= 0) {
                candidates.push(self.tower(j1, l, RigidityCase::ShortBase, basis, opts)?);
            }
        }
        let tenth = l.div(&l.int_like(10));
        if s.cmp_s(&tenth) >= 0 {
            candidates.push(self.tower(jp.clone(), l, RigidityCase::LongReturn, basis, opts)?);
        } else {
            if let Ok(c3) = self.stacked(&jp, &s, &ret.translations[imin], l, basis, opts) {
                candidates.push(c3);
            }
            candidates.push(self.tower(jp.clone(), l, RigidityCase::LongReturn, basis, opts)?);
        }
        let mut last_err = Error::NoReturn("no candidate configuration".into());
        for c in candidates {
            match self.check_rigidity(&c, opts) {
                Ok(rep) if rep.passed() => return Ok(c),
                Ok(rep) => last_err = Error::Precision(format!("case {} failed verification: {:?}", c.case.number(), rep)),
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }
}

fn from_f64_like<T: Scalar>(like: &T, x: f64) -> T {
    // Dyadic approximation p / 2^20 of a positive constant.
    let p = (x * 1_048_576.0).round() as i64;
    like.int_like(p).div(&like.int_like(1_048_576))
}

/// Result of re-flowing a configuration.
#[derive(Clone, Debug, Default)]
pub struct RigidityCheck {
    /// (1) J flows up to time L without meeting a singularity.
    pub flows_clear: bool,
    /// (2) both horizontal sides of R lie in J.
    pub sides_in_j: bool,
    /// (3) vertical sides have length V and R contains no singularity.
    pub vertical_ok: bool,
    /// (4) every sampled vertical segment has displacement H along J.
    pub displacement_ok: bool,
    /// (5) the embedded sub-rectangle from the base has area σ.
    pub area_ok: bool,
    pub measured_v: f64,
    pub measured_h: f64,
    pub measured_sigma: f64,
}

impl RigidityCheck {
    pub fn passed(&self) -> bool {
        self.flows_clear && self.sides_in_j && self.vertical_ok && self.displacement_ok && self.area_ok
    }
}

impl<T: Scalar> FlowSurface<T> {
    /// Verify conditions (1)–(5) by fresh flows.
    pub fn check_rigidity(&self, cfg: &RigidityConfig<T>, opts: &RigidityOptions) -> Result<RigidityCheck> {
        let z = cfg.l.zero_like();
        let up = unit(&z, 0, 1);
        let down = unit(&z, 0, -1);
        let close = |a: &T, b: &T| {
            if T::EXACT {
                a.cmp_s(b) == 0
            } else {
                (a.to_f64() - b.to_f64()).abs() <= 1e-9 * (1.0 + a.to_f64().abs().max(b.to_f64().abs()))
            }
        };
        let mut rep = RigidityCheck::default();
        let jbars: Vec<Barrier<T>> = cfg
            .j
            .segs
            .iter()
            .enumerate()
            .map(|(i, s)| Barrier { cell: s.cell, a: Vec2::new(s.x0.clone(), s.y.clone()), b: Vec2::new(s.x1.clone(), s.y.clone()), id: i, open: true })
            .collect();
        let base_tr = {
            let (c, p) = Self::point_at(&cfg.j.segs, &cfg.base.0).ok_or_else(|| Error::Precision("base off J".into()))?;
            self.transversal(Start::Point(c, p), &cfg.base.1.sub(&cfg.base.0))?
        };
        let bbars: Vec<Barrier<T>> = base_tr
            .segs
            .iter()
            .enumerate()
            .map(|(i, s)| Barrier { cell: s.cell, a: Vec2::new(s.x0.clone(), s.y.clone()), b: Vec2::new(s.x1.clone(), s.y.clone()), id: i, open: true })
            .collect();
        // (1) and the singularity-free part of (3): downward prongs must miss
        // J within time L and the base within time V.
        rep.flows_clear = true;
        rep.vertical_ok = true;
        for v in self.stop_vertices() {
            for (c, j) in self.corners_containing(v, &down) {
                let w = self.walk(Start::Corner(c, j), &down, &cfg.l, &jbars, opts.max_cells)?;
                if matches!(w.end, WalkEnd::Obstacle(_)) {
                    rep.flows_clear = false;
                }
                let w = self.walk(Start::Corner(c, j), &down, &cfg.v, &bbars, opts.max_cells)?;
                if matches!(w.end, WalkEnd::Obstacle(_)) {
                    rep.vertical_ok = false;
                }
            }
        }
        // (2)–(4) at sample points of the base.
        let top_lo = cfg.base.0.add(&cfg.displacement);
        let top_hi = cfg.base.1.add(&cfg.displacement);
        rep.sides_in_j = cfg.base.0.sgn() >= 0
            && cfg.base.1.cmp_s(&cfg.j.length) <= 0
            && top_lo.sgn() >= 0
            && top_hi.cmp_s(&cfg.j.length) <= 0;
        rep.displacement_ok = true;
        let width = cfg.base.1.sub(&cfg.base.0);
        for (num, den) in [(1, 8), (1, 4), (1, 2), (3, 4), (7, 8)] {
            let u = cfg.base.0.add(&width.mul(&z.int_like(num)).div(&z.int_like(den)));
            let Some((c, p)) = Self::point_at(&cfg.j.segs, &u) else {
                rep.sides_in_j = false;
                continue;
            };
            let w = self.walk(Start::Point(c, p), &up, &cfg.v, &[], opts.max_cells)?;
            if w.end != WalkEnd::TimeUp {
                rep.vertical_ok = false;
                continue;
            }
            match self.param_on(&cfg.j, w.cell, &w.point) {
                None => rep.sides_in_j = false,
                Some(t) => {
                    let d = t.sub(&u);
                    if !close(&d, &cfg.displacement) || !close(&d.abs_s(), &cfg.h) {
                        rep.displacement_ok = false;
                    }
                    rep.measured_h = d.abs_s().to_f64();
                }
            }
        }
        rep.measured_v = cfg.v.to_f64();
        // (5) height of the embedded part: first return of the base to itself.
        let ret = first_return_iet(self, &base_tr, None, opts.max_pieces)?;
        let hmin = ret.return_times.iter().fold(cfg.v.clone(), |acc, t| acc.min_s(t));
        let sigma = width.mul(&hmin);
        rep.measured_sigma = sigma.to_f64();
        rep.area_ok = close(&sigma, &cfg.sigma);
        Ok(rep)
    }
}
