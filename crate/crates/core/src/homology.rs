//! Integral homology via tree–cotree decomposition, symplectic bases and the
//! exact period matrix.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{self, IMat};
use crate::surface::{Edge, TranslationSurface};

/// Edge classes of a surface with a representative directed edge each.
#[derive(Clone, Debug)]
pub struct EdgeIndex {
    pub reps: Vec<Edge>,
    /// offset[c] + p is the global index of directed edge (c, p).
    pub offset: Vec<usize>,
    /// (edge class, ±1) for each directed edge.
    pub class: Vec<(usize, i64)>,
}

impl EdgeIndex {
    pub fn new(s: &TranslationSurface) -> EdgeIndex {
        let mut offset = Vec::with_capacity(s.cells.len());
        let mut total = 0;
        for c in &s.cells {
            offset.push(total);
            total += c.len();
        }
        let mut class = vec![(usize::MAX, 0); total];
        let mut reps = Vec::new();
        for (c, row) in s.partner.iter().enumerate() {
            for (p, &(d, q)) in row.iter().enumerate() {
                if class[offset[c] + p].0 != usize::MAX {
                    continue;
                }
                let id = reps.len();
                reps.push((c, p));
                class[offset[c] + p] = (id, 1);
                class[offset[d] + q] = (id, -1);
            }
        }
        EdgeIndex { reps, offset, class }
    }

    pub fn directed(&self, (c, p): Edge) -> usize {
        self.offset[c] + p
    }

    pub fn num_directed(&self) -> usize {
        self.class.len()
    }
}

/// Basis of H₁(X; ℤ) as edge chains with its intersection matrix.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub edges: EdgeIndex,
    /// cycles[j][e]: coefficient of edge class e (in its representative direction).
    pub cycles: Vec<Vec<BigInt>>,
    /// intersection[i][j] = cycles[i] · cycles[j].
    pub intersection: IMat,
    /// Dual curves: duals[j][x] counts the exits through directed edge x of
    /// a closed transverse curve homologous to cycles[j].
    duals: Vec<Vec<i64>>,
    /// Inverse transpose of the intersection matrix.
    inv_t: IMat,
}

impl HomologyBasis {
    pub fn rank(&self) -> usize {
        self.cycles.len()
    }

    pub fn genus(&self) -> usize {
        self.cycles.len() / 2
    }

    /// Intersection numbers γ · z_j from the net number of times a transverse
    /// curve leaves a cell through each directed edge.
    pub fn crossing_pairings(&self, exits: &[i64]) -> Vec<BigInt> {
        (0..self.rank())
            .map(|j| {
                let mut acc = BigInt::zero();
                for (idx, &n) in exits.iter().enumerate() {
                    if n == 0 {
                        continue;
                    }
                    let (id, s) = self.edges.class[idx];
                    acc += &self.cycles[j][id] * (s * n);
                }
                acc
            })
            .collect()
    }

    /// Homology class (coordinates in this basis) of a closed transverse
    /// curve given by exit counts per directed edge.
    pub fn class_of_crossings(&self, exits: &[i64]) -> Vec<BigInt> {
        linalg::mat_vec(&self.inv_t, &self.crossing_pairings(exits))
    }

    /// Homology class of a closed edge chain given over edge classes.
    pub fn class_of_chain(&self, chain: &[BigInt]) -> Vec<BigInt> {
        let v: Vec<BigInt> = (0..self.rank())
            .map(|j| {
                // chain · z_j = −(d_j · chain)
                let mut acc = BigInt::zero();
                for (x, &n) in self.duals[j].iter().enumerate() {
                    if n != 0 {
                        let (id, s) = self.edges.class[x];
                        acc += &chain[id] * (s * n);
                    }
                }
                -acc
            })
            .collect();
        linalg::mat_vec(&self.inv_t, &v)
    }

    /// Replace the basis by U·(cycles) for a unimodular U.
    pub fn change_basis(&self, u: &IMat) -> Result<HomologyBasis> {
        if linalg::inverse_unimodular(u).is_none() {
            return Err(Error::InvalidSurface("change of basis is not unimodular".into()));
        }
        let cycles = linalg::mat_mul(u, &self.cycles);
        let j = linalg::mat_mul(&linalg::mat_mul(u, &self.intersection), &linalg::transpose(u));
        let duals = u
            .iter()
            .map(|row| {
                let mut d = vec![0i64; self.edges.num_directed()];
                for (i, c) in row.iter().enumerate() {
                    let n = c.to_i64().expect("small change of basis");
                    if n != 0 {
                        for (x, &m) in self.duals[i].iter().enumerate() {
                            d[x] += n * m;
                        }
                    }
                }
                d
            })
            .collect();
        let inv_t = linalg::inverse_unimodular(&linalg::transpose(&j)).expect("unimodular intersection form");
        Ok(HomologyBasis { edges: self.edges.clone(), cycles, intersection: j, duals, inv_t })
    }
}

/// Boundary of an edge chain as a vector over vertex classes.
pub fn boundary(s: &TranslationSurface, idx: &EdgeIndex, chain: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); s.vertices.len()];
    for (id, &(c, p)) in idx.reps.iter().enumerate() {
        if chain[id].is_zero() {
            continue;
        }
        let n = s.cells[c].len();
        out[s.corner_vertex[c][(p + 1) % n]] += &chain[id];
        out[s.corner_vertex[c][p]] -= &chain[id];
    }
    out
}

fn bfs_tree<F: Fn(usize) -> Vec<(usize, usize)>>(n: usize, nbrs: F) -> (Vec<Option<(usize, usize)>>, Vec<bool>) {
    // parent[v] = (parent vertex, edge used)
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut q = VecDeque::from([0usize]);
    while let Some(v) = q.pop_front() {
        for (w, e) in nbrs(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, e));
                q.push_back(w);
            }
        }
    }
    (parent, seen)
}

pub fn homology_basis(s: &TranslationSurface) -> Result<HomologyBasis> {
    let idx = EdgeIndex::new(s);
    let ne = idx.reps.len();
    let nv = s.vertices.len();
    let nf = s.cells.len();
    let endpoints = |e: usize| {
        let (c, p) = idx.reps[e];
        let n = s.cells[c].len();
        (s.corner_vertex[c][p], s.corner_vertex[c][(p + 1) % n])
    };
    // Primal spanning tree.
    let mut vadj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for e in 0..ne {
        let (a, b) = endpoints(e);
        vadj[a].push((b, e));
        vadj[b].push((a, e));
    }
    let (vpar, vseen) = bfs_tree(nv, |v| vadj[v].clone());
    if vseen.iter().any(|x| !x) {
        return Err(Error::Disconnected);
    }
    let mut in_tree = vec![false; ne];
    for (_, e) in vpar.iter().flatten() {
        in_tree[*e] = true;
    }
    // Dual spanning tree avoiding the primal tree.
    let mut fadj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
    for e in 0..ne {
        if in_tree[e] {
            continue;
        }
        let (c, p) = idx.reps[e];
        let (d, _) = s.partner[c][p];
        fadj[c].push((d, e));
        fadj[d].push((c, e));
    }
    let (fpar, fseen) = bfs_tree(nf, |f| fadj[f].clone());
    if fseen.iter().any(|x| !x) {
        return Err(Error::Disconnected);
    }
    let mut in_cotree = vec![false; ne];
    for (_, e) in fpar.iter().flatten() {
        in_cotree[*e] = true;
    }
    let leftover: Vec<usize> = (0..ne).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
    debug_assert_eq!(leftover.len(), 2 * s.genus);

    // Path in the cotree from face f up to the root, as exit edges.
    let exit_toward_root = |mut f: usize| -> Vec<Edge> {
        let mut out = Vec::new();
        while let Some((pf, e)) = fpar[f] {
            let (c, p) = idx.reps[e];
            let ex = if c == f { (c, p) } else { s.partner[c][p] };
            debug_assert_eq!(ex.0, f);
            debug_assert_eq!(s.partner[ex.0][ex.1].0, pf);
            out.push(ex);
            f = pf;
        }
        out
    };
    let mut duals = Vec::with_capacity(leftover.len());
    for &e in &leftover {
        let (c, p) = idx.reps[e];
        let (d, _) = s.partner[c][p];
        // Exit c through (c,p) into d, then go d → root → c in the cotree.
        let up = exit_toward_root(d);
        let down = exit_toward_root(c);
        // Cancel the common tail.
        let (mut a, mut b) = (up.len(), down.len());
        while a > 0 && b > 0 && up[a - 1] == down[b - 1] {
            a -= 1;
            b -= 1;
        }
        let mut curve = vec![(c, p)];
        curve.extend_from_slice(&up[..a]);
        // Descend from the meeting face to c: reverse of c's upward path.
        for &ex in down[..b].iter().rev() {
            curve.push(s.partner[ex.0][ex.1]);
        }
        duals.push(curve);
    }
    let cycles: Vec<Vec<BigInt>> = duals.iter().map(|d| push_off(s, &idx, d)).collect();
    let counts: Vec<Vec<i64>> = duals
        .iter()
        .map(|d| {
            let mut v = vec![0i64; idx.num_directed()];
            for &e in d {
                v[idx.directed(e)] += 1;
            }
            v
        })
        .collect();
    let mut raw = HomologyBasis {
        inv_t: Vec::new(),
        intersection: Vec::new(),
        edges: idx,
        cycles,
        duals: counts,
    };
    let j: IMat = (0..raw.rank()).map(|a| raw.crossing_pairings(&raw.duals[a])).collect();
    raw.inv_t = linalg::inverse_unimodular(&linalg::transpose(&j))
        .ok_or(Error::InvalidSurface("intersection form not unimodular".into()))?;
    raw.intersection = j;
    let u = symplectic_transform(&raw.intersection);
    raw.change_basis(&u)
}

/// Push a transverse closed curve onto cell boundaries, returning an edge chain.
fn push_off(s: &TranslationSurface, idx: &EdgeIndex, exits: &[Edge]) -> Vec<BigInt> {
    let mut chain = vec![BigInt::zero(); idx.reps.len()];
    let m = exits.len();
    for i in 0..m {
        let (c, out) = exits[i];
        let prev = exits[(i + m - 1) % m];
        let (pc, inn) = s.partner[prev.0][prev.1];
        debug_assert_eq!(pc, c);
        let n = s.cells[c].len();
        let mut q = (inn + 1) % n;
        while q != out {
            let (id, sg) = idx.class[idx.directed((c, q))];
            chain[id] += sg;
            q = (q + 1) % n;
        }
    }
    chain
}

/// Unimodular U with U·J·Uᵀ = [[0, I], [−I, 0]] for a unimodular skew J.
pub fn symplectic_transform(j: &IMat) -> IMat {
    let n = j.len();
    let omega = |x: &[BigInt], y: &[BigInt]| -> BigInt {
        let jy = linalg::mat_vec(j, y);
        x.iter().zip(&jy).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
    };
    let mut pool: Vec<Vec<BigInt>> = linalg::identity(n);
    let mut a_vecs = Vec::new();
    let mut b_vecs = Vec::new();
    while !pool.is_empty() {
        let e = pool[0].clone();
        // Bezout: find f with ω(e, f) = 1.
        let vals: Vec<BigInt> = pool.iter().map(|w| omega(&e, w)).collect();
        let mut f = vec![BigInt::zero(); n];
        let mut g = BigInt::zero();
        for (w, v) in pool.iter().zip(&vals) {
            if v.is_zero() {
                continue;
            }
            let eg = g.extended_gcd(v);
            // new f = x·f + y·w, new g = gcd(g, v)
            let nf: Vec<BigInt> = f.iter().zip(w).map(|(a, b)| &eg.x * a + &eg.y * b).collect();
            f = nf;
            g = eg.gcd;
        }
        if g.is_negative() {
            f = f.into_iter().map(|x| -x).collect();
            g = -g;
        }
        assert!(g.is_one(), "intersection form is not unimodular");
        let mut rest = Vec::new();
        for w in &pool[1..] {
            let wf = omega(w, &f);
            let we = omega(w, &e);
            let p: Vec<BigInt> = (0..n).map(|i| &w[i] - &wf * &e[i] + &we * &f[i]).collect();
            if p.iter().any(|x| !x.is_zero()) {
                rest.push(p);
            }
        }
        let (h, _) = linalg::hnf_rows(&rest);
        pool = h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        a_vecs.push(e);
        b_vecs.push(f);
    }
    a_vecs.extend(b_vecs);
    a_vecs
}

/// Periods ∫ Re ω and ∫ Im ω over each basis cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    pub re: Vec<FieldElement>,
    pub im: Vec<FieldElement>,
}

pub fn period_matrix(s: &TranslationSurface, b: &HomologyBasis) -> PeriodMatrix {
    let mut re = Vec::with_capacity(b.rank());
    let mut im = Vec::with_capacity(b.rank());
    for z in &b.cycles {
        let mut x = FieldElement::zero(&s.field);
        let mut y = FieldElement::zero(&s.field);
        for (id, c) in z.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = s.edge(b.edges.reps[id]);
            let q = num_rational::BigRational::from_integer(c.clone());
            x = &x + &v.x.scale(&q);
            y = &y + &v.y.scale(&q);
        }
        re.push(x);
        im.push(y);
    }
    PeriodMatrix { re, im }
}

/// Evaluate a cohomology class (values on the basis cycles) on an integer
/// combination of basis cycles.
pub fn pairing(coclass: &[FieldElement], cycle: &[BigInt]) -> Result<FieldElement> {
    if coclass.len() != cycle.len() {
        return Err(Error::DimensionMismatch { expected: coclass.len(), got: cycle.len() });
    }
    let f = coclass.first().map(|x| x.field().clone()).ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
    Ok(coclass.iter().zip(cycle).fold(FieldElement::zero(&f), |acc, (x, n)| {
        &acc + &x.scale(&num_rational::BigRational::from_integer(n.clone()))
    }))
}

/// Cup product ∫ α ∧ β for classes given by their values on the basis.
pub fn cup(b: &HomologyBasis, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    let f = x[0].field().clone();
    let mut acc = FieldElement::zero(&f);
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let c = &b.inv_t[i][j];
            if !c.is_zero() {
                acc = &acc + &(xi * yj).scale(&num_rational::BigRational::from_integer(c.clone()));
            }
        }
    }
    acc
}
