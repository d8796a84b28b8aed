//! Unfolding of rational polygons and the deck rotation of the unfolding.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::geom::PlanarVector;
use crate::polygon::RationalPolygon;
use crate::surface::{Edge, TranslationSurface, UnfoldData};

/// Element (r, m) of the dihedral group D_k: x ↦ rot(2πm/k)·(r ? conj(x) : x).
pub type Dihedral = (bool, i64);

pub fn compose(k: i64, (r1, m1): Dihedral, (r2, m2): Dihedral) -> Dihedral {
    (r1 ^ r2, (m1 + if r1 { -m2 } else { m2 }).rem_euclid(k))
}

/// Image of a direction (multiple of π/k) under a group element.
pub fn act(k: i64, (r, m): Dihedral, d: i64) -> i64 {
    ((if r { -d } else { d }) + 2 * m).rem_euclid(2 * k)
}

fn cell_of(p: &RationalPolygon, g: Dihedral) -> Vec<PlanarVector> {
    let n = p.n();
    let k = p.k;
    (0..n)
        .map(|pos| {
            if g.0 {
                let s = n - 1 - pos;
                let d = act(k, g, p.dirs[s]) + k;
                p.units[d.rem_euclid(2 * k) as usize].scale(&p.lengths[s])
            } else {
                p.units[act(k, g, p.dirs[pos]) as usize].scale(&p.lengths[pos])
            }
        })
        .collect()
}

fn side_position(n: usize, g: Dihedral, side: usize) -> usize {
    if g.0 {
        n - 1 - side
    } else {
        side
    }
}

/// Translation surface assembled from the copies of P under the dihedral
/// group generated by its side reflections (the connected component of the
/// identity copy).
pub fn unfold(p: &RationalPolygon) -> Result<TranslationSurface> {
    let k = p.k;
    let n = p.n();
    let rho: Vec<Dihedral> = p.dirs.iter().map(|&d| (true, d.rem_euclid(k))).collect();
    let mut index: HashMap<Dihedral, usize> = HashMap::new();
    let mut group: Vec<Dihedral> = Vec::new();
    let mut q = VecDeque::new();
    index.insert((false, 0), 0);
    group.push((false, 0));
    q.push_back((false, 0));
    while let Some(g) = q.pop_front() {
        for r in &rho {
            let h = compose(k, g, *r);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(h) {
                e.insert(group.len());
                group.push(h);
                q.push_back(h);
            }
        }
    }
    let cells: Vec<Vec<PlanarVector>> = group.iter().map(|&g| cell_of(p, g)).collect();
    let mut partner: Vec<Vec<Edge>> = cells.iter().map(|c| vec![(0, 0); c.len()]).collect();
    for (ci, &g) in group.iter().enumerate() {
        for (side, r) in rho.iter().enumerate() {
            let h = compose(k, g, *r);
            let cj = index[&h];
            partner[ci][side_position(n, g, side)] = (cj, side_position(n, h, side));
        }
    }
    let data = UnfoldData { k, group, polygon_dirs: p.dirs.clone(), polygon_lengths: p.lengths.clone() };
    TranslationSurface::assemble(p.field.clone(), cells, partner, Some(data))
}

/// Cell permutation realizing ω ↦ e^{2πi/k}·ω on an unfolding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeckRotation {
    pub cell_permutation: Vec<usize>,
    pub rotation_order: i64,
}

impl DeckRotation {
    /// Image of a directed edge; positions are preserved.
    pub fn edge_image(&self, (c, p): Edge) -> Edge {
        (self.cell_permutation[c], p)
    }

    /// Order of the cell permutation.
    pub fn order(&self) -> usize {
        let n = self.cell_permutation.len();
        let mut cur: Vec<usize> = (0..n).collect();
        for t in 1..=2 * n {
            cur = cur.iter().map(|&c| self.cell_permutation[c]).collect();
            if cur.iter().enumerate().all(|(i, &c)| i == c) {
                return t;
            }
        }
        unreachable!("permutation has finite order")
    }
}

pub fn deck_rotation(s: &TranslationSurface, p: &RationalPolygon) -> Result<DeckRotation> {
    let u = s.unfold.as_ref().ok_or(Error::NotAnUnfolding)?;
    if u.k != p.k || u.polygon_dirs != p.dirs || u.polygon_lengths.len() != p.lengths.len() {
        return Err(Error::NotAnUnfolding);
    }
    if u.polygon_lengths.iter().zip(&p.lengths).any(|(a, b)| a != b) {
        return Err(Error::NotAnUnfolding);
    }
    let k = u.k;
    let index: HashMap<Dihedral, usize> = u.group.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut perm = Vec::with_capacity(u.group.len());
    for &g in &u.group {
        let h = compose(k, (false, 1), g);
        perm.push(*index.get(&h).ok_or(Error::NotAnUnfolding)?);
    }
    Ok(DeckRotation { cell_permutation: perm, rotation_order: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldElement, NumberField};
    use crate::polygon::{triangle, validate_polygon, RationalAngle};

    fn a(n: i64, d: i64) -> RationalAngle {
        RationalAngle::new(n, d).unwrap()
    }

    /// Independent Euler-characteristic oracle: count vertex classes by
    /// union-find over glued edge endpoints.
    fn euler_genus(s: &TranslationSurface) -> usize {
        let ids: Vec<Vec<usize>> = {
            let mut c = 0;
            s.cells.iter().map(|cell| (0..cell.len()).map(|_| { c += 1; c - 1 }).collect()).collect()
        };
        let total = ids.iter().map(|r| r.len()).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (c, row) in s.partner.iter().enumerate() {
            let n = row.len();
            for (pos, &(d, q)) in row.iter().enumerate() {
                let m = s.cells[d].len();
                // start of (c,pos) = end of (d,q); end of (c,pos) = start of (d,q)
                let pairs = [(ids[c][pos], ids[d][(q + 1) % m]), (ids[c][(pos + 1) % n], ids[d][q])];
                for (x, y) in pairs {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    parent[rx] = ry;
                }
            }
        }
        let v = (0..total).filter(|&x| find(&mut parent, x) == x).count() as i64;
        let chi = v - s.num_edges() as i64 + s.cells.len() as i64;
        ((2 - chi) / 2) as usize
    }

    #[test]
    fn square_unfolding() {
        let q = NumberField::rationals();
        let sq = validate_polygon(&[a(1, 2); 4], &vec![FieldElement::one(&q); 4], &q).unwrap();
        let s = unfold(&sq).unwrap();
        assert_eq!(s.cells.len(), 4);
        assert_eq!(s.genus, 1);
        assert_eq!(euler_genus(&s), 1);
        assert!(s.cone_points().is_empty());
        assert_eq!(s.area, FieldElement::from_int(&s.field, 4));
        let t = deck_rotation(&s, &sq).unwrap();
        assert_eq!(t.order(), 2);
    }

    #[test]
    fn double_pentagon_triangle() {
        let t = triangle([a(1, 5), a(1, 5), a(3, 5)]).unwrap();
        let s = unfold(&t).unwrap();
        assert_eq!(s.cells.len(), 10);
        assert_eq!(s.genus, 2);
        assert_eq!(euler_genus(&s), 2);
        assert_eq!(s.stratum_signature(), vec![2]);
        assert_eq!(s.area, t.area().scale(&num_rational::BigRational::from_integer(10.into())));
        let d = deck_rotation(&s, &t).unwrap();
        assert_eq!(d.order(), 5);
        // Holonomy is rotated by 2π/5.
        let rot = &t.units[2];
        for c in 0..s.cells.len() {
            for (pos, e) in s.cells[c].iter().enumerate() {
                let img = s.edge(d.edge_image((c, pos)));
                let want = PlanarVector::new(&(&rot.x * &e.x) - &(&rot.y * &e.y), &(&rot.y * &e.x) + &(&rot.x * &e.y));
                assert_eq!(*img, want);
            }
        }
    }

    #[test]
    fn right_isoceles_and_hexagonal() {
        let s = unfold(&triangle([a(1, 2), a(1, 4), a(1, 4)]).unwrap()).unwrap();
        assert_eq!((s.cells.len(), s.genus), (8, 1));
        assert!(s.cone_points().is_empty());
        let s = unfold(&triangle([a(2, 3), a(1, 6), a(1, 6)]).unwrap()).unwrap();
        let total: u64 = s.stratum_signature().iter().sum();
        assert_eq!(total as usize, 2 * s.genus - 2);
        assert_eq!(euler_genus(&s), s.genus);
    }

    #[test]
    fn deck_requires_provenance() {
        let t = triangle([a(1, 5), a(1, 5), a(3, 5)]).unwrap();
        let sq = crate::surface::square_torus();
        assert_eq!(deck_rotation(&sq, &t).unwrap_err(), Error::NotAnUnfolding);
    }
}
