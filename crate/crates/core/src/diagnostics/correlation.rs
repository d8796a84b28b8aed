//! Cesàro averages of flow correlations, estimated by randomized
//! quasi-Monte Carlo sampling of initial points.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowSurface, Start, Vec2, WalkEnd};
use crate::surface::TranslationSurface;

/// Observable catalog. Coordinates are local to a cell of the unframed
/// surface, measured from its first vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Constant { value: f64 },
    /// exp(2πi(m·x + n·y)).
    Character { m: i64, n: i64 },
    /// (1 − r²/ρ²)² on the disk of radius ρ, zero elsewhere.
    Bump { cell: usize, center: (f64, f64), radius: f64 },
}

impl Observable {
    fn eval(&self, cell: usize, x: f64, y: f64) -> Complex64 {
        match self {
            Observable::Constant { value } => Complex64::new(*value, 0.0),
            Observable::Character { m, n } => {
                let th = 2.0 * std::f64::consts::PI * (*m as f64 * x + *n as f64 * y);
                Complex64::new(th.cos(), th.sin())
            }
            Observable::Bump { cell: c, center, radius } => {
                if *c != cell {
                    return Complex64::new(0.0, 0.0);
                }
                let r2 = ((x - center.0).powi(2) + (y - center.1).powi(2)) / (radius * radius);
                Complex64::new(if r2 < 1.0 { (1.0 - r2).powi(2) } else { 0.0 }, 0.0)
            }
        }
    }

    fn sup(&self) -> f64 {
        match self {
            Observable::Constant { value } => value.abs(),
            _ => 1.0,
        }
    }

    /// Bump centered at the incenter of a cell with radius `shrink` times the
    /// inradius. Triangular cells only.
    pub fn incenter_bump(s: &TranslationSurface, cell: usize, shrink: f64) -> Result<Observable> {
        let vs: Vec<(f64, f64)> = s.cell_vertices(cell).iter().map(|v| v.to_f64()).collect();
        if vs.len() != 3 {
            return Err(Error::InvalidSurface("incenter bump needs a triangular cell".into()));
        }
        let side = |i: usize, j: usize| ((vs[i].0 - vs[j].0).powi(2) + (vs[i].1 - vs[j].1).powi(2)).sqrt();
        let (a, b, c) = (side(1, 2), side(0, 2), side(0, 1));
        let p = a + b + c;
        let center = ((a * vs[0].0 + b * vs[1].0 + c * vs[2].0) / p, (a * vs[0].1 + b * vs[1].1 + c * vs[2].1) / p);
        let area2 = ((vs[1].0 - vs[0].0) * (vs[2].1 - vs[0].1) - (vs[2].0 - vs[0].0) * (vs[1].1 - vs[0].1)).abs();
        Ok(Observable::Bump { cell, center, radius: shrink * area2 / p })
    }
}

#[derive(Clone, Debug)]
pub struct CorrelationOptions {
    pub t_values: Vec<f64>,
    pub n_samples: usize,
    pub replicates: usize,
    /// Time steps between consecutive entries of `t_values` (and from 0).
    pub steps_per_segment: usize,
    pub seed: u64,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions { t_values: vec![10.0, 100.0, 1000.0], n_samples: 2000, replicates: 10, steps_per_segment: 500, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationCurve {
    pub t_values: Vec<f64>,
    pub cesaro_values: Vec<f64>,
    /// Jackknife standard errors over replicates.
    pub errors: Vec<f64>,
    pub f: Observable,
    pub g: Observable,
    pub direction: (f64, f64),
    pub n_samples: usize,
    pub seed: u64,
    pub nonergodic_suspected: bool,
    /// Largest deviation of an orbit average of f from its space average.
    pub birkhoff_deviation: f64,
    pub lost_orbits: usize,
}

struct Geometry {
    inv: [f64; 4],
    frame: [f64; 4],
    area: f64,
    /// Frame-coordinate fan triangles (cell, a, b, c) with cumulative areas.
    tris: Vec<(usize, [(f64, f64); 3])>,
    cum: Vec<f64>,
}

impl Geometry {
    fn new(fs: &FlowSurface<f64>, s: &TranslationSurface) -> Geometry {
        let a = fs.frame;
        let det = a[0] * a[3] - a[1] * a[2];
        let inv = [a[3] / det, -a[1] / det, -a[2] / det, a[0] / det];
        let mut tris = Vec::new();
        let mut cum = Vec::new();
        let mut tot = 0.0;
        for (c, vs) in fs.verts.iter().enumerate() {
            for i in 1..vs.len() - 1 {
                let t = [(vs[0].x, vs[0].y), (vs[i].x, vs[i].y), (vs[i + 1].x, vs[i + 1].y)];
                tot += ((t[1].0 - t[0].0) * (t[2].1 - t[0].1) - (t[2].0 - t[0].0) * (t[1].1 - t[0].1)).abs() / 2.0;
                tris.push((c, t));
                cum.push(tot);
            }
        }
        Geometry { inv, frame: a, area: s.area.to_f64(), tris, cum }
    }

    fn original(&self, p: &Vec2<f64>) -> (f64, f64) {
        (self.inv[0] * p.x + self.inv[1] * p.y, self.inv[2] * p.x + self.inv[3] * p.y)
    }

    fn framed(&self, x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(self.frame[0] * x + self.frame[1] * y, self.frame[2] * x + self.frame[3] * y)
    }

    fn uniform(&self, u: [f32; 3]) -> (usize, Vec2<f64>) {
        let total = *self.cum.last().expect("nonempty surface");
        let target = u[0] as f64 * total;
        let k = self.cum.partition_point(|&c| c < target).min(self.tris.len() - 1);
        let (c, t) = self.tris[k];
        let (mut a, mut b) = (u[1] as f64, u[2] as f64);
        if a + b > 1.0 {
            (a, b) = (1.0 - a, 1.0 - b);
        }
        let x = t[0].0 + a * (t[1].0 - t[0].0) + b * (t[2].0 - t[0].0);
        let y = t[0].1 + a * (t[1].1 - t[0].1) + b * (t[2].1 - t[0].1);
        (c, Vec2::new(x, y))
    }
}

fn mean_of(o: &Observable, geo: &Geometry, seed: u32) -> Complex64 {
    match o {
        Observable::Constant { value } => Complex64::new(*value, 0.0),
        Observable::Bump { radius, .. } => Complex64::new(std::f64::consts::PI * radius * radius / 3.0 / geo.area, 0.0),
        Observable::Character { .. } => {
            let n = 1 << 15;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let u = sobol_burley::sample_4d(i, 0, seed);
                let (c, p) = geo.uniform([u[0], u[1], u[2]]);
                let (x, y) = geo.original(&p);
                acc += o.eval(c, x, y);
            }
            acc / n as f64
        }
    }
}

fn check_bump(o: &Observable, s: &TranslationSurface) -> Result<()> {
    if let Observable::Bump { cell, center, radius } = o {
        if *cell >= s.cells.len() || *radius <= 0.0 {
            return Err(Error::InvalidSurface("bump cell out of range or radius not positive".into()));
        }
        let vs: Vec<(f64, f64)> = s.cell_vertices(*cell).iter().map(|v| v.to_f64()).collect();
        for (i, e) in s.cells[*cell].iter().enumerate() {
            let (ex, ey) = e.to_f64();
            let w = (center.0 - vs[i].0, center.1 - vs[i].1);
            let dist = (ex * w.1 - ey * w.0) / (ex * ex + ey * ey).sqrt();
            if dist < *radius {
                return Err(Error::InvalidSurface(format!("bump leaves cell {cell}")));
            }
        }
    }
    Ok(())
}

fn time_grid(t_values: &[f64], steps: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut grid = vec![0.0];
    let mut marks = Vec::new();
    let mut prev = 0.0;
    for &t in t_values {
        if t <= prev {
            return Err(Error::Parse("T values must be positive and increasing".into()));
        }
        for k in 1..=steps {
            grid.push(prev + (t - prev) * k as f64 / steps as f64);
        }
        marks.push(grid.len() - 1);
        prev = t;
    }
    Ok((grid, marks))
}

fn cesaro(c: &[Complex64], grid: &[f64], marks: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(marks.len());
    let mut integral = 0.0;
    let mut k = 0;
    for &m in marks {
        while k < m {
            integral += 0.5 * (c[k].norm() + c[k + 1].norm()) * (grid[k + 1] - grid[k]);
            k += 1;
        }
        out.push(integral / grid[m]);
    }
    out
}

/// (1/T)∫₀^T |μ(f∘φ_t · ḡ) − μ(f)·μ(ḡ)| dt at each T, with μ the normalized
/// area. When g is a bump the initial points are drawn from its disk.
pub fn correlation_cesaro(
    s: &TranslationSurface,
    direction: (f64, f64),
    f: &Observable,
    g: &Observable,
    opts: &CorrelationOptions,
) -> Result<CorrelationCurve> {
    check_bump(f, s)?;
    check_bump(g, s)?;
    if opts.replicates < 2 || opts.n_samples < opts.replicates {
        return Err(Error::Parse("need at least two replicates and one sample per replicate".into()));
    }
    let fs = FlowSurface::float(s, direction.0, direction.1, &[]);
    let geo = Geometry::new(&fs, s);
    let (grid, marks) = time_grid(&opts.t_values, opts.steps_per_segment)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<u32> = (0..opts.replicates).map(|_| rng.gen()).collect();
    let mean_seed: u32 = rng.gen();
    let mu = mean_of(f, &geo, mean_seed) * mean_of(g, &geo, mean_seed.wrapping_add(1)).conj();
    let weight = match g {
        Observable::Bump { radius, .. } => std::f64::consts::PI * radius * radius / geo.area,
        _ => 1.0,
    };
    let per = opts.n_samples / opts.replicates;
    let up = Vec2::new(0.0, 1.0);
    let mut reps: Vec<Vec<Complex64>> = Vec::with_capacity(opts.replicates);
    let mut lost = 0;
    let mut birkhoff = Vec::new();
    let mu_f = mean_of(f, &geo, mean_seed);
    for (r, &seed) in seeds.iter().enumerate() {
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
        for i in 0..per {
            let u = sobol_burley::sample_4d(i as u32, 0, seed);
            let (mut cell, mut p) = match g {
                Observable::Bump { cell, center, radius } => {
                    let rad = radius * (u[0] as f64).sqrt();
                    let th = 2.0 * std::f64::consts::PI * u[1] as f64;
                    (*cell, geo.framed(center.0 + rad * th.cos(), center.1 + rad * th.sin()))
                }
                _ => geo.uniform([u[0], u[1], u[2]]),
            };
            let (x0, y0) = geo.original(&p);
            let g0 = g.eval(cell, x0, y0).conj();
            let mut fsum = 0.0;
            let mut fvals = Vec::with_capacity(grid.len());
            fvals.push(f.eval(cell, x0, y0));
            let mut alive = true;
            for k in 1..grid.len() {
                if alive {
                    let w = fs.walk(Start::Point(cell, p.clone()), &up, &(grid[k] - grid[k - 1]), &[], 1_000_000)?;
                    if w.end != WalkEnd::TimeUp {
                        alive = false;
                        lost += 1;
                    } else {
                        cell = w.cell;
                        p = w.point;
                    }
                }
                let (x, y) = geo.original(&p);
                fvals.push(if alive { f.eval(cell, x, y) } else { Complex64::new(0.0, 0.0) });
            }
            for (a, v) in acc.iter_mut().zip(&fvals) {
                *a += v * g0;
            }
            if r == 0 && i < 8 {
                for k in 0..grid.len() - 1 {
                    fsum += 0.5 * (fvals[k].re + fvals[k + 1].re) * (grid[k + 1] - grid[k]);
                }
                birkhoff.push(fsum / grid[grid.len() - 1]);
            }
        }
        reps.push(acc.iter().map(|a| a * (weight / per as f64) - mu).collect());
    }
    let b = reps.len() as f64;
    let pooled: Vec<Complex64> = (0..grid.len()).map(|k| reps.iter().map(|r| r[k]).sum::<Complex64>() / b).collect();
    let values = cesaro(&pooled, &grid, &marks);
    let loo: Vec<Vec<f64>> = reps
        .iter()
        .map(|r| {
            let c: Vec<Complex64> = (0..grid.len()).map(|k| (pooled[k] * b - r[k]) / (b - 1.0)).collect();
            cesaro(&c, &grid, &marks)
        })
        .collect();
    let errors = (0..marks.len())
        .map(|m| {
            let mean = loo.iter().map(|v| v[m]).sum::<f64>() / b;
            ((b - 1.0) / b * loo.iter().map(|v| (v[m] - mean).powi(2)).sum::<f64>()).sqrt()
        })
        .collect();
    let dev = birkhoff.iter().map(|a| (a - mu_f.re).abs()).fold(0.0, f64::max);
    let tol = (0.5 * mu_f.norm()).max(0.05 * f.sup());
    Ok(CorrelationCurve {
        t_values: opts.t_values.clone(),
        cesaro_values: values,
        errors,
        f: f.clone(),
        g: g.clone(),
        direction,
        n_samples: per * opts.replicates,
        seed: opts.seed,
        nonergodic_suspected: dev > tol,
        birkhoff_deviation: dev,
        lost_orbits: lost,
    })
}

/// Unit directions at Sobol points of an angle window.
pub fn sobol_directions(n: usize, window: (f64, f64), seed: u32) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let u = sobol_burley::sample(i as u32, 0, seed) as f64;
            let th = window.0 + (window.1 - window.0) * u;
            (th.cos(), th.sin())
        })
        .collect()
}
