//! Acceptance suite: one line per criterion, tolerances pinned below.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wmflat_core::classify::{circle_factor, taut_rational_subspace};
use wmflat_core::corpus::{angles_label, built_in_corpus, corpus_table, random_polygon, triangle_enumeration, CorpusInput};
use wmflat_core::diagnostics::{
    correlation_cesaro, replay_exclusions, rigidity_exclusion_scan, sobol_directions, veech_tracker, CorrelationOptions,
    ExclusionReport, Observable,
};
use wmflat_core::flow::{first_return_iet, FlowSurface, RigidityOptions, Start};
use wmflat_core::homology::{cup, pairing};
use wmflat_core::linalg::{det, transpose, IMat};
use wmflat_core::polygon::triangle;
use wmflat_core::surface::square_torus;
use wmflat_core::{
    classify_polygon_with, classify_surface, homology_basis, io, period_matrix, ClassifyOptions, FieldElement, NumberField,
    PlanarVector, RationalAngle, Reason, TranslationSurface,
};

const TRACKER_TOL: f64 = 1e-9;
const PAIRING_REL_TOL: f64 = 1e-9;
const TORUS_CESARO_FLOOR: f64 = 0.4;
const BUMP_DECAY_RATIO: f64 = 0.1;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn fib(n: u32) -> i64 {
    let (mut a, mut b) = (0i64, 1i64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn exact() -> ClassifyOptions {
    ClassifyOptions { exact_cross_check: true }
}

fn sorted_label(t: &[RationalAngle; 3]) -> String {
    let mut v = t.to_vec();
    v.sort_by(|a, b| (a.num * b.den).cmp(&(b.num * a.den)));
    angles_label(&v)
}

fn c1_triangles() -> Outcome {
    let special = ["1/4,1/4,1/2", "1/3,1/3,1/3", "1/6,1/3,1/2", "1/6,1/6,2/3"];
    let tris = triangle_enumeration(200);
    let mut non_wm = 0;
    for t in &tris {
        let v = classify_polygon_with(&triangle(*t).map_err(err)?, exact()).map_err(err)?;
        let label = sorted_label(t);
        let expect_wm = !special.contains(&label.as_str());
        ensure(v.weakly_mixing == expect_wm, || format!("{} classified weakly_mixing={}", angles_label(t), v.weakly_mixing))?;
        let want = if expect_wm { 0 } else { 2 };
        ensure(v.cross_checks.exact_kernel_dim == Some(want), || {
            format!("{} exact kernel {:?}", angles_label(t), v.cross_checks.exact_kernel_dim)
        })?;
        if label == "1/6,1/6,2/3" {
            ensure(v.reason == Reason::AlmostIntegrable, || format!("{} reason {:?}", angles_label(t), v.reason))?;
        } else if !expect_wm {
            ensure(v.reason == Reason::Integrable, || format!("{} reason {:?}", angles_label(t), v.reason))?;
        }
        non_wm += usize::from(!v.weakly_mixing);
    }
    // 1 + 3 + 6 + 3 vertex orders of the four special triangles.
    ensure(non_wm == 13, || format!("{non_wm} non-WM triangles"))?;
    Ok(format!("{} triangles, {non_wm} labeled non-WM", tris.len()))
}

fn c2_k_dispatch() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ks = [5, 7, 8, 9, 12];
    for i in 0..50 {
        let k = ks[i % ks.len()];
        let p = random_polygon(&mut rng, k);
        let v = classify_polygon_with(&p, exact()).map_err(err)?;
        ensure(v.cross_checks.exact_kernel_dim == Some(0), || {
            format!("polygon {i} (k={k}, angles {}) has kernel {:?}", angles_label(&p.angles), v.cross_checks.exact_kernel_dim)
        })?;
        ensure(v.weakly_mixing && v.cross_checks.agree == Some(true), || format!("polygon {i} disagrees"))?;
    }
    Ok("50 polygons, exact kernel 0".into())
}

fn c3_k2() -> Outcome {
    let items = built_in_corpus().map_err(err)?;
    let get = |n: &str| items.iter().find(|it| it.name == n).unwrap();
    let rational = get("L-shape 1,1,1,1");
    let v = rational.classify(exact()).map_err(err)?;
    ensure(!v.weakly_mixing && v.reason == Reason::CommensurableK2, || format!("rational L: {:?}", v.reason))?;
    let w = v.witness.as_ref().ok_or("rational L has no witness")?;
    let s = rational.surface().map_err(err)?;
    let b = homology_basis(&s).map_err(err)?;
    let pm = period_matrix(&s, &b);
    let cf = circle_factor(&s, &pm, &w.circle.a, &w.circle.b).map_err(err)?;
    ensure(cf.periods == w.circle.periods, || "circle factor periods differ".into())?;
    // The witness class is a·Re ω + b·Im ω exactly.
    for (j, n) in w.integer_class.iter().enumerate() {
        let val = &(&w.circle.a * &pm.re[j]) + &(&w.circle.b * &pm.im[j]);
        ensure(val.as_rational() == Some(BigRational::from_integer(n.clone())), || format!("witness entry {j}"))?;
    }
    let golden = get("L-shape 1,phi,1,phi");
    let g = golden.classify(exact()).map_err(err)?;
    ensure(g.weakly_mixing && g.kernel_dim == 0, || format!("golden L: {:?} dim {}", g.reason, g.kernel_dim))?;
    let (rank, rows) = g.certificate.ok_or("golden L has no certificate")?;
    let gs = golden.surface().map_err(err)?;
    let nb = homology_basis(&gs).map_err(err)?.rank();
    ensure(rank == nb, || format!("certificate rank {rank} < {nb}"))?;
    Ok(format!("rational L witness verified; golden L rank {rank}/{rows}"))
}

fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> IMat {
    let mut m: IMat = (0..n).map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect()).collect();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        for col in 0..n {
            let v = &m[j][col] * &c;
            m[i][col] += v;
        }
    }
    m
}

fn kernel_dim(s: &TranslationSurface) -> Result<usize, String> {
    Ok(classify_surface(s).map_err(err)?.kernel_dim)
}

fn c4_structural() -> Outcome {
    let items = built_in_corpus().map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let golden = NumberField::golden();
    for it in &items {
        let s = it.surface().map_err(err)?;
        let name = &it.name;
        // Euler characteristic and Gauss–Bonnet in units of 2π.
        let chi = s.vertices.len() as i64 - s.num_edges() as i64 + s.cells.len() as i64;
        let g = (2 - chi) / 2;
        ensure(g == s.genus as i64, || format!("{name}: genus"))?;
        let excess: i64 = s.vertices.iter().map(|v| v.angle_multiple as i64 - 1).sum();
        ensure(excess == 2 * g - 2, || format!("{name}: Gauss–Bonnet {excess} vs {}", 2 * g - 2))?;
        let b = homology_basis(&s).map_err(err)?;
        let j = &b.intersection;
        let skew = transpose(j).iter().zip(j).all(|(r, q)| r.iter().zip(q).all(|(x, y)| x == &-y));
        ensure(skew && det(j).abs().is_one(), || format!("{name}: intersection form"))?;
        let pm = period_matrix(&s, &b);
        ensure(cup(&b, &pm.re, &pm.im) == s.area, || format!("{name}: Re ∪ Im ≠ area"))?;
        let dim = taut_rational_subspace(&pm).dim();
        if let CorpusInput::Polygon(p) = &it.input {
            let want = p.area().scale(&BigRational::from_integer((2 * p.k).into()));
            ensure(s.area == want, || format!("{name}: unfolding area"))?;
            let scaled = p.scaled(&FieldElement::from_ratio(&p.field, 3, 7)).map_err(err)?;
            let v = classify_polygon_with(&scaled, exact()).map_err(err)?;
            ensure(v.cross_checks.exact_kernel_dim == Some(dim), || format!("{name}: scaling by 3/7"))?;
        } else {
            let z = s.scaled(&FieldElement::from_ratio(&s.field, 3, 7)).map_err(err)?;
            ensure(kernel_dim(&z)? == dim, || format!("{name}: scaling by 3/7"))?;
        }
        let (big, e) = s.extend_field(&golden).map_err(err)?;
        let phi = e.apply(&FieldElement::theta(&golden));
        ensure(kernel_dim(&big.scaled(&phi).map_err(err)?)? == dim, || format!("{name}: scaling by φ"))?;
        for _ in 0..5 {
            let u = unimodular(&mut rng, b.rank());
            let b2 = b.change_basis(&u).map_err(err)?;
            let j2 = &b2.intersection;
            ensure(det(j2).abs().is_one(), || format!("{name}: changed form not unimodular"))?;
            let pm2 = period_matrix(&s, &b2);
            ensure(taut_rational_subspace(&pm2).dim() == dim, || format!("{name}: basis change"))?;
            ensure(cup(&b2, &pm2.re, &pm2.im) == s.area, || format!("{name}: area after basis change"))?;
        }
    }
    Ok(format!("{} surfaces", items.len()))
}

fn c5_rigidity() -> Outcome {
    let torus = square_torus();
    let opts = RigidityOptions::default();
    let fs = FlowSurface::float(&torus, 1.0, phi(), &[0]);
    let b = homology_basis(&torus).map_err(err)?;
    let pm = period_matrix(&torus, &b);
    let a = fs.frame;
    let mut cfgs = Vec::new();
    for n in 8..=16 {
        let l = fib(n) as f64;
        let cfg = fs.rigidity_configuration(&l, Some(&b), &opts).map_err(err)?;
        let chk = fs.check_rigidity(&cfg, &opts).map_err(err)?;
        ensure(chk.passed(), || format!("L = F_{n}: {chk:?}"))?;
        let re = pairing(&pm.re, &cfg.curve_class).map_err(err)?.to_f64();
        let im = pairing(&pm.im, &cfg.curve_class).map_err(err)?.to_f64();
        let (re2, im2) = (a[0] * re + a[1] * im, a[2] * re + a[3] * im);
        let scale = cfg.v.abs().max(1.0);
        ensure((im2 - cfg.v).abs() <= PAIRING_REL_TOL * scale, || format!("F_{n}: ⟨Im ω, γ⟩ = {im2} vs V = {}", cfg.v))?;
        ensure((re2.abs() - cfg.h).abs() <= PAIRING_REL_TOL * scale, || format!("F_{n}: ⟨Re ω, γ⟩ = {re2} vs H = {}", cfg.h))?;
        cfgs.push((n, cfg));
    }
    let c = cfgs.iter().map(|(_, c)| c.constant).fold(0.0, f64::max);
    for (n, cfg) in &cfgs {
        let r = cfg.v / cfg.l;
        ensure(r >= 1.0 / c && r <= c && cfg.h <= c / cfg.l, || format!("F_{n}: V/L = {r}, H = {}", cfg.h))?;
    }
    let f = NumberField::golden();
    let d = PlanarVector::new(FieldElement::one(&f), FieldElement::theta(&f));
    let (efs, framed) = FlowSurface::exact(&torus, &d, &[0]).map_err(err)?;
    let eb = homology_basis(&framed).map_err(err)?;
    let epm = period_matrix(&framed, &eb);
    let l = FieldElement::from_int(&framed.field, fib(8));
    let cfg = efs.rigidity_configuration(&l, Some(&eb), &opts).map_err(err)?;
    ensure(efs.check_rigidity(&cfg, &opts).map_err(err)?.passed(), || "exact F_8 check".into())?;
    ensure(pairing(&epm.im, &cfg.curve_class).map_err(err)? == cfg.v, || "exact ⟨Im ω, γ⟩ ≠ V".into())?;
    ensure(pairing(&epm.re, &cfg.curve_class).map_err(err)?.abs() == cfg.h, || "exact |⟨Re ω, γ⟩| ≠ H".into())?;
    Ok(format!("L = F_8..F_16, C = {c:.4}; exact at F_8"))
}

fn cf_oracle(n: usize) -> Vec<f64> {
    let g = phi() - 1.0;
    let (mut q0, mut q1) = (1i64, 1i64);
    let mut out = vec![g.min(1.0 - g)];
    let dist = |q: i64| {
        let x = q as f64 * g;
        (x - x.round()).abs()
    };
    out.push(dist(q1));
    while out.len() < n {
        (q0, q1) = (q1, q0 + q1);
        out.push(dist(q1));
    }
    out
}

fn c6_tracker() -> Outcome {
    let f = NumberField::golden();
    let d = PlanarVector::new(FieldElement::one(&f), FieldElement::theta(&f));
    let (fs, framed) = FlowSurface::exact(&square_torus(), &d, &[0]).map_err(err)?;
    let tr = fs.transversal(Start::Corner(0, 0), &FieldElement::one(&framed.field)).map_err(err)?;
    let iet = first_return_iet(&fs, &tr, None, 10_000).map_err(err)?;
    let oracle = cf_oracle(60);
    let one = veech_tracker(&iet, (1.0, phi()), 1.0, 20).map_err(err)?;
    let mut worst = 0.0f64;
    for s in &one.steps {
        worst = worst.max((s.distance - oracle[s.step]).abs());
    }
    ensure(worst <= TRACKER_TOL, || format!("α = 1 deviates by {worst:e}"))?;
    let r2 = veech_tracker(&iet, (1.0, phi()), 2f64.sqrt(), 50).map_err(err)?;
    let dists: Vec<f64> = r2.steps.iter().map(|s| s.distance).collect();
    let weakest = dists.windows(10).map(|w| w.iter().cloned().fold(0.0, f64::max)).fold(f64::INFINITY, f64::min);
    ensure(weakest > 0.1, || format!("α = √2 window maximum only {weakest}"))?;
    Ok(format!("α = 1 max error {worst:.1e}; α = √2 min window max {weakest:.3}"))
}

/// Exact check of one excluded interval against its configuration: αV
/// stays in [n + ε, n + 1 − ε] for some integer n.
fn violates(lo: &BigRational, hi: &BigRational, v: &BigRational, eps: &BigRational) -> bool {
    let (a, b) = (lo * v, hi * v);
    let n = a.floor();
    a >= &n + eps && b <= n + BigRational::one() - eps
}

fn replay_scan(r: &ExclusionReport) -> Result<usize, String> {
    let eps = BigRational::from_float(r.epsilon).ok_or("ε")?;
    for (i, ex) in r.intervals.iter().enumerate() {
        let v = BigRational::from_float(r.configs_used[ex.config].v).ok_or("V")?;
        ensure(ex.lo < ex.hi, || format!("empty interval {i}"))?;
        ensure(violates(&ex.lo, &ex.hi, &v, &eps), || format!("interval {i} does not violate its inequality"))?;
    }
    let rep = replay_exclusions(r).map_err(err)?;
    ensure(rep.violations == 0 && rep.checked == r.intervals.len(), || format!("library replay {rep:?}"))?;
    Ok(r.intervals.len())
}

fn c7_exclusion() -> Outcome {
    let opts = RigidityOptions::default();
    let mut total = 0;
    let mut scans = 0;
    let golden = FlowSurface::float(&square_torus(), 1.0, phi(), &[0]);
    for eps in [0.1, 0.05] {
        let r = rigidity_exclusion_scan(&golden, eps, &[21.0, 55.0, 144.0, 377.0], (0.5, 1.5), &opts).map_err(err)?;
        total += replay_scan(&r)?;
        scans += 1;
    }
    let periodic = FlowSurface::float(&square_torus(), 1.0, 1.0, &[0]);
    let r = rigidity_exclusion_scan(&periodic, 0.1, &[10.0, 20.0], (0.2, 2.7), &opts).map_err(err)?;
    total += replay_scan(&r)?;
    let pentagon = wmflat_core::corpus::double_pentagon();
    let fs = FlowSurface::float(&pentagon, 0.3, 1.0, &[]);
    let r = rigidity_exclusion_scan(&fs, 0.1, &[5.0, 10.0, 20.0], (0.1, 2.0), &opts).map_err(err)?;
    total += replay_scan(&r)?;
    scans += 2;
    ensure(total > 0, || "no intervals were excluded".into())?;
    Ok(format!("{scans} scans, {total} excluded intervals, all violate on replay"))
}

fn c8_correlation() -> Outcome {
    let ch = Observable::Character { m: 1, n: 0 };
    let opts = CorrelationOptions {
        t_values: vec![10.0, 100.0, 1000.0, 10000.0],
        n_samples: 1000,
        replicates: 10,
        steps_per_segment: 1000,
        seed: 7,
    };
    let c = correlation_cesaro(&square_torus(), (1.0, phi()), &ch, &ch, &opts).map_err(err)?;
    let torus_min = c
        .t_values
        .iter()
        .zip(&c.cesaro_values)
        .filter(|(t, _)| **t >= 100.0)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    ensure(torus_min >= TORUS_CESARO_FLOOR, || format!("torus Cesàro minimum {torus_min}"))?;
    let s = wmflat_core::corpus::double_pentagon();
    let bump = Observable::incenter_bump(&s, 0, 0.02).map_err(err)?;
    let opts = CorrelationOptions { t_values: vec![1.0, 10.0, 100.0, 1000.0, 10000.0], seed: 1, ..opts };
    let mut worst = 0.0f64;
    for dir in sobol_directions(5, (0.0, std::f64::consts::PI), 1) {
        let c = correlation_cesaro(&s, dir, &bump, &bump, &opts).map_err(err)?;
        let ratio = c.cesaro_values[4] / c.cesaro_values[1];
        ensure(ratio < BUMP_DECAY_RATIO, || format!("direction {dir:?}: ratio {ratio}"))?;
        worst = worst.max(ratio);
    }
    Ok(format!("torus min {torus_min:.3}; pentagon max ratio {worst:.3}"))
}

fn correlation_csv(seed: u64) -> Result<String, String> {
    let s = wmflat_core::corpus::double_pentagon();
    let bump = Observable::incenter_bump(&s, 0, 0.02).map_err(err)?;
    let opts = CorrelationOptions { t_values: vec![10.0, 100.0], n_samples: 200, replicates: 4, steps_per_segment: 50, seed };
    let mut out = String::from("direction,T,value,error\n");
    for (i, dir) in sobol_directions(2, (0.0, std::f64::consts::PI), seed as u32).into_iter().enumerate() {
        let c = correlation_cesaro(&s, dir, &bump, &bump, &opts).map_err(err)?;
        for ((t, v), e) in c.t_values.iter().zip(&c.cesaro_values).zip(&c.errors) {
            out.push_str(&format!("{i},{t},{v:e},{e:e}\n"));
        }
    }
    Ok(out)
}

fn c9_determinism() -> Outcome {
    let corpus = || -> Result<String, String> {
        let items = built_in_corpus().map_err(err)?;
        Ok(io::to_string(&corpus_table(&items, ClassifyOptions::default()).map_err(err)?))
    };
    let a = corpus()?;
    ensure(a == corpus()?, || "corpus JSON differs between runs".into())?;
    ensure(a == include_str!("../../cli/tests/golden/corpus.json"), || "corpus JSON differs from the golden table".into())?;
    let c = correlation_csv(7)?;
    ensure(c == correlation_csv(7)?, || "seed-7 CSV differs between runs".into())?;
    Ok(format!("corpus {} bytes, seed-7 CSV {} bytes", a.len(), c.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 9] = [
        (1, "triangle classification table", c1_triangles, Duration::from_secs(60)),
        (2, "k-dispatch consistency", c2_k_dispatch, Duration::from_secs(300)),
        (3, "k = 2 dichotomy", c3_k2, Duration::from_secs(60)),
        (4, "structural invariants", c4_structural, Duration::from_secs(120)),
        (5, "rigidity constructiveness", c5_rigidity, Duration::from_secs(120)),
        (6, "tracker oracle equivalence", c6_tracker, Duration::from_secs(1)),
        (7, "exclusion soundness replay", c7_exclusion, Duration::from_secs(120)),
        (8, "correlation diagnostics", c8_correlation, Duration::from_secs(600)),
        (9, "determinism", c9_determinism, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        let r = match r {
            Ok(m) if dt > budget => Err(format!("{m}; took {dt:.2?}, budget {budget:?}")),
            other => other,
        };
        match r {
            Ok(m) => println!("PASS {n} {name}: {m} [{dt:.2?}]"),
            Err(m) => {
                failed += 1;
                println!("FAIL {n} {name}: {m} [{dt:.2?}]");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
