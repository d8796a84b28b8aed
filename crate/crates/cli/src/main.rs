use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use wmflat_core::corpus::{built_in_corpus, corpus_table, CorpusInput, CorpusItem};
use wmflat_core::diagnostics::{
    correlation_cesaro, default_transversal, replay_exclusions, rigidity_exclusion_scan, sobol_directions, veech_tracker,
    CorrelationOptions, Observable,
};
use wmflat_core::flow::{first_return_iet, FlowSurface, RigidityOptions, Scalar};
use wmflat_core::homology::pairing;
use wmflat_core::io::{self, element_to_json, parse_rational, polygon_from_json, surface_from_json};
use wmflat_core::{
    classify_polygon_with, classify_surface, homology_basis, period_matrix, ClassifyOptions, Error, FieldElement,
    NumberField, PlanarVector, RationalAngle, RationalPolygon, TranslationSurface,
};

const EXIT_NOT_WM: u8 = 10;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_PRECISION: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "wmflat", version, about = "Weak mixing of rational billiards and translation surfaces")]
struct Cli {
    /// Use exact field arithmetic where the command supports both modes.
    #[arg(long, global = true)]
    exact: bool,
    /// Seed for randomized diagnostics.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Significant digits of floating-point output.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=17))]
    precision: u32,
    /// Print the JSON schemas and exit.
    #[arg(long, global = true)]
    schema: bool,
    /// Write the main output here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone, Default)]
struct Input {
    /// Polygon JSON file.
    #[arg(long)]
    polygon: Option<PathBuf>,
    /// Surface JSON file.
    #[arg(long)]
    surface: Option<PathBuf>,
    /// Triangle angles as multiples of π, e.g. 1/2,1/4,1/4.
    #[arg(long)]
    triangle: Option<String>,
    /// Built-in example: square-torus, double-pentagon, l-shape, golden-l-shape.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a polygon or surface and print its basic invariants.
    Validate(Input),
    /// Unfold a polygon into a translation surface.
    Unfold(Input),
    /// Intersection form and absolute periods on a homology basis.
    Periods(Input),
    /// Decide weak mixing in almost every direction.
    Classify(Input),
    /// Build and verify a rigidity configuration.
    Rigidity {
        #[command(flatten)]
        input: Input,
        /// Flow direction, two components such as 1,phi or 1,sqrt(2).
        #[arg(long)]
        direction: String,
        /// Clearance L.
        #[arg(long = "L")]
        l: String,
        /// Vertex indices to mark as stopping points.
        #[arg(long, value_delimiter = ',')]
        mark: Option<Vec<usize>>,
    },
    /// Zorich induction on the first-return IET.
    Iet {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Vertex indices to mark as stopping points.
        #[arg(long, value_delimiter = ',')]
        mark: Option<Vec<usize>>,
    },
    /// Numerical diagnostics: eigenvalue tracker, exclusion scan, correlations.
    Diagnose(Diagnose),
    /// Classify the built-in corpus and print the verdict table.
    Corpus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Tracker,
    Exclusion,
    Correlation,
}

#[derive(Args, Debug)]
struct Diagnose {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Flow direction; correlation mode defaults to Sobol directions.
    #[arg(long)]
    direction: Option<String>,
    /// Rescaling α of the tracked class.
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Clearance schedule for the exclusion scan.
    #[arg(long = "L", value_delimiter = ',', default_value = "21,55,144,377")]
    l: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.5")]
    window: Vec<f64>,
    /// Averaging times for correlations.
    #[arg(long = "T", value_delimiter = ',', default_value = "10,100,1000")]
    t: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    #[arg(long, default_value_t = 500)]
    steps_per_segment: usize,
    /// Number of Sobol directions when --direction is absent.
    #[arg(long, default_value_t = 5)]
    directions: usize,
    /// character:m,n, bump:shrink[:cell] or constant:c.
    #[arg(long)]
    observable: Option<String>,
    /// Vertex indices to mark as stopping points.
    #[arg(long, value_delimiter = ',')]
    mark: Option<Vec<usize>>,
    /// Write the JSON summary here instead of standard error.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug)]
enum Fail {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type Res<T> = std::result::Result<T, Fail>;

struct Out {
    main: String,
    side: Option<(Option<PathBuf>, String)>,
    code: u8,
}

impl Out {
    fn json(v: &Value) -> Out {
        Out { main: io::to_string(v), side: None, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if cli.schema {
        print!("{}", io::SCHEMA);
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = &cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(EXIT_USAGE);
    };
    match run(&cli, cmd).and_then(|out| emit(&cli, out)) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Fail::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Fail::Core(e)) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(if e.is_precision() { EXIT_PRECISION } else { EXIT_DATA })
        }
    }
}

fn emit(cli: &Cli, out: Out) -> Res<u8> {
    let write = |path: &Option<PathBuf>, s: &str, stderr: bool| -> Res<()> {
        match path {
            Some(p) => fs::write(p, s).map_err(|e| Fail::Io(format!("{}: {e}", p.display()))),
            None if stderr => {
                std::io::stderr().write_all(s.as_bytes()).map_err(|e| Fail::Io(e.to_string()))
            }
            None => std::io::stdout().write_all(s.as_bytes()).map_err(|e| Fail::Io(e.to_string())),
        }
    };
    write(&cli.output, &out.main, false)?;
    if let Some((path, s)) = &out.side {
        write(path, s, true)?;
    }
    Ok(out.code)
}

fn run(cli: &Cli, cmd: &Command) -> Res<Out> {
    match cmd {
        Command::Validate(inp) => validate(inp),
        Command::Unfold(inp) => {
            let s = match load(inp)? {
                Loaded::Polygon(p) => wmflat_core::unfold(&p)?,
                Loaded::Surface(s) => s,
            };
            Ok(Out::json(&io::surface_to_json(&s)))
        }
        Command::Periods(inp) => {
            let s = load(inp)?.surface()?;
            let b = homology_basis(&s)?;
            let pm = period_matrix(&s, &b);
            let ints = |m: &[Vec<BigInt>]| -> Value { m.iter().map(|r| r.iter().map(int_value).collect::<Vec<_>>()).collect() };
            Ok(Out::json(&json!({
                "genus": s.genus,
                "intersection": ints(&b.intersection),
                "re": pm.re.iter().map(element_to_json).collect::<Vec<_>>(),
                "im": pm.im.iter().map(element_to_json).collect::<Vec<_>>(),
            })))
        }
        Command::Classify(inp) => {
            let opts = ClassifyOptions { exact_cross_check: cli.exact };
            let v = match load(inp)? {
                Loaded::Polygon(p) => classify_polygon_with(&p, opts)?,
                Loaded::Surface(s) => classify_surface(&s)?,
            };
            let mut out = Out::json(&io::verdict_to_json(&v));
            if !v.weakly_mixing {
                out.code = EXIT_NOT_WM;
            }
            Ok(out)
        }
        Command::Rigidity { input, direction, l, mark } => rigidity(cli, input, direction, l, mark.as_deref()),
        Command::Iet { input, direction, steps, mark } => iet(cli, input, direction, *steps, mark.as_deref()),
        Command::Diagnose(d) => diagnose(cli, d),
        Command::Corpus => {
            let items = built_in_corpus()?;
            let table = corpus_table(&items, ClassifyOptions { exact_cross_check: cli.exact })?;
            Ok(Out::json(&table))
        }
    }
}

enum Loaded {
    Polygon(RationalPolygon),
    Surface(TranslationSurface),
}

impl Loaded {
    fn surface(self) -> Res<TranslationSurface> {
        Ok(match self {
            Loaded::Polygon(p) => wmflat_core::unfold(&p)?,
            Loaded::Surface(s) => s,
        })
    }
}

fn read_json(p: &PathBuf) -> Res<Value> {
    let text = fs::read_to_string(p).map_err(|e| Fail::Io(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::Core(Error::Parse(format!("{}: {e}", p.display()))))
}

fn builtin(name: &str) -> Res<CorpusItem> {
    let want = match name {
        "square-torus" => "square torus",
        "double-pentagon" => "double pentagon",
        "l-shape" => "L-shape 1,1,1,1",
        "golden-l-shape" => "L-shape 1,phi,1,phi",
        _ => return Err(Fail::Usage(format!("unknown built-in {name:?}"))),
    };
    Ok(built_in_corpus()?.into_iter().find(|it| it.name == want).expect("built-in is in the corpus"))
}

fn load(inp: &Input) -> Res<Loaded> {
    let given =
        [inp.polygon.is_some(), inp.surface.is_some(), inp.triangle.is_some(), inp.builtin.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return Err(Fail::Usage("give exactly one of --polygon, --surface, --triangle, --builtin".into()));
    }
    if let Some(p) = &inp.polygon {
        return Ok(Loaded::Polygon(polygon_from_json(&read_json(p)?)?));
    }
    if let Some(p) = &inp.surface {
        return Ok(Loaded::Surface(surface_from_json(&read_json(p)?)?));
    }
    if let Some(t) = &inp.triangle {
        let a: Vec<RationalAngle> = t.split(',').map(RationalAngle::parse).collect::<wmflat_core::Result<_>>()?;
        let a: [RationalAngle; 3] = a.try_into().map_err(|_| Fail::Core(Error::LengthMismatch))?;
        return Ok(Loaded::Polygon(wmflat_core::polygon::triangle(a)?));
    }
    let name = inp.builtin.as_deref().unwrap_or_default();
    let it = builtin(name)?;
    Ok(match it.input {
        CorpusInput::Polygon(p) => Loaded::Polygon(p),
        CorpusInput::Surface(s) => Loaded::Surface(s),
    })
}

fn validate(inp: &Input) -> Res<Out> {
    let v = match load(inp)? {
        Loaded::Polygon(p) => {
            let s = wmflat_core::unfold(&p)?;
            json!({
                "valid": true,
                "kind": "polygon",
                "k": p.k,
                "sides": p.n(),
                "area": element_to_json(&p.area()),
                "unfolding": {"cells": s.cells.len(), "genus": s.genus, "stratum": s.stratum_signature()},
            })
        }
        Loaded::Surface(s) => json!({
            "valid": true,
            "kind": "surface",
            "cells": s.cells.len(),
            "genus": s.genus,
            "stratum": s.stratum_signature(),
            "area": element_to_json(&s.area),
        }),
    };
    Ok(Out::json(&v))
}

fn int_value(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(x) => json!(x),
        Err(_) => json!(n.to_string()),
    }
}

/// a + b·ξ with ξ one of φ or √n; `irr` is None for rationals.
#[derive(Clone, Debug, PartialEq)]
struct Quad {
    irr: Option<Irr>,
    a: BigRational,
    b: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Irr {
    Phi,
    Sqrt(i64),
}

impl Irr {
    fn value(self) -> f64 {
        match self {
            Irr::Phi => (1.0 + 5f64.sqrt()) / 2.0,
            Irr::Sqrt(n) => (n as f64).sqrt(),
        }
    }
}

fn parse_quad(s: &str) -> Res<Quad> {
    let bad = || Fail::Core(Error::Parse(format!("bad number {s:?}")));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in t.char_indices() {
        if (c == '+' || c == '-') && i > 0 {
            terms.push(&t[start..i]);
            start = i;
        }
    }
    terms.push(&t[start..]);
    let zero = BigRational::from_integer(0.into());
    let mut q = Quad { irr: None, a: zero.clone(), b: zero };
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let mut coef = BigRational::from_integer(1.into());
        let mut atom = None;
        for f in body.split('*') {
            let a = if f == "phi" {
                Some(Irr::Phi)
            } else if let Some(n) = f.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
                Some(Irr::Sqrt(n.parse().map_err(|_| bad())?))
            } else {
                coef *= parse_decimal(f).ok_or_else(bad)?;
                None
            };
            if let Some(a) = a {
                if atom.is_some() || q.irr.is_some_and(|x| x != a) {
                    return Err(Fail::Core(Error::Parse(format!("{s:?} mixes irrationals"))));
                }
                atom = Some(a);
            }
        }
        if neg {
            coef = -coef;
        }
        match atom {
            None => q.a += coef,
            Some(a) => {
                q.irr = Some(a);
                q.b += coef;
            }
        }
    }
    Ok(q)
}

/// Integer, "p/q" or decimal literal, exactly.
fn parse_decimal(f: &str) -> Option<BigRational> {
    let Some((int, frac)) = f.split_once('.') else { return parse_rational(f).ok() };
    if !frac.chars().all(|c| c.is_ascii_digit()) || !int.chars().all(|c| c.is_ascii_digit()) || int.len() + frac.len() == 0 {
        return None;
    }
    let num: BigInt = format!("{int}{frac}").parse().ok()?;
    Some(BigRational::new(num, BigInt::from(10u32).pow(frac.len() as u32)))
}

fn quad_f64(q: &Quad) -> f64 {
    let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
    f(&q.a) + q.irr.map_or(0.0, |x| f(&q.b) * x.value())
}

fn quad_field(irr: Option<Irr>) -> Res<std::sync::Arc<NumberField>> {
    Ok(match irr {
        None => NumberField::rationals(),
        Some(Irr::Phi) => NumberField::golden(),
        Some(Irr::Sqrt(n)) => NumberField::quadratic(n)?,
    })
}

fn quad_element(q: &Quad, f: &std::sync::Arc<NumberField>) -> Res<FieldElement> {
    let a = FieldElement::from_rational(f, q.a.clone());
    if q.irr.is_none() {
        return Ok(a);
    }
    Ok(&a + &FieldElement::theta(f).scale(&q.b))
}

fn parse_pair(s: &str) -> Res<(Quad, Quad)> {
    let parts: Vec<&str> = split_top(s);
    if parts.len() != 2 {
        return Err(Fail::Core(Error::Parse(format!("direction {s:?} needs two components"))));
    }
    Ok((parse_quad(parts[0])?, parse_quad(parts[1])?))
}

/// Split on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn exact_direction(s: &str) -> Res<PlanarVector> {
    let (x, y) = parse_pair(s)?;
    if x.irr.is_some() && y.irr.is_some() && x.irr != y.irr {
        return Err(Fail::Core(Error::Parse(format!("{s:?} mixes irrationals"))));
    }
    let f = quad_field(x.irr.or(y.irr))?;
    Ok(PlanarVector::new(quad_element(&x, &f)?, quad_element(&y, &f)?))
}

fn float_direction(s: &str) -> Res<(f64, f64)> {
    let (x, y) = parse_pair(s)?;
    Ok((quad_f64(&x), quad_f64(&y)))
}

fn default_marks(s: &TranslationSurface, mark: Option<&[usize]>) -> Vec<usize> {
    match mark {
        Some(m) => m.to_vec(),
        None if s.vertices.iter().all(|v| !v.is_singular()) => vec![0],
        None => Vec::new(),
    }
}

struct Fmt {
    digits: u32,
}

impl Fmt {
    fn f(&self, x: f64) -> String {
        if x == 0.0 || !x.is_finite() {
            return format!("{x}");
        }
        let s = format!("{:.*e}", self.digits as usize - 1, x);
        let v: f64 = s.parse().expect("formatted float parses");
        if v.abs() < 1e-4 || v.abs() >= 1e15 {
            format!("{v:e}")
        } else {
            format!("{v}")
        }
    }

    fn num(&self, x: f64) -> Value {
        if !x.is_finite() {
            return Value::Null;
        }
        let s = self.f(x);
        serde_json::from_str(&s).unwrap_or(Value::Null)
    }
}

/// Scalars that can be printed in either exact or floating form.
trait Emit: Scalar {
    fn emit(&self, fmt: &Fmt) -> Value;
}

impl Emit for f64 {
    fn emit(&self, fmt: &Fmt) -> Value {
        fmt.num(*self)
    }
}

impl Emit for FieldElement {
    fn emit(&self, _: &Fmt) -> Value {
        element_to_json(self)
    }
}

fn rigidity_json<T: Emit>(
    fs: &FlowSurface<T>,
    l: &T,
    basis: &wmflat_core::HomologyBasis,
    periods: &dyn Fn(&[BigInt]) -> Res<(Value, Value)>,
    fmt: &Fmt,
) -> Res<Out> {
    let opts = RigidityOptions::default();
    let cfg = fs.rigidity_configuration(l, Some(basis), &opts)?;
    let chk = fs.check_rigidity(&cfg, &opts)?;
    let (re, im) = periods(&cfg.curve_class)?;
    let v = json!({
        "case": cfg.case.number(),
        "L": cfg.l.emit(fmt),
        "V": cfg.v.emit(fmt),
        "H": cfg.h.emit(fmt),
        "sigma": cfg.sigma.emit(fmt),
        "displacement": cfg.displacement.emit(fmt),
        "base": [cfg.base.0.emit(fmt), cfg.base.1.emit(fmt)],
        "constant": fmt.num(cfg.constant),
        "curve_class": cfg.curve_class.iter().map(int_value).collect::<Vec<_>>(),
        "pairings": {"re": re, "im": im},
        "verification": {
            "passed": chk.passed(),
            "flows_clear": chk.flows_clear,
            "sides_in_j": chk.sides_in_j,
            "vertical_ok": chk.vertical_ok,
            "displacement_ok": chk.displacement_ok,
            "area_ok": chk.area_ok,
            "measured_v": fmt.num(chk.measured_v),
            "measured_h": fmt.num(chk.measured_h),
            "measured_sigma": fmt.num(chk.measured_sigma),
        },
    });
    let mut out = Out::json(&v);
    if !chk.passed() {
        out.code = EXIT_PRECISION;
        eprintln!("error: PRECISION: configuration failed verification");
    }
    Ok(out)
}

fn rigidity(cli: &Cli, input: &Input, direction: &str, l: &str, mark: Option<&[usize]>) -> Res<Out> {
    let s = load(input)?.surface()?;
    let marks = default_marks(&s, mark);
    let fmt = Fmt { digits: cli.precision };
    if cli.exact {
        let d = exact_direction(direction)?;
        let (fs, framed) = FlowSurface::exact(&s, &d, &marks)?;
        let basis = homology_basis(&framed)?;
        let pm = period_matrix(&framed, &basis);
        let lq = parse_quad(l)?;
        let le = if lq.irr.is_none() {
            FieldElement::from_rational(&framed.field, lq.a.clone())
        } else {
            return Err(Fail::Core(Error::Parse("L must be rational in exact mode".into())));
        };
        let periods = |c: &[BigInt]| -> Res<(Value, Value)> {
            Ok((element_to_json(&pairing(&pm.re, c)?), element_to_json(&pairing(&pm.im, c)?)))
        };
        rigidity_json(&fs, &le, &basis, &periods, &fmt)
    } else {
        let (dx, dy) = float_direction(direction)?;
        let fs = FlowSurface::float(&s, dx, dy, &marks);
        let basis = homology_basis(&s)?;
        let pm = period_matrix(&s, &basis);
        let a = fs.frame;
        let lf = quad_f64(&parse_quad(l)?);
        let periods = |c: &[BigInt]| -> Res<(Value, Value)> {
            let re = pairing(&pm.re, c)?.to_f64();
            let im = pairing(&pm.im, c)?.to_f64();
            Ok((fmt.num(a[0] * re + a[1] * im), fmt.num(a[2] * re + a[3] * im)))
        };
        rigidity_json(&fs, &lf, &basis, &periods, &fmt)
    }
}

fn iet_csv<T: Emit>(fs: &FlowSurface<T>, one: &T, steps: usize, fmt: &Fmt) -> Res<Out> {
    let tr = default_transversal(fs, one)?;
    let mut t = first_return_iet(fs, &tr, None, 1_000_000)?;
    let joined = |v: &[T]| v.iter().map(|x| fmt.f(x.to_f64())).collect::<Vec<_>>().join(" ");
    let mut out = String::from("step,top,rauzy_steps,matrix,lengths\n");
    let d = t.lengths.len();
    let id: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    out.push_str(&format!("0,,0,{},{}\n", matrix_cell(&id), joined(&t.lengths)));
    for n in 1..=steps {
        let st = match t.zorich_step() {
            Ok(st) => st,
            Err(Error::Tie | Error::Degenerate) => break,
            Err(e) => return Err(e.into()),
        };
        out.push_str(&format!("{n},{},{},{},{}\n", st.top, st.rauzy_steps, matrix_cell(&st.matrix), joined(&t.lengths)));
    }
    Ok(Out { main: out, side: None, code: 0 })
}

/// Rows separated by ';', entries by spaces.
fn matrix_cell(m: &[Vec<i64>]) -> String {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(";")
}

fn iet(cli: &Cli, input: &Input, direction: &str, steps: usize, mark: Option<&[usize]>) -> Res<Out> {
    let s = load(input)?.surface()?;
    let marks = default_marks(&s, mark);
    let fmt = Fmt { digits: cli.precision };
    if cli.exact {
        let (fs, framed) = FlowSurface::exact(&s, &exact_direction(direction)?, &marks)?;
        iet_csv(&fs, &FieldElement::one(&framed.field), steps, &fmt)
    } else {
        let (dx, dy) = float_direction(direction)?;
        iet_csv(&FlowSurface::float(&s, dx, dy, &marks), &1.0, steps, &fmt)
    }
}

fn tracker_csv<T: Emit>(fs: &FlowSurface<T>, one: &T, dir: (f64, f64), alpha: f64, steps: usize, fmt: &Fmt) -> Res<(String, Value)> {
    let tr = default_transversal(fs, one)?;
    let iet = first_return_iet(fs, &tr, None, 1_000_000)?;
    let trace = veech_tracker(&iet, dir, alpha, steps)?;
    let mut csv = String::from("step,value,error,log_norm,distortion,excursion\n");
    for s in &trace.steps {
        csv.push_str(&format!("{},{},,{},{},{}\n", s.step, fmt.f(s.distance), fmt.f(s.log_norm), fmt.f(s.distortion), s.excursion));
    }
    let tail = trace.steps.iter().rev().take(10).map(|s| s.distance).fold(0.0, f64::max);
    let summary = json!({
        "mode": "tracker",
        "alpha": fmt.num(alpha),
        "direction": [fmt.num(dir.0), fmt.num(dir.1)],
        "dim": trace.dim,
        "steps": trace.steps.len(),
        "excursions": trace.steps.iter().filter(|s| s.excursion).count(),
        "max_distance_last_10": fmt.num(tail),
    });
    Ok((csv, summary))
}

fn parse_observable(spec: Option<&str>, s: &TranslationSurface) -> Res<Observable> {
    let spec = match spec {
        Some(x) => x.to_string(),
        None if s.genus == 1 => "character:1,0".into(),
        None => "bump:0.02".into(),
    };
    let bad = || Fail::Usage(format!("bad observable {spec:?}"));
    let (kind, args) = spec.split_once(':').unwrap_or((spec.as_str(), ""));
    match kind {
        "character" => {
            let v: Vec<i64> = args.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Res<_>>()?;
            let [m, n] = v[..] else { return Err(bad()) };
            Ok(Observable::Character { m, n })
        }
        "bump" => {
            let mut it = args.split(':');
            let shrink: f64 = it.next().unwrap_or("0.02").parse().map_err(|_| bad())?;
            let cell: usize = it.next().unwrap_or("0").parse().map_err(|_| bad())?;
            Ok(Observable::incenter_bump(s, cell, shrink)?)
        }
        "constant" => Ok(Observable::Constant { value: args.parse().map_err(|_| bad())? }),
        _ => Err(bad()),
    }
}

fn diagnose(cli: &Cli, d: &Diagnose) -> Res<Out> {
    let s = load(&d.input)?.surface()?;
    let marks = default_marks(&s, d.mark.as_deref());
    let fmt = Fmt { digits: cli.precision };
    let need_dir = || d.direction.as_deref().ok_or_else(|| Fail::Usage("--direction is required for this mode".into()));
    let (csv, summary) = match d.mode {
        Mode::Tracker => {
            let alpha = quad_f64(&parse_quad(&d.alpha)?);
            let dir_s = need_dir()?;
            let dir = float_direction(dir_s)?;
            if cli.exact {
                let (fs, framed) = FlowSurface::exact(&s, &exact_direction(dir_s)?, &marks)?;
                tracker_csv(&fs, &FieldElement::one(&framed.field), dir, alpha, d.steps, &fmt)?
            } else {
                tracker_csv(&FlowSurface::float(&s, dir.0, dir.1, &marks), &1.0, dir, alpha, d.steps, &fmt)?
            }
        }
        Mode::Exclusion => {
            let dir = float_direction(need_dir()?)?;
            let [w0, w1] = d.window[..] else { return Err(Fail::Usage("--window needs two values".into())) };
            let fs = FlowSurface::float(&s, dir.0, dir.1, &marks);
            let rep = rigidity_exclusion_scan(&fs, d.epsilon, &d.l, (w0, w1), &RigidityOptions::default())?;
            let replay = replay_exclusions(&rep)?;
            let mut csv = String::from("step,value,error,L,V,case\n");
            for (i, (c, m)) in rep.configs_used.iter().zip(&rep.survivor_measure).enumerate() {
                csv.push_str(&format!("{},{},,{},{},{}\n", i + 1, fmt.f(*m), fmt.f(c.l), fmt.f(c.v), c.case));
            }
            let q = |x: &BigRational| json!(io::rational_string(x));
            let summary = json!({
                "mode": "exclusion",
                "epsilon": fmt.num(d.epsilon),
                "window": [fmt.num(w0), fmt.num(w1)],
                "configs_used": rep.configs_used.len(),
                "skipped": rep.skipped.iter().map(|(l, why)| json!({"L": fmt.num(*l), "reason": why})).collect::<Vec<_>>(),
                "excluded_intervals": rep.intervals.len(),
                "survivors": rep.survivors.iter().map(|(a, b)| json!([q(a), q(b)])).collect::<Vec<_>>(),
                "replay": {"checked": replay.checked, "violations": replay.violations},
                "note": rep.note,
            });
            (csv, summary)
        }
        Mode::Correlation => {
            let seed = cli.seed.ok_or_else(|| Fail::Usage("--seed is required for correlation mode".into()))?;
            let obs = parse_observable(d.observable.as_deref(), &s)?;
            let dirs = match &d.direction {
                Some(x) => vec![float_direction(x)?],
                None => sobol_directions(d.directions, (0.0, std::f64::consts::PI), seed as u32),
            };
            let opts = CorrelationOptions {
                t_values: d.t.clone(),
                n_samples: d.samples,
                replicates: d.replicates,
                steps_per_segment: d.steps_per_segment,
                seed,
            };
            let mut csv = String::from("direction,T,value,error\n");
            let mut rows = Vec::new();
            for (i, dir) in dirs.iter().enumerate() {
                let c = correlation_cesaro(&s, *dir, &obs, &obs, &opts)?;
                for ((t, v), e) in c.t_values.iter().zip(&c.cesaro_values).zip(&c.errors) {
                    csv.push_str(&format!("{i},{},{},{}\n", fmt.f(*t), fmt.f(*v), fmt.f(*e)));
                }
                let first = c.cesaro_values.first().copied().unwrap_or(f64::NAN);
                let last = c.cesaro_values.last().copied().unwrap_or(f64::NAN);
                rows.push(json!({
                    "direction": [fmt.num(dir.0), fmt.num(dir.1)],
                    "decay_ratio": fmt.num(last / first),
                    "nonergodic_suspected": c.nonergodic_suspected,
                    "birkhoff_deviation": fmt.num(c.birkhoff_deviation),
                    "lost_orbits": c.lost_orbits,
                }));
            }
            let summary = json!({
                "mode": "correlation",
                "seed": seed,
                "observable": serde_json::to_value(&obs).expect("observable serializes"),
                "samples": d.samples,
                "replicates": d.replicates,
                "directions": rows,
            });
            (csv, summary)
        }
    };
    Ok(Out { main: csv, side: Some((d.summary.clone(), io::to_string(&summary))), code: 0 })
}
