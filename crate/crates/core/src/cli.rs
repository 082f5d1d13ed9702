//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{elekes_construction, full_plane, random_instance};
use crate::cover::{grid_cover, normalize_grid, two_pencil_extract, verify_certificate, CoverParams};
use crate::distances::{determined_lines, distance_sets, isosceles_triples};
use crate::energy::{cs_bridge_check, energy_reduction, line_energy, sumproduct_report, Corollary};
use crate::error::Error;
use crate::field::PrimeModulus;
use crate::harness::{
    fit_exponent, fit_svg, parse_instance, parse_instance_3d, records_to_csv, render_instance, run_sweep,
    SweepConfig,
};
use crate::incidence::{
    check_hypotheses, count_point_plane, max_collinear_3d, reference_bound, resolve,
    sig4, sizes_of, BoundKind, Engine, Theorem,
};
use crate::plane::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Elekes,
    #[value(name = "full-plane", alias = "full_plane")]
    FullPlane,
    Random,
}

#[derive(Debug, Args)]
struct Common {
    /// Input file (instance JSON, sweep config, or sweep records).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Prime modulus.
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// naive | hash_join | auto
    #[arg(long, global = true, value_parser = Engine::from_str)]
    engine: Option<Engine>,
    /// Dearth constant, e.g. 1/2.
    #[arg(long, global = true, value_parser = parse_rational)]
    c1: Option<BigRational>,
    /// Excess constant.
    #[arg(long, global = true, value_parser = parse_rational)]
    c2: Option<BigRational>,
    /// Constant for `<<` in hypothesis checks.
    #[arg(long, global = true, value_parser = parse_rational)]
    llconstant: Option<BigRational>,
}

#[derive(Debug, Parser)]
#[command(name = "incidence", version, about = "Exact point-line incidence experiments over F_p")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count incidences of an instance file.
    Count,
    /// Count point-plane incidences of a 3D instance file.
    Count3d,
    /// Generate an instance.
    Construct {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        c: Option<u64>,
        /// Number of points (random family).
        #[arg(long)]
        m: Option<u64>,
        /// Number of lines (random family).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Extract one two-pencil grid.
    Extract {
        /// Also map the grid to axis-parallel form.
        #[arg(long)]
        normalize: bool,
    },
    /// Run the grid cover and verify its certificate.
    Cover {
        /// Stop once at most this fraction of the points remains.
        #[arg(long, value_parser = parse_rational)]
        stop: Option<BigRational>,
        /// Use c1 = 1/2, c2 = 2, stop = 1/4 unless overridden.
        #[arg(long)]
        desk: bool,
    },
    /// Line energy of A against the lines, with its 3D reduction.
    Energy {
        /// Elements of A, comma separated; defaults to the x-support.
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        /// Elements of B; defaults to the y-support.
        #[arg(long, value_delimiter = ',')]
        b: Vec<u64>,
    },
    /// Image sizes for a sum-product family.
    Sumprod {
        /// sum-product | shifted-product | three-variable | expander
        #[arg(long, value_parser = Corollary::from_str)]
        family: Corollary,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<u64>,
    },
    /// Distance sets and isosceles triples of the points.
    Distances,
    /// Determined lines and their dyadic classes.
    Beck,
    /// Run a sweep config.
    Sweep,
    /// Log-log fit of two columns of sweep records.
    Fit {
        #[arg(long, default_value = "m")]
        x: String,
        #[arg(long, default_value = "I")]
        y: String,
        /// Only rows of this family.
        #[arg(long)]
        family: Option<String>,
    },
}

/// Accepts `3`, `-2`, `1/2048` and decimals such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("'{s}' is not a rational number");
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let whole = if int.is_empty() || int == "-" { BigInt::zero() } else { BigInt::from_str(int).map_err(|_| bad())? };
        let den = num::pow(BigInt::from(10), frac.len());
        let mut num = BigInt::from_str(frac).map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        return Ok(BigRational::new(whole * &den + num, den));
    }
    let r = BigRational::from_str(s).map_err(|_| bad())?;
    Ok(r)
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

impl Common {
    fn input(&self) -> Result<&PathBuf, Failure> {
        self.input.as_ref().ok_or_else(|| usage("--input is required"))
    }

    fn read_text(&self) -> Result<String, Failure> {
        let path = self.input()?;
        std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
    }

    fn instance(&self) -> Result<(Instance, usize), Failure> {
        let (inst, dups) = parse_instance(&self.read_text()?)?;
        if dups > 0 {
            eprintln!("warning: dropped {dups} duplicate entries");
        }
        Ok((inst, dups))
    }

    fn format(&self, allowed: &[Format], default: Format) -> Result<Format, Failure> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(usage(format!("--format {f:?} is not supported here").to_lowercase()))
        }
    }

    fn llconstant(&self) -> BigRational {
        self.llconstant.clone().unwrap_or_else(|| BigRational::from_integer(1.into()))
    }

    fn modulus(&self) -> Result<PrimeModulus, Failure> {
        let p = self.p.ok_or_else(|| usage("--p is required"))?;
        Ok(PrimeModulus::new(p)?)
    }
}

fn count(c: &Common) -> Outcome {
    let (inst, dups) = c.instance()?;
    let engine = c.engine.unwrap_or_default();
    let i = crate::incidence::count_incidences(&inst, engine);
    let (p, m, n) = (inst.modulus().p64(), inst.m() as u64, inst.n() as u64);
    match c.format(&[Format::Json, Format::Csv], Format::Csv)? {
        _ if c.format.is_none() => Ok(format!("{i}\n")),
        Format::Csv => Ok(format!("p,m,n,I\n{p},{m},{n},{i}\n")),
        _ => {
            let bound = |k| {
                let b = reference_bound(m, n, p, k);
                json!({"regime": b.regime, "value": sig4(b.value)})
            };
            Ok(pretty(&json!({
                "p": p, "m": m, "n": n, "I": i,
                "engine": engine, "strategy": resolve(engine, &inst),
                "duplicates": dups,
                "hypotheses": check_hypotheses(sizes_of(&inst), p, &c.llconstant()),
                "bounds": {
                    "table1": bound(BoundKind::Table1),
                    "combinatorial": bound(BoundKind::Combinatorial),
                    "vinh": bound(BoundKind::Vinh),
                },
            })))
        }
    }
}

fn count3d(c: &Common) -> Outcome {
    let inst = parse_instance_3d(&c.read_text()?)?;
    let i = count_point_plane(&inst);
    match c.format(&[Format::Json, Format::Csv], Format::Csv)? {
        _ if c.format.is_none() => Ok(format!("{i}\n")),
        Format::Csv => Ok(format!("p,r,s,I\n{},{},{},{i}\n", inst.modulus(), inst.r(), inst.s())),
        _ => {
            let (r, s) = (inst.r() as u64, inst.s() as u64);
            let k = max_collinear_3d(inst.modulus(), inst.points());
            let p = inst.modulus().p64();
            Ok(pretty(&json!({
                "p": p, "r": r, "s": s, "I": i, "k": k,
                "bound": sig4(crate::incidence::point_plane_bound(r, s, k as u64)),
                "hypotheses": check_hypotheses(Theorem::PointPlane { r, s }, p, &c.llconstant()),
            })))
        }
    }
}

fn construct(c: &Common, family: Family, a: Option<u64>, cc: Option<u64>, m: Option<u64>, n: Option<u64>) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let p = c.p.ok_or_else(|| usage("--p is required"))?;
    let need = |v: Option<u64>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required for this family")));
    let inst = match family {
        Family::Elekes => elekes_construction(need(a, "a")?, need(cc, "c")?, p)?,
        Family::FullPlane => full_plane(PrimeModulus::new(p)?),
        Family::Random => random_instance(PrimeModulus::new(p)?, need(m, "m")?, need(n, "n")?, c.seed.unwrap_or(0))?,
    };
    Ok(render_instance(&inst))
}

fn cover_params(c: &Common, stop: Option<BigRational>, desk: bool) -> CoverParams {
    let base = if desk { CoverParams::desk() } else { CoverParams::standard() };
    CoverParams {
        c1: c.c1.clone().unwrap_or(base.c1),
        c2: c.c2.clone().unwrap_or(base.c2),
        stop_fraction: stop.unwrap_or(base.stop_fraction),
    }
}

fn extract(c: &Common, normalize: bool) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let (inst, _) = c.instance()?;
    let c1 = c.c1.clone().unwrap_or(CoverParams::standard().c1);
    let grid = two_pencil_extract(inst.points(), inst.lines(), &c1, None)?;
    let mut out = json!({ "grid": grid });
    if normalize {
        let ng = normalize_grid(&grid, inst.lines())?;
        out["normalized"] = json!({
            "map": ng.map.rows(),
            "h": ng.h,
            "x": ng.x,
            "y": ng.y,
            "lines": ng.lines,
            "dropped_base": ng.dropped_base,
        });
    }
    Ok(pretty(&out))
}

fn cover(c: &Common, stop: Option<BigRational>, desk: bool) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let (inst, _) = c.instance()?;
    let params = cover_params(c, stop, desk);
    if params.c1 <= BigRational::zero() || params.c2 <= BigRational::zero() || params.stop_fraction < BigRational::zero() {
        return Err(usage("cover constants must be positive"));
    }
    let cert = grid_cover(&inst, &params)?;
    let report = verify_certificate(&inst, &cert);
    Ok(pretty(&json!({ "certificate": cert, "verification": report, "passed": report.passed() })))
}

fn scalars(m: PrimeModulus, vals: &[u64]) -> Vec<crate::field::Scalar> {
    vals.iter().map(|&v| m.scalar(v)).collect()
}

fn energy(c: &Common, a: &[u64], b: &[u64]) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let (inst, _) = c.instance()?;
    let m = inst.modulus();
    let a = if a.is_empty() { inst.x_support() } else { scalars(m, a) };
    let b = if b.is_empty() { inst.y_support() } else { scalars(m, b) };
    let e = line_energy(&a, inst.lines())?;
    let red = energy_reduction(&a, inst.lines())?;
    let (r, s) = (red.r() as u64, red.s() as u64);
    let mut out = json!({
        "p": m.p64(), "a_size": a.len(), "b_size": b.len(), "n": inst.n(),
        "E": e.value,
        "reduction": {
            "r": r, "s": s, "I": count_point_plane(&red),
            "hypotheses": check_hypotheses(Theorem::PointPlane { r, s }, m.p64(), &c.llconstant()),
        },
    });
    if r <= 4096 {
        out["reduction"]["k"] = json!(max_collinear_3d(m, red.points()));
    }
    if !b.is_empty() {
        out["bridge"] = json!(cs_bridge_check(&a, &b, inst.lines())?);
    }
    Ok(pretty(&out))
}

fn sumprod(c: &Common, family: Corollary, a: &[u64], b: &[u64], cc: &[u64]) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let m = c.modulus()?;
    let rep = sumproduct_report(family, &scalars(m, a), &scalars(m, b), &scalars(m, cc), &c.llconstant())?;
    Ok(pretty(&rep))
}

fn distances(c: &Common) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let (inst, _) = c.instance()?;
    let rep = distance_sets(inst.points())?;
    Ok(pretty(&json!({
        "m": inst.m(),
        "distinct_distances": rep.all.len(),
        "max_pinned": rep.max_pinned,
        "best_pin": rep.best_pin,
        "degenerate": rep.degenerate,
        "isosceles_triples": isosceles_triples(inst.points()),
        "distances": rep.all,
    })))
}

fn beck(c: &Common) -> Outcome {
    c.format(&[Format::Json], Format::Json)?;
    let (inst, _) = c.instance()?;
    let rep = determined_lines(inst.points())?;
    Ok(pretty(&json!({
        "m": inst.m(),
        "determined_lines": rep.lines.len(),
        "classes": rep.classes,
        "covered_pairs": rep.covered_pairs,
        "total_pairs": rep.total_pairs,
        "balanced": rep.pairs_balance(),
    })))
}

fn sweep(c: &Common) -> Result<(String, Option<PathBuf>), Failure> {
    let mut cfg = SweepConfig::from_json(&c.read_text()?)?;
    if let Some(e) = c.engine {
        cfg.engine = match e {
            Engine::Naive => "naive",
            Engine::HashJoin => "hash_join",
            Engine::Auto => "auto",
        }
        .into();
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(k) = &c.llconstant {
        cfg.llconstant = k.to_string();
    }
    let records = run_sweep(&cfg)?;
    let text = match c.format(&[Format::Json, Format::Csv], Format::Csv)? {
        Format::Csv => records_to_csv(&records),
        _ => pretty(&records),
    };
    Ok((text, cfg.output.map(PathBuf::from)))
}

/// Rows of a sweep CSV or JSON file as (family, column lookup).
fn load_rows(text: &str) -> Result<Vec<serde_json::Map<String, Value>>, Failure> {
    if text.trim_start().starts_with('[') {
        let v: Value = serde_json::from_str(text).map_err(|e| Failure::Data(format!("records: {e}")))?;
        return v
            .as_array()
            .ok_or_else(|| Failure::Data("records: expected an array".into()))?
            .iter()
            .map(|r| r.as_object().cloned().ok_or_else(|| Failure::Data("records: expected objects".into())))
            .collect();
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Failure::Data(format!("records: {e}")))?.clone();
    rdr.records()
        .map(|row| {
            let row = row.map_err(|e| Failure::Data(format!("records: {e}")))?;
            Ok(header
                .iter()
                .zip(row.iter())
                .map(|(k, v)| {
                    let val = v.parse::<f64>().map(Value::from).unwrap_or_else(|_| Value::from(v));
                    (k.to_string(), val)
                })
                .collect())
        })
        .collect()
}

fn column(row: &serde_json::Map<String, Value>, name: &str) -> Option<f64> {
    if name == "mn" {
        return Some(column(row, "m")? * column(row, "n")?);
    }
    row.get(name)?.as_f64()
}

fn fit(c: &Common, x: &str, y: &str, family: Option<&str>) -> Outcome {
    let rows = load_rows(&c.read_text()?)?;
    if let Some(first) = rows.first() {
        for f in [x, y] {
            if f != "mn" && !first.contains_key(f) {
                return Err(usage(format!("no column '{f}'")));
            }
        }
    }
    let data: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| family.map_or(true, |f| r.get("family").and_then(Value::as_str) == Some(f)))
        .filter_map(|r| Some((column(r, x)?, column(r, y)?)))
        .collect();
    let result = fit_exponent(&data)?;
    match c.format(&[Format::Json, Format::Svg], Format::Json)? {
        Format::Svg => Ok(fit_svg(&data, &result, x, y)),
        _ => Ok(pretty(&json!({ "x": x, "y": y, "fit": result }))),
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let mut fallback_output = None;
    let text = match cli.command {
        Command::Count => count(c)?,
        Command::Count3d => count3d(c)?,
        Command::Construct { family, a, c: cc, m, n } => construct(c, family, a, cc, m, n)?,
        Command::Extract { normalize } => extract(c, normalize)?,
        Command::Cover { stop, desk } => cover(c, stop, desk)?,
        Command::Energy { a, b } => energy(c, &a, &b)?,
        Command::Sumprod { family, a, b, c: cc } => sumprod(c, family, &a, &b, &cc)?,
        Command::Distances => distances(c)?,
        Command::Beck => beck(c)?,
        Command::Sweep => {
            let (text, out) = sweep(c)?;
            fallback_output = out;
            text
        }
        Command::Fit { x, y, family } => fit(c, &x, &y, family.as_deref())?,
    };
    match c.output.clone().or(fallback_output) {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
        }
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Data(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

/// Parses `args` (program name first) and runs one subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
