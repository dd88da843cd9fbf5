//! Library half of the `degenex` command: input schemas, jobs and output.
//!
//! CSV contracts (one header row, fields in this order):
//!
//! - `finite-n`: `n,radius,log2_objective,bits_per_copy`
//! - `tradeoff`: `R,r_bits,method`, plus `<stem>_baseline.csv` with the
//!   time-sharing line in the same columns
//! - `fekete`: `n,delta_bits,exchange_passes` (`delta_nats` with `--nats`),
//!   plus `<stem>_points.csv` with `n,re,im`

pub mod error;
pub mod schema;

use std::f64::consts::LN_2;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use degenex_core::degeneration::{
    combinatorial_exponent, from_combinatorial, hypergraph_ghz_exponent, Degeneration, ValidationReport,
};
use degenex_core::exponent::{
    capacity_lower_bound, circle_average_bound_in, fourier_circle_exponent, is_centrally_symmetric, measure_exponent,
    norm_min_lower_bound_in, symmetric_exponent_in, ExponentMethod, ExponentResult,
};
use degenex_core::finiten::{finite_n_exponent_table_in, PointStrategy};
use degenex_core::measure::PlanarMeasure;
use degenex_core::optimize::RadiusBracket;
use degenex_core::potential::{extrapolate, weighted_fekete, CompactDomain, GridResolution, WeightPair};
use degenex_core::tradeoff::{rate_grid, SymmetricTradeoff};
use serde::Serialize;

pub use error::CliError;
pub use schema::{parse_input, read_input, InputFile};

/// `--method` values for `exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Symmetric,
    NormMin,
    CircleAverage,
    Fourier,
    Measure,
    Capacity,
    Combinatorial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyArg {
    Roots,
    Optimize,
    Exchange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightsArg {
    Trivial,
    Norm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Validate { input: PathBuf },
    Exponent { input: PathBuf, method: MethodArg, radius: f64, modes: usize },
    FiniteN { input: PathBuf, ns: Vec<usize>, strategy: StrategyArg, radius: f64 },
    Tradeoff { input: PathBuf, grid: usize },
    Fekete { input: Option<PathBuf>, domain: CompactDomain, weights: WeightsArg, ns: Vec<usize>, grid: GridResolution },
    Hypergraph { input: PathBuf },
    Combinatorial { input: PathBuf },
}

/// Settings shared by every command. A `-` path means standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub tol: f64,
    pub bracket: RadiusBracket,
    pub nats: bool,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Self { tol: 1e-9, bracket: RadiusBracket::default(), nats: false, csv: None, json: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub options: Options,
}

/// Parses `annulus:inner:outer`, `disk:radius` or `circle:radius`.
pub fn parse_domain(text: &str) -> Result<CompactDomain, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{s}` in domain `{text}`")));
    let domain = match parts.as_slice() {
        ["annulus", a, b] => CompactDomain::Annulus { inner: num(a)?, outer: num(b)? },
        ["disk", r] => CompactDomain::Disk { radius: num(r)? },
        ["circle", r] => CompactDomain::Circle { radius: num(r)? },
        _ => return Err(CliError::Usage(format!("unknown domain `{text}`; use annulus:a:b, disk:r or circle:r"))),
    };
    Ok(domain)
}

/// Parses `lo:hi` as a pair of radii.
pub fn parse_bracket(text: &str) -> Result<RadiusBracket, CliError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("radius bracket `{text}` is not lo:hi")))?;
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{s}` in radius bracket")));
    Ok(RadiusBracket::from_radii(num(lo)?, num(hi)?)?)
}

fn degeneration_of(input: &InputFile, tol: f64) -> Result<Degeneration, CliError> {
    match input {
        InputFile::Degeneration(d) => d.parts()?.build(tol),
        InputFile::Combinatorial(c) => Ok(from_combinatorial(&c.to_core()?)?.0),
        InputFile::Hypergraph(_) => Err(CliError::Usage("this command needs a degeneration, not a hypergraph".into())),
    }
}

/// `foo/out.csv` with suffix `baseline` gives `foo/out_baseline.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R], out: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    write_bytes(path, &buf, out)
}

fn write_json<T: Serialize>(path: &Path, value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data always serializes");
    text.push('\n');
    write_bytes(path, text.as_bytes(), out)
}

fn write_bytes(path: &Path, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    if is_stdout(path) {
        out.write_all(bytes)?;
    } else {
        File::create(path)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

impl Options {
    fn quiet(&self) -> bool {
        self.csv.as_deref().is_some_and(is_stdout) || self.json.as_deref().is_some_and(is_stdout)
    }
}

/// Runs a job, writing human-readable and `-` outputs to `out`.
pub fn run(job: &JobSpec, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = &job.options;
    match &job.command {
        Command::Validate { input } => validate_cmd(&read_input(input)?, opts, out),
        Command::Exponent { input, method, radius, modes } => {
            exponent_cmd(&read_input(input)?, *method, *radius, *modes, opts, out)
        }
        Command::FiniteN { input, ns, strategy, radius } => {
            let deg = degeneration_of(&read_input(input)?, opts.tol)?;
            let strategy = match strategy {
                StrategyArg::Roots => PointStrategy::FixedRadius(*radius),
                StrategyArg::Optimize => PointStrategy::OptimizeRadius,
                StrategyArg::Exchange => PointStrategy::OptimizeRadiusExchange,
            };
            let rows = finite_n_exponent_table_in(&deg, ns, strategy, opts.bracket)?;
            if !opts.quiet() {
                writeln!(out, "{:>6} {:>14} {:>18} {:>14}", "n", "radius", "log2_objective", "bits_per_copy")?;
                for r in &rows {
                    writeln!(out, "{:>6} {:>14.8} {:>18.8} {:>14.8}", r.n, r.radius, r.log2_objective, r.bits_per_copy)?;
                }
            }
            if let Some(path) = &opts.csv {
                write_csv(path, &rows, out)?;
            }
            if let Some(path) = &opts.json {
                write_json(path, &rows, out)?;
            }
            Ok(())
        }
        Command::Tradeoff { input, grid } => tradeoff_cmd(&read_input(input)?, *grid, opts, out),
        Command::Fekete { input, domain, weights, ns, grid } => {
            let input = input.as_deref().map(read_input).transpose()?;
            fekete_cmd(input.as_ref(), domain, *weights, ns, *grid, opts, out)
        }
        Command::Hypergraph { input } => {
            let InputFile::Hypergraph(h) = read_input(input)? else {
                return Err(CliError::Usage("`hypergraph` needs a hypergraph file".into()));
            };
            let h = h.to_core()?;
            let (pairs, exponent) = hypergraph_ghz_exponent(&h)?;
            let report = HypergraphReport { vertices: h.vertices(), edges: h.edges().len(), edge_connectivity: pairs, exponent };
            if !opts.quiet() {
                writeln!(out, "vertices           {}", report.vertices)?;
                writeln!(out, "edges              {}", report.edges)?;
                writeln!(out, "edge_connectivity  {}", report.edge_connectivity)?;
                writeln!(out, "exponent           {}", report.exponent)?;
            }
            if let Some(path) = &opts.json {
                write_json(path, &report, out)?;
            }
            Ok(())
        }
        Command::Combinatorial { input } => {
            let InputFile::Combinatorial(c) = read_input(input)? else {
                return Err(CliError::Usage("`combinatorial` needs a combinatorial file".into()));
            };
            let spec = c.to_core()?;
            let (deg, q) = from_combinatorial(&spec)?;
            let symmetric = if is_centrally_symmetric(&deg, 1e-6) {
                Some(symmetric_exponent_in(&deg, opts.bracket)?.value)
            } else {
                None
            };
            let report = CombinatorialReport { q, exponent: combinatorial_exponent(&spec)?, error_degree: deg.error_degree(), symmetric };
            if !opts.quiet() {
                writeln!(out, "q             {:.12}", report.q)?;
                writeln!(out, "exponent      {:.12}", report.exponent)?;
                writeln!(out, "error_degree  {}", report.error_degree)?;
                match report.symmetric {
                    Some(v) => writeln!(out, "symmetric     {v:.12}")?,
                    None => writeln!(out, "symmetric     n/a (norm not centrally symmetric)")?,
                }
            }
            if let Some(path) = &opts.json {
                write_json(path, &report, out)?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
struct HypergraphReport {
    vertices: usize,
    edges: usize,
    edge_connectivity: f64,
    exponent: f64,
}

#[derive(Debug, Serialize)]
struct CombinatorialReport {
    q: f64,
    exponent: f64,
    error_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetric: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ValidationJson {
    kind: &'static str,
    is_degeneration: bool,
    error_degree: usize,
    max_negative_residual: f64,
    constant_term_error: f64,
    has_positive_powers: bool,
    has_negative_powers: bool,
    nowhere_zero_min_grid_norm: f64,
    vanishing_factors: Vec<usize>,
}

impl ValidationJson {
    fn new(kind: &'static str, r: &ValidationReport) -> Self {
        Self {
            kind,
            is_degeneration: r.is_degeneration,
            error_degree: r.error_degree,
            max_negative_residual: r.max_negative_residual,
            constant_term_error: r.constant_term_error,
            has_positive_powers: r.has_positive_powers,
            has_negative_powers: r.has_negative_powers,
            nowhere_zero_min_grid_norm: r.nowhere_zero_min_grid_norm,
            vanishing_factors: r.vanishing_factors.clone(),
        }
    }
}

fn validate_cmd(input: &InputFile, opts: &Options, out: &mut dyn Write) -> Result<(), CliError> {
    let report = match input {
        InputFile::Degeneration(d) => d.parts()?.report(opts.tol)?,
        InputFile::Combinatorial(c) => from_combinatorial(&c.to_core()?)?.0.report(opts.tol),
        InputFile::Hypergraph(h) => {
            let h = h.to_core()?;
            if !h.is_connected() {
                return Err(degenex_core::Error::Disconnected.into());
            }
            if !opts.quiet() {
                writeln!(out, "kind      hypergraph")?;
                writeln!(out, "vertices  {}", h.vertices())?;
                writeln!(out, "edges     {}", h.edges().len())?;
            }
            return Ok(());
        }
    };
    if !opts.quiet() {
        writeln!(out, "kind                        {}", input.kind())?;
        writeln!(out, "is_degeneration             {}", report.is_degeneration)?;
        writeln!(out, "error_degree                {}", report.error_degree)?;
        writeln!(out, "max_negative_residual       {:.3e}", report.max_negative_residual)?;
        writeln!(out, "constant_term_error         {:.3e}", report.constant_term_error)?;
        writeln!(out, "has_negative_powers         {}", report.has_negative_powers)?;
        writeln!(out, "nowhere_zero_min_grid_norm  {:.6e}", report.nowhere_zero_min_grid_norm)?;
        if !report.vanishing_factors.is_empty() {
            writeln!(out, "vanishing_factors           {:?}", report.vanishing_factors)?;
        }
    }
    if let Some(path) = &opts.json {
        write_json(path, &ValidationJson::new(input.kind(), &report), out)?;
    }
    if report.is_degeneration {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "negative-power residual {:.3e}, constant-term error {:.3e} (tolerance {:.1e})",
            report.max_negative_residual, report.constant_term_error, opts.tol
        )))
    }
}

fn exponent_cmd(
    input: &InputFile,
    method: MethodArg,
    radius: f64,
    modes: usize,
    opts: &Options,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let result = if method == MethodArg::Combinatorial {
        let InputFile::Combinatorial(c) = input else {
            return Err(CliError::Usage("--method combinatorial needs a combinatorial file".into()));
        };
        ExponentResult { value: combinatorial_exponent(&c.to_core()?)?, method: ExponentMethod::Combinatorial, certificate: Default::default() }
    } else {
        let deg = degeneration_of(input, opts.tol)?;
        match method {
            MethodArg::Symmetric => symmetric_exponent_in(&deg, opts.bracket)?,
            MethodArg::NormMin => norm_min_lower_bound_in(&deg, opts.bracket),
            MethodArg::CircleAverage => circle_average_bound_in(&deg, opts.bracket),
            MethodArg::Fourier => fourier_circle_exponent(&deg, radius, modes)?,
            MethodArg::Measure => measure_exponent(&deg, &PlanarMeasure::uniform_circle(radius)?)?,
            MethodArg::Capacity => {
                let value = capacity_lower_bound(&deg, &PlanarMeasure::uniform_circle(radius)?, 512)?;
                ExponentResult { value, method: ExponentMethod::Capacity, certificate: Default::default() }
            }
            MethodArg::Combinatorial => unreachable!("handled above"),
        }
    };
    if !opts.quiet() {
        let name = serde_json::to_value(result.method).expect("enum serializes");
        writeln!(out, "method    {}", name.as_str().unwrap_or_default())?;
        writeln!(out, "exponent  {:.10}", result.value)?;
        if let Some(r) = result.certificate.radius {
            writeln!(out, "radius    {r:.10}")?;
        }
        if let Some([re, im]) = result.certificate.argmin {
            writeln!(out, "argmin    {re:.10} {im:+.10}i")?;
        }
        if let Some(d) = result.certificate.padded_degree {
            writeln!(out, "padded_degree  {d}")?;
        }
    }
    if let Some(path) = &opts.json {
        write_json(path, &result, out)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurveRow {
    #[serde(rename = "R")]
    rate: f64,
    r_bits: f64,
    method: &'static str,
}

fn tradeoff_cmd(input: &InputFile, grid: usize, opts: &Options, out: &mut dyn Write) -> Result<(), CliError> {
    if grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let deg = degeneration_of(input, opts.tol)?;
    let curve = SymmetricTradeoff::new(&deg)?.with_bracket(opts.bracket).curve(&rate_grid(grid))?;
    let rows = |points: &[degenex_core::tradeoff::RateExponentPoint]| -> Vec<CurveRow> {
        points
            .iter()
            .map(|p| CurveRow {
                rate: p.rate,
                r_bits: p.exponent,
                method: match p.method {
                    degenex_core::tradeoff::TradeoffMethod::SymmetricClosedForm => "symmetric_closed_form",
                    degenex_core::tradeoff::TradeoffMethod::FixedP => "fixed_p",
                    degenex_core::tradeoff::TradeoffMethod::TimeSharing => "time_sharing",
                },
            })
            .collect()
    };
    let (points, baseline) = (rows(&curve.points), rows(&curve.baseline));
    if !opts.quiet() && opts.csv.is_none() && opts.json.is_none() {
        writeln!(out, "{:>8} {:>14} {:>14}", "R", "r_bits", "baseline")?;
        for (p, b) in points.iter().zip(&baseline) {
            writeln!(out, "{:>8.4} {:>14.8} {:>14.8}", p.rate, p.r_bits, b.r_bits)?;
        }
    }
    if let Some(path) = &opts.csv {
        write_csv(path, &points, out)?;
        if !is_stdout(path) {
            write_csv(&sibling_path(path, "baseline"), &baseline, out)?;
        }
    }
    if let Some(path) = &opts.json {
        write_json(path, &curve, out)?;
    }
    Ok(())
}

#[derive(Debug)]
struct FeketeRow {
    n: usize,
    delta: f64,
    exchange_passes: usize,
    points: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
struct PointRow {
    n: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct FeketeJson<'a> {
    unit: &'static str,
    rows: Vec<FeketeJsonRow<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extrapolated_limit: Option<f64>,
}

#[derive(Debug, Serialize)]
struct FeketeJsonRow<'a> {
    n: usize,
    delta: f64,
    exchange_passes: usize,
    points: &'a [[f64; 2]],
}

fn fekete_cmd(
    input: Option<&InputFile>,
    domain: &CompactDomain,
    weights: WeightsArg,
    ns: &[usize],
    grid: GridResolution,
    opts: &Options,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let weights = match (weights, input) {
        (WeightsArg::Trivial, _) => WeightPair::trivial(),
        (WeightsArg::Norm, Some(input)) => WeightPair::from_norm_model(degeneration_of(input, opts.tol)?)?,
        (WeightsArg::Norm, None) => return Err(CliError::Usage("--weights norm needs an input file".into())),
    };
    let scale = if opts.nats { LN_2 } else { 1.0 };
    let unit = if opts.nats { "nats" } else { "bits" };
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let res = weighted_fekete(domain, &weights, n, grid)?;
        rows.push(FeketeRow {
            n,
            delta: res.delta_n * scale,
            exchange_passes: res.exchange_passes,
            points: res.points.points().iter().map(|z| [z.re, z.im]).collect(),
        });
    }
    let limit = if rows.len() >= 3 {
        let samples: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.delta)).collect();
        Some(extrapolate(&samples)?.limit)
    } else {
        None
    };
    if !opts.quiet() {
        writeln!(out, "{:>6} {:>14} {:>8}", "n", format!("delta_{unit}"), "passes")?;
        for r in &rows {
            writeln!(out, "{:>6} {:>14.8} {:>8}", r.n, r.delta, r.exchange_passes)?;
        }
        if let Some(limit) = limit {
            writeln!(out, "extrapolated limit: {limit:.8} {unit}")?;
        }
    }
    if let Some(path) = &opts.csv {
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["n", &format!("delta_{unit}"), "exchange_passes"])?;
            for r in &rows {
                w.write_record([r.n.to_string(), r.delta.to_string(), r.exchange_passes.to_string()])?;
            }
            w.flush()?;
        }
        write_bytes(path, &buf, out)?;
        if !is_stdout(path) {
            let points: Vec<PointRow> =
                rows.iter().flat_map(|r| r.points.iter().map(|p| PointRow { n: r.n, re: p[0], im: p[1] })).collect();
            write_csv(&sibling_path(path, "points"), &points, out)?;
        }
    }
    if let Some(path) = &opts.json {
        let json = FeketeJson {
            unit,
            rows: rows
                .iter()
                .map(|r| FeketeJsonRow { n: r.n, delta: r.delta, exchange_passes: r.exchange_passes, points: &r.points })
                .collect(),
            extrapolated_limit: limit,
        };
        write_json(path, &json, out)?;
    }
    Ok(())
}
