//! Subcommands of `weyllab`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use weyllab_core::counting::{count_series, omega_probe, SeriesKind};
use weyllab_core::diophantine::{box_search, AlignmentProblem};
use weyllab_core::heat::{fit_heat_coefficients, geometric_grid, heat_samples};
use weyllab_core::hyperbolic::{
    conj_classes, geodesic_growth, orbit_enumerate, s_growth_from_orbit, Complex64, GroupPresentation,
    DEFAULT_ORBIT_CAP,
};
use weyllab_core::models::DEFAULT_ENUM_CAP;
use weyllab_core::smoothing::{
    k_geodesic_torus, k_leading, k_spectral, k_tilde_spectral, LeadingTermModel, TransformParams,
};
use weyllab_core::{Error, ManifoldModel, Result};

use crate::acceptance;
use crate::config::Config;
use crate::output::{float, Csv};

#[derive(Debug, Parser)]
#[command(name = "weyllab", version, about = "Spectral remainders, wave transforms, heat traces and hyperbolic orbit sums")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "WEYLLAB_THREADS")]
    pub threads: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues with multiplicities up to a frequency cutoff.
    Spectrum(SpectrumArgs),
    /// Counting function N, N_x or N_xy at every jump.
    Count(CountArgs),
    /// Weyl remainder R, R_x or the oscillatory remainder at every jump.
    Remainder(CountArgs),
    /// Running-sup exponent probe of a counting remainder.
    Probe(ProbeArgs),
    /// Spectral and geometric sides of the smoothed wave transform.
    Pretrace(PretraceArgs),
    /// Heat trace or diagonal heat kernel, with optional coefficient fit.
    Heat(HeatArgs),
    /// Orbit counts and S(T) for a Fuchsian group.
    Orbit(OrbitArgs),
    /// Closed-geodesic counts and sums.
    Geodesics(GeodesicArgs),
    /// Simultaneous phase alignment search.
    Boxsearch(BoxArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model definition (JSON).
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub lmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    N,
    NX,
    NXy,
    R,
    RX,
    ROsc,
}

impl Kind {
    fn series(self) -> SeriesKind {
        match self {
            Kind::N => SeriesKind::NGlobal,
            Kind::NX => SeriesKind::NX,
            Kind::NXy => SeriesKind::NXy,
            Kind::R => SeriesKind::RGlobal,
            Kind::RX => SeriesKind::RX,
            Kind::ROsc => SeriesKind::ROsc,
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub lmax: f64,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub y: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub count: CountArgs,
    /// Exponent a in sup |R|/λ^a.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct PretraceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "T")]
    pub t: f64,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub y: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long, default_value_t = 16)]
    pub count: usize,
    /// Spectrum cutoff (default from tmin).
    #[arg(long)]
    pub lmax: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    /// Fit coefficients c_0..c_J.
    #[arg(long)]
    pub fit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 4.0)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.25)]
    pub tstep: f64,
    #[arg(long, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Group preset (JSON).
    #[arg(long)]
    pub group: PathBuf,
    /// Base point x as re,im.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub y: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub group: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct BoxArgs {
    /// Radii, one per line or comma separated.
    #[arg(long)]
    pub radii: PathBuf,
    #[arg(long = "Y")]
    pub y: f64,
    #[arg(long = "M1", default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1e7)]
    pub budget: f64,
    /// Multiplies the upper end of [M1, M1·Y^N].
    #[arg(long, default_value_t = 1.0)]
    pub extend: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "primary")]
    pub suite: String,
    /// Criterion numbers to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<usize>>,
}

/// What a command produced: text for the output and whether verification passed.
pub struct Outcome {
    pub text: String,
    pub verified: bool,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Outcome { text, verified: true }
    }
}

pub fn execute(cli: &Cli, cfg: &Config) -> Result<Outcome> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Spectrum(a) => spectrum(a, json).map(Into::into),
        Command::Count(a) => count(a, json, false).map(Into::into),
        Command::Remainder(a) => count(a, json, true).map(Into::into),
        Command::Probe(a) => probe(a, json).map(Into::into),
        Command::Pretrace(a) => pretrace(a, cfg).map(Into::into),
        Command::Heat(a) => heat(a, json).map(Into::into),
        Command::Orbit(a) => orbit(a, cfg, json).map(Into::into),
        Command::Geodesics(a) => geodesics(a, cfg, json).map(Into::into),
        Command::Boxsearch(a) => boxsearch(a).map(Into::into),
        Command::Verify(a) => verify(a, json),
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn load_model(a: &ModelArgs) -> Result<ManifoldModel> {
    ManifoldModel::from_json(&read(&a.model)?)
}

fn load_group(path: &PathBuf) -> Result<GroupPresentation> {
    GroupPresentation::from_json(&read(path)?)
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Config(format!("serialization: {e}")))
}

fn point(model: &ManifoldModel, c: &Option<Vec<f64>>) -> Result<weyllab_core::Point> {
    match c {
        Some(c) => model.point(c),
        None => Ok(model.base_point()),
    }
}

#[derive(Serialize)]
struct LevelRow {
    eigenvalue: f64,
    sqrt_eigenvalue: f64,
    multiplicity: u64,
}

fn spectrum(a: &SpectrumArgs, json: bool) -> Result<String> {
    let model = load_model(&a.model)?;
    let s = model.spectrum(a.lmax)?;
    if json {
        let rows: Vec<LevelRow> = s
            .levels
            .iter()
            .map(|l| LevelRow {
                eigenvalue: l.eigenvalue,
                sqrt_eigenvalue: l.sqrt_eigenvalue,
                multiplicity: l.multiplicity,
            })
            .collect();
        return to_json(&rows);
    }
    let mut csv = Csv::new(&["eigenvalue", "sqrt_eigenvalue", "multiplicity"]);
    for l in &s.levels {
        csv.row(&[float(l.eigenvalue), float(l.sqrt_eigenvalue), l.multiplicity.to_string()]);
    }
    Ok(csv.finish())
}

fn series_kind(a: &CountArgs, remainder: bool) -> Result<SeriesKind> {
    let kind = a.kind.unwrap_or(match (remainder, a.x.is_some(), a.y.is_some()) {
        (false, _, true) => Kind::NXy,
        (false, true, false) => Kind::NX,
        (false, false, false) => Kind::N,
        (true, true, _) => Kind::RX,
        (true, false, _) => Kind::R,
    });
    let is_rem = matches!(kind, Kind::R | Kind::RX | Kind::ROsc);
    if is_rem != remainder {
        return Err(Error::Config(format!(
            "kind {kind:?} belongs to `{}`",
            if is_rem { "remainder" } else { "count" }
        )));
    }
    Ok(kind.series())
}

#[derive(Serialize)]
struct SeriesJson {
    kind: &'static str,
    lambda_max: f64,
    /// (λ, left limit, value) at each jump.
    jumps: Vec<(f64, f64, f64)>,
}

fn count(a: &CountArgs, json: bool, remainder: bool) -> Result<String> {
    let model = load_model(&a.model)?;
    let kind = series_kind(a, remainder)?;
    let x = point(&model, &a.x)?;
    let y = a.y.as_ref().map(|c| model.point(c)).transpose()?;
    let s = count_series(&model, &x, y.as_ref(), a.lmax, kind)?;
    let edges = s.edge_samples();
    if json {
        return to_json(&SeriesJson {
            kind: kind.name(),
            lambda_max: a.lmax,
            jumps: edges,
        });
    }
    let mut csv = Csv::new(&["lambda", "left", "right"]);
    for (l, left, right) in edges {
        csv.floats(&[l, left, right]);
    }
    Ok(csv.finish())
}

fn probe(a: &ProbeArgs, json: bool) -> Result<String> {
    let remainder = !matches!(a.count.kind, Some(Kind::N | Kind::NX | Kind::NXy));
    let model = load_model(&a.count.model)?;
    let kind = series_kind(&a.count, remainder)?;
    let x = point(&model, &a.count.x)?;
    let y = a.count.y.as_ref().map(|c| model.point(c)).transpose()?;
    let s = count_series(&model, &x, y.as_ref(), a.count.lmax, kind)?;
    let window = a.window.as_deref().map(|w| pair(w, "window")).transpose()?;
    let r = omega_probe(&s, a.a, window)?;
    if json {
        return to_json(&r);
    }
    let mut csv = Csv::new(&["lambda", "running_sup"]);
    for (l, v) in &r.running_sup {
        csv.floats(&[*l, *v]);
    }
    Ok(csv.finish())
}

fn params(lambda: f64, t: f64, cfg: &Config) -> Result<TransformParams> {
    let mut p = TransformParams::new(lambda, t)?;
    if let Some(s) = cfg.psi.s_max {
        p = p.with_s_max(s)?;
    }
    if let Some(q) = cfg.quad.tol {
        p = p.with_quad_tol(q);
    }
    if let Some(t) = cfg.tail.tol {
        p = p.with_tail_tol(t);
    }
    Ok(p)
}

fn pretrace(a: &PretraceArgs, cfg: &Config) -> Result<String> {
    let model = load_model(&a.model)?;
    if a.lambdas.is_empty() {
        return Err(Error::Config("--lambdas is empty".into()));
    }
    let x = point(&model, &a.x)?;
    let y = match &a.y {
        Some(c) => model.point(c)?,
        None => x.clone(),
    };
    let n = model.dim();
    let leading = cfg.q.get(n).map(|q| LeadingTermModel::new(n, Some(q))).transpose()?;
    let top = a.lambdas.iter().copied().fold(0.0, f64::max);
    let spec = model.spectrum(params(top, a.t, cfg)?.required_lambda_max(&model))?;
    let mut csv = Csv::new(&["lambda", "k_spectral", "K_geodesic", "k_tilde", "K_leading_sum"]);
    for &lambda in &a.lambdas {
        let p = params(lambda, a.t, cfg)?;
        let ks = k_spectral(&model, &spec, &x, &y, &p)?.value;
        let (kg, kl) = match &model {
            ManifoldModel::Torus(torus) => {
                let kg = k_geodesic_torus(torus, &x, &y, &p)?;
                let kl = match &leading {
                    Some(m) => {
                        let d = torus.translate_distances(x.coords(), y.coords(), a.t, DEFAULT_ENUM_CAP)?;
                        let mut s = 0.0;
                        for r in d.into_iter().filter(|&r| r > 1e-12) {
                            s += k_leading(m, r, 1.0, &p)?;
                        }
                        s
                    }
                    None => f64::NAN,
                };
                (kg, kl)
            }
            ManifoldModel::Sphere(_) => (f64::NAN, f64::NAN),
        };
        let kt = if x == y {
            k_tilde_spectral(&model, &spec, &x, &p)?.value
        } else {
            f64::NAN
        };
        csv.floats(&[lambda, ks, kg, kt, kl]);
    }
    Ok(csv.finish())
}

#[derive(Serialize)]
struct HeatJson {
    samples: weyllab_core::heat::HeatSamples,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<weyllab_core::heat::HeatFit>,
}

fn heat(a: &HeatArgs, json: bool) -> Result<String> {
    let model = load_model(&a.model)?;
    if !(a.tmin > 0.0 && a.tmax > a.tmin) {
        return Err(Error::Config("need 0 < tmin < tmax".into()));
    }
    let lmax = a.lmax.unwrap_or_else(|| (80.0 / a.tmin).sqrt());
    let spec = model.spectrum(lmax)?;
    let x = a.x.as_ref().map(|c| model.point(c)).transpose()?;
    let grid = geometric_grid(a.tmin, a.tmax, a.count)?;
    let samples = heat_samples(&model, &spec, x.as_ref(), &grid)?;
    let fit = a.fit.map(|j| fit_heat_coefficients(&samples, model.dim(), j)).transpose()?;
    if json {
        return to_json(&HeatJson { samples, fit });
    }
    let mut csv = Csv::new(&["t", "value", "tail_bound"]);
    for i in 0..samples.t.len() {
        csv.floats(&[samples.t[i], samples.values[i], samples.tail_bounds[i]]);
    }
    Ok(csv.finish())
}

fn t_grid(g: &GridArgs) -> Result<Vec<f64>> {
    if !(g.tmin > 0.0 && g.tmax >= g.tmin && g.tstep > 0.0) {
        return Err(Error::Config("need 0 < tmin <= tmax and tstep > 0".into()));
    }
    let n = ((g.tmax - g.tmin) / g.tstep + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| g.tmin + g.tstep * i as f64).collect())
}

fn pair(v: &[f64], name: &str) -> Result<(f64, f64)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Config(format!("--{name} takes exactly two comma-separated values"))),
    }
}

fn window(g: &GridArgs) -> Result<Option<(f64, f64)>> {
    g.window.as_deref().map(|w| pair(w, "window")).transpose()
}

fn orbit(a: &OrbitArgs, cfg: &Config, json: bool) -> Result<String> {
    let group = load_group(&a.group)?;
    let grid = t_grid(&a.grid)?;
    let (xr, xi) = pair(&a.x, "x")?;
    let (yr, yi) = pair(&a.y, "y")?;
    let (x, y) = (Complex64::new(xr, xi), Complex64::new(yr, yi));
    let cap = a.grid.cap.or(cfg.cap).unwrap_or(DEFAULT_ORBIT_CAP);
    let tmax = *grid.last().unwrap();
    let orbit = orbit_enumerate(&group, x, y, tmax, cap)?;
    let rep = s_growth_from_orbit(&orbit, 2, 1.0, &grid, window(&a.grid)?, group.min_translation)?;
    if json {
        return to_json(&rep);
    }
    let mut csv = Csv::new(&["T", "count", "S"]);
    for i in 0..grid.len() {
        csv.row(&[float(grid[i]), rep.counts[i].to_string(), float(rep.s[i])]);
    }
    Ok(csv.finish())
}

fn geodesics(a: &GeodesicArgs, cfg: &Config, json: bool) -> Result<String> {
    let group = load_group(&a.group)?;
    let grid = t_grid(&a.grid)?;
    let cap = a.grid.cap.or(cfg.cap).unwrap_or(DEFAULT_ORBIT_CAP);
    let tmax = *grid.last().unwrap();
    let classes = conj_classes(&group, tmax, cap)?;
    let w = window(&a.grid)?.unwrap_or((grid[0], tmax));
    let rep = geodesic_growth(&classes, &grid, 1.0, 2, w)?;
    if json {
        return to_json(&rep);
    }
    let mut csv = Csv::new(&["T", "primitive_count", "geodesic_sum"]);
    for i in 0..grid.len() {
        csv.row(&[float(grid[i]), rep.primitive_counts[i].to_string(), float(rep.sums[i])]);
    }
    Ok(csv.finish())
}

fn parse_radii(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in text.split([',', '\n', '\r', ' ', '\t']).filter(|s| !s.is_empty()) {
        match tok.parse::<f64>() {
            Ok(v) => out.push(v),
            // a header line is allowed before any number
            Err(_) if out.is_empty() => continue,
            Err(_) => return Err(Error::Config(format!("bad radius `{tok}`"))),
        }
    }
    Ok(out)
}

fn boxsearch(a: &BoxArgs) -> Result<String> {
    let radii = parse_radii(&read(&a.radii)?)?;
    if !(a.budget >= 1.0 && a.extend >= 1.0) {
        return Err(Error::Config("need budget >= 1 and extend >= 1".into()));
    }
    let p = AlignmentProblem::new(&radii, a.y, a.m1)?.with_budget(a.budget as u64);
    let (lo, hi) = (p.lo, p.hi * a.extend);
    let r = box_search(&p.with_interval(lo, hi)?)?;
    to_json(&r)
}

fn verify(a: &VerifyArgs, json: bool) -> Result<Outcome> {
    if a.suite != "primary" {
        return Err(Error::Config(format!("unknown suite `{}`", a.suite)));
    }
    let ids = a.only.clone().unwrap_or_else(|| (1..=acceptance::CRITERIA).collect());
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::CRITERIA) {
        return Err(Error::Config(format!("no criterion {bad}")));
    }
    let results: Vec<_> = ids.iter().map(|&i| acceptance::run(i)).collect();
    let verified = results.iter().all(|r| r.passed);
    let text = if json {
        to_json(&results)?
    } else {
        let mut s = String::new();
        for r in &results {
            s.push_str(&r.line());
            s.push('\n');
        }
        s
    };
    Ok(Outcome { text, verified })
}
