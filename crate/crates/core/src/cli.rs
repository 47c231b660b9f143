//! JSON-configured commands behind the `holifd` binary.
//!
//! Every command reads one [`RunConfig`], writes its tables into the output
//! directory and returns a short textual summary. CSV files start with a
//! `# config:` comment holding the resolved configuration, so a table can
//! always be regenerated from its own header.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::derive::{derive_projectors_with, verify_projector, AdjointProblem, GammaSeries, TangentSeries};
use crate::diagnostics::{compare_ic_strategies, moment_evolution, CompareConfig, CompareReport, FitWindow, Strategy};
use crate::error::{HolifdError, Result};
use crate::grid::Grid;
use crate::initial::{InitialField, InitialFieldSpec, Profile};
use crate::model::{integrate, IntegrationConfig};
use crate::polyfield::PiecewiseField;
use crate::projector::{point_release_ic, project};
use crate::reference::{reference_solve, FineConfig};
use crate::subgrid::{reconstruct, ModelParams};

pub const THREADS_ENV: &str = "HOLIFD_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Exact projection vectors, their coefficient table and profile samples.
    Derive,
    /// Initial grid values from an initial field.
    Project,
    /// Model trajectory, optionally with the fine-grid oracle.
    Simulate,
    /// Moment time series and the fitted `dm2/dt`.
    Moments,
    /// Initial-condition strategies against the oracle over a resolution sweep.
    Compare,
    /// Subgrid fields of point releases.
    Reconstruct,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Project => "project",
            Command::Simulate => "simulate",
            Command::Moments => "moments",
            Command::Compare => "compare",
            Command::Reconstruct => "reconstruct",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holifd", version, about = "Holistic finite differences for Burgers' equation")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created when missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Enforce the command's acceptance checks; exit 1 on violation.
    #[arg(long)]
    pub check: bool,
}

/// Gaussian whose width and position follow the grid: `sigma = sigma_over_h h`,
/// centred at `x_k + eta h` with `k = m / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NarrowGaussian {
    #[serde(default = "narrow_sigma")]
    pub sigma_over_h: f64,
    #[serde(default = "half")]
    pub eta: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

impl NarrowGaussian {
    pub fn build(&self, grid: &Grid) -> InitialField {
        let centre = grid.centre(grid.m() / 2) + self.eta * grid.h();
        InitialField::profile(Profile::Gaussian {
            centre,
            sigma: self.sigma_over_h * grid.h(),
            mass: self.mass,
            background: 0.0,
        })
    }
}

impl Default for NarrowGaussian {
    fn default() -> Self {
        Self { sigma_over_h: narrow_sigma(), eta: half(), mass: one() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<usize>,
    /// Domain length; `m h` of the top-level grid when absent.
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default = "default_dt_factor")]
    pub dt_factor: f64,
    #[serde(default = "default_refinement")]
    pub fine_refinement: usize,
    /// Moment centre; the middle of the domain when absent.
    #[serde(default)]
    pub moment_centre: Option<f64>,
    /// Grid-following initial field. The top-level `initial` is used when absent.
    #[serde(default)]
    pub narrow_gaussian: Option<NarrowGaussian>,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            resolutions: default_resolutions(),
            length: None,
            dt_factor: default_dt_factor(),
            fine_refinement: default_refinement(),
            moment_centre: None,
            narrow_gaussian: Some(NarrowGaussian::default()),
        }
    }
}

/// Parameters of every command. Fields a command does not use are ignored
/// by it; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "one")]
    pub h: f64,
    #[serde(default)]
    pub origin: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    /// Model step; `h^2 / 8` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    /// Record every n-th model step (0: endpoints only).
    #[serde(default = "one_usize")]
    pub record_every: usize,
    /// Derivation order `l`, errors `O(gamma^l)`.
    #[serde(default = "default_order")]
    pub order: usize,
    /// Unlocks the unverified five-element order.
    #[serde(default)]
    pub allow_stretch: bool,
    /// A unit point release at the middle element when absent.
    #[serde(default)]
    pub initial: Option<InitialFieldSpec>,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    /// Element the moments are taken about; `m / 2` when absent.
    #[serde(default)]
    pub moment_element: Option<usize>,
    #[serde(default)]
    pub fit_window: FitWindow,
    /// Tolerance on `|dm2/dt - 2|` under `--check`.
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    #[serde(default = "default_samples")]
    pub samples_per_element: usize,
    /// Release offsets of `reconstruct`.
    #[serde(default = "default_releases")]
    pub releases: Vec<f64>,
    /// Also run the fine-grid oracle in `simulate`.
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub compare: CompareSection,
    /// Write SVG plots next to the CSV tables.
    #[serde(default)]
    pub svg: bool,
}

fn default_m() -> usize {
    32
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn one_usize() -> usize {
    1
}
fn narrow_sigma() -> f64 {
    0.125
}
fn default_t_final() -> f64 {
    2.0
}
fn default_order() -> usize {
    2
}
fn default_strategy() -> Strategy {
    Strategy::Holistic
}
fn default_slope_tolerance() -> f64 {
    1e-3
}
fn default_samples() -> usize {
    16
}
fn default_releases() -> Vec<f64> {
    vec![0.0, 0.25, 0.5]
}
fn default_resolutions() -> Vec<usize> {
    vec![16, 32, 64]
}
fn default_dt_factor() -> f64 {
    0.125
}
fn default_refinement() -> usize {
    crate::reference::DEFAULT_REFINEMENT
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HolifdError::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| HolifdError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.m, self.h, self.origin)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.a, self.gamma)
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(self.h * self.h / 8.0)
    }

    pub fn integration(&self) -> IntegrationConfig {
        IntegrationConfig { record_every: self.record_every, ..IntegrationConfig::new(self.dt(), self.t_final) }
    }

    pub fn moment_element(&self) -> usize {
        self.moment_element.unwrap_or(self.m / 2)
    }

    pub fn initial_field(&self, grid: &Grid) -> Result<InitialField> {
        match &self.initial {
            Some(spec) => spec.build(grid),
            None => Ok(InitialField::point(grid.m() / 2, 0.0, 1.0)),
        }
    }

    /// Checks the preconditions of `command` without running it.
    pub fn validate(&self, command: Command) -> Result<()> {
        let invalid = |msg: String| Err(HolifdError::InvalidConfig(msg));
        if command == Command::Derive {
            let cap = crate::derive::SUPPORTED_ORDER + usize::from(self.allow_stretch);
            if self.order == 0 || self.order > cap {
                return invalid(format!("order must be in 1..={cap}, got {}", self.order));
            }
            return Ok(());
        }
        let grid = self.grid()?;
        self.params()?;
        if self.samples_per_element == 0 {
            return invalid("samples_per_element must be positive".into());
        }
        match command {
            Command::Derive | Command::Project => {}
            Command::Simulate | Command::Moments => {
                self.integration().validate(&grid)?;
                if self.moment_element() >= self.m {
                    return invalid(format!("moment_element {} outside 0..{}", self.moment_element(), self.m));
                }
            }
            Command::Compare => {
                let c = &self.compare;
                if c.resolutions.is_empty() || c.resolutions.iter().any(|&m| m < 4) {
                    return invalid("compare.resolutions must hold element counts of at least 4".into());
                }
                if !(self.t_final.is_finite() && self.t_final > 0.0) {
                    return invalid(format!("t_final must be positive, got {}", self.t_final));
                }
                if c.fine_refinement == 0 || c.fine_refinement % 2 == 1 {
                    return invalid(format!("compare.fine_refinement must be even, got {}", c.fine_refinement));
                }
            }
            Command::Reconstruct => {
                if self.releases.is_empty() || self.releases.iter().any(|e| !(-0.5..=0.5).contains(e)) {
                    return invalid("releases must be offsets in [-1/2, 1/2]".into());
                }
            }
        }
        Ok(())
    }

    fn header(&self, command: Command) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        format!("# holifd {}\n# config: {json}\n", command.name())
    }

    fn compare_config(&self) -> CompareConfig {
        let length = self.compare.length.unwrap_or(self.m as f64 * self.h);
        CompareConfig {
            length,
            resolutions: self.compare.resolutions.clone(),
            t_final: self.t_final,
            dt_factor: self.compare.dt_factor,
            fine_refinement: self.compare.fine_refinement,
            moment_centre: self.compare.moment_centre.unwrap_or(0.5 * length),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Run(HolifdError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) | CliError::Run(_) => 1,
        }
    }
}

impl From<HolifdError> for CliError {
    fn from(e: HolifdError) -> Self {
        match e {
            HolifdError::InvalidConfig(_) | HolifdError::Unstable { .. } | HolifdError::GridMismatch(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Run(other),
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    fn write(&mut self, dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

/// Sizes the global rayon pool from `HOLIFD_THREADS` when set.
pub fn configure_threads() -> std::result::Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a pool built earlier in the process wins; that is fine for repeated calls
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Loads the configuration and runs the command.
pub fn execute(cli: &Cli) -> std::result::Result<Outcome, CliError> {
    let cfg = RunConfig::load(&cli.config)?;
    run(cli.command, &cfg, &cli.out, cli.check)
}

pub fn run(command: Command, cfg: &RunConfig, out: &Path, check: bool) -> std::result::Result<Outcome, CliError> {
    cfg.validate(command)?;
    fs::create_dir_all(out).map_err(HolifdError::from)?;
    let mut outcome = Outcome::default();
    let failures = match command {
        Command::Derive => cmd_derive(cfg, out, &mut outcome)?,
        Command::Project => cmd_project(cfg, out, &mut outcome)?,
        Command::Simulate => cmd_simulate(cfg, out, &mut outcome)?,
        Command::Moments => cmd_moments(cfg, out, &mut outcome)?,
        Command::Compare => cmd_compare(cfg, out, &mut outcome)?,
        Command::Reconstruct => cmd_reconstruct(cfg, out, &mut outcome)?,
    };
    if check && !failures.is_empty() {
        return Err(CliError::Check(failures.join("; ")));
    }
    Ok(outcome)
}

type Failures = Vec<String>;

fn cmd_derive(cfg: &RunConfig, out: &Path, outcome: &mut Outcome) -> Result<Failures> {
    let problem = AdjointProblem::diffusive();
    let e = TangentSeries::from_subgrid(problem.clone())?;
    let z = derive_projectors_with(cfg.order, &e, cfg.allow_stretch)?;
    let report = verify_projector(&z, &e, z.order() - 1)?;
    let table = z.coefficient_table();
    outcome.write(out, "projectors.json", serde_json::to_string_pretty(&z.to_json())?.as_bytes())?;
    outcome.write(out, "coefficients.txt", table.as_bytes())?;

    let mut csv = cfg.header(Command::Derive);
    csv += "x_over_h";
    for n in 0..z.order() {
        write!(csv, ",order_{}", n + 1).unwrap();
    }
    csv.push('\n');
    let rows = z.figure_data(cfg.samples_per_element);
    for row in &rows {
        csv += &row.iter().map(|v| format!("{v:.15e}")).collect::<Vec<_>>().join(",");
        csv.push('\n');
    }
    outcome.write(out, "figure.csv", csv.as_bytes())?;
    if cfg.svg {
        let series: Vec<Series> = (0..z.order())
            .map(|n| Series { label: format!("order {}", n + 1), points: rows.iter().map(|r| (r[0], r[n + 1])).collect() })
            .collect();
        outcome.write(out, "figure.svg", svg_plot("projection vector at full coupling", "(x - x_j)/h", "z_j", &series, false).as_bytes())?;
    }

    let mut failures = Vec::new();
    if !report.is_exact() {
        failures.push(format!("verification defects:\n{report}"));
    }
    let golden = match z.order() {
        1 => Some(GammaSeries::new(problem.clone(), vec![PiecewiseField::characteristic(problem.m(), problem.h().clone(), problem.centre())])),
        2 => Some(GammaSeries::closed_form_order_two(problem)),
        _ => None,
    };
    match golden {
        Some(g) if g != z => failures.push(format!("order {} series differs from the closed form", z.order())),
        Some(_) => outcome.note(format!("order {} series equals the closed form exactly", z.order())),
        None => outcome.note(format!("order {} has no closed form; verification only", z.order())),
    }
    outcome.note(format!("verification: {} checks, {} defects", report.entries().len(), report.defects().count()));
    outcome.note(table);
    Ok(failures)
}

fn cmd_project(cfg: &RunConfig, out: &Path, outcome: &mut Outcome) -> Result<Failures> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let u0 = cfg.initial_field(&grid)?;
    let state = match cfg.strategy {
        Strategy::Holistic => {
            let pr = project(&u0, &p, &grid)?;
            outcome.note(format!("projection converged in {} iterations (update {:.3e})", pr.iterations, pr.residual));
            pr.state
        }
        s => s.initial_state(&u0, &p, &grid)?,
    };
    let mut csv = cfg.header(Command::Project);
    csv += "j,x,u\n";
    for j in 0..grid.m() {
        writeln!(csv, "{j},{:.12e},{:.15e}", grid.centre(j), state[j]).unwrap();
    }
    outcome.write(out, "projected.csv", csv.as_bytes())?;
    let mass: f64 = state.values().iter().sum::<f64>() * grid.h();
    outcome.note(format!("{} initial state, mass {mass:.15e}", cfg.strategy.name()));
    Ok(Vec::new())
}

fn cmd_simulate(cfg: &RunConfig, out: &Path, outcome: &mut Outcome) -> Result<Failures> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let u0 = cfg.initial_field(&grid)?;
    let start = cfg.strategy.initial_state(&u0, &p, &grid)?;
    let traj = integrate(&start, &p, &grid, &cfg.integration(), |_, _| {})?;
    let mut buf = cfg.header(Command::Simulate).into_bytes();
    traj.write_csv(&mut buf)?;
    outcome.write(out, "trajectory.csv", &buf)?;
    outcome.note(format!("{} model steps recorded up to t = {}", traj.times.len(), cfg.t_final));
    if cfg.oracle {
        let fine = reference_solve(&u0, &grid, &FineConfig::new(cfg.a, cfg.t_final))?;
        let mut buf = cfg.header(Command::Simulate).into_bytes();
        fine.write_csv(&mut buf)?;
        outcome.write(out, "oracle.csv", &buf)?;
        outcome.note(format!("oracle on {} fine points", fine.points()));
    }
    Ok(Vec::new())
}

fn cmd_moments(cfg: &RunConfig, out: &Path, outcome: &mut Outcome) -> Result<Failures> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let u0 = cfg.initial_field(&grid)?;
    let start = cfg.strategy.initial_state(&u0, &p, &grid)?;
    let report = moment_evolution(&start, &p, &grid, &cfg.integration(), cfg.moment_element(), cfg.fit_window)?;
    let mut buf = cfg.header(Command::Moments).into_bytes();
    report.write_csv(&mut buf)?;
    outcome.write(out, "moments.csv", &buf)?;
    if cfg.svg {
        let series = vec![Series { label: "m2".into(), points: report.times.iter().copied().zip(report.m2.iter().copied()).collect() }];
        outcome.write(out, "moments.svg", svg_plot("second moment", "t", "m2", &series, false).as_bytes())?;
    }
    let drift = |s: &[f64]| s.iter().map(|v| (v - s[0]).abs()).fold(0.0, f64::max);
    let (m0_drift, m1_drift) = (drift(&report.m0), drift(&report.m1));
    outcome.note(format!("m2(0) = {:.15e}", report.m2[0]));
    outcome.note(format!("dm2/dt = {:.12e}", report.slope));
    outcome.note(format!("max drift: m0 {m0_drift:.3e}, m1 {m1_drift:.3e}"));

    let mut failures = Vec::new();
    if (report.slope - 2.0).abs() > cfg.slope_tolerance {
        failures.push(format!("dm2/dt = {} outside 2 +- {}", report.slope, cfg.slope_tolerance));
    }
    if cfg.a == 0.0 && m0_drift > 1e-10 {
        failures.push(format!("m0 drifted by {m0_drift:e}"));
    }
    Ok(failures)
}

fn cmd_compare(cfg: &RunConfig, out: &Path, outcome: &mut Outcome) -> Result<Failures> {
    let p = cfg.params()?;
    let cc = cfg.compare_config();
    let report = match &cfg.compare.narrow_gaussian {
        Some(g) => compare_ic_strategies(|grid: &Grid| Ok(g.build(grid)), &p, &cc)?,
        None => compare_ic_strategies(|grid: &Grid| cfg.initial_field(grid), &p, &cc)?,
    };
    let mut buf = cfg.header(Command::Compare).into_bytes();
    report.write_csv(&mut buf)?;
    outcome.write(out, "compare.csv", &buf)?;
    let mut buf = cfg.header(Command::Compare).into_bytes();
    report.write_orders_csv(&mut buf)?;
    outcome.write(out, "orders.csv", &buf)?;
    if cfg.svg {
        let series: Vec<Series> = Strategy::ALL
            .iter()
            .map(|&s| Series {
                label: s.name().into(),
                points: report.rows.iter().filter(|r| r.strategy == s).map(|r| (r.h, r.l2_error)).collect(),
            })
            .collect();
        outcome.write(out, "compare.svg", svg_plot("L2 error at the final time", "h", "error", &series, true).as_bytes())?;
    }
    for o in &report.orders {
        outcome.note(format!("{:<16} L2 order {:>7.3}, moment order {:>7.3}", o.strategy.name(), o.l2, o.moment));
    }
    Ok(compare_failures(&report))
}

/// Holistic beats grid sampling in `L2` at every resolution and converges
/// at least one order faster on the moments.
pub fn compare_failures(report: &CompareReport) -> Failures {
    let mut failures = Vec::new();
    for row in report.rows.iter().filter(|r| r.strategy == Strategy::Holistic) {
        if let Some(naive) = report.row(Strategy::GridSample, row.m) {
            if !(row.l2_error < naive.l2_error) {
                failures.push(format!("m = {}: holistic error {:e} not below grid sampling {:e}", row.m, row.l2_error, naive.l2_error));
            }
        }
    }
    if let (Some(h), Some(n)) = (report.order(Strategy::Holistic), report.order(Strategy::GridSample)) {
        if !(h.moment - n.moment >= 1.0) {
            failures.push(format!("moment orders holistic {:.3} vs grid sampling {:.3}", h.moment, n.moment));
        }
    }
    failures
}

fn cmd_reconstruct(cfg: &RunConfig, out: &Path, outcome: &mut Outcome) -> Result<Failures> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let k = cfg.moment_element();
    let curves: Vec<Vec<(f64, f64)>> = cfg
        .releases
        .iter()
        .map(|&eta| {
            let u = if p.a == 0.0 {
                point_release_ic(k, eta, 1.0, &grid)?
            } else {
                project(&InitialField::point(k, eta, 1.0), &p, &grid)?.state
            };
            reconstruct(&u, &p, &grid, cfg.samples_per_element)
        })
        .collect::<Result<_>>()?;
    let mut csv = cfg.header(Command::Reconstruct);
    csv += "x";
    for eta in &cfg.releases {
        write!(csv, ",v_eta_{eta}").unwrap();
    }
    csv.push('\n');
    for i in 0..curves[0].len() {
        write!(csv, "{:.12e}", curves[0][i].0).unwrap();
        for c in &curves {
            write!(csv, ",{:.15e}", c[i].1).unwrap();
        }
        csv.push('\n');
    }
    outcome.write(out, "reconstruct.csv", csv.as_bytes())?;
    if cfg.svg {
        let near = |x: f64| (x - grid.centre(k)).abs() <= 3.0 * grid.h();
        let series: Vec<Series> = cfg
            .releases
            .iter()
            .zip(&curves)
            .map(|(eta, c)| Series { label: format!("eta = {eta}"), points: c.iter().copied().filter(|(x, _)| near(*x)).collect() })
            .collect();
        outcome.write(out, "reconstruct.svg", svg_plot("subgrid field of a point release", "x", "v", &series, false).as_bytes())?;
    }
    outcome.note(format!("{} releases about element {k}", cfg.releases.len()));
    Ok(Vec::new())
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

/// Minimal line plot; with `log` both axes are base-10 logarithmic.
fn svg_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log: bool) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 60.0;
    const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    const DASHES: [&str; 4] = ["8 3 2 3", "6 4", "none", "2 2"];
    let tf = |v: f64| if log { v.max(f64::MIN_POSITIVE).log10() } else { v };
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().map(|&(x, y)| (tf(x), tf(y)))).collect();
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            (lo - 0.5, lo + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let sx = |x: f64| PAD + (tf(x) - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (tf(y) - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let axis = |v: f64| if log { format!("1e{v:.2}") } else { format!("{v:.3}") };

    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n");
    writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    writeln!(s, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{title}</text>", W / 2.0).unwrap();
    writeln!(s, "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>", W - 2.0 * PAD, H - 2.0 * PAD).unwrap();
    writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{xlabel}</text>", W / 2.0, H - 15.0).unwrap();
    writeln!(s, "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">{ylabel}</text>", H / 2.0, H / 2.0).unwrap();
    for (v, x, y, anchor) in [
        (x0, PAD, H - PAD + 16.0, "start"),
        (x1, W - PAD, H - PAD + 16.0, "end"),
        (y0, PAD - 4.0, H - PAD, "end"),
        (y1, PAD - 4.0, PAD + 10.0, "end"),
    ] {
        writeln!(s, "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\">{}</text>", axis(v)).unwrap();
    }
    for (i, ser) in series.iter().enumerate() {
        let path: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let colour = COLOURS[i % COLOURS.len()];
        let dash = DASHES[i % DASHES.len()];
        writeln!(s, "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" stroke-dasharray=\"{dash}\" points=\"{}\"/>", path.join(" ")).unwrap();
        let ly = PAD + 16.0 + 16.0 * i as f64;
        writeln!(s, "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{colour}\" stroke-dasharray=\"{dash}\"/>", W - PAD - 130.0, W - PAD - 100.0).unwrap();
        writeln!(s, "<text x=\"{}\" y=\"{}\">{}</text>", W - PAD - 95.0, ly + 4.0, ser.label).unwrap();
    }
    s += "</svg>\n";
    s
}

/// Entry point of the binary: returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let result = configure_threads().and_then(|_| execute(cli));
    match result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            for line in &outcome.summary {
                let _ = writeln!(stdout, "{line}");
            }
            for f in &outcome.files {
                log::info!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("holifd {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
