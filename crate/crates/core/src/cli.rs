//! Command-line front end.
//!
//! Every subcommand prints a short table, writes its data as CSV (`--out`)
//! and a JSON summary `{config, results, checks}` next to it (or at
//! `--summary`). Exit status: 0 when every check passes, 1 when a numeric
//! check fails, 2 for usage and input errors.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::densities;
use crate::eigen::{self, Potential, StepPolicy};
use crate::error::{Error, Result};
use crate::grid::{Boundary, ComplexField, Domain, Grid1D, RadialGrid, RealField};
use crate::hydrogen;
use crate::interference::{self, SlitConfig};
use crate::momentum;
use crate::sampling;
use crate::synthesis::{self, WaveComponent};
use crate::table;

pub const SEED_ENV: &str = "QEDENS_SEED";

#[derive(Debug, Parser, Serialize)]
#[command(name = "qedens", version, about = "Energy-density diagnostics and Schrödinger solvers in atomic units")]
pub struct Cli {
    /// Seed for every random draw. Falls back to $QEDENS_SEED, then 42.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form hydrogen ground state: density profile and energy totals.
    Hydrogen(HydrogenArgs),
    /// Kinetic, potential and energy densities of a sampled field.
    Densities(DensitiesArgs),
    /// Plane-wave superposition with local momentum and energy fields.
    Synth(SynthArgs),
    /// Eigen-solve by inverse iteration and by energy minimization.
    Solve(SolveArgs),
    /// Point-slit interference pattern on a screen.
    Slits(SlitsArgs),
    /// Radial momentum amplitudes of an s-state.
    Momentum(MomentumArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Output {
    /// CSV data file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary file; defaults to the CSV path with a .json extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HydrogenArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub rmin: f64,
    #[arg(long, default_value_t = 40.0)]
    pub rmax: f64,
    /// Number of radial nodes.
    #[arg(short = 'n', long = "nodes", default_value_t = 4000)]
    pub n: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    InfiniteWell,
    Harmonic,
    FiniteBarrier,
    CoulombRadial,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PotentialArgs {
    #[arg(long, value_enum)]
    pub potential: Option<PotentialKind>,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Well or barrier width.
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub height: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center: f64,
    #[arg(long, default_value_t = 1.0)]
    pub charge: f64,
    /// Potential as a JSON record `{"kind": ..., ...}`, inline or `@file`.
    #[arg(long, conflicts_with_all = ["potential", "potential_csv"])]
    pub potential_json: Option<String>,
    /// Two-column `x,V` table, linearly interpolated.
    #[arg(long, conflicts_with = "potential")]
    pub potential_csv: Option<PathBuf>,
}

impl PotentialArgs {
    fn resolve(&self) -> Result<Option<Potential>> {
        if let Some(src) = &self.potential_json {
            return Ok(Some(serde_json::from_str(&inline_or_file(src)?)?));
        }
        if let Some(path) = &self.potential_csv {
            return Ok(Some(Potential::from_csv(&read_text(path)?)?));
        }
        Ok(self.potential.map(|kind| match kind {
            PotentialKind::InfiniteWell => Potential::InfiniteWell {
                width: self.width.unwrap_or(1.0),
            },
            PotentialKind::Harmonic => Potential::Harmonic { omega: self.omega },
            PotentialKind::FiniteBarrier => Potential::FiniteBarrier {
                height: self.height,
                width: self.width.unwrap_or(1.0),
                center: self.center,
            },
            PotentialKind::CoulombRadial => Potential::CoulombRadial { charge: self.charge },
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Unit Gaussian on [-10, 10].
    Gaussian,
    /// `e^{3ix}/√(2π)` on one period.
    PlaneWave,
    /// Two displaced Gaussians, one carrying momentum.
    Superposition,
    /// Hydrogen ground state on a radial grid with `V = −1/r`.
    Hydrogen,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensitiesArgs {
    /// Field table with columns `x, re[, im]`.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Built-in field used when --field is absent.
    #[arg(long, value_enum, default_value_t = Preset::Gaussian, conflicts_with = "field")]
    pub preset: Preset,
    /// Treat the field's x column as radius (s-state).
    #[arg(long)]
    pub radial: bool,
    /// Boundary policy of a tabulated line field.
    #[arg(long, default_value = "decaying")]
    pub boundary: Boundary,
    /// Energy used for `E|ψ|²`; defaults to the field's mean energy.
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// JSON array of `{re, im, p[, e]}` records, inline or `@file`.
    #[arg(long)]
    pub components: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = TAU, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(short = 'n', long = "nodes", default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value = "periodic")]
    pub boundary: Boundary,
    /// Evaluation time.
    #[arg(short = 't', long = "time", default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Simulated measurements for the component histogram.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    #[arg(short = 'n', long = "nodes")]
    pub n: Option<usize>,
    #[arg(long, default_value = "dirichlet-zero")]
    pub boundary: Boundary,
    /// Number of lowest states.
    #[arg(long, default_value_t = 1)]
    pub states: usize,
    /// Residual tolerance.
    #[arg(long, default_value_t = eigen::DEFAULT_RESIDUAL_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = eigen::MAX_ITERATIONS)]
    pub max_iter: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SlitsArgs {
    #[arg(long, default_value_t = 0.5)]
    pub wavelength: f64,
    /// Slit pitch.
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
    /// Slit-to-screen distance.
    #[arg(long, default_value_t = 2000.0)]
    pub distance: f64,
    /// Number of evenly spaced slits.
    #[arg(long, default_value_t = 2)]
    pub slits: usize,
    /// Explicit slit offsets (overrides --slits/--separation).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub positions: Option<Vec<f64>>,
    /// Per-slit amplitude weights.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
    /// Screen half-width; defaults to three fringe spacings.
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long, default_value_t = 6001)]
    pub samples: usize,
    /// Simulated particle detections.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentumArgs {
    /// Radial field table `r, psi`; hydrogen ground state when absent.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long, default_value_t = momentum::DEFAULT_RMIN)]
    pub rmin: f64,
    #[arg(long, default_value_t = momentum::DEFAULT_RMAX)]
    pub rmax: f64,
    #[arg(short = 'n', long = "nodes", default_value_t = momentum::DEFAULT_R_NODES)]
    pub n: usize,
    #[arg(long, default_value_t = momentum::DEFAULT_PMAX)]
    pub pmax: f64,
    #[arg(long, default_value_t = momentum::DEFAULT_P_SAMPLES)]
    pub p_samples: usize,
    #[command(flatten)]
    pub output: Output,
}

/// One entry of the summary's `checks` array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    /// `|value − target| ≤ tol`
    fn near(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            passed: (value - target).abs() <= tol,
            value,
            tolerance: tol,
        }
    }

    /// `|value| ≤ tol`
    fn small(name: &str, value: f64, tol: f64) -> Self {
        Self::near(name, value, 0.0, tol)
    }

    /// `value > threshold`
    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: value > threshold,
            value,
            tolerance: threshold,
        }
    }
}

/// Named columns written as CSV.
#[derive(Debug, Default)]
struct Columns {
    names: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl Columns {
    fn push(&mut self, name: impl Into<String>, data: Vec<f64>) {
        self.names.push(name.into());
        self.data.push(data);
    }

    fn to_csv(&self) -> String {
        let mut s = self.names.join(",");
        s.push('\n');
        let rows = self.data.first().map_or(0, Vec::len);
        for i in 0..rows {
            for (j, col) in self.data.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{:.16e}", col[i]);
            }
            s.push('\n');
        }
        s
    }
}

struct Outcome {
    results: Map<String, Value>,
    checks: Vec<Check>,
    columns: Columns,
}

impl Outcome {
    fn new() -> Self {
        Self {
            results: Map::new(),
            checks: Vec::new(),
            columns: Columns::default(),
        }
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn inline_or_file(src: &str) -> Result<String> {
    match src.strip_prefix('@') {
        Some(path) => read_text(Path::new(path)),
        None => Ok(src.to_string()),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(sampling::DEFAULT_SEED),
    }
}

/// Uniform line grid through the tabulated abscissae.
fn grid_from_abscissae(x: &[f64], boundary: Boundary) -> Result<Grid1D> {
    let n = x.len();
    if n < 2 {
        return Err(Error::domain("field", "need at least two rows"));
    }
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    for (i, xi) in x.iter().enumerate() {
        if (xi - (x[0] + i as f64 * h)).abs() > 1e-6 * h.abs() {
            return Err(Error::domain("field", format!("abscissae are not uniform at row {}", i + 1)));
        }
    }
    let xmax = if boundary == Boundary::Periodic { x[n - 1] + h } else { x[n - 1] };
    Grid1D::new(x[0], xmax, n, boundary)
}

fn real_parts(f: &ComplexField) -> Vec<f64> {
    f.values().iter().map(|v| v.re).collect()
}

fn imag_parts(f: &ComplexField) -> Vec<f64> {
    f.values().iter().map(|v| v.im).collect()
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn hydrogen_cmd(a: &HydrogenArgs) -> Result<Outcome> {
    let grid = RadialGrid::new(a.rmin, a.rmax, a.n)?;
    let prof = hydrogen::hydrogen_profile(&grid);
    let t = prof.totals();
    let h = grid.spacing();
    let r = prof.radii();

    let psi = ComplexField::on_radial(&grid, |r| Complex64::new((-r).exp() / PI.sqrt(), 0.0));
    let v = RealField::on_domain(&grid.clone().into(), |r, _| -1.0 / r);
    let numeric = densities::totals(&psi, &v, hydrogen::GROUND_ENERGY)?;

    // K changes sign where it first drops to or below zero
    let crossing = prof.k.windows(2).position(|w| w[0] > 0.0 && w[1] <= 0.0).map(|i| {
        let (a0, a1) = (prof.k[i], prof.k[i + 1]);
        r[i] + (r[i + 1] - r[i]) * a0 / (a0 - a1)
    });
    let i2 = grid.axis().nearest(2.0);
    let wrong_sign = r
        .iter()
        .zip(&prof.k)
        .enumerate()
        .filter(|(i, (r, k))| *i != i2 && ((**r < 2.0 && **k <= 0.0) || (**r > 2.0 && **k >= 0.0)))
        .count();
    let defect = prof.balance_defect();
    let mismatch = prof.local_energy_mismatch();
    let imin = (0..mismatch.len())
        .min_by(|&i, &j| mismatch[i].abs().total_cmp(&mismatch[j].abs()))
        .unwrap_or(0);

    let mut o = Outcome::new();
    let e_ev = hydrogen::hartree_to_ev(t.e);
    o.put("ke_total", t.ke);
    o.put("k_total", t.k);
    o.put("pe_total", t.pe);
    o.put("e_total_hartree", t.e);
    o.put("e_total_ev", e_ev);
    o.put("e_total_ev_display", format!("{e_ev:.4}"));
    o.put("norm2", t.norm2);
    o.put("ke_total_numeric", numeric.ke_total);
    o.put("k_total_numeric", numeric.k_total);
    o.put("surface_term", numeric.surface_term);
    o.put("k_zero_crossing", crossing);
    o.put("balance_defect_max", max_abs(defect.iter().copied()));
    o.put("balance_minimum_r", r[imin]);

    o.checks.push(Check::near("energy_ledger_ke", t.ke, 0.5, 1e-5));
    o.checks.push(Check::near("energy_ledger_pe", t.pe, -1.0, 1e-5));
    o.checks.push(Check::near("energy_ledger_e", t.e, -0.5, 1e-5));
    o.checks.push(Check::near("k_zero_crossing", crossing.unwrap_or(f64::NAN), 2.0, h));
    o.checks.push(Check::small("k_sign_pattern_violations", wrong_sign as f64, 0.0));
    o.checks.push(Check::small(
        "ke_k_total_agreement",
        numeric.ke_total - numeric.k_total,
        1e-5,
    ));
    o.checks.push(Check::small("surface_term", numeric.surface_term, 1e-8));
    o.checks.push(Check::above("pointwise_balance_failure", max_abs(defect.iter().copied()), 0.01));
    o.checks.push(Check::near("balance_minimum_near_r1", r[imin], 1.0, h));

    o.columns.push("r", r);
    o.columns.push("psi", prof.psi.clone());
    o.columns.push("ke", prof.ke.clone());
    o.columns.push("k", prof.k.clone());
    o.columns.push("pe", prof.pe.clone());
    o.columns.push("e_density", prof.e_density.clone());
    o.columns.push("balance_defect", defect);
    Ok(o)
}

fn gaussian(x: f64, x0: f64) -> f64 {
    PI.powf(-0.25) * (-(x - x0) * (x - x0) / 2.0).exp()
}

/// Field, potential and energy selected by the densities flags.
fn densities_input(a: &DensitiesArgs) -> Result<(ComplexField, Option<Potential>, Option<f64>)> {
    let potential = a.potential.resolve()?;
    if let Some(path) = &a.field {
        let rows = table::parse_numeric_table(&read_text(path)?, 2)?;
        let x = table::column(&rows, 0);
        let values: Vec<Complex64> = rows
            .iter()
            .map(|r| Complex64::new(r[1], r.get(2).copied().unwrap_or(0.0)))
            .collect();
        let domain: Domain = if a.radial {
            grid_from_abscissae(&x, Boundary::Decaying)?;
            RadialGrid::new(x[0], x[x.len() - 1], x.len())?.into()
        } else {
            grid_from_abscissae(&x, a.boundary)?.into()
        };
        return Ok((ComplexField::new(domain, values)?, potential, a.energy));
    }
    Ok(match a.preset {
        Preset::Gaussian => {
            let g = Grid1D::new(-10.0, 10.0, 2001, Boundary::Decaying)?;
            (ComplexField::on_line(&g, |x| Complex64::new(gaussian(x, 0.0), 0.0)), potential, a.energy)
        }
        Preset::PlaneWave => {
            let g = Grid1D::new(0.0, TAU, 4096, Boundary::Periodic)?;
            let f = ComplexField::on_line(&g, |x| Complex64::new(0.0, 3.0 * x).exp() / TAU.sqrt());
            (f, potential, a.energy)
        }
        Preset::Superposition => {
            let g = Grid1D::new(-12.0, 12.0, 2401, Boundary::Decaying)?;
            let f = ComplexField::on_line(&g, |x| {
                Complex64::new(0.0, 2.0 * x).exp() * (0.6 * gaussian(x, 1.0)) + 0.8 * gaussian(x, -1.0)
            })
            .normalized()?;
            (f, potential, a.energy)
        }
        Preset::Hydrogen => {
            let g = RadialGrid::new(1e-3, 40.0, 4000)?;
            let f = ComplexField::on_radial(&g, |r| Complex64::new((-r).exp() / PI.sqrt(), 0.0));
            (
                f,
                potential.or(Some(Potential::CoulombRadial { charge: 1.0 })),
                a.energy.or(Some(hydrogen::GROUND_ENERGY)),
            )
        }
    })
}

fn densities_cmd(a: &DensitiesArgs) -> Result<Outcome> {
    let (psi, potential, energy) = densities_input(a)?;
    let domain = psi.domain().clone();
    let v = match &potential {
        Some(p) => p.sample(&domain)?,
        None => RealField::constant(&domain, 0.0),
    };
    let first = densities::totals(&psi, &v, 0.0)?;
    let energy = energy.unwrap_or((first.ke_total + first.pe_total) / first.norm2);
    let rep = densities::totals(&psi, &v, energy)?;
    let prof = densities::density_profile(&psi, &v, energy)?;

    let mut o = Outcome::new();
    o.put("energy", energy);
    o.put("ke_total", rep.ke_total);
    o.put("k_total", rep.k_total);
    o.put("k_imag_total", rep.k_imag_total);
    o.put("pe_total", rep.pe_total);
    o.put("e_total", rep.e_total);
    o.put("surface_term", rep.surface_term);
    o.put("norm2", rep.norm2);
    o.put("potential", &potential);
    let pointwise = max_abs(prof.ke.iter().zip(&prof.k).map(|(a, b)| a - b));
    o.put("ke_k_pointwise_max", pointwise);

    o.checks.push(Check::small(
        "ke_k_total_agreement",
        rep.ke_total - rep.k_total - rep.surface_term,
        1e-5,
    ));
    if a.field.is_none() && a.preset == Preset::PlaneWave {
        o.checks.push(Check::small("plane_wave_pointwise_equality", pointwise, 1e-8));
    }

    let x = match &domain {
        Domain::Radial(g) => g.nodes(),
        other => other.axis().map(Grid1D::nodes).unwrap_or_default(),
    };
    o.columns.push(if a.radial || a.preset == Preset::Hydrogen && a.field.is_none() { "r" } else { "x" }, x);
    o.columns.push("psi_re", real_parts(&psi));
    o.columns.push("psi_im", imag_parts(&psi));
    o.columns.push("ke", prof.ke);
    o.columns.push("k", prof.k);
    o.columns.push("k_imag", prof.k_imag);
    o.columns.push("pe", prof.pe);
    o.columns.push("e_density", prof.e_density);
    Ok(o)
}

fn default_components() -> Vec<WaveComponent> {
    vec![
        WaveComponent::free(Complex64::new(0.5, 0.0), 1.0),
        WaveComponent::free(Complex64::new(0.2, -0.3), -2.0),
        WaveComponent::free(Complex64::new(0.1, 0.7), 4.0),
    ]
}

fn synth_cmd(a: &SynthArgs, seed: u64) -> Result<Outcome> {
    let comps = match &a.components {
        Some(src) => synthesis::parse_components(&inline_or_file(src)?)?,
        None => default_components(),
    };
    let grid = Grid1D::new(a.xmin, a.xmax, a.n, a.boundary)?;
    let psi = synthesis::superpose(&comps, &grid, a.t)?;
    let (pf, ef) = synthesis::local_fields(&comps, &grid, a.t)?;
    let fd = densities::local_momentum(&psi)?.remove(0);
    let fd_err = max_abs(pf.values().iter().zip(fd.values()).map(|(a, b)| (a - b).norm()));

    let mut o = Outcome::new();
    let records: Vec<synthesis::ComponentRecord> = comps.iter().map(Into::into).collect();
    o.put("components", &records);
    o.put("p_field_fd_max_error", fd_err);
    o.put("norm2", psi.norm2());
    if grid.is_periodic() {
        let recovered: Vec<[f64; 2]> = comps
            .iter()
            .map(|c| synthesis::project_amplitude(&psi, c.momentum, c.energy, a.t).map(|z| [z.re, z.im]))
            .collect::<Result<_>>()?;
        o.put("projected_amplitudes", recovered);
    }
    o.checks.push(Check::small("three_wave_fd_agreement", fd_err, 1e-6));
    if a.trials > 0 {
        let counts = synthesis::measurement_histogram(&comps, a.trials, seed)?;
        let total: u64 = counts.iter().sum();
        o.put("histogram", &counts);
        o.checks.push(Check::near("whole_detections", total as f64, a.trials as f64, 0.0));
    }

    o.columns.push("x", grid.nodes());
    o.columns.push("psi_re", real_parts(&psi));
    o.columns.push("psi_im", imag_parts(&psi));
    o.columns.push("p_re", real_parts(&pf));
    o.columns.push("p_im", imag_parts(&pf));
    o.columns.push("e_re", real_parts(&ef));
    o.columns.push("e_im", imag_parts(&ef));
    o.columns.push("p_fd_re", real_parts(&fd));
    o.columns.push("p_fd_im", imag_parts(&fd));
    Ok(o)
}

/// Grid for a solve: radial for Coulomb, otherwise a line.
fn solve_domain(a: &SolveArgs, potential: &Potential) -> Result<Domain> {
    Ok(match potential {
        Potential::CoulombRadial { .. } => RadialGrid::new(
            a.xmin.unwrap_or(momentum::DEFAULT_RMIN),
            a.xmax.unwrap_or(momentum::DEFAULT_RMAX),
            a.n.unwrap_or(momentum::DEFAULT_R_NODES),
        )?
        .into(),
        Potential::InfiniteWell { width } => {
            let lo = a.xmin.unwrap_or(0.0);
            Grid1D::new(lo, a.xmax.unwrap_or(lo + width), a.n.unwrap_or(2000), a.boundary)?.into()
        }
        Potential::CustomSamples { x, .. } => Grid1D::new(
            a.xmin.unwrap_or(x[0]),
            a.xmax.unwrap_or(x[x.len() - 1]),
            a.n.unwrap_or(2000),
            a.boundary,
        )?
        .into(),
        _ => Grid1D::new(a.xmin.unwrap_or(-10.0), a.xmax.unwrap_or(10.0), a.n.unwrap_or(2000), a.boundary)?.into(),
    })
}

/// Methods agree when both converge and energies match within this.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;

fn solve_cmd(a: &SolveArgs, seed: u64) -> Result<Outcome> {
    let potential = a
        .potential
        .resolve()?
        .unwrap_or(Potential::Harmonic { omega: a.potential.omega });
    let domain = solve_domain(a, &potential)?;
    let states = eigen::excited_states(&potential, &domain, a.states, a.tol)?;
    let init = eigen::random_init(&potential, &domain, seed)?;
    let policy = StepPolicy {
        max_iterations: a.max_iter,
        ..StepPolicy::default()
    };
    let var = eigen::variational_minimize(&potential, &domain, &init, &policy, a.tol)?;
    let gs = &states[0];
    let gap = (var.energy - gs.energy).abs();
    let agree = gs.converged && var.converged && gap <= AGREEMENT_TOLERANCE;

    let mut o = Outcome::new();
    o.put("potential", &potential);
    o.put("energy", gs.energy);
    if potential.kind() == "coulomb-radial" {
        o.put("energy_ev", hydrogen::hartree_to_ev(gs.energy));
    }
    o.put("energies", states.iter().map(|s| s.energy).collect::<Vec<_>>());
    o.put("residual_max", gs.residual_max);
    o.put("iterations", gs.iterations);
    o.put("converged", gs.converged);
    o.put("variational_energy", var.energy);
    o.put("variational_residual_max", var.residual_max);
    o.put("variational_iterations", var.iterations);
    o.put("variational_converged", var.converged);
    o.put("variational_message", &var.message);
    o.put("methods_agree", agree);

    for (k, s) in states.iter().enumerate() {
        o.checks.push(Check {
            name: format!("state_{k}_converged"),
            passed: s.converged,
            value: s.residual_max,
            tolerance: a.tol,
        });
    }
    o.checks.push(Check {
        name: "variational_converged".into(),
        passed: var.converged,
        value: var.residual_max,
        tolerance: a.tol,
    });
    o.checks.push(Check {
        name: "methods_agree".into(),
        passed: agree,
        value: gap,
        tolerance: AGREEMENT_TOLERANCE,
    });

    let radial = matches!(domain, Domain::Radial(_));
    let axis = gs.field.domain().axis().map(Grid1D::nodes).unwrap_or_default();
    o.columns.push(if radial { "r" } else { "x" }, axis);
    let stem = if radial { "u" } else { "psi" };
    for (k, s) in states.iter().enumerate() {
        o.columns.push(format!("{stem}_{k}"), real_parts(&s.field));
    }
    o.columns.push(format!("{stem}_variational"), real_parts(&var.field));
    Ok(o)
}

fn slits_cmd(a: &SlitsArgs, seed: u64) -> Result<Outcome> {
    let mut cfg = SlitConfig::evenly_spaced(a.slits, a.wavelength, a.separation, a.distance);
    if let Some(p) = &a.positions {
        cfg.slits = p.clone();
    }
    cfg.weights = a.weights.clone();
    if let Some(hw) = a.half_width {
        cfg.screen_half_width = hw;
    }
    cfg.samples = a.samples;
    let profile = interference::slit_pattern(&cfg)?;
    let spacing = interference::fringe_spacing(&profile);

    let mut o = Outcome::new();
    o.put("slit_config", &cfg);
    o.put("fringe_spacing", spacing);
    o.put("fraunhofer_spacing", cfg.fraunhofer_spacing());
    o.put("far_field", cfg.far_field());
    o.put("central_fwhm", interference::central_fwhm(&profile));
    if let Some(expected) = cfg.fraunhofer_spacing() {
        let rel = spacing.map_or(f64::NAN, |s| (s - expected) / expected);
        o.put("relative_error", rel);
        o.checks.push(Check::small("fringe_spacing_fraunhofer", rel, 0.02));
    }

    o.columns.push("y", profile.y.clone());
    o.columns.push("intensity", profile.intensity.clone());
    if a.trials > 0 {
        let counts = interference::detections(&profile, a.trials, seed)?;
        o.checks.push(Check::near(
            "whole_detections",
            counts.iter().sum::<u64>() as f64,
            a.trials as f64,
            0.0,
        ));
        o.columns.push("detections", counts.into_iter().map(|c| c as f64).collect());
    }
    Ok(o)
}

fn momentum_cmd(a: &MomentumArgs) -> Result<Outcome> {
    let hydrogen_default = a.field.is_none();
    let psi = match &a.field {
        Some(path) => {
            let rows = table::parse_numeric_table(&read_text(path)?, 2)?;
            let r = table::column(&rows, 0);
            grid_from_abscissae(&r, Boundary::Decaying)?;
            let g = RadialGrid::new(r[0], r[r.len() - 1], r.len())?;
            RealField::new(g, table::column(&rows, 1))?
        }
        None => {
            let g = RadialGrid::new(a.rmin, a.rmax, a.n)?;
            let v = g.nodes().iter().map(|r| (-r).exp() / PI.sqrt()).collect();
            RealField::new(g, v)?
        }
    };
    if a.p_samples < 2 || !(a.pmax > 0.0) {
        return Err(Error::domain("p_samples", "need at least two samples on a positive range"));
    }
    let p: Vec<f64> = (0..a.p_samples)
        .map(|i| a.pmax * i as f64 / (a.p_samples - 1) as f64)
        .collect();
    let spec = momentum::radial_momentum_transform(&psi, &p)?;
    let sq: Vec<f64> = psi.values().iter().map(|v| v * v).collect();
    let field_norm = crate::grid::try_integrate_real(psi.domain(), &sq)?;
    let spec_norm = spec.norm2();

    let mut o = Outcome::new();
    o.put("a0", spec.amplitude[0]);
    o.put("field_norm2", field_norm);
    o.put("spectrum_norm2", spec_norm);
    o.put("warning", &spec.warning);
    o.checks.push(Check::small("parseval", spec_norm - field_norm, 1e-3));
    if hydrogen_default {
        let ratio = spec.ratio_to_origin().unwrap_or_default();
        let dev = max_abs(
            p.iter()
                .zip(&ratio)
                .filter(|(p, _)| **p <= 5.0)
                .map(|(p, r)| r - (1.0 + p * p).powi(-2)),
        );
        let rising = spec.amplitude.windows(2).skip(1).filter(|w| w[1] >= w[0]).count();
        o.put("ratio_max_deviation", dev);
        o.checks.push(Check::near("a0", spec.amplitude[0], 2.0 * 2f64.sqrt() / PI, 1e-3));
        o.checks.push(Check::small("ratio_max_deviation", dev, 1e-3));
        o.checks.push(Check::small("monotone_decay_violations", rising as f64, 0.0));
    }
    o.columns.push("p", p);
    o.columns.push("a", spec.amplitude.clone());
    o.columns.push("a2", spec.amplitude.iter().map(|a| a * a).collect());
    Ok(o)
}

fn summary_path(out: &Output) -> Option<PathBuf> {
    out.summary
        .clone()
        .or_else(|| out.out.as_ref().map(|p| p.with_extension("json")))
}

fn print_table(name: &str, o: &Outcome) {
    println!("qedens {name}");
    for (k, v) in &o.results {
        let shown = match v {
            Value::Array(a) if a.len() > 8 => format!("[{} values]", a.len()),
            other => other.to_string(),
        };
        println!("  {k:<28} {shown}");
    }
    for c in &o.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("  [{tag}] {:<32} value={:e} tolerance={:e}", c.name, c.value, c.tolerance);
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let seed = resolve_seed(cli.seed)?;
    let (name, outcome, output) = match &cli.command {
        Command::Hydrogen(a) => ("hydrogen", hydrogen_cmd(a)?, &a.output),
        Command::Densities(a) => ("densities", densities_cmd(a)?, &a.output),
        Command::Synth(a) => ("synth", synth_cmd(a, seed)?, &a.output),
        Command::Solve(a) => ("solve", solve_cmd(a, seed)?, &a.output),
        Command::Slits(a) => ("slits", slits_cmd(a, seed)?, &a.output),
        Command::Momentum(a) => ("momentum", momentum_cmd(a)?, &a.output),
    };
    let summary = json!({
        "config": {
            "subcommand": name,
            "seed": seed,
            "generator": sampling::GENERATOR_NAME,
            "args": &cli.command,
        },
        "results": outcome.results,
        "checks": outcome.checks,
    });
    if let Some(path) = &output.out {
        std::fs::write(path, outcome.columns.to_csv())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = summary_path(output) {
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    print_table(name, &outcome);
    Ok(if outcome.checks.iter().all(|c| c.passed) { 0 } else { 1 })
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
