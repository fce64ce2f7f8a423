//! Command-line front end: `run`, `convergence` and `hilbert-check`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{BoError, Result};
use crate::exact::{ExactSolution, OneSolitonParams, TwoSolitonParams};
use crate::experiments::{
    hilbert_check_level, relative_errors, run_one_soliton_study, run_two_soliton_study, validate_levels,
    ConvergenceTable, HilbertCheckRow, HilbertTestFunction, OneSolitonStudy, StudySettings, TwoSolitonStudy,
};
use crate::grid::{GridFunction, GridSpec};
use crate::hilbert::PeriodicHilbertKernel;
use crate::io::{read_initial_condition, snapshots_csv};
use crate::stepper::{evolve_with, CflMode, CflParams, EvolveOptions, FixedPointConfig, LambdaPolicy, Stepper};

/// Defect threshold for `hilbert-check`.
pub const DEFECT_LIMIT: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "bo",
    version,
    about = "Crank-Nicolson finite-difference solver for the Benjamin-Ono equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one initial condition and write snapshots plus a JSON report.
    Run(RunArgs),
    /// Grid-refinement study for the one- or two-soliton problem.
    Convergence(ConvergenceArgs),
    /// Check the discrete Hilbert transforms and their L2 convergence.
    HilbertCheck(HilbertCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    OneSoliton,
    TwoSoliton,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyKind {
    OneSoliton,
    TwoSoliton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CflModeArg {
    Theoretical,
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LambdaPolicyArg {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "practical")]
    pub cfl_mode: CflModeArg,
    /// Contraction fraction L in (0, 1) for the theoretical bound.
    #[arg(long, default_value_t = 0.5)]
    pub cfl_fraction: f64,
    /// Practical mode: lambda = factor / |u0|_h2.
    #[arg(long, default_value_t = 0.5)]
    pub practical_factor: f64,
    /// Practical mode: fixed lambda = dt/dx, overriding the factor.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "fixed")]
    pub lambda_policy: LambdaPolicyArg,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_cap: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 2.0)]
    pub divergence_guard: f64,
}

impl SolverArgs {
    fn cfl(&self) -> CflParams {
        CflParams {
            cfl_fraction: self.cfl_fraction,
            mode: match self.cfl_mode {
                CflModeArg::Theoretical => CflMode::Theoretical,
                CflModeArg::Practical => CflMode::Practical,
            },
            practical_factor: self.practical_factor,
            practical_lambda: self.lambda,
            lambda_policy: match self.lambda_policy {
                LambdaPolicyArg::Fixed => LambdaPolicy::FixedFromInitial,
                LambdaPolicyArg::Adaptive => LambdaPolicy::Adaptive,
            },
            lambda_cap: self.lambda_cap,
        }
    }

    fn fp(&self) -> FixedPointConfig {
        FixedPointConfig {
            rel_tolerance: self.rel_tol,
            max_iterations: self.max_iter,
            divergence_guard: self.divergence_guard,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Load the run configuration from JSON (a config or an earlier report).
    #[arg(long, conflicts_with_all = ["ic", "n_points"])]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ic: Option<IcKind>,
    /// Number of grid points (odd).
    #[arg(long = "N")]
    pub n_points: Option<usize>,
    /// Half-period: the grid covers [-L, L).
    #[arg(long, default_value_t = 15.0)]
    pub l_domain: f64,
    /// Periodic interval `a,b`; overrides --l-domain.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval: Option<(f64, f64)>,
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    /// Time at which the exact solution supplies the initial data
    /// (default 0, or -10 for the two-soliton).
    #[arg(long, allow_hyphen_values = true)]
    pub t_start: Option<f64>,
    /// Two-column CSV (x, u) for `--ic file`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Duration of the run.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub snapshot_times: Option<Vec<f64>>,
    #[arg(long)]
    pub snapshot_count: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub study: StudyKind,
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<usize>,
    /// Duration (default 120 for the one-soliton, 20 for the two-soliton).
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 15.0)]
    pub l_domain: f64,
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval: Option<(f64, f64)>,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub t_start: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Run levels concurrently.
    #[arg(long)]
    pub parallel: bool,
    /// Write measured wall times into the CSV (otherwise 0).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HilbertCheckArgs {
    /// Grid sizes (odd) on [-half_width, half_width].
    #[arg(long, value_delimiter = ',', default_value = "2001,4001,8001")]
    pub levels: Vec<usize>,
    #[arg(long, default_value_t = 200.0)]
    pub half_width: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Perturb one periodic kernel weight (checks that the guards fire).
    #[arg(long, hide = true)]
    pub corrupt_kernel: bool,
}

/// Everything needed to reproduce a `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub initial_condition: IcKind,
    pub n_points: usize,
    pub l_domain: f64,
    pub interval: Option<(f64, f64)>,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub t_start: f64,
    pub input: Option<PathBuf>,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub cfl: CflParams,
    pub fp: FixedPointConfig,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<Self> {
        let ic =
            a.ic.ok_or_else(|| BoError::param("ic", "required (one-soliton, two-soliton or file)"))?;
        let n_points = a.n_points.ok_or_else(|| BoError::param("N", "required"))?;
        let t_end = a.t_end.ok_or_else(|| BoError::param("t-end", "required"))?;
        let interval = match (&a.interval, ic) {
            (Some(v), _) => Some(*v),
            (None, IcKind::TwoSoliton) => Some((-30.0, 30.0)),
            (None, _) => None,
        };
        let t_start = a.t_start.unwrap_or(if ic == IcKind::TwoSoliton { -10.0 } else { 0.0 });
        let snapshot_times = match (&a.snapshot_times, a.snapshot_count) {
            (Some(t), _) => t.clone(),
            (None, Some(k)) => evenly_spaced(k, t_end)?,
            (None, None) => evenly_spaced(2, t_end)?,
        };
        Ok(RunConfig {
            initial_condition: ic,
            n_points,
            l_domain: a.l_domain,
            interval,
            c: a.c,
            c1: a.c1,
            c2: a.c2,
            t_start,
            input: a.input.clone(),
            t_end,
            snapshot_times,
            cfl: a.solver.cfl(),
            fp: a.solver.fp(),
            output: a.out.clone(),
            report: a.report.clone(),
        })
    }

    /// Accepts either a bare config or a report with a `config` member.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| BoError::Io(e.to_string()))?;
        let inner = value.get("config").cloned().unwrap_or(value);
        serde_json::from_value(inner).map_err(|e| BoError::Io(format!("bad run config: {e}")))
    }

    pub fn grid(&self) -> Result<GridSpec> {
        if self.n_points % 2 == 0 || self.n_points < 3 {
            return Err(BoError::param(
                "N",
                format!(
                    "periodic grids need an odd number of points (at least 3), got {}",
                    self.n_points
                ),
            ));
        }
        let grid = match self.interval {
            Some((a, b)) => GridSpec::periodic_interval(self.n_points, a, b),
            None => GridSpec::periodic(self.n_points, self.l_domain),
        };
        grid.map_err(|e| {
            BoError::param(
                if self.interval.is_some() {
                    "interval"
                } else {
                    "l-domain"
                },
                e.to_string(),
            )
        })
    }

    pub fn exact(&self) -> Result<Option<ExactSolution>> {
        Ok(match self.initial_condition {
            IcKind::OneSoliton => Some(ExactSolution::OneSoliton(OneSolitonParams::new(self.c, self.l_domain)?)),
            IcKind::TwoSoliton => Some(ExactSolution::TwoSoliton(TwoSolitonParams::new(self.c1, self.c2)?)),
            IcKind::File => None,
        })
    }

    pub fn initial_state(&self, grid: &GridSpec) -> Result<GridFunction> {
        match self.exact()? {
            Some(sol) => sol.sample(grid, self.t_start),
            None => {
                let path = self
                    .input
                    .as_ref()
                    .ok_or_else(|| BoError::param("input", "required with --ic file"))?;
                read_initial_condition(path, grid)
            }
        }
    }
}

fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected `a,b`, got `{s}`"));
    };
    let a: f64 = a.trim().parse().map_err(|_| format!("`{a}` is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("`{b}` is not a number"))?;
    if !(a < b) {
        return Err(format!("need a < b, got {a},{b}"));
    }
    Ok((a, b))
}

fn evenly_spaced(count: usize, t_end: f64) -> Result<Vec<f64>> {
    match count {
        0 => Err(BoError::param("snapshot-count", "must be at least 1")),
        1 => Ok(vec![t_end]),
        _ => {
            let mut t: Vec<f64> = (0..count).map(|i| t_end * i as f64 / (count - 1) as f64).collect();
            t.dedup();
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationStats {
    pub total: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub max_contraction_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub grid: GridSpec,
    pub lambda: f64,
    pub dt: f64,
    pub steps: usize,
    pub iterations: IterationStats,
    pub l2_initial: f64,
    pub l2_final: f64,
    pub l2_drift: f64,
    pub h2_initial: f64,
    pub h2_final: f64,
    pub growth_bound_violations: usize,
    pub snapshot_times: Vec<f64>,
    pub e1_percent: Option<f64>,
    pub e2_percent: Option<f64>,
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_points: usize,
            spacing: f64,
            origin: f64,
            topology: crate::grid::Topology,
        }
        let r = Repr::deserialize(d)?;
        let g = match r.topology {
            crate::grid::Topology::Line => GridSpec::line(r.n_points, r.spacing, r.origin),
            crate::grid::Topology::Periodic => {
                GridSpec::periodic_interval(r.n_points, r.origin, r.origin + r.spacing * r.n_points as f64)
            }
        };
        g.map_err(serde::de::Error::custom)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| BoError::Io(format!("{}: {e}", path.display())))
}

pub fn cmd_run(config: &RunConfig) -> Result<RunReport> {
    let grid = config.grid()?;
    config.cfl.validate()?;
    config.fp.validate()?;
    let u0 = config.initial_state(&grid)?;
    let mut stepper = Stepper::for_grid(grid)?;
    let traj = evolve_with(
        &mut stepper,
        &u0,
        config.t_end,
        &config.cfl,
        &config.fp,
        &config.snapshot_times,
        &EvolveOptions::default(),
    )?;

    let (e1, e2) = match config.exact()? {
        Some(sol) => {
            let reference = sol.sample(&grid, config.t_start + config.t_end)?;
            let (e1, e2) = relative_errors(&reference, &traj.final_state)?;
            (Some(e1), Some(e2))
        }
        None => (None, None),
    };
    let its: Vec<usize> = traj.steps.iter().map(|s| s.iterations).collect();
    let report = RunReport {
        config: config.clone(),
        grid,
        lambda: traj.lambda_initial,
        dt: traj.dt_max(),
        steps: traj.steps.len(),
        iterations: IterationStats {
            total: traj.total_iterations(),
            min: its.iter().copied().min().unwrap_or(0),
            max: its.iter().copied().max().unwrap_or(0),
            mean: if its.is_empty() {
                0.0
            } else {
                traj.total_iterations() as f64 / its.len() as f64
            },
            max_contraction_ratio: traj.max_contraction_ratio(),
        },
        l2_initial: u0.l2_norm(),
        l2_final: traj.final_state.l2_norm(),
        l2_drift: traj.relative_l2_drift(),
        h2_initial: traj.h2_series[0],
        h2_final: *traj.h2_series.last().unwrap_or(&0.0),
        growth_bound_violations: traj.growth_bound_violations.len(),
        snapshot_times: traj.snapshots.iter().map(|s| s.time).collect(),
        e1_percent: e1,
        e2_percent: e2,
    };

    if let Some(path) = &config.output {
        write_file(path, &snapshots_csv(&grid, &traj.snapshots))?;
    }
    if let Some(path) = &config.report {
        let json = serde_json::to_string_pretty(&report).map_err(|e| BoError::Io(e.to_string()))?;
        write_file(path, &json)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub study: &'static str,
    pub levels: Vec<usize>,
    pub settings: StudySettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_soliton: Option<OneSolitonStudy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_soliton: Option<TwoSolitonStudy>,
    pub table: ConvergenceTable,
}

pub fn cmd_convergence(a: &ConvergenceArgs) -> Result<StudyReport> {
    validate_levels(&a.levels)?;
    let settings = StudySettings {
        cfl: a.solver.cfl(),
        fp: a.solver.fp(),
        parallel: a.parallel,
    };
    let report = match a.study {
        StudyKind::OneSoliton => {
            let study = OneSolitonStudy {
                params: OneSolitonParams::new(a.c, a.l_domain)?,
                t_end: a.t_end.unwrap_or(120.0),
            };
            StudyReport {
                study: "one_soliton",
                levels: a.levels.clone(),
                settings,
                table: run_one_soliton_study(&a.levels, &study, &settings)?,
                one_soliton: Some(study),
                two_soliton: None,
            }
        }
        StudyKind::TwoSoliton => {
            let study = TwoSolitonStudy {
                params: TwoSolitonParams::new(a.c1, a.c2)?,
                interval: a.interval.unwrap_or((-30.0, 30.0)),
                t_start: a.t_start,
                duration: a.t_end.unwrap_or(20.0),
            };
            StudyReport {
                study: "two_soliton",
                levels: a.levels.clone(),
                settings,
                table: run_two_soliton_study(&a.levels, &study, &settings)?,
                one_soliton: None,
                two_soliton: Some(study),
            }
        }
    };
    if let Some(path) = &a.out {
        write_file(path, &report.table.to_csv(a.timing))?;
    }
    if let Some(path) = &a.report {
        let json = serde_json::to_string_pretty(&report).map_err(|e| BoError::Io(e.to_string()))?;
        write_file(path, &json)?;
    }
    Ok(report)
}

pub fn cmd_hilbert_check(a: &HilbertCheckArgs) -> Result<Vec<HilbertCheckRow>> {
    validate_levels(&a.levels)?;
    let rows = a
        .levels
        .iter()
        .map(|&n| {
            let kernel = PeriodicHilbertKernel::new(n)?;
            let kernel = if a.corrupt_kernel {
                kernel.with_corrupted_weight(1, 1e-3)
            } else {
                kernel
            };
            hilbert_check_level(n, a.half_width, HilbertTestFunction::Lorentzian, Some(&kernel))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = &a.out {
        write_file(path, &HilbertCheckRow::csv(&rows))?;
    }
    Ok(rows)
}

fn fail(e: &BoError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        BoError::InvalidParameter { .. }
        | BoError::InvalidGrid(_)
        | BoError::LevelsNotIncreasing
        | BoError::InvalidKernelSize { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Run(args) => {
            let config = match &args.config {
                Some(path) => fs::read_to_string(path)
                    .map_err(|e| BoError::Io(format!("{}: {e}", path.display())))
                    .and_then(|text| RunConfig::from_json(&text))
                    .map(|mut c| {
                        if args.out.is_some() {
                            c.output = args.out.clone();
                        }
                        if args.report.is_some() {
                            c.report = args.report.clone();
                        }
                        c
                    }),
                None => RunConfig::from_args(&args),
            };
            match config.and_then(|c| cmd_run(&c)) {
                Ok(r) => {
                    println!(
                        "N = {}  lambda = {:.6}  dt = {:.6e}  steps = {}  iterations = {}  l2 drift = {:.3e}",
                        r.grid.n_points(),
                        r.lambda,
                        r.dt,
                        r.steps,
                        r.iterations.total,
                        r.l2_drift
                    );
                    if let (Some(e1), Some(e2)) = (r.e1_percent, r.e2_percent) {
                        println!("E1 = {e1:.4e} %  E2 = {e2:.4e} %");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Convergence(args) => match cmd_convergence(&args) {
            Ok(r) => {
                print!("{}", r.table.render());
                if r.table.failures.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(&e),
        },
        Command::HilbertCheck(args) => match cmd_hilbert_check(&args) {
            Ok(rows) => {
                println!("{:>7} {:>14} {:>12} {:>12}", "N", "l2_error", "skewness", "norm");
                for r in &rows {
                    println!(
                        "{:>7} {:>14.6e} {:>12.3e} {:>12.3e}",
                        r.n_points, r.l2_error_vs_continuous, r.skewness_defect, r.norm_defect
                    );
                }
                let decreasing = rows
                    .windows(2)
                    .all(|w| w[1].l2_error_vs_continuous < w[0].l2_error_vs_continuous);
                println!("l2 error strictly decreasing: {decreasing}");
                let bad = rows
                    .iter()
                    .any(|r| !(r.skewness_defect <= DEFECT_LIMIT && r.norm_defect <= DEFECT_LIMIT));
                if bad {
                    eprintln!("error: operator defect exceeds {DEFECT_LIMIT:e}");
                    ExitCode::from(1)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => fail(&e),
        },
    }
}

pub fn main() -> ExitCode {
    run(Cli::parse())
}
