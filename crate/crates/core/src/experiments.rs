//! Error metrics, convergence tables and the study drivers.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BoError, Result};
use crate::exact::{ExactSolution, OneSolitonParams, TwoSolitonParams};
use crate::grid::{stencil, GridFunction, GridSpec};
use crate::hilbert::{hilbert_line_on, hilbert_periodic, HilbertPath, PeriodicHilbertKernel};
use crate::io::fmt_f64;
use crate::stepper::{evolve_with, CflParams, EvolveOptions, FixedPointConfig, Stepper};

/// `E1 = 100 |u - u_dx|_2 / |u|_2` and `E2 = 100 |u - u_dx|_inf / |u|_inf`.
///
/// On a periodic grid the trapezoid rule with identified endpoints is the
/// plain `dx`-weighted sum, so the grid `l2` norm is used directly.
pub fn relative_errors(exact: &GridFunction, numeric: &GridFunction) -> Result<(f64, f64)> {
    let diff = exact.sub(numeric)?;
    let (l2, inf) = (exact.l2_norm(), exact.inf_norm());
    if l2 == 0.0 || inf == 0.0 {
        return Err(BoError::ZeroReference);
    }
    Ok((100.0 * diff.l2_norm() / l2, 100.0 * diff.inf_norm() / inf))
}

/// `log2(coarse / fine)`; `None` when either error is zero.
pub fn rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n_points: usize,
    pub e1_percent: f64,
    pub e2_percent: f64,
    pub dt_used: f64,
    pub lambda_used: f64,
    pub l2_drift: f64,
    pub total_iterations: usize,
    pub steps: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelFailure {
    pub n_points: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorReport>,
    /// `rates_e1[i]` compares `rows[i]` with `rows[i + 1]`.
    pub rates_e1: Vec<Option<f64>>,
    pub rates_e2: Vec<Option<f64>>,
    pub failures: Vec<LevelFailure>,
}

impl ConvergenceTable {
    pub fn new(rows: Vec<ErrorReport>, failures: Vec<LevelFailure>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0].n_points >= w[1].n_points) {
            return Err(BoError::LevelsNotIncreasing);
        }
        Ok(convergence_rates(ConvergenceTable {
            rows,
            failures,
            ..Default::default()
        }))
    }

    pub fn e1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.e1_percent).collect()
    }

    pub fn e2(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.e2_percent).collect()
    }

    /// CSV with one row per level; the rate columns hold the rate from the
    /// previous row. `wall_time_s` is written as 0 unless `timing` is set,
    /// which keeps repeated runs byte-identical.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut s = String::from("N,E1,rate1,E2,rate2,lambda,dt,l2_drift,iterations,wall_time_s\n");
        for (i, r) in self.rows.iter().enumerate() {
            let rate_cell = |rates: &[Option<f64>]| match i.checked_sub(1).and_then(|p| rates[p]) {
                Some(v) => fmt_f64(v),
                None => String::new(),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n_points,
                fmt_f64(r.e1_percent),
                rate_cell(&self.rates_e1),
                fmt_f64(r.e2_percent),
                rate_cell(&self.rates_e2),
                fmt_f64(r.lambda_used),
                fmt_f64(r.dt_used),
                fmt_f64(r.l2_drift),
                r.total_iterations,
                fmt_f64(if timing { r.wall_time_s } else { 0.0 }),
            );
        }
        s
    }

    /// Human-readable layout with rates between rows.
    pub fn render(&self) -> String {
        let mut s = format!("{:>6} {:>12} {:>6} {:>12} {:>6}\n", "N", "E1", "rate", "E2", "rate");
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.1}"));
                let _ = writeln!(
                    s,
                    "{:>6} {:>12} {:>6} {:>12} {:>6}",
                    "",
                    "",
                    f(self.rates_e1[i - 1]),
                    "",
                    f(self.rates_e2[i - 1])
                );
            }
            let _ = writeln!(
                s,
                "{:>6} {:>12.4e} {:>6} {:>12.4e} {:>6}",
                r.n_points, r.e1_percent, "", r.e2_percent, ""
            );
        }
        for f in &self.failures {
            let _ = writeln!(s, "{:>6} failed: {}", f.n_points, f.message);
        }
        s
    }
}

/// Fills in the rates between adjacent rows.
pub fn convergence_rates(mut table: ConvergenceTable) -> ConvergenceTable {
    let pairs = |e: Vec<f64>| e.windows(2).map(|w| rate(w[0], w[1])).collect();
    table.rates_e1 = pairs(table.e1());
    table.rates_e2 = pairs(table.e2());
    table
}

pub fn validate_levels(levels: &[usize]) -> Result<()> {
    if levels.is_empty() {
        return Err(BoError::param("levels", "at least one level is required"));
    }
    if let Some(&n) = levels.iter().find(|&&n| n < 3 || n % 2 == 0) {
        return Err(BoError::param("levels", format!("N = {n} must be odd and at least 3")));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BoError::LevelsNotIncreasing);
    }
    Ok(())
}

/// Settings shared by the soliton studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct StudySettings {
    pub cfl: CflParams,
    pub fp: FixedPointConfig,
    /// Run refinement levels on separate threads.
    #[serde(default)]
    pub parallel: bool,
}

/// One refinement level: initial data, the reference at the end, and the
/// duration of the run.
struct LevelProblem {
    grid: GridSpec,
    u0: GridFunction,
    reference: GridFunction,
    duration: f64,
}

fn run_level(problem: &LevelProblem, settings: &StudySettings) -> Result<ErrorReport> {
    let start = Instant::now();
    let n_points = problem.grid.n_points();
    if problem.duration == 0.0 {
        let (e1, e2) = relative_errors(&problem.reference, &problem.u0)?;
        return Ok(ErrorReport {
            n_points,
            e1_percent: e1,
            e2_percent: e2,
            dt_used: 0.0,
            lambda_used: crate::stepper::max_lambda(&problem.u0, &settings.cfl)?,
            l2_drift: 0.0,
            total_iterations: 0,
            steps: 0,
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }
    let mut stepper = Stepper::for_grid(problem.grid)?;
    let traj = evolve_with(
        &mut stepper,
        &problem.u0,
        problem.duration,
        &settings.cfl,
        &settings.fp,
        &[],
        &EvolveOptions::default(),
    )?;
    let (e1, e2) = relative_errors(&problem.reference, &traj.final_state)?;
    Ok(ErrorReport {
        n_points,
        e1_percent: e1,
        e2_percent: e2,
        dt_used: traj.dt_max(),
        lambda_used: traj.lambda_initial,
        l2_drift: traj.relative_l2_drift(),
        total_iterations: traj.total_iterations(),
        steps: traj.steps.len(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn run_levels(
    levels: &[usize],
    settings: &StudySettings,
    build: impl Fn(usize) -> Result<LevelProblem> + Sync,
) -> Result<ConvergenceTable> {
    validate_levels(levels)?;
    settings.cfl.validate()?;
    settings.fp.validate()?;
    let one = |n: usize| build(n).and_then(|p| run_level(&p, settings));
    let outcomes: Vec<Result<ErrorReport>> = if settings.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = levels.iter().map(|&n| scope.spawn(move || one(n))).collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(BoError::Io("level thread panicked".into())))
                })
                .collect()
        })
    } else {
        levels.iter().map(|&n| one(n)).collect()
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (&n, outcome) in levels.iter().zip(outcomes) {
        match outcome {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(LevelFailure {
                n_points: n,
                message: e.to_string(),
            }),
        }
    }
    ConvergenceTable::new(rows, failures)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneSolitonStudy {
    pub params: OneSolitonParams,
    pub t_end: f64,
}

impl Default for OneSolitonStudy {
    /// `L = 15`, `c = 0.25`, one temporal period.
    fn default() -> Self {
        OneSolitonStudy {
            params: OneSolitonParams::new(0.25, 15.0).expect("valid defaults"),
            t_end: 120.0,
        }
    }
}

/// Evolves `u(., 0)` on `[-L, L)` to `t_end` at each level and compares
/// with `u(., t_end)`.
pub fn run_one_soliton_study(
    levels: &[usize],
    study: &OneSolitonStudy,
    settings: &StudySettings,
) -> Result<ConvergenceTable> {
    let sol = ExactSolution::OneSoliton(study.params);
    run_levels(levels, settings, |n| {
        let grid = GridSpec::periodic(n, study.params.l_domain())?;
        Ok(LevelProblem {
            grid,
            u0: sol.sample(&grid, 0.0)?,
            reference: sol.sample(&grid, study.t_end)?,
            duration: study.t_end,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSolitonStudy {
    pub params: TwoSolitonParams,
    /// Periodic computational interval `[a, b)`.
    pub interval: (f64, f64),
    pub t_start: f64,
    pub duration: f64,
}

impl Default for TwoSolitonStudy {
    /// `c1 = 2`, `c2 = 1` on `(-30, 30)` from `t = -10` for 20 time units.
    fn default() -> Self {
        TwoSolitonStudy {
            params: TwoSolitonParams::new(2.0, 1.0).expect("valid defaults"),
            interval: (-30.0, 30.0),
            t_start: -10.0,
            duration: 20.0,
        }
    }
}

/// Evolves `w(., t_start)` with periodic continuation and compares against
/// `w(., t_start + duration)`.
pub fn run_two_soliton_study(
    levels: &[usize],
    study: &TwoSolitonStudy,
    settings: &StudySettings,
) -> Result<ConvergenceTable> {
    let sol = ExactSolution::TwoSoliton(study.params);
    run_levels(levels, settings, |n| {
        let grid = GridSpec::periodic_interval(n, study.interval.0, study.interval.1)?;
        Ok(LevelProblem {
            grid,
            u0: sol.sample(&grid, study.t_start)?,
            reference: sol.sample(&grid, study.t_start + study.duration)?,
            duration: study.duration,
        })
    })
}

/// Test functions with a closed-form continuous Hilbert transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HilbertTestFunction {
    /// `1/(1+x^2)`, transform `x/(1+x^2)`.
    #[default]
    Lorentzian,
    Zero,
}

impl HilbertTestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            HilbertTestFunction::Lorentzian => 1.0 / (1.0 + x * x),
            HilbertTestFunction::Zero => 0.0,
        }
    }

    pub fn transform(&self, x: f64) -> f64 {
        match self {
            HilbertTestFunction::Lorentzian => x / (1.0 + x * x),
            HilbertTestFunction::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertLevel {
    pub dx: f64,
    pub n_points: usize,
    pub l2_error: f64,
}

// 5-point Gauss-Legendre rule on [-1, 1].
const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// `|f - h|_{L^2}` over the cells `[x_j, x_{j+1})` of `h`'s grid, where `h`
/// is read as piecewise constant.
pub fn piecewise_constant_l2_error(h: &GridFunction, f: impl Fn(f64) -> f64) -> f64 {
    let g = h.grid();
    let dx = g.spacing();
    let cells = if g.is_periodic() {
        h.len()
    } else {
        h.len().saturating_sub(1)
    };
    let mut sum = 0.0;
    for j in 0..cells {
        let (x0, hj) = (g.x(j), h.values()[j]);
        for (node, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let x = x0 + 0.5 * dx * (node + 1.0);
            let d = f(x) - hj;
            sum += 0.5 * dx * w * d * d;
        }
    }
    sum.sqrt()
}

/// Samples `phi` on `n_points` points spanning `[-half_width, half_width]`,
/// applies the line transform and measures the piecewise-constant L2
/// distance to the continuous transform over the same interval.
pub fn hilbert_line_error(phi: HilbertTestFunction, n_points: usize, half_width: f64) -> Result<HilbertLevel> {
    let grid = GridSpec::line_interval(n_points, -half_width, half_width)?;
    let u = GridFunction::from_fn(grid, |x| phi.eval(x))?;
    let h = hilbert_line_on(&u, &grid)?;
    Ok(HilbertLevel {
        dx: grid.spacing(),
        n_points,
        l2_error: piecewise_constant_l2_error(&h, |x| phi.transform(x)),
    })
}

/// Number of points with spacing `dx` on `[-half_width, half_width]`.
pub fn points_for_spacing(dx: f64, half_width: f64) -> Result<usize> {
    if !(dx > 0.0 && half_width > 0.0) {
        return Err(BoError::param("dx", "spacing and half-width must be positive"));
    }
    let cells = 2.0 * half_width / dx;
    if (cells - cells.round()).abs() > 1e-9 * cells {
        return Err(BoError::param(
            "dx",
            format!("{dx} does not divide [-{half_width}, {half_width}]"),
        ));
    }
    Ok(cells.round() as usize + 1)
}

pub fn run_hilbert_convergence_study(
    levels: &[f64],
    phi: HilbertTestFunction,
    half_width: f64,
) -> Result<Vec<HilbertLevel>> {
    levels
        .iter()
        .map(|&dx| hilbert_line_error(phi, points_for_spacing(dx, half_width)?, half_width))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertCheckRow {
    pub n_points: usize,
    pub l2_error_vs_continuous: f64,
    pub skewness_defect: f64,
    pub norm_defect: f64,
}

impl HilbertCheckRow {
    pub fn csv(rows: &[HilbertCheckRow]) -> String {
        let mut s = String::from("N,l2_error_vs_continuous,skewness_defect,norm_defect\n");
        for r in rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.n_points,
                fmt_f64(r.l2_error_vs_continuous),
                fmt_f64(r.skewness_defect),
                fmt_f64(r.norm_defect)
            );
        }
        s
    }
}

/// Random values in `[-1, 1)`.
fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random line data with vanishing low-order moments on each parity
/// class: four central differences of white noise. Its transform decays
/// like `|j|^-5`, so a padded output extent captures the full norm.
pub fn moment_free_line_data(rng: &mut ChaCha8Rng, grid: &GridSpec) -> Result<GridFunction> {
    let n = grid.n_points();
    let mut u = vec![0.0; n];
    if n > 8 {
        u[4..n - 4].copy_from_slice(&random_values(rng, n - 8));
    }
    let mut out = vec![0.0; n];
    for _ in 0..4 {
        stencil::central(&u, grid.spacing(), false, &mut out);
        std::mem::swap(&mut u, &mut out);
    }
    GridFunction::new(*grid, u)
}

/// `|<Hu, v> + <u, Hv>| / (|u| |v|)`
pub fn skewness_defect(u: &GridFunction, hu: &GridFunction, v: &GridFunction, hv: &GridFunction) -> Result<f64> {
    let s = hu.inner(v)? + u.inner(hv)?;
    Ok(s.abs() / (u.l2_norm() * v.l2_norm()))
}

/// Operator checks at one level: line L2 error against the continuous
/// transform of `phi`, plus skewness and norm defects of both the line
/// transform and the periodic kernel of size `n_points` (direct path).
pub fn hilbert_check_level(
    n_points: usize,
    half_width: f64,
    phi: HilbertTestFunction,
    kernel: Option<&PeriodicHilbertKernel>,
) -> Result<HilbertCheckRow> {
    let level = hilbert_line_error(phi, n_points, half_width)?;
    let owned;
    let kernel = match kernel {
        Some(k) => k,
        None => {
            owned = PeriodicHilbertKernel::new(n_points)?;
            &owned
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(n_points as u64);

    let line = GridSpec::line_interval(n_points, -half_width, half_width)?;
    let u = GridFunction::new(line, random_values(&mut rng, n_points))?;
    let v = GridFunction::new(line, random_values(&mut rng, n_points))?;
    let skew_line = skewness_defect(&u, &hilbert_line_on(&u, &line)?, &v, &hilbert_line_on(&v, &line)?)?;
    let m = moment_free_line_data(&mut rng, &line)?;
    let wide = line.padded(n_points, n_points)?;
    let norm_line = (hilbert_line_on(&m, &wide)?.l2_norm() - m.l2_norm()).abs() / m.l2_norm();

    let per = GridSpec::periodic_interval(n_points, -half_width, half_width)?;
    let p = GridFunction::new(per, random_values(&mut rng, n_points))?;
    let q = GridFunction::new(per, random_values(&mut rng, n_points))?;
    let hp = hilbert_periodic(&p, kernel, HilbertPath::Direct)?;
    let hq = hilbert_periodic(&q, kernel, HilbertPath::Direct)?;
    let skew_per = skewness_defect(&p, &hp, &q, &hq)?;
    let mean = p.mean();
    let p0 = GridFunction::new(per, p.values().iter().map(|x| x - mean).collect())?;
    let hp0 = hilbert_periodic(&p0, kernel, HilbertPath::Direct)?;
    let norm_per = (hp0.l2_norm() - p0.l2_norm()).abs() / p0.l2_norm();
    let spectral = hilbert_periodic(&p0, kernel, HilbertPath::Spectral)?;
    let path_gap = hp0.sub(&spectral)?.l2_norm() / p0.l2_norm();

    Ok(HilbertCheckRow {
        n_points,
        l2_error_vs_continuous: level.l2_error,
        skewness_defect: skew_line.max(skew_per),
        norm_defect: norm_line.max(norm_per).max(path_gap),
    })
}
