//! Crank-Nicolson time stepping on periodic grids.
//!
//! One step solves
//!
//! ```text
//! u1 = u0 + dt * G((u0 + u1)/2) + dt * H D+D- (u0 + u1)/2,    G(u) = <u> Du
//! ```
//!
//! by the fixed-point iteration
//!
//! ```text
//! (I - dt/2 H D+D-) w_{l+1} = v + dt G((v + w_l)/2) + dt/2 H D+D- v,    w_0 = v
//! ```
//!
//! The left-hand operator is circulant, so each iterate is an exact
//! division in Fourier space by `1 - dt/2 * c_hat_k * sigma_k`, where
//! `sigma_k = -(4/dx^2) sin^2(pi k/N)` is the symbol of `D+D-`. The product
//! `c_hat_k * sigma_k` is purely imaginary, so every divisor has modulus at
//! least one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BoError, Result};
use crate::grid::{stencil, GridFunction, GridSpec, Topology};
use crate::hilbert::PeriodicHilbertKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CflMode {
    /// `lambda = cfl_fraction / (K |u|_h2)`, which guarantees contraction.
    Theoretical,
    /// `lambda = practical_factor / |u|_h2` unless overridden.
    #[default]
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambdaPolicy {
    /// Evaluate lambda once from the initial state.
    #[default]
    FixedFromInitial,
    /// Re-evaluate lambda from the current state before every step.
    Adaptive,
}

/// Time-step selection, `dt = lambda * dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CflParams {
    /// Contraction fraction in `(0, 1)`.
    pub cfl_fraction: f64,
    pub mode: CflMode,
    pub practical_factor: f64,
    /// Fixed lambda used by practical mode when set.
    pub practical_lambda: Option<f64>,
    pub lambda_policy: LambdaPolicy,
    /// Lambda returned for a state with zero h2 norm.
    pub lambda_cap: f64,
}

impl Default for CflParams {
    fn default() -> Self {
        CflParams {
            cfl_fraction: 0.5,
            mode: CflMode::Practical,
            practical_factor: 0.5,
            practical_lambda: None,
            lambda_policy: LambdaPolicy::FixedFromInitial,
            lambda_cap: 1.0,
        }
    }
}

impl CflParams {
    pub fn theoretical(cfl_fraction: f64) -> Self {
        CflParams {
            cfl_fraction,
            mode: CflMode::Theoretical,
            ..Default::default()
        }
    }

    /// `K = (6 - L) / (1 - L)`
    pub fn k_const(&self) -> f64 {
        (6.0 - self.cfl_fraction) / (1.0 - self.cfl_fraction)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_fraction > 0.0 && self.cfl_fraction < 1.0) {
            return Err(BoError::param(
                "cfl_fraction",
                format!("must lie in (0, 1), got {}", self.cfl_fraction),
            ));
        }
        if !(self.practical_factor.is_finite() && self.practical_factor > 0.0) {
            return Err(BoError::param("practical_factor", "must be positive"));
        }
        if let Some(l) = self.practical_lambda {
            if !(l.is_finite() && l > 0.0) {
                return Err(BoError::param("practical_lambda", format!("must be positive, got {l}")));
            }
        }
        if !(self.lambda_cap.is_finite() && self.lambda_cap > 0.0) {
            return Err(BoError::param("lambda_cap", "must be positive"));
        }
        Ok(())
    }
}

/// Stopping rule of the inner fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedPointConfig {
    /// Stop once `|w_{l+1} - w_l|_h2 <= rel_tolerance * |v|_h2`.
    pub rel_tolerance: f64,
    pub max_iterations: usize,
    /// Abort when an increment exceeds the previous one by this factor.
    pub divergence_guard: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            rel_tolerance: 1e-10,
            max_iterations: 50,
            divergence_guard: 2.0,
        }
    }
}

impl FixedPointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance.is_finite() && self.rel_tolerance > 0.0) {
            return Err(BoError::param("rel_tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(BoError::param("max_iterations", "must be at least 1"));
        }
        if !(self.divergence_guard > 1.0) {
            return Err(BoError::param("divergence_guard", "must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub dt_used: f64,
    pub iterations: usize,
    /// Last ratio `|dw_l|_h2 / |dw_{l-1}|_h2` (0 when only one iterate).
    pub final_contraction_ratio: f64,
    pub max_contraction_ratio: f64,
    pub l2_before: f64,
    pub l2_after: f64,
}

/// `G(u) = <u> Du`
pub fn g_nonlinear(u: &GridFunction) -> Result<GridFunction> {
    let mut out = vec![0.0; u.len()];
    stencil::nonlinear(u.values(), u.grid().spacing(), u.grid().is_periodic(), &mut out);
    GridFunction::produced(*u.grid(), out)
}

pub fn max_lambda(u: &GridFunction, p: &CflParams) -> Result<f64> {
    p.validate()?;
    Ok(lambda_for_h2(u.h2_norm(), p))
}

fn lambda_for_h2(h2: f64, p: &CflParams) -> f64 {
    if p.mode == CflMode::Practical {
        if let Some(l) = p.practical_lambda {
            return l;
        }
    }
    if h2 == 0.0 {
        return p.lambda_cap;
    }
    match p.mode {
        CflMode::Theoretical => p.cfl_fraction / (p.k_const() * h2),
        CflMode::Practical => p.practical_factor / h2,
    }
}

/// Solves `(I - dt/2 H D+D-) w = rhs` exactly.
pub fn implicit_resolvent(rhs: &GridFunction, dt: f64, kernel: &PeriodicHilbertKernel) -> Result<GridFunction> {
    let mut stepper = Stepper::new(*rhs.grid(), kernel.clone())?;
    let out = stepper.resolve(rhs.values(), dt)?;
    GridFunction::produced(*rhs.grid(), out)
}

/// One Crank-Nicolson step from `v`.
pub fn step_crank_nicolson(
    v: &GridFunction,
    dt: f64,
    kernel: &PeriodicHilbertKernel,
    fp: &FixedPointConfig,
) -> Result<(GridFunction, StepReport)> {
    let mut stepper = Stepper::new(*v.grid(), kernel.clone())?;
    let (next, report) = stepper.step(v.values(), dt, fp)?;
    Ok((GridFunction::produced(*v.grid(), next)?, report))
}

/// Reusable stepping state for one periodic grid: the kernel, the
/// Hilbert-Laplacian symbol and scratch buffers. Not shared between threads.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: GridSpec,
    kernel: PeriodicHilbertKernel,
    /// `c_hat_k * sigma_k`, stored as its (real) imaginary part.
    symbol: Vec<f64>,
    spec: Vec<Complex64>,
    base: Vec<Complex64>,
    work: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: GridSpec, kernel: PeriodicHilbertKernel) -> Result<Self> {
        grid.require(Topology::Periodic)?;
        let n = grid.n_points();
        if kernel.n_points() != n {
            return Err(BoError::KernelMismatch {
                kernel: kernel.n_points(),
                grid: n,
            });
        }
        let dx = grid.spacing();
        let symbol = kernel
            .multiplier()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
                let sigma = -4.0 / (dx * dx) * s * s;
                // c_hat is 0 or +-i
                c.im * sigma
            })
            .collect();
        Ok(Stepper {
            grid,
            kernel,
            symbol,
            spec: vec![Complex64::default(); n],
            base: vec![Complex64::default(); n],
            work: vec![0.0; n],
        })
    }

    pub fn for_grid(grid: GridSpec) -> Result<Self> {
        grid.require(Topology::Periodic)?;
        Self::new(grid, PeriodicHilbertKernel::new(grid.n_points())?)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kernel(&self) -> &PeriodicHilbertKernel {
        &self.kernel
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.grid.n_points() {
            return Err(BoError::LengthMismatch {
                expected: self.grid.n_points(),
                got: len,
            });
        }
        Ok(())
    }

    fn check_dt(dt: f64) -> Result<()> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(BoError::param("dt", format!("must be positive, got {dt}")));
        }
        Ok(())
    }

    #[inline]
    fn divisor(&self, k: usize, dt: f64) -> Complex64 {
        Complex64::new(1.0, -0.5 * dt * self.symbol[k])
    }

    pub fn resolve(&mut self, rhs: &[f64], dt: f64) -> Result<Vec<f64>> {
        self.check_len(rhs.len())?;
        Self::check_dt(dt)?;
        let plan = self.kernel.plan().clone();
        plan.forward_real(rhs, &mut self.spec);
        for k in 0..self.spec.len() {
            let d = self.divisor(k, dt);
            self.spec[k] /= d;
        }
        let mut out = vec![0.0; rhs.len()];
        plan.inverse_real(&mut self.spec, &mut out)?;
        Ok(out)
    }

    /// Advances `v` by `dt`. Returns the new state and iteration statistics.
    pub fn step(&mut self, v: &[f64], dt: f64, fp: &FixedPointConfig) -> Result<(Vec<f64>, StepReport)> {
        self.check_len(v.len())?;
        Self::check_dt(dt)?;
        let n = v.len();
        let dx = self.grid.spacing();
        let plan = self.kernel.plan().clone();

        // base_hat = v_hat (1 + dt/2 M) / (1 - dt/2 M)
        plan.forward_real(v, &mut self.base);
        for k in 0..n {
            let m = Complex64::new(0.0, 0.5 * dt * self.symbol[k]);
            self.base[k] *= (1.0 + m) / (1.0 - m);
        }

        let v_h2 = stencil::h2(v, dx, true);
        let threshold = fp.rel_tolerance * v_h2;
        let mut w = v.to_vec();
        let mut next = vec![0.0; n];
        let mut prev_inc: Option<f64> = None;
        let mut last_ratio = 0.0_f64;
        let mut max_ratio = 0.0_f64;

        for iteration in 1..=fp.max_iterations {
            for ((mid, &a), &b) in self.work.iter_mut().zip(v).zip(&w) {
                *mid = 0.5 * (a + b);
            }
            stencil::nonlinear(&self.work, dx, true, &mut next);
            plan.forward_real(&next, &mut self.spec);
            for k in 0..n {
                self.spec[k] = self.base[k] + dt * self.spec[k] / self.divisor(k, dt);
            }
            plan.inverse_real(&mut self.spec, &mut next)?;

            for ((d, &a), &b) in self.work.iter_mut().zip(&next).zip(&w) {
                *d = a - b;
            }
            let inc = stencil::h2(&self.work, dx, true);
            if !inc.is_finite() {
                return Err(BoError::NonFinite { index: 0 });
            }
            if let Some(p) = prev_inc {
                last_ratio = if p > 0.0 { inc / p } else { 0.0 };
                max_ratio = max_ratio.max(last_ratio);
                if last_ratio > fp.divergence_guard {
                    return Err(BoError::Divergence {
                        iteration,
                        ratio: last_ratio,
                        guard: fp.divergence_guard,
                    });
                }
            }
            std::mem::swap(&mut w, &mut next);
            if inc <= threshold {
                if let Some(index) = w.iter().position(|x| !x.is_finite()) {
                    return Err(BoError::NonFinite { index });
                }
                let report = StepReport {
                    dt_used: dt,
                    iterations: iteration,
                    final_contraction_ratio: last_ratio,
                    max_contraction_ratio: max_ratio,
                    l2_before: stencil::l2(v, dx),
                    l2_after: stencil::l2(&w, dx),
                };
                return Ok((w, report));
            }
            prev_inc = Some(inc);
        }
        Err(BoError::NoConvergence {
            iterations: fp.max_iterations,
            ratio: last_ratio,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveOptions {
    /// Abort once `|u^n|_h2 > blowup_factor * |u^0|_h2`.
    pub blowup_factor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { blowup_factor: 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: GridFunction,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub steps: Vec<StepReport>,
    /// `|u^n|_h2` for `n = 0..=steps.len()`.
    pub h2_series: Vec<f64>,
    pub lambda_initial: f64,
    /// Steps whose h2 growth exceeded `dt * sqrt(3/2) * (K y_n)^2`.
    pub growth_bound_violations: Vec<usize>,
    pub final_state: GridFunction,
}

impl Trajectory {
    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }

    pub fn l2_initial(&self) -> f64 {
        self.steps.first().map_or(self.final_state.l2_norm(), |s| s.l2_before)
    }

    /// `| |u^N| - |u^0| | / |u^0|` (zero for a zero initial state).
    pub fn relative_l2_drift(&self) -> f64 {
        let l0 = self.l2_initial();
        if l0 == 0.0 {
            return 0.0;
        }
        (self.final_state.l2_norm() - l0).abs() / l0
    }

    pub fn max_contraction_ratio(&self) -> f64 {
        self.steps.iter().fold(0.0, |m, s| m.max(s.max_contraction_ratio))
    }

    /// Largest time step taken.
    pub fn dt_max(&self) -> f64 {
        self.steps.iter().fold(0.0, |m, s| m.max(s.dt_used))
    }

    pub fn snapshot_at(&self, time: f64) -> Option<&GridFunction> {
        self.snapshots.iter().find(|s| s.time == time).map(|s| &s.state)
    }
}

/// Evolves `u0` to `t_end`, landing exactly on every snapshot time.
pub fn evolve(
    u0: &GridFunction,
    t_end: f64,
    cfl: &CflParams,
    fp: &FixedPointConfig,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    let mut stepper = Stepper::for_grid(*u0.grid())?;
    evolve_with(
        &mut stepper,
        u0,
        t_end,
        cfl,
        fp,
        snapshot_times,
        &EvolveOptions::default(),
    )
}

pub fn evolve_with(
    stepper: &mut Stepper,
    u0: &GridFunction,
    t_end: f64,
    cfl: &CflParams,
    fp: &FixedPointConfig,
    snapshot_times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    cfl.validate()?;
    fp.validate()?;
    if u0.grid() != stepper.grid() {
        return Err(BoError::GridMismatch);
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(BoError::param("t_end", format!("must be non-negative, got {t_end}")));
    }
    let mut targets: Vec<f64> = snapshot_times.to_vec();
    if let Some(bad) = targets.iter().find(|&&t| !(0.0..=t_end).contains(&t)) {
        return Err(BoError::param("snapshot_times", format!("{bad} outside [0, {t_end}]")));
    }
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let dx = stepper.grid().spacing();
    let k_const = cfl.k_const();
    let growth = 1.5_f64.sqrt();
    let h2_0 = u0.h2_norm();
    let blowup = opts.blowup_factor * h2_0;
    let lambda_initial = lambda_for_h2(h2_0, cfl);

    let mut snapshots = Vec::with_capacity(targets.len());
    let mut pending = targets.into_iter().peekable();
    while pending.peek() == Some(&0.0) {
        snapshots.push(Snapshot {
            time: 0.0,
            state: u0.clone(),
        });
        pending.next();
    }

    let mut u = u0.values().to_vec();
    let mut h2 = h2_0;
    let mut h2_series = vec![h2_0];
    let mut steps = Vec::new();
    let mut violations = Vec::new();
    let mut t = 0.0_f64;
    let mut n = 0usize;

    while t < t_end {
        let lambda = match cfl.lambda_policy {
            LambdaPolicy::FixedFromInitial => lambda_initial,
            LambdaPolicy::Adaptive => lambda_for_h2(h2, cfl),
        };
        let dt_full = lambda * dx;
        let target = pending.peek().copied().unwrap_or(t_end).min(t_end);
        // Shorten the step to land on the target; avoid a sliver step.
        let (dt, landing) = if t + dt_full >= target - 1e-9 * dt_full {
            (target - t, true)
        } else {
            (dt_full, false)
        };
        let (next, report) = stepper.step(&u, dt, fp).map_err(|e| BoError::Step {
            step: n,
            time: t,
            source: Box::new(e),
        })?;
        u = next;
        n += 1;
        t = if landing { target } else { t + dt };

        let h2_next = stencil::h2(&u, dx, true);
        if h2_next - h2 > dt * growth * (k_const * h2).powi(2) {
            violations.push(n);
        }
        if h2_0 > 0.0 && h2_next > blowup {
            return Err(BoError::BlowUp {
                step: n,
                h2: h2_next,
                bound: blowup,
            });
        }
        h2 = h2_next;
        h2_series.push(h2);
        steps.push(report);

        while pending.peek().is_some_and(|&s| s <= t) {
            let time = pending.next().unwrap_or(t);
            snapshots.push(Snapshot {
                time,
                state: GridFunction::new(*u0.grid(), u.clone())?,
            });
        }
    }

    Ok(Trajectory {
        snapshots,
        steps,
        h2_series,
        lambda_initial,
        growth_bound_violations: violations,
        final_state: GridFunction::new(*u0.grid(), u)?,
    })
}
