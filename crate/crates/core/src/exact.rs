//! Closed-form solutions of `u_t = u u_x + H u_xx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BoError, Result};
use crate::grid::{GridFunction, GridSpec, Topology};
use crate::hilbert::kernel_multiplier;
use crate::spectral::{wavenumbers, SpectralPlan};

/// Periodic travelling wave of speed `c` and spatial period `2 * l_domain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OneSolitonRepr")]
pub struct OneSolitonParams {
    c: f64,
    l_domain: f64,
}

#[derive(Deserialize)]
struct OneSolitonRepr {
    c: f64,
    l_domain: f64,
}

impl TryFrom<OneSolitonRepr> for OneSolitonParams {
    type Error = BoError;
    fn try_from(r: OneSolitonRepr) -> Result<Self> {
        OneSolitonParams::new(r.c, r.l_domain)
    }
}

impl OneSolitonParams {
    pub fn new(c: f64, l_domain: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(BoError::param("c", format!("wave speed must be positive, got {c}")));
        }
        if !(l_domain.is_finite() && l_domain > 0.0) {
            return Err(BoError::param("l_domain", format!("must be positive, got {l_domain}")));
        }
        let p = OneSolitonParams { c, l_domain };
        let delta = p.delta();
        if delta >= 1.0 {
            return Err(BoError::param(
                "c",
                format!("delta = pi/(c L) = {delta} must be below 1 (increase c or L)"),
            ));
        }
        Ok(p)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn l_domain(&self) -> f64 {
        self.l_domain
    }

    /// `pi / (c L)`
    pub fn delta(&self) -> f64 {
        PI / (self.c * self.l_domain)
    }

    /// Temporal period `2 L / c`.
    pub fn time_period(&self) -> f64 {
        2.0 * self.l_domain / self.c
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let (c, d) = (self.c, self.delta());
        -2.0 * c * d * d / (1.0 - (1.0 - d * d).sqrt() * (c * d * (x - c * t)).cos())
    }
}

/// Interacting pair of line solitons with speeds `c1 != c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TwoSolitonRepr")]
pub struct TwoSolitonParams {
    c1: f64,
    c2: f64,
}

#[derive(Deserialize)]
struct TwoSolitonRepr {
    c1: f64,
    c2: f64,
}

impl TryFrom<TwoSolitonRepr> for TwoSolitonParams {
    type Error = BoError;
    fn try_from(r: TwoSolitonRepr) -> Result<Self> {
        TwoSolitonParams::new(r.c1, r.c2)
    }
}

impl TwoSolitonParams {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        for (name, c) in [("c1", c1), ("c2", c2)] {
            if !(c.is_finite() && c > 0.0) {
                return Err(BoError::param(name, format!("must be positive, got {c}")));
            }
        }
        if c1 == c2 {
            return Err(BoError::param("c2", "speeds must differ"));
        }
        Ok(TwoSolitonParams { c1, c2 })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let (c1, c2) = (self.c1, self.c2);
        let l1 = x - c1 * t;
        let l2 = x - c2 * t;
        let gap2 = (c1 - c2) * (c1 - c2);
        let sum = c1 + c2;
        let num = -4.0 * c1 * c2 * (c1 * l1 * l1 + c2 * l2 * l2 + sum.powi(3) / (c1 * c2 * gap2));
        let a = c1 * c2 * l1 * l2 - sum * sum / gap2;
        let b = c1 * l1 + c2 * l2;
        num / (a * a + b * b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactSolution {
    OneSoliton(OneSolitonParams),
    TwoSoliton(TwoSolitonParams),
}

impl ExactSolution {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            ExactSolution::OneSoliton(p) => p.eval(x, t),
            ExactSolution::TwoSoliton(p) => p.eval(x, t),
        }
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> Result<GridFunction> {
        sample_on_grid(self, grid, t)
    }

    pub fn pde_residual(&self, grid: &GridSpec, t: f64) -> Result<f64> {
        pde_residual(|x, s| self.eval(x, s), grid, t, Convention::Standard)
    }
}

pub fn sample_on_grid(solution: &ExactSolution, grid: &GridSpec, t: f64) -> Result<GridFunction> {
    GridFunction::from_fn(*grid, |x| solution.eval(x, t))
}

/// Sign convention plugged into [`pde_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `u_t = u u_x + H u_xx`
    Standard,
    /// `u_t + u u_x + H u_xx = 0`
    Flipped,
}

/// Time step of the centred difference used for `u_t`.
pub const RESIDUE_DT: f64 = 1e-6;

/// `max_j |u_t - u u_x - H u_xx|` at time `t`, with spatial derivatives and
/// the Hilbert transform taken spectrally on a periodic grid and `u_t` by a
/// centred difference of step [`RESIDUE_DT`].
pub fn pde_residual(u: impl Fn(f64, f64) -> f64, grid: &GridSpec, t: f64, convention: Convention) -> Result<f64> {
    grid.require(Topology::Periodic)?;
    let n = grid.n_points();
    let period = grid.period().unwrap_or(1.0);
    let xs = grid.coordinates();
    let now: Vec<f64> = xs.iter().map(|&x| u(x, t)).collect();
    let ut: Vec<f64> = xs
        .iter()
        .map(|&x| (u(x, t + RESIDUE_DT) - u(x, t - RESIDUE_DT)) / (2.0 * RESIDUE_DT))
        .collect();

    let plan = SpectralPlan::new(n);
    let k = wavenumbers(n, period);
    let mut spec = vec![Complex64::default(); n];
    plan.forward_real(&now, &mut spec);

    let mut ux_spec: Vec<Complex64> = spec.iter().zip(&k).map(|(s, &k)| s * Complex64::new(0.0, k)).collect();
    let mut hxx_spec: Vec<Complex64> = spec
        .iter()
        .zip(&k)
        .enumerate()
        .map(|(i, (s, &k))| s * (-k * k) * kernel_multiplier(n, i))
        .collect();
    let mut ux = vec![0.0; n];
    let mut hxx = vec![0.0; n];
    plan.inverse_real(&mut ux_spec, &mut ux)?;
    plan.inverse_real(&mut hxx_spec, &mut hxx)?;

    let sign = match convention {
        Convention::Standard => 1.0,
        Convention::Flipped => -1.0,
    };
    Ok((0..n).fold(0.0, |m, j| {
        let r = ut[j] - sign * (now[j] * ux[j] + hxx[j]);
        m.max(r.abs())
    }))
}
