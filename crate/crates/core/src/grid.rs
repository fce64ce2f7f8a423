//! Uniform one-dimensional grids and the discrete calculus on them.
//!
//! A [`GridFunction`] stores one sample per grid index, with
//! `values[j]` sitting at `x_j = origin + j * spacing`. Periodic grids wrap
//! indices modulo `N`; line grids behave as if the function were zero
//! outside the stored samples.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{BoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Periodic,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    n_points: usize,
    spacing: f64,
    origin: f64,
    topology: Topology,
}

impl GridSpec {
    /// Periodic grid on `[-l_domain, l_domain)` with `n_points` (odd) samples.
    pub fn periodic(n_points: usize, l_domain: f64) -> Result<Self> {
        if !(l_domain.is_finite() && l_domain > 0.0) {
            return Err(BoError::InvalidGrid(format!(
                "half-period must be positive, got {l_domain}"
            )));
        }
        Self::periodic_interval(n_points, -l_domain, l_domain)
    }

    /// Periodic grid covering one period `[a, b)`.
    pub fn periodic_interval(n_points: usize, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(BoError::InvalidGrid(format!("period interval [{a}, {b}) is empty")));
        }
        if n_points == 0 {
            return Err(BoError::InvalidGrid("grid has no points".into()));
        }
        if n_points % 2 == 0 {
            return Err(BoError::InvalidGrid(format!(
                "periodic grids need an odd number of points, got N = {n_points}"
            )));
        }
        let spacing = (b - a) / n_points as f64;
        Self::checked(n_points, spacing, a, Topology::Periodic)
    }

    pub fn line(n_points: usize, spacing: f64, origin: f64) -> Result<Self> {
        Self::checked(n_points, spacing, origin, Topology::Line)
    }

    /// Line grid with both endpoints of `[a, b]` as samples.
    pub fn line_interval(n_points: usize, a: f64, b: f64) -> Result<Self> {
        if n_points < 2 || !(b > a) {
            return Err(BoError::InvalidGrid(format!(
                "need at least two points on a non-empty interval, got {n_points} on [{a}, {b}]"
            )));
        }
        Self::line(n_points, (b - a) / (n_points - 1) as f64, a)
    }

    fn checked(n_points: usize, spacing: f64, origin: f64, topology: Topology) -> Result<Self> {
        if n_points == 0 {
            return Err(BoError::InvalidGrid("grid has no points".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(BoError::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        if !origin.is_finite() {
            return Err(BoError::InvalidGrid("origin must be finite".into()));
        }
        Ok(GridSpec {
            n_points,
            spacing,
            origin,
            topology,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_periodic(&self) -> bool {
        self.topology == Topology::Periodic
    }

    /// Length of one period, `N * dx`, for periodic grids.
    pub fn period(&self) -> Option<f64> {
        self.is_periodic().then_some(self.spacing * self.n_points as f64)
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.spacing
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Same grid with a different origin.
    pub fn with_origin(&self, origin: f64) -> Result<Self> {
        Self::checked(self.n_points, self.spacing, origin, self.topology)
    }

    /// Line grid extended by `left` and `right` points on either side.
    pub fn padded(&self, left: usize, right: usize) -> Result<Self> {
        if self.is_periodic() {
            return Err(BoError::WrongTopology {
                expected: Topology::Line,
            });
        }
        Self::line(
            self.n_points + left + right,
            self.spacing,
            self.origin - left as f64 * self.spacing,
        )
    }

    pub(crate) fn require(&self, topology: Topology) -> Result<()> {
        if self.topology == topology {
            Ok(())
        } else {
            Err(BoError::WrongTopology { expected: topology })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difference {
    Forward,
    Backward,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Average {
    /// `(p[j+1] + p[j] + p[j-1]) / 3`
    ThreePoint,
    /// `(p[j+1] + p[j-1]) / 2`
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h2: f64,
    pub inf: f64,
}

/// Samples of a real function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(BoError::LengthMismatch {
                expected: grid.n_points,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(BoError::NonFinite { index });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        GridFunction {
            grid,
            values: vec![0.0; grid.n_points],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, (0..grid.n_points).map(|j| f(grid.x(j))).collect())
    }

    /// Wraps freshly computed values, scanning for NaN/Inf unless the
    /// `finite-checks` feature is off.
    pub(crate) fn produced(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(values.len(), grid.n_points);
        #[cfg(feature = "finite-checks")]
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(BoError::NonFinite { index });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(BoError::GridMismatch)
        }
    }

    pub fn difference(&self, kind: Difference) -> Result<GridFunction> {
        let mut out = vec![0.0; self.len()];
        let (u, dx, periodic) = (&self.values[..], self.grid.spacing, self.grid.is_periodic());
        match kind {
            Difference::Forward => stencil::forward(u, dx, periodic, &mut out),
            Difference::Backward => stencil::backward(u, dx, periodic, &mut out),
            Difference::Central => stencil::central(u, dx, periodic, &mut out),
        }
        Self::produced(self.grid, out)
    }

    /// `D+ D-`, the three-point second difference.
    pub fn second_difference(&self) -> Result<GridFunction> {
        let mut out = vec![0.0; self.len()];
        stencil::second(&self.values, self.grid.spacing, self.grid.is_periodic(), &mut out);
        Self::produced(self.grid, out)
    }

    pub fn average(&self, kind: Average) -> Result<GridFunction> {
        let mut out = vec![0.0; self.len()];
        let periodic = self.grid.is_periodic();
        match kind {
            Average::ThreePoint => stencil::average3(&self.values, periodic, &mut out),
            Average::TwoPoint => stencil::average2(&self.values, periodic, &mut out),
        }
        Self::produced(self.grid, out)
    }

    /// Shift operator: `S+ p(x) = p(x + dx)` for `forward`, `S-` otherwise.
    pub fn shift(&self, forward: bool) -> Result<GridFunction> {
        let periodic = self.grid.is_periodic();
        let u = &self.values;
        let out = (0..u.len() as isize)
            .map(|j| stencil::at(u, if forward { j + 1 } else { j - 1 }, periodic))
            .collect();
        Self::produced(self.grid, out)
    }

    /// `dx * sum_j p_j q_j`
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.grid.spacing * dot(&self.values, &other.values))
    }

    pub fn l2_norm(&self) -> f64 {
        stencil::l2(&self.values, self.grid.spacing)
    }

    pub fn inf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(|p|^2 + |D+ p|^2 + |D+ D- p|^2)^{1/2}`
    pub fn h2_norm(&self) -> f64 {
        stencil::h2(&self.values, self.grid.spacing, self.grid.is_periodic())
    }

    pub fn norms(&self) -> Norms {
        Norms {
            l2: self.l2_norm(),
            h2: self.h2_norm(),
            inf: self.inf_norm(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, k: f64) -> Result<GridFunction> {
        Self::produced(self.grid, self.values.iter().map(|v| k * v).collect())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        self.same_grid(other)?;
        let out = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::produced(self.grid, out)
    }

    /// Unnormalized DFT, `u_hat[k] = sum_n u[n] exp(-2 pi i k n / N)`.
    pub fn dft(&self) -> Result<Vec<Complex64>> {
        self.grid.require(Topology::Periodic)?;
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        Ok(buf)
    }

    /// Inverse of [`GridFunction::dft`]. Fails if the spectrum does not
    /// describe a real function to within roundoff.
    pub fn idft(grid: GridSpec, spectrum: &[Complex64]) -> Result<GridFunction> {
        grid.require(Topology::Periodic)?;
        if spectrum.len() != grid.n_points {
            return Err(BoError::LengthMismatch {
                expected: grid.n_points,
                got: spectrum.len(),
            });
        }
        let mut buf = spectrum.to_vec();
        FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
        let values = crate::spectral::real_part_checked(&buf)?;
        Self::produced(grid, values)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Slice-level stencils shared by the public operators and the stepper's
/// allocation-free inner loop.
pub(crate) mod stencil {
    #[inline]
    pub fn at(u: &[f64], j: isize, periodic: bool) -> f64 {
        let n = u.len() as isize;
        if periodic {
            u[j.rem_euclid(n) as usize]
        } else if (0..n).contains(&j) {
            u[j as usize]
        } else {
            0.0
        }
    }

    /// Calls `f(j, u[j-1], u[j], u[j+1])` for every index.
    #[inline]
    fn each(u: &[f64], periodic: bool, mut f: impl FnMut(usize, f64, f64, f64)) {
        let n = u.len();
        if n == 0 {
            return;
        }
        if n == 1 {
            let v = if periodic { u[0] } else { 0.0 };
            f(0, v, u[0], v);
            return;
        }
        f(0, at(u, -1, periodic), u[0], u[1]);
        for j in 1..n - 1 {
            f(j, u[j - 1], u[j], u[j + 1]);
        }
        f(n - 1, u[n - 2], u[n - 1], at(u, n as isize, periodic));
    }

    pub fn forward(u: &[f64], dx: f64, periodic: bool, out: &mut [f64]) {
        each(u, periodic, |j, _, c, r| out[j] = (r - c) / dx);
    }

    pub fn backward(u: &[f64], dx: f64, periodic: bool, out: &mut [f64]) {
        each(u, periodic, |j, l, c, _| out[j] = (c - l) / dx);
    }

    pub fn central(u: &[f64], dx: f64, periodic: bool, out: &mut [f64]) {
        each(u, periodic, |j, l, _, r| out[j] = (r - l) / (2.0 * dx));
    }

    pub fn second(u: &[f64], dx: f64, periodic: bool, out: &mut [f64]) {
        let inv = 1.0 / (dx * dx);
        each(u, periodic, |j, l, c, r| out[j] = (r - 2.0 * c + l) * inv);
    }

    pub fn average3(u: &[f64], periodic: bool, out: &mut [f64]) {
        each(u, periodic, |j, l, c, r| out[j] = (r + c + l) / 3.0);
    }

    pub fn average2(u: &[f64], periodic: bool, out: &mut [f64]) {
        each(u, periodic, |j, l, _, r| out[j] = 0.5 * (r + l));
    }

    /// `<u> * Du`
    pub fn nonlinear(u: &[f64], dx: f64, periodic: bool, out: &mut [f64]) {
        let half = 0.5 / dx;
        each(u, periodic, |j, l, c, r| out[j] = (r + c + l) / 3.0 * (r - l) * half);
    }

    pub fn l2(u: &[f64], dx: f64) -> f64 {
        (dx * super::dot(u, u)).sqrt()
    }

    pub fn h2(u: &[f64], dx: f64, periodic: bool) -> f64 {
        let inv = 1.0 / dx;
        let inv2 = inv * inv;
        // Line grids: the forward difference and second difference of the
        // zero-extended function also live one point left of the support.
        let (mut d1, mut d2) = if periodic {
            (0.0, 0.0)
        } else {
            let u0 = u.first().copied().unwrap_or(0.0);
            ((u0 * inv).powi(2), (u0 * inv2).powi(2))
        };
        each(u, periodic, |_, l, c, r| {
            d1 += ((r - c) * inv).powi(2);
            d2 += ((r - 2.0 * c + l) * inv2).powi(2);
        });
        if !periodic {
            if let Some(&last) = u.last() {
                d2 += (last * inv2).powi(2);
            }
        }
        (dx * (super::dot(u, u) + d1 + d2)).sqrt()
    }
}
