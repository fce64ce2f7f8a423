//! Discrete Hilbert transforms.
//!
//! On the line the transform is the odd-offset quadrature
//!
//! ```text
//! (H u)_j = 1/pi * sum_{k != j} u_k (1 - (-1)^(j-k)) / (j - k)
//! ```
//!
//! and on a periodic grid of odd size `N` it is circular convolution with
//! the weights
//!
//! ```text
//! c_n = (1 - (-1)^n)/(2N) cot(pi n / 2N) - (1 + (-1)^n)/(2N) tan(pi n / 2N)
//! ```
//!
//! whose DFT is `0` at `n = 0`, `-i` for `1 <= n <= (N-1)/2` and `+i` above.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{BoError, Result};
use crate::grid::{GridFunction, GridSpec, Topology};
use crate::spectral::SpectralPlan;

/// Tolerance of the build-time check `dft(c) == c_hat`.
const CROSS_CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HilbertPath {
    /// O(N^2) circular convolution with `c`.
    Direct,
    /// Multiply the DFT by `c_hat` and invert.
    #[default]
    Spectral,
}

/// Convolution weights and DFT multiplier of the periodic transform.
#[derive(Debug, Clone)]
pub struct PeriodicHilbertKernel {
    n: usize,
    c: Vec<f64>,
    c_hat: Vec<Complex64>,
    plan: SpectralPlan,
}

/// Closed-form weight `c_n`.
pub fn kernel_weight(n_points: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let big_n = n_points as f64;
    let theta = PI * n as f64 / (2.0 * big_n);
    if n % 2 == 1 {
        1.0 / (big_n * theta.tan())
    } else {
        -theta.tan() / big_n
    }
}

/// Closed-form multiplier `c_hat_n`.
pub fn kernel_multiplier(n_points: usize, n: usize) -> Complex64 {
    if n == 0 {
        Complex64::new(0.0, 0.0)
    } else if n <= (n_points - 1) / 2 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

pub fn build_periodic_kernel(n_points: usize) -> Result<PeriodicHilbertKernel> {
    PeriodicHilbertKernel::new(n_points)
}

impl PeriodicHilbertKernel {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 3 || n_points % 2 == 0 {
            return Err(BoError::InvalidKernelSize { n: n_points });
        }
        let c: Vec<f64> = (0..n_points).map(|n| kernel_weight(n_points, n)).collect();
        let c_hat: Vec<Complex64> = (0..n_points).map(|n| kernel_multiplier(n_points, n)).collect();
        let plan = SpectralPlan::new(n_points);
        let kernel = PeriodicHilbertKernel {
            n: n_points,
            c,
            c_hat,
            plan,
        };
        let defect = kernel.cross_check_defect();
        if defect > CROSS_CHECK_TOLERANCE {
            return Err(BoError::KernelCrossCheck { defect });
        }
        Ok(kernel)
    }

    /// `max_n |dft(c)_n - c_hat_n|`
    pub fn cross_check_defect(&self) -> f64 {
        let mut spec = vec![Complex64::default(); self.n];
        self.plan.forward_real(&self.c, &mut spec);
        spec.iter()
            .zip(&self.c_hat)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.c
    }

    pub fn multiplier(&self) -> &[Complex64] {
        &self.c_hat
    }

    pub(crate) fn plan(&self) -> &SpectralPlan {
        &self.plan
    }

    /// Copy with one weight perturbed, leaving the multiplier untouched.
    /// Lets callers confirm that the operator checks notice a bad kernel.
    #[doc(hidden)]
    pub fn with_corrupted_weight(&self, index: usize, delta: f64) -> Self {
        let mut k = self.clone();
        k.c[index % self.n] += delta;
        k
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        grid.require(Topology::Periodic)?;
        if grid.n_points() != self.n {
            return Err(BoError::KernelMismatch {
                kernel: self.n,
                grid: grid.n_points(),
            });
        }
        Ok(())
    }

    /// `(c * u)_j = sum_k c_{(j-k) mod N} u_k`
    pub(crate) fn convolve_into(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &uk) in u.iter().enumerate() {
                acc += self.c[(j + n - k) % n] * uk;
            }
            *o = acc;
        }
    }

    pub(crate) fn spectral_into(&self, u: &[f64], spec: &mut [Complex64], out: &mut [f64]) -> Result<()> {
        self.plan.forward_real(u, spec);
        for (s, m) in spec.iter_mut().zip(&self.c_hat) {
            *s *= m;
        }
        self.plan.inverse_real(spec, out)
    }
}

pub fn hilbert_periodic(u: &GridFunction, kernel: &PeriodicHilbertKernel, path: HilbertPath) -> Result<GridFunction> {
    kernel.check(u.grid())?;
    let mut out = vec![0.0; u.len()];
    match path {
        HilbertPath::Direct => kernel.convolve_into(u.values(), &mut out),
        HilbertPath::Spectral => {
            let mut spec = vec![Complex64::default(); u.len()];
            kernel.spectral_into(u.values(), &mut spec, &mut out)?;
        }
    }
    GridFunction::produced(*u.grid(), out)
}

/// Full-line transform evaluated on the input grid extended by one input
/// width on each side.
pub fn hilbert_line(u: &GridFunction) -> Result<GridFunction> {
    u.grid().require(Topology::Line)?;
    let pad = u.len();
    let out = u.grid().padded(pad, pad)?;
    hilbert_line_on(u, &out)
}

/// Full-line transform of the zero-extended `u`, evaluated on `out_grid`.
/// The output grid must share the spacing of the input and have its points
/// on the same lattice.
pub fn hilbert_line_on(u: &GridFunction, out_grid: &GridSpec) -> Result<GridFunction> {
    let grid = u.grid();
    grid.require(Topology::Line)?;
    out_grid.require(Topology::Line)?;
    let dx = grid.spacing();
    if (out_grid.spacing() - dx).abs() > 1e-12 * dx {
        return Err(BoError::GridMismatch);
    }
    let shift = (out_grid.origin() - grid.origin()) / dx;
    let offset = shift.round();
    if (shift - offset).abs() > 1e-9 {
        return Err(BoError::GridMismatch);
    }
    let offset = offset as i64;

    // 2/(pi m) for odd m, indexed by |m|
    let n_in = u.len() as i64;
    let n_out = out_grid.n_points() as i64;
    let reach = (n_out + n_in + offset.abs()) as usize + 1;
    let weights: Vec<f64> = (0..reach)
        .map(|m| if m % 2 == 1 { 2.0 / (PI * m as f64) } else { 0.0 })
        .collect();

    let vals = u.values();
    let out: Vec<f64> = (0..n_out)
        .map(|j| {
            let jj = j + offset;
            // Only k with jj - k odd contribute.
            let start = if (jj - 1).rem_euclid(2) == 0 { 0 } else { 1 };
            let mut acc = 0.0;
            let mut k = start;
            while k < n_in {
                let m = jj - k;
                let w = weights[m.unsigned_abs() as usize];
                acc += if m > 0 { w } else { -w } * vals[k as usize];
                k += 2;
            }
            acc
        })
        .collect();
    GridFunction::produced(*out_grid, out)
}
