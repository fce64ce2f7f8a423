//! FFT plumbing for periodic grids.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{BoError, Result};

/// Relative size of imaginary residue (after inversion) or spectral
/// asymmetry (before inversion) tolerated for a real-valued result.
pub const RESIDUE_TOLERANCE: f64 = 1e-12;

/// Forward/inverse FFT plans of one length. Plans are immutable and
/// shareable; every call brings its own buffers.
#[derive(Clone)]
pub struct SpectralPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralPlan").field("n", &self.n).finish()
    }
}

impl SpectralPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        SpectralPlan {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Forward transform of real data. The output is projected onto exact
    /// conjugate symmetry, removing FFT roundoff only.
    pub fn forward_real(&self, input: &[f64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), self.n);
        for (o, &v) in out.iter_mut().zip(input) {
            *o = Complex64::new(v, 0.0);
        }
        self.forward.process(out);
        project_symmetric(out);
    }

    /// Inverts `spectrum` in place (destroying it) and writes the real part,
    /// normalized by `1/N`, into `out`. The spectrum must be conjugate
    /// symmetric to within [`RESIDUE_TOLERANCE`]; it is symmetrized exactly
    /// before inversion.
    pub fn inverse_real(&self, spectrum: &mut [Complex64], out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(spectrum.len(), self.n);
        symmetrize(spectrum)?;
        self.inverse.process(spectrum);
        let scale = 1.0 / self.n as f64;
        for (o, s) in out.iter_mut().zip(spectrum.iter()) {
            *o = s.re * scale;
        }
        Ok(())
    }
}

fn project_symmetric(spectrum: &mut [Complex64]) -> f64 {
    let n = spectrum.len();
    if n == 0 {
        return 0.0;
    }
    let mut defect = spectrum[0].im.abs();
    for k in 1..=n / 2 {
        let a = spectrum[k];
        let b = spectrum[n - k].conj();
        defect = defect.max((a - b).norm());
        let mean = 0.5 * (a + b);
        spectrum[k] = mean;
        spectrum[n - k] = mean.conj();
    }
    spectrum[0].im = 0.0;
    defect
}

/// Enforces `X[N-k] = conj(X[k])`, failing if the asymmetry is above
/// roundoff relative to the largest coefficient.
fn symmetrize(spectrum: &mut [Complex64]) -> Result<()> {
    let n = spectrum.len();
    if n == 0 {
        return Ok(());
    }
    let scale = spectrum.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let defect = project_symmetric(spectrum);
    if defect > RESIDUE_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        return Err(BoError::SpectralResidue {
            residue: defect / scale,
        });
    }
    Ok(())
}

/// Real part of an (already inverted, unnormalized) transform after checking
/// that the imaginary residue is negligible. Applies the `1/N` factor.
pub(crate) fn real_part_checked(buf: &[Complex64]) -> Result<Vec<f64>> {
    let n = buf.len() as f64;
    let re_max = buf.iter().fold(0.0_f64, |m, c| m.max(c.re.abs()));
    let im_max = buf.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
    if im_max > RESIDUE_TOLERANCE * re_max.max(f64::MIN_POSITIVE) && im_max > f64::EPSILON * n {
        return Err(BoError::SpectralResidue {
            residue: im_max / re_max.max(f64::MIN_POSITIVE),
        });
    }
    Ok(buf.iter().map(|c| c.re / n).collect())
}

/// Angular wavenumbers `2 pi k / period` in FFT order, `|k| <= (N-1)/2`.
pub fn wavenumbers(n: usize, period: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / period;
    (0..n)
        .map(|k| {
            let signed = if k <= (n - 1) / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            base * signed
        })
        .collect()
}
