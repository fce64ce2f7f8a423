//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random trigonometric polynomial with `modes` modes on `n` periodic points.
pub fn smooth(rng: &mut ChaCha8Rng, n: usize, modes: usize, amplitude: f64) -> Vec<f64> {
    let coeffs: Vec<(f64, f64)> = (0..=modes)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    (0..n)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / n as f64;
            amplitude
                * coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, (a, b))| a * (k as f64 * th).cos() + b * (k as f64 * th).sin())
                    .sum::<f64>()
        })
        .collect()
}

fn wrap(n: usize, j: isize) -> usize {
    j.rem_euclid(n as isize) as usize
}

pub fn get(u: &[f64], j: isize, periodic: bool) -> f64 {
    if periodic {
        u[wrap(u.len(), j)]
    } else if j < 0 || j as usize >= u.len() {
        0.0
    } else {
        u[j as usize]
    }
}

pub fn dplus(u: &[f64], dx: f64, periodic: bool) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|j| (get(u, j + 1, periodic) - get(u, j, periodic)) / dx)
        .collect()
}

pub fn dminus(u: &[f64], dx: f64, periodic: bool) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|j| (get(u, j, periodic) - get(u, j - 1, periodic)) / dx)
        .collect()
}

pub fn dcentral(u: &[f64], dx: f64, periodic: bool) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|j| (get(u, j + 1, periodic) - get(u, j - 1, periodic)) / (2.0 * dx))
        .collect()
}

pub fn shift_minus(u: &[f64]) -> Vec<f64> {
    (0..u.len() as isize).map(|j| get(u, j - 1, true)).collect()
}

pub fn ave3(u: &[f64], periodic: bool) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|j| (get(u, j + 1, periodic) + get(u, j, periodic) + get(u, j - 1, periodic)) / 3.0)
        .collect()
}

pub fn ave2(u: &[f64], periodic: bool) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|j| (get(u, j + 1, periodic) + get(u, j - 1, periodic)) / 2.0)
        .collect()
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub fn ip(a: &[f64], b: &[f64], dx: f64) -> f64 {
    dx * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

pub fn norm(a: &[f64], dx: f64) -> f64 {
    ip(a, a, dx).sqrt()
}

pub fn inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `G(u) = <u> Du`, periodic.
pub fn g(u: &[f64], dx: f64) -> Vec<f64> {
    mul(&ave3(u, true), &dcentral(u, dx, true))
}

/// `sum_n u_n exp(-2 pi i k n / N)` by direct summation; (re, im) pairs.
pub fn naive_dft(u: &[f64]) -> Vec<(f64, f64)> {
    let n = u.len();
    (0..n)
        .map(|k| {
            u.iter().enumerate().fold((0.0, 0.0), |(re, im), (m, &x)| {
                let th = -2.0 * PI * ((k * m) % n) as f64 / n as f64;
                (re + x * th.cos(), im + x * th.sin())
            })
        })
        .collect()
}

/// Imaginary part of the multiplier pattern: 0, then -1 on the lower
/// half of the modes, +1 on the upper half.
pub fn multiplier_im(n: usize, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else if k <= (n - 1) / 2 {
        -1.0
    } else {
        1.0
    }
}

/// Periodic kernel as the inverse DFT of the multiplier pattern.
pub fn kernel_from_multiplier(n: usize) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let s: f64 = (0..n)
                .map(|k| {
                    // Re(i * im * e^{i th}) = -im * sin(th)
                    let th = 2.0 * PI * ((k * m) % n) as f64 / n as f64;
                    -multiplier_im(n, k) * th.sin()
                })
                .sum();
            s / n as f64
        })
        .collect()
}

pub type Matrix = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Dense circulant convolution matrix: `(Cu)_j = sum_k c_{(j-k) mod N} u_k`.
pub fn hilbert_matrix(n: usize) -> Matrix {
    let c = kernel_from_multiplier(n);
    (0..n).map(|j| (0..n).map(|k| c[(j + n - k) % n]).collect()).collect()
}

/// Dense periodic `D+D-`.
pub fn laplacian_matrix(n: usize, dx: f64) -> Matrix {
    let mut a = vec![vec![0.0; n]; n];
    for (j, row) in a.iter_mut().enumerate() {
        row[j] = -2.0 / (dx * dx);
        row[(j + 1) % n] += 1.0 / (dx * dx);
        row[(j + n - 1) % n] += 1.0 / (dx * dx);
    }
    a
}

/// Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .cloned()
        .zip(b)
        .map(|(mut r, &v)| {
            r.push(v);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            let pivot = m[col].clone();
            for (x, p) in m[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// `I - dt/2 * H D+D-` as a dense matrix.
pub fn cn_matrix(n: usize, dx: f64, dt: f64) -> (Matrix, Matrix) {
    let a = matmul(&hilbert_matrix(n), &laplacian_matrix(n, dx));
    let lhs = identity(n)
        .into_iter()
        .zip(&a)
        .map(|(row, ar)| row.iter().zip(ar).map(|(i, x)| i - 0.5 * dt * x).collect())
        .collect();
    (lhs, a)
}

/// Discrete `h2` norm of a periodic grid function.
pub fn h2(u: &[f64], dx: f64) -> f64 {
    let d = dplus(u, dx, true);
    let dd = dplus(&dminus(u, dx, true), dx, true);
    (norm(u, dx).powi(2) + norm(&d, dx).powi(2) + norm(&dd, dx).powi(2)).sqrt()
}

/// Crank-Nicolson step by dense fixed-point iteration, run until the h2
/// increment falls below `tol * h2(v)`.
pub fn dense_step(v: &[f64], dx: f64, dt: f64, tol: f64) -> Vec<f64> {
    let n = v.len();
    let (lhs, a) = cn_matrix(n, dx, dt);
    let av = matvec(&a, v);
    let scale = h2(v, dx).max(f64::MIN_POSITIVE);
    let mut w = v.to_vec();
    for _ in 0..500 {
        let mid: Vec<f64> = v.iter().zip(&w).map(|(p, q)| 0.5 * (p + q)).collect();
        let gm = g(&mid, dx);
        let rhs: Vec<f64> = (0..n).map(|j| v[j] + dt * gm[j] + 0.5 * dt * av[j]).collect();
        let next = solve(&lhs, &rhs);
        let inc: Vec<f64> = next.iter().zip(&w).map(|(p, q)| p - q).collect();
        w = next;
        if h2(&inc, dx) <= tol * scale {
            return w;
        }
    }
    panic!("dense fixed point did not converge");
}

/// Line transform by the defining double sum on an arbitrary output range
/// of integer offsets relative to the input's first point.
pub fn line_hilbert(u: &[f64], out_offsets: std::ops::Range<i64>) -> Vec<f64> {
    out_offsets
        .map(|j| {
            u.iter()
                .enumerate()
                .filter_map(|(k, &uk)| {
                    let d = j - k as i64;
                    (d % 2 != 0).then(|| uk * 2.0 / (PI * d as f64))
                })
                .sum()
        })
        .collect()
}

/// Principal-value Hilbert transform `(1/pi) PV int f(y)/(x-y) dy` by
/// adaptive Simpson quadrature of the symmetrised integrand
/// `(f(x-s) - f(x+s)) / s` over `s` in `(0, s_max]`.
pub fn pv_hilbert(f: &dyn Fn(f64) -> f64, x: f64, s_max: f64, tol: f64) -> f64 {
    let h = |s: f64| {
        if s == 0.0 {
            // limit: -2 f'(x), approximated by a symmetric difference
            let e = 1e-6;
            -(f(x + e) - f(x - e)) / e
        } else {
            (f(x - s) - f(x + s)) / s
        }
    };
    adaptive_simpson(&h, 0.0, s_max, tol, 50) / PI
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
