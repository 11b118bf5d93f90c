//! Perron root and vectors of positive matrices by shifted power iteration.
//!
//! Stopping uses the Collatz-Wielandt bracket
//! `min_i (Aw)_i / w_i <= lambda_max <= max_i (Aw)_i / w_i`,
//! so a converged result certifies `lambda_max` to the requested relative width.
//!
//! Iterating with `A + sI` for `s >= 0` keeps the Perron vector and can only
//! improve the dominance ratio of a positive matrix. The shift tracks
//! `(lambda - n) / (n - 1)`, minus the mean of the remaining eigenvalues of a
//! reciprocal matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcm::{positions, ComparisonMatrix};

/// Relative width of the Collatz-Wielandt bracket accepted as converged.
pub const DEFAULT_LAMBDA_TOL: f64 = 1e-12;

/// Iteration cap per order of the matrix.
pub const ITERATIONS_PER_ORDER: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perron {
    pub lambda_max: f64,
    /// Right Perron vector normalised to sum 1.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `||A w - lambda w||_inf / ||w||_inf` at the returned vector.
    pub residual: f64,
}

/// Largest eigenvalue and right Perron vector of a comparison matrix.
pub fn lambda_max(a: &ComparisonMatrix, tol: f64) -> Result<Perron> {
    perron_dense(a.as_slice(), a.n(), false, tol, ITERATIONS_PER_ORDER * a.n())
}

/// Left Perron vector of a comparison matrix (right vector of `A^T`).
pub fn left_perron(a: &ComparisonMatrix, tol: f64) -> Result<Perron> {
    perron_dense(a.as_slice(), a.n(), true, tol, ITERATIONS_PER_ORDER * a.n())
}

#[inline]
fn entry(data: &[f64], n: usize, transpose: bool, i: usize, j: usize) -> f64 {
    if transpose {
        data[j * n + i]
    } else {
        data[i * n + j]
    }
}

/// Power iteration on a positive row-major `n x n` matrix (or its transpose).
pub fn perron_dense(data: &[f64], n: usize, transpose: bool, tol: f64, max_iter: usize) -> Result<Perron> {
    // Row geometric means: exact for consistent matrices.
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let s: f64 = (0..n).map(|j| entry(data, n, transpose, i, j).ln()).sum();
            (s / n as f64).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);

    let mut y = vec![0.0; n];
    let nf = n as f64;
    for iter in 1..=max_iter.max(1) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..n).map(|j| entry(data, n, transpose, i, j) * w[j]).sum();
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, wi) in y.iter().zip(&w) {
            let r = yi / wi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let estimate: f64 = y.iter().sum::<f64>() / w.iter().sum::<f64>();
        if hi - lo <= tol * hi {
            let wmax = w.iter().cloned().fold(0.0, f64::max);
            let residual = y
                .iter()
                .zip(&w)
                .map(|(yi, wi)| (yi - estimate * wi).abs())
                .fold(0.0, f64::max)
                / wmax;
            return Ok(Perron {
                lambda_max: estimate,
                vector: w,
                iterations: iter,
                residual,
            });
        }
        let shift = ((estimate - nf) / (nf - 1.0)).max(0.0);
        let mut sum = 0.0;
        for (wi, yi) in w.iter_mut().zip(&y) {
            *wi = yi + shift * *wi;
            sum += *wi;
        }
        w.iter_mut().for_each(|v| *v /= sum);
    }
    Err(Error::ConvergenceFailure { iterations: max_iter })
}

/// Gradient of `lambda_max(exp X)` with respect to the upper-triangle log entries.
///
/// For a simple eigenvalue `d lambda / d a_ij = v_i w_j / (v . w)`; moving
/// `x_ij` changes both `a_ij = e^x` and `a_ji = e^-x`.
pub fn lambda_gradient(a: &ComparisonMatrix, tol: f64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let right = lambda_max(a, tol)?;
    let left = left_perron(a, tol)?;
    let (v, w) = (&left.vector, &right.vector);
    let vw: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
    let grad = positions(a.n())
        .into_iter()
        .map(|p| {
            let (i, j) = (p.row(), p.col());
            (a.get(i, j) * v[i] * w[j] - a.get(j, i) * v[j] * w[i]) / vw
        })
        .collect();
    Ok((right.lambda_max, right.vector, grad))
}

/// `max_i sum_j exp(x_ij + z_j - z_i)`: the min-max bound on `lambda_max`
/// evaluated at a given scaling vector `z`.
pub fn frobenius_bound(a: &ComparisonMatrix, z: &[f64]) -> f64 {
    let n = a.n();
    (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j) * (z[j] - z[i]).exp()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}
