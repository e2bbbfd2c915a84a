//! Shared helpers for the integration suites: an independent reference
//! decomposition and seeded random-state generators.

// the rotation updates below index two columns of the same matrix in
// lockstep; iterator forms obscure that symmetry
#![allow(clippy::needless_range_loop)]

use embezzle_core::{AmplitudeMatrix, Complex64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Reference singular values, computed without touching the production SVD:
/// form the Gram matrix A†A, embed it as the real symmetric
/// [[Re, -Im], [Im, Re]] (every eigenvalue of the Hermitian original
/// appears twice), diagonalize by textbook cyclic Jacobi rotations, and
/// take square roots of every second sorted eigenvalue.
pub fn reference_singular_values(amp: &AmplitudeMatrix) -> Vec<f64> {
    let rows = amp.rows();
    let cols = amp.cols();
    let mut gram = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..rows {
                s += amp.entry(k, i).conj() * amp.entry(k, j);
            }
            gram[i * cols + j] = s;
        }
    }
    let d = 2 * cols;
    let mut m = vec![vec![0.0f64; d]; d];
    for i in 0..cols {
        for j in 0..cols {
            let g = gram[i * cols + j];
            m[i][j] = g.re;
            m[i][j + cols] = -g.im;
            m[i + cols][j] = g.im;
            m[i + cols][j + cols] = g.re;
        }
    }
    let mut eigs = jacobi_eigenvalues(m);
    eigs.sort_by(|a, b| b.total_cmp(a));
    (0..cols).map(|i| eigs[2 * i].max(0.0).sqrt()).collect()
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix; returns the
/// eigenvalues (diagonal after convergence).
fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let d = m.len();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += m[p][q] * m[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..d).map(|i| m[i][i]).collect()
}

/// Uniform point on the probability simplex, returned as Schmidt
/// coefficients (square roots).
pub fn random_schmidt_coeffs(rng: &mut ChaCha8Rng, rank: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..rank)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && draws.iter().all(|d| d.is_finite()) {
            return draws.iter().map(|d| (d / total).sqrt()).collect();
        }
    }
}

/// Random pure state on a rows x cols system: complex Gaussian entries,
/// Frobenius-normalized.
pub fn random_amplitude_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> AmplitudeMatrix {
    loop {
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let theta = std::f64::consts::TAU * u2;
            entries.push(Complex64::new(r * theta.cos(), r * theta.sin()));
        }
        let norm: f64 = entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let entries: Vec<Complex64> = entries.iter().map(|e| e / norm).collect();
            if let Ok(amp) = AmplitudeMatrix::new(rows, cols, entries) {
                return amp;
            }
        }
    }
}
