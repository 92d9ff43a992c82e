//! Lanczos propagation of exp(-i H t) psi with adaptive substeps.
//!
//! Each substep builds an orthonormal Krylov basis from the current state
//! (full reorthogonalization), diagonalizes the tridiagonal projection and
//! picks the largest step whose a-posteriori error estimate
//! beta_m |e_m^T exp(-i T tau) e_1| fits the step's share of the tolerance.
//! The basis does not depend on tau, so shrinking a rejected step is cheap.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};

const MAX_SUBSTEPS: usize = 1_000_000;
/// Basis sizes at which the error estimate is checked before growing further.
const CHECKPOINTS: [usize; 7] = [4, 6, 8, 11, 14, 18, 23];

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub substeps: usize,
    pub matvecs: usize,
    /// Sum of the accepted per-step error estimates.
    pub error_estimate: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Small exponential exp(-i T tau) e_1 from the eigensystem of T.
struct Projected {
    q: DMatrix<f64>,
    lambda: Vec<f64>,
}

impl Projected {
    fn new(alpha: &[f64], beta: &[f64]) -> Self {
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            t[(k, k)] = alpha[k];
            if k + 1 < m {
                t[(k, k + 1)] = beta[k];
                t[(k + 1, k)] = beta[k];
            }
        }
        let eig = SymmetricEigen::new(t);
        Self {
            q: eig.eigenvectors,
            lambda: eig.eigenvalues.iter().copied().collect(),
        }
    }

    fn coefficients(&self, tau: f64) -> Vec<Complex64> {
        let m = self.lambda.len();
        let weights: Vec<Complex64> = (0..m)
            .map(|j| self.q[(0, j)] * Complex64::from_polar(1.0, -self.lambda[j] * tau))
            .collect();
        (0..m)
            .map(|i| (0..m).map(|j| weights[j] * self.q[(i, j)]).sum())
            .collect()
    }
}

/// Scratch space reused across substeps.
pub struct KrylovWorkspace {
    basis: Vec<Vec<Complex64>>,
    w: Vec<Complex64>,
}

impl KrylovWorkspace {
    pub fn new(dim: usize, max_dim: usize) -> Self {
        Self {
            basis: (0..=max_dim).map(|_| vec![Complex64::new(0.0, 0.0); dim]).collect(),
            w: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Empty workspace of the same shape.
    pub fn fresh(&self) -> Self {
        Self::new(self.w.len(), self.basis.len() - 1)
    }
}

/// psi <- exp(-i H t) psi with total error estimate below `tol` (L2, relative to |psi|).
pub fn propagate(h: &Hamiltonian, psi: &mut [Complex64], t: f64, tol: f64, max_dim: usize) -> Result<KrylovStats> {
    let mut ws = KrylovWorkspace::new(psi.len(), max_dim.max(2));
    propagate_with(h, psi, t, tol, max_dim.max(2), &mut ws)
}

pub fn propagate_with(
    h: &Hamiltonian,
    psi: &mut [Complex64],
    t: f64,
    tol: f64,
    max_dim: usize,
    ws: &mut KrylovWorkspace,
) -> Result<KrylovStats> {
    let mut stats = KrylovStats::default();
    if t == 0.0 {
        return Ok(stats);
    }
    let dim = psi.len();
    let max_dim = max_dim.min(dim).max(1);
    if ws.basis.len() < max_dim + 1 || ws.w.len() != dim {
        *ws = KrylovWorkspace::new(dim, max_dim);
    }
    let scale = h.norm_bound().max(1e-300);
    let mut remaining = t;
    let mut tau = t;
    while remaining > 0.0 {
        if stats.substeps >= MAX_SUBSTEPS {
            return Err(Error::KrylovNonConvergence {
                krylov_dim: max_dim,
                step: tau,
                residual: f64::NAN,
            });
        }
        let beta0 = norm(psi);
        if beta0 == 0.0 {
            return Ok(stats);
        }
        // Lanczos with full reorthogonalization
        for (b, p) in ws.basis[0].iter_mut().zip(psi.iter()) {
            *b = p / beta0;
        }
        let mut alpha = Vec::with_capacity(max_dim);
        let mut beta: Vec<f64> = Vec::with_capacity(max_dim);
        let mut breakdown = false;
        let mut m = 0;
        while m < max_dim {
            let (head, tail) = ws.basis.split_at_mut(m + 1);
            let v = &head[m];
            h.apply(v, &mut ws.w);
            stats.matvecs += 1;
            let a = dot(v, &ws.w).re;
            alpha.push(a);
            axpy(Complex64::new(-a, 0.0), v, &mut ws.w);
            if m > 0 {
                axpy(Complex64::new(-beta[m - 1], 0.0), &head[m - 1], &mut ws.w);
            }
            // one full Gram-Schmidt pass against the whole basis
            for vk in head.iter() {
                let c = dot(vk, &ws.w);
                axpy(-c, vk, &mut ws.w);
            }
            let b = norm(&ws.w);
            m += 1;
            if b <= 1e-13 * scale {
                breakdown = true;
                beta.push(0.0);
                break;
            }
            beta.push(b);
            // stop early once the pending step already meets its error budget
            if m < max_dim && CHECKPOINTS.contains(&m) {
                let step = tau.min(remaining);
                let c = Projected::new(&alpha, &beta[..m - 1]).coefficients(step);
                if b * c[m - 1].norm() <= tol * step / t {
                    break;
                }
            }
            if m < max_dim {
                for (x, y) in tail[0].iter_mut().zip(&ws.w) {
                    *x = y / b;
                }
            }
        }
        let proj = Projected::new(&alpha, &beta[..m - 1]);
        let beta_last = if breakdown { 0.0 } else { beta[m - 1] };

        let mut step = tau.min(remaining);
        if breakdown {
            step = remaining;
        }
        let mut tries = 0;
        let (coeffs, err) = loop {
            let c = proj.coefficients(step);
            let err = beta_last * c[m - 1].norm();
            let budget = tol * step / t;
            if err <= budget || breakdown {
                break (c, err);
            }
            tries += 1;
            let shrink = 0.9 * (budget / err).powf(1.0 / m as f64);
            step *= shrink.clamp(0.1, 0.9);
            if step < t * 1e-13 || tries > 200 {
                return Err(Error::KrylovNonConvergence {
                    krylov_dim: m,
                    step,
                    residual: err,
                });
            }
        };
        for p in psi.iter_mut() {
            *p = Complex64::new(0.0, 0.0);
        }
        for (k, c) in coeffs.iter().enumerate() {
            axpy(c * beta0, &ws.basis[k], psi);
        }
        stats.substeps += 1;
        stats.error_estimate += err;
        remaining -= step;
        if remaining < 1e-15 * t {
            remaining = 0.0;
        }
        tau = if tries == 0 { step * 1.5 } else { step };
    }
    Ok(stats)
}
