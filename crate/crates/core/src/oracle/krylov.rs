//! Short-iterative Lanczos propagator `e^{−iHτ} v` with adaptive substeps.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::SparseHamiltonian;
use crate::error::{Error, Result};

/// Tuning knobs of the propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Largest Krylov subspace dimension.
    pub max_dim: usize,
    /// Largest number of substeps per call before giving up.
    pub max_steps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            max_dim: 30,
            max_steps: 100_000,
        }
    }
}

/// Statistics of one propagation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub steps: usize,
    /// Largest a-posteriori error estimate among accepted substeps.
    pub max_error_estimate: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

struct Lanczos {
    basis: Vec<Vec<Complex64>>,
    eigvals: Vec<f64>,
    /// Row 0 and last row of the eigenvector matrix.
    first_row: Vec<f64>,
    last_row: Vec<f64>,
    eigvecs: DMatrix<f64>,
    /// Residual coupling to the next Krylov vector (0 on breakdown).
    beta_next: f64,
}

impl Lanczos {
    fn build(h: &SparseHamiltonian, v: &[Complex64], max_dim: usize) -> Self {
        let n = h.dim();
        let m_cap = max_dim.min(n).max(1);
        let nv = norm(v);
        let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / nv).collect()];
        let mut alpha = Vec::with_capacity(m_cap);
        let mut beta: Vec<f64> = Vec::with_capacity(m_cap);
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let scale = h.norm_bound().max(f64::MIN_POSITIVE);
        let mut beta_next = 0.0;
        for j in 0..m_cap {
            h.apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // Full reorthogonalization, applied twice for stability.
            for _ in 0..2 {
                for vi in &basis {
                    let proj = dot(vi, &w);
                    for (wk, vk) in w.iter_mut().zip(vi) {
                        *wk -= proj * vk;
                    }
                }
            }
            let b = norm(&w);
            if b <= 1e-14 * scale || j + 1 == m_cap {
                beta_next = if b <= 1e-14 * scale { 0.0 } else { b };
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let first_row = (0..k).map(|j| eig.eigenvectors[(0, j)]).collect();
        let last_row = (0..k).map(|j| eig.eigenvectors[(k - 1, j)]).collect();
        basis.truncate(k);
        Self {
            basis,
            eigvals: eig.eigenvalues.iter().copied().collect(),
            first_row,
            last_row,
            eigvecs: eig.eigenvectors,
            beta_next,
        }
    }

    /// Coefficients `y = e^{−iTτ} e₁` and the error estimate `β |y_last|`.
    fn propagate(&self, tau: f64) -> (Vec<Complex64>, f64) {
        let k = self.eigvals.len();
        let phases: Vec<Complex64> = (0..k)
            .map(|j| Complex64::from_polar(self.first_row[j], -self.eigvals[j] * tau))
            .collect();
        let y: Vec<Complex64> = (0..k)
            .map(|i| (0..k).map(|j| phases[j] * self.eigvecs[(i, j)]).sum())
            .collect();
        let last: Complex64 = (0..k).map(|j| phases[j] * self.last_row[j]).sum();
        (y, self.beta_next * last.norm())
    }
}

/// Returns `e^{−iHt} v` with per-substep error estimate at most `tol`.
pub fn expm_apply(
    h: &SparseHamiltonian,
    v: &[Complex64],
    t: f64,
    tol: f64,
    opts: KrylovOptions,
) -> Result<(Vec<Complex64>, KrylovStats)> {
    let mut stats = KrylovStats::default();
    let mut state = v.to_vec();
    if t == 0.0 || norm(v) == 0.0 {
        return Ok((state, stats));
    }
    let mut done = 0.0;
    let mut tau = t;
    while done < t {
        if stats.steps >= opts.max_steps {
            return Err(Error::NonConvergence(format!(
                "{} substeps reached at t = {done:e} of {t:e}",
                stats.steps
            )));
        }
        let nv = norm(&state);
        let lz = Lanczos::build(h, &state, opts.max_dim);
        tau = tau.min(t - done);
        let mut halvings = 0;
        let (y, err) = loop {
            let (y, err) = lz.propagate(tau);
            if err * nv <= tol {
                break (y, err * nv);
            }
            halvings += 1;
            if halvings > 60 {
                return Err(Error::NonConvergence(format!(
                    "step size underflow at t = {done:e}: error estimate {err:e} above {tol:e}"
                )));
            }
            tau *= 0.5;
        };
        let mut next = vec![Complex64::new(0.0, 0.0); state.len()];
        for (coef, vb) in y.iter().zip(&lz.basis) {
            let c = coef * nv;
            for (nk, bk) in next.iter_mut().zip(vb) {
                *nk += c * bk;
            }
        }
        state = next;
        done += tau;
        if t - done <= 1e-15 * t {
            done = t;
        }
        stats.steps += 1;
        stats.max_error_estimate = stats.max_error_estimate.max(err);
        if halvings == 0 {
            // Let the step grow again after an easy substep.
            tau *= 2.0;
        }
    }
    Ok((state, stats))
}
