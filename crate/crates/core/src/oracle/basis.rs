//! Truncated four-mode Fock basis and ladder actions on state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Mode;

/// Product basis `|n_a, n_b, n_c, n_d⟩` with `0 ≤ n_x ≤ cutoff_x`, stored in
/// row-major order (mode `d` fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    cutoffs: [usize; 4],
    strides: [usize; 4],
    dim: usize,
    occupations: Vec<[u16; 4]>,
}

impl FockBasis {
    /// Builds the basis; `cap` bounds the dimension.
    pub fn new(cutoffs: [usize; 4], cap: usize) -> Result<Self> {
        let dim = cutoffs
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c + 1))
            .unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::Resource { dimension: dim, cap });
        }
        let mut strides = [1usize; 4];
        for x in (0..3).rev() {
            strides[x] = strides[x + 1] * (cutoffs[x + 1] + 1);
        }
        let mut occupations = Vec::with_capacity(dim);
        for idx in 0..dim {
            let mut occ = [0u16; 4];
            for x in 0..4 {
                occ[x] = ((idx / strides[x]) % (cutoffs[x] + 1)) as u16;
            }
            occupations.push(occ);
        }
        Ok(Self {
            cutoffs,
            strides,
            dim,
            occupations,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoffs(&self) -> [usize; 4] {
        self.cutoffs
    }

    /// Flat index of an occupation tuple.
    pub fn index(&self, occ: [usize; 4]) -> usize {
        occ.iter().zip(&self.strides).map(|(n, s)| n * s).sum()
    }

    /// Occupation tuple of a flat index.
    pub fn occupation(&self, idx: usize) -> [usize; 4] {
        self.occupations[idx].map(usize::from)
    }

    pub(crate) fn occ_raw(&self, idx: usize) -> &[u16; 4] {
        &self.occupations[idx]
    }

    pub(crate) fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    /// Applies `x^k` to `psi`, writing into a new vector.
    pub fn lower(&self, mode: Mode, k: u32, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let x = mode.index();
        let cut = self.cutoffs[x];
        if k as usize > cut {
            return Err(Error::Truncation {
                mode: mode.label(),
                power: k,
                cutoff: cut,
            });
        }
        if k == 0 {
            return Ok(psi.to_vec());
        }
        // factor[n] = sqrt(n!/(n-k)!)
        let factors: Vec<f64> = (0..=cut)
            .map(|n| {
                if n < k as usize {
                    0.0
                } else {
                    ((n + 1 - k as usize)..=n).map(|j| j as f64).product::<f64>().sqrt()
                }
            })
            .collect();
        let shift = k as usize * self.strides[x];
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (idx, amp) in psi.iter().enumerate() {
            let n = usize::from(self.occupations[idx][x]);
            if n >= k as usize {
                out[idx - shift] = *amp * factors[n];
            }
        }
        Ok(out)
    }

    /// Total probability on basis states where some mode sits at its cutoff.
    pub fn top_level_probability(&self, psi: &[Complex64]) -> f64 {
        psi.iter()
            .enumerate()
            .filter(|(idx, _)| {
                let occ = &self.occupations[*idx];
                (0..4).any(|x| usize::from(occ[x]) == self.cutoffs[x])
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}
