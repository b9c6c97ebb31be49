//! Sparse matrix of the Raman Hamiltonian in a truncated Fock basis.

use num_complex::Complex64;

use super::basis::FockBasis;

/// Real symmetric matrix in compressed sparse row form.
///
/// With real couplings and frequencies the Hamiltonian is real in the
/// number basis, so Hermiticity reduces to symmetry, which holds exactly
/// because every off-diagonal entry is inserted together with its mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseHamiltonian {
    /// `H = Σ ω_x n_x + g(a b†c† + h.c.) + χ(a c d† + h.c.)`.
    pub fn build(basis: &FockBasis, omega: [f64; 4], g: f64, chi: f64) -> Self {
        let dim = basis.dim();
        let cut = basis.cutoffs();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut push_pair = |i: usize, j: usize, v: f64| {
            rows[i].push((j, v));
            rows[j].push((i, v));
        };
        let (sa, sb, sc, sd) = (basis.stride(0), basis.stride(1), basis.stride(2), basis.stride(3));
        let mut diag = vec![0.0; dim];
        for (idx, d) in diag.iter_mut().enumerate() {
            let occ = basis.occ_raw(idx).map(f64::from);
            *d = omega.iter().zip(&occ).map(|(w, n)| w * n).sum();
            let [na, nb, nc, nd] = basis.occ_raw(idx).map(usize::from);
            // a b† c†: (na, nb, nc) -> (na-1, nb+1, nc+1)
            if g != 0.0 && na >= 1 && nb < cut[1] && nc < cut[2] {
                let target = idx - sa + sb + sc;
                let v = g * ((na * (nb + 1) * (nc + 1)) as f64).sqrt();
                push_pair(target, idx, v);
            }
            // a c d†: (na, nc, nd) -> (na-1, nc-1, nd+1)
            if chi != 0.0 && na >= 1 && nc >= 1 && nd < cut[3] {
                let target = idx - sa - sc + sd;
                let v = chi * ((na * nc * (nd + 1)) as f64).sqrt();
                push_pair(target, idx, v);
            }
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (idx, mut row) in rows.into_iter().enumerate() {
            if diag[idx] != 0.0 {
                row.push((idx, diag[idx]));
            }
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *yi = acc;
        }
    }

    /// Matrix element `H[i, j]`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    /// Iterates over stored entries `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.vals[k]))
        })
    }

    /// `max |H_ij − conj(H_ji)|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Cheap upper bound on the spectral radius (maximum absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let mut hpsi = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply(psi, &mut hpsi);
        psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum()
    }
}
