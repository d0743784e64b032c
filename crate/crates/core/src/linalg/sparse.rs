//! Row-compressed complex operators for the generator's inner loop.
//!
//! Every operator of the model has at most a few nonzeros per row, so
//! products against a dense 16×16 state cost `nnz · n` instead of `n³`.

use alloc::vec::Vec;

use super::matrix::{CMatrix, C64};

/// Compressed sparse row storage of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Keeps the entries of `m` that are not exactly zero.
    pub fn from_dense(m: &CMatrix) -> Self {
        let n = m.dim();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    values.push(z);
                }
            }
            row_start.push(cols.len());
        }
        SparseMatrix {
            dim: n,
            row_start,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in self.row_start[i]..self.row_start[i + 1] {
                out[(i, self.cols[k])] = self.values[k];
            }
        }
        out
    }

    /// `out += s · self · rhs`
    pub fn mul_dense_acc(&self, s: C64, rhs: &CMatrix, out: &mut CMatrix) {
        let n = self.dim;
        assert!(rhs.dim() == n && out.dim() == n, "dimension mismatch");
        let b = rhs.as_slice();
        let o = out.as_mut_slice();
        for i in 0..n {
            let row_out = &mut o[i * n..(i + 1) * n];
            for k in self.row_start[i]..self.row_start[i + 1] {
                let a = self.values[k] * s;
                let row_b = &b[self.cols[k] * n..(self.cols[k] + 1) * n];
                for (x, &y) in row_out.iter_mut().zip(row_b) {
                    *x += a * y;
                }
            }
        }
    }

    /// `self · rhs`
    pub fn mul_dense(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim);
        self.mul_dense_acc(C64::new(1.0, 0.0), rhs, &mut out);
        out
    }

    /// `out += s · self · ρ · self†`, summed over pairs of nonzeros:
    /// `(LρL†)_{ij} = Σ L_{ik} ρ_{kl} conj(L_{jl})`.
    pub fn sandwich_acc(&self, s: f64, rho: &CMatrix, out: &mut CMatrix) {
        let n = self.dim;
        assert!(rho.dim() == n && out.dim() == n, "dimension mismatch");
        let r = rho.as_slice();
        let o = out.as_mut_slice();
        for i in 0..n {
            for a in self.row_start[i]..self.row_start[i + 1] {
                let (k, lik) = (self.cols[a], self.values[a] * s);
                for j in 0..n {
                    for b in self.row_start[j]..self.row_start[j + 1] {
                        let (l, ljl) = (self.cols[b], self.values[b]);
                        o[i * n + j] += lik * r[k * n + l] * ljl.conj();
                    }
                }
            }
        }
    }
}
