//! Cyclic Jacobi diagonalization of complex Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)` with the unitary
//!
//! ```text
//!     V_pp = c        V_pq = s·e
//!     V_qp = −s·ē     V_qq = c          e = A_pq / |A_pq|
//! ```
//!
//! where `t = s/c` is the smaller root of `t² + 2τt − 1 = 0`,
//! `τ = (A_qq − A_pp) / (2|A_pq|)`. Sweeps run over all pairs in row order
//! until the off-diagonal Frobenius norm drops below the threshold.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{CMatrix, C64};
use crate::error::Error;

/// Sweep cap.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius threshold, relative to `max(1, ‖A‖_F)`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Accepted `‖A − A†‖_max` on input.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-9;

/// Eigenvalues (ascending) and the unitary whose columns are eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    /// `V diag(λ) V†`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Applies a real function to the spectrum: `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        HermitianEig {
            eigenvalues: self.eigenvalues.iter().map(|&x| f(x)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
        .reconstruct()
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvalues.len();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix. Input must be Hermitian to
/// [`HERMITIAN_INPUT_TOL`]; it is symmetrized before iterating.
pub fn hermitian_eig(input: &CMatrix) -> Result<HermitianEig, Error> {
    let (a, v) = jacobi(input, true)?;
    let v = v.expect("vectors requested");
    let n = a.dim();

    // ascending by value, ties broken by original column
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = CMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only; same iteration as [`hermitian_eig`]
/// without accumulating the rotations.
pub fn hermitian_eigenvalues(input: &CMatrix) -> Result<Vec<f64>, Error> {
    let (a, _) = jacobi(input, false)?;
    let mut ev = a.diagonal_real();
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok(ev)
}

fn jacobi(input: &CMatrix, vectors: bool) -> Result<(CMatrix, Option<CMatrix>), Error> {
    if !input.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = input.hermiticity_residual();
    if residual > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let n = input.dim();
    let mut a = input.hermitian_part();
    let mut v = vectors.then(|| CMatrix::identity(n));
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }
    Ok((a, v))
}

fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = apq / mag;
    let se = e * s;
    let se_conj = se.conj();
    let n = a.dim();

    // A ← A V  (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * se_conj;
        a[(k, q)] = akp * se + akq * c;
    }
    // A ← V† A  (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * se;
        a[(q, k)] = apk * se_conj + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    // V ← V J
    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - vkq * se_conj;
            v[(k, q)] = vkp * se + vkq * c;
        }
    }
}

/// `Tr √(A†A)` for Hermitian `A`, i.e. `Σ|λᵢ|`.
pub fn trace_norm(a: &CMatrix) -> Result<f64, Error> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|x| x.abs()).sum())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMatrix) -> Result<f64, Error> {
    Ok(hermitian_eigenvalues(a)?[0])
}
