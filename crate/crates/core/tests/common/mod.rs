#![allow(dead_code)]

use qbattery_core::linalg::{CMatrix, SubsystemLayout, C64};
use qbattery_core::DensityMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut StdRng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(dim: usize, rng: &mut StdRng) -> CMatrix {
    CMatrix::from_vec(dim, (0..dim * dim).map(|_| random_complex(rng)).collect()).unwrap()
}

pub fn random_hermitian(dim: usize, rng: &mut StdRng) -> CMatrix {
    let a = random_matrix(dim, rng);
    (&a + &a.adjoint()).scale_real(0.5).hermitian_part()
}

/// `A A† / Tr(A A†)`: full rank with probability one.
pub fn random_state_matrix(dim: usize, rng: &mut StdRng) -> CMatrix {
    let a = random_matrix(dim, rng);
    let m = a.matmul(&a.adjoint()).hermitian_part();
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

pub fn random_state(layout: SubsystemLayout, rng: &mut StdRng) -> DensityMatrix {
    let m = random_state_matrix(layout.total_dim(), rng);
    DensityMatrix::new(m, layout).unwrap()
}

/// Eigenvalues of a Hermitian matrix through its real symmetric embedding
/// `[[A, −B], [B, A]]` and a plain real Jacobi iteration. Every eigenvalue
/// of the complex matrix appears twice in the embedding.
pub fn eigenvalues_via_real_embedding(h: &CMatrix) -> Vec<f64> {
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![vec![0.0f64; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _sweep in 0..200 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Partial trace over the two machine qubits of a 16×16 matrix by
/// explicit index loops; result indexed by `(c, b)`.
pub fn naive_trace_out_machine(rho: &CMatrix) -> CMatrix {
    let idx = |m1: usize, m2: usize, c: usize, b: usize| m1 * 8 + m2 * 4 + c * 2 + b;
    let mut out = CMatrix::zeros(4);
    for c in 0..2 {
        for b in 0..2 {
            for c2 in 0..2 {
                for b2 in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for m1 in 0..2 {
                        for m2 in 0..2 {
                            acc += rho[(idx(m1, m2, c, b), idx(m1, m2, c2, b2))];
                        }
                    }
                    out[(c * 2 + b, c2 * 2 + b2)] = acc;
                }
            }
        }
    }
    out
}

/// Same for keeping only the machine pair `(m1, m2)`.
pub fn naive_keep_machine(rho: &CMatrix) -> CMatrix {
    let idx = |m1: usize, m2: usize, c: usize, b: usize| m1 * 8 + m2 * 4 + c * 2 + b;
    let mut out = CMatrix::zeros(4);
    for m1 in 0..2 {
        for m2 in 0..2 {
            for n1 in 0..2 {
                for n2 in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..2 {
                        for b in 0..2 {
                            acc += rho[(idx(m1, m2, c, b), idx(n1, n2, c, b))];
                        }
                    }
                    out[(m1 * 2 + m2, n1 * 2 + n2)] = acc;
                }
            }
        }
    }
    out
}

/// Single-qubit marginal on factor `pos` (0 = M1 … 3 = B) by loops.
pub fn naive_qubit_marginal(rho: &CMatrix, pos: usize) -> CMatrix {
    let shift = 3 - pos;
    let mut out = CMatrix::zeros(2);
    for i in 0..16 {
        for j in 0..16 {
            let rest_i = i & !(1 << shift);
            let rest_j = j & !(1 << shift);
            if rest_i == rest_j {
                out[((i >> shift) & 1, (j >> shift) & 1)] += rho[(i, j)];
            }
        }
    }
    out
}
