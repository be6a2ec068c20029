//! Small dense linear algebra: complex matrix helpers and a cyclic Jacobi
//! eigensolver for real symmetric matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Largest entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Induced ∞-norm (max absolute row sum) of a complex matrix.
pub fn inf_norm(a: &CMatrix) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced ∞-norm of a real matrix.
pub fn inf_norm_real(a: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// `|u⟩⟨v|` for real column vectors.
pub fn outer_real(u: &[f64], v: &[f64]) -> CMatrix {
    CMatrix::from_fn(u.len(), v.len(), |i, j| Complex64::new(u[i] * v[j], 0.0))
}

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigenpairs {
    /// `max_j ‖A v_j − λ_j v_j‖∞`.
    pub fn residual(&self, a: &DMatrix<f64>) -> f64 {
        let mut worst = 0.0f64;
        for (j, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(j);
            let r = a * v - v * lambda;
            worst = worst.max(r.amax());
        }
        worst
    }

    /// Orthogonal projector onto the eigenspace of eigenvalues within `tol` of `target`.
    pub fn projector(&self, target: f64, tol: f64) -> DMatrix<f64> {
        let n = self.vectors.nrows();
        let mut p = DMatrix::zeros(n, n);
        for (j, &lambda) in self.values.iter().enumerate() {
            if (lambda - target).abs() <= tol {
                let v = self.vectors.column(j);
                p += v * v.transpose();
            }
        }
        p
    }
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<Eigenpairs> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::domain("matrix must be square"));
    }
    let scale = a.amax().max(1.0);
    let asym = (a - a.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off == 0.0 || off.sqrt() <= 1e-15 * m.norm() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigenpairs { values, vectors })
}

/// Eigenvalues of a Hermitian matrix via its real symmetric embedding
/// `[[Re, −Im], [Im, Re]]`; every eigenvalue appears twice there.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.nrows();
    let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let big = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = symmetric_eigen(&big)?;
    Ok(eig.values.iter().step_by(2).copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_and_swap() {
        let d = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -1.0]);
        let e = symmetric_eigen(&d).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0]);
        let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = symmetric_eigen(&x).unwrap();
        assert_relative_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(symmetric_eigen(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn random_seven_by_seven_residual() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut a = DMatrix::<f64>::zeros(7, 7);
        for i in 0..7 {
            for j in i..7 {
                let x = next() * 10.0;
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        let e = symmetric_eigen(&a).unwrap();
        assert!(e.residual(&a) < 1e-10 * inf_norm_real(&a));
        let vtv = e.vectors.transpose() * &e.vectors;
        assert!((vtv - DMatrix::<f64>::identity(7, 7)).amax() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = (0..7).map(|i| a[(i, i)]).sum();
        assert_relative_eq!(e.values.iter().sum::<f64>(), trace, epsilon = 1e-11);
    }

    #[test]
    fn hermitian_embedding() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        // σ_y has eigenvalues ±1
        let sy = CMatrix::from_row_slice(2, 2, &[0.0 * one, -i, i, 0.0 * one]);
        let ev = hermitian_eigenvalues(&sy).unwrap();
        assert_relative_eq!(ev[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(ev[1], 1.0, epsilon = 1e-14);
    }
}
