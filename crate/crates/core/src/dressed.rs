//! Per-block Hamiltonian `Ω(s)` and its dressed eigensystem.
//!
//! The bare basis of block `s` is `|e,0⟩, |g,1⁽¹⁾⟩, …, |g,1⁽ˢ⁾⟩, |g,0⟩`, so the
//! block has dimension `s + 2`. Only the number `s` of resonant oscillators
//! matters, not which frequencies the other `N − s` oscillators carry.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, Eigenpairs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockIndex {
    pub s: u64,
    pub n: u64,
}

impl BlockIndex {
    pub fn new(s: u64, n: u64) -> Result<Self> {
        if n == 0 || s > n {
            return Err(Error::domain(format!("block index requires 0 ≤ s ≤ N, N ≥ 1 (s = {s}, N = {n})")));
        }
        Ok(BlockIndex { s, n })
    }

    /// Eigenvalue `s/N` of the frequency-of-success operator on this block.
    pub fn occupancy(&self) -> f64 {
        self.s as f64 / self.n as f64
    }

    pub fn dim(&self) -> usize {
        self.s as usize + 2
    }
}

/// `Ω(s)` in the bare basis. Row/column 0 is `|e,0⟩`, the last is `|g,0⟩`.
pub fn omega_matrix(idx: BlockIndex, omega: f64, q_bare: f64) -> DMatrix<f64> {
    let d = idx.dim();
    let g = q_bare / (idx.n as f64).sqrt();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d - 1 {
        m[(i, i)] = 0.5 * omega;
    }
    m[(d - 1, d - 1)] = -0.5 * omega;
    for i in 1..=idx.s as usize {
        m[(0, i)] = g;
        m[(i, 0)] = g;
    }
    m
}

/// Analytic eigensystem of `Ω(s)`.
///
/// Columns of `eigenvectors` are ordered `Ω₊, Ω₋, Ω₁ … Ω_{s−1}, Ω₀`. For
/// `s = 0` there are only the bare states `|e,0⟩` (at `ω/2`) and `|g,0⟩`.
#[derive(Debug, Clone)]
pub struct DressedBlock {
    pub index: BlockIndex,
    pub omega: f64,
    pub q_bare: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl DressedBlock {
    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    /// Effective vacuum Rabi coupling `q√(s/N)`, half the splitting `Ω₊ − Ω₋`.
    pub fn coupling(&self) -> f64 {
        self.q_bare * self.index.occupancy().sqrt()
    }

    pub fn has_photon_states(&self) -> bool {
        self.index.s > 0
    }

    pub fn plus(&self) -> Option<(f64, DVector<f64>)> {
        self.has_photon_states()
            .then(|| (self.eigenvalues[0], self.eigenvectors.column(0).into_owned()))
    }

    pub fn minus(&self) -> Option<(f64, DVector<f64>)> {
        self.has_photon_states()
            .then(|| (self.eigenvalues[1], self.eigenvectors.column(1).into_owned()))
    }

    pub fn zero(&self) -> (f64, DVector<f64>) {
        let last = self.dim() - 1;
        (self.eigenvalues[last], self.eigenvectors.column(last).into_owned())
    }

    /// Dark states `Ω_k`, `k = 1 … s−1`, all at `ω/2`.
    pub fn dark(&self) -> Vec<DVector<f64>> {
        if self.index.s < 2 {
            return Vec::new();
        }
        (2..self.dim() - 1).map(|c| self.eigenvectors.column(c).into_owned()).collect()
    }

    /// Projector onto the degenerate `ω/2` dark eigenspace.
    pub fn dark_projector(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut p = DMatrix::zeros(d, d);
        for v in self.dark() {
            p += &v * v.transpose();
        }
        p
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        omega_matrix(self.index, self.omega, self.q_bare)
    }
}

pub fn analytic_eigensystem(idx: BlockIndex, omega: f64, q_bare: f64) -> DressedBlock {
    let d = idx.dim();
    let s = idx.s as usize;
    if s == 0 {
        return DressedBlock {
            index: idx,
            omega,
            q_bare,
            eigenvalues: vec![0.5 * omega, -0.5 * omega],
            eigenvectors: DMatrix::identity(2, 2),
        };
    }

    let coupling = q_bare * idx.occupancy().sqrt();
    let mut values = Vec::with_capacity(d);
    let mut vectors = DMatrix::zeros(d, d);

    let amp = 1.0 / (2.0 * s as f64).sqrt();
    let root_half = std::f64::consts::FRAC_1_SQRT_2;
    values.push(0.5 * omega + coupling);
    values.push(0.5 * omega - coupling);
    vectors[(0, 0)] = root_half;
    vectors[(0, 1)] = -root_half;
    for i in 1..=s {
        vectors[(i, 0)] = amp;
        vectors[(i, 1)] = amp;
    }

    for k in 1..s {
        let col = 1 + k;
        let kf = k as f64;
        let head = 1.0 / (kf * (kf + 1.0)).sqrt();
        for i in 1..=k {
            vectors[(i, col)] = head;
        }
        vectors[(k + 1, col)] = -(kf / (kf + 1.0)).sqrt();
        values.push(0.5 * omega);
    }

    values.push(-0.5 * omega);
    vectors[(d - 1, d - 1)] = 1.0;

    DressedBlock {
        index: idx,
        omega,
        q_bare,
        eigenvalues: values,
        eigenvectors: vectors,
    }
}

/// Numerical eigensystem by cyclic Jacobi rotations; independent of the closed forms.
pub fn numeric_eigensystem(matrix: &DMatrix<f64>) -> Result<Eigenpairs> {
    linalg::symmetric_eigen(matrix)
}
