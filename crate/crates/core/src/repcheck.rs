//! Explicit small-`N` construction of the reducible representation.
//!
//! Each oscillator lives in `Fock(cutoff) ⊗ C^F`, with `F` distinct frequency
//! labels; the local basis index is `n·F + f`. On the `N`-fold tensor product
//!
//! ```text
//! 𝑎_ω  = N^{-1/2} Σ_j 1 ⊗ … ⊗ (a ⊗ |ω⟩⟨ω|)_j ⊗ … ⊗ 1
//! 𝑁_ω  = Σ_j 1 ⊗ … ⊗ (a†a ⊗ |ω⟩⟨ω|)_j ⊗ … ⊗ 1
//! 𝐼_ω  = N^{-1} Σ_j 1 ⊗ … ⊗ (1 ⊗ |ω⟩⟨ω|)_j ⊗ … ⊗ 1
//! ```
//!
//! and `[𝑎_ω, 𝑎_ω'†] = δ_ωω' 𝐼_ω` away from the Fock cutoff.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::binomial::ln_binomial_pmf;
use crate::dressed::{analytic_eigensystem, BlockIndex};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::sum::pairwise_sum;

/// Largest tensor-product dimension accepted by [`build_micro_rep`].
pub const MAX_REP_DIM: usize = 100_000;
/// Largest atom ⊗ representation dimension accepted by [`micro_dressed_spectrum`].
pub const MAX_ATOM_REP_DIM: usize = 200_000;

/// Immutable sparse matrix assembled from coordinate triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    /// Duplicates are summed; exact zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *row = merged;
        }
        SparseMatrix { dim, rows }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r].iter().find(|&&(cc, _)| cc == c).map_or(0.0, |&(_, v)| v)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(c, v)| v * x[c]).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn scale(&self, k: f64) -> Self {
        SparseMatrix::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (r, c, k * v)))
    }

    pub fn add(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        SparseMatrix::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut trip = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    trip.push((r, c, a * b));
                }
            }
        }
        SparseMatrix::from_triplets(self.dim, trip)
    }

    /// `A ⊗ B`
    pub fn kron(&self, other: &SparseMatrix) -> Self {
        let d = other.dim;
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                trip.push((r1 * d + r2, c1 * d + c2, v1 * v2));
            }
        }
        SparseMatrix::from_triplets(self.dim * d, trip)
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }
}

/// Explicit operators of the `N`-oscillator reducible representation.
#[derive(Debug, Clone)]
pub struct MicroRep {
    pub n: usize,
    pub freqs: Vec<f64>,
    pub cutoff: usize,
    pub local_dim: usize,
    pub dim: usize,
    pub a: Vec<SparseMatrix>,
    pub a_dag: Vec<SparseMatrix>,
    pub number: Vec<SparseMatrix>,
    pub frequency_of_success: Vec<SparseMatrix>,
}

/// Per-oscillator `(photons, frequency label)` of a basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub photons: usize,
    pub label: usize,
}

impl MicroRep {
    pub fn n_freqs(&self) -> usize {
        self.freqs.len()
    }

    pub fn decode(&self, mut index: usize) -> Vec<Site> {
        let f = self.n_freqs();
        let mut sites = vec![Site { photons: 0, label: 0 }; self.n];
        for j in (0..self.n).rev() {
            let local = index % self.local_dim;
            index /= self.local_dim;
            sites[j] = Site { photons: local / f, label: local % f };
        }
        sites
    }

    pub fn encode(&self, sites: &[Site]) -> usize {
        sites.iter().fold(0, |acc, s| acc * self.local_dim + s.photons * self.n_freqs() + s.label)
    }

    /// Basis states with every occupation strictly below the cutoff.
    pub fn cutoff_safe(&self, index: usize) -> bool {
        self.decode(index).iter().all(|s| s.photons < self.cutoff)
    }

    /// Basis indices of `ℋ_{ω_1…ω_N}` for the given label sequence.
    pub fn sector(&self, labels: &[usize]) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.decode(i).iter().zip(labels).all(|(s, &l)| s.label == l))
            .collect()
    }

    /// All label sequences `(ω_1, …, ω_N)`.
    pub fn label_sequences(&self) -> Vec<Vec<usize>> {
        let f = self.n_freqs();
        let count = f.pow(self.n as u32);
        (0..count)
            .map(|mut k| {
                let mut seq = vec![0; self.n];
                for j in (0..self.n).rev() {
                    seq[j] = k % f;
                    k /= f;
                }
                seq
            })
            .collect()
    }
}

pub fn build_micro_rep(n: usize, freqs: &[f64], cutoff: usize) -> Result<MicroRep> {
    if n == 0 || freqs.is_empty() || cutoff == 0 {
        return Err(Error::domain("need N ≥ 1, at least one frequency and cutoff ≥ 1"));
    }
    for (i, a) in freqs.iter().enumerate() {
        if freqs[..i].contains(a) {
            return Err(Error::domain(format!("duplicate frequency label {a}")));
        }
    }
    let f = freqs.len();
    let local_dim = (cutoff + 1) * f;
    let dim = (local_dim as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > MAX_REP_DIM as u128 {
        return Err(Error::DimensionOverflow { dim: dim.min(usize::MAX as u128) as usize, limit: MAX_REP_DIM });
    }
    let dim = dim as usize;
    let mut rep = MicroRep {
        n,
        freqs: freqs.to_vec(),
        cutoff,
        local_dim,
        dim,
        a: Vec::new(),
        a_dag: Vec::new(),
        number: Vec::new(),
        frequency_of_success: Vec::new(),
    };
    let norm = 1.0 / (n as f64).sqrt();
    for w in 0..f {
        let mut a_trip = Vec::new();
        let mut n_trip = Vec::new();
        let mut i_trip = Vec::new();
        for col in 0..dim {
            let sites = rep.decode(col);
            let mut count = 0usize;
            let mut photons = 0usize;
            for (j, site) in sites.iter().enumerate() {
                if site.label != w {
                    continue;
                }
                count += 1;
                photons += site.photons;
                if site.photons > 0 {
                    let mut lowered = sites.clone();
                    lowered[j].photons -= 1;
                    a_trip.push((rep.encode(&lowered), col, norm * (site.photons as f64).sqrt()));
                }
            }
            if photons > 0 {
                n_trip.push((col, col, photons as f64));
            }
            if count > 0 {
                i_trip.push((col, col, count as f64));
            }
        }
        let a = SparseMatrix::from_triplets(dim, a_trip);
        rep.a_dag.push(a.transpose());
        rep.a.push(a);
        rep.number.push(SparseMatrix::from_triplets(dim, n_trip));
        rep.frequency_of_success.push(SparseMatrix::from_triplets(dim, i_trip).scale(1.0 / n as f64));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    /// `max |[𝑎_ω, 𝑎_ω'†] − δ_ωω' 𝐼_ω|` over columns of cutoff-safe basis states.
    pub max_deviation: f64,
    /// Distinct diagonal values of `𝐼_ω` as exact fractions `s/N`, per frequency.
    pub spectra: Vec<Vec<(usize, usize)>>,
    /// Whether every spectrum equals `{s/N : 0 ≤ s ≤ N}`.
    pub spectrum_complete: bool,
}

pub fn commutator_check(rep: &MicroRep) -> CommutatorReport {
    let f = rep.n_freqs();
    let safe: Vec<usize> = (0..rep.dim).filter(|&i| rep.cutoff_safe(i)).collect();
    let mut worst = 0.0f64;
    for w in 0..f {
        for v in 0..f {
            let comm = rep.a[w].matmul(&rep.a_dag[v]).sub(&rep.a_dag[v].matmul(&rep.a[w]));
            let expect = if w == v { rep.frequency_of_success[w].clone() } else { SparseMatrix::from_triplets(rep.dim, []) };
            let diff = comm.sub(&expect);
            for &col in &safe {
                for row in 0..rep.dim {
                    let x = diff.get(row, col);
                    if x != 0.0 {
                        worst = worst.max(x.abs());
                    }
                }
            }
        }
    }
    let mut spectra = Vec::new();
    let mut complete = true;
    for w in 0..f {
        let mut counts: Vec<usize> = (0..rep.dim)
            .map(|i| rep.decode(i).iter().filter(|s| s.label == w).count())
            .collect();
        counts.sort_unstable();
        counts.dedup();
        // the stored diagonal must be exactly count/N
        for i in 0..rep.dim {
            let c = rep.decode(i).iter().filter(|s| s.label == w).count();
            if rep.frequency_of_success[w].get(i, i) != c as f64 / rep.n as f64 {
                complete = false;
            }
        }
        complete &= counts == (0..=rep.n).collect::<Vec<_>>();
        spectra.push(counts.into_iter().map(|c| (c, rep.n)).collect());
    }
    CommutatorReport { max_deviation: worst, spectra, spectrum_complete: complete }
}

/// Largest entry of `Op·v` outside `ℋ_{ω_1…ω_N}` for basis vectors `v` inside it,
/// over `𝑎_ω`, `𝑎_ω†`, `𝑁_ω`, `𝐼_ω` and every `ω`.
pub fn sector_leakage(rep: &MicroRep, labels: &[usize]) -> f64 {
    let inside: std::collections::HashSet<usize> = rep.sector(labels).into_iter().collect();
    let mut worst = 0.0f64;
    for w in 0..rep.n_freqs() {
        for op in [&rep.a[w], &rep.a_dag[w], &rep.number[w], &rep.frequency_of_success[w]] {
            for (r, c, v) in op.triplets() {
                if inside.contains(&c) && !inside.contains(&r) {
                    worst = worst.max(v.abs());
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationReport {
    /// `(pattern, max |entry|)` for every product of `N+1` operators on distinct
    /// frequencies, each factor an annihilator (`a`) or creator (`c`).
    pub products: Vec<(String, f64)>,
    pub all_vanish: bool,
    /// Product of `N` creators on distinct frequencies; must not vanish.
    pub n_creators_norm: f64,
    /// A single creator acting on the all-vacuum state of the first label.
    pub vacuum_creator_norm: f64,
}

pub fn annihilate_by_creators_check(rep: &MicroRep) -> Result<AnnihilationReport> {
    let k = rep.n + 1;
    if rep.n_freqs() < k {
        return Err(Error::domain(format!("need at least N+1 = {k} distinct frequencies")));
    }
    let mut products = Vec::new();
    for mask in 0..(1usize << k) {
        let mut prod = SparseMatrix::identity(rep.dim);
        let mut label = String::new();
        for i in 0..k {
            let creator = mask & (1 << i) == 0;
            label.push(if creator { 'c' } else { 'a' });
            prod = prod.matmul(if creator { &rep.a_dag[i] } else { &rep.a[i] });
        }
        products.push((label, prod.max_abs()));
    }
    let all_vanish = products.iter().all(|(_, v)| *v == 0.0);
    let mut creators = SparseMatrix::identity(rep.dim);
    for i in 0..rep.n {
        creators = creators.matmul(&rep.a_dag[i]);
    }
    let vacuum = rep.encode(&vec![Site { photons: 0, label: 0 }; rep.n]);
    let mut e = vec![0.0; rep.dim];
    e[vacuum] = 1.0;
    let image = rep.a_dag[0].apply(&e);
    Ok(AnnihilationReport {
        products,
        all_vanish,
        n_creators_norm: creators.max_abs(),
        vacuum_creator_norm: image.iter().map(|x| x * x).sum::<f64>().sqrt(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSpectrum {
    pub labels: Vec<usize>,
    pub s: usize,
    pub numeric: Vec<f64>,
    pub analytic: Vec<f64>,
    pub max_error: f64,
    /// `‖H V − V (VᵀHV)‖` for the block basis `V`.
    pub invariance_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub blocks: Vec<BlockSpectrum>,
    pub max_error: f64,
    pub max_invariance_residual: f64,
}

/// `ω/2 σ₃ + ω 𝑁_ω + q(σ₋𝑎_ω† + σ₊𝑎_ω)` on atom ⊗ representation, atom index
/// outermost with `|e⟩ = 0`, `|g⟩ = 1`.
pub fn jaynes_cummings(rep: &MicroRep, mode: usize, omega: f64, q_bare: f64) -> Result<SparseMatrix> {
    if 2 * rep.dim > MAX_ATOM_REP_DIM {
        return Err(Error::DimensionOverflow { dim: 2 * rep.dim, limit: MAX_ATOM_REP_DIM });
    }
    let sigma3 = SparseMatrix::from_triplets(2, [(0, 0, 1.0), (1, 1, -1.0)]);
    let lower = SparseMatrix::from_triplets(2, [(1, 0, 1.0)]);
    let raise = lower.transpose();
    let id_atom = SparseMatrix::identity(2);
    let id_rep = SparseMatrix::identity(rep.dim);
    Ok(sigma3
        .kron(&id_rep)
        .scale(0.5 * omega)
        .add(&id_atom.kron(&rep.number[mode]).scale(omega))
        .add(&lower.kron(&rep.a_dag[mode]).add(&raise.kron(&rep.a[mode])).scale(q_bare)))
}

/// Diagonalize the Jaynes–Cummings Hamiltonian on each single-excitation block
/// `span{|e,0⟩, |g,1⁽ʲ⁾⟩, |g,0⟩}` (one-photon states on the sites carrying the
/// resonant label) and compare with the analytic dressed energies.
pub fn micro_dressed_spectrum(rep: &MicroRep, mode: usize, q_bare: f64) -> Result<SpectrumReport> {
    if mode >= rep.n_freqs() {
        return Err(Error::domain("resonant mode index out of range"));
    }
    let omega = rep.freqs[mode];
    let h = jaynes_cummings(rep, mode, omega, q_bare)?;
    let big = 2 * rep.dim;
    let mut blocks = Vec::new();
    for labels in rep.label_sequences() {
        let vacuum: Vec<Site> = labels.iter().map(|&l| Site { photons: 0, label: l }).collect();
        let vac = rep.encode(&vacuum);
        let mut basis = vec![vac];
        for j in (0..rep.n).filter(|&j| labels[j] == mode) {
            let mut sites = vacuum.clone();
            sites[j].photons = 1;
            basis.push(rep.dim + rep.encode(&sites));
        }
        basis.push(rep.dim + vac);
        let s = basis.len() - 2;
        let d = basis.len();

        let mut images = Vec::with_capacity(d);
        for &b in &basis {
            let mut e = vec![0.0; big];
            e[b] = 1.0;
            images.push(h.apply(&e));
        }
        let restricted = DMatrix::from_fn(d, d, |i, j| images[j][basis[i]]);
        let mut leak = 0.0f64;
        for img in &images {
            for (idx, &v) in img.iter().enumerate() {
                if !basis.contains(&idx) {
                    leak = leak.max(v.abs());
                }
            }
        }
        let numeric = symmetric_eigen(&restricted)?.values;
        let idx = BlockIndex::new(s as u64, rep.n as u64)?;
        let mut analytic = analytic_eigensystem(idx, omega, q_bare).eigenvalues;
        analytic.sort_by(f64::total_cmp);
        let max_error = numeric.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        blocks.push(BlockSpectrum { labels, s, numeric, analytic, max_error, invariance_residual: leak });
    }
    let max_error = blocks.iter().map(|b| b.max_error).fold(0.0, f64::max);
    let max_invariance_residual = blocks.iter().map(|b| b.invariance_residual).fold(0.0, f64::max);
    Ok(SpectrumReport { blocks, max_error, max_invariance_residual })
}

/// `Σ_s f(s/N) C(N,s) Z^s (1−Z)^(N−s)` over the full support, normalized by
/// the computed total weight.
pub fn binomial_average<F: Fn(f64) -> f64>(f: F, n: u64, z: f64) -> Result<f64> {
    if n == 0 || n > 100_000_000 {
        return Err(Error::domain(format!("N must lie in [1, 1e8], got {n}")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain(format!("Z must lie in [0, 1], got {z}")));
    }
    let nf = n as f64;
    let weights: Vec<f64> = (0..=n).map(|s| ln_binomial_pmf(s, n, z).exp()).collect();
    let terms: Vec<f64> = weights.iter().enumerate().map(|(s, w)| w * f(s as f64 / nf)).collect();
    Ok(pairwise_sum(&terms) / pairwise_sum(&weights))
}

/// `‖f(𝑁̂₁/N)|ψ⟩^⊗N − f(|ψ₁|²)|ψ⟩^⊗N‖` for a real qubit state `ψ = (ψ₀, ψ₁)`,
/// computed on the explicit `2^N`-dimensional vector.
pub fn weak_law_deviation<F: Fn(f64) -> f64>(f: F, psi: (f64, f64), n: usize) -> Result<f64> {
    if n == 0 || n > 20 {
        return Err(Error::domain("qubit count must lie in [1, 20]"));
    }
    let norm = (psi.0 * psi.0 + psi.1 * psi.1).sqrt();
    if !(norm > 0.0) {
        return Err(Error::domain("qubit state must be nonzero"));
    }
    let (c0, c1) = (psi.0 / norm, psi.1 / norm);
    let target = f(c1 * c1);
    let mut acc = Vec::with_capacity(1 << n);
    for k in 0..(1usize << n) {
        let ones = k.count_ones() as i32;
        let amp = c1.powi(ones) * c0.powi(n as i32 - ones);
        let d = (f(ones as f64 / n as f64) - target) * amp;
        acc.push(d * d);
    }
    Ok(pairwise_sum(&acc).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sparse_kron_and_product() {
        let x = SparseMatrix::from_triplets(2, [(0, 1, 1.0), (1, 0, 1.0)]);
        let xx = x.matmul(&x);
        assert_eq!(xx, SparseMatrix::identity(2));
        let k = x.kron(&SparseMatrix::identity(2));
        assert_eq!(k.get(2, 0), 1.0);
        assert_eq!(k.get(0, 2), 1.0);
        assert_eq!(k.nnz(), 4);
    }

    #[test]
    fn single_oscillator_structure() {
        let rep = build_micro_rep(1, &[1.0, 2.0], 2).unwrap();
        let p = &rep.frequency_of_success[0];
        assert_eq!(p.matmul(p), *p);
        let n = rep.a_dag[0].matmul(&rep.a[0]);
        assert!(n.sub(&rep.number[0]).max_abs() < 1e-15);
    }

    #[test]
    fn frequency_of_success_spectrum() {
        let rep = build_micro_rep(3, &[1.0, 2.0], 1).unwrap();
        let report = commutator_check(&rep);
        assert!(report.spectrum_complete);
        assert_eq!(report.spectra[0], vec![(0, 3), (1, 3), (2, 3), (3, 3)]);
    }

    #[test]
    fn dimension_guard() {
        assert!(matches!(build_micro_rep(6, &[1.0, 2.0, 3.0], 2), Err(Error::DimensionOverflow { .. })));
        assert!(build_micro_rep(2, &[1.0, 1.0], 1).is_err());
    }

    #[test]
    fn averages_of_moments() {
        for n in [1u64, 7, 100] {
            assert_relative_eq!(binomial_average(|x| x, n, 0.3).unwrap(), 0.3, epsilon = 1e-14);
            let want = 0.09 + 0.21 / n as f64;
            assert_relative_eq!(binomial_average(|x| x * x, n, 0.3).unwrap(), want, epsilon = 1e-14);
        }
    }

    #[test]
    fn weak_law_vector_matches_binomial_sum() {
        let f = |x: f64| x.cos();
        let psi = (0.8f64, 0.6f64);
        let p = 0.36;
        for n in [1usize, 5, 10] {
            let got = weak_law_deviation(f, psi, n).unwrap();
            let want = binomial_average(|x| (f(x) - f(p)).powi(2), n as u64, p).unwrap().sqrt();
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }
}
