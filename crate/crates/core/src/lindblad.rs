//! Zero-temperature master equation on a single block.
//!
//! Starting from `|e,0⟩⟨e,0|`, the state never leaves
//! `span{|Ω₊⟩, |Ω₋⟩, |Ω₀⟩}`: jumps into or out of the dark states `Ω_k` have
//! vanishing amplitude. Production paths therefore work with 3×3 matrices in
//! the dressed basis (index 0 = `Ω₊`, 1 = `Ω₋`, 2 = `Ω₀`). The full
//! `(s+2)`-dimensional generator is available for cross-checks.
//!
//! The dissipator is
//!
//! ```text
//! γ1(s) {½|Ω₀⟩⟨Ω₊|ρ|Ω₊⟩⟨Ω₀| − ¼[|Ω₊⟩⟨Ω₊|, ρ]₊}
//! + γ2(s) {½|Ω₀⟩⟨Ω₋|ρ|Ω₋⟩⟨Ω₀| − ¼[|Ω₋⟩⟨Ω₋|, ρ]₊}
//! + γ3    {½|Ω₋⟩⟨Ω₊|ρ|Ω₊⟩⟨Ω₋| − ¼[|Ω₊⟩⟨Ω₊|, ρ]₊}
//! ```
//!
//! with `γi(s) = γi s/N` for `i = 1, 2`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::dressed::{BlockIndex, DressedBlock};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::ode::DormandPrince;
use crate::params::BareCouplings;

pub const PLUS: usize = 0;
pub const MINUS: usize = 1;
pub const ZERO: usize = 2;

/// Relative threshold below which `γ1(s) − γ2(s) + γ3` counts as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Effective decay rates of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    /// `γ1 s/N`
    pub g1_s: f64,
    /// `γ2 s/N`
    pub g2_s: f64,
    pub g3: f64,
    /// `s/N`, kept so the reservoir rates behind `g1_s`, `g2_s` can be recovered.
    pub occupancy: f64,
}

impl DecayRates {
    pub fn for_block(gamma1: f64, gamma2: f64, gamma3: f64, idx: BlockIndex) -> Self {
        let x = idx.occupancy();
        DecayRates { g1_s: gamma1 * x, g2_s: gamma2 * x, g3: gamma3, occupancy: x }
    }

    /// Rates already scaled to the block (or to `𝒵` in the irreducible case).
    pub fn effective(g1: f64, g2: f64, g3: f64) -> Self {
        DecayRates { g1_s: g1, g2_s: g2, g3, occupancy: 1.0 }
    }

    /// `γ1(s) − γ2(s) + γ3`
    pub fn denominator(&self) -> f64 {
        self.g1_s - self.g2_s + self.g3
    }

    pub fn max_rate(&self) -> f64 {
        self.g1_s.max(self.g2_s).max(self.g3)
    }

    pub fn is_zero(&self) -> bool {
        self.g1_s == 0.0 && self.g2_s == 0.0 && self.g3 == 0.0
    }

    pub fn is_degenerate(&self) -> bool {
        self.denominator().abs() <= DEGENERACY_THRESHOLD * self.max_rate()
    }

    /// Every rate multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        DecayRates { g1_s: self.g1_s * k, g2_s: self.g2_s * k, g3: self.g3 * k, occupancy: self.occupancy }
    }
}

/// Treatment of the `s = 0` block, which has no one-photon states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum S0Mode {
    /// Apply the per-block probability formula verbatim at `s = 0`,
    /// giving `½(1 − e^{−γ3 t/4})`.
    #[default]
    Formula,
    /// The atom cannot decay without photon states: `p_g(0, t) = 0`.
    Physical,
}

impl FromStr for S0Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(S0Mode::Formula),
            "physical" => Ok(S0Mode::Physical),
            other => Err(Error::Config(format!("unknown s0 mode {other:?} (expected formula or physical)"))),
        }
    }
}

impl fmt::Display for S0Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            S0Mode::Formula => "formula",
            S0Mode::Physical => "physical",
        })
    }
}

/// Density matrix container. Not validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub CMatrix);

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::hermitian_eigenvalues(&self.0)?[0])
    }

    /// Hermitian, unit trace and positive within the given tolerances.
    pub fn is_state(&self, tol: f64, positivity_tol: f64) -> Result<bool> {
        Ok(self.hermiticity_error() <= tol
            && (self.trace() - c(1.0)).norm() <= tol
            && self.min_eigenvalue()? >= -positivity_tol)
    }

    /// Ground-state probability from a state in the 3×3 dressed basis:
    /// `1 − ⟨e,0|ρ|e,0⟩` with `|e,0⟩ = (|Ω₊⟩ − |Ω₋⟩)/√2`.
    pub fn ground_probability_dressed(&self) -> f64 {
        let m = &self.0;
        1.0 - 0.5 * (m[(PLUS, PLUS)] + m[(MINUS, MINUS)] - m[(PLUS, MINUS)] - m[(MINUS, PLUS)]).re
    }

    /// Ground-state probability from a state in the bare `(s+2)` basis.
    pub fn ground_probability_bare(&self) -> f64 {
        1.0 - self.0[(0, 0)].re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub rate: f64,
    pub op: CMatrix,
}

/// `L(ρ) = −i[H, ρ] + Σ γ (AρA† − ½[A†A, ρ]₊)`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    pub hamiltonian: CMatrix,
    pub jumps: Vec<JumpOperator>,
    cached: Vec<(f64, CMatrix, CMatrix, CMatrix)>,
}

impl Lindbladian {
    pub fn new(hamiltonian: CMatrix, jumps: Vec<JumpOperator>) -> Self {
        let cached = jumps
            .iter()
            .map(|j| {
                let dag = j.op.adjoint();
                let dd = &dag * &j.op;
                (j.rate, j.op.clone(), dag, dd)
            })
            .collect();
        Lindbladian { hamiltonian, jumps, cached }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mi = Complex64::new(0.0, -1.0);
        let mut out = linalg::commutator(&self.hamiltonian, rho) * mi;
        for (rate, a, dag, dd) in &self.cached {
            if *rate == 0.0 {
                continue;
            }
            let term = a * rho * dag - linalg::anticommutator(dd, rho) * c(0.5);
            out += term * c(*rate);
        }
        out
    }

    /// Matrix of the generator acting on column-stacked `vec(ρ)`.
    pub fn superoperator(&self) -> CMatrix {
        let d = self.dim();
        let mut sup = CMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = c(1.0);
                let image = self.apply(&e);
                let col = i + j * d;
                for jj in 0..d {
                    for ii in 0..d {
                        sup[(ii + jj * d, col)] = image[(ii, jj)];
                    }
                }
            }
        }
        sup
    }

    /// Induced ∞-norm of the superoperator.
    pub fn norm(&self) -> f64 {
        linalg::inf_norm(&self.superoperator())
    }
}

fn dressed_projector(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = c(1.0);
    m
}

fn ket_bra(u: &DVector<f64>, v: &DVector<f64>) -> CMatrix {
    linalg::outer_real(u.as_slice(), v.as_slice())
}

/// Jump operators of a block in its bare `(s+2)` basis, with the reservoir
/// rates `γ(Ω' − Ω)` paired to the operators that carry the `α`, `β` weights:
///
/// * `(α/√2)√(s/N) |Ω₀⟩⟨Ω₊|` at rate `γ1/α²`
/// * `(β/2) |Ω₋⟩⟨Ω₊|` at rate `2γ3/β²`
/// * `(α/√2)√(s/N) |Ω₀⟩⟨Ω₋|` at rate `γ2/α²`
///
/// Transitions involving `Ω_k` have zero amplitude and are not listed. The
/// `s = 0` block has no jumps.
pub fn jump_operators(block: &DressedBlock, rates: &DecayRates, alpha: f64, beta: f64) -> Vec<JumpOperator> {
    let (Some((_, plus)), Some((_, minus))) = (block.plus(), block.minus()) else {
        return Vec::new();
    };
    let (_, zero) = block.zero();
    let x = block.index.occupancy();
    let alpha_amp = alpha / std::f64::consts::SQRT_2 * x.sqrt();
    vec![
        JumpOperator { rate: rates.g1_s / (alpha * alpha * x), op: ket_bra(&zero, &plus) * c(alpha_amp) },
        JumpOperator { rate: 2.0 * rates.g3 / (beta * beta), op: ket_bra(&minus, &plus) * c(beta / 2.0) },
        JumpOperator { rate: rates.g2_s / (alpha * alpha * x), op: ket_bra(&zero, &minus) * c(alpha_amp) },
    ]
}

/// Generator on the full `(s+2)`-dimensional block in the bare basis.
pub fn full_generator(block: &DressedBlock, rates: &DecayRates) -> Lindbladian {
    let h = linalg::to_complex(&block.matrix());
    Lindbladian::new(h, jump_operators(block, rates, 1.0, std::f64::consts::SQRT_2))
}

/// Generator on `span{Ω₊, Ω₋, Ω₀}` for energies `ω/2 ± q_eff` and `−ω/2`.
pub fn three_level_generator(rates: &DecayRates, omega: f64, q_eff: f64) -> Lindbladian {
    let mut h = CMatrix::zeros(3, 3);
    h[(PLUS, PLUS)] = c(0.5 * omega + q_eff);
    h[(MINUS, MINUS)] = c(0.5 * omega - q_eff);
    h[(ZERO, ZERO)] = c(-0.5 * omega);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let jumps = vec![
        JumpOperator { rate: rates.g1_s, op: dressed_projector(3, ZERO, PLUS) * c(half) },
        JumpOperator { rate: rates.g2_s, op: dressed_projector(3, ZERO, MINUS) * c(half) },
        JumpOperator { rate: rates.g3, op: dressed_projector(3, MINUS, PLUS) * c(half) },
    ];
    Lindbladian::new(h, jumps)
}

/// Production generator for a block on the 3-dimensional dressed subspace.
/// At `s = 0` the two photon-dressed levels collapse onto `ω/2`.
pub fn build_generator(block: &DressedBlock, rates: &DecayRates) -> Lindbladian {
    three_level_generator(rates, block.omega, block.coupling())
}

/// `|e,0⟩⟨e,0|` in the dressed basis: `½(|Ω₊⟩⟨Ω₊| + |Ω₋⟩⟨Ω₋| − |Ω₊⟩⟨Ω₋| − |Ω₋⟩⟨Ω₊|)`.
pub fn initial_state_dressed() -> DensityMatrix {
    let mut m = CMatrix::zeros(3, 3);
    m[(PLUS, PLUS)] = c(0.5);
    m[(MINUS, MINUS)] = c(0.5);
    m[(PLUS, MINUS)] = c(-0.5);
    m[(MINUS, PLUS)] = c(-0.5);
    DensityMatrix(m)
}

pub fn initial_state(block: &DressedBlock) -> Result<DensityMatrix> {
    if !block.has_photon_states() {
        return Err(Error::domain("initial state in the dressed basis needs s ≥ 1"));
    }
    Ok(initial_state_dressed())
}

/// `|e,0⟩⟨e,0|` in the bare `(s+2)` basis.
pub fn initial_state_bare(block: &DressedBlock) -> DensityMatrix {
    let d = block.dim();
    DensityMatrix(dressed_projector(d, 0, 0))
}

/// Express a dressed-basis (3×3) state in the bare `(s+2)` basis of `block`.
pub fn dressed_to_bare(block: &DressedBlock, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (Some((_, plus)), Some((_, minus))) = (block.plus(), block.minus()) else {
        return Err(Error::domain("dressed embedding needs s ≥ 1"));
    };
    let (_, zero) = block.zero();
    let d = block.dim();
    let basis = [plus, minus, zero];
    let mut u = CMatrix::zeros(d, 3);
    for (col, v) in basis.iter().enumerate() {
        for row in 0..d {
            u[(row, col)] = c(v[row]);
        }
    }
    Ok(DensityMatrix(&u * &rho.0 * u.adjoint()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DampingBasisElement {
    pub matrix: CMatrix,
    pub eigenvalue: Complex64,
    /// Weight of this element in the expansion of `|e,0⟩⟨e,0|`; `None` when
    /// the expansion is singular.
    pub coefficient: Option<Complex64>,
}

/// The nine eigen-operators `ρ₁ … ρ₉` of the 3-level generator.
#[derive(Debug, Clone)]
pub struct DampingBasis {
    pub elements: Vec<DampingBasisElement>,
    pub rates: DecayRates,
}

/// Damping basis for energies `ω/2 ± q_eff`, `−ω/2` (exact resonance).
///
/// `ρ₃` carries the factor `γ1γ2 + γ2γ3` and its coefficient the reciprocal.
/// When that product vanishes, `ρ₃` is stored as `|Ω₀⟩⟨Ω₀|` with unit coefficient.
pub fn damping_basis(rates: &DecayRates, omega: f64, q_eff: f64) -> DampingBasis {
    let (g1, g2, g3) = (rates.g1_s, rates.g2_s, rates.g3);
    let den = rates.denominator();
    let degenerate = rates.is_degenerate();
    let i = Complex64::i();

    let split_pm = 2.0 * q_eff;
    let split_p0 = omega + q_eff;
    let split_m0 = omega - q_eff;

    let mut rho1 = CMatrix::zeros(3, 3);
    rho1[(PLUS, PLUS)] = c(-den);
    rho1[(MINUS, MINUS)] = c(g3);
    rho1[(ZERO, ZERO)] = c(g1 - g2);

    let mut rho2 = CMatrix::zeros(3, 3);
    rho2[(MINUS, MINUS)] = c(1.0);
    rho2[(ZERO, ZERO)] = c(-1.0);

    let norm3 = g1 * g2 + g2 * g3;
    let (rho3, coeff3) = if norm3.abs() > DEGENERACY_THRESHOLD * rates.max_rate().powi(2) {
        (dressed_projector(3, ZERO, ZERO) * c(norm3), c(1.0 / (g2 * (g1 + g3))))
    } else {
        (dressed_projector(3, ZERO, ZERO), c(1.0))
    };

    let coherence = -(g1 + g2 + g3) / 4.0;
    let elem = |matrix, eigenvalue, coefficient| DampingBasisElement { matrix, eigenvalue, coefficient };
    let elements = vec![
        elem(rho1, c(-(g1 + g3) / 2.0), (!degenerate).then(|| c(-0.5 / den))),
        elem(rho2, c(-g2 / 2.0), (!degenerate).then(|| c(0.5 * (den + g3) / den))),
        elem(rho3, c(0.0), Some(coeff3)),
        elem(dressed_projector(3, PLUS, MINUS), -i * split_pm + coherence, Some(c(-0.5))),
        elem(dressed_projector(3, PLUS, ZERO), -i * split_p0 - (g1 + g3) / 4.0, Some(c(0.0))),
        elem(dressed_projector(3, MINUS, ZERO), -i * split_m0 - g2 / 4.0, Some(c(0.0))),
        elem(dressed_projector(3, MINUS, PLUS), i * split_pm + coherence, Some(c(-0.5))),
        elem(dressed_projector(3, ZERO, PLUS), i * split_p0 - (g1 + g3) / 4.0, Some(c(0.0))),
        elem(dressed_projector(3, ZERO, MINUS), i * split_m0 - g2 / 4.0, Some(c(0.0))),
    ];
    DampingBasis { elements, rates: *rates }
}

impl DampingBasis {
    /// `Σ c_j e^{Λ_j t} ρ_j`.
    pub fn evolve(&self, t: f64) -> Result<DensityMatrix> {
        let mut out = CMatrix::zeros(3, 3);
        for e in &self.elements {
            let coeff = e.coefficient.ok_or(Error::DegenerateDenominator { denominator: self.rates.denominator() })?;
            if coeff == c(0.0) {
                continue;
            }
            out += &e.matrix * (coeff * (e.eigenvalue * t).exp());
        }
        Ok(DensityMatrix(out))
    }

    /// `max_j ‖L(ρ_j) − Λ_j ρ_j‖∞` (entrywise).
    pub fn max_residual(&self, generator: &Lindbladian) -> f64 {
        self.elements
            .iter()
            .map(|e| linalg::max_abs(&(generator.apply(&e.matrix) - &e.matrix * e.eigenvalue)))
            .fold(0.0, f64::max)
    }
}

/// Closed-form block state at time `t` in the dressed basis (exact resonance).
pub fn closed_form_state(rates: &DecayRates, q_eff: f64, t: f64) -> Result<DensityMatrix> {
    if rates.is_degenerate() {
        return Err(Error::DegenerateDenominator { denominator: rates.denominator() });
    }
    let (g1, g2, g3) = (rates.g1_s, rates.g2_s, rates.g3);
    let den = rates.denominator();
    let e_a = (-(g1 + g3) * t / 2.0).exp();
    let e_b = (-g2 * t / 2.0).exp();
    let e_c = (-(g1 + g2 + g3) * t / 4.0).exp();
    let phase = Complex64::from_polar(1.0, -2.0 * q_eff * t);

    let mut m = CMatrix::zeros(3, 3);
    let k = -0.5 / den * e_a;
    m[(PLUS, PLUS)] += c(-den * k);
    m[(MINUS, MINUS)] += c(g3 * k);
    m[(ZERO, ZERO)] += c((g1 - g2) * k);
    let k2 = 0.5 * (den + g3) / den * e_b;
    m[(MINUS, MINUS)] += c(k2);
    m[(ZERO, ZERO)] += c(-k2);
    m[(ZERO, ZERO)] += c(1.0);
    m[(PLUS, MINUS)] += phase * (-0.5 * e_c);
    m[(MINUS, PLUS)] += phase.conj() * (-0.5 * e_c);
    Ok(DensityMatrix(m))
}

pub fn evolve_closed_form(block: &DressedBlock, rates: &DecayRates, t: f64) -> Result<DensityMatrix> {
    if !block.has_photon_states() {
        return Err(Error::domain("closed-form block evolution needs s ≥ 1"));
    }
    closed_form_state(rates, block.coupling(), t)
}

/// Integrate `dρ/dt = L(ρ)` with adaptive Dormand–Prince (atol = rtol = 1e-10),
/// symmetrizing `ρ → (ρ + ρ†)/2` after every accepted step.
pub fn evolve_ode(generator: &Lindbladian, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    let solver = DormandPrince::default();
    let (states, _) = solver.solve(
        |rho| generator.apply(rho),
        &rho0.0,
        0.0,
        t_grid,
        |rho| {
            let h = (&*rho + rho.adjoint()) * c(0.5);
            *rho = h;
        },
    )?;
    Ok(states.into_iter().map(DensityMatrix).collect())
}

/// Closed-form ground-state probability of a block with effective rates and
/// coupling. Every decay exponent is divided by `decay_divisor` (1 for the
/// plain formula, `√π w/d` for the Gaussian-mode correction).
pub fn ground_probability_closed_form(rates: &DecayRates, q_eff: f64, t: f64, decay_divisor: f64) -> Result<f64> {
    if rates.is_zero() {
        let s = (q_eff * t).sin();
        return Ok(s * s);
    }
    if rates.is_degenerate() {
        return Err(Error::DegenerateDenominator { denominator: rates.denominator() });
    }
    let (g1, g2, g3) = (rates.g1_s, rates.g2_s, rates.g3);
    let den = rates.denominator();
    let tt = t / decay_divisor;
    Ok(1.0
        - 0.25 * (den + g3) / den * (-g2 * tt / 2.0).exp()
        - 0.25 * (g1 - g2) / den * (-(g1 + g3) * tt / 2.0).exp()
        - 0.5 * (-(g1 + g2 + g3) * tt / 4.0).exp() * (2.0 * q_eff * t).cos())
}

/// Ground-state probability series over `times`, falling back to a single
/// ODE solve on the 3-level generator when the closed form is singular.
pub fn ground_probability_series(rates: &DecayRates, q_eff: f64, times: &[f64], decay_divisor: f64) -> Result<Vec<f64>> {
    if rates.is_zero() || !rates.is_degenerate() {
        return times
            .iter()
            .map(|&t| ground_probability_closed_form(rates, q_eff, t, decay_divisor))
            .collect();
    }
    let generator = three_level_generator(&rates.scaled(1.0 / decay_divisor), 0.0, q_eff);
    ode_series(&generator, times, |rho| rho.ground_probability_dressed())
}

/// Evaluate `f(ρ(t))` on arbitrary (unsorted) times with one ODE solve.
fn ode_series<F: Fn(&DensityMatrix) -> f64>(generator: &Lindbladian, times: &[f64], f: F) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| times[i]).collect();
    if sorted.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::domain("times must be nonnegative"));
    }
    let states = evolve_ode(generator, &initial_state_dressed(), &sorted)?;
    let mut out = vec![0.0; times.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = f(&states[k]);
    }
    Ok(out)
}

/// Conditional ground-state probability `p_g(s, t)` of block `idx` for bare couplings.
pub fn pg_conditional(idx: BlockIndex, bare: &BareCouplings, t: f64, mode: S0Mode) -> Result<f64> {
    if idx.s == 0 && mode == S0Mode::Physical {
        return Ok(0.0);
    }
    let rates = DecayRates::for_block(bare.gamma1, bare.gamma2, bare.gamma3, idx);
    let q_eff = bare.q * idx.occupancy().sqrt();
    Ok(ground_probability_series(&rates, q_eff, &[t], 1.0)?[0])
}

/// Ground-state probability in an irreducible representation with `[a, a†] = 𝒵·1`.
pub fn pg_irreducible(zcal: f64, bare: &BareCouplings, t: f64) -> Result<f64> {
    if !(zcal > 0.0) {
        return Err(Error::domain(format!("𝒵 must be positive, got {zcal}")));
    }
    let rates = DecayRates::effective(bare.gamma1 * zcal, bare.gamma2 * zcal, bare.gamma3);
    Ok(ground_probability_series(&rates, bare.q * zcal.sqrt(), &[t], 1.0)?[0])
}

/// Mean of the dressed Hamiltonian, `tr(Ωρ(t))`, for a block with effective
/// rates and coupling.
pub fn mean_energy_closed_form(rates: &DecayRates, omega: f64, q_eff: f64, t: f64) -> Result<f64> {
    let (g1, g2, g3) = (rates.g1_s, rates.g2_s, rates.g3);
    if g1 == g2 {
        let decay = (-g1 * t / 2.0).exp();
        return Ok(-0.5 * omega + omega * decay + q_eff * decay * ((-g3 * t / 2.0).exp() - 1.0));
    }
    if rates.is_degenerate() {
        return Err(Error::DegenerateDenominator { denominator: rates.denominator() });
    }
    let den = rates.denominator();
    let ratio = (den + g3) / den;
    Ok(-0.5 * omega
        + 0.5 * (omega * (g1 - g2) / den + q_eff * ratio) * (-(g1 + g3) * t / 2.0).exp()
        + 0.5 * ratio * (omega - q_eff) * (-g2 * t / 2.0).exp())
}

/// Mean energy series, with an ODE fallback when the closed form is singular.
pub fn mean_energy_series(rates: &DecayRates, omega: f64, q_eff: f64, times: &[f64]) -> Result<Vec<f64>> {
    if rates.g1_s == rates.g2_s || !rates.is_degenerate() {
        return times.iter().map(|&t| mean_energy_closed_form(rates, omega, q_eff, t)).collect();
    }
    let generator = three_level_generator(rates, omega, q_eff);
    let h = generator.hamiltonian.clone();
    ode_series(&generator, times, |rho| (&h * &rho.0).trace().re)
}
