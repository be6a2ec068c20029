//! Binomial aggregation over blocks.
//!
//! In the reducible representation the ground-state probability is
//!
//! ```text
//! p_g(t) = Σ_s C(N,s) Z^s (1−Z)^(N−s) p_g(s, t)
//! ```
//!
//! with each block written in physical parameters: rates `γ_ph s/ς`, `γ3`,
//! and coupling `q_ph √(s/ς)`. As `N → ∞` at fixed `ς = NZ` the sum tends to
//! the irreducible curve, which is what [`pg_limit`] evaluates.
//!
//! Series evaluations are block-major: every block is evaluated over a chunk
//! of times (in parallel), then each time is reduced by a pairwise sum in
//! ascending `s`. The result does not depend on the thread count.

use std::f64::consts::PI;

use serde::Serialize;

use crate::binomial::{binomial_log_weights, DEFAULT_TAIL_TOL};
use crate::error::{Error, Result};
use crate::lindblad::{
    ground_probability_series, mean_energy_closed_form, mean_energy_series, DecayRates, S0Mode,
};
use crate::params::{BareCouplings, PhysicalParams};
use crate::sum::{pairwise_dot, par_map};

const CHUNK: usize = 4096;

/// Default grid length.
pub const DEFAULT_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateOptions {
    pub tail_tol: f64,
    pub s0_mode: S0Mode,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        AggregateOptions { tail_tol: DEFAULT_TAIL_TOL, s0_mode: S0Mode::Formula }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Reducible,
    Irreducible,
    Limit,
    /// `|irreducible − reducible|`
    Difference,
}

/// A sampled time series together with what produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub representation: Representation,
    /// Times are effective times and decay exponents carry the Gaussian-mode factor.
    pub effective: bool,
    pub params: PhysicalParams,
    /// Binomial mass left out of the block sum (0 for irreducible traces).
    pub tail_mass: f64,
}

impl ProbabilityTrace {
    pub fn sup_distance(&self, other: &ProbabilityTrace) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `n_points` uniformly spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::domain(format!("t_max must be positive and finite, got {t_max}")));
    }
    if n_points < 2 {
        return Err(Error::domain(format!("need at least 2 time points, got {n_points}")));
    }
    let last = (n_points - 1) as f64;
    Ok((0..n_points).map(|i| t_max * i as f64 / last).collect())
}

/// [`DEFAULT_POINTS`] points over four Rabi periods.
pub fn default_grid(params: &PhysicalParams) -> Vec<f64> {
    let t_max = 4.0 * params.rabi_period();
    let last = (DEFAULT_POINTS - 1) as f64;
    (0..DEFAULT_POINTS).map(|i| t_max * i as f64 / last).collect()
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::domain("times must be finite and nonnegative"));
    }
    Ok(())
}

/// `√π · w/d`, the factor dividing every decay exponent under the Gaussian-mode correction.
pub fn gaussian_divisor(params: &PhysicalParams) -> Result<f64> {
    let ratio = params
        .mode_ratio
        .ok_or_else(|| Error::Config("Gaussian-mode correction needs mode_ratio".into()))?;
    Ok(PI.sqrt() * ratio)
}

#[derive(Debug, Clone, Copy)]
struct Block {
    s: u64,
    rates: DecayRates,
    q_eff: f64,
}

struct BlockSum {
    blocks: Vec<Block>,
    weights: Vec<f64>,
    tail_mass: f64,
}

fn reducible_blocks(params: &PhysicalParams, opts: &AggregateOptions) -> Result<BlockSum> {
    params.validate()?;
    let w = binomial_log_weights(params.n, params.z(), opts.tail_tol)?;
    let nf = params.n as f64;
    let blocks = w
        .support()
        .map(|s| {
            let x = s as f64 / params.varsigma;
            Block {
                s,
                rates: DecayRates {
                    g1_s: params.gamma1_ph * x,
                    g2_s: params.gamma2_ph * x,
                    g3: params.gamma3,
                    occupancy: s as f64 / nf,
                },
                q_eff: params.q_ph * x.sqrt(),
            }
        })
        .collect();
    Ok(BlockSum { blocks, weights: w.weights, tail_mass: w.tail_mass })
}

impl BlockSum {
    fn series<F>(&self, times: &[f64], eval: F) -> Result<Vec<f64>>
    where
        F: Fn(&Block, &[f64]) -> Result<Vec<f64>> + Sync + Send,
    {
        let mut out = Vec::with_capacity(times.len());
        for chunk in times.chunks(CHUNK) {
            let columns = par_map(&self.blocks, |b| eval(b, chunk)).into_iter().collect::<Result<Vec<_>>>()?;
            let idx: Vec<usize> = (0..chunk.len()).collect();
            out.extend(par_map(&idx, |&k| {
                let column: Vec<f64> = columns.iter().map(|c| c[k]).collect();
                pairwise_dot(&self.weights, &column)
            }));
        }
        Ok(out)
    }
}

fn reducible_pg(params: &PhysicalParams, times: &[f64], opts: &AggregateOptions, divisor: f64) -> Result<(Vec<f64>, f64)> {
    check_times(times)?;
    let sum = reducible_blocks(params, opts)?;
    let mode = opts.s0_mode;
    let values = sum.series(times, |b, ts| {
        if b.s == 0 && mode == S0Mode::Physical {
            return Ok(vec![0.0; ts.len()]);
        }
        ground_probability_series(&b.rates, b.q_eff, ts, divisor)
    })?;
    Ok((values, sum.tail_mass))
}

/// Reducible-representation `p_g(t)` over a grid.
pub fn pg_total_series(params: &PhysicalParams, times: &[f64], opts: &AggregateOptions) -> Result<ProbabilityTrace> {
    let (values, tail_mass) = reducible_pg(params, times, opts, 1.0)?;
    Ok(ProbabilityTrace {
        times: times.to_vec(),
        values,
        representation: Representation::Reducible,
        effective: false,
        params: params.clone(),
        tail_mass,
    })
}

/// Reducible `p_g(t)` with every decay exponent divided by `√π w/d`; `times` are effective times.
pub fn pg_total_effective_series(
    params: &PhysicalParams,
    times: &[f64],
    opts: &AggregateOptions,
) -> Result<ProbabilityTrace> {
    let divisor = gaussian_divisor(params)?;
    let (values, tail_mass) = reducible_pg(params, times, opts, divisor)?;
    Ok(ProbabilityTrace {
        times: times.to_vec(),
        values,
        representation: Representation::Reducible,
        effective: true,
        params: params.clone(),
        tail_mass,
    })
}

pub fn pg_total(params: &PhysicalParams, t: f64, opts: &AggregateOptions) -> Result<f64> {
    Ok(pg_total_series(params, &[t], opts)?.values[0])
}

pub fn pg_total_effective(params: &PhysicalParams, t: f64, opts: &AggregateOptions) -> Result<f64> {
    Ok(pg_total_effective_series(params, &[t], opts)?.values[0])
}

fn irreducible_series(zcal: f64, bare: &BareCouplings, times: &[f64], divisor: f64) -> Result<Vec<f64>> {
    if !(zcal > 0.0) {
        return Err(Error::domain(format!("𝒵 must be positive, got {zcal}")));
    }
    check_times(times)?;
    let rates = DecayRates::effective(bare.gamma1 * zcal, bare.gamma2 * zcal, bare.gamma3);
    ground_probability_series(&rates, bare.q * zcal.sqrt(), times, divisor)
}

/// Irreducible `p_g(t)` with `[a, a†] = 𝒵` and bare couplings.
pub fn pg_irreducible_series(zcal: f64, bare: &BareCouplings, times: &[f64]) -> Result<Vec<f64>> {
    irreducible_series(zcal, bare, times, 1.0)
}

fn physical_as_bare(params: &PhysicalParams) -> BareCouplings {
    BareCouplings { q: params.q_ph, gamma1: params.gamma1_ph, gamma2: params.gamma2_ph, gamma3: params.gamma3 }
}

/// Standard irreducible curve: `𝒵 = 1` with the physical couplings.
pub fn pg_physical_series(params: &PhysicalParams, times: &[f64], effective: bool) -> Result<ProbabilityTrace> {
    params.validate()?;
    let divisor = if effective { gaussian_divisor(params)? } else { 1.0 };
    let values = irreducible_series(1.0, &physical_as_bare(params), times, divisor)?;
    Ok(ProbabilityTrace {
        times: times.to_vec(),
        values,
        representation: Representation::Irreducible,
        effective,
        params: params.clone(),
        tail_mass: 0.0,
    })
}

/// `N → ∞` limit of the reducible curve: the irreducible formula at `𝒵 = Z`
/// with bare couplings.
pub fn pg_limit_series(params: &PhysicalParams, times: &[f64], effective: bool) -> Result<ProbabilityTrace> {
    params.validate()?;
    let divisor = if effective { gaussian_divisor(params)? } else { 1.0 };
    let values = irreducible_series(params.z(), &params.bare(), times, divisor)?;
    Ok(ProbabilityTrace {
        times: times.to_vec(),
        values,
        representation: Representation::Limit,
        effective,
        params: params.clone(),
        tail_mass: 0.0,
    })
}

pub fn pg_limit(params: &PhysicalParams, t: f64) -> Result<f64> {
    Ok(pg_limit_series(params, &[t], false)?.values[0])
}

/// `|p_irr(t) − p_red(t)|`, using the Gaussian-corrected variants when `mode_ratio` is set.
pub fn difference_curve(params: &PhysicalParams, times: &[f64], opts: &AggregateOptions) -> Result<ProbabilityTrace> {
    let effective = params.mode_ratio.is_some();
    let red = if effective {
        pg_total_effective_series(params, times, opts)?
    } else {
        pg_total_series(params, times, opts)?
    };
    let irr = pg_physical_series(params, times, effective)?;
    Ok(ProbabilityTrace {
        times: times.to_vec(),
        values: irr.values.iter().zip(&red.values).map(|(a, b)| (a - b).abs()).collect(),
        representation: Representation::Difference,
        effective,
        params: params.clone(),
        tail_mass: red.tail_mass,
    })
}

/// Mean energy (in units of ħ) of the irreducible atom-field system.
pub fn energy_irr(zcal: f64, bare: &BareCouplings, omega: f64, t: f64) -> Result<f64> {
    Ok(energy_irr_series(zcal, bare, omega, &[t])?[0])
}

pub fn energy_irr_series(zcal: f64, bare: &BareCouplings, omega: f64, times: &[f64]) -> Result<Vec<f64>> {
    if !(zcal > 0.0) {
        return Err(Error::domain(format!("𝒵 must be positive, got {zcal}")));
    }
    check_times(times)?;
    let rates = DecayRates::effective(bare.gamma1 * zcal, bare.gamma2 * zcal, bare.gamma3);
    mean_energy_series(&rates, omega, bare.q * zcal.sqrt(), times)
}

/// Block-weighted mean energy in the reducible representation.
pub fn energy_total_series(params: &PhysicalParams, times: &[f64], opts: &AggregateOptions) -> Result<Vec<f64>> {
    check_times(times)?;
    let sum = reducible_blocks(params, opts)?;
    let omega = params.omega;
    sum.series(times, |b, ts| {
        if b.rates.g1_s == b.rates.g2_s {
            return ts.iter().map(|&t| mean_energy_closed_form(&b.rates, omega, b.q_eff, t)).collect();
        }
        mean_energy_series(&b.rates, omega, b.q_eff, ts)
    })
}

pub fn energy_total(params: &PhysicalParams, t: f64, opts: &AggregateOptions) -> Result<f64> {
    Ok(energy_total_series(params, &[t], opts)?[0])
}
