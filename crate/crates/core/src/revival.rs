//! Collapse and revival of vacuum Rabi oscillations at finite `ς`.
//!
//! Neighbouring blocks oscillate at `2q_ph√(s/ς)` and `2q_ph√((s−1)/ς)`.
//! They come back into phase after
//!
//! ```text
//! t_r = (ς + √(ς(ς−1))) π/q_ph ≈ 2ς T_Rabi
//! ```
//!
//! by which time the coherence envelope has decayed to
//! `ε = ½ exp(−(γ1_ph + γ2_ph + γ3) t_r / 4)`.

use serde::Serialize;

use crate::aggregate::{pg_total_effective_series, pg_total_series, AggregateOptions};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::sum::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevivalForecast {
    pub t_r: f64,
    pub t_rabi: f64,
    /// `t_r / T_Rabi = ς + √(ς(ς−1))`
    pub ratio: f64,
    pub epsilon: f64,
    pub gamma_total: f64,
}

pub fn revival_time(varsigma: f64, q_ph: f64) -> Result<f64> {
    if !(varsigma >= 1.0 && varsigma.is_finite()) {
        return Err(Error::domain(format!("revival time needs ς ≥ 1, got {varsigma}")));
    }
    if !(q_ph > 0.0 && q_ph.is_finite()) {
        return Err(Error::domain(format!("q_ph must be positive, got {q_ph}")));
    }
    Ok(revival_ratio(varsigma) * std::f64::consts::PI / q_ph)
}

fn revival_ratio(varsigma: f64) -> f64 {
    varsigma + (varsigma * (varsigma - 1.0)).sqrt()
}

pub fn revival_amplitude(gamma1_ph: f64, gamma2_ph: f64, gamma3: f64, t_r: f64) -> Result<f64> {
    if !(t_r > 0.0) {
        return Err(Error::domain(format!("t_r must be positive, got {t_r}")));
    }
    Ok(0.5 * (-(gamma1_ph + gamma2_ph + gamma3) * t_r / 4.0).exp())
}

/// Total rate `γ1_ph + γ2_ph + γ3` that yields revival amplitude `ε` at `t_r`.
pub fn gamma_from_epsilon(epsilon: f64, t_r: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!("ε must lie in (0, ½), got {epsilon}")));
    }
    if !(t_r > 0.0) {
        return Err(Error::domain(format!("t_r must be positive, got {t_r}")));
    }
    Ok(-(4.0 / t_r) * (2.0 * epsilon).ln())
}

/// Rabi frequency `2q_ph√(s/ς)` of block `s`.
pub fn most_probable_rabi_frequency(s: f64, varsigma: f64, q_ph: f64) -> Result<f64> {
    if !(s >= 0.0) || !(varsigma > 0.0) {
        return Err(Error::domain("need s ≥ 0 and ς > 0"));
    }
    Ok(2.0 * q_ph * (s / varsigma).sqrt())
}

pub fn forecast(params: &PhysicalParams) -> Result<RevivalForecast> {
    params.validate()?;
    let t_r = revival_time(params.varsigma, params.q_ph)?;
    Ok(RevivalForecast {
        t_r,
        t_rabi: params.rabi_period(),
        ratio: revival_ratio(params.varsigma),
        epsilon: revival_amplitude(params.gamma1_ph, params.gamma2_ph, params.gamma3, t_r)?,
        gamma_total: params.gamma1_ph + params.gamma2_ph + params.gamma3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    /// Window centre.
    pub t: f64,
    /// Half the peak-to-trough excursion inside the window.
    pub amplitude: f64,
}

/// Oscillation envelope from windows of `window` samples, advanced by half a window.
pub fn oscillation_envelope(times: &[f64], values: &[f64], window: usize) -> Vec<EnvelopePoint> {
    let window = window.max(2);
    let step = (window / 2).max(1);
    let mut out = Vec::new();
    let mut start = 0;
    while start + window <= values.len() {
        let slice = &values[start..start + window];
        let hi = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = slice.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(EnvelopePoint { t: 0.5 * (times[start] + times[start + window - 1]), amplitude: 0.5 * (hi - lo) });
        start += step;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RevivalScan {
    pub forecast: RevivalForecast,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub envelope: Vec<EnvelopePoint>,
    /// Envelope maximum after the collapse.
    pub peak: EnvelopePoint,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub samples_per_period: usize,
    /// Scan window `[lo·t_r, hi·t_r]`.
    pub lo: f64,
    pub hi: f64,
    pub aggregate: AggregateOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { samples_per_period: 32, lo: 0.5, hi: 1.2, aggregate: AggregateOptions::default() }
    }
}

/// Simulate `p_g(t)` around the forecast revival time and locate the envelope maximum.
pub fn scan_revival(params: &PhysicalParams, opts: &ScanOptions) -> Result<RevivalScan> {
    let fc = forecast(params)?;
    if !(opts.lo >= 0.0 && opts.hi > opts.lo) || opts.samples_per_period < 4 {
        return Err(Error::domain("scan window must satisfy 0 ≤ lo < hi and ≥ 4 samples per period"));
    }
    let dt = fc.t_rabi / opts.samples_per_period as f64;
    let t0 = opts.lo * fc.t_r;
    let count = ((opts.hi - opts.lo) * fc.t_r / dt).ceil() as usize + 1;
    let times: Vec<f64> = (0..count).map(|i| t0 + i as f64 * dt).collect();
    let values = pg_total_series(params, &times, &opts.aggregate)?.values;
    let envelope = oscillation_envelope(&times, &values, opts.samples_per_period);
    let peak = envelope
        .iter()
        .copied()
        .fold(None, |best: Option<EnvelopePoint>, e| match best {
            Some(b) if b.amplitude >= e.amplitude => Some(b),
            _ => Some(e),
        })
        .ok_or_else(|| Error::domain("scan window shorter than one Rabi period"))?;
    Ok(RevivalScan { forecast: fc, times, values, envelope, peak })
}

/// One measured point `p ± sigma` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataPoint {
    pub t: f64,
    pub p: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub varsigma: f64,
    /// `max_i (|p_model − p_i| − σ_i)`; feasible when ≤ 0.
    pub max_violation: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ThresholdOptions {
    pub rel_tol: f64,
    /// Interior probes evaluated per round.
    pub batch: usize,
    /// Geometric probes above `ς*` used to check that feasibility persists.
    pub check_points: usize,
    /// Apply the Gaussian-mode correction (needs `mode_ratio`).
    pub corrected: bool,
    pub aggregate: AggregateOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { rel_tol: 1e-3, batch: 3, check_points: 8, corrected: false, aggregate: AggregateOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub varsigma_star: f64,
    pub corrected: bool,
    /// `p_model(ς*, t_i) − p_i` per data point.
    pub residuals: Vec<f64>,
    /// Every probe evaluated, in evaluation order.
    pub probes: Vec<Probe>,
    /// Probes at or above `ς*` that turned out infeasible.
    pub non_monotone: Vec<Probe>,
}

impl ThresholdReport {
    pub fn monotone(&self) -> bool {
        self.non_monotone.is_empty()
    }
}

pub fn validate_data(data: &[DataPoint]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::domain("data set is empty"));
    }
    for (i, d) in data.iter().enumerate() {
        if !(d.sigma > 0.0) || !d.t.is_finite() || d.t < 0.0 || !d.p.is_finite() {
            return Err(Error::domain(format!("data point {i}: need t ≥ 0, finite p and sigma > 0")));
        }
    }
    Ok(())
}

fn model(params: &PhysicalParams, times: &[f64], opts: &ThresholdOptions) -> Result<Vec<f64>> {
    let trace = if opts.corrected {
        pg_total_effective_series(params, times, &opts.aggregate)?
    } else {
        pg_total_series(params, times, &opts.aggregate)?
    };
    Ok(trace.values)
}

/// Residuals `p_model − p_i` of the reducible model at `varsigma`.
pub fn residuals(template: &PhysicalParams, varsigma: f64, data: &[DataPoint], opts: &ThresholdOptions) -> Result<Vec<f64>> {
    let params = template.with_varsigma(varsigma)?;
    let times: Vec<f64> = data.iter().map(|d| d.t).collect();
    let p = model(&params, &times, opts)?;
    Ok(p.iter().zip(data).map(|(m, d)| m - d.p).collect())
}

fn probe(template: &PhysicalParams, varsigma: f64, data: &[DataPoint], opts: &ThresholdOptions) -> Result<Probe> {
    let r = residuals(template, varsigma, data, opts)?;
    let max_violation = r.iter().zip(data).map(|(r, d)| r.abs() - d.sigma).fold(f64::NEG_INFINITY, f64::max);
    Ok(Probe { varsigma, max_violation, feasible: max_violation <= 0.0 })
}

fn probe_batch(template: &PhysicalParams, points: &[f64], data: &[DataPoint], opts: &ThresholdOptions) -> Result<Vec<Probe>> {
    par_map(points, |&v| probe(template, v, data, opts)).into_iter().collect()
}

/// Smallest `ς ∈ [lo, hi]` (to relative `rel_tol`) for which the reducible
/// model stays inside every error bar, assuming feasibility is monotone in `ς`.
///
/// Each round probes `batch` geometric interior points in parallel and keeps
/// the bracket between the last infeasible and first feasible probe. The
/// assumption is checked afterwards on a geometric grid above `ς*`.
pub fn varsigma_threshold(
    data: &[DataPoint],
    template: &PhysicalParams,
    search: (f64, f64),
    opts: &ThresholdOptions,
) -> Result<ThresholdReport> {
    validate_data(data)?;
    let (lo, hi) = search;
    if !(lo > 0.0 && hi >= lo && hi <= template.n as f64) {
        return Err(Error::domain(format!("search range must satisfy 0 < lo ≤ hi ≤ N, got [{lo}, {hi}]")));
    }
    if opts.corrected && template.mode_ratio.is_none() {
        return Err(Error::Config("corrected threshold needs mode_ratio".into()));
    }
    let batch = opts.batch.max(1);
    let mut probes = Vec::new();

    let ends = probe_batch(template, &[lo, hi], data, opts)?;
    probes.extend_from_slice(&ends);
    if !ends[1].feasible {
        return Err(Error::Infeasible { varsigma: hi, max_violation: ends[1].max_violation });
    }

    let star = if ends[0].feasible {
        lo
    } else {
        let (mut a, mut b) = (lo, hi);
        while (b - a) > opts.rel_tol * b {
            let ratio = b / a;
            let points: Vec<f64> = (1..=batch).map(|k| a * ratio.powf(k as f64 / (batch + 1) as f64)).collect();
            let results = probe_batch(template, &points, data, opts)?;
            probes.extend_from_slice(&results);
            match results.iter().position(|p| p.feasible) {
                Some(0) => b = points[0],
                Some(k) => {
                    a = points[k - 1];
                    b = points[k];
                }
                None => a = *points.last().expect("batch ≥ 1"),
            }
        }
        b
    };

    let mut non_monotone = Vec::new();
    if star < hi && opts.check_points > 0 {
        let n = opts.check_points;
        let grid: Vec<f64> = (1..=n).map(|k| star * (hi / star).powf(k as f64 / n as f64)).collect();
        let checks = probe_batch(template, &grid, data, opts)?;
        probes.extend_from_slice(&checks);
        non_monotone.extend(checks.into_iter().filter(|p| !p.feasible));
    }
    non_monotone.extend(probes.iter().filter(|p| p.varsigma >= star && !p.feasible).copied());
    non_monotone.sort_by(|a, b| a.varsigma.total_cmp(&b.varsigma));
    non_monotone.dedup_by(|a, b| a.varsigma == b.varsigma);

    Ok(ThresholdReport {
        varsigma_star: star,
        corrected: opts.corrected,
        residuals: residuals(template, star, data, opts)?,
        probes,
        non_monotone,
    })
}
