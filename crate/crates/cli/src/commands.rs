//! The simulation commands. Each returns its table, plot and text report without touching the filesystem.

use std::fmt::Write;

use rabi_core::aggregate::{
    difference_curve, energy_irr_series, energy_total_series, pg_limit_series, pg_physical_series, pg_total_effective_series,
    pg_total_series, uniform_grid,
};
use rabi_core::revival::{forecast, scan_revival, varsigma_threshold, DataPoint, ScanOptions, ThresholdOptions, ThresholdReport};
use rabi_core::PhysicalParams;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::plot::{ErrorBars, Plot, Series};
use crate::table::{suffix, Table};

#[derive(Debug, Clone, Default)]
pub struct Output {
    pub table: Option<Table>,
    pub svg: Option<String>,
    pub report: String,
}

fn column_suffix(cfg: &RunConfig, varsigma: f64) -> String {
    if cfg.varsigmas.len() > 1 {
        suffix(varsigma)
    } else {
        String::new()
    }
}

fn time_label(params: &PhysicalParams) -> &'static str {
    if params.mode_ratio.is_some() {
        "effective time (s)"
    } else {
        "t (s)"
    }
}

fn reducible(params: &PhysicalParams, times: &[f64], cfg: &RunConfig) -> Result<rabi_core::aggregate::ProbabilityTrace> {
    Ok(if params.mode_ratio.is_some() {
        pg_total_effective_series(params, times, &cfg.aggregate)?
    } else {
        pg_total_series(params, times, &cfg.aggregate)?
    })
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Ground-state probability in both representations and the large-`N` limit.
pub fn simulate(cfg: &RunConfig) -> Result<Output> {
    let times = cfg.grid()?;
    let effective = cfg.params.mode_ratio.is_some();
    let mut table = Table::new();
    table.push("t", times.clone());
    let mut plot = Plot {
        title: "Ground-state probability".into(),
        x_label: time_label(&cfg.params).into(),
        y_label: "p_g".into(),
        ..Plot::default()
    };
    let mut report = String::new();
    for params in cfg.runs()? {
        let sfx = column_suffix(cfg, params.varsigma);
        let red = reducible(&params, &times, cfg)?;
        let irr = pg_physical_series(&params, &times, effective)?;
        let lim = pg_limit_series(&params, &times, effective)?;
        let _ = writeln!(
            report,
            "ς = {}: tail mass {:.3e}, sup |p_reducible − p_irreducible| = {:.6e}",
            params.varsigma,
            red.tail_mass,
            sup_gap(&red.values, &irr.values)
        );
        plot.series.push(Series { label: format!("reducible ς={}", params.varsigma), xs: times.clone(), ys: red.values.clone() });
        if plot.series.len() == 1 {
            plot.series.insert(0, Series { label: "irreducible".into(), xs: times.clone(), ys: irr.values.clone() });
        }
        table.push(format!("p_reducible{sfx}"), red.values);
        table.push(format!("p_irreducible{sfx}"), irr.values);
        table.push(format!("p_limit{sfx}"), lim.values);
    }
    Ok(Output { table: Some(table), svg: Some(plot.render()), report })
}

/// `|p_irreducible − p_reducible|` per ς, optionally checked against measured error bars.
pub fn compare(cfg: &RunConfig, data: Option<&[DataPoint]>) -> Result<Output> {
    let times = cfg.grid()?;
    let mut table = Table::new();
    table.push("t", times.clone());
    let mut plot = Plot {
        title: "Difference between irreducible and reducible predictions".into(),
        x_label: time_label(&cfg.params).into(),
        y_label: "|p_irr − p_red|".into(),
        ..Plot::default()
    };
    let mut report = String::new();
    for params in cfg.runs()? {
        let diff = difference_curve(&params, &times, &cfg.aggregate)?;
        let sup = diff.values.iter().copied().fold(0.0, f64::max);
        let _ = write!(report, "ς = {}: sup difference {:.6e}", params.varsigma, sup);
        if let Some(data) = data {
            let at: Vec<f64> = data.iter().map(|d| d.t).collect();
            let d = difference_curve(&params, &at, &cfg.aggregate)?;
            let outside = d.values.iter().zip(data).filter(|(v, d)| **v > d.sigma).count();
            let _ = write!(report, ", exceeds σ at {outside} of {} data points", data.len());
        }
        report.push('\n');
        plot.series.push(Series { label: format!("ς={}", params.varsigma), xs: times.clone(), ys: diff.values.clone() });
        table.push(format!("difference{}", column_suffix(cfg, params.varsigma)), diff.values);
    }
    if let Some(data) = data {
        plot.bars = Some(ErrorBars {
            label: "σ".into(),
            xs: data.iter().map(|d| d.t).collect(),
            ys: data.iter().map(|d| d.sigma / 2.0).collect(),
            sigmas: data.iter().map(|d| d.sigma / 2.0).collect(),
        });
    }
    Ok(Output { table: Some(table), svg: Some(plot.render()), report })
}

/// Mean atom-field energy in both representations, in units of `ħ` unless `hbar` is configured.
pub fn energy(cfg: &RunConfig) -> Result<Output> {
    let times = cfg.grid()?;
    let hbar = cfg.params.hbar();
    let omega = cfg.params.omega;
    let mut table = Table::new();
    table.push("t", times.clone());
    let mut plot = Plot {
        title: "Mean energy".into(),
        x_label: "t (s)".into(),
        y_label: "⟨H⟩ / ħω".into(),
        ..Plot::default()
    };
    let mut report = String::new();
    for params in cfg.runs()? {
        let sfx = column_suffix(cfg, params.varsigma);
        let red = energy_total_series(&params, &times, &cfg.aggregate)?;
        let irr = energy_irr_series(params.z(), &params.bare(), omega, &times)?;
        let _ = writeln!(report, "ς = {}: sup |E_reducible − E_irreducible| / ω = {:.6e}", params.varsigma, sup_gap(&red, &irr) / omega);
        if plot.series.is_empty() {
            plot.series.push(Series { label: "irreducible".into(), xs: times.clone(), ys: irr.iter().map(|e| e / omega).collect() });
        }
        plot.series.push(Series {
            label: format!("reducible ς={}", params.varsigma),
            xs: times.clone(),
            ys: red.iter().map(|e| e / omega).collect(),
        });
        table.push(format!("e_reducible{sfx}"), red.iter().map(|e| e * hbar).collect());
        table.push(format!("e_irreducible{sfx}"), irr.iter().map(|e| e * hbar).collect());
    }
    Ok(Output { table: Some(table), svg: Some(plot.render()), report })
}

/// Revival forecast, plus a simulated trace around `t_r` when `scan` is set.
pub fn revival(cfg: &RunConfig, scan: bool) -> Result<Output> {
    let mut report = String::new();
    let runs = cfg.runs()?;
    for params in &runs {
        let fc = forecast(params)?;
        let _ = writeln!(report, "ς = {}", params.varsigma);
        let _ = writeln!(report, "  t_r          {:.6e} s", fc.t_r);
        let _ = writeln!(report, "  T_Rabi       {:.6e} s", fc.t_rabi);
        let _ = writeln!(report, "  t_r/T_Rabi   {:.6}", fc.ratio);
        let _ = writeln!(report, "  epsilon      {:.6e}", fc.epsilon);
        let _ = writeln!(report, "  gamma_total  {:.6e} 1/s", fc.gamma_total);
    }
    if !scan {
        return Ok(Output { table: None, svg: None, report });
    }
    if runs.len() != 1 {
        return Err(CliError::Config("--scan takes a single ς".into()));
    }
    let opts = ScanOptions { aggregate: cfg.aggregate, ..ScanOptions::default() };
    let s = scan_revival(&runs[0], &opts)?;
    let _ = writeln!(
        report,
        "  envelope max {:.6e} at t = {:.6e} s ({:+.3}% from t_r)",
        s.peak.amplitude,
        s.peak.t,
        100.0 * (s.peak.t / s.forecast.t_r - 1.0)
    );
    let mut table = Table::new();
    table.push("t", s.times.clone());
    table.push("p_reducible", s.values.clone());
    let plot = Plot {
        title: format!("Revival at ς = {}", runs[0].varsigma),
        x_label: "t (s)".into(),
        y_label: "p_g".into(),
        series: vec![
            Series { label: "reducible".into(), xs: s.times.clone(), ys: s.values.clone() },
            Series {
                label: "envelope".into(),
                xs: s.envelope.iter().map(|e| e.t).collect(),
                ys: s.envelope.iter().map(|e| 0.5 + e.amplitude).collect(),
            },
        ],
        bars: None,
        markers: vec![(s.forecast.t_r, "t_r".into()), (s.peak.t, "max".into())],
    };
    Ok(Output { table: Some(table), svg: Some(plot.render()), report })
}

/// Smallest ς consistent with `data`. Both thresholds are reported when `mode_ratio` is set.
pub fn fit(cfg: &RunConfig, data: &[DataPoint], search: (f64, f64)) -> Result<(Output, Vec<ThresholdReport>)> {
    let base = ThresholdOptions { aggregate: cfg.aggregate, ..ThresholdOptions::default() };
    let mut variants = vec![base];
    if cfg.params.mode_ratio.is_some() {
        variants.push(ThresholdOptions { corrected: true, ..base });
    }
    let mut report = String::new();
    let mut results = Vec::new();
    for opts in &variants {
        let r = varsigma_threshold(data, &cfg.params, search, opts)?;
        let kind = if r.corrected { "corrected" } else { "uncorrected" };
        let _ = writeln!(report, "{kind} threshold: ς* = {:.6}", r.varsigma_star);
        let _ = writeln!(report, "  monotone feasibility above ς*: {}", if r.monotone() { "yes" } else { "NO" });
        for p in &r.non_monotone {
            let _ = writeln!(report, "  infeasible above ς*: ς = {:.6}, violation {:.3e}", p.varsigma, p.max_violation);
        }
        let _ = writeln!(report, "  probes:");
        for p in &r.probes {
            let _ = writeln!(
                report,
                "    ς = {:<14.6} max violation {:+.3e} {}",
                p.varsigma,
                p.max_violation,
                if p.feasible { "feasible" } else { "infeasible" }
            );
        }
        let _ = writeln!(report, "  residuals at ς*:");
        for (d, res) in data.iter().zip(&r.residuals) {
            let _ = writeln!(report, "    t = {:.6e}  residual {:+.3e}  sigma {:.3e}", d.t, res, d.sigma);
        }
        results.push(r);
    }

    let first = &results[0];
    let mut table = Table::new();
    table.push("t", data.iter().map(|d| d.t).collect());
    table.push("p", data.iter().map(|d| d.p).collect());
    table.push("sigma", data.iter().map(|d| d.sigma).collect());
    table.push("model", data.iter().zip(&first.residuals).map(|(d, r)| d.p + r).collect());
    table.push("residual", first.residuals.clone());

    let t_end = data.iter().map(|d| d.t).fold(0.0, f64::max).max(cfg.params.rabi_period());
    let times = uniform_grid(t_end, cfg.points)?;
    let star = cfg.params.with_varsigma(first.varsigma_star)?;
    let plot = Plot {
        title: format!("Threshold fit: ς* = {:.1}", first.varsigma_star),
        x_label: "t (s)".into(),
        y_label: "p_g".into(),
        series: vec![
            Series { label: "irreducible".into(), xs: times.clone(), ys: pg_physical_series(&star, &times, false)?.values },
            Series { label: format!("reducible ς*={:.1}", first.varsigma_star), xs: times.clone(), ys: pg_total_series(&star, &times, &cfg.aggregate)?.values },
        ],
        bars: Some(ErrorBars {
            label: "data".into(),
            xs: data.iter().map(|d| d.t).collect(),
            ys: data.iter().map(|d| d.p).collect(),
            sigmas: data.iter().map(|d| d.sigma).collect(),
        }),
        markers: Vec::new(),
    };
    Ok((Output { table: Some(table), svg: Some(plot.render()), report }, results))
}
