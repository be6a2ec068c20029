//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`. Curves come back as
//! `[t_0..t_{n-1}, y_0..y_{n-1}, ...]`, one block of `n` values per column.

use rabi_core::aggregate::{difference_curve, pg_physical_series, pg_total_series, uniform_grid, AggregateOptions};
use rabi_core::revival::forecast;
use rabi_core::PhysicalParams;
use wasm_bindgen::prelude::*;

fn params(varsigma: f64, n: u64, q_ph: f64, gamma1_ph: f64, gamma2_ph: f64, gamma3: f64) -> Result<PhysicalParams, String> {
    PhysicalParams::new(0.0, q_ph, gamma1_ph, gamma2_ph, gamma3, n, varsigma).map_err(|e| e.to_string())
}

/// Times, reducible and irreducible ground-state probability over `periods` Rabi periods.
#[allow(clippy::too_many_arguments)]
pub fn probability_curves(
    varsigma: f64,
    n: u64,
    q_ph: f64,
    gamma1_ph: f64,
    gamma2_ph: f64,
    gamma3: f64,
    periods: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let p = params(varsigma, n, q_ph, gamma1_ph, gamma2_ph, gamma3)?;
    let times = uniform_grid(periods * p.rabi_period(), points).map_err(|e| e.to_string())?;
    let red = pg_total_series(&p, &times, &AggregateOptions::default()).map_err(|e| e.to_string())?;
    let irr = pg_physical_series(&p, &times, false).map_err(|e| e.to_string())?;
    Ok([times, red.values, irr.values].concat())
}

/// Times and `|p_irr − p_red|`.
#[allow(clippy::too_many_arguments)]
pub fn difference(
    varsigma: f64,
    n: u64,
    q_ph: f64,
    gamma1_ph: f64,
    gamma2_ph: f64,
    gamma3: f64,
    periods: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let p = params(varsigma, n, q_ph, gamma1_ph, gamma2_ph, gamma3)?;
    let times = uniform_grid(periods * p.rabi_period(), points).map_err(|e| e.to_string())?;
    let d = difference_curve(&p, &times, &AggregateOptions::default()).map_err(|e| e.to_string())?;
    Ok([times, d.values].concat())
}

/// `[t_r, T_Rabi, t_r/T_Rabi, ε, γ_total]`.
pub fn revival(varsigma: f64, q_ph: f64, gamma1_ph: f64, gamma2_ph: f64, gamma3: f64) -> Result<Vec<f64>, String> {
    let n = varsigma.ceil().max(1.0) as u64;
    let fc = forecast(&params(varsigma, n, q_ph, gamma1_ph, gamma2_ph, gamma3)?).map_err(|e| e.to_string())?;
    Ok(vec![fc.t_r, fc.t_rabi, fc.ratio, fc.epsilon, fc.gamma_total])
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = probabilityCurves)]
pub fn probability_curves_js(
    varsigma: f64,
    n: f64,
    q_ph: f64,
    gamma1_ph: f64,
    gamma2_ph: f64,
    gamma3: f64,
    periods: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    probability_curves(varsigma, n as u64, q_ph, gamma1_ph, gamma2_ph, gamma3, periods, points).map_err(|e| JsError::new(&e))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = differenceCurve)]
pub fn difference_js(
    varsigma: f64,
    n: f64,
    q_ph: f64,
    gamma1_ph: f64,
    gamma2_ph: f64,
    gamma3: f64,
    periods: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    difference(varsigma, n as u64, q_ph, gamma1_ph, gamma2_ph, gamma3, periods, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = revivalForecast)]
pub fn revival_js(varsigma: f64, q_ph: f64, gamma1_ph: f64, gamma2_ph: f64, gamma3: f64) -> Result<Vec<f64>, JsError> {
    revival(varsigma, q_ph, gamma1_ph, gamma2_ph, gamma3).map_err(|e| JsError::new(&e))
}
