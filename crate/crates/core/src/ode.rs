//! Adaptive Dormand–Prince 5(4) integration of autonomous linear matrix ODEs
//! `dρ/dt = L(ρ)`, used as an independent oracle for the closed-form solutions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-10, rtol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

pub struct DormandPrince {
    pub tol: Tolerance,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        DormandPrince { tol: Tolerance::default(), max_steps: 10_000_000 }
    }
}

fn axpy(y: &CMatrix, terms: &[(f64, &CMatrix)], h: f64) -> CMatrix {
    let mut out = y.clone();
    for &(c, k) in terms {
        if c != 0.0 {
            out += k * Complex64::new(h * c, 0.0);
        }
    }
    out
}

impl DormandPrince {
    pub fn new(tol: Tolerance) -> Self {
        DormandPrince { tol, ..Default::default() }
    }

    fn error_norm(&self, err: &CMatrix, y0: &CMatrix, y1: &CMatrix) -> f64 {
        let mut worst = 0.0f64;
        for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
            let scale = self.tol.atol + self.tol.rtol * a.norm().max(b.norm());
            worst = worst.max(e.norm() / scale);
        }
        worst
    }

    /// Integrate from `t0` through each time in `grid` (nondecreasing, ≥ t0),
    /// returning the state at each grid time. `on_accept` runs after every
    /// accepted step and may project the state (e.g. enforce Hermiticity).
    pub fn solve<F, P>(
        &self,
        rhs: F,
        y0: &CMatrix,
        t0: f64,
        grid: &[f64],
        mut on_accept: P,
    ) -> Result<(Vec<CMatrix>, Stats)>
    where
        F: Fn(&CMatrix) -> CMatrix,
        P: FnMut(&mut CMatrix),
    {
        let mut stats = Stats::default();
        let mut out = Vec::with_capacity(grid.len());
        let mut t = t0;
        let mut y = y0.clone();
        let mut k1 = rhs(&y);

        let t_end = grid.iter().copied().fold(t0, f64::max);
        let span = t_end - t0;
        let ynorm = y.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-12);
        let fnorm = k1.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut h = if fnorm > 0.0 { 0.01 * ynorm / fnorm } else { span };
        if !(h > 0.0) || h > span {
            h = span.max(f64::MIN_POSITIVE);
        }

        for &target in grid {
            if target < t {
                return Err(Error::Integration { t, reason: format!("grid time {target} precedes current time") });
            }
            while t < target {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::Integration { t, reason: "step budget exhausted".into() });
                }
                let remaining = target - t;
                let last = h >= remaining;
                let hs = if last { remaining } else { h };
                if hs < 1e-15 * t.abs().max(span).max(f64::MIN_POSITIVE) && !last {
                    return Err(Error::Integration { t, reason: format!("step size underflow (h = {hs:e})") });
                }

                let k2 = rhs(&axpy(&y, &[(A21, &k1)], hs));
                let k3 = rhs(&axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
                let k4 = rhs(&axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
                let k5 = rhs(&axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
                let k6 = rhs(&axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
                let y_new = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], hs);
                let k7 = rhs(&y_new);
                let err = axpy(
                    &CMatrix::zeros(y.nrows(), y.ncols()),
                    &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                    hs,
                );
                let e = self.error_norm(&err, &y, &y_new);

                if e <= 1.0 {
                    stats.accepted += 1;
                    t = if last { target } else { t + hs };
                    y = y_new;
                    on_accept(&mut y);
                    // the projection may move y, so k7 cannot be reused as the next k1
                    k1 = rhs(&y);
                    let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    if !last {
                        h = hs * factor;
                    } else {
                        h = h.max(hs * factor.min(1.0));
                    }
                } else {
                    stats.rejected += 1;
                    h = hs * (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
                }
            }
            out.push(y.clone());
        }
        Ok((out, stats))
    }
}
