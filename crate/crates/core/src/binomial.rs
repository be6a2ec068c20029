//! Binomial block weights `C(N,s) Z^s (1−Z)^(N−s)` in log space.
//!
//! The log-pmf uses the saddle-point decomposition (Stirling remainders plus
//! the deviance term `bd0`), which keeps full relative accuracy for `N` up to
//! 10⁹ where differences of raw log-gamma values would cancel catastrophically.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Default neglected-mass tolerance on each side of the support.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// `ln(n!) − [(n + ½) ln n − n + ½ ln 2π]` for integer `n ≥ 0`.
fn stirling_remainder(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        if n == 0.0 {
            // ln 0! − ½ ln 2π with the (n+½)ln n − n terms taken as 0
            return -0.5 * (2.0 * PI).ln();
        }
        let mut fact = 1.0f64;
        let mut k = 2.0;
        while k <= n {
            fact *= k;
            k += 1.0;
        }
        return fact.ln() - (n + 0.5) * n.ln() + n - 0.5 * (2.0 * PI).ln();
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance `x ln(x/m) + m − x`, accurate when `x ≈ m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1.0;
        loop {
            ej *= v;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / m).ln() + m - x
}

/// Natural log of the binomial probability mass at `s` for `N` trials with success probability `z`.
pub fn ln_binomial_pmf(s: u64, n: u64, z: f64) -> f64 {
    debug_assert!(s <= n);
    let (x, nf) = (s as f64, n as f64);
    let y = 1.0 - z;
    if z == 0.0 {
        return if s == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if y == 0.0 {
        return if s == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if s == 0 {
        return if z < 0.1 { -deviance(nf, nf * y) - nf * z } else { nf * y.ln() };
    }
    if s == n {
        return if y < 0.1 { -deviance(nf, nf * z) - nf * y } else { nf * z.ln() };
    }
    let lc = stirling_remainder(nf)
        - stirling_remainder(x)
        - stirling_remainder(nf - x)
        - deviance(x, nf * z)
        - deviance(nf - x, nf * y);
    let lf = (2.0 * PI).ln() + x.ln() + (-x / nf).ln_1p();
    lc - 0.5 * lf
}

/// Truncated binomial distribution over the blocks `s ∈ [s_lo, s_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialWeights {
    pub n: u64,
    pub z: f64,
    pub s_lo: u64,
    pub s_hi: u64,
    pub log_weights: Vec<f64>,
    pub weights: Vec<f64>,
    /// Probability mass outside `[s_lo, s_hi]`.
    pub tail_mass: f64,
}

impl BinomialWeights {
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.s_lo..=self.s_hi
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Pairwise sum of the retained weights.
    pub fn total(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Walk outward from `start` in direction `step` until the mass beyond the
/// current point is bounded far below `tail_tol`. Returns the visited pmf
/// values (in walk order) and a geometric bound for what lies beyond.
fn walk_tail(n: u64, z: f64, start: u64, down: bool, tail_tol: f64) -> (Vec<f64>, f64) {
    let mut values = Vec::new();
    let mut s = start;
    let mut prev = ln_binomial_pmf(s, n, z).exp();
    loop {
        if (down && s == 0) || (!down && s == n) {
            return (values, 0.0);
        }
        s = if down { s - 1 } else { s + 1 };
        let w = ln_binomial_pmf(s, n, z).exp();
        values.push(w);
        // the pmf is log-concave, so successive ratios shrink away from the mode
        let ratio = if prev > 0.0 { w / prev } else { 0.0 };
        prev = w;
        if ratio < 1.0 {
            let bound = w * ratio / (1.0 - ratio);
            if bound < 1e-6 * tail_tol || w == 0.0 {
                return (values, bound);
            }
        }
    }
}

/// Binomial weights with each side truncated where its neglected mass stays below `tail_tol`.
pub fn binomial_log_weights(n: u64, z: f64, tail_tol: f64) -> Result<BinomialWeights> {
    if !(tail_tol > 0.0) {
        return Err(Error::domain(format!("tail_tol must be positive, got {tail_tol}")));
    }
    if n == 0 || n > 1_000_000_000 {
        return Err(Error::domain(format!("N must lie in [1, 1e9], got {n}")));
    }
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::domain(format!("Z must lie in (0, 1], got {z}")));
    }
    if z == 1.0 {
        return Ok(BinomialWeights {
            n,
            z,
            s_lo: n,
            s_hi: n,
            log_weights: vec![0.0],
            weights: vec![1.0],
            tail_mass: 0.0,
        });
    }

    let nf = n as f64;
    let mode = (((nf + 1.0) * z).floor() as u64).min(n);

    // Left side: walked values are ordered mode-1, mode-2, ...
    let (left, left_beyond) = walk_tail(n, z, mode, true, tail_tol);
    let (right, right_beyond) = walk_tail(n, z, mode, false, tail_tol);

    // Cumulative mass from the far end inward; drop points while it stays under tail_tol.
    let mut left_tail = left_beyond;
    let mut drop_left = 0usize;
    for &w in left.iter().rev() {
        if left_tail + w < tail_tol {
            left_tail += w;
            drop_left += 1;
        } else {
            break;
        }
    }
    let mut right_tail = right_beyond;
    let mut drop_right = 0usize;
    for &w in right.iter().rev() {
        if right_tail + w < tail_tol {
            right_tail += w;
            drop_right += 1;
        } else {
            break;
        }
    }
    let s_lo = mode - (left.len() - drop_left) as u64;
    let s_hi = mode + (right.len() - drop_right) as u64;

    let log_weights: Vec<f64> = (s_lo..=s_hi).map(|s| ln_binomial_pmf(s, n, z)).collect();
    let weights: Vec<f64> = log_weights.iter().map(|l| l.exp()).collect();
    Ok(BinomialWeights {
        n,
        z,
        s_lo,
        s_hi,
        log_weights,
        weights,
        tail_mass: left_tail + right_tail,
    })
}
