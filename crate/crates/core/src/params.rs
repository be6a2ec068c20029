//! Physical parameters and the bare ↔ renormalized map.
//!
//! Frequencies and rates are angular (rad/s and 1/s). The Rabi period of the
//! ground-state probability is `π/q_ph`: the oscillating term at the most
//! probable block is `cos(2 q_ph t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Bare (unrenormalized) couplings as they appear in the Hamiltonian and
/// master equation of the reducible representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareCouplings {
    pub q: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

/// Observable couplings: `q_ph = q√Z`, `γ1,ph = γ1 Z`, `γ2,ph = γ2 Z`, `γ3` unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormalizedCouplings {
    pub q_ph: f64,
    pub gamma1_ph: f64,
    pub gamma2_ph: f64,
    pub gamma3: f64,
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::domain(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

/// Map bare couplings to their observable counterparts for maximal mode weight `z`.
pub fn renormalize(q: f64, gamma1: f64, gamma2: f64, gamma3: f64, z: f64) -> Result<RenormalizedCouplings> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::domain(format!("Z must lie in (0, 1], got {z}")));
    }
    check_rate("q", q)?;
    check_rate("gamma1", gamma1)?;
    check_rate("gamma2", gamma2)?;
    check_rate("gamma3", gamma3)?;
    Ok(RenormalizedCouplings {
        q_ph: q * z.sqrt(),
        gamma1_ph: gamma1 * z,
        gamma2_ph: gamma2 * z,
        gamma3,
    })
}

/// Recover the bare couplings from physical ones: `q = q_ph √(N/ς)`, `γi = γi,ph N/ς`.
pub fn bare_from_physical(p: &PhysicalParams) -> BareCouplings {
    let ratio = p.n as f64 / p.varsigma;
    BareCouplings {
        q: p.q_ph * ratio.sqrt(),
        gamma1: p.gamma1_ph * ratio,
        gamma2: p.gamma2_ph * ratio,
        gamma3: p.gamma3,
    }
}

/// Full parameter set of a run.
///
/// `Z = ς/N` is derived, so `ς = N·Z` holds by construction. The JSON form uses
/// the key `N` for the oscillator count and rejects unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Atomic transition and resonant mode frequency (rad/s).
    pub omega: f64,
    pub q_ph: f64,
    pub gamma1_ph: f64,
    pub gamma2_ph: f64,
    pub gamma3: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub varsigma: f64,
    /// Gaussian width over cavity length, `w/d`. Absent means no Gaussian-mode correction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
}

impl PhysicalParams {
    pub fn new(
        omega: f64,
        q_ph: f64,
        gamma1_ph: f64,
        gamma2_ph: f64,
        gamma3: f64,
        n: u64,
        varsigma: f64,
    ) -> Result<Self> {
        let p = PhysicalParams {
            omega,
            q_ph,
            gamma1_ph,
            gamma2_ph,
            gamma3,
            n,
            varsigma,
            mode_ratio: None,
            hbar: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("omega", self.omega)?;
        check_rate("q_ph", self.q_ph)?;
        check_rate("gamma1_ph", self.gamma1_ph)?;
        check_rate("gamma2_ph", self.gamma2_ph)?;
        check_rate("gamma3", self.gamma3)?;
        if self.n == 0 {
            return Err(Error::domain("N must be a positive integer"));
        }
        if !(self.varsigma > 0.0 && self.varsigma <= self.n as f64) {
            return Err(Error::domain(format!(
                "varsigma must lie in (0, N = {}], got {}",
                self.n, self.varsigma
            )));
        }
        if let Some(r) = self.mode_ratio {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::domain(format!("mode_ratio must be positive, got {r}")));
            }
        }
        if let Some(h) = self.hbar {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::domain(format!("hbar must be positive, got {h}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: PhysicalParams = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Maximal mode weight `Z = ς/N`.
    pub fn z(&self) -> f64 {
        self.varsigma / self.n as f64
    }

    pub fn hbar(&self) -> f64 {
        self.hbar.unwrap_or(1.0)
    }

    pub fn bare(&self) -> BareCouplings {
        bare_from_physical(self)
    }

    pub fn renormalized(&self) -> RenormalizedCouplings {
        RenormalizedCouplings {
            q_ph: self.q_ph,
            gamma1_ph: self.gamma1_ph,
            gamma2_ph: self.gamma2_ph,
            gamma3: self.gamma3,
        }
    }

    /// `π/q_ph`.
    pub fn rabi_period(&self) -> f64 {
        std::f64::consts::PI / self.q_ph
    }

    pub fn with_varsigma(&self, varsigma: f64) -> Result<Self> {
        let p = PhysicalParams { varsigma, ..self.clone() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_n(&self, n: u64) -> Result<Self> {
        let p = PhysicalParams { n, ..self.clone() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mode_ratio(&self, mode_ratio: Option<f64>) -> Result<Self> {
        let p = PhysicalParams { mode_ratio, ..self.clone() };
        p.validate()?;
        Ok(p)
    }
}

/// Vacuum mode weights `Z_ω = |O_ω|²` of a single oscillator wave packet.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumSpectrum {
    modes: Vec<(f64, f64)>,
    z: f64,
}

impl VacuumSpectrum {
    /// Build from `(ω, Z_ω)` pairs. Weights must be nonnegative and sum to one.
    pub fn new(modes: Vec<(f64, f64)>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::domain("vacuum spectrum is empty"));
        }
        for (i, &(w, zw)) in modes.iter().enumerate() {
            check_rate("mode frequency", w)?;
            if !(zw.is_finite() && zw >= 0.0) {
                return Err(Error::domain(format!("mode weight must be nonnegative, got {zw}")));
            }
            if modes[..i].iter().any(|&(v, _)| v == w) {
                return Err(Error::domain(format!("duplicate mode frequency {w}")));
            }
        }
        let total: f64 = modes.iter().map(|m| m.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("mode weights sum to {total}, expected 1")));
        }
        let z = modes.iter().map(|m| m.1).fold(0.0, f64::max);
        Ok(VacuumSpectrum { modes, z })
    }

    pub fn modes(&self) -> &[(f64, f64)] {
        &self.modes
    }

    /// `Z = max_ω Z_ω`.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Cutoff function `χ_ω = Z_ω / Z` for each mode, in mode order.
    pub fn chi(&self) -> Vec<f64> {
        self.modes.iter().map(|&(_, zw)| zw / self.z).collect()
    }
}

/// Energy of a vacuum of `n` oscillator wave packets, `(N/2) Σ ħω Z_ω`.
pub fn vacuum_energy(spectrum: &VacuumSpectrum, n: u64, hbar: f64) -> f64 {
    let sum: f64 = spectrum.modes.iter().map(|&(w, zw)| hbar * w * zw).sum();
    0.5 * n as f64 * sum
}

/// The same energy grouped as `(ZN/2) Σ ħω χ_ω`.
pub fn vacuum_energy_cutoff_form(spectrum: &VacuumSpectrum, n: u64, hbar: f64) -> f64 {
    let sum: f64 = spectrum
        .modes
        .iter()
        .zip(spectrum.chi())
        .map(|(&(w, _), chi)| hbar * w * chi)
        .sum();
    0.5 * spectrum.z * n as f64 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sample() -> PhysicalParams {
        PhysicalParams::new(3.2e11, 47.0e3 * std::f64::consts::PI, 83.912, 83.912, 10.0, 100_000, 400.0).unwrap()
    }

    #[test]
    fn renormalize_identity_at_unit_z() {
        let r = renormalize(2.0, 3.0, 4.0, 5.0, 1.0).unwrap();
        assert_eq!((r.q_ph, r.gamma1_ph, r.gamma2_ph, r.gamma3), (2.0, 3.0, 4.0, 5.0));
    }

    #[test]
    fn renormalize_quarter() {
        let r = renormalize(2.0, 4.0, 8.0, 5.0, 0.25).unwrap();
        assert_eq!((r.q_ph, r.gamma1_ph, r.gamma2_ph, r.gamma3), (1.0, 1.0, 2.0, 5.0));
    }

    #[test]
    fn renormalize_rejects_bad_z() {
        assert!(renormalize(1.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(renormalize(1.0, 1.0, 1.0, 1.0, 1.5).is_err());
        assert!(renormalize(1.0, -1.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn bare_coupling_examples() {
        let p = PhysicalParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 100, 4.0).unwrap();
        assert_relative_eq!(p.bare().q, 5.0, max_relative = 1e-15);
        let p = PhysicalParams::new(1.0, 0.7, 0.0, 0.0, 0.0, 100, 100.0).unwrap();
        assert_eq!(p.bare().q, 0.7);
    }

    #[test]
    fn doubling_n_at_fixed_varsigma() {
        let p = sample();
        let p2 = p.with_n(2 * p.n).unwrap();
        assert_eq!(p2.varsigma, p.varsigma);
        assert_eq!(p2.renormalized(), p.renormalized());
        assert_relative_eq!(p2.z(), 0.5 * p.z(), max_relative = 1e-15);
        let b1 = p.bare();
        let b2 = p2.bare();
        assert_relative_eq!(b1.q / (p.n as f64).sqrt(), b2.q / (p2.n as f64).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn validation() {
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 10, 11.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN, 1.0, 1.0, 10, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 10, 0.0).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let text = r#"{"omega": 1.0, "q_ph": 2.0, "gamma1_ph": 0.1, "gamma2_ph": 0.1,
            "gamma3": 0.01, "N": 1000, "varsigma": 40, "mode_ratio": 0.5}"#;
        let p = PhysicalParams::from_json(text).unwrap();
        assert_eq!(p.n, 1000);
        assert_eq!(p.mode_ratio, Some(0.5));
        assert_eq!(p.hbar(), 1.0);
        assert_eq!(PhysicalParams::from_json(&p.to_json()).unwrap(), p);
        let bad = r#"{"omega": 1.0, "q_ph": 2.0, "gamma1_ph": 0.1, "gamma2_ph": 0.1,
            "gamma3": 0.01, "N": 1000, "varsigma": 40, "temperature": 1.0}"#;
        assert!(matches!(PhysicalParams::from_json(bad), Err(Error::Config(_))));
        let out_of_range = r#"{"omega": 1.0, "q_ph": 2.0, "gamma1_ph": 0.1, "gamma2_ph": 0.1,
            "gamma3": 0.01, "N": 10, "varsigma": 40}"#;
        assert!(matches!(PhysicalParams::from_json(out_of_range), Err(Error::Domain(_))));
    }

    #[test]
    fn vacuum_energy_examples() {
        let single = VacuumSpectrum::new(vec![(3.0, 1.0)]).unwrap();
        assert_eq!(vacuum_energy(&single, 2, 1.0), 3.0);
        let pair = VacuumSpectrum::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        assert_eq!(vacuum_energy(&pair, 1, 1.0), 1.0);
        assert_relative_eq!(vacuum_energy_cutoff_form(&pair, 1, 1.0), 1.0, max_relative = 1e-12);
        assert!(VacuumSpectrum::new(vec![]).is_err());
        assert!(VacuumSpectrum::new(vec![(1.0, 0.6), (2.0, 0.6)]).is_err());
        assert!(VacuumSpectrum::new(vec![(1.0, 0.5), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn fifty_mode_spectrum_matches_direct_sum() {
        // deterministic pseudo-random weights
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let raw: Vec<(f64, f64)> = (0..50).map(|i| (1.0 + i as f64 * 0.37 + next(), 0.05 + next())).collect();
        let total: f64 = raw.iter().map(|m| m.1).sum();
        let modes: Vec<(f64, f64)> = raw.iter().map(|&(w, z)| (w, z / total)).collect();
        let vac = VacuumSpectrum::new(modes.clone()).unwrap();
        let chi = vac.chi();
        assert!(chi.iter().all(|&c| (0.0..=1.0).contains(&c)));
        assert!(chi.contains(&1.0));

        let mut brute = 0.0;
        for &(w, z) in &modes {
            for _ in 0..7 {
                brute += 0.5 * w * z;
            }
        }
        let e = vacuum_energy(&vac, 7, 1.0);
        assert_relative_eq!(e, brute, max_relative = 1e-12);
        assert_relative_eq!(vacuum_energy_cutoff_form(&vac, 7, 1.0), e, max_relative = 1e-12);
        assert_relative_eq!(vacuum_energy(&vac, 14, 1.0), 2.0 * e, max_relative = 1e-12);
        assert_relative_eq!(vacuum_energy(&vac, 7, HBAR_SI), HBAR_SI * e, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn renormalize_round_trip(
            q in 1e-3f64..1e6,
            g1 in 0.0f64..1e4,
            g2 in 0.0f64..1e4,
            g3 in 0.0f64..1e4,
            n in 1u64..1_000_000,
            frac in 1e-6f64..=1.0,
        ) {
            let varsigma = (n as f64 * frac).max(1e-9);
            let z = varsigma / n as f64;
            let r = renormalize(q, g1, g2, g3, z).unwrap();
            let mut p = PhysicalParams::new(1.0, r.q_ph, r.gamma1_ph, r.gamma2_ph, r.gamma3, n, varsigma).unwrap();
            p.hbar = Some(1.0);
            let b = bare_from_physical(&p);
            prop_assert!((b.q - q).abs() <= 1e-12 * q);
            prop_assert!((b.gamma1 - g1).abs() <= 1e-12 * g1.max(1e-300));
            prop_assert!((b.gamma2 - g2).abs() <= 1e-12 * g2.max(1e-300));
            prop_assert_eq!(b.gamma3, g3);
            // q_ph/√ς = q/√N, independent of N
            let lhs = p.q_ph / varsigma.sqrt();
            let rhs = b.q / (n as f64).sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }
}
