//! Self-check suites: representation theory, damping basis, ODE oracle and weak law.

use std::fmt::Write;

use clap::ValueEnum;
use rabi_core::dressed::{analytic_eigensystem, BlockIndex};
use rabi_core::lindblad::{
    damping_basis, dressed_to_bare, evolve_closed_form, evolve_ode, full_generator, initial_state_bare, three_level_generator,
    DecayRates,
};
use rabi_core::linalg;
use rabi_core::repcheck::{
    annihilate_by_creators_check, binomial_average, build_micro_rep, commutator_check, micro_dressed_spectrum, sector_leakage,
    weak_law_deviation,
};

use crate::error::Result;

/// Deliberate defects used to show that a suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Flip the sign of the second damping-basis eigenvalue.
    Lambda2Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }

    pub fn label(&self) -> String {
        format!("{} / {}", self.suite, self.name)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: residual {:.3e} (tol {:.1e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.label(),
                c.residual,
                c.tolerance
            );
        }
        match self.first_failure() {
            None => {
                let _ = writeln!(out, "all {} checks passed", self.checks.len());
            }
            Some(c) => {
                let _ = writeln!(out, "first failing check: {}", c.label());
            }
        }
        out
    }
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

/// Deterministic points in `[0, 1)` from additive recurrences with irrational steps.
fn weyl(k: usize, dim: usize) -> f64 {
    const STEPS: [f64; 6] = [0.618_033_988_749_894_9, 0.414_213_562_373_095_1, 0.732_050_807_568_877_3, 0.236_067_977_499_789_7, 0.645_751_311_064_590_6, 0.316_624_790_355_399_9];
    ((k + 1) as f64 * STEPS[dim % STEPS.len()]).fract()
}

fn micro_rep(checks: &mut Vec<Check>) -> Result<()> {
    const S: &str = "micro-rep";
    for n in [2, 3] {
        let rep = build_micro_rep(n, &[1.0, 2.0], 2)?;
        let c = commutator_check(&rep);
        checks.push(Check { suite: S, name: format!("commutator N={n}"), residual: c.max_deviation, tolerance: 1e-12 });
        checks.push(Check { suite: S, name: format!("success spectrum N={n}"), residual: flag(c.spectrum_complete), tolerance: 0.0 });
    }
    let rep = build_micro_rep(3, &[1.0, 2.0], 2)?;
    let leak = rep.label_sequences().iter().map(|l| sector_leakage(&rep, l)).fold(0.0, f64::max);
    checks.push(Check { suite: S, name: "sector invariance N=3".into(), residual: leak, tolerance: 0.0 });

    let rep = build_micro_rep(2, &[1.0, 2.0, 3.0], 1)?;
    let a = annihilate_by_creators_check(&rep)?;
    let worst = a.products.iter().map(|p| p.1).fold(0.0, f64::max);
    checks.push(Check { suite: S, name: "N+1 distinct-frequency products vanish".into(), residual: worst, tolerance: 0.0 });
    checks.push(Check {
        suite: S,
        name: "N creators do not vanish".into(),
        residual: flag(a.n_creators_norm > 0.0 && a.vacuum_creator_norm > 0.0),
        tolerance: 0.0,
    });

    for (n, freqs, q) in [(2, vec![5.0, 7.0], 0.8), (3, vec![4.0, 6.0], 0.3)] {
        let rep = build_micro_rep(n, &freqs, 1)?;
        let mut worst = 0.0f64;
        let mut leak = 0.0f64;
        for mode in 0..freqs.len() {
            let r = micro_dressed_spectrum(&rep, mode, q)?;
            worst = worst.max(r.max_error);
            leak = leak.max(r.max_invariance_residual);
        }
        checks.push(Check { suite: S, name: format!("dressed spectrum N={n}"), residual: worst, tolerance: 1e-9 });
        checks.push(Check { suite: S, name: format!("single-excitation blocks invariant N={n}"), residual: leak, tolerance: 0.0 });
    }
    Ok(())
}

fn damping(checks: &mut Vec<Check>, fault: Option<Fault>) {
    let mut worst = 0.0f64;
    for k in 0..20 {
        let g1 = 0.01 + 5.0 * weyl(k, 0);
        let g2 = 0.01 + 5.0 * weyl(k, 1);
        let g3 = 0.01 + 5.0 * weyl(k, 2);
        let q = 0.05 + 10.0 * weyl(k, 3);
        let omega = 20.0 * weyl(k, 4);
        let rates = DecayRates::effective(g1, g2, g3);
        let gen = three_level_generator(&rates, omega, q);
        let mut basis = damping_basis(&rates, omega, q);
        if fault == Some(Fault::Lambda2Sign) {
            basis.elements[1].eigenvalue = -basis.elements[1].eigenvalue;
        }
        worst = worst.max(basis.max_residual(&gen) / gen.norm());
    }
    checks.push(Check { suite: "damping-basis", name: "eigen-residual / ‖L‖ over 20 draws".into(), residual: worst, tolerance: 1e-10 });
}

fn ode(checks: &mut Vec<Check>) -> Result<()> {
    let (omega, q) = (6.0, 1.5);
    for (s, n, g1, g2, g3) in [(1u64, 1u64, 0.4, 0.2, 0.3), (2, 5, 0.9, 0.1, 0.05), (4, 9, 0.3, 0.3, 0.6)] {
        let block = analytic_eigensystem(BlockIndex::new(s, n)?, omega, q);
        let rates = DecayRates::for_block(g1, g2, g3, block.index);
        let times: Vec<f64> = (1..=24).map(|i| 0.5 * i as f64).collect();
        let states = evolve_ode(&full_generator(&block, &rates), &initial_state_bare(&block), &times)?;
        let mut worst = 0.0f64;
        for (t, rho) in times.iter().zip(&states) {
            let closed = dressed_to_bare(&block, &evolve_closed_form(&block, &rates, *t)?)?;
            worst = worst.max(linalg::max_abs(&(&closed.0 - &rho.0)));
        }
        checks.push(Check { suite: "ode-vs-closed-form", name: format!("block s={s} N={n}"), residual: worst, tolerance: 1e-8 });
    }
    Ok(())
}

fn weak_law(checks: &mut Vec<Check>) -> Result<()> {
    const S: &str = "weak-law";
    let mut mean = 0.0f64;
    let mut var = 0.0f64;
    for (n, z) in [(7u64, 0.5), (100, 0.3), (10_000, 0.004)] {
        mean = mean.max((binomial_average(|x| x, n, z)? - z).abs());
        var = var.max((binomial_average(|x| x * x, n, z)? - z * z - z * (1.0 - z) / n as f64).abs());
    }
    checks.push(Check { suite: S, name: "binomial mean".into(), residual: mean, tolerance: 1e-14 });
    checks.push(Check { suite: S, name: "binomial second moment".into(), residual: var, tolerance: 1e-12 });

    let z = 0.3f64;
    let errs: Vec<f64> =
        [100u64, 1_000, 10_000, 100_000].iter().map(|&n| Ok((binomial_average(f64::cos, n, z)? - z.cos()).abs())).collect::<Result<_>>()?;
    let ratio = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    checks.push(Check { suite: S, name: "cos error ratio per decade".into(), residual: ratio, tolerance: 0.2 });

    let devs: Vec<f64> = (1..=12).map(|n| weak_law_deviation(f64::sqrt, (0.6, 0.8), n)).collect::<std::result::Result<_, _>>()?;
    let ratio = devs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    checks.push(Check { suite: S, name: "operator deviation ratio N→N+1".into(), residual: ratio, tolerance: 1.0 - 1e-9 });
    Ok(())
}

pub fn run(fault: Option<Fault>) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    micro_rep(&mut checks)?;
    damping(&mut checks, fault);
    ode(&mut checks)?;
    weak_law(&mut checks)?;
    Ok(VerifyReport { checks })
}
