//! End-to-end acceptance checks. Each test prints one `[PASS]`/`[FAIL]` line
//! straight to stderr, so the lines show up even when output is captured.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rabi_cli::commands;
use rabi_cli::config::{Overrides, RunConfig};
use rabi_core::aggregate::{
    default_grid, difference_curve, energy_irr, energy_irr_series, energy_total_series, pg_physical_series, pg_total_series,
    uniform_grid, AggregateOptions,
};
use rabi_core::dressed::{analytic_eigensystem, BlockIndex};
use rabi_core::lindblad::{
    build_generator, damping_basis, evolve_ode, full_generator, initial_state, initial_state_bare, pg_conditional,
    three_level_generator, DecayRates, S0Mode,
};
use rabi_core::params::BareCouplings;
use rabi_core::repcheck::{
    annihilate_by_creators_check, binomial_average, build_micro_rep, commutator_check, micro_dressed_spectrum,
};
use rabi_core::revival::{residuals, revival_amplitude, revival_time, DataPoint, ThresholdOptions};
use rabi_core::PhysicalParams;

const Q: f64 = 47e3 * PI;
const G12: f64 = 83.912;

fn lab(varsigma: f64, n: u64) -> PhysicalParams {
    PhysicalParams::new(0.0, Q, G12, G12, 0.07 * Q, n, varsigma).unwrap()
}

fn report(id: u32, name: &str, pass: bool, detail: &str, started: Instant) -> bool {
    let line = format!(
        "[{}] acceptance {id:>2} {name}: {detail} ({:.2} s)\n",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    pass
}

#[test]
fn c01_revival_time() {
    let t0 = Instant::now();
    let t_r = revival_time(400.0, Q).unwrap();
    assert!(report(1, "revival time", (t_r - 0.01701).abs() < 1e-4, &format!("t_r = {t_r:.6e} s, target 0.01701 ± 1e-4"), t0));
}

#[test]
fn c02_revival_ratio() {
    let t0 = Instant::now();
    let ratio = revival_time(400.0, Q).unwrap() / (PI / Q);
    assert!(report(2, "revival ratio", (ratio - 799.50).abs() < 0.01, &format!("t_r/T_Rabi = {ratio:.6}, target 799.50 ± 0.01"), t0));
}

#[test]
fn c03_revival_amplitude() {
    let t0 = Instant::now();
    let t_r = revival_time(400.0, Q).unwrap();
    let weak = revival_amplitude(G12, G12, 10.0, t_r).unwrap();
    let strong = revival_amplitude(G12, G12, 0.07 * Q, t_r).unwrap();
    let pass = (weak - 0.23).abs() < 0.01 && (1e-21..=1e-19).contains(&strong);
    assert!(report(3, "revival amplitude", pass, &format!("ε = {weak:.4} (0.23 ± 0.01), strong damping ε = {strong:.3e} (in [1e-21, 1e-19])"), t0));
}

#[test]
fn c04_oracle_equivalence() {
    let t0 = Instant::now();
    let n = 100_000u64;
    let p = lab(400.0, n);
    let bare = p.bare();
    let times = uniform_grid(4.0 * p.rabi_period(), 512).unwrap();
    let mut worst = 0.0f64;
    let mut worst_full = 0.0f64;
    for s in [1u64, 2, 5, 20, 400] {
        let idx = BlockIndex::new(s, n).unwrap();
        let block = analytic_eigensystem(idx, 0.0, bare.q);
        let rates = DecayRates::for_block(bare.gamma1, bare.gamma2, bare.gamma3, idx);
        let closed: Vec<f64> = times.iter().map(|&t| pg_conditional(idx, &bare, t, S0Mode::Formula).unwrap()).collect();
        // ODE on the invariant dressed subspace
        let states = evolve_ode(&build_generator(&block, &rates), &initial_state(&block).unwrap(), &times).unwrap();
        for (c, rho) in closed.iter().zip(&states) {
            worst = worst.max((c - rho.ground_probability_dressed()).abs());
        }
        // ODE on the whole (s+2)-dimensional block in the bare basis
        if s <= 20 {
            let states = evolve_ode(&full_generator(&block, &rates), &initial_state_bare(&block), &times).unwrap();
            for (c, rho) in closed.iter().zip(&states) {
                worst_full = worst_full.max((c - rho.ground_probability_bare()).abs());
            }
        }
    }
    let worst = worst.max(worst_full);
    let pass = worst < 1e-8;
    assert!(report(4, "oracle equivalence", pass, &format!("max |closed − ODE| = {worst:.3e} (full-block part {worst_full:.3e}), tol 1e-8"), t0));
}

/// SplitMix64 stream for reproducible draws.
struct Draws(u64);

impl Draws {
    fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[test]
fn c05_damping_basis() {
    let t0 = Instant::now();
    let mut rng = Draws(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (g1, g2, g3) = (0.01 + 5.0 * rng.unit(), 0.01 + 5.0 * rng.unit(), 0.01 + 5.0 * rng.unit());
        let q = 0.05 + 10.0 * rng.unit();
        let omega = 20.0 * rng.unit();
        let rates = DecayRates::effective(g1, g2, g3);
        let gen = three_level_generator(&rates, omega, q);
        let basis = damping_basis(&rates, omega, q);
        assert_eq!(basis.elements.len(), 9);
        worst = worst.max(basis.max_residual(&gen) / gen.norm());
    }
    assert!(report(5, "damping basis", worst < 1e-10, &format!("max ‖L(ρ_j) − Λ_j ρ_j‖∞ / ‖L‖ = {worst:.3e} over 20 draws, tol 1e-10"), t0));
}

#[test]
fn c06_micro_representation() {
    let t0 = Instant::now();
    let mut comm = 0.0f64;
    let mut exact = true;
    let mut spectrum = 0.0f64;
    for n in [2usize, 3] {
        for freqs in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0]] {
            if n == 3 && freqs.len() == 3 {
                continue;
            }
            let rep = build_micro_rep(n, &freqs, 2).unwrap();
            let c = commutator_check(&rep);
            comm = comm.max(c.max_deviation);
            exact &= c.spectrum_complete;
            let single = build_micro_rep(n, &freqs, 1).unwrap();
            for mode in 0..freqs.len() {
                spectrum = spectrum.max(micro_dressed_spectrum(&single, mode, 0.7).unwrap().max_error);
            }
        }
    }
    let ann = annihilate_by_creators_check(&build_micro_rep(2, &[1.0, 2.0, 3.0], 1).unwrap()).unwrap();
    let pass = comm < 1e-12 && exact && spectrum < 1e-9 && ann.all_vanish && ann.n_creators_norm > 0.0;
    let detail = format!(
        "commutator dev {comm:.2e}, 𝐼_ω spectra exact: {exact}, spectrum err {spectrum:.2e}, N+1 creators vanish: {}",
        ann.all_vanish
    );
    assert!(report(6, "micro-representation", pass, &detail, t0));
}

#[test]
fn c07_weak_law() {
    let t0 = Instant::now();
    let mut mean = 0.0f64;
    let mut second = 0.0f64;
    for (n, z) in [(1u64, 0.3), (10, 0.5), (1_000, 0.3), (100_000, 0.004)] {
        mean = mean.max((binomial_average(|x| x, n, z).unwrap() - z).abs());
        second = second.max((binomial_average(|x| x * x, n, z).unwrap() - (z * z + z * (1.0 - z) / n as f64)).abs());
    }
    let z = 0.3f64;
    let errs: Vec<f64> = [100u64, 1_000, 10_000, 100_000].iter().map(|&n| (binomial_average(f64::cos, n, z).unwrap() - z.cos()).abs()).collect();
    let shrinking = errs.windows(2).all(|w| w[1] < w[0]);
    let pass = mean < 1e-14 && second < 1e-12 && shrinking;
    let detail = format!("|⟨x⟩ − Z| = {mean:.1e}, |⟨x²⟩ − Z² − Z(1−Z)/N| = {second:.1e}, cos errors {}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" > "));
    assert!(report(7, "weak law", pass, &detail, t0));
}

#[test]
fn c08_thermodynamic_stability() {
    let t0 = Instant::now();
    let a = lab(400.0, 100_000);
    let grid = default_grid(&a);
    let opts = AggregateOptions::default();
    let p1 = pg_total_series(&a, &grid, &opts).unwrap();
    let p2 = pg_total_series(&a.with_n(200_000).unwrap(), &grid, &opts).unwrap();
    let sup = p1.sup_distance(&p2);
    assert!(report(8, "thermodynamic stability", sup < 1e-3, &format!("sup |p(N=1e5) − p(N=2e5)| = {sup:.3e}, tol 1e-3"), t0));
}

/// Largest value in each window of `w` samples.
fn windowed_max(values: &[f64], w: usize) -> Vec<f64> {
    values.chunks(w).map(|c| c.iter().copied().fold(0.0, f64::max)).collect()
}

#[test]
fn c09_difference_ordering() {
    let t0 = Instant::now();
    let base = lab(400.0, 100_000);
    let grid = default_grid(&base);
    let opts = AggregateOptions::default();
    let curves: Vec<Vec<f64>> = [400.0, 1000.0, 5000.0]
        .iter()
        .map(|&v| difference_curve(&base.with_varsigma(v).unwrap(), &grid, &opts).unwrap().values)
        .collect();
    let violations: Vec<usize> = (0..grid.len()).filter(|&i| !(curves[0][i] >= curves[1][i] && curves[1][i] >= curves[2][i])).collect();
    let pass = violations.is_empty();
    let mut detail = format!("{} of {} grid points out of order", violations.len(), grid.len());
    for &i in violations.iter().take(4) {
        detail += &format!("; t = {:.4e}: d400 {:.2e}, d1000 {:.2e}, d5000 {:.2e}", grid[i], curves[0][i], curves[1][i], curves[2][i]);
    }
    // ordering of the windowed maxima over half a Rabi period
    let w = grid.len() / 8;
    let env: Vec<Vec<f64>> = curves.iter().map(|c| windowed_max(c, w)).collect();
    let env_ok = (0..env[0].len()).all(|k| env[0][k] >= env[1][k] && env[1][k] >= env[2][k]);
    detail += &format!("; half-period windowed maxima ordered: {env_ok}");
    assert!(report(9, "difference-curve ordering", pass, &detail, t0));
}

#[test]
fn c10_energy() {
    let t0 = Instant::now();
    let omega = 2.0 * PI * 51.099e9;
    let g1 = 0.1 * Q;
    let bare = BareCouplings { q: Q, gamma1: g1, gamma2: g1, gamma3: 0.001 * Q };
    let start = energy_irr(1.0, &bare, omega, 0.0).unwrap();
    let end = energy_irr(1.0, &bare, omega, 1e3).unwrap();
    let limits = (start - omega / 2.0).abs() < 1e-9 * omega && (end + omega / 2.0).abs() < 1e-9 * omega;
    let times = uniform_grid(20.0 / g1, 2048).unwrap();
    let gap = |varsigma: f64| {
        let p = PhysicalParams::new(omega, Q, g1, g1, 0.001 * Q, 100_000, varsigma).unwrap();
        let red = energy_total_series(&p, &times, &AggregateOptions::default()).unwrap();
        let irr = energy_irr_series(1.0, &bare, omega, &times).unwrap();
        red.iter().zip(&irr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / omega
    };
    let (g400, g10) = (gap(400.0), gap(10.0));
    let pass = limits && g400 < 1e-3 && g10 > g400;
    let detail = format!("E(0), E(∞) = ±ω/2: {limits}; sup gap/ω at ς=400 {g400:.3e} (< 1e-3), at ς=10 {g10:.3e}");
    assert!(report(10, "energy", pass, &detail, t0));
}

#[test]
fn c11_fit_self_consistency() {
    let t0 = Instant::now();
    let cfg = RunConfig::resolve(&Overrides { gamma3: Some(0.07 * Q), ..Overrides::default() }).unwrap();
    let times = uniform_grid(4.0 * cfg.params.rabi_period(), 64).unwrap();
    let irr = pg_physical_series(&cfg.params, &times, false).unwrap();
    let data: Vec<DataPoint> = times.iter().zip(&irr.values).map(|(&t, &p)| DataPoint { t, p, sigma: 0.05 }).collect();
    let hi = cfg.params.n as f64;
    let (_, reports) = commands::fit(&cfg, &data, (1.0, hi)).unwrap();
    let star = reports[0].varsigma_star;
    let opts = ThresholdOptions { aggregate: cfg.aggregate, ..ThresholdOptions::default() };
    let sweep: Vec<f64> = (0..=40).map(|k| star * (hi / star).powf(k as f64 / 40.0)).collect();
    let infeasible: Vec<f64> = sweep
        .iter()
        .copied()
        .filter(|&v| residuals(&cfg.params, v, &data, &opts).unwrap().iter().zip(&data).any(|(r, d)| r.abs() > d.sigma))
        .collect();
    let pass = star.is_finite() && star < hi && infeasible.is_empty() && reports[0].monotone();
    let detail = format!("ς* = {star:.2}, infeasible among 41 probes in [ς*, N]: {}", infeasible.len());
    assert!(report(11, "fit self-consistency", pass, &detail, t0));
}

#[test]
fn c12_determinism() {
    let t0 = Instant::now();
    let cfg = RunConfig::resolve(&Overrides { varsigma: vec![1.0, 100.0, 400.0], ..Overrides::default() }).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| commands::simulate(&cfg).unwrap().table.unwrap().to_csv())
    };
    let reference = run(1);
    let same = [1, 4, 4, 7].iter().all(|&t| run(t) == reference);
    let bin = |threads: &str| {
        std::process::Command::new(env!("CARGO_BIN_EXE_rabi"))
            .args(["--threads", threads, "simulate", "--varsigma", "1,100,400"])
            .output()
            .unwrap()
            .stdout
    };
    let binary_same = bin("1") == bin("4") && bin("4") == reference;
    let pass = same && binary_same;
    let detail = format!("{} bytes; in-process pools 1/4/7 identical: {same}; binary --threads 1 vs 4 identical: {binary_same}", reference.len());
    assert!(report(12, "determinism", pass, &detail, t0));
}
