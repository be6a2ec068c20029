use num_complex::Complex64;
use proptest::prelude::*;
use rabi_core::dressed::{analytic_eigensystem, BlockIndex, DressedBlock};
use rabi_core::lindblad::*;
use rabi_core::linalg::{self, CMatrix};
use rabi_core::params::{renormalize, BareCouplings};

fn block(s: u64, n: u64, omega: f64, q: f64) -> DressedBlock {
    analytic_eigensystem(BlockIndex::new(s, n).unwrap(), omega, q)
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

#[test]
fn closed_form_matches_full_block_ode() {
    let (omega, q) = (6.0, 1.5);
    for &(s, n, g1, g2, g3) in &[(1u64, 1u64, 0.4, 0.2, 0.3), (2, 5, 0.9, 0.1, 0.05), (4, 9, 0.3, 0.3, 0.6), (6, 6, 0.2, 0.7, 0.1)] {
        let b = block(s, n, omega, q);
        let rates = DecayRates::for_block(g1, g2, g3, b.index);
        let times = grid(12.0, 40);
        let states = evolve_ode(&full_generator(&b, &rates), &initial_state_bare(&b), &times).unwrap();
        let dark = linalg::to_complex(&b.dark_projector());
        for (t, rho) in times.iter().zip(&states) {
            let closed = evolve_closed_form(&b, &rates, *t).unwrap();
            let embedded = dressed_to_bare(&b, &closed).unwrap();
            let dist = linalg::max_abs(&(&embedded.0 - &rho.0));
            assert!(dist < 1e-8, "s={s} n={n} t={t}: {dist:e}");
            assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
            assert!(rho.min_eigenvalue().unwrap() >= -1e-9);
            // populations of the dark states stay zero
            assert!((&dark * &rho.0).trace().norm() < 1e-12);
            let p = pg_conditional(b.index, &BareCouplings { q, gamma1: g1, gamma2: g2, gamma3: g3 }, *t, S0Mode::Formula).unwrap();
            assert!((p - rho.ground_probability_bare()).abs() < 1e-8);
        }
    }
}

#[test]
fn three_level_ode_matches_closed_form() {
    let b = block(3, 10, 4.0, 2.0);
    let rates = DecayRates::for_block(1.2, 0.4, 0.3, b.index);
    let times = grid(20.0, 64);
    let states = evolve_ode(&build_generator(&b, &rates), &initial_state(&b).unwrap(), &times).unwrap();
    for (t, rho) in times.iter().zip(&states) {
        let closed = evolve_closed_form(&b, &rates, *t).unwrap();
        assert!(linalg::max_abs(&(&closed.0 - &rho.0)) < 1e-8);
        assert!(closed.hermiticity_error() < 1e-14);
        assert!((closed.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn pure_commutator_rotates_coherence() {
    let b = block(2, 8, 3.0, 1.0);
    let rates = DecayRates::for_block(0.0, 0.0, 0.0, b.index);
    // |x⟩⟨x| with |x⟩ = (|Ω₊⟩ + |Ω₋⟩)/√2 carries the coherence ½|Ω₊⟩⟨Ω₋|
    let mut coherence = CMatrix::zeros(3, 3);
    for i in [PLUS, MINUS] {
        for j in [PLUS, MINUS] {
            coherence[(i, j)] = Complex64::new(0.5, 0.0);
        }
    }
    let times = grid(7.0, 20);
    let states = evolve_ode(&build_generator(&b, &rates), &DensityMatrix(coherence), &times).unwrap();
    let split = 2.0 * b.coupling();
    for (t, rho) in times.iter().zip(&states) {
        let want = Complex64::from_polar(0.5, -split * t);
        assert!((rho.0[(PLUS, MINUS)] - want).norm() < 1e-8);
    }
}

#[test]
fn coherence_envelope_decays_at_rabi_extrema() {
    let b = block(5, 20, 2.0, 3.0);
    let rates = DecayRates::for_block(0.5, 0.4, 0.2, b.index);
    let step = std::f64::consts::PI / (2.0 * b.coupling());
    let mut prev = f64::INFINITY;
    for k in 0..30 {
        let rho = evolve_closed_form(&b, &rates, k as f64 * step).unwrap();
        let c = rho.0[(PLUS, MINUS)].norm();
        assert!(c < prev);
        prev = c;
    }
}

#[test]
fn irreducible_probability_is_representation_independent() {
    let bare = BareCouplings { q: 2.0, gamma1: 0.8, gamma2: 0.3, gamma3: 0.25 };
    for zcal in [0.01, 0.2, 0.77, 1.0] {
        let ren = renormalize(bare.q, bare.gamma1, bare.gamma2, bare.gamma3, zcal).unwrap();
        let physical = BareCouplings { q: ren.q_ph, gamma1: ren.gamma1_ph, gamma2: ren.gamma2_ph, gamma3: ren.gamma3 };
        for t in [0.0, 0.3, 1.7, 9.0] {
            let a = pg_irreducible(zcal, &bare, t).unwrap();
            let b = pg_irreducible(1.0, &physical, t).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
    assert!(pg_irreducible(0.0, &bare, 1.0).is_err());
}

#[test]
fn irreducible_matches_conditional_at_rational_weight() {
    let bare = BareCouplings { q: 1.3, gamma1: 0.5, gamma2: 0.2, gamma3: 0.4 };
    for (s, n) in [(1u64, 4u64), (3, 7), (10, 10)] {
        let idx = BlockIndex::new(s, n).unwrap();
        for t in [0.0, 0.9, 4.0] {
            let a = pg_irreducible(s as f64 / n as f64, &bare, t).unwrap();
            let b = pg_conditional(idx, &bare, t, S0Mode::Formula).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn block_energy_matches_ode() {
    let (omega, q) = (5.0, 0.7);
    for (g1, g2, g3) in [(0.3, 0.1, 0.2), (0.4, 0.4, 0.1), (0.05, 0.6, 0.3)] {
        let rates = DecayRates::effective(g1, g2, g3);
        let gen = three_level_generator(&rates, omega, q);
        let times = grid(30.0, 50);
        let states = evolve_ode(&gen, &initial_state_dressed(), &times).unwrap();
        for (t, rho) in times.iter().zip(&states) {
            let ode = (&gen.hamiltonian * &rho.0).trace().re;
            let closed = mean_energy_closed_form(&rates, omega, q, *t).unwrap();
            assert!((ode - closed).abs() < 1e-8, "t={t}: {ode} vs {closed}");
        }
    }
}

fn rates_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0, 0.05f64..10.0, 0.0f64..20.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn damping_basis_elements_are_eigenoperators((g1, g2, g3, q, omega) in rates_strategy()) {
        let rates = DecayRates::effective(g1, g2, g3);
        let gen = three_level_generator(&rates, omega, q);
        let basis = damping_basis(&rates, omega, q);
        prop_assert!(basis.max_residual(&gen) < 1e-10 * gen.norm());
        prop_assert_eq!(basis.elements[1].eigenvalue, Complex64::new(-g2 / 2.0, 0.0));
    }

    #[test]
    fn probability_stays_in_unit_interval((g1, g2, g3, q, _w) in rates_strategy(), t in 0.0f64..50.0) {
        let rates = DecayRates::effective(g1, g2, g3);
        prop_assume!(!rates.is_degenerate());
        let p = ground_probability_closed_form(&rates, q, t, 1.0).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        let via_basis = damping_basis(&rates, 1.0, q).evolve(t).unwrap().ground_probability_dressed();
        prop_assert!((p - via_basis).abs() < 1e-12);
    }

    #[test]
    fn generator_preserves_trace(s in 1u64..8, extra in 0u64..8, (g1, g2, g3, q, omega) in rates_strategy(), seed in 0u64..1000) {
        let b = block(s, s + extra, omega, q);
        let rates = DecayRates::for_block(g1, g2, g3, b.index);
        let gen = full_generator(&b, &rates);
        let d = gen.dim();
        let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(d, d, |_, _| Complex64::new(next(), next()));
        let rho = &a + a.adjoint();
        prop_assert!(gen.apply(&rho).trace().norm() < 1e-12 * gen.norm().max(1.0));
    }
}
