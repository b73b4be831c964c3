//! Cross-engine oracle agreement and the Markovianity/superclassicality
//! checkers, including the frozen regression values computed from the
//! structured engines and confirmed by the dense oracles.

mod common;

use common::*;
use invlab::measurement::{observable_from_bloch, BlochDirection, Outcome};
use invlab::protocol::*;
use invlab::qmath::{identity, pauli_x, DensityMatrix};
use num_complex::Complex64;

fn x_axis() -> BlochDirection {
    BlochDirection::x_axis()
}

fn plus_x_state() -> DensityMatrix {
    DensityMatrix::new((identity(2) + pauli_x()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// Frozen from the structured spin-bath engine and confirmed by the dense
/// Liouvillian path (they agree to 2e-16): x̂-x̂-x̂ at g t = g τ = 0.4, n = 4.
const SPIN4_FACTORIZATION: f64 = 0.444_486_693_042_851;
const SPIN4_PROPAGATOR: f64 = 1.999_147_206_083_01;

#[test]
fn dense_oracles_agree_with_structured_engines_on_p3() {
    let scheme = Scheme::new(
        0.45,
        0.65,
        observable_from_bloch(x_axis()),
        IntermediateSpec::Fixed(observable_from_bloch(
            BlochDirection::new(0.9, 0.7).unwrap(),
        )),
        observable_from_bloch(BlochDirection::new(2.0, 4.2).unwrap()),
    )
    .unwrap();
    let pairs = [
        (spin_bath(1.0, 3), spin_bath_dense(1.0, 3), 1e-10),
        (dissipative(1.0, 0.45, 3), dissipative_dense(1.0, 0.45, 3), 1e-8),
    ];
    for (structured, dense, tol) in pairs {
        let ps = p3(&structured, &scheme).unwrap();
        let pd = p3(&dense, &scheme).unwrap();
        for z in Outcome::BOTH {
            for y in Outcome::BOTH {
                for x in Outcome::BOTH {
                    assert!(
                        (ps.get(z, y, x) - pd.get(z, y, x)).abs() < tol,
                        "{} vs {}",
                        structured.name(),
                        dense.name()
                    );
                }
            }
        }
    }
}

#[test]
fn outer_correlator_matches_interval_splitting_closed_forms() {
    // For x̂-x̂-x̂ schemes the zx coefficient reduces, per environment
    // configuration, to a product of interval cosines; averaging gives
    // c_zx = ½[D(t+τ) + D(t-τ)] with D the oscillatory part of the decay.
    let (t, tau) = (0.55, 0.4);
    let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();

    let n = 4;
    let cs = correlators(&p3(&spin_bath(1.0, n), &scheme).unwrap());
    let d = |s: f64| (2.0 * s).cos().powi(n as i32);
    assert!((cs.c_zx - 0.5 * (d(t + tau) + d(t - tau))).abs() < 1e-12);
    assert!((cs.c_yx - d(t)).abs() < 1e-12);

    let (gamma, chi, nq) = (1.0, 0.5, 5usize);
    let cs = correlators(&p3(&dissipative(gamma, chi, nq), &scheme).unwrap());
    let osc = |s: f64| (2.0 * chi * s).cos().powi((nq / 2) as i32);
    let expected =
        (-2.0 * gamma * (t + tau)).exp() * 0.5 * (osc(t + tau) + osc(t - tau));
    assert!((cs.c_zx - expected).abs() < 1e-12);
}

#[test]
fn factorization_distance_vanishes_for_markov_engines() {
    for engine in [markov(1.0), dissipative(1.0, 0.0, 4)] {
        for (t, tau) in [(0.3, 0.3), (0.9, 0.2)] {
            let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
            let rep = markov_factorization_for(&engine, &scheme).unwrap();
            assert!(rep.distance < 1e-9, "{}: {}", engine.name(), rep.distance);
            assert_eq!(rep.skipped, 0);
        }
    }
}

#[test]
fn factorization_distance_of_consistent_uniform_tables_is_zero() {
    let p3_table = JointDist3::new([[[0.125; 2]; 2]; 2], 0.4, 0.4, 1e-12).unwrap();
    let p2_first = JointDist2::new([[0.25; 2]; 2], TimePair::First, 0.4, 0.4, 1e-12).unwrap();
    let p2_second = JointDist2::new([[0.25; 2]; 2], TimePair::Second, 0.4, 0.4, 1e-12).unwrap();
    let rep =
        markov_factorization_distance(&p3_table, &p2_first, &p2_second, &[0.5, 0.5]).unwrap();
    assert_eq!(rep.distance, 0.0);
    assert_eq!(rep.skipped, 0);
}

#[test]
fn spin_bath_factorization_distance_matches_frozen_value() {
    let scheme = Scheme::uniform(0.4, 0.4, x_axis()).unwrap();
    for engine in [spin_bath(1.0, 4), spin_bath_dense(1.0, 4)] {
        let rep = markov_factorization_for(&engine, &scheme).unwrap();
        assert!(
            (rep.distance - SPIN4_FACTORIZATION).abs() < 1e-10,
            "{}: {}",
            engine.name(),
            rep.distance
        );
        assert!(rep.distance > 1e-3);
    }
}

#[test]
fn propagator_condition_vanishes_for_markov_engines() {
    for engine in [dissipative(1.0, 0.0, 4), dissipative_dense(1.0, 0.0, 3)] {
        let env = default_env_states(&engine).unwrap();
        for tau in [0.0, 0.4, 1.1] {
            let dev = markov_propagator_condition(&engine, tau, &env).unwrap();
            assert!(dev < 1e-9, "{} tau={tau}: {dev}", engine.name());
        }
    }
}

#[test]
fn propagator_condition_detects_spin_bath_memory() {
    for engine in [spin_bath(1.0, 4), spin_bath_dense(1.0, 4)] {
        let env = default_env_states(&engine).unwrap();
        let dev = markov_propagator_condition(&engine, 0.4, &env).unwrap();
        assert!(
            (dev - SPIN4_PROPAGATOR).abs() < 1e-10,
            "{}: {dev}",
            engine.name()
        );
        // Zero interval: identity propagator, no dependence.
        assert!(markov_propagator_condition(&engine, 0.0, &env).unwrap() < 1e-12);
    }
    // Single environment spin, σ ∈ {|0⟩⟨0|, I/2}: dependence at generic gt.
    let engine = spin_bath(1.0, 1);
    let env = default_env_states(&engine).unwrap();
    let dev = markov_propagator_condition(&engine, 0.6, &env[..2]).unwrap();
    assert!(dev > 1e-3, "{dev}");
}

#[test]
fn markovianity_definitions_agree_on_every_engine() {
    // Appendix-level equivalence, spot-checked as flag agreement:
    // p-factorization holds iff the propagator condition holds.
    let tol = 1e-9;
    let engines = [
        markov(1.0),
        dissipative(1.0, 0.0, 4),
        dissipative(1.0, 0.5, 4),
        spin_bath(1.0, 2),
        spin_bath(1.0, 4),
    ];
    for engine in engines {
        let (t, tau) = (0.4, 0.4);
        let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
        let p_flag = match engine.bipartite() {
            Some(_) => {
                let env = default_env_states(&engine).unwrap();
                markov_propagator_condition(&engine, tau, &env).unwrap() < tol
            }
            None => true,
        };
        let f_flag = markov_factorization_for(&engine, &scheme).unwrap().distance < tol;
        assert_eq!(p_flag, f_flag, "{}", engine.name());
    }
}

#[test]
fn superclassicality_landmarks() {
    let states = default_test_states(7, 20);
    let (t, tau) = (0.4, 0.3);

    // Zero times: nothing has evolved, nothing deviates.
    let zero = superclassicality_deviation(&spin_bath(1.0, 2), &states, 0.0, 0.0).unwrap();
    assert!(zero.max_deviation < 1e-12);

    let markovian = dissipative(1.0, 0.0, 4);
    let rep = superclassicality_deviation(&markovian, &states, t, tau).unwrap();
    assert!(rep.max_deviation < 1e-9, "{}", rep.max_deviation);

    let coupled = dissipative(1.0, 0.5, 4);
    let rep = superclassicality_deviation(&coupled, &states, t, tau).unwrap();
    assert!(rep.max_deviation > 1e-3, "{}", rep.max_deviation);

    let unitary = spin_bath(1.0, 2);
    let rep = superclassicality_deviation(&unitary, &states, t, tau).unwrap();
    assert!(rep.max_deviation > 1e-3, "{}", rep.max_deviation);
    assert_eq!(rep.per_state.len(), states.len());
}

#[test]
fn discord_landmarks() {
    // t = 0: product state, no correlations.
    let engine = spin_bath(1.0, 1);
    assert!(discord_condition_norm(&engine, &plus_x_state(), 0.0).unwrap() < 1e-12);

    // Unitary s-e coupling generates discord: |sin(2gt)|/2 for one bath
    // spin prepared maximally mixed.
    for t in [0.3, 0.6, 1.1] {
        let norm = discord_condition_norm(&engine, &plus_x_state(), t).unwrap();
        let expected = 0.5 * (2.0 * t).sin().abs();
        assert!((norm - expected).abs() < 1e-10, "t={t}: {norm} vs {expected}");
        assert!(norm > 1e-3);
    }

    // Decoupled dissipative dynamics keeps the evolved state discord-free.
    let markovian = dissipative(1.0, 0.0, 4);
    for t in [0.2, 0.9] {
        assert!(discord_condition_norm(&markovian, &plus_x_state(), t).unwrap() < 1e-9);
    }
}

#[test]
fn dni_invasiveness_vanishes_for_markov_engines_on_a_direction_grid() {
    // Reduced version of the acceptance grid (the full one runs there).
    let dirs = [
        x_axis(),
        BlochDirection::z_axis(),
        BlochDirection::new(1.1, 2.2).unwrap(),
        BlochDirection::new(2.4, 5.0).unwrap(),
    ];
    for engine in [markov(1.0), dissipative(1.0, 0.0, 3)] {
        for dx in &dirs {
            for dz in &dirs {
                for (t, tau) in [(0.0, 0.5), (0.7, 0.7), (1.3, 0.2)] {
                    let scheme = dni_scheme(
                        &engine,
                        t,
                        tau,
                        observable_from_bloch(*dx),
                        observable_from_bloch(*dz),
                        x_axis(),
                    )
                    .unwrap();
                    let i = invasiveness(
                        &marginal_zx(&p3(&engine, &scheme).unwrap()),
                        &p2(&engine, &scheme, TimePair::Full).unwrap(),
                    )
                    .unwrap();
                    assert!(i < 1e-9, "{} I={i}", engine.name());
                }
            }
        }
    }
}

#[test]
fn dni_violation_appears_with_memory() {
    // Memory-carrying engines violate DNI at the adaptive scheme.
    let cases = [
        (ou_gaussian(1.0, 1.0), 0.9, 0.7),
        (spin_bath(1.0, 1), 0.4, 0.4),
        (spin_bath(1.0, 4), 0.3, 0.3),
        (dissipative(1.0, 0.5, 4), 0.5, 0.5),
    ];
    for (engine, t, tau) in cases {
        let scheme = dni_scheme(
            &engine,
            t,
            tau,
            observable_from_bloch(x_axis()),
            observable_from_bloch(x_axis()),
            x_axis(),
        )
        .unwrap();
        let i = invasiveness(
            &marginal_zx(&p3(&engine, &scheme).unwrap()),
            &p2(&engine, &scheme, TimePair::Full).unwrap(),
        )
        .unwrap();
        assert!(i > 1e-3, "{}: I = {i}", engine.name());
    }
}

#[test]
fn ou_gaussian_invasiveness_has_closed_form_at_the_dni_scheme() {
    // I = ½|d(t,τ) - d(t+τ)| with the Gaussian moments.
    let params = invlab::models::OuNoiseParams::new(1.0, 1.0).unwrap();
    let engine = ou_gaussian(1.0, 1.0);
    for (t, tau) in [(0.5, 0.5), (0.9, 0.3), (2.0, 1.0)] {
        let scheme = dni_scheme(
            &engine,
            t,
            tau,
            observable_from_bloch(x_axis()),
            observable_from_bloch(x_axis()),
            x_axis(),
        )
        .unwrap();
        let i = invasiveness(
            &marginal_zx(&p3(&engine, &scheme).unwrap()),
            &p2(&engine, &scheme, TimePair::Full).unwrap(),
        )
        .unwrap();
        let m = invlab::models::ou_gaussian_moments(&params, t, tau).unwrap();
        let d_ttau = (-0.5 * (m.v1 + m.v2 - 2.0 * m.cov)).exp();
        let d_sum = (-0.5 * (m.v1 + m.v2 + 2.0 * m.cov)).exp();
        assert!((i - 0.5 * (d_ttau - d_sum).abs()).abs() < 1e-12);
    }
}

#[test]
fn white_noise_limit_restores_dni() {
    // τ_c → 0: the OU invasiveness at the DNI scheme goes to zero.
    let mut last = f64::INFINITY;
    for tau_c in [1.0, 0.1, 0.01, 0.001] {
        let engine = ou_gaussian(1.0, tau_c);
        let scheme = dni_scheme(
            &engine,
            0.8,
            0.8,
            observable_from_bloch(x_axis()),
            observable_from_bloch(x_axis()),
            x_axis(),
        )
        .unwrap();
        let i = invasiveness(
            &marginal_zx(&p3(&engine, &scheme).unwrap()),
            &p2(&engine, &scheme, TimePair::Full).unwrap(),
        )
        .unwrap();
        assert!(i < last);
        last = i;
    }
    assert!(last < 2e-3);
}
