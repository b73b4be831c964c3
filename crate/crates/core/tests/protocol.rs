//! Protocol-level behavior on the concrete models: joint distributions,
//! invasiveness, DNI schemes, correlators, and LGI landmarks.

mod common;

use common::*;
use invlab::measurement::{
    bloch_vector, observable_from_bloch, BlochDirection, Outcome,
};
use invlab::models::{EvolutionEngine, GeneralLindbladEngine, GeneralLindbladSpec};
use invlab::protocol::*;
use invlab::qmath::{identity, pauli_x, CMatrix, DensityMatrix};
use invlab::Error;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

fn x_axis() -> BlochDirection {
    BlochDirection::x_axis()
}

fn plus_x_state() -> DensityMatrix {
    DensityMatrix::new((identity(2) + pauli_x()) * Complex64::new(0.5, 0.0)).unwrap()
}

fn all_engines() -> Vec<EvolutionEngine> {
    vec![
        markov(1.0),
        ou_gaussian(1.0, 1.0),
        ou_monte_carlo(1.0, 1.0, 4000, 11),
        spin_bath(1.0, 1),
        spin_bath(1.0, 4),
        spin_bath_dense(1.0, 2),
        dissipative(1.0, 0.5, 3),
        dissipative_dense(1.0, 0.5, 3),
    ]
}

#[test]
fn p1_examples() {
    let scheme = Scheme::uniform(0.5, 0.5, x_axis()).unwrap();
    assert_eq!(p1(&scheme), [0.5, 0.5]);

    let scheme_pure = Scheme::uniform(0.5, 0.5, x_axis())
        .unwrap()
        .with_initial_state(plus_x_state());
    let p = p1(&scheme_pure);
    assert!((p[0] - 1.0).abs() < 1e-14 && p[1].abs() < 1e-14);

    // Direct trace oracle on a generic state and direction.
    let rho = DensityMatrix::new(
        CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.62, 0.0),
                Complex64::new(0.11, -0.2),
                Complex64::new(0.11, 0.2),
                Complex64::new(0.38, 0.0),
            ],
        ),
    )
    .unwrap();
    let dir = BlochDirection::new(1.2, 0.8).unwrap();
    let obs = observable_from_bloch(dir);
    let scheme_gen = Scheme::new(
        0.3,
        0.3,
        obs.clone(),
        IntermediateSpec::Fixed(obs.clone()),
        obs.clone(),
    )
    .unwrap()
    .with_initial_state(rho.clone());
    let expected: f64 = invlab::qmath::trace(
        &(obs.projector(Outcome::Plus) * rho.matrix()),
    )
    .re;
    assert!((p1(&scheme_gen)[0] - expected).abs() < 1e-14);
}

#[test]
fn p2_markov_closed_form() {
    let gamma = 1.0;
    let engine = markov(gamma);
    let (t, tau) = (0.4, 0.9);
    let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
    let table = p2(&engine, &scheme, TimePair::Full).unwrap();
    for z in Outcome::BOTH {
        for x in Outcome::BOTH {
            let expected = 0.25 * (1.0 + z.value() * x.value() * (-2.0 * gamma * (t + tau)).exp());
            assert!((table.get(z, x) - expected).abs() < 1e-14);
        }
    }
}

#[test]
fn p2_immediate_remeasurement_is_diagonal() {
    for engine in all_engines() {
        let scheme = Scheme::uniform(0.0, 0.0, x_axis()).unwrap();
        let table = p2(&engine, &scheme, TimePair::Full).unwrap();
        for z in Outcome::BOTH {
            for x in Outcome::BOTH {
                let expected = if z == x { 0.5 } else { 0.0 };
                assert!(
                    (table.get(z, x) - expected).abs() < 1e-12,
                    "{} ({z:?},{x:?})",
                    engine.name()
                );
            }
        }
    }
}

#[test]
fn p2_spin_bath_single_spin_closed_form() {
    let (g, t, tau) = (1.0, 0.35, 0.55);
    let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
    for engine in [spin_bath(g, 1), spin_bath_dense(g, 1)] {
        let table = p2(&engine, &scheme, TimePair::Full).unwrap();
        for z in Outcome::BOTH {
            for x in Outcome::BOTH {
                let expected =
                    0.25 * (1.0 + z.value() * x.value() * (2.0 * g * (t + tau)).cos());
                assert!(
                    (table.get(z, x) - expected).abs() < 1e-12,
                    "{}",
                    engine.name()
                );
            }
        }
    }
}

#[test]
fn p3_markov_factorizes_into_conditionals() {
    let gamma = 0.7;
    let engine = markov(gamma);
    let (t, tau) = (0.6, 0.3);
    let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
    let table = p3(&engine, &scheme).unwrap();
    let cond = |b: Outcome, a: Outcome, dt: f64| {
        0.5 * (1.0 + b.value() * a.value() * (-2.0 * gamma * dt).exp())
    };
    for z in Outcome::BOTH {
        for y in Outcome::BOTH {
            for x in Outcome::BOTH {
                let expected = 0.5 * cond(y, x, t) * cond(z, y, tau);
                assert!((table.get(z, y, x) - expected).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn p3_simultaneous_measurements_are_perfectly_correlated() {
    for engine in all_engines() {
        let scheme = Scheme::uniform(0.0, 0.0, x_axis()).unwrap();
        let table = p3(&engine, &scheme).unwrap();
        for z in Outcome::BOTH {
            for y in Outcome::BOTH {
                for x in Outcome::BOTH {
                    let expected = if z == y && y == x { 0.5 } else { 0.0 };
                    assert!(
                        (table.get(z, y, x) - expected).abs() < 1e-12,
                        "{}",
                        engine.name()
                    );
                }
            }
        }
    }
}

#[test]
fn p3_spin_bath_correlators_follow_the_multilinear_form() {
    let (g, t, tau) = (1.0, 0.3, 0.5);
    let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
    let structured = spin_bath(g, 1);
    let dense = spin_bath_dense(g, 1);
    let cs = correlators(&p3(&structured, &scheme).unwrap());
    assert!((cs.c_yx - (2.0 * g * t).cos()).abs() < 1e-12);
    assert!((cs.c_zy - (2.0 * g * tau).cos()).abs() < 1e-12);
    // The zx coefficient is fixed independently by the dense oracle.
    let cs_dense = correlators(&p3(&dense, &scheme).unwrap());
    assert!((cs.c_zx - cs_dense.c_zx).abs() < 1e-12);
    assert!(cs.c_zyx.abs() < 1e-12);
}

#[test]
fn no_signaling_from_the_final_measurement() {
    // P₂ at (0,t) equals Σ_z P₃(z,y,x) for every engine.
    let dir_y = BlochDirection::new(1.1, 0.4).unwrap();
    for engine in all_engines() {
        let scheme = Scheme::new(
            0.45,
            0.8,
            observable_from_bloch(x_axis()),
            IntermediateSpec::Fixed(observable_from_bloch(dir_y)),
            observable_from_bloch(BlochDirection::new(2.0, 5.5).unwrap()),
        )
        .unwrap();
        let table3 = p3(&engine, &scheme).unwrap();
        let table2 = p2(&engine, &scheme, TimePair::First).unwrap();
        for y in Outcome::BOTH {
            for x in Outcome::BOTH {
                let marginal: f64 = Outcome::BOTH
                    .iter()
                    .map(|&z| table3.get(z, y, x))
                    .sum();
                assert!(
                    (marginal - table2.get(y, x)).abs() < 1e-10,
                    "{} ({y:?},{x:?})",
                    engine.name()
                );
            }
        }
    }
}

#[test]
fn markov_marginal_equals_two_point_table() {
    // The DNI identity: for Markov dynamics at the diagonal scheme the
    // three-measurement marginal reproduces the two-measurement table.
    let engine = markov(1.0);
    let scheme = dni_scheme(
        &engine,
        0.8,
        0.5,
        observable_from_bloch(x_axis()),
        observable_from_bloch(x_axis()),
        x_axis(),
    )
    .unwrap();
    let m = marginal_zx(&p3(&engine, &scheme).unwrap());
    let direct = p2(&engine, &scheme, TimePair::Full).unwrap();
    assert!(invasiveness(&m, &direct).unwrap() < 1e-9);
}

#[test]
fn z_intermediate_on_x_scheme_gives_full_decoherence_invasiveness() {
    // θ=0 intermediate: f(t,τ) = 0, so I = d(t+τ).
    let (t, tau) = (0.4, 0.3);
    for engine in [
        markov(1.0),
        ou_gaussian(1.0, 1.0),
        spin_bath(1.0, 4),
        dissipative(1.0, 0.5, 3),
    ] {
        let scheme = Scheme::new(
            t,
            tau,
            observable_from_bloch(x_axis()),
            IntermediateSpec::Fixed(observable_from_bloch(BlochDirection::z_axis())),
            observable_from_bloch(x_axis()),
        )
        .unwrap();
        let i = invasiveness(
            &marginal_zx(&p3(&engine, &scheme).unwrap()),
            &p2(&engine, &scheme, TimePair::Full).unwrap(),
        )
        .unwrap();
        let expected = engine.analytic_d(t + tau).unwrap();
        assert!(
            (i - expected).abs() < 1e-10,
            "{}: {i} vs {expected}",
            engine.name()
        );
    }
}

#[test]
fn dni_direction_is_x_axis_for_dephasing_models() {
    for engine in [
        markov(1.0),
        ou_gaussian(1.0, 1.0),
        spin_bath(1.0, 4),
        dissipative(1.0, 0.5, 4),
    ] {
        for t in [0.0, 0.4, 1.3] {
            let choice = dni_intermediate(
                &engine,
                t,
                &observable_from_bloch(x_axis()),
                BlochDirection::y_axis(),
            )
            .unwrap();
            assert!(
                choice.direction.axis_angle_to(&x_axis()) < 1e-9,
                "{} t={t}",
                engine.name()
            );
            assert!((choice.direction.theta() - FRAC_PI_2).abs() < 1e-9);
            let phi = choice.direction.phi();
            assert!(phi.min(2.0 * PI - phi) < 1e-9);
        }
    }
}

#[test]
fn dni_at_t_zero_uses_the_first_observable_basis() {
    let engine = spin_bath(1.0, 2);
    let dir = BlochDirection::new(0.7, 2.1).unwrap();
    let choice =
        dni_intermediate(&engine, 0.0, &observable_from_bloch(dir), x_axis()).unwrap();
    assert!(choice.direction.axis_angle_to(&dir) < 1e-10);
}

#[test]
fn dni_errors_when_outcome_bases_disagree() {
    // Amplitude damping pulls both post-measurement states toward |0⟩ while
    // their x̂ components keep opposite signs: the two diagonalizing axes
    // genuinely differ.
    let lower = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let spec = GeneralLindbladSpec {
        hamiltonian: CMatrix::zeros(2, 2),
        jump_operators: vec![(0.8, lower)],
    };
    let engine = EvolutionEngine::GeneralLindblad(
        GeneralLindbladEngine::new(&spec, 2, 1, identity(1)).unwrap(),
    );
    let err = dni_intermediate(
        &engine,
        0.6,
        &observable_from_bloch(x_axis()),
        x_axis(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::BasisDisagreement { .. }));
    // dni_scheme surfaces the same error.
    assert!(dni_scheme(
        &engine,
        0.6,
        0.2,
        observable_from_bloch(x_axis()),
        observable_from_bloch(x_axis()),
        x_axis()
    )
    .is_err());
}

#[test]
fn dephasing_state_after_x_outcome_has_shrinking_x_bloch_vector() {
    let engine = ou_gaussian(1.0, 1.0);
    let t = 0.9;
    for x in Outcome::BOTH {
        let obs = observable_from_bloch(x_axis());
        let rho_tx = DensityMatrix::new(
            engine.system_map_raw(obs.projector(x), t).unwrap(),
        )
        .unwrap();
        let bv = bloch_vector(&rho_tx).unwrap();
        let d = engine.analytic_d(t).unwrap();
        assert!((bv.x - x.value() * d).abs() < 1e-12);
        assert!(bv.y.abs() < 1e-12 && bv.z.abs() < 1e-12);
    }
}

#[test]
fn markov_correlator_factorization_and_d_extraction() {
    let engine = markov(0.9);
    let (t, tau) = (0.5, 0.7);
    let scheme = Scheme::uniform(t, tau, x_axis()).unwrap();
    let cs = correlators(&p3(&engine, &scheme).unwrap());
    assert!((cs.c_zx - cs.c_yx * cs.c_zy).abs() < 1e-12);
    let d_sum = engine.analytic_d(t + tau).unwrap();
    let d_ttau = extract_d_ttau(&cs, FRAC_PI_2, 0.0, d_sum).unwrap();
    assert!((d_ttau - d_sum).abs() < 1e-12);
}

#[test]
fn d_extraction_at_zero_times_is_one() {
    let engine = spin_bath(1.0, 3);
    let scheme = Scheme::uniform(0.0, 0.0, x_axis()).unwrap();
    let cs = correlators(&p3(&engine, &scheme).unwrap());
    let d = extract_d_ttau(&cs, FRAC_PI_2, 0.0, 1.0).unwrap();
    assert!((d - 1.0).abs() < 1e-12);
}

#[test]
fn d_extraction_is_angle_independent() {
    let engine = spin_bath(1.0, 1);
    let (t, tau) = (0.3, 0.5);
    let d_sum = engine.analytic_d(t + tau).unwrap();
    let mut values = Vec::new();
    for (theta, phi) in [(FRAC_PI_2, 0.0), (PI / 3.0, 0.0)] {
        let scheme = Scheme::new(
            t,
            tau,
            observable_from_bloch(x_axis()),
            IntermediateSpec::Fixed(observable_from_bloch(
                BlochDirection::new(theta, phi).unwrap(),
            )),
            observable_from_bloch(x_axis()),
        )
        .unwrap();
        let cs = correlators(&p3(&engine, &scheme).unwrap());
        values.push(extract_d_ttau(&cs, theta, phi, d_sum).unwrap());
    }
    assert!((values[0] - values[1]).abs() < 1e-9);
}

#[test]
fn markov_lgi_never_violates() {
    let engine = markov(1.0);
    let mut max_k = f64::NEG_INFINITY;
    for k in 0..=60 {
        let t = 0.05 * k as f64;
        let r = lgi_from_engine(&engine, t, t, x_axis()).unwrap();
        assert!(!r.violated, "t={t}: K={}", r.k);
        // Closed form 2u - u² with u = e^{-2γt}.
        let u = (-2.0 * t).exp();
        assert!((r.k - (2.0 * u - u * u)).abs() < 1e-12);
        max_k = max_k.max(r.k);
    }
    assert!(max_k <= 1.0 + 1e-12);
}

#[test]
fn spin_bath_lgi_peaks_at_three_halves() {
    let engine = spin_bath(1.0, 1);
    // Calculus oracle: K(t,t) = 2c - (2c² - 1), maximized at c = 1/2,
    // i.e. 2gt = π/3, with K = 3/2.
    let t_star = PI / 6.0;
    let r = lgi_from_engine(&engine, t_star, t_star, x_axis()).unwrap();
    assert!((r.k - 1.5).abs() < 1e-9);
    assert!(r.violated);
    for dt in [-0.05, 0.05] {
        let r2 = lgi_from_engine(&engine, t_star + dt, t_star + dt, x_axis()).unwrap();
        assert!(r2.k < r.k);
    }
}

#[test]
fn lgi_from_correlators_matches_decay_formula() {
    for engine in [
        markov(1.0),
        ou_gaussian(1.0, 1.0),
        spin_bath(1.0, 4),
        dissipative(1.0, 0.5, 4),
        dissipative(1.0, 0.0, 4),
    ] {
        for (t, tau) in [(0.2, 0.6), (0.9, 0.4)] {
            let from_engine = lgi_from_engine(&engine, t, tau, x_axis()).unwrap();
            let from_decay = lgi_decay(&engine, t, tau).unwrap();
            assert!(
                (from_engine.k - from_decay).abs() < 1e-9,
                "{}",
                engine.name()
            );
        }
    }
}

#[test]
fn frozen_dynamics_keeps_k_at_one() {
    let engine = spin_bath(0.0, 2);
    for t in [0.0, 0.7, 2.0] {
        assert!((lgi_decay(&engine, t, t).unwrap() - 1.0).abs() < 1e-14);
    }
    // t = τ = 0 for any model.
    assert!((lgi_decay(&dissipative(1.0, 0.5, 4), 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn monte_carlo_tables_match_gaussian_within_sampling_error() {
    let samples = 40_000;
    let gauss = ou_gaussian(1.0, 1.0);
    let mc = ou_monte_carlo(1.0, 1.0, samples, 23);
    let scheme = Scheme::new(
        0.7,
        0.5,
        observable_from_bloch(x_axis()),
        IntermediateSpec::Fixed(observable_from_bloch(
            BlochDirection::new(1.0, 0.6).unwrap(),
        )),
        observable_from_bloch(BlochDirection::new(2.1, 3.9).unwrap()),
    )
    .unwrap();
    let pg = p3(&gauss, &scheme).unwrap();
    let pm = p3(&mc, &scheme).unwrap();
    let se = 0.5 / (samples as f64).sqrt();
    for z in Outcome::BOTH {
        for y in Outcome::BOTH {
            for x in Outcome::BOTH {
                assert!((pg.get(z, y, x) - pm.get(z, y, x)).abs() < 4.0 * se);
            }
        }
    }
    let ig = invasiveness(
        &marginal_zx(&pg),
        &p2(&gauss, &scheme, TimePair::Full).unwrap(),
    )
    .unwrap();
    let im = invasiveness(
        &marginal_zx(&pm),
        &p2(&mc, &scheme, TimePair::Full).unwrap(),
    )
    .unwrap();
    assert!((ig - im).abs() < 16.0 * se);
}
