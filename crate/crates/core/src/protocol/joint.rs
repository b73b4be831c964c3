//! Outcome statistics of the two- and three-measurement protocols for each
//! engine class.
//!
//! Markovian engines factorize the joint probability through the system
//! propagator; bipartite engines carry the full system-environment state
//! through the intermediate selective measurement; the stochastic engines
//! average the product of the two trace factors per noise realization,
//! either path by path (Monte Carlo) or exactly through Gaussian moments.

use num_complex::Complex64;

use super::dist::{JointDist2, JointDist3, TimePair};
use super::scheme::Scheme;
use crate::measurement::{bloch_vector_raw, DichotomicObservable, Outcome};
use crate::models::{
    ou_decay, ou_gaussian_moments, BipartiteDynamics, EvolutionEngine, GaussianMoments,
    OuMonteCarlo, OuNoiseParams,
};
use crate::qmath::trace;
use crate::{Error, Result};

/// Normalization tolerance for validated tables.
const SUM_TOL: f64 = 1e-10;

/// First-measurement distribution `P₁(x) = Tr(E_x ρ₀)`.
pub fn p1(scheme: &Scheme) -> [f64; 2] {
    let mut out = [0.0; 2];
    for x in Outcome::BOTH {
        out[x.index()] = trace(&(scheme.obs_x.projector(x) * scheme.initial_state.matrix()))
            .re
            .max(0.0);
    }
    out
}

/// Three-measurement joint distribution `P₃(z, y, x)`.
pub fn p3(engine: &EvolutionEngine, scheme: &Scheme) -> Result<JointDist3> {
    let obs_y = scheme.resolve_intermediate(engine)?;
    let p1v = p1(scheme);
    let probs = match engine {
        EvolutionEngine::MarkovDephasing(_) => p3_markov(engine, scheme, &obs_y, &p1v)?,
        EvolutionEngine::OuGaussianExact(e) => p3_gaussian(&e.params, scheme, &obs_y, &p1v)?,
        EvolutionEngine::OuMonteCarlo(e) => p3_monte_carlo(e, scheme, &obs_y, &p1v)?,
        _ => p3_bipartite(bipartite_qubit(engine)?, scheme, &obs_y, &p1v)?,
    };
    JointDist3::new(probs, scheme.t, scheme.tau, SUM_TOL)
}

/// Two-measurement joint distribution at the chosen time pair. Outcomes are
/// indexed `(second, first)`; the observables are the scheme's assignments
/// to the two times involved.
pub fn p2(engine: &EvolutionEngine, scheme: &Scheme, pair: TimePair) -> Result<JointDist2> {
    let obs_y = match pair {
        TimePair::Full => None,
        _ => Some(scheme.resolve_intermediate(engine)?),
    };
    let (t0, dt, obs_a, obs_b): (f64, f64, &DichotomicObservable, &DichotomicObservable) =
        match pair {
            TimePair::First => (0.0, scheme.t, &scheme.obs_x, obs_y.as_ref().unwrap()),
            TimePair::Second => (
                scheme.t,
                scheme.tau,
                obs_y.as_ref().unwrap(),
                &scheme.obs_z,
            ),
            TimePair::Full => (0.0, scheme.t + scheme.tau, &scheme.obs_x, &scheme.obs_z),
        };

    let probs = match engine {
        EvolutionEngine::MarkovDephasing(_) => {
            let rho_first = engine.system_map_raw(scheme.initial_state.matrix(), t0)?;
            let mut probs = [[0.0; 2]; 2];
            for a in Outcome::BOTH {
                let w = trace(&(obs_a.projector(a) * &rho_first)).re;
                let after = engine.system_map_raw(obs_a.projector(a), dt)?;
                for b in Outcome::BOTH {
                    probs[b.index()][a.index()] = w * trace(&(obs_b.projector(b) * &after)).re;
                }
            }
            probs
        }
        EvolutionEngine::OuGaussianExact(e) => {
            p2_gaussian(&e.params, scheme, pair, obs_a, obs_b)?
        }
        EvolutionEngine::OuMonteCarlo(e) => p2_monte_carlo(e, scheme, pair, obs_a, obs_b)?,
        _ => {
            let dyn_ = bipartite_qubit(engine)?;
            let st0 = dyn_.initial_state(scheme.initial_state.matrix())?;
            let st = dyn_.propagate_bi(&st0, t0)?;
            let mut probs = [[0.0; 2]; 2];
            for a in Outcome::BOTH {
                let sand = st.system_sandwich(obs_a.projector(a))?;
                let after = dyn_.propagate_bi(&sand, dt)?;
                for b in Outcome::BOTH {
                    probs[b.index()][a.index()] =
                        after.system_expectation(obs_b.projector(b))?.re;
                }
            }
            probs
        }
    };
    JointDist2::new(probs, pair, scheme.t, scheme.tau, SUM_TOL)
}

fn bipartite_qubit(engine: &EvolutionEngine) -> Result<&dyn BipartiteDynamics> {
    let dyn_ = engine
        .bipartite()
        .ok_or_else(|| Error::Unsupported("engine has no bipartite dynamics".into()))?;
    if dyn_.system_dim() != 2 {
        return Err(Error::Unsupported(
            "the measurement protocol works on a qubit system".into(),
        ));
    }
    Ok(dyn_)
}

fn p3_markov(
    engine: &EvolutionEngine,
    scheme: &Scheme,
    obs_y: &DichotomicObservable,
    p1v: &[f64; 2],
) -> Result<[[[f64; 2]; 2]; 2]> {
    let mut probs = [[[0.0; 2]; 2]; 2];
    // Λ_{t+τ,t}[ρ_y] does not depend on x; compute once per y.
    let mut second_factor = [[0.0; 2]; 2];
    for y in Outcome::BOTH {
        let after = engine.system_map_raw(obs_y.projector(y), scheme.tau)?;
        for z in Outcome::BOTH {
            second_factor[z.index()][y.index()] =
                trace(&(scheme.obs_z.projector(z) * &after)).re;
        }
    }
    for x in Outcome::BOTH {
        let rho_tx = engine.system_map_raw(scheme.obs_x.projector(x), scheme.t)?;
        for y in Outcome::BOTH {
            let w1 = trace(&(obs_y.projector(y) * &rho_tx)).re;
            for z in Outcome::BOTH {
                probs[z.index()][y.index()][x.index()] =
                    p1v[x.index()] * w1 * second_factor[z.index()][y.index()];
            }
        }
    }
    Ok(probs)
}

fn p3_bipartite(
    dyn_: &dyn BipartiteDynamics,
    scheme: &Scheme,
    obs_y: &DichotomicObservable,
    p1v: &[f64; 2],
) -> Result<[[[f64; 2]; 2]; 2]> {
    let mut probs = [[[0.0; 2]; 2]; 2];
    for x in Outcome::BOTH {
        let state0 = dyn_.initial_state(scheme.obs_x.projector(x))?;
        let state_t = dyn_.propagate_bi(&state0, scheme.t)?;
        for y in Outcome::BOTH {
            let sand = state_t.system_sandwich(obs_y.projector(y))?;
            let after = dyn_.propagate_bi(&sand, scheme.tau)?;
            for z in Outcome::BOTH {
                let w = after.system_expectation(scheme.obs_z.projector(z))?;
                probs[z.index()][y.index()][x.index()] = p1v[x.index()] * w.re;
            }
        }
    }
    Ok(probs)
}

/// Transverse (as a complex number `vx + i vy`) and longitudinal parts of a
/// Bloch-space vector.
fn split(v: [f64; 3]) -> (Complex64, f64) {
    (Complex64::new(v[0], v[1]), v[2])
}

/// Per-realization trace factors for the two intervals: with the doubled
/// phases `Φ₁`, `Φ₂`, the Bloch vector rotates about ẑ so that
/// `A₁ = n̂_y·R(Φ₁)v` and `A₂ = n̂_z·R(Φ₂)n̂_y`.
fn two_interval_factors(
    v: [f64; 3],
    ny: [f64; 3],
    nz: [f64; 3],
    phi1: f64,
    phi2: f64,
) -> (f64, f64) {
    let (vp, vz) = split(v);
    let (nyp, nyz) = split(ny);
    let (nzp, nzz) = split(nz);
    let a1 = (nyp.conj() * Complex64::from_polar(1.0, phi1) * vp).re + nyz * vz;
    let a2 = (nzp.conj() * Complex64::from_polar(1.0, phi2) * nyp).re + nzz * nyz;
    (a1, a2)
}

/// Exact Gaussian averages `E[A₁]`, `E[A₂]`, `E[A₁A₂]` of the two interval
/// factors.
fn two_interval_expectations(
    v: [f64; 3],
    ny: [f64; 3],
    nz: [f64; 3],
    m: &GaussianMoments,
) -> (f64, f64, f64) {
    let (vp, vz) = split(v);
    let (nyp, nyz) = split(ny);
    let (nzp, nzz) = split(nz);
    let alpha = nyp.conj() * vp;
    let a0 = nyz * vz;
    let beta = nzp.conj() * nyp;
    let b0 = nzz * nyz;
    let e1 = alpha.re * m.characteristic(1, 0) + a0;
    let e2 = beta.re * m.characteristic(0, 1) + b0;
    let e12 = 0.5 * (alpha * beta).re * m.characteristic(1, 1)
        + 0.5 * (alpha * beta.conj()).re * m.characteristic(1, -1)
        + a0 * beta.re * m.characteristic(0, 1)
        + b0 * alpha.re * m.characteristic(1, 0)
        + a0 * b0;
    (e1, e2, e12)
}

fn p3_gaussian(
    params: &OuNoiseParams,
    scheme: &Scheme,
    obs_y: &DichotomicObservable,
    p1v: &[f64; 2],
) -> Result<[[[f64; 2]; 2]; 2]> {
    let m = ou_gaussian_moments(params, scheme.t, scheme.tau)?;
    let nx = scheme.obs_x.direction().unit_vector();
    let ny = obs_y.direction().unit_vector();
    let nz = scheme.obs_z.direction().unit_vector();
    let (e1, e2, e12) = two_interval_expectations(nx, ny, nz, &m);
    Ok(assemble_three(p1v, e1, e2, e12))
}

fn p3_monte_carlo(
    mc: &OuMonteCarlo,
    scheme: &Scheme,
    obs_y: &DichotomicObservable,
    p1v: &[f64; 2],
) -> Result<[[[f64; 2]; 2]; 2]> {
    let grid = [scheme.t, scheme.t + scheme.tau];
    let nx = scheme.obs_x.direction().unit_vector();
    let ny = obs_y.direction().unit_vector();
    let nz = scheme.obs_z.direction().unit_vector();
    let acc = mc.mean_over_paths(&grid, 3, |path, acc| {
        let phi1 = 2.0 * path.phase_at_mark(0);
        let phi2 = 2.0 * (path.phase_at_mark(1) - path.phase_at_mark(0));
        let (a1, a2) = two_interval_factors(nx, ny, nz, phi1, phi2);
        acc[0] += a1;
        acc[1] += a2;
        acc[2] += a1 * a2;
    })?;
    Ok(assemble_three(p1v, acc[0], acc[1], acc[2]))
}

/// `P₃(z,y,x) = P₁(x)·¼(1 + yx·e1 + zy·e2 + zx·e12)`.
fn assemble_three(p1v: &[f64; 2], e1: f64, e2: f64, e12: f64) -> [[[f64; 2]; 2]; 2] {
    let mut probs = [[[0.0; 2]; 2]; 2];
    for z in Outcome::BOTH {
        for y in Outcome::BOTH {
            for x in Outcome::BOTH {
                let (zv, yv, xv) = (z.value(), y.value(), x.value());
                probs[z.index()][y.index()][x.index()] = p1v[x.index()]
                    * 0.25
                    * (1.0 + yv * xv * e1 + zv * yv * e2 + zv * xv * e12);
            }
        }
    }
    probs
}

/// Single-interval dephasing factor between two observables:
/// `E[n̂_b·R(Φ)(a·n̂_a)] = a·(Re[conj(nb⊥)na⊥]·d + nb_z·na_z)`.
fn single_interval_coefficient(
    obs_a: &DichotomicObservable,
    obs_b: &DichotomicObservable,
    d: f64,
) -> f64 {
    let (nap, naz) = split(obs_a.direction().unit_vector());
    let (nbp, nbz) = split(obs_b.direction().unit_vector());
    (nbp.conj() * nap).re * d + nbz * naz
}

fn p2_gaussian(
    params: &OuNoiseParams,
    scheme: &Scheme,
    pair: TimePair,
    obs_a: &DichotomicObservable,
    obs_b: &DichotomicObservable,
) -> Result<[[f64; 2]; 2]> {
    match pair {
        TimePair::First | TimePair::Full => {
            let span = match pair {
                TimePair::First => scheme.t,
                _ => scheme.t + scheme.tau,
            };
            let coeff = single_interval_coefficient(obs_a, obs_b, ou_decay(params, span));
            let mut pa = [0.0; 2];
            for a in Outcome::BOTH {
                pa[a.index()] = trace(&(obs_a.projector(a) * scheme.initial_state.matrix()))
                    .re
                    .max(0.0);
            }
            let mut probs = [[0.0; 2]; 2];
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    probs[b.index()][a.index()] =
                        pa[a.index()] * 0.5 * (1.0 + b.value() * a.value() * coeff);
                }
            }
            Ok(probs)
        }
        TimePair::Second => {
            let m = ou_gaussian_moments(params, scheme.t, scheme.tau)?;
            let bv = bloch_vector_raw(scheme.initial_state.matrix())?;
            let (e1, e2, e12) = two_interval_expectations(
                [bv.x, bv.y, bv.z],
                obs_a.direction().unit_vector(),
                obs_b.direction().unit_vector(),
                &m,
            );
            Ok(assemble_two(e1, e2, e12))
        }
    }
}

fn p2_monte_carlo(
    mc: &OuMonteCarlo,
    scheme: &Scheme,
    pair: TimePair,
    obs_a: &DichotomicObservable,
    obs_b: &DichotomicObservable,
) -> Result<[[f64; 2]; 2]> {
    match pair {
        TimePair::First | TimePair::Full => {
            let span = match pair {
                TimePair::First => scheme.t,
                _ => scheme.t + scheme.tau,
            };
            let na = obs_a.direction().unit_vector();
            let nb = obs_b.direction().unit_vector();
            let acc = mc.mean_over_paths(&[span], 1, |path, acc| {
                let phi = 2.0 * path.phase_at_mark(0);
                let (nap, naz) = split(na);
                let (nbp, nbz) = split(nb);
                acc[0] += (nbp.conj() * Complex64::from_polar(1.0, phi) * nap).re + nbz * naz;
            })?;
            let mut pa = [0.0; 2];
            for a in Outcome::BOTH {
                pa[a.index()] = trace(&(obs_a.projector(a) * scheme.initial_state.matrix()))
                    .re
                    .max(0.0);
            }
            let mut probs = [[0.0; 2]; 2];
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    probs[b.index()][a.index()] =
                        pa[a.index()] * 0.5 * (1.0 + b.value() * a.value() * acc[0]);
                }
            }
            Ok(probs)
        }
        TimePair::Second => {
            let grid = [scheme.t, scheme.t + scheme.tau];
            let bv = bloch_vector_raw(scheme.initial_state.matrix())?;
            let v = [bv.x, bv.y, bv.z];
            let na = obs_a.direction().unit_vector();
            let nb = obs_b.direction().unit_vector();
            let acc = mc.mean_over_paths(&grid, 3, |path, acc| {
                let phi1 = 2.0 * path.phase_at_mark(0);
                let phi2 = 2.0 * (path.phase_at_mark(1) - path.phase_at_mark(0));
                let (a1, a2) = two_interval_factors(v, na, nb, phi1, phi2);
                acc[0] += a1;
                acc[1] += a2;
                acc[2] += a1 * a2;
            })?;
            Ok(assemble_two(acc[0], acc[1], acc[2]))
        }
    }
}

/// `P₂(b,a) = ¼(1 + a·e1 + ba·e2 + b·e12)` for a first measurement on the
/// freely evolved initial state.
fn assemble_two(e1: f64, e2: f64, e12: f64) -> [[f64; 2]; 2] {
    let mut probs = [[0.0; 2]; 2];
    for b in Outcome::BOTH {
        for a in Outcome::BOTH {
            probs[b.index()][a.index()] = 0.25
                * (1.0 + a.value() * e1 + b.value() * a.value() * e2 + b.value() * e12);
        }
    }
    probs
}
