//! Markovianity, superclassicality, and discord diagnostics, plus the
//! Leggett-Garg evaluations built from two-measurement correlators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::dist::{lgi_value, JointDist2, JointDist3, LgiResult, TimePair};
use super::joint::{p1, p2, p3};
use super::scheme::Scheme;
use crate::measurement::{observable_from_bloch, BlochDirection, Outcome};
use crate::models::{BipartiteDynamics, EnvOperator, EvolutionEngine};
use crate::qmath::{
    herm_eig, identity, pauli_x, pauli_y, pauli_z, trace, trace_norm_hermitian, CMatrix,
    DensityMatrix,
};
use crate::{Error, Result};

/// Conditioning marginals below this are excluded from the factorization
/// distance rather than divided through.
const MARGINAL_FLOOR: f64 = 1e-12;

/// Distance from Markovianity in probability:
/// `Σ_zyx |P₃(z,y,x) - P₂(z|y)P₂(y|x)P₁(x)|`.
#[derive(Debug, Clone, Copy)]
pub struct FactorizationReport {
    pub distance: f64,
    /// Outcome triples skipped because a conditioning marginal vanished.
    pub skipped: usize,
}

pub fn markov_factorization_distance(
    p3_table: &JointDist3,
    p2_first: &JointDist2,
    p2_second: &JointDist2,
    p1v: &[f64; 2],
) -> Result<FactorizationReport> {
    if p2_first.pair != TimePair::First || p2_second.pair != TimePair::Second {
        return Err(Error::InvalidParameter(
            "factorization distance needs the (0,t) and (t,t+τ) tables".into(),
        ));
    }
    for table in [p2_first, p2_second] {
        if (table.t - p3_table.t).abs() > 1e-12 || (table.tau - p3_table.tau).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "factorization tables come from different schemes".into(),
            ));
        }
    }
    let mut distance = 0.0;
    let mut skipped = 0usize;
    for z in Outcome::BOTH {
        for y in Outcome::BOTH {
            for x in Outcome::BOTH {
                let px = p1v[x.index()];
                let py = p2_second.first_marginal(y);
                if px < MARGINAL_FLOOR || py < MARGINAL_FLOOR {
                    skipped += 1;
                    continue;
                }
                let cond_yx = p2_first.get(y, x) / px;
                let cond_zy = p2_second.get(z, y) / py;
                distance += (p3_table.get(z, y, x) - cond_zy * cond_yx * px).abs();
            }
        }
    }
    Ok(FactorizationReport { distance, skipped })
}

/// Compute all tables for a scheme and return the factorization distance.
pub fn markov_factorization_for(
    engine: &EvolutionEngine,
    scheme: &Scheme,
) -> Result<FactorizationReport> {
    let table3 = p3(engine, scheme)?;
    let first = p2(engine, scheme, TimePair::First)?;
    let second = p2(engine, scheme, TimePair::Second)?;
    markov_factorization_distance(&table3, &first, &second, &p1(scheme))
}

/// Pauli eigenstates, the maximally mixed state, and seeded random states:
/// the default inputs for the propagator-level checkers.
pub fn default_test_states(seed: u64, random_count: usize) -> Vec<DensityMatrix> {
    let mut states = Vec::new();
    let half = Complex64::new(0.5, 0.0);
    for sigma in [pauli_x(), pauli_y(), pauli_z()] {
        for sign in [1.0, -1.0] {
            states.push(
                DensityMatrix::new((identity(2) + &sigma * Complex64::new(sign, 0.0)) * half)
                    .expect("Pauli eigenstate"),
            );
        }
    }
    states.push(DensityMatrix::maximally_mixed(2));
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..random_count {
        let g = CMatrix::from_fn(2, 2, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = &g * g.adjoint();
        let tr = trace(&m);
        states.push(DensityMatrix::new(m / tr).expect("Ginibre state"));
    }
    states
}

/// Per-state deviations from the superclassicality propagator constraint.
#[derive(Debug, Clone)]
pub struct SuperclassicalityReport {
    pub max_deviation: f64,
    pub per_state: Vec<f64>,
}

/// Trace-norm violation of the DNI propagator constraint: compares
/// `Λ_{t+τ,0}[ρ]` against the reconstruction that measures nonselectively
/// in the eigenbasis of `Λ_{t,0}[ρ]` at the intermediate time,
/// `Σ_c Tr_e(𝒢_{t+τ,t}[(Π_t^c ⊗ I)𝒢_{t,0}[ρ⊗σ₀](Π_t^c ⊗ I)])`.
///
/// On rank-1 projectors the pinched term equals the factored form
/// `Π_t^c ⊗ Tr_s(Π_t^c 𝒢_{t,0}[ρ⊗σ₀])`; degenerate intermediate states use
/// the eigensolver's multi-dimensional cluster projectors, for which the
/// pinching is the trace-consistent reading.
pub fn superclassicality_deviation(
    engine: &EvolutionEngine,
    test_states: &[DensityMatrix],
    t: f64,
    tau: f64,
) -> Result<SuperclassicalityReport> {
    let dyn_ = engine
        .bipartite()
        .ok_or_else(|| Error::Unsupported("superclassicality needs a bipartite engine".into()))?;
    let mut per_state = Vec::with_capacity(test_states.len());
    let mut max_deviation = 0.0f64;
    for rho in test_states {
        let state_t = dyn_.propagate_bi(&dyn_.initial_state(rho.matrix())?, t)?;
        let lhs = dyn_.propagate_bi(&state_t, tau)?.reduced_system()?;
        let rho_t = state_t.reduced_system()?;
        let spec = herm_eig(&rho_t)?;
        let mut rhs = CMatrix::zeros(rho_t.nrows(), rho_t.ncols());
        for proj in &spec.projectors {
            let pinched = state_t.system_sandwich(proj)?;
            rhs += dyn_.propagate_bi(&pinched, tau)?.reduced_system()?;
        }
        let dev = trace_norm_hermitian(&(lhs - rhs))?;
        max_deviation = max_deviation.max(dev);
        per_state.push(dev);
    }
    Ok(SuperclassicalityReport {
        max_deviation,
        per_state,
    })
}

/// Maximal trace norm of `Tr_s(Π_t^{c̃c} 𝒢_{t,0}[ρ ⊗ σ₀])` over `c ≠ c̃`:
/// zero exactly when the evolved state has the zero-discord form in the
/// eigenbasis of the reduced state.
pub fn discord_condition_norm(
    engine: &EvolutionEngine,
    rho: &DensityMatrix,
    t: f64,
) -> Result<f64> {
    let dyn_ = engine
        .bipartite()
        .ok_or_else(|| Error::Unsupported("discord checker needs a bipartite engine".into()))?;
    let state_t = dyn_.propagate_bi(&dyn_.initial_state(rho.matrix())?, t)?;
    let rho_t = state_t.reduced_system()?;
    let spec = herm_eig(&rho_t)?;
    let mut max_norm = 0.0f64;
    let dim = spec.eigenvectors.len();
    for c in 0..dim {
        for ct in 0..dim {
            if c == ct {
                continue;
            }
            // Π^{c̃c} = |c̃⟩⟨c|; its partial system trace against the state
            // is the (c, c̃) system block.
            let proj = &spec.eigenvectors[ct] * spec.eigenvectors[c].adjoint();
            let block = state_t.partial_system_projection(&proj)?;
            max_norm = max_norm.max(block.trace_norm()?);
        }
    }
    Ok(max_norm)
}

/// Environment-state dependence of the reduced interval propagator:
/// max over test system states and environment-state pairs of
/// `‖Tr_e(𝒢_τ[ρ⊗σ_i]) - Tr_e(𝒢_τ[ρ⊗σ_j])‖₁`. Zero certifies the
/// history-independence of the system propagator.
pub fn markov_propagator_condition(
    engine: &EvolutionEngine,
    tau: f64,
    env_states: &[EnvOperator],
) -> Result<f64> {
    let dyn_ = engine.bipartite().ok_or_else(|| {
        Error::Unsupported("propagator condition needs a bipartite engine".into())
    })?;
    if env_states.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two environment test states".into(),
        ));
    }
    let sys_states = default_test_states(0x9e3779b9, 4);
    let mut max_dev = 0.0f64;
    for rho in &sys_states {
        let reduced: Vec<CMatrix> = env_states
            .iter()
            .map(|sigma| {
                let tr = sigma.trace();
                let state = dyn_.embed_with_env(rho.matrix(), sigma)?;
                let out = dyn_.propagate_bi(&state, tau)?.reduced_system()?;
                Ok(out / tr)
            })
            .collect::<Result<_>>()?;
        for i in 0..reduced.len() {
            for j in (i + 1)..reduced.len() {
                let dev = trace_norm_hermitian(&(&reduced[i] - &reduced[j]))?;
                max_dev = max_dev.max(dev);
            }
        }
    }
    Ok(max_dev)
}

/// Default environment test states of the engine (normalized).
pub fn default_env_states(engine: &EvolutionEngine) -> Result<Vec<EnvOperator>> {
    engine
        .bipartite()
        .map(BipartiteDynamics::default_env_states)
        .ok_or_else(|| Error::Unsupported("engine has no environment".into()))
}

/// `K = d(t) + d(τ) - d(t+τ)`: the LGI parameter of a dephasing model under
/// measurements diagonal in the x̂ direction, written with the model's
/// closed-form coherence decay.
pub fn lgi_decay(engine: &EvolutionEngine, t: f64, tau: f64) -> Result<f64> {
    Ok(engine.analytic_d(t)? + engine.analytic_d(tau)? - engine.analytic_d(t + tau)?)
}

/// LGI evaluated from simulated two-measurement correlators with all three
/// observables along `dir` (the x̂ direction reproduces `lgi_decay` for the
/// dephasing models).
pub fn lgi_from_engine(
    engine: &EvolutionEngine,
    t: f64,
    tau: f64,
    dir: BlochDirection,
) -> Result<LgiResult> {
    let obs = observable_from_bloch(dir);
    let scheme = Scheme::new(
        t,
        tau,
        obs.clone(),
        super::scheme::IntermediateSpec::Fixed(obs.clone()),
        obs,
    )?;
    let c_yx = p2(engine, &scheme, TimePair::First)?.correlator();
    let c_zy = p2(engine, &scheme, TimePair::Second)?.correlator();
    let c_zx = p2(engine, &scheme, TimePair::Full)?.correlator();
    Ok(lgi_value(c_yx, c_zy, c_zx))
}
