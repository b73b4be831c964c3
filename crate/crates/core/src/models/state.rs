//! System-environment state representations shared by the bipartite engines.

use num_complex::Complex64;

use crate::qmath::{partial_trace, trace_norm_general, CMatrix};
use crate::{Error, Result};

/// A (possibly unnormalized) bipartite operator carried through a
/// measurement protocol.
///
/// `Dense` is the full matrix on the `sys ⊗ env` space with the system as
/// the first tensor factor. `Sectors` is the spin-bath structured form: one
/// aggregated 2x2 system block per environment magnetization sector, the
/// environment factor being implicitly the normalized uniform diagonal state
/// of that sector.
#[derive(Debug, Clone)]
pub enum BiState {
    Dense {
        mat: CMatrix,
        sys_dim: usize,
        env_dim: usize,
    },
    Sectors {
        blocks: Vec<CMatrix>,
    },
}

impl BiState {
    pub fn trace(&self) -> Complex64 {
        match self {
            BiState::Dense { mat, .. } => crate::qmath::trace(mat),
            BiState::Sectors { blocks } => {
                blocks.iter().map(crate::qmath::trace).sum()
            }
        }
    }

    /// Reduced system operator `Tr_e`.
    pub fn reduced_system(&self) -> Result<CMatrix> {
        match self {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => partial_trace(mat, &[*sys_dim, *env_dim], &[0]),
            BiState::Sectors { blocks } => {
                let mut out = CMatrix::zeros(2, 2);
                for b in blocks {
                    out += b;
                }
                Ok(out)
            }
        }
    }

    ///`(op ⊗ I) ρ (op† ⊗ I)`: the selective-measurement sandwich when `op`
    /// is a projector. The result keeps the outcome weight in its trace.
    pub fn system_sandwich(&self, op: &CMatrix) -> Result<BiState> {
        match self {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => {
                if op.nrows() != *sys_dim {
                    return Err(Error::DimensionMismatch(
                        "system operator does not match the state".into(),
                    ));
                }
                let ds = *sys_dim;
                let de = *env_dim;
                // X = (op⊗I) m (op†⊗I) computed blockwise over system indices.
                let mut out = CMatrix::zeros(ds * de, ds * de);
                for a in 0..ds {
                    for b in 0..ds {
                        let mut block = CMatrix::zeros(de, de);
                        for s in 0..ds {
                            for sp in 0..ds {
                                let w = op[(a, s)] * op[(b, sp)].conj();
                                if w.norm_sqr() == 0.0 {
                                    continue;
                                }
                                for e in 0..de {
                                    for ep in 0..de {
                                        block[(e, ep)] += w * mat[(s * de + e, sp * de + ep)];
                                    }
                                }
                            }
                        }
                        for e in 0..de {
                            for ep in 0..de {
                                out[(a * de + e, b * de + ep)] = block[(e, ep)];
                            }
                        }
                    }
                }
                Ok(BiState::Dense {
                    mat: out,
                    sys_dim: ds,
                    env_dim: de,
                })
            }
            BiState::Sectors { blocks } => Ok(BiState::Sectors {
                blocks: blocks.iter().map(|b| op * b * op.adjoint()).collect(),
            }),
        }
    }

    /// `Tr((op ⊗ I) ρ)`.
    pub fn system_expectation(&self, op: &CMatrix) -> Result<Complex64> {
        match self {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => {
                if op.nrows() != *sys_dim {
                    return Err(Error::DimensionMismatch(
                        "system operator does not match the state".into(),
                    ));
                }
                let (ds, de) = (*sys_dim, *env_dim);
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..ds {
                    for sp in 0..ds {
                        if op[(s, sp)].norm_sqr() == 0.0 {
                            continue;
                        }
                        for e in 0..de {
                            acc += op[(s, sp)] * mat[(sp * de + e, s * de + e)];
                        }
                    }
                }
                Ok(acc)
            }
            BiState::Sectors { blocks } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in blocks {
                    acc += crate::qmath::trace(&(op * b));
                }
                Ok(acc)
            }
        }
    }

    /// `Tr_s((P ⊗ I) ρ)` as an environment operator:
    /// `X[e,e'] = Σ_{s,u} P[s,u] ρ[(u,e),(s,e')]`.
    pub fn partial_system_projection(&self, p: &CMatrix) -> Result<EnvOperator> {
        match self {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => {
                if p.nrows() != *sys_dim {
                    return Err(Error::DimensionMismatch(
                        "projection operator does not match the state".into(),
                    ));
                }
                let (ds, de) = (*sys_dim, *env_dim);
                let mut x = CMatrix::zeros(de, de);
                for s in 0..ds {
                    for u in 0..ds {
                        let w = p[(s, u)];
                        if w.norm_sqr() == 0.0 {
                            continue;
                        }
                        for e in 0..de {
                            for ep in 0..de {
                                x[(e, ep)] += w * mat[(u * de + e, s * de + ep)];
                            }
                        }
                    }
                }
                Ok(EnvOperator::Dense(x))
            }
            BiState::Sectors { blocks } => Ok(EnvOperator::SectorDiagonal(
                blocks
                    .iter()
                    .map(|b| crate::qmath::trace(&(p * b)))
                    .collect(),
            )),
        }
    }
}

/// An operator on the environment factor alone.
///
/// `SectorDiagonal` pairs with the spin-bath structured engine: entry `k` is
/// the total weight on magnetization sector `k`, the operator within the
/// sector being the normalized uniform diagonal.
#[derive(Debug, Clone)]
pub enum EnvOperator {
    Dense(CMatrix),
    SectorDiagonal(Vec<Complex64>),
}

impl EnvOperator {
    pub fn trace(&self) -> Complex64 {
        match self {
            EnvOperator::Dense(m) => crate::qmath::trace(m),
            EnvOperator::SectorDiagonal(a) => a.iter().sum(),
        }
    }

    pub fn trace_norm(&self) -> Result<f64> {
        match self {
            EnvOperator::Dense(m) => trace_norm_general(m),
            EnvOperator::SectorDiagonal(a) => Ok(a.iter().map(|c| c.norm()).sum()),
        }
    }
}

/// Interval propagation and embedding operations of a system-environment
/// model with the semigroup contract: propagation over concatenated
/// intervals composes, and system measurements act only through the
/// state-side operations of [`BiState`].
pub trait BipartiteDynamics: Sync {
    fn system_dim(&self) -> usize;
    fn env_dim(&self) -> usize;

    /// `sys ⊗ σ₀` with the engine's initial environment state.
    fn initial_state(&self, sys: &CMatrix) -> Result<BiState>;

    /// `sys ⊗ env` for an explicit environment operator.
    fn embed_with_env(&self, sys: &CMatrix, env: &EnvOperator) -> Result<BiState>;

    fn propagate_bi(&self, state: &BiState, dt: f64) -> Result<BiState>;

    /// Normalized environment states used by the propagator-condition
    /// checker.
    fn default_env_states(&self) -> Vec<EnvOperator>;
}
