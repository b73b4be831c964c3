//! Non-diagonal multipartite dephasing: `n` qubits coupled through the rate
//! matrix `Γ_jk = (γ-χ)δ_jk + χ i^(j-1) (-i)^(k-1)` with jump operators
//! `σ_z^(j)`. Qubit 1 is the system; the rest form the environment, each
//! starting maximally mixed.
//!
//! All jump operators are diagonal in the multi-qubit σ_z basis, so every
//! matrix element of the bipartite state decays independently:
//! `ρ_ab(t) = exp(λ_ab t) ρ_ab(0)` with
//! `λ_ab = s(a)ᵀΓs(b) - ½(s(a)ᵀΓs(a) + s(b)ᵀΓs(b))`, `s(a)` the ±1 spin
//! pattern of basis state `a`. The structured engine applies these rates
//! directly; the dense engine goes through the generic Liouvillian
//! exponential as an oracle.

use num_complex::Complex64;

use super::lindblad::{default_dense_env_states, GeneralLindbladSpec, LindbladCore};
use super::state::{BiState, BipartiteDynamics, EnvOperator};
use crate::qmath::{herm_eig, identity, kron, pauli_z, CMatrix};
use crate::{Error, Result};

/// Dephasing rate `gamma`, coupling `chi`, and total qubit count `n`
/// (system = qubit 1).
#[derive(Debug, Clone, Copy)]
pub struct DissipativeParams {
    pub gamma: f64,
    pub chi: f64,
    pub n: usize,
}

impl DissipativeParams {
    pub fn new(gamma: f64, chi: f64, n: usize) -> Result<Self> {
        if !gamma.is_finite() || !chi.is_finite() {
            return Err(Error::InvalidParameter("non-finite rates".into()));
        }
        if chi < 0.0 || gamma < chi {
            return Err(Error::InvalidParameter(format!(
                "need gamma >= chi >= 0 for a positive rate matrix, got gamma={gamma}, chi={chi}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(
                "the multipartite model needs n >= 2 qubits".into(),
            ));
        }
        Ok(Self { gamma, chi, n })
    }

    /// `Int(n/2)`: the number of environment qubits that contribute the
    /// oscillatory factor of the coherence decay.
    pub fn n_bar(&self) -> usize {
        self.n / 2
    }
}

const STRUCTURED_CAP: usize = 10;
const DENSE_CAP: usize = 4;

/// `Γ_jk = (γ-χ)δ_jk + χ i^(j-1) (-i)^(k-1)`, verified positive
/// semidefinite.
pub fn gamma_matrix(params: &DissipativeParams) -> Result<CMatrix> {
    let n = params.n;
    let i_pow = |m: usize| -> Complex64 {
        match m % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    };
    let mut g = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut v = i_pow(j) * i_pow(k).conj() * Complex64::new(params.chi, 0.0);
            if j == k {
                v += Complex64::new(params.gamma - params.chi, 0.0);
            }
            g[(j, k)] = v;
        }
    }
    let spec = herm_eig(&g)?;
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -1e-12 * params.gamma.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "rate matrix not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(g)
}

/// ±1 spin pattern of basis state `a`, qubit 1 as the most significant bit.
fn spin_pattern(a: usize, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| if (a >> (n - 1 - j)) & 1 == 0 { 1.0 } else { -1.0 })
        .collect()
}

#[derive(Debug, Clone)]
pub struct DissipativeStructured {
    pub params: DissipativeParams,
    /// λ_ab for every pair of basis states of the full n-qubit space.
    rates: CMatrix,
}

impl DissipativeStructured {
    pub fn new(params: DissipativeParams) -> Result<Self> {
        if params.n > STRUCTURED_CAP {
            return Err(Error::InvalidParameter(format!(
                "dissipative n = {} exceeds the structured cap {}",
                params.n, STRUCTURED_CAP
            )));
        }
        let g = gamma_matrix(&params)?;
        let dim = 1usize << params.n;
        // t(b) = Γ s(b) for every basis state, then
        // λ_ab = s(a)·t(b) - ½(s(a)·t(a) + s(b)·t(b)).
        let patterns: Vec<Vec<f64>> = (0..dim).map(|a| spin_pattern(a, params.n)).collect();
        let transformed: Vec<Vec<Complex64>> = patterns
            .iter()
            .map(|s| {
                (0..params.n)
                    .map(|j| {
                        (0..params.n)
                            .map(|k| g[(j, k)] * Complex64::new(s[k], 0.0))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let quad: Vec<Complex64> = (0..dim)
            .map(|a| {
                patterns[a]
                    .iter()
                    .zip(&transformed[a])
                    .map(|(s, t)| t * Complex64::new(*s, 0.0))
                    .sum()
            })
            .collect();
        let mut rates = CMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                let cross: Complex64 = patterns[a]
                    .iter()
                    .zip(&transformed[b])
                    .map(|(s, t)| t * Complex64::new(*s, 0.0))
                    .sum();
                rates[(a, b)] = cross - (quad[a] + quad[b]) * Complex64::new(0.5, 0.0);
            }
        }
        Ok(Self { params, rates })
    }

    fn env_dim_val(&self) -> usize {
        1usize << (self.params.n - 1)
    }
}

impl BipartiteDynamics for DissipativeStructured {
    fn system_dim(&self) -> usize {
        2
    }

    fn env_dim(&self) -> usize {
        self.env_dim_val()
    }

    fn initial_state(&self, sys: &CMatrix) -> Result<BiState> {
        let env_dim = self.env_dim_val();
        let env = identity(env_dim) * Complex64::new(1.0 / env_dim as f64, 0.0);
        self.embed_with_env(sys, &EnvOperator::Dense(env))
    }

    fn embed_with_env(&self, sys: &CMatrix, env: &EnvOperator) -> Result<BiState> {
        let env = match env {
            EnvOperator::Dense(e) => e,
            EnvOperator::SectorDiagonal(_) => {
                return Err(Error::Unsupported(
                    "sector-diagonal environment on the dissipative engine".into(),
                ))
            }
        };
        if sys.nrows() != 2 || env.nrows() != self.env_dim_val() {
            return Err(Error::DimensionMismatch(
                "embed dimensions do not match the dissipative engine".into(),
            ));
        }
        Ok(BiState::Dense {
            mat: kron(sys, env),
            sys_dim: 2,
            env_dim: self.env_dim_val(),
        })
    }

    fn propagate_bi(&self, state: &BiState, dt: f64) -> Result<BiState> {
        if dt < 0.0 {
            return Err(Error::InvalidParameter("negative propagation time".into()));
        }
        match state {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => {
                let dim = 1usize << self.params.n;
                if mat.nrows() != dim {
                    return Err(Error::DimensionMismatch(
                        "state does not match the dissipative engine".into(),
                    ));
                }
                let mut out = mat.clone();
                for a in 0..dim {
                    for b in 0..dim {
                        out[(a, b)] *= (self.rates[(a, b)] * dt).exp();
                    }
                }
                Ok(BiState::Dense {
                    mat: out,
                    sys_dim: *sys_dim,
                    env_dim: *env_dim,
                })
            }
            BiState::Sectors { .. } => Err(Error::Unsupported(
                "sector state on the dissipative engine".into(),
            )),
        }
    }

    fn default_env_states(&self) -> Vec<EnvOperator> {
        default_dense_env_states(self.env_dim_val())
    }
}

/// Dense-Liouvillian oracle for the same model: the rate matrix is
/// diagonalized into jump operators `L_α = Σ_j w_α[j] σ_z^(j)` and the
/// propagation goes through the generic superoperator exponential.
#[derive(Debug, Clone)]
pub struct DissipativeDense {
    pub params: DissipativeParams,
    core: LindbladCore,
}

impl DissipativeDense {
    pub fn new(params: DissipativeParams) -> Result<Self> {
        if params.n > DENSE_CAP {
            return Err(Error::InvalidParameter(format!(
                "dissipative n = {} exceeds the dense-oracle cap {}",
                params.n, DENSE_CAP
            )));
        }
        let g = gamma_matrix(&params)?;
        let spec_g = herm_eig(&g)?;
        let dim = 1usize << params.n;
        let mut jumps = Vec::new();
        for (idx, rate) in spec_g.eigenvalues.iter().enumerate() {
            let rate = rate.max(0.0);
            if rate == 0.0 {
                continue;
            }
            let w = &spec_g.eigenvectors[idx];
            let mut op = CMatrix::zeros(dim, dim);
            for j in 0..params.n {
                let mut zj = identity(1);
                for q in 0..params.n {
                    let f = if q == j { pauli_z() } else { identity(2) };
                    zj = kron(&zj, &f);
                }
                op += zj * w[j];
            }
            jumps.push((rate, op));
        }
        let spec = GeneralLindbladSpec {
            hamiltonian: CMatrix::zeros(dim, dim),
            jump_operators: jumps,
        };
        let env_dim = 1usize << (params.n - 1);
        let env0 = identity(env_dim) * Complex64::new(1.0 / env_dim as f64, 0.0);
        Ok(Self {
            params,
            core: LindbladCore::new(&spec, 2, env_dim, env0)?,
        })
    }

    pub fn core(&self) -> &LindbladCore {
        &self.core
    }
}

impl BipartiteDynamics for DissipativeDense {
    fn system_dim(&self) -> usize {
        2
    }

    fn env_dim(&self) -> usize {
        self.core.env_dim()
    }

    fn initial_state(&self, sys: &CMatrix) -> Result<BiState> {
        self.embed_with_env(sys, &EnvOperator::Dense(self.core.env0().clone()))
    }

    fn embed_with_env(&self, sys: &CMatrix, env: &EnvOperator) -> Result<BiState> {
        match env {
            EnvOperator::Dense(e) => {
                if sys.nrows() != 2 || e.nrows() != self.core.env_dim() {
                    return Err(Error::DimensionMismatch(
                        "embed dimensions do not match the dissipative engine".into(),
                    ));
                }
                Ok(BiState::Dense {
                    mat: kron(sys, e),
                    sys_dim: 2,
                    env_dim: self.core.env_dim(),
                })
            }
            EnvOperator::SectorDiagonal(_) => Err(Error::Unsupported(
                "sector-diagonal environment on the dense dissipative engine".into(),
            )),
        }
    }

    fn propagate_bi(&self, state: &BiState, dt: f64) -> Result<BiState> {
        match state {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => Ok(BiState::Dense {
                mat: self.core.propagate_mat(mat, dt)?,
                sys_dim: *sys_dim,
                env_dim: *env_dim,
            }),
            BiState::Sectors { .. } => Err(Error::Unsupported(
                "sector state on the dense dissipative engine".into(),
            )),
        }
    }

    fn default_env_states(&self) -> Vec<EnvOperator> {
        default_dense_env_states(self.core.env_dim())
    }
}
