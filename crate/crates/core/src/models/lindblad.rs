//! Generic dense bipartite Lindblad engine: builds the Liouvillian
//! superoperator `ℒ[ρ] = -i[H,ρ] + Σ_α γ_α (V_α ρ V_α† - ½{V_α†V_α, ρ})`
//! in column-stacking vectorization and propagates with `exp(dt·ℒ)`.

use num_complex::Complex64;

use super::state::{BiState, BipartiteDynamics, EnvOperator};
use crate::qmath::{
    identity, kron, matrix_exp, max_abs, unvectorize, vectorize, CMatrix, CVector, Superoperator,
};
use crate::{Error, Result};

/// A bipartite Lindblad generator: Hamiltonian plus rated jump operators,
/// all on the full system-environment space.
#[derive(Debug, Clone)]
pub struct GeneralLindbladSpec {
    pub hamiltonian: CMatrix,
    pub jump_operators: Vec<(f64, CMatrix)>,
}

impl GeneralLindbladSpec {
    pub fn validate(&self) -> Result<usize> {
        let dim = self.hamiltonian.nrows();
        if self.hamiltonian.ncols() != dim {
            return Err(Error::DimensionMismatch(
                "Lindblad Hamiltonian must be square".into(),
            ));
        }
        let dev = max_abs(&(&self.hamiltonian - self.hamiltonian.adjoint()));
        if dev > 1e-10 * max_abs(&self.hamiltonian).max(1.0) {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: 1e-10,
            });
        }
        for (rate, v) in &self.jump_operators {
            if *rate < 0.0 || !rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "jump rate {rate} must be nonnegative"
                )));
            }
            if v.nrows() != dim || v.ncols() != dim {
                return Err(Error::DimensionMismatch(
                    "jump operator dimension mismatch".into(),
                ));
            }
        }
        Ok(dim)
    }

    /// Superoperator matrix of the generator.
    pub fn liouvillian(&self) -> Result<Superoperator> {
        let dim = self.validate()?;
        let id = identity(dim);
        let i = Complex64::new(0.0, 1.0);
        let mut l = (kron(&id, &self.hamiltonian) - kron(&self.hamiltonian.transpose(), &id)) * (-i);
        for (rate, v) in &self.jump_operators {
            let r = Complex64::new(*rate, 0.0);
            let vdv = v.adjoint() * v;
            l += (kron(&v.map(|c| c.conj()), v)
                - (kron(&id, &vdv) + kron(&vdv.transpose(), &id)) * Complex64::new(0.5, 0.0))
                * r;
        }
        Superoperator::from_matrix(l, dim)
    }
}

/// Precomputed Lindblad propagation on a fixed bipartite split.
#[derive(Debug, Clone)]
pub struct LindbladCore {
    sys_dim: usize,
    env_dim: usize,
    env0: CMatrix,
    liouvillian: Superoperator,
    /// Set when the generator matrix is diagonal; propagation is then the
    /// exact elementwise exponential.
    diagonal: Option<CVector>,
}

impl LindbladCore {
    pub fn new(
        spec: &GeneralLindbladSpec,
        sys_dim: usize,
        env_dim: usize,
        env0: CMatrix,
    ) -> Result<Self> {
        let dim = spec.validate()?;
        if sys_dim * env_dim != dim {
            return Err(Error::DimensionMismatch(format!(
                "split {sys_dim}x{env_dim} does not match generator dimension {dim}"
            )));
        }
        if env0.nrows() != env_dim || env0.ncols() != env_dim {
            return Err(Error::DimensionMismatch(
                "initial environment state dimension mismatch".into(),
            ));
        }
        let liouvillian = spec.liouvillian()?;
        let lm = liouvillian.matrix();
        let mut offdiag = 0.0f64;
        for i in 0..lm.nrows() {
            for j in 0..lm.ncols() {
                if i != j {
                    offdiag = offdiag.max(lm[(i, j)].norm());
                }
            }
        }
        let diagonal = if offdiag <= 1e-14 * max_abs(lm).max(1.0) {
            Some(lm.diagonal())
        } else {
            None
        };
        Ok(Self {
            sys_dim,
            env_dim,
            env0,
            liouvillian,
            diagonal,
        })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn env0(&self) -> &CMatrix {
        &self.env0
    }

    pub fn liouvillian(&self) -> &Superoperator {
        &self.liouvillian
    }

    pub fn propagate_mat(&self, mat: &CMatrix, dt: f64) -> Result<CMatrix> {
        if dt < 0.0 {
            return Err(Error::InvalidParameter("negative propagation time".into()));
        }
        let dim = self.sys_dim * self.env_dim;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch(
                "state does not match the Lindblad engine".into(),
            ));
        }
        if let Some(diag) = &self.diagonal {
            let mut v = vectorize(mat);
            for (x, l) in v.iter_mut().zip(diag.iter()) {
                *x *= (l * dt).exp();
            }
            unvectorize(&v, dim, dim)
        } else {
            let e = matrix_exp(&(self.liouvillian.matrix() * Complex64::new(dt, 0.0)))?;
            unvectorize(&(&e * vectorize(mat)), dim, dim)
        }
    }
}

/// A user-specified bipartite Lindblad model exposed as an engine.
#[derive(Debug, Clone)]
pub struct GeneralLindbladEngine {
    core: LindbladCore,
}

impl GeneralLindbladEngine {
    pub fn new(
        spec: &GeneralLindbladSpec,
        sys_dim: usize,
        env_dim: usize,
        env0: CMatrix,
    ) -> Result<Self> {
        Ok(Self {
            core: LindbladCore::new(spec, sys_dim, env_dim, env0)?,
        })
    }

    pub fn core(&self) -> &LindbladCore {
        &self.core
    }
}

impl BipartiteDynamics for GeneralLindbladEngine {
    fn system_dim(&self) -> usize {
        self.core.sys_dim
    }

    fn env_dim(&self) -> usize {
        self.core.env_dim
    }

    fn initial_state(&self, sys: &CMatrix) -> Result<BiState> {
        if sys.nrows() != self.core.sys_dim || sys.ncols() != self.core.sys_dim {
            return Err(Error::DimensionMismatch(
                "system factor dimension mismatch".into(),
            ));
        }
        Ok(BiState::Dense {
            mat: kron(sys, &self.core.env0),
            sys_dim: self.core.sys_dim,
            env_dim: self.core.env_dim,
        })
    }

    fn embed_with_env(&self, sys: &CMatrix, env: &EnvOperator) -> Result<BiState> {
        match env {
            EnvOperator::Dense(e) => {
                if e.nrows() != self.core.env_dim {
                    return Err(Error::DimensionMismatch(
                        "environment operator dimension mismatch".into(),
                    ));
                }
                Ok(BiState::Dense {
                    mat: kron(sys, e),
                    sys_dim: self.core.sys_dim,
                    env_dim: self.core.env_dim,
                })
            }
            EnvOperator::SectorDiagonal(_) => Err(Error::Unsupported(
                "sector-diagonal environment on a dense Lindblad engine".into(),
            )),
        }
    }

    fn propagate_bi(&self, state: &BiState, dt: f64) -> Result<BiState> {
        match state {
            BiState::Dense {
                mat,
                sys_dim,
                env_dim,
            } => {
                if *sys_dim != self.core.sys_dim || *env_dim != self.core.env_dim {
                    return Err(Error::DimensionMismatch(
                        "state split does not match the engine".into(),
                    ));
                }
                Ok(BiState::Dense {
                    mat: self.core.propagate_mat(mat, dt)?,
                    sys_dim: *sys_dim,
                    env_dim: *env_dim,
                })
            }
            BiState::Sectors { .. } => Err(Error::Unsupported(
                "sector state on a dense Lindblad engine".into(),
            )),
        }
    }

    fn default_env_states(&self) -> Vec<EnvOperator> {
        default_dense_env_states(self.core.env_dim)
    }
}

pub(crate) fn default_dense_env_states(env_dim: usize) -> Vec<EnvOperator> {
    if env_dim == 1 {
        return vec![EnvOperator::Dense(identity(1))];
    }
    let mut ground = CMatrix::zeros(env_dim, env_dim);
    ground[(0, 0)] = Complex64::new(1.0, 0.0);
    let mixed = identity(env_dim) * Complex64::new(1.0 / env_dim as f64, 0.0);
    let plus = CVector::from_element(env_dim, Complex64::new(1.0 / (env_dim as f64).sqrt(), 0.0));
    vec![
        EnvOperator::Dense(ground),
        EnvOperator::Dense(mixed),
        EnvOperator::Dense(&plus * plus.adjoint()),
    ]
}
