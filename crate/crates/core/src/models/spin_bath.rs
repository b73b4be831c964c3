//! Spin-bath dephasing: a qubit coupled to `n` environment spins through
//! `H = g σ_z ⊗ Σ_j σ_z^{(j)}`, every bath spin starting maximally mixed.
//!
//! The structured path conditions on the bath magnetization: the generator
//! is diagonal over environment configurations, so the bipartite state stays
//! a sum of system blocks over magnetization sectors with binomial weights,
//! and each block just acquires a sector-dependent phase. The dense path
//! keeps the full `2^(n+1)`-dimensional state and is used as an oracle.

use num_complex::Complex64;

use super::state::{BiState, BipartiteDynamics, EnvOperator};
use crate::qmath::{identity, kron, matrix_exp, max_abs, pauli_z, CMatrix};
use crate::{Error, Result};

/// Coupling rate `g` and environment spin count `n`.
#[derive(Debug, Clone, Copy)]
pub struct SpinBathParams {
    pub g: f64,
    pub n: usize,
}

impl SpinBathParams {
    pub fn new(g: f64, n: usize) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InvalidParameter("spin bath g must be finite".into()));
        }
        if n < 1 {
            return Err(Error::InvalidParameter(
                "spin bath needs at least one environment spin".into(),
            ));
        }
        Ok(Self { g, n })
    }
}

const STRUCTURED_CAP: usize = 14;
const DENSE_CAP: usize = 10;

#[derive(Debug, Clone)]
pub struct SpinBathEngine {
    pub params: SpinBathParams,
    dense: bool,
    /// Binomial sector weights C(n,k)/2^n, k = 0..=n.
    weights: Vec<f64>,
    /// Full Hamiltonian, built for the dense path.
    hamiltonian: Option<CMatrix>,
}

impl SpinBathEngine {
    pub fn structured(params: SpinBathParams) -> Result<Self> {
        Self::structured_with_cap(params, STRUCTURED_CAP)
    }

    pub fn structured_with_cap(params: SpinBathParams, cap: usize) -> Result<Self> {
        if params.n > cap {
            return Err(Error::InvalidParameter(format!(
                "spin bath n = {} exceeds the structured cap {}",
                params.n, cap
            )));
        }
        Ok(Self {
            weights: binomial_weights(params.n),
            params,
            dense: false,
            hamiltonian: None,
        })
    }

    pub fn dense(params: SpinBathParams) -> Result<Self> {
        Self::dense_with_cap(params, DENSE_CAP)
    }

    pub fn dense_with_cap(params: SpinBathParams, cap: usize) -> Result<Self> {
        if params.n > cap {
            return Err(Error::InvalidParameter(format!(
                "spin bath n = {} exceeds the dense cap {}",
                params.n, cap
            )));
        }
        Ok(Self {
            weights: binomial_weights(params.n),
            hamiltonian: Some(build_hamiltonian(&params)),
            params,
            dense: true,
        })
    }

    pub fn is_dense(&self) -> bool {
        self.dense
    }

    /// Magnetization of sector `k`: `n - 2k`.
    fn magnetization(&self, k: usize) -> f64 {
        (self.params.n as f64) - 2.0 * k as f64
    }
}

fn binomial_weights(n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    for i in 1..=n {
        for k in (1..=i).rev() {
            c[k] += c[k - 1];
        }
    }
    let norm = 2.0f64.powi(n as i32);
    c.iter().map(|x| x / norm).collect()
}

/// `H = g σ_z ⊗ Σ_j σ_z^{(j)}` on the full `2^(n+1)` space.
fn build_hamiltonian(params: &SpinBathParams) -> CMatrix {
    let n = params.n;
    let env_dim = 1usize << n;
    let mut env_sum = CMatrix::zeros(env_dim, env_dim);
    for j in 0..n {
        let mut op = identity(1);
        for i in 0..n {
            let factor = if i == j { pauli_z() } else { identity(2) };
            op = kron(&op, &factor);
        }
        env_sum += op;
    }
    kron(&pauli_z(), &env_sum) * Complex64::new(params.g, 0.0)
}

/// Apply the sector phase: conjugation by `exp(-i g dt m σ_z)` scales the
/// 2x2 block's off-diagonals by `exp(∓ 2 i g dt m)`.
fn sector_phase(block: &CMatrix, angle: f64) -> CMatrix {
    let mut out = block.clone();
    let f = Complex64::from_polar(1.0, -2.0 * angle);
    out[(0, 1)] *= f;
    out[(1, 0)] *= f.conj();
    out
}

impl BipartiteDynamics for SpinBathEngine {
    fn system_dim(&self) -> usize {
        2
    }

    fn env_dim(&self) -> usize {
        1usize << self.params.n
    }

    fn initial_state(&self, sys: &CMatrix) -> Result<BiState> {
        if sys.nrows() != 2 || sys.ncols() != 2 {
            return Err(Error::DimensionMismatch(
                "spin bath system factor must be 2x2".into(),
            ));
        }
        if self.dense {
            let env_dim = self.env_dim();
            let env = identity(env_dim) * Complex64::new(1.0 / env_dim as f64, 0.0);
            Ok(BiState::Dense {
                mat: kron(sys, &env),
                sys_dim: 2,
                env_dim,
            })
        } else {
            Ok(BiState::Sectors {
                blocks: self
                    .weights
                    .iter()
                    .map(|w| sys * Complex64::new(*w, 0.0))
                    .collect(),
            })
        }
    }

    fn embed_with_env(&self, sys: &CMatrix, env: &EnvOperator) -> Result<BiState> {
        match (self.dense, env) {
            (true, EnvOperator::Dense(e)) => {
                if e.nrows() != self.env_dim() {
                    return Err(Error::DimensionMismatch(
                        "environment operator dimension mismatch".into(),
                    ));
                }
                Ok(BiState::Dense {
                    mat: kron(sys, e),
                    sys_dim: 2,
                    env_dim: self.env_dim(),
                })
            }
            (false, EnvOperator::SectorDiagonal(alphas)) => {
                if alphas.len() != self.params.n + 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "expected {} sector weights, got {}",
                        self.params.n + 1,
                        alphas.len()
                    )));
                }
                Ok(BiState::Sectors {
                    blocks: alphas.iter().map(|a| sys * *a).collect(),
                })
            }
            _ => Err(Error::Unsupported(
                "environment operator representation does not match the engine path".into(),
            )),
        }
    }

    fn propagate_bi(&self, state: &BiState, dt: f64) -> Result<BiState> {
        if dt < 0.0 {
            return Err(Error::InvalidParameter("negative propagation time".into()));
        }
        match state {
            BiState::Sectors { blocks } => {
                if self.dense || blocks.len() != self.params.n + 1 {
                    return Err(Error::DimensionMismatch(
                        "sector state does not match this engine".into(),
                    ));
                }
                Ok(BiState::Sectors {
                    blocks: blocks
                        .iter()
                        .enumerate()
                        .map(|(k, b)| sector_phase(b, self.params.g * dt * self.magnetization(k)))
                        .collect(),
                })
            }
            BiState::Dense { mat, sys_dim, env_dim } => {
                if !self.dense || *env_dim != self.env_dim() {
                    return Err(Error::DimensionMismatch(
                        "dense state does not match this engine".into(),
                    ));
                }
                let h = self.hamiltonian.as_ref().expect("dense engine has H");
                let u = unitary_exp(h, dt)?;
                Ok(BiState::Dense {
                    mat: &u * mat * u.adjoint(),
                    sys_dim: *sys_dim,
                    env_dim: *env_dim,
                })
            }
        }
    }

    fn default_env_states(&self) -> Vec<EnvOperator> {
        let n = self.params.n;
        if self.dense {
            let dim = self.env_dim();
            let mut ground = CMatrix::zeros(dim, dim);
            ground[(0, 0)] = Complex64::new(1.0, 0.0);
            let mixed = identity(dim) * Complex64::new(1.0 / dim as f64, 0.0);
            // Uniform diagonal state of the middle-magnetization sector,
            // mirroring the structured path's third test state.
            let sector: Vec<usize> = (0..dim).filter(|b| b.count_ones() as usize == n / 2).collect();
            let mut middle = CMatrix::zeros(dim, dim);
            for &b in &sector {
                middle[(b, b)] = Complex64::new(1.0 / sector.len() as f64, 0.0);
            }
            vec![
                EnvOperator::Dense(ground),
                EnvOperator::Dense(mixed),
                EnvOperator::Dense(middle),
            ]
        } else {
            let mut ground = vec![Complex64::new(0.0, 0.0); n + 1];
            ground[0] = Complex64::new(1.0, 0.0);
            let mixed = self
                .weights
                .iter()
                .map(|w| Complex64::new(*w, 0.0))
                .collect();
            let mut middle = vec![Complex64::new(0.0, 0.0); n + 1];
            middle[n / 2] = Complex64::new(1.0, 0.0);
            vec![
                EnvOperator::SectorDiagonal(ground),
                EnvOperator::SectorDiagonal(mixed),
                EnvOperator::SectorDiagonal(middle),
            ]
        }
    }
}

/// `exp(-i dt H)`, using the exact elementwise form when `H` is diagonal.
fn unitary_exp(h: &CMatrix, dt: f64) -> Result<CMatrix> {
    let dim = h.nrows();
    let mut offdiag = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                offdiag = offdiag.max(h[(i, j)].norm());
            }
        }
    }
    if offdiag <= 1e-14 * max_abs(h).max(1.0) {
        let mut u = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            u[(i, i)] = Complex64::from_polar(1.0, -dt * h[(i, i)].re);
        }
        Ok(u)
    } else {
        matrix_exp(&(h * Complex64::new(0.0, -dt)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{max_abs_diff, pauli_x};

    fn plus_x() -> CMatrix {
        (identity(2) + pauli_x()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn binomial_weights_sum_to_one() {
        for n in [1, 4, 9] {
            let w = binomial_weights(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert_eq!(binomial_weights(4), vec![
            1.0 / 16.0,
            4.0 / 16.0,
            6.0 / 16.0,
            4.0 / 16.0,
            1.0 / 16.0
        ]);
    }

    #[test]
    fn structured_coherence_matches_closed_form() {
        for n in [1usize, 4, 10] {
            let eng = SpinBathEngine::structured(SpinBathParams::new(1.0, n).unwrap()).unwrap();
            let state = eng.initial_state(&plus_x()).unwrap();
            for t in [0.2, 0.9, 2.3] {
                let evolved = eng.propagate_bi(&state, t).unwrap();
                let rho = evolved.reduced_system().unwrap();
                let d = 2.0 * rho[(0, 1)].re;
                let expected = (2.0 * t).cos().powi(n as i32);
                assert!(
                    (d - expected).abs() < 1e-10,
                    "n={n} t={t}: {d} vs {expected}"
                );
                assert!(rho[(0, 1)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_agrees_with_structured() {
        let params = SpinBathParams::new(0.8, 3).unwrap();
        let structured = SpinBathEngine::structured(params).unwrap();
        let dense = SpinBathEngine::dense(params).unwrap();
        let sys = plus_x();
        let t = 0.7;
        let rs = structured
            .propagate_bi(&structured.initial_state(&sys).unwrap(), t)
            .unwrap()
            .reduced_system()
            .unwrap();
        let rd = dense
            .propagate_bi(&dense.initial_state(&sys).unwrap(), t)
            .unwrap()
            .reduced_system()
            .unwrap();
        assert!(max_abs_diff(&rs, &rd) < 1e-10);
    }

    #[test]
    fn diagonal_unitary_matches_generic_exp() {
        let params = SpinBathParams::new(0.6, 2).unwrap();
        let h = build_hamiltonian(&params);
        let fast = unitary_exp(&h, 0.9).unwrap();
        let generic = matrix_exp(&(&h * Complex64::new(0.0, -0.9))).unwrap();
        assert!(max_abs_diff(&fast, &generic) < 1e-12);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(SpinBathEngine::structured(SpinBathParams::new(1.0, 15).unwrap()).is_err());
        assert!(SpinBathEngine::dense(SpinBathParams::new(1.0, 11).unwrap()).is_err());
    }
}
