use num_complex::Complex64;

use super::eig::herm_eig_with;
use super::matrix::{all_finite, identity, max_abs, trace, CMatrix, CVector};
use super::Tolerances;
use crate::{Error, Result};

/// A validated density matrix: Hermitian, unit trace, positive semidefinite
/// within the configured tolerances.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::with_tolerances(mat, &Tolerances::default())
    }

    pub fn with_tolerances(mat: CMatrix, tol: &Tolerances) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidDensity(format!(
                "{}x{} matrix is not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !all_finite(&mat) {
            return Err(Error::InvalidDensity("non-finite entries".into()));
        }
        let herm_dev = max_abs(&(&mat - mat.adjoint()));
        if herm_dev > tol.herm {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian: max |ρ - ρ†| = {herm_dev:.3e}"
            )));
        }
        let tr = trace(&mat);
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidDensity(format!(
                "trace is {tr} instead of 1"
            )));
        }
        let spec = herm_eig_with(&mat, tol)?;
        let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol.psd {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: identity(dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn pure(ket: &CVector) -> Result<Self> {
        let norm = ket.norm();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let normalized = ket / Complex64::new(norm, 0.0);
        Ok(Self {
            mat: &normalized * normalized.adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }
}
