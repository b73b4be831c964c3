use num_complex::Complex64;

use super::matrix::{identity, max_abs, CMatrix, CVector};
use crate::{Error, Result};

/// Column-stacking vectorization: `vec(m)[j·rows + i] = m[i,j]`.
pub fn vectorize(m: &CMatrix) -> CVector {
    let (r, c) = (m.nrows(), m.ncols());
    let mut v = CVector::zeros(r * c);
    for j in 0..c {
        for i in 0..r {
            v[j * r + i] = m[(i, j)];
        }
    }
    v
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "unvectorize: vector of length {} cannot fill {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = v[j * rows + i];
        }
    }
    Ok(m)
}

/// A linear map on operators of a `dim`-dimensional space, stored as a
/// `dim² × dim²` matrix acting on column-vectorized operators.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    mat: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(mat: CMatrix, dim: usize) -> Result<Self> {
        if mat.nrows() != dim * dim || mat.ncols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on dim {} must be {}x{}, got {}x{}",
                dim,
                dim * dim,
                dim * dim,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { dim, mat })
    }

    /// Build the matrix of a map by applying it to the operator basis
    /// `|i⟩⟨j|`.
    pub fn from_map(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let d2 = dim * dim;
        let mut mat = CMatrix::zeros(d2, d2);
        for j in 0..dim {
            for i in 0..dim {
                let mut basis = CMatrix::zeros(dim, dim);
                basis[(i, j)] = Complex64::new(1.0, 0.0);
                let out = vectorize(&f(&basis));
                mat.set_column(j * dim + i, &out);
            }
        }
        Self { dim, mat }
    }

    /// The map `ρ ↦ x ρ y`.
    pub fn from_sandwich(x: &CMatrix, y: &CMatrix) -> Self {
        let dim = x.nrows();
        Self {
            dim,
            mat: y.transpose().kronecker(x),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator expects {}x{} operators, got {}x{}",
                self.dim,
                self.dim,
                rho.nrows(),
                rho.ncols()
            )));
        }
        unvectorize(&(&self.mat * vectorize(rho)), self.dim, self.dim)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "superoperator composition with mismatched dims".into(),
            ));
        }
        Ok(Superoperator {
            dim: self.dim,
            mat: &self.mat * &other.mat,
        })
    }

    /// Max-norm deviation from trace preservation: `‖S†vec(I) - vec(I)‖_max`.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let vid = vectorize(&identity(self.dim));
        let lhs = self.mat.adjoint() * &vid;
        (lhs - vid).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Checks `Tr(S[ρ]) = Tr(ρ)`, i.e. `vec(I)† S = vec(I)†`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_deviation() <= tol
    }
}

/// Smallest eigenvalue of the (symmetrized) Choi matrix; at or above zero
/// for CP maps.
pub fn choi_min_eigenvalue(s: &Superoperator) -> crate::Result<f64> {
    let choi = choi_matrix(s);
    let herm = (&choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
    let spec = super::herm_eig(&herm)?;
    Ok(*spec.eigenvalues.last().unwrap())
}

/// Choi matrix `C = Σ_ij |i⟩⟨j| ⊗ S[|i⟩⟨j|]`.
pub fn choi_matrix(s: &Superoperator) -> CMatrix {
    let d = s.dim();
    let mut choi = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut basis = CMatrix::zeros(d, d);
            basis[(i, j)] = Complex64::new(1.0, 0.0);
            let out = s.apply(&basis).expect("dims match by construction");
            for r in 0..d {
                for c in 0..d {
                    choi[(i * d + r, j * d + c)] = out[(r, c)];
                }
            }
        }
    }
    choi
}

/// Complete positivity: the Choi matrix is Hermitian with smallest eigenvalue
/// above `-tol`.
pub fn is_cp(s: &Superoperator, tol: f64) -> Result<bool> {
    let choi = choi_matrix(s);
    let dev = max_abs(&(&choi - choi.adjoint()));
    if dev > max_abs(&choi).max(1.0) * 1e-10 {
        // A map whose Choi matrix is not Hermitian does not preserve
        // Hermiticity, hence is not CP.
        return Ok(false);
    }
    let herm = (&choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
    let spec = super::herm_eig(&herm)?;
    Ok(*spec.eigenvalues.last().unwrap() >= -tol)
}
