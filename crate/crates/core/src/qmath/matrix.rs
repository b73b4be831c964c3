use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ],
    )
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Kronecker product `a ⊗ b`, with
/// `(a ⊗ b)[(i·rb + k), (j·cb + l)] = a[i,j] · b[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace of an operator on a tensor-product space.
///
/// `dims` are the factor dimensions in tensor order and `keep` the indices of
/// the factors retained in the output (in their original order). The traced
/// factors are summed over equal row/column indices, so the trace of the
/// input is preserved.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch(format!(
            "partial_trace: operator is {}x{} but dims {:?} give {}",
            m.nrows(),
            m.ncols(),
            dims,
            total
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidParameter(
            "partial_trace: keep set must be nonempty".into(),
        ));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::InvalidParameter(format!(
                "partial_trace: keep index {} out of range for {} factors",
                k,
                dims.len()
            )));
        }
        if seen[k] {
            return Err(Error::InvalidParameter(format!(
                "partial_trace: keep index {} repeated",
                k
            )));
        }
        seen[k] = true;
    }

    // Strides of each factor in the flattened index (row-major over factors).
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !seen[*i]).collect();
    let keep_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // Offset of a multi-index over the given factors into the full space.
    let offset = |factors: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &f in factors.iter().rev() {
            off += (idx % dims[f]) * strides[f];
            idx /= dims[f];
        }
        off
    };

    let keep_sorted: Vec<usize> = {
        let mut v = keep.to_vec();
        v.sort_unstable();
        v
    };

    let mut out = CMatrix::zeros(keep_dim, keep_dim);
    for a in 0..keep_dim {
        let ra = offset(&keep_sorted, a);
        for b in 0..keep_dim {
            let cb = offset(&keep_sorted, b);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let ot = offset(&traced, t);
                acc += m[(ra + ot, cb + ot)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Trace norm of a Hermitian matrix: sum of |eigenvalues|.
pub fn trace_norm_hermitian(m: &CMatrix) -> Result<f64> {
    let spec = super::herm_eig(m)?;
    Ok(spec.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Trace norm of an arbitrary matrix: sum of singular values, computed from
/// the eigenvalues of `m† m`.
pub fn trace_norm_general(m: &CMatrix) -> Result<f64> {
    let gram = m.adjoint() * m;
    let spec = super::herm_eig(&gram)?;
    Ok(spec
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum())
}
