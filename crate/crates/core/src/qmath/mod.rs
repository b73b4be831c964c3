//! Dense complex linear algebra and channel-theoretic primitives.
//!
//! Everything here is pure and reentrant. The vectorization convention is
//! column-stacking throughout: `vec(X A Y) = (Yᵀ ⊗ X) vec(A)`.

mod density;
mod eig;
mod expm;
mod matrix;
mod superop;

pub use density::DensityMatrix;
pub use eig::{herm_eig, herm_eig_with, Spectrum};
pub use expm::matrix_exp;
pub use matrix::{
    all_finite, commutator, identity, kron, max_abs, max_abs_diff, pauli_x, pauli_y, pauli_z,
    partial_trace, trace, trace_norm_general, trace_norm_hermitian, CMatrix, CVector,
};
pub use superop::{
    choi_matrix, choi_min_eigenvalue, is_cp, unvectorize, vectorize, Superoperator,
};

/// Numerical tolerances used when validating states and spectra.
///
/// `degen` is relative to the spectral range of the matrix being
/// diagonalized; the others are absolute.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub degen: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
            degen: 1e-9,
        }
    }
}
