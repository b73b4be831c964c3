use super::matrix::{all_finite, CMatrix};
use crate::{Error, Result};

/// Matrix exponential by Padé scaling-and-squaring.
///
/// Relative accuracy is at the 1e-12 level for operator norms up to ~50;
/// non-finite results (overflow far beyond that range) are signalled as an
/// error rather than returned.
pub fn matrix_exp(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix_exp: {}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let e = m.exp();
    if !all_finite(&e) {
        return Err(Error::NonFinite("matrix_exp"));
    }
    Ok(e)
}
