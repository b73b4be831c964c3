use num_complex::Complex64;

use super::matrix::{all_finite, max_abs, CMatrix, CVector};
use super::Tolerances;
use crate::{Error, Result};

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending. Eigenvectors carry a deterministic
/// phase (the largest-magnitude component is made real and positive), so the
/// decomposition is reproducible across runs. Eigenvalues closer than the
/// degeneracy tolerance are grouped into one cluster with a multi-dimensional
/// projector; `degenerate` flags that at least one cluster has multiplicity
/// above one.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
    /// One projector per cluster, in descending eigenvalue order.
    pub projectors: Vec<CMatrix>,
    /// Mean eigenvalue of each cluster.
    pub cluster_values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub degenerate: bool,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Σ_c λ_c Π^c with the cluster mean values.
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for (v, p) in self.cluster_values.iter().zip(&self.projectors) {
            out += p * Complex64::new(*v, 0.0);
        }
        out
    }
}

pub fn herm_eig(h: &CMatrix) -> Result<Spectrum> {
    herm_eig_with(h, &Tolerances::default())
}

pub fn herm_eig_with(h: &CMatrix, tol: &Tolerances) -> Result<Spectrum> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "herm_eig: {}x{} matrix is not square",
            h.nrows(),
            h.ncols()
        )));
    }
    let dev = max_abs(&(h - h.adjoint()));
    let scale = max_abs(h).max(1.0);
    if dev > tol.herm * scale {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol.herm * scale,
        });
    }
    let hermitized = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let se = hermitized.symmetric_eigen();
    if !all_finite(&se.eigenvectors) {
        return Err(Error::NonFinite("herm_eig"));
    }

    let dim = h.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim);
    for &k in &order {
        eigenvalues.push(se.eigenvalues[k]);
        let mut v: CVector = se.eigenvectors.column(k).into_owned();
        v /= Complex64::new(v.norm(), 0.0);
        // Fix the global phase: largest-magnitude component real positive.
        let mut best = 0usize;
        let mut best_mag = 0.0;
        for (i, c) in v.iter().enumerate() {
            let m = c.norm();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = v[best] / Complex64::new(best_mag, 0.0);
            v *= phase.conj();
        }
        eigenvectors.push(v);
    }

    // Cluster near-degenerate eigenvalues. The threshold is relative to the
    // spectral range, with an absolute floor so exact ties always group.
    let range = eigenvalues[0] - eigenvalues[dim - 1];
    let abs_scale = eigenvalues.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let threshold = (tol.degen * range).max(32.0 * f64::EPSILON * abs_scale);

    let mut projectors = Vec::new();
    let mut cluster_values = Vec::new();
    let mut multiplicities = Vec::new();
    let mut start = 0usize;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eigenvalues[end - 1] - eigenvalues[end] <= threshold {
            end += 1;
        }
        let mut proj = CMatrix::zeros(dim, dim);
        for v in &eigenvectors[start..end] {
            proj += v * v.adjoint();
        }
        projectors.push(proj);
        cluster_values
            .push(eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64);
        multiplicities.push(end - start);
        start = end;
    }
    let degenerate = multiplicities.iter().any(|&m| m > 1);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        projectors,
        cluster_values,
        multiplicities,
        degenerate,
    })
}
