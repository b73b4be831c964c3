//! Projective qubit measurements: observables from Bloch directions,
//! selective and non-selective state updates, and the construction of the
//! diagonal (DNI) measurement basis.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::qmath::{
    herm_eig, identity, pauli_x, pauli_y, pauli_z, trace, CMatrix, DensityMatrix,
};
use crate::{Error, Result};

/// Measurement outcome of a dichotomic observable, valued ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    /// Table index: Plus → 0, Minus → 1.
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_index(i: usize) -> Outcome {
        if i == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// A direction on the Bloch sphere given by polar angles, with
/// `n̂ = (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDirection {
    theta: f64,
    phi: f64,
}

impl BlochDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("non-finite Bloch angles".into()));
        }
        if !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside [0, π]"
            )));
        }
        let phi = phi.rem_euclid(TAU);
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi,
        })
    }

    pub fn x_axis() -> Self {
        Self {
            theta: PI / 2.0,
            phi: 0.0,
        }
    }

    pub fn y_axis() -> Self {
        Self {
            theta: PI / 2.0,
            phi: PI / 2.0,
        }
    }

    pub fn z_axis() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }

    /// Direction of a (not necessarily normalized) vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "cannot take the direction of a zero vector".into(),
            ));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Self::new(theta, phi)
    }

    /// Angle between the *axes* defined by two directions, ignoring the
    /// antipodal flip (a direction and its opposite define the same
    /// measurement basis).
    pub fn axis_angle_to(&self, other: &BlochDirection) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
            .abs()
            .clamp(0.0, 1.0);
        dot.acos()
    }

    /// Canonical axis representative: flipped, if needed, into the
    /// hemisphere with positive z (then x, then y) component.
    pub fn canonical_axis(&self) -> BlochDirection {
        let u = self.unit_vector();
        let tol = 1e-12;
        let flip = if u[2] > tol {
            false
        } else if u[2] < -tol {
            true
        } else if u[0] > tol {
            false
        } else if u[0] < -tol {
            true
        } else {
            u[1] < 0.0
        };
        let v = if flip { [-u[0], -u[1], -u[2]] } else { u };
        BlochDirection::from_vector(v).expect("unit vector")
    }
}

/// A dichotomic projective observable with outcomes ±1.
///
/// The +1 projector is the one whose Bloch vector aligns with the defining
/// direction `n̂`; post-measurement states equal the projectors themselves.
#[derive(Debug, Clone)]
pub struct DichotomicObservable {
    plus_projector: CMatrix,
    minus_projector: CMatrix,
    direction: BlochDirection,
}

impl DichotomicObservable {
    pub fn projector(&self, outcome: Outcome) -> &CMatrix {
        match outcome {
            Outcome::Plus => &self.plus_projector,
            Outcome::Minus => &self.minus_projector,
        }
    }

    pub fn direction(&self) -> BlochDirection {
        self.direction
    }

    /// The observable operator `E₊ - E₋ = n̂·σ⃗`.
    pub fn operator(&self) -> CMatrix {
        &self.plus_projector - &self.minus_projector
    }
}

/// `E_± = (I ± n̂·σ⃗)/2` for the given Bloch direction.
pub fn observable_from_bloch(dir: BlochDirection) -> DichotomicObservable {
    let [nx, ny, nz] = dir.unit_vector();
    let n_sigma = pauli_x() * Complex64::new(nx, 0.0)
        + pauli_y() * Complex64::new(ny, 0.0)
        + pauli_z() * Complex64::new(nz, 0.0);
    let half = Complex64::new(0.5, 0.0);
    DichotomicObservable {
        plus_projector: (identity(2) + &n_sigma) * half,
        minus_projector: (identity(2) - n_sigma) * half,
        direction: dir,
    }
}

/// Result of a selective projective measurement.
#[derive(Debug, Clone)]
pub struct SelectiveResult {
    pub probability: f64,
    /// Post-measurement state: the outcome's projector.
    pub post_state: DensityMatrix,
    /// Set when the outcome probability vanished; the post state is still
    /// the projector, by convention.
    pub zero_probability: bool,
}

/// Selective measurement: probability `Tr(E_m ρ)` and collapse onto the
/// outcome projector.
pub fn measure_selective(
    rho: &DensityMatrix,
    obs: &DichotomicObservable,
    outcome: Outcome,
) -> Result<SelectiveResult> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "measure_selective expects a qubit state, got dim {}",
            rho.dim()
        )));
    }
    let probability = trace(&(obs.projector(outcome) * rho.matrix())).re;
    let zero_probability = probability.abs() < 1e-14;
    let post_state = DensityMatrix::new(obs.projector(outcome).clone())?;
    Ok(SelectiveResult {
        probability: probability.max(0.0),
        post_state,
        zero_probability,
    })
}

/// Non-selective update `ρ ↦ Σ_m E_m ρ E_m`.
pub fn nonselective_update(rho: &DensityMatrix, obs: &DichotomicObservable) -> DensityMatrix {
    let mut out = CMatrix::zeros(2, 2);
    for m in Outcome::BOTH {
        let e = obs.projector(m);
        out += e * rho.matrix() * e;
    }
    DensityMatrix::new(out).expect("projective update preserves density-matrix structure")
}

/// Bloch vector `M_î = Tr(σ_i ρ)` of a qubit state.
#[derive(Debug, Clone, Copy)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    bloch_vector_raw(rho.matrix())
}

pub(crate) fn bloch_vector_raw(m: &CMatrix) -> Result<BlochVector> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::DimensionMismatch(
            "bloch_vector expects a 2x2 matrix".into(),
        ));
    }
    Ok(BlochVector {
        x: trace(&(pauli_x() * m)).re,
        y: trace(&(pauli_y() * m)).re,
        z: trace(&(pauli_z() * m)).re,
    })
}

/// Diagonalizing Bloch direction of a qubit state.
#[derive(Debug, Clone, Copy)]
pub struct DniDirection {
    pub direction: BlochDirection,
    /// True when the state was (maximally mixed) degenerate and the fallback
    /// direction was returned.
    pub degenerate: bool,
}

/// Direction of the eigenbasis of `ρ`, aligned with its largest eigenvalue.
///
/// A degenerate (maximally mixed) state commutes with every observable, so
/// the caller-supplied fallback is returned with the flag set.
pub fn dni_direction(rho: &DensityMatrix, fallback: BlochDirection) -> Result<DniDirection> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "dni_direction expects a qubit state".into(),
        ));
    }
    let spec = herm_eig(rho.matrix())?;
    if spec.degenerate {
        return Ok(DniDirection {
            direction: fallback,
            degenerate: true,
        });
    }
    let top = &spec.eigenvectors[0];
    let proj = top * top.adjoint();
    let bv = bloch_vector_raw(&proj)?;
    Ok(DniDirection {
        direction: BlochDirection::from_vector([bv.x, bv.y, bv.z])?,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{commutator, max_abs, max_abs_diff, CVector};
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_x_state() -> DensityMatrix {
        DensityMatrix::new((identity(2) + pauli_x()) * cx(0.5, 0.0)).unwrap()
    }

    #[test]
    fn observables_along_axes_are_paulis() {
        let ox = observable_from_bloch(BlochDirection::x_axis());
        assert!(max_abs_diff(&ox.operator(), &pauli_x()) < 1e-15);
        let oy = observable_from_bloch(BlochDirection::y_axis());
        assert!(max_abs_diff(&oy.operator(), &pauli_y()) < 1e-15);
        let oz = observable_from_bloch(BlochDirection::z_axis());
        assert!(max_abs_diff(&oz.operator(), &pauli_z()) < 1e-15);
    }

    #[test]
    fn projector_algebra_holds() {
        let dir = BlochDirection::new(1.1, 2.3).unwrap();
        let obs = observable_from_bloch(dir);
        let sum = obs.projector(Outcome::Plus) + obs.projector(Outcome::Minus);
        assert!(max_abs_diff(&sum, &identity(2)) < 1e-14);
        for m in Outcome::BOTH {
            let e = obs.projector(m);
            assert!(max_abs_diff(&(e * e), e) < 1e-14);
        }
        let cross = obs.projector(Outcome::Plus) * obs.projector(Outcome::Minus);
        assert!(max_abs(&cross) < 1e-14);
    }

    #[test]
    fn selective_measurement_on_mixed_and_eigenstate() {
        let obs = observable_from_bloch(BlochDirection::x_axis());
        let mixed = DensityMatrix::maximally_mixed(2);
        let r = measure_selective(&mixed, &obs, Outcome::Plus).unwrap();
        assert!((r.probability - 0.5).abs() < 1e-14);
        assert!(max_abs_diff(r.post_state.matrix(), plus_x_state().matrix()) < 1e-14);

        let r2 = measure_selective(&plus_x_state(), &obs, Outcome::Plus).unwrap();
        assert!((r2.probability - 1.0).abs() < 1e-14);
        let r3 = measure_selective(&plus_x_state(), &obs, Outcome::Minus).unwrap();
        assert!(r3.zero_probability);
    }

    #[test]
    fn bloch_vector_landmarks() {
        let bv = bloch_vector(&plus_x_state()).unwrap();
        assert!((bv.x - 1.0).abs() < 1e-14 && bv.y.abs() < 1e-14 && bv.z.abs() < 1e-14);
        let bv0 = bloch_vector(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(bv0.norm() < 1e-14);
    }

    #[test]
    fn dni_direction_landmarks() {
        let ket0 = CVector::from_vec(vec![cx(1.0, 0.0), cx(0.0, 0.0)]);
        let d = dni_direction(&DensityMatrix::pure(&ket0).unwrap(), BlochDirection::x_axis())
            .unwrap();
        assert!(!d.degenerate);
        assert!(d.direction.theta() < 1e-7);

        let mixed = dni_direction(&DensityMatrix::maximally_mixed(2), BlochDirection::x_axis())
            .unwrap();
        assert!(mixed.degenerate);
        assert_eq!(mixed.direction, BlochDirection::x_axis());
    }

    #[test]
    fn nonselective_update_fixes_commuting_states_only() {
        let obs = observable_from_bloch(BlochDirection::x_axis());
        // Commuting: diagonal in x̂.
        let rho =
            DensityMatrix::new((identity(2) + pauli_x() * cx(0.4, 0.0)) * cx(0.5, 0.0)).unwrap();
        let updated = nonselective_update(&rho, &obs);
        assert!(max_abs_diff(updated.matrix(), rho.matrix()) < 1e-14);
        // Non-commuting: diagonal in ẑ.
        let rho_z =
            DensityMatrix::new((identity(2) + pauli_z() * cx(0.4, 0.0)) * cx(0.5, 0.0)).unwrap();
        let updated_z = nonselective_update(&rho_z, &obs);
        assert!(max_abs_diff(updated_z.matrix(), rho_z.matrix()) > 0.1);
    }

    #[test]
    fn axis_angle_ignores_antipodal_flip() {
        let a = BlochDirection::new(PI / 2.0, 0.0).unwrap();
        let b = BlochDirection::new(PI / 2.0, PI).unwrap();
        assert!(a.axis_angle_to(&b) < 1e-12);
        assert!(b.canonical_axis().axis_angle_to(&a) < 1e-12);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(
            theta in 0.0..PI,
            phi in 0.0..TAU,
            sx in -0.57f64..0.57,
            sy in -0.57f64..0.57,
            sz in -0.57f64..0.57,
        ) {
            let rho = DensityMatrix::new(
                (identity(2)
                    + pauli_x() * cx(sx, 0.0)
                    + pauli_y() * cx(sy, 0.0)
                    + pauli_z() * cx(sz, 0.0))
                    * cx(0.5, 0.0),
            )
            .unwrap();
            let obs = observable_from_bloch(BlochDirection::new(theta, phi).unwrap());
            let p: f64 = Outcome::BOTH
                .iter()
                .map(|&m| measure_selective(&rho, &obs, m).unwrap().probability)
                .sum();
            prop_assert!((p - 1.0).abs() < 1e-12);
        }

        #[test]
        fn dni_direction_commutes_with_state(
            sx in -0.5f64..0.5,
            sy in -0.5f64..0.5,
            sz in -0.5f64..0.5,
        ) {
            prop_assume!((sx * sx + sy * sy + sz * sz).sqrt() > 1e-3);
            let rho = DensityMatrix::new(
                (identity(2)
                    + pauli_x() * cx(sx, 0.0)
                    + pauli_y() * cx(sy, 0.0)
                    + pauli_z() * cx(sz, 0.0))
                    * cx(0.5, 0.0),
            )
            .unwrap();
            let d = dni_direction(&rho, BlochDirection::x_axis()).unwrap();
            prop_assert!(!d.degenerate);
            let obs = observable_from_bloch(d.direction);
            let comm = commutator(&obs.operator(), rho.matrix());
            prop_assert!(max_abs(&comm) < 1e-10);
        }
    }
}
