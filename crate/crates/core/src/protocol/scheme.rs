//! Measurement schemes and the DNI (diagonal) intermediate-basis
//! construction.

use crate::measurement::{
    dni_direction, observable_from_bloch, BlochDirection, DichotomicObservable, Outcome,
};
use crate::models::EvolutionEngine;
use crate::qmath::DensityMatrix;
use crate::{Error, Result};

/// The intermediate observable of a three-measurement scheme: fixed, or
/// chosen adaptively as the basis diagonalizing the pre-measurement state.
#[derive(Debug, Clone)]
pub enum IntermediateSpec {
    Fixed(DichotomicObservable),
    DniAdaptive { fallback: BlochDirection },
}

/// Measurements at times `0`, `t`, `t + tau` with the given observables,
/// starting from `initial_state` (maximally mixed unless overridden).
#[derive(Debug, Clone)]
pub struct Scheme {
    pub t: f64,
    pub tau: f64,
    pub obs_x: DichotomicObservable,
    pub intermediate: IntermediateSpec,
    pub obs_z: DichotomicObservable,
    pub initial_state: DensityMatrix,
}

impl Scheme {
    pub fn new(
        t: f64,
        tau: f64,
        obs_x: DichotomicObservable,
        intermediate: IntermediateSpec,
        obs_z: DichotomicObservable,
    ) -> Result<Self> {
        if !t.is_finite() || !tau.is_finite() || t < 0.0 || tau < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scheme times must be finite and nonnegative, got t={t}, tau={tau}"
            )));
        }
        Ok(Self {
            t,
            tau,
            obs_x,
            intermediate,
            obs_z,
            initial_state: DensityMatrix::maximally_mixed(2),
        })
    }

    /// Same scheme with all three observables along one Bloch direction.
    pub fn uniform(t: f64, tau: f64, dir: BlochDirection) -> Result<Self> {
        let obs = observable_from_bloch(dir);
        Scheme::new(
            t,
            tau,
            obs.clone(),
            IntermediateSpec::Fixed(obs.clone()),
            obs,
        )
    }

    pub fn with_initial_state(mut self, rho: DensityMatrix) -> Self {
        self.initial_state = rho;
        self
    }

    /// The intermediate observable this scheme uses on the given engine.
    pub fn resolve_intermediate(&self, engine: &EvolutionEngine) -> Result<DichotomicObservable> {
        match &self.intermediate {
            IntermediateSpec::Fixed(obs) => Ok(obs.clone()),
            IntermediateSpec::DniAdaptive { fallback } => {
                Ok(dni_intermediate(engine, self.t, &self.obs_x, *fallback)?.observable)
            }
        }
    }
}

/// The DNI intermediate basis chosen for a first observable at time `t`.
#[derive(Debug, Clone)]
pub struct DniChoice {
    pub observable: DichotomicObservable,
    pub direction: BlochDirection,
    /// Degeneracy flags of `ρ_{t|x}` for the outcomes `x = +1, -1`.
    pub degenerate: [bool; 2],
}

/// Tolerance on the axis disagreement between the two per-outcome
/// diagonalizing directions.
const DNI_AXIS_TOL: f64 = 1e-6;

/// Diagonalize `ρ_{t|x} = Λ_{t,0}[ρ_x]` for both first outcomes and build
/// the common intermediate observable.
///
/// The two diagonalizing directions are compared as axes (a direction and
/// its antipode generate the same projector pair). If both states are
/// degenerate the fallback axis is used; if exactly one is, the other's axis
/// wins; if they disagree beyond tolerance there is no common diagonal
/// basis and an error is returned.
pub fn dni_intermediate(
    engine: &EvolutionEngine,
    t: f64,
    obs_x: &DichotomicObservable,
    fallback: BlochDirection,
) -> Result<DniChoice> {
    let mut dirs = Vec::with_capacity(2);
    let mut degenerate = [false; 2];
    for x in Outcome::BOTH {
        let rho_tx = DensityMatrix::new(engine.system_map_raw(obs_x.projector(x), t)?)?;
        let d = dni_direction(&rho_tx, fallback)?;
        degenerate[x.index()] = d.degenerate;
        dirs.push(d.direction);
    }
    let direction = match degenerate {
        [true, true] => fallback.canonical_axis(),
        [true, false] => dirs[1].canonical_axis(),
        [false, true] => dirs[0].canonical_axis(),
        [false, false] => {
            let angle = dirs[0].axis_angle_to(&dirs[1]);
            if angle > DNI_AXIS_TOL {
                return Err(Error::BasisDisagreement {
                    angle,
                    tolerance: DNI_AXIS_TOL,
                });
            }
            dirs[0].canonical_axis()
        }
    };
    Ok(DniChoice {
        observable: observable_from_bloch(direction),
        direction,
        degenerate,
    })
}

/// Build the full DNI scheme: measurements `obs_x` at 0 and `obs_z` at
/// `t + tau`, with the intermediate basis diagonalizing `ρ_{t|x}`.
pub fn dni_scheme(
    engine: &EvolutionEngine,
    t: f64,
    tau: f64,
    obs_x: DichotomicObservable,
    obs_z: DichotomicObservable,
    fallback: BlochDirection,
) -> Result<Scheme> {
    let choice = dni_intermediate(engine, t, &obs_x, fallback)?;
    Scheme::new(
        t,
        tau,
        obs_x,
        IntermediateSpec::Fixed(choice.observable),
        obs_z,
    )
}
