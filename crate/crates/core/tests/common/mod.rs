//! Engine constructors shared by the integration tests.
#![allow(dead_code)]

use invlab::models::*;

pub fn markov(gamma: f64) -> EvolutionEngine {
    EvolutionEngine::MarkovDephasing(MarkovDephasing::new(gamma).unwrap())
}

pub fn ou_gaussian(gamma: f64, tau_c: f64) -> EvolutionEngine {
    EvolutionEngine::OuGaussianExact(OuGaussianExact::new(
        OuNoiseParams::new(gamma, tau_c).unwrap(),
    ))
}

pub fn ou_monte_carlo(gamma: f64, tau_c: f64, samples: usize, seed: u64) -> EvolutionEngine {
    EvolutionEngine::OuMonteCarlo(
        OuMonteCarlo::new(OuNoiseParams::new(gamma, tau_c).unwrap(), samples, seed).unwrap(),
    )
}

pub fn spin_bath(g: f64, n: usize) -> EvolutionEngine {
    EvolutionEngine::SpinBath(SpinBathEngine::structured(SpinBathParams::new(g, n).unwrap()).unwrap())
}

pub fn spin_bath_dense(g: f64, n: usize) -> EvolutionEngine {
    EvolutionEngine::SpinBath(SpinBathEngine::dense(SpinBathParams::new(g, n).unwrap()).unwrap())
}

pub fn dissipative(gamma: f64, chi: f64, n: usize) -> EvolutionEngine {
    EvolutionEngine::DissipativeStructured(
        DissipativeStructured::new(DissipativeParams::new(gamma, chi, n).unwrap()).unwrap(),
    )
}

pub fn dissipative_dense(gamma: f64, chi: f64, n: usize) -> EvolutionEngine {
    EvolutionEngine::DissipativeDense(
        DissipativeDense::new(DissipativeParams::new(gamma, chi, n).unwrap()).unwrap(),
    )
}
