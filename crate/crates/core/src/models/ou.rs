//! Ornstein-Uhlenbeck dephasing noise: exact path sampling, accumulated
//! phases, and the exact Gaussian moments of the integrated noise.
//!
//! The noise has zero mean and correlation
//! `⟨ξ(t)ξ(t')⟩ = (γ/2τ_c) exp(-|t-t'|/τ_c)`. A qubit driven by
//! `-i ξ(t)[σ_z, ρ]` picks up the phase `φ(t) = ∫₀ᵗ ξ dt'` on its
//! coherence, so every outcome probability is a Gaussian average of
//! `exp(i(aΦ₁ + bΦ₂))` with `Φ₁ = 2φ(t)` and `Φ₂ = 2(φ(t+τ) - φ(t))`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::qmath::CMatrix;
use crate::{Error, Result};

/// Rate `gamma` and correlation time `tau_c` of the OU dephasing noise.
#[derive(Debug, Clone, Copy)]
pub struct OuNoiseParams {
    pub gamma: f64,
    pub tau_c: f64,
}

impl OuNoiseParams {
    pub fn new(gamma: f64, tau_c: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "OU gamma must be positive, got {gamma}"
            )));
        }
        if !tau_c.is_finite() || tau_c < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "OU tau_c must be nonnegative, got {tau_c}"
            )));
        }
        Ok(Self { gamma, tau_c })
    }

    /// Stationary standard deviation `sqrt(γ/2τ_c)`.
    pub fn stationary_sigma(&self) -> f64 {
        (self.gamma / (2.0 * self.tau_c)).sqrt()
    }
}

/// Variance of `Φ = 2∫₀ᵗ ξ dt'`: `4γ(t - τ_c(1 - e^{-t/τ_c}))`.
pub fn ou_phase_variance(params: &OuNoiseParams, t: f64) -> f64 {
    if params.tau_c == 0.0 {
        return 4.0 * params.gamma * t;
    }
    let x = t / params.tau_c;
    4.0 * params.gamma * (t - params.tau_c * (1.0 - (-x).exp()))
}

/// Coherence decay `d(t) = exp(-V(t)/2) = exp[-2γ(t - τ_c(1 - e^{-t/τ_c}))]`.
pub fn ou_decay(params: &OuNoiseParams, t: f64) -> f64 {
    (-0.5 * ou_phase_variance(params, t)).exp()
}

/// Exact second moments of the doubled phases over `[0,t]` and `[t,t+τ]`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianMoments {
    /// Var(Φ₁), Φ₁ = 2∫₀ᵗ ξ.
    pub v1: f64,
    /// Var(Φ₂), Φ₂ = 2∫ₜ^{t+τ} ξ.
    pub v2: f64,
    /// Cov(Φ₁, Φ₂).
    pub cov: f64,
}

impl GaussianMoments {
    /// `E[exp(i(aΦ₁ + bΦ₂))]` for integer multiples of the two phases.
    pub fn characteristic(&self, a: i32, b: i32) -> f64 {
        let (a, b) = (a as f64, b as f64);
        (-0.5 * (a * a * self.v1 + 2.0 * a * b * self.cov + b * b * self.v2)).exp()
    }
}

pub fn ou_gaussian_moments(params: &OuNoiseParams, t: f64, tau: f64) -> Result<GaussianMoments> {
    if t < 0.0 || tau < 0.0 {
        return Err(Error::InvalidParameter(
            "ou_gaussian_moments needs t, tau >= 0".into(),
        ));
    }
    let v1 = ou_phase_variance(params, t);
    let v2 = ou_phase_variance(params, tau);
    let cov = if params.tau_c == 0.0 {
        0.0
    } else {
        2.0 * params.gamma
            * params.tau_c
            * (1.0 - (-t / params.tau_c).exp())
            * (1.0 - (-tau / params.tau_c).exp())
    };
    Ok(GaussianMoments { v1, v2, cov })
}

/// One noise realization sampled on a refined grid, with trapezoid-rule
/// accumulated phases. Deterministic in `(params, grid, seed, stream)`.
#[derive(Debug, Clone)]
pub struct NoisePath {
    times: Vec<f64>,
    values: Vec<f64>,
    phases: Vec<f64>,
    /// Index into the refined arrays for each requested grid time.
    marks: Vec<usize>,
    seed: u64,
}

impl NoisePath {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Value of ξ at the i-th requested grid time.
    pub fn value_at_mark(&self, i: usize) -> f64 {
        self.values[self.marks[i]]
    }

    /// Accumulated phase `φ = ∫₀ᵗ ξ` at the i-th requested grid time.
    pub fn phase_at_mark(&self, i: usize) -> f64 {
        self.phases[self.marks[i]]
    }
}

/// Substep bound `min(τ_c, 1/γ)/50` for phase integration.
fn max_substep(params: &OuNoiseParams) -> f64 {
    params.tau_c.min(1.0 / params.gamma) / 50.0
}

pub fn ou_sample_path(params: &OuNoiseParams, grid: &[f64], seed: u64) -> Result<NoisePath> {
    ou_sample_path_stream(params, grid, seed, 0)
}

/// Sample one path on substream `stream` of the master `seed`. Results do
/// not depend on which other streams are sampled or in what order.
pub fn ou_sample_path_stream(
    params: &OuNoiseParams,
    grid: &[f64],
    seed: u64,
    stream: u64,
) -> Result<NoisePath> {
    if params.tau_c == 0.0 {
        return Err(Error::InvalidParameter(
            "tau_c = 0 is white noise; use the Markov dephasing engine".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty sampling grid".into()));
    }
    let mut prev = 0.0;
    for &t in grid {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid times must be finite and nonnegative, got {t}"
            )));
        }
        if t < prev {
            return Err(Error::InvalidParameter(
                "grid times must be nondecreasing".into(),
            ));
        }
        prev = t;
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let sigma = params.stationary_sigma();
    let h_max = max_substep(params);

    let mut times = vec![0.0];
    let mut values = vec![sigma * rng.sample::<f64, _>(StandardNormal)];
    let mut phases = vec![0.0];
    let mut marks = Vec::with_capacity(grid.len());

    for &t in grid {
        let t0 = *times.last().unwrap();
        let span = t - t0;
        if span <= 0.0 {
            marks.push(times.len() - 1);
            continue;
        }
        let nsub = (span / h_max).ceil().max(1.0) as usize;
        let h = span / nsub as f64;
        let decay = (-h / params.tau_c).exp();
        let innov = sigma * (1.0 - decay * decay).sqrt();
        for k in 1..=nsub {
            let xi_prev = *values.last().unwrap();
            let xi = xi_prev * decay + innov * rng.sample::<f64, _>(StandardNormal);
            let phi = *phases.last().unwrap() + 0.5 * h * (xi_prev + xi);
            times.push(t0 + h * k as f64);
            values.push(xi);
            phases.push(phi);
        }
        marks.push(times.len() - 1);
    }

    Ok(NoisePath {
        times,
        values,
        phases,
        marks,
        seed,
    })
}

/// Monte Carlo ensemble of OU dephasing realizations.
///
/// Path `p` draws from substream `p` of the master seed, so ensemble
/// averages are independent of worker count and execution order.
#[derive(Debug, Clone)]
pub struct OuMonteCarlo {
    pub params: OuNoiseParams,
    pub samples: usize,
    pub seed: u64,
}

/// Paths per reduction chunk; chunk sums are combined in index order so the
/// floating-point result is identical for any parallelism.
const MC_CHUNK: usize = 256;

impl OuMonteCarlo {
    pub fn new(params: OuNoiseParams, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter(
                "Monte Carlo engine needs at least one sample".into(),
            ));
        }
        if params.tau_c == 0.0 {
            return Err(Error::InvalidParameter(
                "tau_c = 0 is white noise; use the Markov dephasing engine".into(),
            ));
        }
        Ok(Self {
            params,
            samples,
            seed,
        })
    }

    /// Deterministic parallel ensemble mean: `f` adds each path's
    /// contribution into an accumulator of length `dim`.
    pub fn mean_over_paths(
        &self,
        grid: &[f64],
        dim: usize,
        f: impl Fn(&NoisePath, &mut [f64]) + Sync,
    ) -> Result<Vec<f64>> {
        let chunks = self.samples.div_ceil(MC_CHUNK);
        let partials: Vec<Result<Vec<f64>>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * MC_CHUNK;
                let hi = ((c + 1) * MC_CHUNK).min(self.samples);
                let mut acc = vec![0.0; dim];
                for p in lo..hi {
                    let path = ou_sample_path_stream(&self.params, grid, self.seed, p as u64)?;
                    f(&path, &mut acc);
                }
                Ok(acc)
            })
            .collect();
        let mut total = vec![0.0; dim];
        for part in partials {
            let part = part?;
            for (t, p) in total.iter_mut().zip(&part) {
                *t += p;
            }
        }
        let inv = 1.0 / self.samples as f64;
        total.iter_mut().for_each(|x| *x *= inv);
        Ok(total)
    }

    /// Ensemble mean of `exp(-2iφ(t))` at each grid time: the coherence
    /// decay factor of the averaged dynamics.
    pub fn mean_phase_factor(&self, grid: &[f64]) -> Result<Vec<Complex64>> {
        let dim = 2 * grid.len();
        let raw = self.mean_over_paths(grid, dim, |path, acc| {
            for i in 0..acc.len() / 2 {
                let phase = -2.0 * path.phase_at_mark(i);
                acc[2 * i] += phase.cos();
                acc[2 * i + 1] += phase.sin();
            }
        })?;
        Ok((0..grid.len())
            .map(|i| Complex64::new(raw[2 * i], raw[2 * i + 1]))
            .collect())
    }
}

/// Exact Gaussian evaluation of the averaged OU dynamics.
#[derive(Debug, Clone, Copy)]
pub struct OuGaussianExact {
    pub params: OuNoiseParams,
}

impl OuGaussianExact {
    pub fn new(params: OuNoiseParams) -> Self {
        Self { params }
    }
}

/// Scale the off-diagonal elements of a qubit matrix: `m01 ↦ factor·m01`,
/// `m10 ↦ conj(factor)·m10`. With `factor = exp(-2iφ)` this is conjugation
/// by `exp(-iφσ_z)`; with a real factor it is the averaged dephasing map.
pub fn dephase(m: &CMatrix, factor: Complex64) -> CMatrix {
    let mut out = m.clone();
    out[(0, 1)] *= factor;
    out[(1, 0)] *= factor.conj();
    out
}
