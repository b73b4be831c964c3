//! Sweep configuration: TOML sections, CLI-flag overrides (flags win), and
//! engine construction.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use invlab::measurement::BlochDirection;
use invlab::models::{
    DissipativeDense, DissipativeParams, DissipativeStructured, EvolutionEngine, MarkovDephasing,
    OuGaussianExact, OuMonteCarlo, OuNoiseParams, SpinBathEngine, SpinBathParams,
};

use crate::cli::RunArgs;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FileConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: Option<String>,
    pub gamma: Option<f64>,
    pub tau_c: Option<f64>,
    pub g: Option<f64>,
    pub chi: Option<f64>,
    pub n: Option<usize>,
    pub engine: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub first: Option<[f64; 2]>,
    pub intermediate: Option<IntermediateSetting>,
    pub last: Option<[f64; 2]>,
    pub fallback: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntermediateSetting {
    Marker(String),
    Angles([f64; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_start: Option<f64>,
    pub t_stop: Option<f64>,
    pub steps: Option<usize>,
    pub tau: Option<TauSetting>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSetting {
    Marker(String),
    Fixed(f64),
    Grid([f64; 3]),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
    pub out: Option<String>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

/// Fully resolved configuration; serialized verbatim into run summaries and
/// hashed into every CSV header.
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub model: ModelConfig,
    pub scheme: SchemeConfig,
    pub grid: GridConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    pub kind: String,
    pub gamma: f64,
    pub tau_c: f64,
    pub g: f64,
    pub chi: f64,
    pub n: usize,
    pub engine: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeConfig {
    pub first: [f64; 2],
    /// `["dni"]` marker or explicit `[theta, phi]`.
    pub intermediate: IntermediateChoice,
    pub last: [f64; 2],
    pub fallback: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", content = "angles")]
pub enum IntermediateChoice {
    #[serde(rename = "dni")]
    Dni,
    #[serde(rename = "fixed")]
    Fixed([f64; 2]),
}

#[derive(Debug, Clone, Serialize)]
pub struct GridConfig {
    pub t_start: f64,
    pub t_stop: f64,
    pub steps: usize,
    pub tau: TauChoice,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", content = "value")]
pub enum TauChoice {
    #[serde(rename = "equal")]
    EqualToT,
    #[serde(rename = "fixed")]
    Fixed(f64),
    #[serde(rename = "grid")]
    Grid([f64; 3]),
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub mc_samples: usize,
    /// Output location: not part of the experiment identity.
    #[serde(skip_serializing)]
    pub out: Option<String>,
    pub tol: f64,
    /// Worker count: execution detail, results do not depend on it.
    #[serde(skip_serializing)]
    pub threads: usize,
}

fn parse_angle_pair(s: &str, what: &str) -> anyhow::Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("{what}: expected 'theta,phi', got '{s}'");
    }
    Ok([
        parts[0].parse().with_context(|| format!("{what} theta"))?,
        parts[1].parse().with_context(|| format!("{what} phi"))?,
    ])
}

impl SweepConfig {
    /// Merge the config file (if any) with command-line overrides; flags
    /// win over file values, which win over defaults.
    pub fn resolve(args: &RunArgs) -> anyhow::Result<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => FileConfig::default(),
        };

        let kind = args
            .model
            .clone()
            .or(file.model.kind)
            .unwrap_or_else(|| "markov".into());
        let model = ModelConfig {
            kind,
            gamma: args.gamma.or(file.model.gamma).unwrap_or(1.0),
            tau_c: args.tau_c.or(file.model.tau_c).unwrap_or(1.0),
            g: args.g.or(file.model.g).unwrap_or(1.0),
            chi: args.chi.or(file.model.chi).unwrap_or(0.0),
            n: args.n.or(file.model.n).unwrap_or(4),
            engine: args
                .engine
                .clone()
                .or(file.model.engine)
                .unwrap_or_else(|| "structured".into()),
        };

        let first = match &args.first {
            Some(s) => parse_angle_pair(s, "--first")?,
            None => file
                .scheme
                .first
                .unwrap_or([std::f64::consts::FRAC_PI_2, 0.0]),
        };
        let last = match &args.last {
            Some(s) => parse_angle_pair(s, "--last")?,
            None => file
                .scheme
                .last
                .unwrap_or([std::f64::consts::FRAC_PI_2, 0.0]),
        };
        let fallback = match &args.fallback {
            Some(s) => parse_angle_pair(s, "--fallback")?,
            None => file
                .scheme
                .fallback
                .unwrap_or([std::f64::consts::FRAC_PI_2, 0.0]),
        };
        let intermediate = match &args.intermediate {
            Some(s) if s == "dni" => IntermediateChoice::Dni,
            Some(s) => IntermediateChoice::Fixed(parse_angle_pair(s, "--intermediate")?),
            None => match file.scheme.intermediate {
                Some(IntermediateSetting::Marker(ref m)) if m == "dni" => IntermediateChoice::Dni,
                Some(IntermediateSetting::Marker(ref m)) => {
                    bail!("unknown intermediate marker '{m}' (expected \"dni\" or angles)")
                }
                Some(IntermediateSetting::Angles(a)) => IntermediateChoice::Fixed(a),
                None => IntermediateChoice::Dni,
            },
        };
        let scheme = SchemeConfig {
            first,
            intermediate,
            last,
            fallback,
        };

        let tau = match &args.tau {
            Some(s) if s == "equal" => TauChoice::EqualToT,
            Some(s) if s.contains(',') => {
                let parts: Vec<&str> = s.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    bail!("--tau grid: expected 'start,stop,steps'");
                }
                TauChoice::Grid([
                    parts[0].parse().context("--tau start")?,
                    parts[1].parse().context("--tau stop")?,
                    parts[2].parse().context("--tau steps")?,
                ])
            }
            Some(s) => TauChoice::Fixed(s.parse().context("--tau")?),
            None => match file.grid.tau {
                Some(TauSetting::Marker(ref m)) if m == "equal" => TauChoice::EqualToT,
                Some(TauSetting::Marker(ref m)) => bail!("unknown tau marker '{m}'"),
                Some(TauSetting::Fixed(v)) => TauChoice::Fixed(v),
                Some(TauSetting::Grid(g)) => TauChoice::Grid(g),
                None => TauChoice::EqualToT,
            },
        };
        let grid = GridConfig {
            t_start: args.t_start.or(file.grid.t_start).unwrap_or(0.0),
            t_stop: args.t_stop.or(file.grid.t_stop).unwrap_or(3.0),
            steps: args.steps.or(file.grid.steps).unwrap_or(61),
            tau,
        };

        let run = RunConfig {
            seed: args.seed.or(file.run.seed).unwrap_or(7),
            mc_samples: args.samples.or(file.run.mc_samples).unwrap_or(100_000),
            out: args
                .out
                .as_ref()
                .map(|p| p.to_string_lossy().into_owned())
                .or(file.run.out),
            tol: args.tol.or(file.run.tol).unwrap_or(1e-9),
            threads: args.threads.or(file.run.threads).unwrap_or(1),
        };

        let config = SweepConfig {
            model,
            scheme,
            grid,
            run,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.grid.steps < 2 {
            bail!("grid needs at least 2 steps, got {}", self.grid.steps);
        }
        if !self.grid.t_stop.is_finite()
            || !self.grid.t_start.is_finite()
            || self.grid.t_stop <= self.grid.t_start
            || self.grid.t_start < 0.0
        {
            bail!(
                "grid must satisfy 0 <= t_start < t_stop, got [{}, {}]",
                self.grid.t_start,
                self.grid.t_stop
            );
        }
        if let TauChoice::Grid([start, stop, steps]) = self.grid.tau {
            if steps < 2.0 || !start.is_finite() || !stop.is_finite() || stop <= start || start < 0.0 {
                bail!("tau grid must satisfy 0 <= start < stop with steps >= 2");
            }
        }
        if self.model.kind == "ou-mc" && self.run.mc_samples < 1000 {
            bail!(
                "the Monte Carlo engine needs mc_samples >= 1000, got {}",
                self.run.mc_samples
            );
        }
        if self.run.threads == 0 {
            bail!("threads must be at least 1");
        }
        match self.model.kind.as_str() {
            "markov" | "ou-mc" | "ou-exact" | "spin-bath" | "dissipative" => Ok(()),
            other => bail!(
                "unknown model kind '{other}' \
                 (expected markov | ou-mc | ou-exact | spin-bath | dissipative)"
            ),
        }
    }

    pub fn build_engine(&self) -> anyhow::Result<EvolutionEngine> {
        let m = &self.model;
        let engine = match m.kind.as_str() {
            "markov" => EvolutionEngine::MarkovDephasing(MarkovDephasing::new(m.gamma)?),
            "ou-mc" => EvolutionEngine::OuMonteCarlo(OuMonteCarlo::new(
                OuNoiseParams::new(m.gamma, m.tau_c)?,
                self.run.mc_samples,
                self.run.seed,
            )?),
            "ou-exact" => EvolutionEngine::OuGaussianExact(OuGaussianExact::new(
                OuNoiseParams::new(m.gamma, m.tau_c)?,
            )),
            "spin-bath" => {
                let params = SpinBathParams::new(m.g, m.n)?;
                EvolutionEngine::SpinBath(match m.engine.as_str() {
                    "dense" => SpinBathEngine::dense(params)?,
                    "structured" => SpinBathEngine::structured(params)?,
                    other => bail!("unknown engine path '{other}' (structured | dense)"),
                })
            }
            "dissipative" => {
                let params = DissipativeParams::new(m.gamma, m.chi, m.n)?;
                match m.engine.as_str() {
                    "dense" => EvolutionEngine::DissipativeDense(DissipativeDense::new(params)?),
                    "structured" => {
                        EvolutionEngine::DissipativeStructured(DissipativeStructured::new(params)?)
                    }
                    other => bail!("unknown engine path '{other}' (structured | dense)"),
                }
            }
            other => bail!("unknown model kind '{other}'"),
        };
        Ok(engine)
    }

    pub fn first_direction(&self) -> anyhow::Result<BlochDirection> {
        Ok(BlochDirection::new(self.scheme.first[0], self.scheme.first[1])?)
    }

    pub fn last_direction(&self) -> anyhow::Result<BlochDirection> {
        Ok(BlochDirection::new(self.scheme.last[0], self.scheme.last[1])?)
    }

    pub fn fallback_direction(&self) -> anyhow::Result<BlochDirection> {
        Ok(BlochDirection::new(
            self.scheme.fallback[0],
            self.scheme.fallback[1],
        )?)
    }

    /// The t grid (always) and the τ values per point according to the tau
    /// mode: one (t, τ) pair per row for `equal`/`fixed`, the cartesian
    /// product for an explicit τ grid.
    pub fn time_points(&self) -> Vec<(f64, f64)> {
        let ts = linspace(self.grid.t_start, self.grid.t_stop, self.grid.steps);
        match self.grid.tau {
            TauChoice::EqualToT => ts.iter().map(|&t| (t, t)).collect(),
            TauChoice::Fixed(tau) => ts.iter().map(|&t| (t, tau)).collect(),
            TauChoice::Grid([start, stop, steps]) => {
                let taus = linspace(start, stop, steps as usize);
                let mut out = Vec::with_capacity(ts.len() * taus.len());
                for &t in &ts {
                    for &tau in &taus {
                        out.push((t, tau));
                    }
                }
                out
            }
        }
    }

    /// Canonical serialization hash embedded in every output header.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        hex_string(&hasher.finalize())
    }

    /// Resolve the output path: explicit paths win; bare file names land in
    /// `$INVLAB_OUT_DIR` when that is set.
    pub fn output_path(&self, default_name: &str) -> PathBuf {
        let name = self
            .run
            .out
            .clone()
            .unwrap_or_else(|| default_name.to_string());
        let path = PathBuf::from(&name);
        if path.is_absolute() || name.contains(std::path::MAIN_SEPARATOR) {
            return path;
        }
        match std::env::var_os("INVLAB_OUT_DIR") {
            Some(dir) => Path::new(&dir).join(path),
            None => path,
        }
    }
}

pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![start];
    }
    let h = (stop - start) / (steps - 1) as f64;
    (0..steps).map(|k| start + h * k as f64).collect()
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn usage_error(e: anyhow::Error) -> anyhow::Error {
    anyhow!("usage error: {e:#}")
}
