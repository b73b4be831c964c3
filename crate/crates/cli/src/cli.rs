//! Command-line surface of the experiment runner.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "invlab",
    version,
    about = "Three-time measurement protocols on open qubit dynamics: \
             coherence decay, invasiveness, DNI tests, and Leggett-Garg sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence decay d(t): analytic vs numeric per grid time.
    Coherence(RunArgs),
    /// Invasiveness distance I(t,τ) of the three-measurement protocol.
    Invasiveness(RunArgs),
    /// Leggett-Garg parameter K(t,t), optionally with a χ/γ threshold scan.
    Lgi(LgiArgs),
    /// Full 8-entry P₃ tables per grid point.
    P3Dump(RunArgs),
    /// Markovianity, superclassicality, discord, and channel checks.
    Checks(RunArgs),
    /// Render a CSV produced by the other subcommands as a line-plot SVG.
    Plot(PlotArgs),
}

/// Shared flags; every config-file key has a same-named flag and flags win.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Master seed for every stochastic component.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Monte Carlo sample count (ou-mc model).
    #[arg(long)]
    pub samples: Option<usize>,

    /// Output CSV/JSON path (bare names land in $INVLAB_OUT_DIR when set).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Pass/fail tolerance used by the checks.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Worker threads (results are identical for any count).
    #[arg(long)]
    pub threads: Option<usize>,

    /// Model kind: markov | ou-mc | ou-exact | spin-bath | dissipative.
    #[arg(long)]
    pub model: Option<String>,

    /// Dephasing rate γ (markov, ou, dissipative).
    #[arg(long)]
    pub gamma: Option<f64>,

    /// OU correlation time τ_c.
    #[arg(long = "tau-c")]
    pub tau_c: Option<f64>,

    /// Spin-bath coupling g.
    #[arg(long)]
    pub g: Option<f64>,

    /// Dissipative coupling χ.
    #[arg(long)]
    pub chi: Option<f64>,

    /// Environment size: bath spins (spin-bath) or total qubits
    /// (dissipative).
    #[arg(long)]
    pub n: Option<usize>,

    /// Engine path for the bipartite models: structured | dense.
    #[arg(long)]
    pub engine: Option<String>,

    /// First observable as 'theta,phi'.
    #[arg(long)]
    pub first: Option<String>,

    /// Intermediate observable: 'theta,phi' or 'dni'.
    #[arg(long)]
    pub intermediate: Option<String>,

    /// Last observable as 'theta,phi'.
    #[arg(long)]
    pub last: Option<String>,

    /// Fallback direction for the DNI basis on degenerate states.
    #[arg(long)]
    pub fallback: Option<String>,

    /// Start of the t grid.
    #[arg(long = "t-start")]
    pub t_start: Option<f64>,

    /// End of the t grid.
    #[arg(long = "t-stop")]
    pub t_stop: Option<f64>,

    /// Number of t grid points.
    #[arg(long)]
    pub steps: Option<usize>,

    /// τ mode: 'equal', a fixed value, or 'start,stop,steps'.
    #[arg(long)]
    pub tau: Option<String>,
}

#[derive(Debug, Args)]
pub struct LgiArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Scan χ/γ for the smallest coupling with max_t K(t,t) > 1, for each
    /// environment oscillator count n̄ up to --nbar-max.
    #[arg(long = "scan-chi")]
    pub scan_chi: bool,

    /// Largest n̄ included in the threshold scan.
    #[arg(long = "nbar-max", default_value_t = 6)]
    pub nbar_max: usize,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV file produced by a run subcommand.
    pub input: PathBuf,

    /// Output SVG path.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Column used for the x axis (default: first column).
    #[arg(long)]
    pub x: Option<String>,

    /// Columns to draw (default: every non-x column).
    #[arg(long)]
    pub y: Vec<String>,
}
