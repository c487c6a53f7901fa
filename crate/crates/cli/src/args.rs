use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use wgqed::states::StateFamily;

#[derive(Parser, Debug)]
#[command(
    name = "wgqed",
    version,
    about = "Two-qubit entanglement dynamics in front of a mirror",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Radiative rate γ/2π [MHz, default 5]
    #[arg(long, global = true, value_name = "MHZ")]
    pub gamma: Option<f64>,
    /// Intrinsic loss γ_nr/2π [MHz, default 0.03]
    #[arg(long, global = true, value_name = "MHZ")]
    pub gamma_nr: Option<f64>,
    /// Qubit wavelength over the inter-qubit spacing, λ/x₂
    #[arg(long, global = true, value_name = "X")]
    pub lambda_ratio: Option<f64>,
    /// State parameter f
    #[arg(long = "f", global = true, value_name = "X")]
    pub f: Option<f64>,
    /// Initial state family
    #[arg(long, global = true, value_parser = parse_state)]
    pub state: Option<StateFamily>,
    /// Integration horizon [µs]
    #[arg(long, global = true, value_name = "US")]
    pub t_max: Option<f64>,
    /// Output sample spacing [µs]
    #[arg(long, global = true, value_name = "US")]
    pub sample_dt: Option<f64>,
    /// Relative integration tolerance [default 1e-10]
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML configuration; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for scans [default 1]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

fn parse_state(s: &str) -> Result<StateFamily, String> {
    s.parse().map_err(|e: wgqed::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of relaxation rates and shifts against λ/x₂
    Rates(RatesArgs),
    /// Trajectory of one initial state
    Evolve(EvolveArgs),
    /// Sudden-death grid over f and λ/x₂
    Scan(ScanArgs),
    /// Pseudo-Werner preparation circuit
    Prepare(PrepareArgs),
    /// Mixed single-qubit input from a saturating pulse and free decay
    Mix(MixArgs),
    /// Coplanar waveguide impedance, phase velocity and wavelength ratio
    Cpw(CpwArgs),
}

#[derive(Args, Debug)]
pub struct RatesArgs {
    /// λ/x₂ range as start:stop:step [default 1:3:0.01 unless --lambda-ratio is given]
    #[arg(long)]
    pub range: Option<String>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Qubit detuning Δ/2π [MHz]
    #[arg(long, value_name = "MHZ")]
    pub detuning: Option<f64>,
    /// Extra direct exchange g/2π [MHz]
    #[arg(long, value_name = "MHZ")]
    pub coupling: Option<f64>,
    /// Integrate the full 4×4 density matrix instead of the X-shape subspace
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// f range as start:stop:step
    #[arg(long)]
    pub f_range: Option<String>,
    /// Comma-separated f values (alternative to --f-range)
    #[arg(long)]
    pub f_values: Option<String>,
    /// Comma-separated λ/x₂ values [default: --lambda-ratio]
    #[arg(long)]
    pub lambda_ratios: Option<String>,
}

#[derive(Args, Debug)]
pub struct PrepareArgs {
    /// Run the gates as finite-duration evolutions with intrinsic loss
    #[arg(long)]
    pub dissipative: bool,
    /// a–b exchange strength g/2π [MHz, default 10]
    #[arg(long, value_name = "MHZ")]
    pub g: Option<f64>,
    /// b–c exchange strength g_bc/2π [MHz, default 10]
    #[arg(long, value_name = "MHZ")]
    pub g_bc: Option<f64>,
}

#[derive(Args, Debug)]
pub struct MixArgs {
    /// Rabi frequency Ω/2π [MHz, default 30]
    #[arg(long, value_name = "MHZ")]
    pub omega: Option<f64>,
    /// Pulse length [µs, default 35]
    #[arg(long, value_name = "US")]
    pub pulse: Option<f64>,
    /// Free decay after the pulse [µs]; defaults to the wait reaching --f, else 0
    #[arg(long, value_name = "US")]
    pub wait: Option<f64>,
    /// Swap ground and excited populations at the end
    #[arg(long)]
    pub flip: bool,
}

#[derive(Args, Debug)]
pub struct CpwArgs {
    /// Centre conductor width [µm, default 20]
    #[arg(long, value_name = "UM")]
    pub width: Option<f64>,
    /// Gap to the ground planes [µm, default 8]
    #[arg(long, value_name = "UM")]
    pub gap: Option<f64>,
    /// Substrate permittivity [default 9.8]
    #[arg(long)]
    pub eps_r: Option<f64>,
    /// Qubit frequencies [GHz], comma-separated or repeated
    #[arg(long, value_name = "GHZ", value_delimiter = ',')]
    pub freq: Vec<f64>,
    /// Inter-qubit spacing x₂ [mm, default 18.4]
    #[arg(long, value_name = "MM")]
    pub x2: Option<f64>,
}
