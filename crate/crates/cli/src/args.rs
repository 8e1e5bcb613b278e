use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Design and verify beam-squint aware codebooks for uniform linear arrays.
#[derive(Debug, Parser)]
#[command(name = "beamsquint", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump beam patterns of one fine beam at several frequencies.
    Pattern(PatternArgs),
    /// Design a minimum-size codebook and export it as JSON.
    Design(DesignArgs),
    /// Certify a codebook file on a dense direction/frequency grid.
    Verify(VerifyArgs),
    /// Minimum codebook size against fractional bandwidth.
    #[command(name = "sweep-b")]
    SweepB(SweepBArgs),
    /// Minimum codebook size against antenna count.
    #[command(name = "sweep-n")]
    SweepN(SweepNArgs),
    /// Fractional-bandwidth and antenna-count feasibility bounds.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Band given either as `b` directly or as carrier plus bandwidth.
#[derive(Debug, Args, Default)]
pub struct BandArgs {
    /// Bandwidth over carrier frequency, in [0, 2).
    #[arg(long)]
    pub fractional_bandwidth: Option<f64>,
    /// Carrier frequency; pair with --bandwidth-ghz.
    #[arg(long)]
    pub carrier_ghz: Option<f64>,
    #[arg(long)]
    pub bandwidth_ghz: Option<f64>,
}

/// Target half-range, as a psi value or an angle.
#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Largest covered psi = sin(theta).
    #[arg(long, default_value_t = 1.0, conflicts_with = "max_angle_deg")]
    pub psi_max: f64,
    /// Largest covered angle from broadside, in degrees.
    #[arg(long)]
    pub max_angle_deg: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub psi_step: Option<f64>,
    #[arg(long)]
    pub xi_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[arg(long)]
    pub antennas: usize,
    #[arg(long, default_value_t = 0.5)]
    pub spacing_ratio: f64,
    /// Beam focus as an angle from broadside, in degrees.
    #[arg(long, conflicts_with = "focus_psi", required_unless_present = "focus_psi")]
    pub focus_deg: Option<f64>,
    /// Beam focus as psi = sin(theta).
    #[arg(long)]
    pub focus_psi: Option<f64>,
    /// Frequency ratios f / f_c.
    #[arg(long, value_delimiter = ',', conflicts_with = "freqs_ghz")]
    pub xi: Vec<f64>,
    /// Absolute frequencies; needs --carrier-ghz.
    #[arg(long, value_delimiter = ',')]
    pub freqs_ghz: Vec<f64>,
    #[arg(long)]
    pub carrier_ghz: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub psi_step: f64,
    #[arg(long, default_value_t = 1.0)]
    pub psi_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Number of antennas N.
    #[arg(long)]
    pub antennas: usize,
    #[arg(long, default_value_t = 0.5)]
    pub spacing_ratio: f64,
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub target: TargetArgs,
    /// Threshold below the peak gain, in dB; 3 means exactly 1/sqrt(2).
    #[arg(long, default_value_t = 3.0)]
    pub threshold_db: f64,
    /// Tile with the kernel's exact threshold width instead of 1.772/N.
    #[arg(long)]
    pub exact_beamwidth: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Codebook JSON produced by `design`.
    #[arg(long)]
    pub codebook: PathBuf,
    /// Overrides the band stored in the codebook.
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0.2)]
    pub slack_db: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepBArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub antennas: Vec<usize>,
    /// Explicit fractional-bandwidth grid.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["b_max", "b_step"])]
    pub b_grid: Vec<f64>,
    /// Uniform grid `0, step, 2 step, ... <= b_max`.
    #[arg(long, requires = "b_step")]
    pub b_max: Option<f64>,
    #[arg(long)]
    pub b_step: Option<f64>,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepNArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [0.0179, 0.0342, 0.0360, 0.0714]
    )]
    pub fractional_bandwidth: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub antennas: Option<usize>,
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
