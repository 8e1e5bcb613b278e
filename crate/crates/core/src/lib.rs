//! Analog beamforming codebooks for uniform linear arrays under wideband
//! beam squint.
//!
//! - [`array_model`]: steering vectors, fine-beam weights, array gain.
//! - [`squint_model`]: squinted coverage edges, effective beamwidth and a
//!   brute-force coverage oracle.
//! - [`codebook_design`]: minimum-size codebooks with and without squint,
//!   and the bandwidth/antenna-count feasibility bounds.
//! - [`verification`]: grid certification of codebooks and size sweeps.
//! - [`pattern`]: beam pattern tables.
//! - [`codebook_io`]: the codebook JSON format.

pub mod array_model;
pub mod codebook_design;
pub mod codebook_io;
pub mod error;
pub mod exec;
pub mod pattern;
pub mod squint_model;
pub mod verification;

pub use array_model::{
    array_gain_sum, equivalent_aoa, fine_beam_weights, gain_kernel, steering_vector,
    ArrayGeometry, BeamWeights, ComplexGain, PsiAngle,
};
pub use codebook_design::{
    design_no_squint, design_with_squint, max_antennas, max_fractional_bandwidth,
    min_size_no_squint, AntennaBound, Beam, BeamwidthRule, Codebook, CodebookDesigner,
    DesignOutcome, Infeasibility, Parity,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use squint_model::{
    effective_beamwidth, exact_half_power_beamwidth, focus_from_left_edge, half_power_beamwidth,
    numeric_coverage, squinted_coverage, BandSpec, CoverageInterval, GainThreshold, OracleGrid,
};
pub use verification::{
    sweep_size_vs_b, sweep_size_vs_n, verify_codebook, CoverageReport, SweepTable, VerifyOptions,
};
