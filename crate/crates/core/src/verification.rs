//! Brute-force certification of codebooks and codebook-size sweeps.
//!
//! Certification samples `[-psi_m, psi_m]` on a fixed grid. At each
//! direction the best beam is the one with the largest band-minimum gain;
//! the codebook passes when that value never drops below the threshold
//! (minus a slack in dB). Per-direction results are computed independently
//! and reduced in grid order, so the report does not depend on scheduling.

use serde::{Deserialize, Serialize};

use crate::array_model::{gain_kernel_abs, max_gain};
use crate::codebook_design::{
    max_antennas, max_fractional_bandwidth, AntennaBound, Codebook, CodebookDesigner,
};
use crate::error::{invalid, Result};
use crate::exec::{map_indexed, Execution};
use crate::squint_model::{
    bisect_boundary, min_gain_over_band, BandSpec, CoverageInterval, OracleGrid,
};

/// Slack for certifying designs built on the `1.772 / N` beamwidth.
pub const DEFAULT_SLACK_DB: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub grid: OracleGrid,
    pub slack_db: f64,
    /// Band to certify against; the codebook's own band when `None`.
    pub band: Option<BandSpec>,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid: OracleGrid::default(),
            slack_db: DEFAULT_SLACK_DB,
            band: None,
            execution: Execution::default(),
        }
    }
}

impl VerifyOptions {
    pub fn with_slack(slack_db: f64) -> Self {
        Self {
            slack_db,
            ..Self::default()
        }
    }
}

/// Outcome of [`verify_codebook`]. Gains are in dB relative to `sqrt(N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub worst_gain_db: f64,
    pub worst_psi: f64,
    pub worst_xi: f64,
    pub threshold_db: f64,
    pub slack_db: f64,
    pub fractional_bandwidth: f64,
    pub gaps: Vec<CoverageInterval>,
    pub pass: bool,
}

impl CoverageReport {
    /// How far the worst direction falls below the bare threshold, in dB.
    /// Zero when the threshold is met everywhere.
    pub fn shortfall_db(&self) -> f64 {
        (self.threshold_db - self.worst_gain_db).max(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct BestBeam {
    gain: f64,
    xi: f64,
}

/// Band-minimum gain of the best beam at `psi_c`.
///
/// Beams are ranked by their gain at one grid frequency, which bounds
/// their band minimum from above; once that bound falls below the best
/// band minimum found, the remaining beams cannot win.
fn best_beam(psi_c: f64, foci: &[f64], n_antennas: usize, xis: &[f64]) -> BestBeam {
    let probe = xis[xis.len() / 2];
    let mut ranked: Vec<(f64, usize)> = foci
        .iter()
        .enumerate()
        .map(|(j, &psi0)| (gain_kernel_abs(probe * psi_c - psi0, n_antennas), j))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut best = BestBeam {
        gain: 0.0,
        xi: probe,
    };
    for (bound, j) in ranked {
        if bound <= best.gain {
            break;
        }
        let (gain, xi) = min_gain_over_band(psi_c, foci[j], n_antennas, xis);
        if gain > best.gain {
            best = BestBeam { gain, xi };
        }
    }
    best
}

/// Grid over `[lo, hi]` whose shared points are bit-identical across
/// steps that divide the span evenly: `psi_i = lo + (i * span) / n`.
pub fn psi_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let span = hi - lo;
    let n = ((span / step).round() as usize).max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (i as f64 * span) / n as f64
            }
        })
        .collect()
}

fn to_db(gain: f64, n_antennas: usize) -> f64 {
    20.0 * (gain / max_gain(n_antennas)).log10()
}

/// Certifies that some beam clears the threshold at every sampled
/// direction and subcarrier.
pub fn verify_codebook(codebook: &Codebook, options: &VerifyOptions) -> Result<CoverageReport> {
    options.grid.validate()?;
    if !(options.slack_db.is_finite() && options.slack_db >= 0.0) {
        return Err(invalid(
            "slack_db",
            format!("must be non-negative, got {}", options.slack_db),
        ));
    }
    let n = codebook.n_antennas();
    let band = options.band.unwrap_or(*codebook.band());
    let xis = band.xi_grid(options.grid.xi_points);
    let foci = codebook.foci();
    let threshold_db = codebook.threshold().db();
    let pass_level = max_gain(n) * 10f64.powf((threshold_db - options.slack_db) / 20.0);

    let psi_m = codebook.psi_m();
    let grid = psi_grid(-psi_m, psi_m, options.grid.psi_step);
    let samples = map_indexed(options.execution, grid.len(), |i| {
        best_beam(grid[i], &foci, n, &xis)
    });

    let mut worst = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.gain < samples[worst].gain {
            worst = i;
        }
    }

    let passes = |psi: f64| best_beam(psi, &foci, n, &xis).gain >= pass_level;
    let mut gaps = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if samples[i].gain >= pass_level {
            i += 1;
            continue;
        }
        let start = i;
        while i < grid.len() && samples[i].gain < pass_level {
            i += 1;
        }
        let lo = if start == 0 {
            grid[0]
        } else {
            bisect_boundary(&|p| !passes(p), grid[start], grid[start - 1])
        };
        let hi = if i == grid.len() {
            grid[grid.len() - 1]
        } else {
            bisect_boundary(&|p| !passes(p), grid[i - 1], grid[i])
        };
        gaps.push(CoverageInterval::new(lo, hi));
    }

    let worst_gain_db = to_db(samples[worst].gain, n);
    Ok(CoverageReport {
        worst_gain_db,
        worst_psi: grid[worst],
        worst_xi: samples[worst].xi,
        threshold_db,
        slack_db: options.slack_db,
        fractional_bandwidth: band.fractional_bandwidth(),
        pass: gaps.is_empty(),
        gaps,
    })
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    FractionalBandwidth,
    Antennas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutcome {
    Size(usize),
    Infeasible,
}

impl SweepOutcome {
    pub fn size(&self) -> Option<usize> {
        match self {
            SweepOutcome::Size(s) => Some(*s),
            SweepOutcome::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub outcome: SweepOutcome,
}

/// Bound that terminates a series: the bandwidth limit for a fixed `N`,
/// or the antenna limit for a fixed `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesBound {
    FractionalBandwidth(f64),
    Antennas(AntennaBound),
}

/// One curve of a sweep, at a fixed `N` (size vs `b`) or fixed `b`
/// (size vs `N`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSeries {
    pub parameter: f64,
    pub bound: SeriesBound,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub psi_m: f64,
    pub series: Vec<SweepSeries>,
}

fn size_or_infeasible(n: usize, band: BandSpec, psi_m: f64) -> Result<SweepOutcome> {
    let outcome = CodebookDesigner::new(n, psi_m)?.band(band).design()?;
    Ok(outcome
        .size()
        .map_or(SweepOutcome::Infeasible, SweepOutcome::Size))
}

/// Minimum codebook size against fractional bandwidth, one series per
/// antenna count.
pub fn sweep_size_vs_b(
    n_antennas_list: &[usize],
    b_grid: &[f64],
    psi_m: f64,
    execution: Execution,
) -> Result<SweepTable> {
    if n_antennas_list.is_empty() || b_grid.is_empty() {
        return Err(invalid("sweep", "antenna list and b grid must be non-empty"));
    }
    let bands = b_grid
        .iter()
        .map(|&b| BandSpec::new(b))
        .collect::<Result<Vec<_>>>()?;
    let series = n_antennas_list
        .iter()
        .map(|&n| {
            let bound = max_fractional_bandwidth(n, psi_m)?;
            let points = map_indexed(execution, bands.len(), |i| {
                size_or_infeasible(n, bands[i], psi_m).map(|outcome| SweepPoint {
                    axis_value: b_grid[i],
                    outcome,
                })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            Ok(SweepSeries {
                parameter: n as f64,
                bound: SeriesBound::FractionalBandwidth(bound),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis: SweepAxis::FractionalBandwidth,
        psi_m,
        series,
    })
}

/// Minimum codebook size against antenna count, one series per
/// fractional bandwidth.
pub fn sweep_size_vs_n(
    b_list: &[f64],
    n_range: std::ops::RangeInclusive<usize>,
    psi_m: f64,
    execution: Execution,
) -> Result<SweepTable> {
    let ns: Vec<usize> = n_range.collect();
    if b_list.is_empty() || ns.is_empty() {
        return Err(invalid("sweep", "b list and N range must be non-empty"));
    }
    let series = b_list
        .iter()
        .map(|&b| {
            let band = BandSpec::new(b)?;
            let bound = max_antennas(&band, psi_m)?;
            let points = map_indexed(execution, ns.len(), |i| {
                size_or_infeasible(ns[i], band, psi_m).map(|outcome| SweepPoint {
                    axis_value: ns[i] as f64,
                    outcome,
                })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            Ok(SweepSeries {
                parameter: b,
                bound: SeriesBound::Antennas(bound),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis: SweepAxis::Antennas,
        psi_m,
        series,
    })
}
