//! Beam squint in psi-space.
//!
//! A fine beam focused on `psi0` at the carrier sees a wave from `psi_c`
//! at subcarrier ratio `xi` as `gain_kernel(xi * psi_c - psi0)`. Requiring
//! the gain to clear a threshold over the whole band
//! `xi in [1 - b/2, 1 + b/2]` shrinks each beam's coverage. This module
//! has the closed-form edges used for design, and a grid oracle that
//! measures the same coverage directly from the kernel.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::array_model::{check_antennas, gain_kernel_abs, max_gain};
use crate::error::{invalid, Result};

/// Half-power beamwidth constant: `Delta psi_3dB = HPBW_CONSTANT / N`.
pub const HPBW_CONSTANT: f64 = 1.772;

/// Default number of subcarrier ratios sampled across the band.
pub const DEFAULT_XI_POINTS: usize = 65;
/// Default psi grid step for numeric coverage and verification.
pub const DEFAULT_PSI_STEP: f64 = 1e-4;

const EDGE_TOLERANCE: f64 = 1e-9;

/// Signal band relative to the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    carrier_freq_hz: Option<f64>,
    fractional_bandwidth: f64,
}

impl BandSpec {
    pub fn new(fractional_bandwidth: f64) -> Result<Self> {
        if !(fractional_bandwidth.is_finite() && (0.0..2.0).contains(&fractional_bandwidth)) {
            return Err(invalid(
                "fractional_bandwidth",
                format!("must lie in [0, 2), got {fractional_bandwidth}"),
            ));
        }
        Ok(Self {
            carrier_freq_hz: None,
            fractional_bandwidth,
        })
    }

    /// Narrowband limit, `b = 0`.
    pub fn narrowband() -> Self {
        Self {
            carrier_freq_hz: None,
            fractional_bandwidth: 0.0,
        }
    }

    /// Band from carrier frequency and baseband bandwidth; `b = B / f_c`.
    pub fn from_carrier(carrier_freq_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        if !(carrier_freq_hz.is_finite() && carrier_freq_hz > 0.0) {
            return Err(invalid(
                "carrier_freq",
                format!("must be positive, got {carrier_freq_hz}"),
            ));
        }
        if !(bandwidth_hz.is_finite() && bandwidth_hz >= 0.0) {
            return Err(invalid(
                "bandwidth",
                format!("must be non-negative, got {bandwidth_hz}"),
            ));
        }
        let mut band = Self::new(bandwidth_hz / carrier_freq_hz)?;
        band.carrier_freq_hz = Some(carrier_freq_hz);
        Ok(band)
    }

    pub fn fractional_bandwidth(&self) -> f64 {
        self.fractional_bandwidth
    }

    pub fn carrier_freq_hz(&self) -> Option<f64> {
        self.carrier_freq_hz
    }

    pub fn xi_min(&self) -> f64 {
        1.0 - self.fractional_bandwidth / 2.0
    }

    pub fn xi_max(&self) -> f64 {
        1.0 + self.fractional_bandwidth / 2.0
    }

    /// `points` evenly spaced ratios, both band edges included.
    pub fn xi_grid(&self, points: usize) -> Vec<f64> {
        let points = points.max(2);
        let (lo, b) = (self.xi_min(), self.fractional_bandwidth);
        let last = (points - 1) as f64;
        (0..points)
            .map(|i| {
                if i == points - 1 {
                    self.xi_max()
                } else {
                    lo + b * i as f64 / last
                }
            })
            .collect()
    }
}

/// Coverage threshold as a fraction of the peak gain `sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainThreshold {
    ratio_to_max: f64,
}

impl Default for GainThreshold {
    /// Half power, `g_t = g_m / sqrt(2)`.
    fn default() -> Self {
        Self {
            ratio_to_max: FRAC_1_SQRT_2,
        }
    }
}

impl GainThreshold {
    pub fn new(ratio_to_max: f64) -> Result<Self> {
        if !(ratio_to_max.is_finite() && ratio_to_max > 0.0 && ratio_to_max <= 1.0) {
            return Err(invalid(
                "threshold",
                format!("ratio to max gain must lie in (0, 1], got {ratio_to_max}"),
            ));
        }
        Ok(Self { ratio_to_max })
    }

    /// Threshold given in dB below the peak; amplitude `10^(-dB/20)`.
    ///
    /// The nominal 3 dB maps to the exact half-power ratio `1/sqrt(2)`.
    pub fn from_db_below_max(db: f64) -> Result<Self> {
        if db == 3.0 {
            return Ok(Self::default());
        }
        if !(db.is_finite() && db >= 0.0) {
            return Err(invalid(
                "threshold_db",
                format!("must be a non-negative dB value, got {db}"),
            ));
        }
        Self::new(10f64.powf(-db / 20.0))
    }

    pub fn ratio(&self) -> f64 {
        self.ratio_to_max
    }

    /// Threshold relative to the peak, in dB (negative).
    pub fn db(&self) -> f64 {
        20.0 * self.ratio_to_max.log10()
    }

    /// Absolute gain `g_t` for an `N`-element array.
    pub fn level(&self, n_antennas: usize) -> f64 {
        self.ratio_to_max * max_gain(n_antennas)
    }

    pub fn is_half_power(&self) -> bool {
        self.ratio_to_max == FRAC_1_SQRT_2
    }
}

/// Contiguous range of carrier-referenced directions `[lo, hi]`.
///
/// `lo >= hi` is a degenerate (empty) interval: squint has consumed the
/// whole beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageInterval {
    pub lo: f64,
    pub hi: f64,
}

impl CoverageInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn empty_at(psi: f64) -> Self {
        Self { lo: psi, hi: psi }
    }

    /// Signed width; non-positive when empty.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, psi: f64) -> bool {
        self.lo <= psi && psi <= self.hi
    }

    /// Mirror image about broadside.
    pub fn mirrored(&self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

/// The `1.772 / N` half-power beamwidth in psi-space.
pub fn half_power_beamwidth(n_antennas: usize) -> f64 {
    HPBW_CONSTANT / n_antennas as f64
}

/// Exact main-lobe width where `|g(x)|` stays above the threshold.
///
/// Bisects for the first crossing `x*` in `(0, 2/N)` and returns `2 x*`.
pub fn exact_half_power_beamwidth(n_antennas: usize, threshold: GainThreshold) -> Result<f64> {
    check_antennas(n_antennas)?;
    let level = threshold.level(n_antennas);
    if threshold.ratio() >= 1.0 {
        return Ok(0.0);
    }
    // |g| falls monotonically from sqrt(N) to 0 across the main lobe.
    let f = |x: f64| gain_kernel_abs(x, n_antennas) - level;
    let x = bisect(f, 0.0, 2.0 / n_antennas as f64, 1e-12);
    Ok(2.0 * x)
}

/// Carrier-referenced coverage of the beam focused on `psi0`, using the
/// `1.772 / N` beamwidth.
pub fn squinted_coverage(psi0: f64, band: &BandSpec, n_antennas: usize) -> CoverageInterval {
    squinted_coverage_with_beamwidth(psi0, band, half_power_beamwidth(n_antennas))
}

/// [`squinted_coverage`] for an arbitrary unsquinted beamwidth.
pub fn squinted_coverage_with_beamwidth(
    psi0: f64,
    band: &BandSpec,
    beamwidth: f64,
) -> CoverageInterval {
    let (left, right) = (psi0 - beamwidth / 2.0, psi0 + beamwidth / 2.0);
    let (low, high) = (band.xi_min(), band.xi_max());
    if left > 0.0 && right > 0.0 {
        // The lowest subcarrier limits the left edge, the highest the right.
        CoverageInterval::new(left / low, right / high)
    } else if left < 0.0 && right < 0.0 {
        CoverageInterval::new(left / high, right / low)
    } else {
        CoverageInterval::new(left / high, right / high)
    }
}

/// Width of the squinted coverage.
///
/// Non-positive when `b |psi0|` reaches the beamwidth.
pub fn effective_beamwidth(psi0: f64, band: &BandSpec, n_antennas: usize) -> f64 {
    effective_beamwidth_with(psi0, band, half_power_beamwidth(n_antennas))
}

pub fn effective_beamwidth_with(psi0: f64, band: &BandSpec, beamwidth: f64) -> f64 {
    let b = band.fractional_bandwidth();
    let (left, right) = (psi0 - beamwidth / 2.0, psi0 + beamwidth / 2.0);
    if left * right > 0.0 {
        (beamwidth - b * psi0.abs()) / (1.0 - b * b / 4.0)
    } else {
        beamwidth / (1.0 + b / 2.0)
    }
}

/// Focus of the beam whose squinted left edge lands on `psi_cl >= 0`.
///
/// Mirror by negation for the left half-axis.
pub fn focus_from_left_edge(psi_cl: f64, band: &BandSpec, n_antennas: usize) -> f64 {
    focus_from_left_edge_with(psi_cl, band, half_power_beamwidth(n_antennas))
}

pub fn focus_from_left_edge_with(psi_cl: f64, band: &BandSpec, beamwidth: f64) -> f64 {
    band.xi_min() * psi_cl + beamwidth / 2.0
}

/// Grid resolution for the brute-force oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub psi_step: f64,
    pub xi_points: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            psi_step: DEFAULT_PSI_STEP,
            xi_points: DEFAULT_XI_POINTS,
        }
    }
}

impl OracleGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.psi_step.is_finite() && self.psi_step > 0.0) {
            return Err(invalid(
                "psi_step",
                format!("must be positive, got {}", self.psi_step),
            ));
        }
        if self.xi_points < 2 {
            return Err(invalid(
                "xi_points",
                format!("at least 2 points are needed, got {}", self.xi_points),
            ));
        }
        Ok(())
    }
}

/// Worst gain over a sampled band for one beam and direction, with the
/// `xi` that attains it. The first minimum wins ties.
pub fn min_gain_over_band(psi_c: f64, psi0: f64, n_antennas: usize, xi_grid: &[f64]) -> (f64, f64) {
    let mut worst = (f64::INFINITY, f64::NAN);
    for &xi in xi_grid {
        let g = gain_kernel_abs(xi * psi_c - psi0, n_antennas);
        if g < worst.0 {
            worst = (g, xi);
        }
    }
    worst
}

/// Measures a beam's coverage straight from the kernel.
///
/// Finds the best direction within a main-lobe half-width of `psi0`,
/// walks outward on a `psi_step` grid while the band-minimum gain clears
/// the threshold, then bisects each edge to `1e-9`. Returns an empty
/// interval at `psi0` when no grid point qualifies.
pub fn numeric_coverage(
    psi0: f64,
    band: &BandSpec,
    n_antennas: usize,
    threshold: GainThreshold,
    grid: OracleGrid,
) -> Result<CoverageInterval> {
    check_antennas(n_antennas)?;
    grid.validate()?;
    let xis = band.xi_grid(grid.xi_points);
    let level = threshold.level(n_antennas);
    let h = |psi: f64| min_gain_over_band(psi, psi0, n_antennas, &xis).0;

    let step = grid.psi_step;
    let reach = ((1.0 / n_antennas as f64) / step).ceil() as i64;
    let mut peak = (psi0, h(psi0));
    for i in 1..=reach {
        for candidate in [psi0 + i as f64 * step, psi0 - i as f64 * step] {
            let g = h(candidate);
            if g > peak.1 {
                peak = (candidate, g);
            }
        }
    }
    if peak.1 < level {
        return Ok(CoverageInterval::empty_at(psi0));
    }

    // A main lobe is at most 4/N wide; the cap only guards the walk.
    let max_steps = ((4.0 / n_antennas as f64) / step).ceil() as i64 + 1;
    let qualifies = |psi: f64| h(psi) >= level;
    let walk = |direction: f64| {
        let mut inside = peak.0;
        for i in 1..=max_steps {
            let next = peak.0 + direction * i as f64 * step;
            if !qualifies(next) {
                return bisect_boundary(&qualifies, inside, next);
            }
            inside = next;
        }
        inside
    };
    Ok(CoverageInterval::new(walk(-1.0), walk(1.0)))
}

/// Whether the band-minimum gain at `psi_c` occurs on a band edge.
///
/// Interior samples within `1e-12` of the edge minimum count as ties.
pub fn band_minimum_at_edge(psi_c: f64, psi0: f64, n_antennas: usize, xi_grid: &[f64]) -> bool {
    let (interior_min, _) = min_gain_over_band(
        psi_c,
        psi0,
        n_antennas,
        &xi_grid[1..xi_grid.len().saturating_sub(1)],
    );
    let first = gain_kernel_abs(xi_grid[0] * psi_c - psi0, n_antennas);
    let last = gain_kernel_abs(xi_grid[xi_grid.len() - 1] * psi_c - psi0, n_antennas);
    first.min(last) <= interior_min + 1e-12
}

/// Bisection between a point that satisfies `inside` and one that does
/// not; returns the last known inside point once the bracket is `1e-9`.
pub(crate) fn bisect_boundary<F: Fn(f64) -> bool>(inside: &F, mut good: f64, mut bad: f64) -> f64 {
    while (bad - good).abs() > EDGE_TOLERANCE {
        let mid = 0.5 * (good + bad);
        if inside(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Root of a function positive at `lo` and non-positive at `hi`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
