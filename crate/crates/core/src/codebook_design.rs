//! Minimum-size codebooks of fine beams.
//!
//! Without squint every beam has the same width and the target range is
//! tiled symmetrically. With squint the beams narrow away from broadside,
//! so tiling proceeds outward from broadside, each new beam's left edge
//! placed on the previous beam's right edge. Two seeds are tried (a beam
//! at broadside, or a beam edge at broadside) and the smaller codebook
//! wins.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::array_model::{check_antennas, fine_beam_weights, ArrayGeometry, BeamWeights};
use crate::error::{invalid, Result};
use crate::squint_model::{
    exact_half_power_beamwidth, focus_from_left_edge_with, half_power_beamwidth,
    squinted_coverage_with_beamwidth, BandSpec, CoverageInterval, GainThreshold, HPBW_CONSTANT,
};

/// Absolute slack on the `psi_cr < psi_m` loop test, so a tiling that
/// ends exactly on `psi_m` does not grow an extra beam from roundoff.
const TERMINATION_SLACK: f64 = 1e-12;
/// Largest hole tolerated when checking that coverages tile the target.
pub const COVERAGE_GAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(size: usize) -> Self {
        if size % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Which unsquinted beamwidth the tiling uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamwidthRule {
    /// `1.772 / N`, valid for the half-power threshold.
    #[default]
    Nominal,
    /// Width solved from the kernel for the configured threshold.
    Exact,
}

/// One codebook entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub index: usize,
    pub psi0: f64,
    pub weights: BeamWeights,
    pub coverage: CoverageInterval,
}

/// Beams sorted by focus, with the target they were designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    beams: Vec<Beam>,
    psi_m: f64,
    band: BandSpec,
    n_antennas: usize,
    threshold: GainThreshold,
    parity: Parity,
}

impl Codebook {
    /// Assembles a codebook from already-built beams. Beams are sorted by
    /// focus and re-indexed; no coverage invariant is enforced here.
    pub fn from_beams(
        mut beams: Vec<Beam>,
        psi_m: f64,
        band: BandSpec,
        n_antennas: usize,
        threshold: GainThreshold,
        parity: Parity,
    ) -> Result<Self> {
        check_antennas(n_antennas)?;
        check_psi_m(psi_m)?;
        if let Some(b) = beams.iter().find(|b| b.weights.len() != n_antennas) {
            return Err(invalid(
                "beams",
                format!(
                    "beam at psi0={} has {} phases, expected {n_antennas}",
                    b.psi0,
                    b.weights.len()
                ),
            ));
        }
        beams.sort_by(|a, b| a.psi0.total_cmp(&b.psi0));
        for (i, beam) in beams.iter_mut().enumerate() {
            beam.index = i;
        }
        Ok(Self {
            beams,
            psi_m,
            band,
            n_antennas,
            threshold,
            parity,
        })
    }

    pub fn beams(&self) -> &[Beam] {
        &self.beams
    }

    pub fn size(&self) -> usize {
        self.beams.len()
    }

    pub fn psi_m(&self) -> f64 {
        self.psi_m
    }

    pub fn band(&self) -> &BandSpec {
        &self.band
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn threshold(&self) -> GainThreshold {
        self.threshold
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Focus angles in ascending order.
    pub fn foci(&self) -> Vec<f64> {
        self.beams.iter().map(|b| b.psi0).collect()
    }

    /// Copy with the beam at `position` dropped.
    pub fn without_beam(&self, position: usize) -> Self {
        let mut beams = self.beams.clone();
        beams.remove(position);
        for (i, beam) in beams.iter_mut().enumerate() {
            beam.index = i;
        }
        Self {
            beams,
            parity: self.parity,
            ..*self
        }
    }

    /// Parts of `[-psi_m, psi_m]` not reached by any analytic coverage.
    pub fn analytic_gaps(&self) -> Vec<CoverageInterval> {
        let mut spans: Vec<CoverageInterval> = self
            .beams
            .iter()
            .map(|b| b.coverage)
            .filter(|c| !c.is_empty())
            .collect();
        spans.sort_by(|a, b| a.lo.total_cmp(&b.lo));

        let mut gaps = Vec::new();
        let mut reached = -self.psi_m;
        for span in spans {
            if span.lo > reached + COVERAGE_GAP_TOLERANCE && span.lo > -self.psi_m {
                gaps.push(CoverageInterval::new(reached, span.lo.min(self.psi_m)));
            }
            reached = reached.max(span.hi);
            if reached >= self.psi_m {
                break;
            }
        }
        if reached < self.psi_m - COVERAGE_GAP_TOLERANCE {
            gaps.push(CoverageInterval::new(reached, self.psi_m));
        }
        gaps.retain(|g| g.lo < self.psi_m);
        gaps
    }

    pub fn covers_target(&self) -> bool {
        self.analytic_gaps().is_empty()
    }

    /// Every beam at `psi0` has a partner at `-psi0` with mirrored coverage.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let n = self.beams.len();
        (0..n).all(|i| {
            let (a, b) = (&self.beams[i], &self.beams[n - 1 - i]);
            let mirrored = b.coverage.mirrored();
            (a.psi0 + b.psi0).abs() <= tol
                && (a.coverage.lo - mirrored.lo).abs() <= tol
                && (a.coverage.hi - mirrored.hi).abs() <= tol
        })
    }

    /// Whether adjacent coverages share an edge on each half-axis.
    pub fn coverages_abut(&self, tol: f64) -> bool {
        self.beams
            .windows(2)
            .all(|w| (w[0].coverage.hi - w[1].coverage.lo).abs() <= tol)
    }

    pub fn has_broadside_beam(&self) -> bool {
        self.beams.iter().any(|b| b.psi0 == 0.0)
    }
}

/// Upper bound on the number of antennas for a given band.
///
/// Serializes as the bound itself, or the string `"UNBOUNDED"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaBound {
    /// No squint, no bound.
    Unbounded,
    AtMost(usize),
}

impl Serialize for AntennaBound {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AntennaBound::Unbounded => serializer.serialize_str("UNBOUNDED"),
            AntennaBound::AtMost(n) => serializer.serialize_u64(*n as u64),
        }
    }
}

impl fmt::Display for AntennaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AntennaBound::Unbounded => f.write_str("UNBOUNDED"),
            AntennaBound::AtMost(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibleReason {
    /// `b` is at or above `Delta / psi_m`.
    BandwidthBound,
    /// A tiling step failed to advance the right edge.
    TilingStalled(Parity),
}

/// Why no codebook exists, with the bound values that decide it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Infeasibility {
    pub reason: InfeasibleReason,
    pub n_antennas: usize,
    pub psi_m: f64,
    pub fractional_bandwidth: f64,
    pub max_fractional_bandwidth: f64,
    pub max_antennas: AntennaBound,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let why = match self.reason {
            InfeasibleReason::BandwidthBound => "fractional bandwidth at or above bound".to_string(),
            InfeasibleReason::TilingStalled(p) => format!("{p} tiling stalled"),
        };
        write!(
            f,
            "no codebook exists ({why}): b={:.6} max_b={:.6} N={} max_N={} psi_m={}",
            self.fractional_bandwidth,
            self.max_fractional_bandwidth,
            self.n_antennas,
            self.max_antennas,
            self.psi_m
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DesignOutcome {
    Feasible(Codebook),
    Infeasible(Infeasibility),
}

impl DesignOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DesignOutcome::Feasible(_))
    }

    pub fn codebook(&self) -> Option<&Codebook> {
        match self {
            DesignOutcome::Feasible(c) => Some(c),
            DesignOutcome::Infeasible(_) => None,
        }
    }

    pub fn into_codebook(self) -> Option<Codebook> {
        match self {
            DesignOutcome::Feasible(c) => Some(c),
            DesignOutcome::Infeasible(_) => None,
        }
    }

    pub fn size(&self) -> Option<usize> {
        self.codebook().map(Codebook::size)
    }
}

fn check_psi_m(psi_m: f64) -> Result<()> {
    if !(psi_m.is_finite() && psi_m > 0.0 && psi_m <= 1.0) {
        return Err(invalid("psi_m", format!("must lie in (0, 1], got {psi_m}")));
    }
    Ok(())
}

/// `ceil(2 psi_m / (1.772 / N))`: beams needed when squint is ignored.
pub fn min_size_no_squint(n_antennas: usize, psi_m: f64) -> Result<usize> {
    check_antennas(n_antennas)?;
    check_psi_m(psi_m)?;
    Ok(tiles_needed(2.0 * psi_m, half_power_beamwidth(n_antennas)))
}

fn tiles_needed(span: f64, width: f64) -> usize {
    (span / width - TERMINATION_SLACK).ceil().max(1.0) as usize
}

/// Largest fractional bandwidth, exclusive, for which a codebook exists.
pub fn max_fractional_bandwidth(n_antennas: usize, psi_m: f64) -> Result<f64> {
    check_antennas(n_antennas)?;
    check_psi_m(psi_m)?;
    Ok(HPBW_CONSTANT / (psi_m * n_antennas as f64))
}

/// `floor(1.772 / (psi_m b))`, or [`AntennaBound::Unbounded`] for `b = 0`.
pub fn max_antennas(band: &BandSpec, psi_m: f64) -> Result<AntennaBound> {
    check_psi_m(psi_m)?;
    let b = band.fractional_bandwidth();
    if b == 0.0 {
        return Ok(AntennaBound::Unbounded);
    }
    Ok(AntennaBound::AtMost(
        (HPBW_CONSTANT / (psi_m * b)).floor() as usize,
    ))
}

/// Symmetric tiling of `[-psi_m, psi_m]` with `1.772 / N` wide beams.
pub fn design_no_squint(n_antennas: usize, psi_m: f64) -> Result<Codebook> {
    let size = min_size_no_squint(n_antennas, psi_m)?;
    let delta = half_power_beamwidth(n_antennas);
    let parity = Parity::of(size);
    let positive: Vec<f64> = match parity {
        Parity::Odd => (0..=size / 2).map(|k| k as f64 * delta).collect(),
        Parity::Even => (1..=size / 2).map(|k| (k as f64 - 0.5) * delta).collect(),
    };
    build_codebook(
        &positive,
        n_antennas,
        BandSpec::narrowband(),
        psi_m,
        GainThreshold::default(),
        delta,
        parity,
    )
}

/// Smallest squint-aware codebook with the half-power threshold and the
/// `1.772 / N` beamwidth.
pub fn design_with_squint(n_antennas: usize, band: &BandSpec, psi_m: f64) -> Result<DesignOutcome> {
    CodebookDesigner::new(n_antennas, psi_m)?
        .band(*band)
        .design()
}

/// Configurable front end for the squint-aware design.
#[derive(Debug, Clone, Copy)]
pub struct CodebookDesigner {
    n_antennas: usize,
    psi_m: f64,
    band: BandSpec,
    threshold: GainThreshold,
    rule: BeamwidthRule,
}

impl CodebookDesigner {
    pub fn new(n_antennas: usize, psi_m: f64) -> Result<Self> {
        check_antennas(n_antennas)?;
        check_psi_m(psi_m)?;
        Ok(Self {
            n_antennas,
            psi_m,
            band: BandSpec::narrowband(),
            threshold: GainThreshold::default(),
            rule: BeamwidthRule::Nominal,
        })
    }

    pub fn band(mut self, band: BandSpec) -> Self {
        self.band = band;
        self
    }

    pub fn threshold(mut self, threshold: GainThreshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn beamwidth_rule(mut self, rule: BeamwidthRule) -> Self {
        self.rule = rule;
        self
    }

    /// Unsquinted beamwidth the tiling is built on.
    pub fn beamwidth(&self) -> f64 {
        match self.rule {
            BeamwidthRule::Nominal => half_power_beamwidth(self.n_antennas),
            BeamwidthRule::Exact => exact_half_power_beamwidth(self.n_antennas, self.threshold)
                .expect("antenna count validated at construction"),
        }
    }

    /// `beamwidth / psi_m`; codebooks exist strictly below it.
    pub fn bandwidth_bound(&self) -> f64 {
        self.beamwidth() / self.psi_m
    }

    fn antenna_bound(&self) -> AntennaBound {
        let b = self.band.fractional_bandwidth();
        if b == 0.0 {
            return AntennaBound::Unbounded;
        }
        // beamwidth * N is 1.772 under the nominal rule.
        let width_times_n = self.beamwidth() * self.n_antennas as f64;
        AntennaBound::AtMost((width_times_n / (self.psi_m * b)).floor() as usize)
    }

    fn infeasible(&self, reason: InfeasibleReason) -> Infeasibility {
        Infeasibility {
            reason,
            n_antennas: self.n_antennas,
            psi_m: self.psi_m,
            fractional_bandwidth: self.band.fractional_bandwidth(),
            max_fractional_bandwidth: self.bandwidth_bound(),
            max_antennas: self.antenna_bound(),
        }
    }

    /// Runs one tiling procedure: `Odd` seeds a beam at broadside, `Even`
    /// seeds a coverage edge there.
    pub fn procedure(&self, parity: Parity) -> DesignOutcome {
        let delta = self.beamwidth();
        let b = self.band.fractional_bandwidth();
        if b >= self.bandwidth_bound() || delta <= 0.0 {
            return DesignOutcome::Infeasible(self.infeasible(InfeasibleReason::BandwidthBound));
        }

        let right_edge = |psi0: f64| (psi0 + delta / 2.0) / self.band.xi_max();
        let mut positive = Vec::new();
        let mut reached = match parity {
            Parity::Odd => {
                positive.push(0.0);
                right_edge(0.0)
            }
            Parity::Even => 0.0,
        };
        while reached < self.psi_m - TERMINATION_SLACK {
            let left = reached;
            let psi0 = focus_from_left_edge_with(left, &self.band, delta);
            reached = right_edge(psi0);
            if left >= reached {
                return DesignOutcome::Infeasible(
                    self.infeasible(InfeasibleReason::TilingStalled(parity)),
                );
            }
            positive.push(psi0);
        }

        match build_codebook(
            &positive,
            self.n_antennas,
            self.band,
            self.psi_m,
            self.threshold,
            delta,
            parity,
        ) {
            Ok(codebook) => DesignOutcome::Feasible(codebook),
            Err(_) => unreachable!("parameters validated at construction"),
        }
    }

    /// Runs both procedures and keeps the smaller codebook.
    pub fn design(&self) -> Result<DesignOutcome> {
        let odd = self.procedure(Parity::Odd);
        let even = self.procedure(Parity::Even);
        Ok(match (odd, even) {
            (DesignOutcome::Feasible(o), DesignOutcome::Feasible(e)) => {
                DesignOutcome::Feasible(if o.size() <= e.size() { o } else { e })
            }
            (f @ DesignOutcome::Feasible(_), _) | (_, f @ DesignOutcome::Feasible(_)) => f,
            (infeasible, _) => infeasible,
        })
    }
}

/// Mirrors the non-negative foci onto the left half-axis and materializes
/// weights and coverages.
fn build_codebook(
    positive: &[f64],
    n_antennas: usize,
    band: BandSpec,
    psi_m: f64,
    threshold: GainThreshold,
    beamwidth: f64,
    parity: Parity,
) -> Result<Codebook> {
    let geom = ArrayGeometry::half_wavelength(n_antennas)?;
    let foci = positive
        .iter()
        .rev()
        .filter(|&&p| p != 0.0)
        .map(|&p| -p)
        .chain(positive.iter().copied());
    let beams = foci
        .enumerate()
        .map(|(index, psi0)| Beam {
            index,
            psi0,
            weights: fine_beam_weights(&geom, psi0),
            coverage: squinted_coverage_with_beamwidth(psi0, &band, beamwidth),
        })
        .collect();
    Codebook::from_beams(beams, psi_m, band, n_antennas, threshold, parity)
}
