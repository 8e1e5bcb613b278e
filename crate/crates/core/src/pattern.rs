//! Beam pattern tables across frequency.

use serde::{Deserialize, Serialize};

use crate::array_model::{array_gain_sum, fine_beam_weights, psi_to_degrees, ArrayGeometry};
use crate::error::{invalid, Result};
use crate::exec::{map_indexed, Execution};
use crate::verification::psi_grid;

/// Floor applied to `gain_db` at exact nulls.
pub const GAIN_DB_FLOOR: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub psi: f64,
    pub theta_deg: f64,
    pub xi: f64,
    pub gain_abs: f64,
    /// Relative to the peak `sqrt(N)`.
    pub gain_db: f64,
}

/// Gain of the fine beam focused on `psi0`, sampled on a psi grid over
/// `[-psi_max, psi_max]` for each frequency ratio in turn.
///
/// Uses element summation, so any spacing ratio is accepted.
pub fn pattern_table(
    geom: &ArrayGeometry,
    psi0: f64,
    xis: &[f64],
    psi_step: f64,
    psi_max: f64,
    execution: Execution,
) -> Result<Vec<PatternRow>> {
    if xis.is_empty() {
        return Err(invalid("xi", "at least one frequency is required"));
    }
    if !(psi_step.is_finite() && psi_step > 0.0) {
        return Err(invalid("psi_step", format!("must be positive, got {psi_step}")));
    }
    if !(psi_max > 0.0 && psi_max <= 1.0) {
        return Err(invalid("psi_max", format!("must lie in (0, 1], got {psi_max}")));
    }
    let weights = fine_beam_weights(geom, psi0);
    let grid = psi_grid(-psi_max, psi_max, psi_step);
    let peak = geom.max_gain();
    let mut rows = Vec::with_capacity(grid.len() * xis.len());
    for &xi in xis {
        let gains = map_indexed(execution, grid.len(), |i| {
            array_gain_sum(&weights, geom, grid[i], xi).map(|g| g.norm())
        });
        for (psi, gain) in grid.iter().zip(gains) {
            let gain_abs = gain?;
            rows.push(PatternRow {
                psi: *psi,
                theta_deg: psi_to_degrees(*psi),
                xi,
                gain_abs,
                gain_db: (20.0 * (gain_abs / peak).log10()).max(GAIN_DB_FLOOR),
            });
        }
    }
    Ok(rows)
}

/// Row with the largest gain for frequency `xi` (first one on ties).
pub fn peak_row(rows: &[PatternRow], xi: f64) -> Option<PatternRow> {
    rows.iter()
        .filter(|r| r.xi == xi)
        .fold(None, |best: Option<PatternRow>, r| match best {
            Some(b) if b.gain_abs >= r.gain_abs => Some(b),
            _ => Some(*r),
        })
}
