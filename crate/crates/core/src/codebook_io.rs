//! Codebook JSON format.
//!
//! ```json
//! { "n_antennas": 16, "spacing_ratio": 0.5, "fractional_bandwidth": 0.0342,
//!   "psi_m": 1.0, "threshold_ratio": 0.7071067811865476, "parity": "even",
//!   "size": 22,
//!   "beams": [ { "index": 0, "psi0": -0.97, "theta0_deg": -75.9,
//!                "phases_rad": [0.0, ...], "coverage": { "lo": -1.0, "hi": -0.95 } } ] }
//! ```
//!
//! `size` is written for readers but recomputed from `beams` on load, so a
//! file with beams removed by hand still loads and can be verified.

use serde::{Deserialize, Serialize};

use crate::array_model::{fine_beam_weights, psi_to_degrees, ArrayGeometry, BeamWeights};
use crate::codebook_design::{Beam, Codebook, Parity};
use crate::error::{Error, Result};
use crate::squint_model::{BandSpec, CoverageInterval, GainThreshold};

/// Phase mismatch tolerated between a stored phase and the fine-beam
/// phase for the stored focus, relative to `max(1, |phase|)`.
const PHASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookDoc {
    pub n_antennas: usize,
    pub spacing_ratio: f64,
    pub fractional_bandwidth: f64,
    pub psi_m: f64,
    pub threshold_ratio: f64,
    pub parity: Parity,
    pub size: usize,
    pub beams: Vec<BeamDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamDoc {
    pub index: usize,
    pub psi0: f64,
    pub theta0_deg: f64,
    pub phases_rad: Vec<f64>,
    pub coverage: CoverageInterval,
}

impl From<&Codebook> for CodebookDoc {
    fn from(codebook: &Codebook) -> Self {
        Self {
            n_antennas: codebook.n_antennas(),
            spacing_ratio: 0.5,
            fractional_bandwidth: codebook.band().fractional_bandwidth(),
            psi_m: codebook.psi_m(),
            threshold_ratio: codebook.threshold().ratio(),
            parity: codebook.parity(),
            size: codebook.size(),
            beams: codebook
                .beams()
                .iter()
                .map(|b| BeamDoc {
                    index: b.index,
                    psi0: b.psi0,
                    theta0_deg: psi_to_degrees(b.psi0),
                    phases_rad: b.weights.phases().to_vec(),
                    coverage: b.coverage,
                })
                .collect(),
        }
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCodebook(msg.into())
}

impl TryFrom<CodebookDoc> for Codebook {
    type Error = Error;

    fn try_from(doc: CodebookDoc) -> Result<Self> {
        if doc.n_antennas < 2 {
            return Err(malformed(format!(
                "n_antennas must be at least 2, got {}",
                doc.n_antennas
            )));
        }
        if doc.spacing_ratio != 0.5 {
            return Err(malformed(format!(
                "spacing_ratio must be 0.5, got {}",
                doc.spacing_ratio
            )));
        }
        let band = BandSpec::new(doc.fractional_bandwidth)
            .map_err(|e| malformed(format!("fractional_bandwidth: {e}")))?;
        if !(doc.psi_m > 0.0 && doc.psi_m <= 1.0) {
            return Err(malformed(format!("psi_m must lie in (0, 1], got {}", doc.psi_m)));
        }
        let threshold = GainThreshold::new(doc.threshold_ratio)
            .map_err(|e| malformed(format!("threshold_ratio: {e}")))?;

        let geom = ArrayGeometry::half_wavelength(doc.n_antennas)?;
        let mut beams = Vec::with_capacity(doc.beams.len());
        for beam in doc.beams {
            let at = beam.index;
            if !beam.psi0.is_finite() {
                return Err(malformed(format!("beam {at}: psi0 is not finite")));
            }
            if beam.phases_rad.len() != doc.n_antennas {
                return Err(malformed(format!(
                    "beam {at}: phases_rad has {} entries, n_antennas is {}",
                    beam.phases_rad.len(),
                    doc.n_antennas
                )));
            }
            let expected = fine_beam_weights(&geom, beam.psi0);
            let consistent = beam
                .phases_rad
                .iter()
                .zip(expected.phases())
                .all(|(p, e)| (p - e).abs() <= PHASE_TOLERANCE * p.abs().max(1.0));
            if !consistent {
                return Err(malformed(format!(
                    "beam {at}: phases_rad are not the fine-beam phases for psi0={}",
                    beam.psi0
                )));
            }
            let CoverageInterval { lo, hi } = beam.coverage;
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(malformed(format!("beam {at}: coverage is not finite")));
            }
            beams.push(Beam {
                index: at,
                psi0: beam.psi0,
                weights: BeamWeights::from_phases(beam.phases_rad)?,
                coverage: beam.coverage,
            });
        }
        Codebook::from_beams(beams, doc.psi_m, band, doc.n_antennas, threshold, doc.parity)
    }
}

pub fn to_json(codebook: &Codebook) -> String {
    serde_json::to_string_pretty(&CodebookDoc::from(codebook))
        .expect("codebook documents contain only finite numbers")
}

pub fn from_json(text: &str) -> Result<Codebook> {
    let doc: CodebookDoc =
        serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    Codebook::try_from(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook_design::design_with_squint;
    use proptest::prelude::*;

    fn sample() -> Codebook {
        design_with_squint(16, &BandSpec::new(0.0342).unwrap(), 1.0)
            .unwrap()
            .into_codebook()
            .unwrap()
    }

    fn doc_value() -> serde_json::Value {
        serde_json::from_str(&to_json(&sample())).unwrap()
    }

    fn load(value: serde_json::Value) -> Result<Codebook> {
        from_json(&value.to_string())
    }

    #[test]
    fn schema_fields() {
        let v = doc_value();
        assert_eq!(v["n_antennas"], 16);
        assert_eq!(v["spacing_ratio"], 0.5);
        assert_eq!(v["parity"], "even");
        assert_eq!(v["size"], 22);
        let beam = &v["beams"][0];
        assert_eq!(beam["phases_rad"].as_array().unwrap().len(), 16);
        assert!(beam["coverage"]["lo"].is_f64());
        assert!(beam["theta0_deg"].as_f64().unwrap() >= -90.0);
    }

    #[test]
    fn wrong_phase_count_rejected() {
        let mut v = doc_value();
        v["beams"][3]["phases_rad"].as_array_mut().unwrap().pop();
        let err = load(v).unwrap_err().to_string();
        assert!(err.contains("phases_rad has 15 entries"), "{err}");
    }

    #[test]
    fn inconsistent_phases_rejected() {
        let mut v = doc_value();
        v["beams"][3]["phases_rad"][2] = serde_json::json!(0.123);
        let err = load(v).unwrap_err().to_string();
        assert!(err.contains("fine-beam phases"), "{err}");
    }

    #[test]
    fn header_invariants_checked() {
        for (key, value, needle) in [
            ("n_antennas", serde_json::json!(1), "n_antennas"),
            ("spacing_ratio", serde_json::json!(0.6), "spacing_ratio"),
            ("psi_m", serde_json::json!(1.5), "psi_m"),
            ("fractional_bandwidth", serde_json::json!(-0.1), "fractional_bandwidth"),
            ("threshold_ratio", serde_json::json!(0.0), "threshold_ratio"),
        ] {
            let mut v = doc_value();
            v[key] = value;
            let err = load(v).unwrap_err().to_string();
            assert!(err.contains(needle), "{key}: {err}");
        }
        assert!(from_json("{not json").is_err());
    }

    #[test]
    fn deleted_beam_still_loads() {
        let mut v = doc_value();
        v["beams"].as_array_mut().unwrap().remove(5);
        let cb = load(v).unwrap();
        assert_eq!(cb.size(), 21);
        assert!(!cb.covers_target());
    }

    proptest! {
        #[test]
        fn json_round_trip(n in 8usize..48, frac in 0.0f64..0.95, psi_m in 0.3f64..1.0) {
            let b = frac * 1.772 / (psi_m * n as f64);
            let cb = design_with_squint(n, &BandSpec::new(b).unwrap(), psi_m)
                .unwrap()
                .into_codebook()
                .unwrap();
            let back = from_json(&to_json(&cb)).unwrap();
            prop_assert_eq!(back, cb);
        }
    }
}
