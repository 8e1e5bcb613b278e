//! Uniform linear array response, fine-beam weights and the array gain.
//!
//! Gains are normalized by `1/sqrt(N)`, so a coherent beam peaks at
//! `sqrt(N)`. Angles are handled in psi-space (`psi = sin(theta)`) and
//! frequencies as the ratio `xi = f / f_c`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Complex voltage gain of the array.
pub type ComplexGain = Complex64;

/// Below this `|sin(pi x / 2)|` the kernel switches to its analytic limit.
const KERNEL_SINGULARITY_EPS: f64 = 1e-12;

/// Number of elements and their spacing in carrier wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    n_antennas: usize,
    spacing_ratio: f64,
}

impl ArrayGeometry {
    pub fn new(n_antennas: usize, spacing_ratio: f64) -> Result<Self> {
        check_antennas(n_antennas)?;
        if !(spacing_ratio.is_finite() && spacing_ratio > 0.0) {
            return Err(invalid(
                "spacing_ratio",
                format!("must be positive and finite, got {spacing_ratio}"),
            ));
        }
        Ok(Self {
            n_antennas,
            spacing_ratio,
        })
    }

    /// Half-wavelength spaced array, the geometry all closed forms assume.
    pub fn half_wavelength(n_antennas: usize) -> Result<Self> {
        Self::new(n_antennas, 0.5)
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }

    pub fn is_half_wavelength(&self) -> bool {
        self.spacing_ratio == 0.5
    }

    /// Maximum array gain `sqrt(N)`.
    pub fn max_gain(&self) -> f64 {
        max_gain(self.n_antennas)
    }
}

pub(crate) fn check_antennas(n_antennas: usize) -> Result<()> {
    if n_antennas < 2 {
        return Err(invalid(
            "n_antennas",
            format!("at least 2 elements are required, got {n_antennas}"),
        ));
    }
    Ok(())
}

/// Maximum array gain `sqrt(N)` of a fine beam.
pub fn max_gain(n_antennas: usize) -> f64 {
    (n_antennas as f64).sqrt()
}

/// A direction in psi-space, `psi = sin(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PsiAngle(f64);

impl PsiAngle {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value.abs() <= 1.0) {
            return Err(invalid("psi", format!("must lie in [-1, 1], got {value}")));
        }
        Ok(Self(value))
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta.abs() <= PI / 2.0 + 1e-15) {
            return Err(invalid(
                "theta",
                format!("must lie in [-pi/2, pi/2], got {theta}"),
            ));
        }
        Ok(Self(theta.sin().clamp(-1.0, 1.0)))
    }

    pub fn from_degrees(theta_deg: f64) -> Result<Self> {
        Self::from_theta(theta_deg.to_radians())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn theta(self) -> f64 {
        self.0.asin()
    }
}

/// Beam direction in degrees for a psi value.
///
/// Fine beams at the rim of a codebook can be focused slightly past
/// endfire (`|psi0| > 1`); those report +/-90 degrees.
pub fn psi_to_degrees(psi: f64) -> f64 {
    psi.clamp(-1.0, 1.0).asin().to_degrees()
}

/// Phase-shifter settings, one per element, in radians.
///
/// Phases are stored unreduced; anything congruent modulo `2 pi` produces
/// the same beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeamWeights {
    phases: Vec<f64>,
}

impl BeamWeights {
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(invalid("phases", format!("non-finite phase {bad}")));
        }
        Ok(Self { phases })
    }

    /// All-zero phases: a beam fixed at broadside.
    pub fn broadside(n_antennas: usize) -> Self {
        Self {
            phases: vec![0.0; n_antennas],
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Array response for a plane wave from `psi` at frequency ratio `xi`.
///
/// Element `n` (0-based) is `exp(j 2 pi xi (d/lambda_c) n psi)`.
pub fn steering_vector(geom: &ArrayGeometry, psi: f64, xi: f64) -> Result<Vec<ComplexGain>> {
    check_xi(xi)?;
    let step = 2.0 * PI * xi * geom.spacing_ratio * psi;
    Ok((0..geom.n_antennas)
        .map(|n| Complex64::cis(step * n as f64))
        .collect())
}

/// Phase shifts that focus the beam on `psi0` at the carrier frequency.
pub fn fine_beam_weights(geom: &ArrayGeometry, psi0: f64) -> BeamWeights {
    let step = 2.0 * PI * geom.spacing_ratio * psi0;
    BeamWeights {
        phases: (0..geom.n_antennas).map(|n| step * n as f64).collect(),
    }
}

/// Array gain by direct summation over the elements.
///
/// Works for any spacing and any weights; this is the reference the
/// closed-form [`gain_kernel`] is checked against.
pub fn array_gain_sum(
    weights: &BeamWeights,
    geom: &ArrayGeometry,
    psi: f64,
    xi: f64,
) -> Result<ComplexGain> {
    check_xi(xi)?;
    if weights.len() != geom.n_antennas {
        return Err(invalid(
            "weights",
            format!(
                "expected {} phases, got {}",
                geom.n_antennas,
                weights.len()
            ),
        ));
    }
    let step = 2.0 * PI * xi * geom.spacing_ratio * psi;
    let sum: Complex64 = weights
        .phases
        .iter()
        .enumerate()
        .map(|(n, beta)| Complex64::cis(step * n as f64 - beta))
        .sum();
    Ok(sum / geom.max_gain())
}

/// Closed-form array gain of a half-wavelength fine beam,
/// `sin(N pi x / 2) / (sqrt(N) sin(pi x / 2)) * exp(j (N - 1) pi x / 2)`,
/// where `x = xi * psi_c - psi0`.
///
/// At `x = 2k` (main and grating lobes) the analytic limit is returned.
pub fn gain_kernel(x: f64, n_antennas: usize) -> ComplexGain {
    let n = n_antennas as f64;
    let half = PI * x / 2.0;
    let den = half.sin();
    if den.abs() < KERNEL_SINGULARITY_EPS {
        // Nearest lobe centre; the residual phase keeps the value continuous.
        let k = (x / 2.0).round();
        let residual = x - 2.0 * k;
        return Complex64::from_polar(n.sqrt(), (n - 1.0) * PI * residual / 2.0);
    }
    let amplitude = (n * half).sin() / (n.sqrt() * den);
    Complex64::from_polar(amplitude, (n - 1.0) * half)
}

/// `|gain_kernel(x, N)|` without forming the phase factor.
pub fn gain_kernel_abs(x: f64, n_antennas: usize) -> f64 {
    let n = n_antennas as f64;
    let half = PI * x / 2.0;
    let den = half.sin();
    if den.abs() < KERNEL_SINGULARITY_EPS {
        return n.sqrt();
    }
    ((n * half).sin() / (n.sqrt() * den)).abs()
}

/// Angle at which a subcarrier with ratio `xi` sees a wave that arrives
/// from `theta_c` at the carrier: `asin(xi sin(theta_c))`.
pub fn equivalent_aoa(theta_c: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    let s = xi * theta_c.sin();
    if s.abs() > 1.0 {
        return Err(Error::OutsideVisibleRegion { value: s.abs() });
    }
    Ok(s.asin())
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(invalid("xi", format!("must be positive, got {xi}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half(n: usize) -> ArrayGeometry {
        ArrayGeometry::half_wavelength(n).unwrap()
    }

    #[test]
    fn single_element_rejected() {
        assert!(ArrayGeometry::half_wavelength(1).is_err());
        assert!(ArrayGeometry::new(4, 0.0).is_err());
        assert!(ArrayGeometry::new(4, f64::NAN).is_err());
    }

    #[test]
    fn steering_vector_broadside_and_endfire() {
        let v = steering_vector(&half(4), 0.0, 1.0).unwrap();
        assert!(v.iter().all(|e| (e - Complex64::new(1.0, 0.0)).norm() < 1e-15));

        let v = steering_vector(&half(2), 1.0, 1.0).unwrap();
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_vector_scaled_frequency() {
        let v = steering_vector(&half(3), 0.5, 1.1).unwrap();
        for (n, expected) in [0.0, 0.55 * PI, 1.10 * PI].into_iter().enumerate() {
            assert!((v[n] - Complex64::cis(expected)).norm() < 1e-12);
            assert!((v[n].norm() - 1.0).abs() < 1e-15);
        }
        assert!(steering_vector(&half(3), 0.5, 0.0).is_err());
    }

    #[test]
    fn fine_beam_phases() {
        assert!(fine_beam_weights(&half(4), 0.0)
            .phases()
            .iter()
            .all(|&p| p == 0.0));

        let w = fine_beam_weights(&half(16), (PI / 6.0).sin());
        for (n, p) in w.phases().iter().enumerate() {
            assert!((p - 0.5 * PI * n as f64).abs() < 1e-12);
        }

        let w = fine_beam_weights(&half(2), -1.0);
        assert_eq!(w.phases()[0], 0.0);
        assert!((w.phases()[1] + PI).abs() < 1e-15);
    }

    #[test]
    fn coherent_sum_reaches_sqrt_n() {
        for n in [2, 5, 16, 64] {
            let geom = half(n);
            let w = fine_beam_weights(&geom, 0.3);
            let g = array_gain_sum(&w, &geom, 0.3, 1.0).unwrap();
            assert!((g.re - (n as f64).sqrt()).abs() < 1e-12);
            assert!(g.im.abs() < 1e-12);
        }
    }

    #[test]
    fn squinted_sum_matches_kernel() {
        let geom = half(16);
        let w = fine_beam_weights(&geom, 0.5);
        let g = array_gain_sum(&w, &geom, 0.5, 1.1).unwrap();
        assert!(g.norm() < 4.0);
        let k = gain_kernel(1.1 * 0.5 - 0.5, 16);
        assert!((g - k).norm() < 1e-12);
    }

    #[test]
    fn broadside_beam_null() {
        // First null of an N-element broadside beam sits at psi = 1 / (N d xi).
        let geom = half(8);
        let xi = 1.05;
        let psi = 1.0 / (8.0 * 0.5 * xi);
        let g = array_gain_sum(&BeamWeights::broadside(8), &geom, psi, xi).unwrap();
        assert!(g.norm() < 1e-9);
    }

    #[test]
    fn sum_rejects_wrong_weight_count() {
        let err = array_gain_sum(&BeamWeights::broadside(3), &half(4), 0.0, 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn kernel_reference_values() {
        assert!((gain_kernel(0.0, 16).norm() - 4.0).abs() < 1e-15);
        assert!(gain_kernel(0.125, 16).norm() < 1e-12);
        let g = gain_kernel(0.055375, 16).norm();
        assert!((g - 2.831_740_966_945_912).abs() < 1e-9);
        assert!((g / 8f64.sqrt() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn kernel_grating_lobe_limit() {
        for n in [2, 3, 7, 16] {
            for k in [-2.0, -1.0, 1.0, 2.0] {
                let g = gain_kernel(2.0 * k, n);
                assert!((g - Complex64::new((n as f64).sqrt(), 0.0)).norm() < 1e-12);
            }
        }
        // Just off the singular point the sum and the limit agree.
        let geom = half(9);
        let w = fine_beam_weights(&geom, 0.0);
        let x = 2.0 + 3e-13;
        let s = array_gain_sum(&w, &geom, x, 1.0).unwrap();
        assert!((s - gain_kernel(x, 9)).norm() < 1e-9);
    }

    #[test]
    fn equivalent_aoa_cases() {
        assert!((equivalent_aoa(PI / 6.0, 1.0).unwrap() - PI / 6.0).abs() < 1e-15);
        assert!((equivalent_aoa(PI / 6.0, 1.1).unwrap() - 0.55f64.asin()).abs() < 1e-15);
        assert!((0.55f64.asin() - 0.58236).abs() < 1e-5);
        assert!(matches!(
            equivalent_aoa(PI / 2.0, 1.017),
            Err(Error::OutsideVisibleRegion { .. })
        ));
    }

    #[test]
    fn psi_angle_round_trip() {
        for deg in [-90.0, -30.0, 0.0, 12.5, 90.0] {
            let p = PsiAngle::from_degrees(deg).unwrap();
            assert!((p.theta().to_degrees() - deg).abs() < 1e-6);
        }
        assert!(PsiAngle::new(1.01).is_err());
        assert_eq!(psi_to_degrees(1.02), 90.0);
    }

    proptest! {
        #[test]
        fn kernel_magnitude_bounded_and_even(x in -4.0f64..4.0, n in 2usize..65) {
            let bound = (n as f64).sqrt();
            let g = gain_kernel(x, n).norm();
            prop_assert!(g <= bound * (1.0 + 1e-12));
            prop_assert!((g - gain_kernel(-x, n).norm()).abs() <= 1e-9 * bound);
            prop_assert!((g - gain_kernel_abs(x, n)).abs() <= 1e-12 * bound);
        }

        #[test]
        fn kernel_nulls(n in 2usize..65, k in 1i64..200) {
            let k = k % (2 * n as i64);
            prop_assume!(k % n as i64 != 0);
            let x = 2.0 * k as f64 / n as f64;
            prop_assert!(gain_kernel(x, n).norm() < 1e-9);
        }
    }
}
