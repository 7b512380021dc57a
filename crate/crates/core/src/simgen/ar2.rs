use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples simulated and discarded before recording.
pub const BURN_IN: usize = 500;

/// A second-order autoregressive latent with a unimodal spectral peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar2Spec {
    pub peak_hz: f64,
    #[serde(default = "default_modulus")]
    pub modulus: f64,
    #[serde(default = "default_sd")]
    pub innovation_sd: f64,
}

fn default_modulus() -> f64 {
    0.95
}

fn default_sd() -> f64 {
    1.0
}

impl Ar2Spec {
    /// Peak at `peak_hz` with modulus 0.95 and unit innovations.
    pub fn at(peak_hz: f64) -> Self {
        Ar2Spec { peak_hz, modulus: default_modulus(), innovation_sd: default_sd() }
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if !(self.peak_hz > 0.0 && self.peak_hz < fs / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "AR(2) peak {} Hz must lie strictly between 0 and Nyquist {} Hz",
                self.peak_hz,
                fs / 2.0
            )));
        }
        if !(self.modulus > 0.0 && self.modulus < 1.0) {
            return Err(Error::InvalidParameter(format!("AR(2) modulus {} outside (0, 1)", self.modulus)));
        }
        if !(self.innovation_sd.is_finite() && self.innovation_sd >= 0.0) {
            return Err(Error::InvalidParameter(format!("innovation sd {} invalid", self.innovation_sd)));
        }
        Ok(())
    }
}

/// `(phi1, phi2)` with complex roots `r exp(+-i 2 pi peak / fs)`.
pub fn ar2_coefficients(spec: &Ar2Spec, fs: f64) -> Result<(f64, f64)> {
    spec.validate(fs)?;
    let r = spec.modulus;
    Ok((2.0 * r * (2.0 * PI * spec.peak_hz / fs).cos(), -r * r))
}

/// Closed-form spectral density `sigma^2 / |1 - phi1 e^{-iw} - phi2 e^{-2iw}|^2`
/// at `hz` (unnormalized; only its shape matters).
pub fn ar2_spectrum(phi: (f64, f64), sigma: f64, hz: f64, fs: f64) -> f64 {
    let w = 2.0 * PI * hz / fs;
    let re = 1.0 - phi.0 * w.cos() - phi.1 * (2.0 * w).cos();
    let im = phi.0 * w.sin() + phi.1 * (2.0 * w).sin();
    sigma * sigma / (re * re + im * im)
}

/// Causality region of an AR(2): `|phi2| < 1` and `phi2 +- phi1 < 1`.
pub fn is_causal(phi: (f64, f64)) -> bool {
    phi.1.abs() < 1.0 && phi.1 + phi.0 < 1.0 && phi.1 - phi.0 < 1.0
}

/// `n` samples after a [`BURN_IN`] warm-up started from zeros.
pub(crate) fn simulate_ar2<R: Rng>(phi: (f64, f64), sd: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let (mut z1, mut z2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for t in 0..BURN_IN + n {
        let e: f64 = rng.sample(StandardNormal);
        let z = phi.0 * z1 + phi.1 * z2 + sd * e;
        z2 = z1;
        z1 = z;
        if t >= BURN_IN {
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_examples() {
        let (p1, p2) = ar2_coefficients(&Ar2Spec::at(2.0), 100.0).unwrap();
        assert!((p1 - 2.0 * 0.95 * (0.04 * PI).cos()).abs() < 1e-15);
        assert!((p1 - 1.8850).abs() < 1e-4);
        assert_eq!(p2, -0.9025);
        let spec = Ar2Spec { peak_hz: 25.0, modulus: 0.7, innovation_sd: 1.0 };
        let (p1, p2) = ar2_coefficients(&spec, 100.0).unwrap();
        assert!(p1.abs() < 1e-15);
        assert!((p2 + 0.49).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(ar2_coefficients(&Ar2Spec::at(50.0), 100.0).is_err());
        assert!(ar2_coefficients(&Ar2Spec::at(0.0), 100.0).is_err());
        assert!(ar2_coefficients(&Ar2Spec { modulus: 1.0, ..Ar2Spec::at(5.0) }, 100.0).is_err());
        assert!(ar2_coefficients(&Ar2Spec { innovation_sd: f64::NAN, ..Ar2Spec::at(5.0) }, 100.0).is_err());
    }

    #[test]
    fn sharp_peak_lands_on_target() {
        let spec = Ar2Spec { modulus: 0.99, ..Ar2Spec::at(10.0) };
        let phi = ar2_coefficients(&spec, 100.0).unwrap();
        let grid = (1..50_000).map(|i| i as f64 * 0.001);
        let best = grid.max_by(|a, b| ar2_spectrum(phi, 1.0, *a, 100.0).total_cmp(&ar2_spectrum(phi, 1.0, *b, 100.0))).unwrap();
        assert!((best - 10.0).abs() <= 0.1, "argmax {best}");
    }
}
