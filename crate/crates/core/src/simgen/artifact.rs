use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::mixture::{stream_rng, ARTIFACT_STREAM};
use crate::error::{Error, Result};
use crate::series::TimeSeriesSet;

/// Blink waveform `g(t; k1, theta1) - weight * g(t; k2, theta2)`, with `g` the
/// gamma density in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlinkShape {
    pub first: (f64, f64),
    pub second: (f64, f64),
    pub weight: f64,
}

impl Default for BlinkShape {
    fn default() -> Self {
        BlinkShape { first: (6.0, 0.018), second: (10.0, 0.02), weight: 0.6 }
    }
}

fn gamma_pdf(t: f64, shape: f64, scale: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    ((shape - 1.0) * t.ln() - t / scale - ln_gamma(shape) - shape * scale.ln()).exp()
}

impl BlinkShape {
    pub fn at(&self, t: f64) -> f64 {
        gamma_pdf(t, self.first.0, self.first.1) - self.weight * gamma_pdf(t, self.second.0, self.second.1)
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.first.0, self.first.1, self.second.0, self.second.1].iter().all(|v| v.is_finite() && *v > 0.0);
        if !ok || !self.weight.is_finite() {
            return Err(Error::InvalidParameter("gamma shape and scale must be positive and finite".into()));
        }
        Ok(())
    }
}

/// Eye-blink contamination.
///
/// With `relative` set, `amplitude` and `noise_sd` are multiples of each
/// target channel's standard deviation; otherwise they are absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactSpec {
    /// Blink onsets in seconds.
    pub onsets: Vec<f64>,
    #[serde(default)]
    pub shape: BlinkShape,
    pub amplitude: f64,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default = "default_support")]
    pub support_seconds: f64,
    #[serde(default)]
    pub relative: bool,
    pub target_channels: Vec<String>,
}

fn default_support() -> f64 {
    1.0
}

impl ArtifactSpec {
    /// `count` blinks spread evenly over a recording of `duration` seconds.
    pub fn evenly_spaced(count: usize, duration: f64) -> Vec<f64> {
        (0..count).map(|i| (i as f64 + 0.25) * duration / count as f64).collect()
    }

    fn validate(&self, duration: f64) -> Result<()> {
        self.shape.validate()?;
        if let Some(t) = self.onsets.iter().find(|t| !(**t >= 0.0 && **t < duration)) {
            return Err(Error::InvalidParameter(format!("blink onset {t} s outside recording [0, {duration})")));
        }
        if !(self.amplitude.is_finite() && self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(Error::InvalidParameter("artifact amplitude and noise must be finite".into()));
        }
        if self.support_seconds.is_nan() || self.support_seconds <= 0.0 {
            return Err(Error::InvalidParameter("blink support must be positive".into()));
        }
        Ok(())
    }
}

/// A single artifact channel: blinks at each onset (truncated to the support
/// and to the recording) plus white noise. `amplitude` and `noise_sd` are
/// taken as absolute here.
pub fn eyeblink_series(spec: &ArtifactSpec, n_samples: usize, fs: f64, seed: u64) -> Result<Vec<f64>> {
    blink_channel(spec, n_samples, fs, seed, 0, spec.amplitude, spec.noise_sd)
}

fn blink_channel(spec: &ArtifactSpec, n: usize, fs: f64, seed: u64, stream: u64, amp: f64, noise: f64) -> Result<Vec<f64>> {
    spec.validate(n as f64 / fs)?;
    let mut out = vec![0.0; n];
    let width = (spec.support_seconds * fs).round() as usize;
    for &onset in &spec.onsets {
        let start = (onset * fs).round() as usize;
        for (i, v) in out.iter_mut().skip(start).take(width).enumerate() {
            *v += amp * spec.shape.at(i as f64 / fs);
        }
    }
    if noise > 0.0 {
        let mut rng = stream_rng(seed, ARTIFACT_STREAM | stream);
        for v in &mut out {
            let e: f64 = rng.sample(StandardNormal);
            *v += noise * e;
        }
    }
    Ok(out)
}

fn sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Adds blinks to each target channel (matched case-insensitively).
pub fn contaminate(ts: &TimeSeriesSet, spec: &ArtifactSpec, seed: u64) -> Result<TimeSeriesSet> {
    let mut data = ts.channels().to_vec();
    for name in &spec.target_channels {
        let c = ts
            .labels()
            .iter()
            .position(|l| l.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Unknown { what: "artifact channel", name: name.clone() })?;
        let scale = if spec.relative { sd(&data[c]) } else { 1.0 };
        let blink = blink_channel(spec, ts.n_samples(), ts.fs(), seed, c as u64, spec.amplitude * scale, spec.noise_sd * scale)?;
        for (x, b) in data[c].iter_mut().zip(blink) {
            *x += b;
        }
    }
    let out = TimeSeriesSet::new(data, ts.fs(), ts.labels().to_vec())?;
    match ts.layout() {
        Some(l) => out.with_layout(l.clone()),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(onsets: Vec<f64>, amplitude: f64, noise_sd: f64) -> ArtifactSpec {
        ArtifactSpec {
            onsets,
            shape: BlinkShape::default(),
            amplitude,
            noise_sd,
            support_seconds: 1.0,
            relative: false,
            target_channels: vec![],
        }
    }

    #[test]
    fn single_blink_integrates_to_amplitude_times_one_minus_weight() {
        let fs = 1000.0;
        let x = eyeblink_series(&spec(vec![0.5], 3.0, 0.0), 3000, fs, 1).unwrap();
        let area: f64 = x.iter().sum::<f64>() / fs;
        assert!((area - 3.0 * 0.4).abs() < 1e-3, "area {area}");
        assert!(x[..500].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_amplitude_is_noise_only() {
        let x = eyeblink_series(&spec(vec![1.0], 0.0, 0.0), 500, 100.0, 1).unwrap();
        assert!(x.iter().all(|v| *v == 0.0));
        let y = eyeblink_series(&spec(vec![1.0], 0.0, 2.0), 500, 100.0, 1).unwrap();
        assert!((sd(&y) - 2.0).abs() < 0.3);
        assert_eq!(y, eyeblink_series(&spec(vec![1.0], 0.0, 2.0), 500, 100.0, 1).unwrap());
    }

    #[test]
    fn onset_outside_recording_is_rejected() {
        assert!(eyeblink_series(&spec(vec![5.0], 1.0, 0.0), 500, 100.0, 1).is_err());
        assert!(eyeblink_series(&spec(vec![-0.1], 1.0, 0.0), 500, 100.0, 1).is_err());
    }

    #[test]
    fn gamma_density_matches_factorial_form() {
        // k = 3: t^2 e^{-t/s} / (2 s^3)
        let (t, s) = (0.7f64, 0.4f64);
        let expected = t * t * (-t / s).exp() / (2.0 * s.powi(3));
        assert!((gamma_pdf(t, 3.0, s) - expected).abs() < 1e-12);
    }

    #[test]
    fn contaminate_touches_only_targets() {
        let ts = TimeSeriesSet::new(vec![[1.0, -1.0].repeat(100); 3], 100.0, vec!["A".into(), "B".into(), "C".into()]).unwrap();
        let mut s = spec(vec![0.1], 5.0, 0.0);
        s.relative = true;
        s.target_channels = vec!["b".into()];
        let out = contaminate(&ts, &s, 3).unwrap();
        assert_eq!(out.channel(0), ts.channel(0));
        assert_ne!(out.channel(1), ts.channel(1));
        s.target_channels = vec!["Z".into()];
        assert!(contaminate(&ts, &s, 3).is_err());
    }
}
