use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ar2::{ar2_coefficients, simulate_ar2, Ar2Spec};
use crate::error::{Error, Result};
use crate::layout::ChannelLayout;
use crate::series::TimeSeriesSet;

// Random stream layout: latent i uses stream i, channel noise for channel c
// uses NOISE_STREAM | c, artifact noise uses ARTIFACT_STREAM | c. Streams
// never overlap, so latents are independent by construction.
pub(crate) const NOISE_STREAM: u64 = 1 << 32;
pub(crate) const ARTIFACT_STREAM: u64 = 2 << 32;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// White-noise scale, shared by all channels or given per channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseScale {
    Uniform(f64),
    PerChannel(Vec<f64>),
}

impl NoiseScale {
    fn for_channel(&self, c: usize) -> f64 {
        match self {
            NoiseScale::Uniform(s) => *s,
            NoiseScale::PerChannel(v) => v[c],
        }
    }
}

/// `X(t) = A Z(t) + e(t)` with independent AR(2) latents `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub latents: Vec<Ar2Spec>,
    /// `N x L`, one row per channel.
    pub mixing: Vec<Vec<f64>>,
    pub noise_sd: NoiseScale,
    pub n_samples: usize,
    pub fs: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl MixtureSpec {
    pub fn n_channels(&self) -> usize {
        self.mixing.len()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.latents.len();
        if self.mixing.is_empty() {
            return Err(Error::SizeMismatch("mixing matrix has no rows".into()));
        }
        if let Some(row) = self.mixing.iter().position(|r| r.len() != l) {
            return Err(Error::SizeMismatch(format!(
                "mixing row {row} has {} entries for {l} latents",
                self.mixing[row].len()
            )));
        }
        if self.mixing.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("mixing coefficients must be finite".into()));
        }
        if let NoiseScale::PerChannel(v) = &self.noise_sd {
            if v.len() != self.mixing.len() {
                return Err(Error::SizeMismatch(format!("{} noise scales for {} channels", v.len(), self.mixing.len())));
            }
        }
        let n = self.n_channels();
        if (0..n).map(|c| self.noise_sd.for_channel(c)).any(|s| !(s.is_finite() && s >= 0.0)) {
            return Err(Error::InvalidParameter("noise sd must be finite and non-negative".into()));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 samples, got {}", self.n_samples)));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::SizeMismatch(format!("{} labels for {n} channels", labels.len())));
            }
        }
        for z in &self.latents {
            z.validate(self.fs)?;
        }
        Ok(())
    }
}

/// Simulates the latents, mixes them and adds per-channel white noise.
pub fn simulate_mixture(spec: &MixtureSpec) -> Result<TimeSeriesSet> {
    spec.validate()?;
    let t = spec.n_samples;
    let latents = spec
        .latents
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let phi = ar2_coefficients(z, spec.fs)?;
            Ok(simulate_ar2(phi, z.innovation_sd, t, &mut stream_rng(spec.seed, i as u64)))
        })
        .collect::<Result<Vec<_>>>()?;
    let data = spec
        .mixing
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let sd = spec.noise_sd.for_channel(c);
            let mut rng = stream_rng(spec.seed, NOISE_STREAM | c as u64);
            (0..t)
                .map(|s| {
                    let signal: f64 = row.iter().zip(&latents).map(|(a, z)| a * z[s]).sum();
                    let e: f64 = rng.sample(StandardNormal);
                    signal + sd * e
                })
                .collect()
        })
        .collect();
    match &spec.labels {
        Some(labels) => TimeSeriesSet::new(data, spec.fs, labels.clone()),
        None => TimeSeriesSet::unlabeled(data, spec.fs),
    }
}

/// `A[s][i] = exp(-||s - s_i|| / kappa)` for every channel `s` of the layout.
pub fn spatial_mixing(layout: &ChannelLayout, sources: &[&str], kappa: f64) -> Result<Vec<Vec<f64>>> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    let at = sources
        .iter()
        .map(|s| layout.get(s).ok_or_else(|| Error::Unknown { what: "source channel", name: s.to_string() }))
        .collect::<Result<Vec<_>>>()?;
    Ok(layout
        .positions
        .iter()
        .map(|p| at.iter().map(|(x, y)| (-(p.x - x).hypot(p.y - y) / kappa).exp()).collect())
        .collect())
}
