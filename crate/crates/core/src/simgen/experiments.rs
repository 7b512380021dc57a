use serde::{Deserialize, Serialize};

use super::ar2::Ar2Spec;
use super::artifact::{contaminate, ArtifactSpec, BlinkShape};
use super::mixture::{simulate_mixture, spatial_mixing, MixtureSpec, NoiseScale};
use crate::bands::{standard_band, FrequencyBand};
use crate::error::{Error, Result};
use crate::layout::{standard_1020_layout, ChannelLayout};
use crate::partition::Partition;
use crate::series::TimeSeriesSet;

/// Names accepted by [`ExperimentSpec::preset`] and [`experiment`].
pub const EXPERIMENTS: [&str; 7] = ["exp1", "exp2-case1", "exp2-case2", "exp3", "exp4", "artifact", "illustration1"];

const T: usize = 1000;
const FS: f64 = 100.0;
const KAPPA: f64 = 1.0 / 3.0;

/// A complete, serializable simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub mixture: MixtureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<ChannelLayout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifact: Option<ArtifactSpec>,
    pub band: FrequencyBand,
    pub reference: Partition,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

/// One realization of an [`ExperimentSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub data: TimeSeriesSet,
    /// The uncontaminated data when the scenario adds artifacts.
    pub clean: Option<TimeSeriesSet>,
    pub reference: Partition,
    pub band: FrequencyBand,
    pub seed: u64,
}

/// SplitMix64 finalizer applied to `base + index`: decorrelates the seeds of
/// consecutive replicates.
pub fn replicate_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn band(name: &str) -> FrequencyBand {
    standard_band(name).expect("standard band")
}

fn fixed(name: &str, peaks: &[f64], mixing: Vec<Vec<f64>>, band: FrequencyBand, groups: &[usize]) -> ExperimentSpec {
    ExperimentSpec {
        name: name.into(),
        mixture: MixtureSpec {
            latents: peaks.iter().map(|&p| Ar2Spec::at(p)).collect(),
            mixing,
            noise_sd: NoiseScale::Uniform(1.0),
            n_samples: T,
            fs: FS,
            seed: 0,
            labels: None,
        },
        layout: None,
        artifact: None,
        band,
        reference: Partition::from_labels(groups).expect("nonempty reference"),
        replicates: 1,
        seed: 0,
    }
}

/// Each channel joins the source with the largest mixing weight. A channel
/// with several equally large weights has no nearest source and forms its
/// own block.
fn nearest_source(mixing: &[Vec<f64>]) -> Partition {
    let labels: Vec<usize> = mixing
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let winners: Vec<usize> = (0..row.len()).filter(|&i| (row[i] - best).abs() <= 1e-12).collect();
            if winners.len() == 1 {
                winners[0]
            } else {
                row.len() + c
            }
        })
        .collect();
    Partition::from_labels(&labels).expect("nonempty layout")
}

fn spatial(name: &str, sources: &[(&str, f64)], band: FrequencyBand) -> ExperimentSpec {
    let layout = standard_1020_layout();
    let names: Vec<&str> = sources.iter().map(|s| s.0).collect();
    let mixing = spatial_mixing(&layout, &names, KAPPA).expect("sources are standard channels");
    ExperimentSpec {
        name: name.into(),
        reference: nearest_source(&mixing),
        mixture: MixtureSpec {
            latents: sources.iter().map(|s| Ar2Spec::at(s.1)).collect(),
            mixing,
            noise_sd: NoiseScale::Uniform(1.0),
            n_samples: T,
            fs: FS,
            seed: 0,
            labels: Some(layout.names()),
        },
        layout: Some(layout),
        artifact: None,
        band,
        replicates: 1,
        seed: 0,
    }
}

impl ExperimentSpec {
    pub fn preset(name: &str) -> Result<Self> {
        let spec = match name {
            "exp1" => fixed(
                name,
                &[2.0, 2.0],
                vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]],
                band("delta"),
                &[0, 0, 0, 1, 1, 1],
            ),
            "exp2-case1" => fixed(
                name,
                &[2.0, 2.0],
                vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.2, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.2]],
                band("delta"),
                &[0, 0, 0, 1, 1, 1],
            ),
            // X6 loads more on the first latent, so it belongs with X1-X3.
            "exp2-case2" => fixed(
                name,
                &[2.0, 2.0],
                vec![vec![1.0, 0.0], vec![0.8, 0.2], vec![0.4, 0.1], vec![0.0, 1.0], vec![0.2, 0.8], vec![0.3, 0.2]],
                band("delta"),
                &[0, 0, 0, 1, 1, 0],
            ),
            "exp3" => {
                let blocks: [([f64; 5], usize); 5] = [
                    ([1.0, 0.2, 0.0, 0.0, 0.0], 25),
                    ([0.0, 1.0, 0.0, 0.0, 0.0], 25),
                    ([0.0, 0.2, 1.0, 0.0, 0.0], 25),
                    ([0.0, 0.0, 0.0, 1.0, 0.0], 25),
                    ([0.0, 0.0, 0.0, 0.0, 1.0], 28),
                ];
                let mixing = blocks.iter().flat_map(|(row, n)| std::iter::repeat_n(row.to_vec(), *n)).collect();
                let groups: Vec<usize> = blocks.iter().enumerate().flat_map(|(g, (_, n))| std::iter::repeat_n(g, *n)).collect();
                fixed(name, &[2.0, 6.0, 10.0, 15.0, 40.0], mixing, band("beta"), &groups)
            }
            "exp4" => spatial(name, &[("C3", 9.0), ("C4", 9.0), ("Pz", 10.0), ("Fz", 10.0)], band("alpha")),
            "artifact" => {
                let mut spec = spatial(
                    name,
                    &[("C3", 9.0), ("C4", 9.0), ("Pz", 10.0), ("Fp1", 5.0), ("Fp2", 5.0)],
                    band("alpha"),
                );
                spec.artifact = Some(ArtifactSpec {
                    onsets: ArtifactSpec::evenly_spaced(4, T as f64 / FS),
                    shape: BlinkShape::default(),
                    amplitude: 10.0,
                    noise_sd: 0.1,
                    support_seconds: 1.0,
                    relative: true,
                    target_channels: ["Fp1", "Fp2", "F7", "F8"].map(String::from).to_vec(),
                });
                spec
            }
            "illustration1" => fixed(
                name,
                &[3.0, 5.0, 9.0],
                vec![vec![1.0, 0.2, 0.0], vec![1.0, 0.6, 0.0], vec![0.3, 0.7, 0.3]],
                FrequencyBand::named("delta+theta", 0.0, 8.0),
                &[0, 0, 1],
            ),
            _ => return Err(Error::Unknown { what: "experiment", name: name.into() }),
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.mixture.validate()?;
        self.band.validate_for(self.mixture.fs)?;
        if self.reference.n() != self.mixture.n_channels() {
            return Err(Error::SizeMismatch(format!(
                "reference covers {} channels, mixture has {}",
                self.reference.n(),
                self.mixture.n_channels()
            )));
        }
        if let Some(layout) = &self.layout {
            let labels = self.mixture.labels.as_ref().ok_or_else(|| Error::InvalidParameter("a layout needs channel labels".into()))?;
            if let Some(l) = labels.iter().find(|l| layout.get(l).is_none()) {
                return Err(Error::Unknown { what: "layout channel", name: l.clone() });
            }
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be at least 1".into()));
        }
        Ok(())
    }

    /// Realization for a concrete seed; the spec's own `seed` is ignored.
    pub fn simulate(&self, seed: u64) -> Result<Simulation> {
        self.validate()?;
        let mut mixture = self.mixture.clone();
        mixture.seed = seed;
        let mut clean = simulate_mixture(&mixture)?;
        if let Some(layout) = &self.layout {
            clean = clean.with_layout(layout.clone())?;
        }
        let (data, clean) = match &self.artifact {
            Some(a) => (contaminate(&clean, a, seed)?, Some(clean)),
            None => (clean, None),
        };
        Ok(Simulation { data, clean, reference: self.reference.clone(), band: self.band.clone(), seed })
    }

    /// Realization `index` of the replicate series rooted at `self.seed`.
    pub fn replicate(&self, index: usize) -> Result<Simulation> {
        self.simulate(replicate_seed(self.seed, index as u64))
    }
}

/// Data, ground-truth grouping and analysis band of a named design.
pub fn experiment(name: &str, seed: u64) -> Result<(TimeSeriesSet, Partition, FrequencyBand)> {
    let sim = ExperimentSpec::preset(name)?.simulate(seed)?;
    Ok((sim.data, sim.reference, sim.band))
}
