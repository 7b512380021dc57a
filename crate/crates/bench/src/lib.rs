//! Shared fixtures for the criterion benchmarks.

use hcc_core::simgen::{simulate_mixture, Ar2Spec, MixtureSpec, NoiseScale};
use hcc_core::TimeSeriesSet;

/// `n` channels of `t` samples mixing three AR(2) sources at 3, 10 and 20 Hz.
pub fn mixture(n: usize, t: usize, seed: u64) -> TimeSeriesSet {
    let latents = vec![Ar2Spec::at(3.0), Ar2Spec::at(10.0), Ar2Spec::at(20.0)];
    let mixing = (0..n).map(|i| (0..3).map(|l| if i % 3 == l { 1.0 } else { 0.2 }).collect()).collect();
    let spec = MixtureSpec {
        latents,
        mixing,
        noise_sd: NoiseScale::Uniform(1.0),
        n_samples: t,
        fs: 100.0,
        seed,
        labels: None,
    };
    simulate_mixture(&spec).expect("valid mixture")
}
