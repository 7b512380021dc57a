//! Seeded simulation of the mixture designs: AR(2) latents, fixed and
//! spatial mixing, and eye-blink contamination.

mod ar2;
mod artifact;
mod experiments;
mod mixture;

pub use ar2::{ar2_coefficients, ar2_spectrum, is_causal, Ar2Spec, BURN_IN};
pub use artifact::{contaminate, eyeblink_series, ArtifactSpec, BlinkShape};
pub use experiments::{experiment, replicate_seed, ExperimentSpec, Simulation, EXPERIMENTS};
pub use mixture::{simulate_mixture, spatial_mixing, MixtureSpec, NoiseScale};
