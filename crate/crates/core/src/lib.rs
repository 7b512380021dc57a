//! Cluster coherence and hierarchical cluster-coherence (HCC) clustering of
//! multichannel time series.
//!
//! The usual flow is series → [`spectral::estimate_spectrum`] →
//! [`spectral::coherence_field`] → [`clustering::hcc`] → [`clustering::cut`].
//! [`Analysis`] bundles those steps and shares one spectral estimate across
//! methods and bands.

pub mod bands;
pub mod clustering;
pub mod coherence;
pub mod error;
pub mod eval;
pub mod layout;
pub mod partition;
pub mod series;
pub mod simgen;
pub mod spectral;

/// Matrix types used in the public API.
pub use nalgebra;

pub use bands::{standard_band, standard_bands, FrequencyBand};
pub use clustering::{cut, scree, suggest_k, MergeHistory, MergeStep, Method, ScreeCurve};
pub use coherence::{cluster_coherence, ClusterPair, Measure};
pub use error::{Error, Result};
pub use eval::{affinity, agreement, scree_band, AffinityMatrix, ScreeBand};
pub use layout::{standard_1020_layout, ChannelLayout, ChannelPosition};
pub use partition::Partition;
pub use series::TimeSeriesSet;
pub use spectral::{KernelFamily, Smoothing, SpectralField};

use clustering::{hcc, linkage_cluster, spectral_baseline, Linkage};
use spectral::{coherence_field, estimate_spectrum, integrate_band};

/// Smoothed spectrum and coherence of one dataset, reusable across
/// clustering methods and bands.
#[derive(Debug, Clone)]
pub struct Analysis {
    series: TimeSeriesSet,
    smoothing: Smoothing,
    spectrum: SpectralField,
    coherence: SpectralField,
}

impl Analysis {
    pub fn new(series: TimeSeriesSet, smoothing: Smoothing) -> Result<Self> {
        let spectrum = estimate_spectrum(&series, &smoothing)?;
        let coherence = coherence_field(&spectrum)?;
        Ok(Analysis { series, smoothing, spectrum, coherence })
    }

    pub fn series(&self) -> &TimeSeriesSet {
        &self.series
    }

    pub fn spectrum(&self) -> &SpectralField {
        &self.spectrum
    }

    pub fn coherence(&self) -> &SpectralField {
        &self.coherence
    }

    pub fn cluster(&self, method: Method, band: &FrequencyBand) -> Result<MergeHistory> {
        band.validate_for(self.series.fs())?;
        match method {
            Method::HccP1 => hcc(&self.coherence, band, 1),
            Method::HccP2 => hcc(&self.coherence, band, 2),
            Method::Hac => linkage_cluster(&integrate_band(&self.coherence, band)?, Linkage::Average, band.clone()),
            Method::Hmc => linkage_cluster(&integrate_band(&self.coherence, band)?, Linkage::Complete, band.clone()),
            Method::SpectralBaseline => spectral_baseline(&self.series, band, &self.smoothing),
        }
    }
}

/// One-shot clustering. The spectral baseline skips the full coherence
/// field and only estimates auto-spectra.
pub fn cluster_series(series: &TimeSeriesSet, method: Method, band: &FrequencyBand, smoothing: &Smoothing) -> Result<MergeHistory> {
    if method == Method::SpectralBaseline {
        band.validate_for(series.fs())?;
        return spectral_baseline(series, band, smoothing);
    }
    Analysis::new(series.clone(), smoothing.clone())?.cluster(method, band)
}
