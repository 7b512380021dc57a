//! Hierarchical agglomeration of channels: HCC (cluster-coherence
//! dissimilarity), average/complete linkage on integrated coherence, and a
//! spectral-shape baseline. Every engine records a full [`MergeHistory`].

mod baseline;
mod engine;
mod hcc;
mod history;
mod linkage;

pub use baseline::{spectral_baseline, spectral_baseline_from_spectra};
pub use hcc::{hcc, hcc_on_band_matrices};
pub use history::{cut, scree, suggest_k, MergeHistory, MergeStep, Method, ScreeCurve, DEFAULT_ELBOW_THRESHOLD};
pub use linkage::{linkage_cluster, Linkage};
