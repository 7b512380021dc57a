//! Spectral-matrix estimation: periodogram matrices, kernel smoothing with
//! GCV span selection, and the pairwise squared-coherence field.

mod estimate;
mod field;
mod gcv;
mod kernel;
mod pairwise;
mod periodogram;

pub use estimate::{estimate_spectrum, smoothed_auto_spectra, AutoSpectra, Smoothing, DEFAULT_GCV_SPANS};
pub use field::{CMatrix, FieldKind, KernelInfo, SpectralField};
pub use gcv::{gcv_score, select_span_gcv};
pub use kernel::{daniell_kernel, fejer_kernel, kernel, smooth, KernelFamily, SmoothingKernel};
pub use pairwise::{coherence_field, integrate_band};
pub use periodogram::{fourier_freqs, periodogram_matrix};
