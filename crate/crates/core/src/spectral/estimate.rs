use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::field::KernelInfo;
use super::gcv::select_span_autos;
use super::kernel::{kernel, reflect, smooth, KernelFamily};
use super::periodogram::{dft_coefficients, fourier_freqs, periodogram_matrix};
use crate::error::{Error, Result};
use crate::series::TimeSeriesSet;

/// Candidate spans tried by GCV when none are given.
pub const DEFAULT_GCV_SPANS: [usize; 6] = [1, 2, 4, 8, 16, 32];

/// How the periodogram is smoothed into a spectral-matrix estimate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Smoothing {
    Fixed { family: KernelFamily, span: usize },
    Gcv { family: KernelFamily, candidates: Vec<usize> },
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::Gcv { family: KernelFamily::Fejer, candidates: DEFAULT_GCV_SPANS.to_vec() }
    }
}

impl Smoothing {
    pub fn fejer(span: usize) -> Self {
        Smoothing::Fixed { family: KernelFamily::Fejer, span }
    }

    pub fn daniell(span: usize) -> Self {
        Smoothing::Fixed { family: KernelFamily::Daniell, span }
    }
}

impl Smoothing {
    /// Resolves the kernel for `bins` Fourier frequencies given raw
    /// auto-periodograms. Under GCV, candidate spans that do not fit are
    /// dropped first.
    fn resolve(&self, autos: &[Vec<f64>], bins: usize) -> Result<(KernelFamily, usize)> {
        match self {
            Smoothing::Fixed { family, span } => Ok((*family, *span)),
            Smoothing::Gcv { family, candidates } => {
                let legal: Vec<usize> = candidates.iter().copied().filter(|&m| m >= 1 && 2 * m < bins).collect();
                if legal.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "no candidate span fits {bins} Fourier frequencies"
                    )));
                }
                Ok((*family, select_span_autos(autos, &legal, *family)?))
            }
        }
    }
}

/// Periodogram followed by kernel smoothing.
pub fn estimate_spectrum(ts: &TimeSeriesSet, smoothing: &Smoothing) -> Result<SpectralField> {
    let pg = periodogram_matrix(ts)?;
    let autos: Vec<Vec<f64>> = (0..pg.n_channels()).map(|c| pg.auto_spectrum(c)).collect();
    let (family, span) = smoothing.resolve(&autos, pg.n_freqs())?;
    smooth(&pg, &kernel(family, span)?)
}

/// Smoothed auto-spectra only, one row per channel. Avoids building the
/// full `N x N` field when cross-spectra are not needed.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoSpectra {
    pub freqs: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    pub kernel: KernelInfo,
}

pub fn smoothed_auto_spectra(ts: &TimeSeriesSet, smoothing: &Smoothing) -> Result<AutoSpectra> {
    let coefs = dft_coefficients(ts)?;
    let scale = ts.n_samples() as f64;
    let raw: Vec<Vec<f64>> = coefs.iter().map(|d| d.iter().map(|z| z.norm_sqr() / scale).collect()).collect();
    let bins = raw.first().map_or(0, Vec::len);
    let (family, span) = smoothing.resolve(&raw, bins)?;
    let k = kernel(family, span)?;
    super::kernel::check_span_fits(span, bins)?;
    let m = span as isize;
    let spectra = raw
        .iter()
        .map(|r| {
            (0..bins)
                .map(|j| (-m..=m).map(|lag| k.weight(lag) * r[reflect(j as isize + lag, bins)]).sum())
                .collect()
        })
        .collect();
    Ok(AutoSpectra { freqs: fourier_freqs(ts), spectra, kernel: k.info() })
}
