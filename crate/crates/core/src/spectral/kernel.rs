use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{CMatrix, FieldKind, KernelInfo, SpectralField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Daniell,
    Fejer,
}

impl KernelFamily {
    pub(crate) fn code(self) -> u8 {
        match self {
            KernelFamily::Daniell => 1,
            KernelFamily::Fejer => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Result<Self> {
        match c {
            1 => Ok(KernelFamily::Daniell),
            2 => Ok(KernelFamily::Fejer),
            _ => Err(Error::Container(format!("unknown kernel family {c}"))),
        }
    }
}

/// Symmetric nonnegative weights over lags `-m..=m`, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingKernel {
    weights: Vec<f64>,
    family: KernelFamily,
    span: usize,
}

impl SmoothingKernel {
    pub fn span(&self) -> usize {
        self.span
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Weights indexed from lag `-m` to `m`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, lag: isize) -> f64 {
        let m = self.span as isize;
        if lag.abs() > m {
            0.0
        } else {
            self.weights[(lag + m) as usize]
        }
    }

    pub fn center_weight(&self) -> f64 {
        self.weights[self.span]
    }

    pub fn info(&self) -> KernelInfo {
        KernelInfo { family: self.family, span: self.span }
    }
}

fn check_span(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidKernel("span must be at least 1; an unsmoothed periodogram is inconsistent".into()));
    }
    Ok(())
}

/// Uniform weights `1 / (2m + 1)`.
pub fn daniell_kernel(m: usize) -> Result<SmoothingKernel> {
    check_span(m)?;
    let w = 1.0 / (2 * m + 1) as f64;
    Ok(SmoothingKernel { weights: vec![w; 2 * m + 1], family: KernelFamily::Daniell, span: m })
}

/// Fejér weights `w_k ∝ (1 - |k| / (m + 1))^2`, normalized to sum to one.
pub fn fejer_kernel(m: usize) -> Result<SmoothingKernel> {
    check_span(m)?;
    let raw: Vec<f64> = (-(m as isize)..=m as isize)
        .map(|k| (1.0 - k.unsigned_abs() as f64 / (m + 1) as f64).powi(2))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(SmoothingKernel { weights: raw.into_iter().map(|w| w / total).collect(), family: KernelFamily::Fejer, span: m })
}

pub fn kernel(family: KernelFamily, m: usize) -> Result<SmoothingKernel> {
    match family {
        KernelFamily::Daniell => daniell_kernel(m),
        KernelFamily::Fejer => fejer_kernel(m),
    }
}

/// Maps a possibly out-of-range bin index onto `0..len` by mirroring at
/// both ends (index -1 maps to 0, `len` maps to `len - 1`).
#[inline]
pub(crate) fn reflect(i: isize, len: usize) -> usize {
    let len = len as isize;
    let r = if i < 0 {
        -1 - i
    } else if i >= len {
        2 * len - 1 - i
    } else {
        i
    };
    r as usize
}

pub(crate) fn check_span_fits(span: usize, bins: usize) -> Result<()> {
    if 2 * span + 1 > bins {
        return Err(Error::SpanTooLarge { span, bins });
    }
    Ok(())
}

/// Kernel-weighted average of neighbouring periodogram matrices with
/// boundary bins reflected. Nonnegative weights keep every output
/// Hermitian positive semidefinite.
pub fn smooth(pg: &SpectralField, kernel: &SmoothingKernel) -> Result<SpectralField> {
    pg.expect_kind(FieldKind::RawPeriodogram)?;
    let len = pg.n_freqs();
    check_span_fits(kernel.span, len)?;
    let n = pg.n_channels();
    let m = kernel.span as isize;
    let mats: Vec<CMatrix> = (0..len)
        .into_par_iter()
        .map(|j| {
            let mut acc = vec![Complex64::default(); n * n];
            for lag in -m..=m {
                let w = kernel.weight(lag);
                let src = pg.mats[reflect(j as isize + lag, len)].as_slice();
                for (a, s) in acc.iter_mut().zip(src) {
                    *a += s * w;
                }
            }
            let mut out = CMatrix::from_vec(n, n, acc);
            // exact Hermitian symmetry regardless of summation roundoff
            for a in 0..n {
                out[(a, a)].im = 0.0;
                for b in (a + 1)..n {
                    out[(b, a)] = out[(a, b)].conj();
                }
            }
            out
        })
        .collect();
    let mut field = SpectralField::new(pg.freqs.clone(), mats, FieldKind::SmoothedSpectrum)?;
    field.kernel = Some(kernel.info());
    Ok(field)
}
