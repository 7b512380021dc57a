use super::field::{FieldKind, SpectralField};
use super::kernel::{check_span_fits, kernel, reflect, KernelFamily, SmoothingKernel};
use crate::error::{Error, Result};

const FLOOR: f64 = 1e-300;

/// Gamma-deviance generalized cross-validation score of a kernel on the
/// auto-spectra of a raw periodogram field:
///
/// `sum_{k,j} (r - ln r - 1) / (J N (1 - W(0))^2)`, with `r = I_k(w_j) / f_k(w_j)`.
pub fn gcv_score(pg: &SpectralField, kernel: &SmoothingKernel) -> Result<f64> {
    pg.expect_kind(FieldKind::RawPeriodogram)?;
    let autos: Vec<Vec<f64>> = (0..pg.n_channels()).map(|c| pg.auto_spectrum(c)).collect();
    gcv_score_autos(&autos, kernel)
}

/// GCV score from raw auto-periodograms, one row per channel.
pub(crate) fn gcv_score_autos(autos: &[Vec<f64>], kernel: &SmoothingKernel) -> Result<f64> {
    let n = autos.len();
    let len = autos.first().map_or(0, Vec::len);
    check_span_fits(kernel.span(), len)?;
    let m = kernel.span() as isize;
    let mut deviance = 0.0;
    for raw in autos {
        for j in 0..len {
            let smoothed: f64 = (-m..=m).map(|lag| kernel.weight(lag) * raw[reflect(j as isize + lag, len)]).sum();
            let r = raw[j].max(FLOOR) / smoothed.max(FLOOR);
            deviance += r - r.ln() - 1.0;
        }
    }
    let penalty = (1.0 - kernel.center_weight()).powi(2);
    Ok(deviance / (len as f64 * n as f64 * penalty))
}

/// Picks the span with the smallest GCV score; ties go to the smaller span.
pub fn select_span_gcv(pg: &SpectralField, candidates: &[usize], family: KernelFamily) -> Result<usize> {
    pg.expect_kind(FieldKind::RawPeriodogram)?;
    let autos: Vec<Vec<f64>> = (0..pg.n_channels()).map(|c| pg.auto_spectrum(c)).collect();
    select_span_autos(&autos, candidates, family)
}

pub(crate) fn select_span_autos(autos: &[Vec<f64>], candidates: &[usize], family: KernelFamily) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate spans".into()));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut best: Option<(usize, f64)> = None;
    for &m in &sorted {
        let score = gcv_score_autos(autos, &kernel(family, m)?)?;
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((m, score));
        }
    }
    Ok(best.expect("nonempty").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TimeSeriesSet;
    use crate::spectral::periodogram_matrix;

    fn noise_field() -> SpectralField {
        let x: Vec<f64> = (0..200).map(|i| ((i * 7919) % 101) as f64 - 50.0).collect();
        periodogram_matrix(&TimeSeriesSet::unlabeled(vec![x], 1.0).unwrap()).unwrap()
    }

    #[test]
    fn single_candidate_is_returned() {
        assert_eq!(select_span_gcv(&noise_field(), &[3], KernelFamily::Fejer).unwrap(), 3);
    }

    #[test]
    fn rejects_bad_candidates() {
        let pg = noise_field();
        assert!(select_span_gcv(&pg, &[], KernelFamily::Fejer).is_err());
        assert!(select_span_gcv(&pg, &[1, 500], KernelFamily::Fejer).is_err());
        assert!(select_span_gcv(&pg, &[0], KernelFamily::Daniell).is_err());
    }

    #[test]
    fn zero_periodogram_is_finite() {
        let pg = periodogram_matrix(&TimeSeriesSet::unlabeled(vec![vec![1.0; 64]], 1.0).unwrap()).unwrap();
        let s = gcv_score(&pg, &kernel(KernelFamily::Daniell, 2).unwrap()).unwrap();
        assert!(s.is_finite());
    }
}
