use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{CMatrix, FieldKind, SpectralField};
use crate::bands::FrequencyBand;
use crate::error::{Error, Result};

/// Squared coherence `|f_kl|^2 / (f_kk f_ll)` at every frequency, clamped to
/// `[0, 1]` with an exact unit diagonal.
pub fn coherence_field(spec: &SpectralField) -> Result<SpectralField> {
    spec.expect_kind(FieldKind::SmoothedSpectrum)?;
    let n = spec.n_channels();
    for (j, m) in spec.mats.iter().enumerate() {
        for c in 0..n {
            let v = m[(c, c)].re;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ZeroAutoSpectrum { channel: c, freq: spec.freqs[j] });
            }
        }
    }
    let mats: Vec<CMatrix> = spec
        .mats
        .par_iter()
        .map(|m| {
            let mut out = CMatrix::identity(n, n);
            for a in 0..n {
                for b in (a + 1)..n {
                    let v = (m[(a, b)].norm_sqr() / (m[(a, a)].re * m[(b, b)].re)).clamp(0.0, 1.0);
                    out[(a, b)] = Complex64::new(v, 0.0);
                    out[(b, a)] = Complex64::new(v, 0.0);
                }
            }
            out
        })
        .collect();
    let mut field = SpectralField::new(spec.freqs.clone(), mats, FieldKind::Coherence)?;
    field.kernel = spec.kernel;
    Ok(field)
}

/// Mean coherence matrix over the Fourier frequencies in `[lo, hi)`.
pub fn integrate_band(field: &SpectralField, band: &FrequencyBand) -> Result<DMatrix<f64>> {
    field.expect_kind(FieldKind::Coherence)?;
    let bins = field.band_indices(band)?;
    let n = field.n_channels();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for &j in &bins {
        acc.zip_apply(&field.mats[j], |a, z| *a += z.re);
    }
    acc /= bins.len() as f64;
    for a in 0..n {
        acc[(a, a)] = 1.0;
        for b in (a + 1)..n {
            let v = acc[(a, b)].clamp(0.0, 1.0);
            acc[(a, b)] = v;
            acc[(b, a)] = v;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(a: f64, b: f64, re: f64, im: f64) -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(a, 0.0), Complex64::new(re, im), Complex64::new(re, -im), Complex64::new(b, 0.0)],
        )
    }

    #[test]
    fn two_by_two_value() {
        let s = SpectralField::new(vec![1.0], vec![herm(2.0, 3.0, 1.0, 1.0)], FieldKind::SmoothedSpectrum).unwrap();
        let c = coherence_field(&s).unwrap();
        assert!((c.matrix(0)[(0, 1)].re - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.matrix(0)[(0, 0)].re, 1.0);
    }

    #[test]
    fn zero_auto_spectrum_names_channel_and_freq() {
        let s = SpectralField::new(
            vec![1.0, 2.0],
            vec![herm(1.0, 1.0, 0.0, 0.0), herm(1.0, 0.0, 0.0, 0.0)],
            FieldKind::SmoothedSpectrum,
        )
        .unwrap();
        match coherence_field(&s) {
            Err(Error::ZeroAutoSpectrum { channel, freq }) => assert_eq!((channel, freq), (1, 2.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_field_integrates_to_itself() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(if i == j { 1.0 } else { 0.3 + 0.1 * (i + j) as f64 }, 0.0));
        let f = SpectralField::new(vec![1.0, 2.0, 3.0], vec![m.clone(); 3], FieldKind::Coherence).unwrap();
        let out = integrate_band(&f, &FrequencyBand::new(0.0, 10.0).unwrap()).unwrap();
        assert!((out - m.map(|z| z.re)).norm() < 1e-15);
        assert!(matches!(
            integrate_band(&f, &FrequencyBand::new(1.2, 1.5).unwrap()),
            Err(Error::EmptyBand { .. })
        ));
    }
}
