use num_complex::Complex64;
use rustfft::FftPlanner;

use super::field::{CMatrix, FieldKind, SpectralField};
use crate::error::{Error, Result};
use crate::series::TimeSeriesSet;

/// Discrete Fourier coefficients of each mean-centered channel at bins
/// `1..=T/2`. Row c holds channel c.
pub(crate) fn dft_coefficients(ts: &TimeSeriesSet) -> Result<Vec<Vec<Complex64>>> {
    let t = ts.n_samples();
    if t < 2 {
        return Err(Error::InvalidSeries(format!("need at least 2 samples, got {t}")));
    }
    let half = t / 2;
    let fft = FftPlanner::new().plan_fft_forward(t);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut out = Vec::with_capacity(ts.n_channels());
    for (c, x) in ts.channels().iter().enumerate() {
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { channel: c, index: i });
        }
        let mean = x.iter().sum::<f64>() / t as f64;
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
        fft.process_with_scratch(&mut buf, &mut scratch);
        out.push(buf[1..=half].to_vec());
    }
    Ok(out)
}

/// Fourier frequencies `j fs / T` for `j = 1..=T/2`, in Hz.
pub fn fourier_freqs(ts: &TimeSeriesSet) -> Vec<f64> {
    let t = ts.n_samples();
    (1..=t / 2).map(|j| j as f64 * ts.fs() / t as f64).collect()
}

/// Periodogram matrices `I(w_j) = d(w_j) d(w_j)* / T` at the Fourier
/// frequencies `j fs / T`, `j = 1..=T/2`.
pub fn periodogram_matrix(ts: &TimeSeriesSet) -> Result<SpectralField> {
    let d = dft_coefficients(ts)?;
    let t = ts.n_samples() as f64;
    let n = ts.n_channels();
    let freqs = fourier_freqs(ts);
    let mats = (0..freqs.len())
        .map(|j| {
            let mut m = CMatrix::zeros(n, n);
            for a in 0..n {
                m[(a, a)] = Complex64::new(d[a][j].norm_sqr() / t, 0.0);
                for b in (a + 1)..n {
                    let v = d[a][j] * d[b][j].conj() / t;
                    m[(a, b)] = v;
                    m[(b, a)] = v.conj();
                }
            }
            m
        })
        .collect();
    SpectralField::new(freqs, mats, FieldKind::RawPeriodogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    #[test]
    fn pure_cosine_concentrates_at_its_bin() {
        let (t, j0, a) = (256usize, 17usize, 1.5);
        let x: Vec<f64> = (0..t).map(|s| a * (2.0 * PI * j0 as f64 * s as f64 / t as f64).cos()).collect();
        let ts = TimeSeriesSet::unlabeled(vec![x], 1.0).unwrap();
        let pg = periodogram_matrix(&ts).unwrap();
        assert_eq!(pg.n_freqs(), t / 2);
        for (j, m) in pg.matrices().iter().enumerate() {
            let v = m[(0, 0)].re;
            if j + 1 == j0 {
                assert!((v - t as f64 * a * a / 4.0).abs() < 1e-9);
            } else {
                assert!(v.abs() < 1e-18 * t as f64 + 1e-20, "bin {} = {v}", j + 1);
            }
        }
    }

    #[test]
    fn identical_channels_give_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..100).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let ts = TimeSeriesSet::unlabeled(vec![x.clone(), x], 1.0).unwrap();
        let pg = periodogram_matrix(&ts).unwrap();
        for m in pg.matrices() {
            assert!((m[(0, 1)] - m[(0, 0)]).norm() < 1e-12 * (1.0 + m[(0, 0)].re));
            assert!(m[(0, 0)].re >= 0.0);
        }
        assert!(pg.max_hermitian_defect() < 1e-10);
    }

    #[test]
    fn white_noise_periodogram_is_flat_at_variance() {
        // Monte-Carlo: averaged ordinates estimate the flat spectrum sigma^2.
        let sigma2: f64 = 2.25;
        let mut total = 0.0;
        let mut count = 0usize;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..1024).map(|_| sigma2.sqrt() * rng.sample::<f64, _>(StandardNormal)).collect();
            let pg = periodogram_matrix(&TimeSeriesSet::unlabeled(vec![x], 1.0).unwrap()).unwrap();
            total += pg.auto_spectrum(0).iter().sum::<f64>();
            count += pg.n_freqs();
        }
        let mean = total / count as f64;
        assert!((mean - sigma2).abs() < 0.2 * sigma2, "mean ordinate {mean}");
    }

    #[test]
    fn parseval_with_nyquist_counted_once() {
        for t in [512usize, 513] {
            let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
            let x: Vec<f64> = (0..t).map(|_| 3.0 + rng.sample::<f64, _>(StandardNormal)).collect();
            let mean = x.iter().sum::<f64>() / t as f64;
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t as f64;
            let pg = periodogram_matrix(&TimeSeriesSet::unlabeled(vec![x], 1.0).unwrap()).unwrap();
            let s = pg.auto_spectrum(0);
            let mut two_sided = 2.0 * s.iter().sum::<f64>();
            if t % 2 == 0 {
                two_sided -= s[s.len() - 1];
            }
            assert!((var - two_sided / t as f64).abs() < 1e-10 * var);
            // the coarse form (2/T) sum I holds to 1%
            assert!((var - 2.0 * s.iter().sum::<f64>() / t as f64).abs() < 0.01 * var);
        }
    }

    #[test]
    fn frequencies_in_hz() {
        let ts = TimeSeriesSet::unlabeled(vec![vec![0.0, 1.0, 0.0, 1.0, 2.0]; 1], 100.0).unwrap();
        let pg = periodogram_matrix(&ts).unwrap();
        assert_eq!(pg.freqs(), &[20.0, 40.0]);
    }
}
