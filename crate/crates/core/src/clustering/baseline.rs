//! Spectral-shape baseline: agglomerates channels whose normalized
//! auto-spectra look alike, regardless of whether they are correlated.
//! Merged clusters are represented by the average of their members'
//! spectra. Labelled `spectral-baseline`; this is a simplified stand-in
//! for spectral-synchronization methods, not a reimplementation of one.

use super::engine::{agglomerate, Agglomerator, Node};
use super::history::{MergeHistory, Method};
use crate::bands::FrequencyBand;
use crate::error::{Error, Result};
use crate::series::TimeSeriesSet;
use crate::spectral::{smoothed_auto_spectra, Smoothing};

struct ShapeRule {
    spectra: Vec<Vec<f64>>,
}

fn unit_area(v: &[f64]) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / v.len() as f64; v.len()]
    }
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

impl Agglomerator for ShapeRule {
    /// (sum of member spectra, normalized average spectrum)
    type State = (Vec<f64>, Vec<f64>);

    fn singleton(&self, c: usize) -> Self::State {
        (self.spectra[c].clone(), unit_area(&self.spectra[c]))
    }

    fn initial(&self, a: usize, b: usize) -> f64 {
        total_variation(&unit_area(&self.spectra[a]), &unit_area(&self.spectra[b]))
    }

    fn merge(&self, a: &Node<Self::State>, b: &Node<Self::State>, _: &[usize]) -> Self::State {
        let sum: Vec<f64> = a.state.0.iter().zip(&b.state.0).map(|(x, y)| x + y).collect();
        let shape = unit_area(&sum);
        (sum, shape)
    }

    fn dissimilarity(&self, a: &Node<Self::State>, b: &Node<Self::State>) -> f64 {
        total_variation(&a.state.1, &b.state.1)
    }
}

/// Baseline on precomputed auto-spectra (rows = channels) over the bins of
/// `band`. Dissimilarity is the total-variation distance between
/// unit-area spectra, which lies in `[0, 1]`.
pub fn spectral_baseline_from_spectra(freqs: &[f64], spectra: &[Vec<f64>], band: &FrequencyBand) -> Result<MergeHistory> {
    if spectra.len() < 2 {
        return Err(Error::TooFewChannels { needed: 2, got: spectra.len() });
    }
    let bins = band.select(freqs)?;
    let restricted = spectra.iter().map(|s| bins.iter().map(|&j| s[j]).collect()).collect();
    Ok(agglomerate(&ShapeRule { spectra: restricted }, spectra.len(), Method::SpectralBaseline, band.clone()))
}

pub fn spectral_baseline(ts: &TimeSeriesSet, band: &FrequencyBand, smoothing: &Smoothing) -> Result<MergeHistory> {
    if ts.n_channels() < 2 {
        return Err(Error::TooFewChannels { needed: 2, got: ts.n_channels() });
    }
    band.validate_for(ts.fs())?;
    let autos = smoothed_auto_spectra(ts, smoothing)?;
    spectral_baseline_from_spectra(&autos.freqs, &autos.spectra, band)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_shapes_merge_at_zero() {
        let freqs = [1.0, 2.0, 3.0, 4.0];
        let spectra = vec![vec![1.0, 4.0, 1.0, 0.5], vec![2.0, 8.0, 2.0, 1.0], vec![4.0, 1.0, 0.5, 0.5]];
        let h = spectral_baseline_from_spectra(&freqs, &spectra, &FrequencyBand::new(0.0, 5.0).unwrap()).unwrap();
        assert_eq!(h.steps[0].merged, (0, 1));
        assert!(h.steps[0].dissimilarity.abs() < 1e-15);
        assert!(h.steps.iter().all(|s| (0.0..=1.0).contains(&s.dissimilarity)));
        assert_eq!(h.method, Method::SpectralBaseline);
    }

    #[test]
    fn disjoint_support_is_distance_one() {
        let freqs = [1.0, 2.0];
        let spectra = vec![vec![1.0, 0.0], vec![0.0, 3.0]];
        let h = spectral_baseline_from_spectra(&freqs, &spectra, &FrequencyBand::new(0.0, 5.0).unwrap()).unwrap();
        assert!((h.steps[0].dissimilarity - 1.0).abs() < 1e-15);
    }
}
