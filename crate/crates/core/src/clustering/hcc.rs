use nalgebra::DMatrix;

use super::engine::{agglomerate, Agglomerator, Node};
use super::history::{MergeHistory, Method};
use crate::bands::FrequencyBand;
use crate::coherence::{check_exponent, clamped_eigenvalues, gather, lp_distance, pooled_normalized};
use crate::error::{Error, Result};
use crate::spectral::{FieldKind, SpectralField};

struct HccRule<'a> {
    mats: &'a [DMatrix<f64>],
    p: u32,
}

impl Agglomerator for HccRule<'_> {
    /// Raw within-cluster eigenvalues (descending, clamped) at each band bin.
    type State = Vec<Vec<f64>>;

    fn singleton(&self, _: usize) -> Self::State {
        vec![vec![1.0]; self.mats.len()]
    }

    fn initial(&self, a: usize, b: usize) -> f64 {
        let mean = self.mats.iter().map(|c| c[(a, b)]).sum::<f64>() / self.mats.len() as f64;
        1.0 - mean.clamp(0.0, 1.0)
    }

    fn merge(&self, _: &Node<Self::State>, _: &Node<Self::State>, members: &[usize]) -> Self::State {
        self.mats.iter().map(|c| clamped_eigenvalues(gather(c, members))).collect()
    }

    fn dissimilarity(&self, a: &Node<Self::State>, b: &Node<Self::State>) -> f64 {
        let joint_idx: Vec<usize> = a.members.iter().chain(&b.members).copied().collect();
        let total = joint_idx.len() as f64;
        let sum: f64 = self
            .mats
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let joint: Vec<f64> = clamped_eigenvalues(gather(c, &joint_idx)).into_iter().map(|v| v / total).collect();
                lp_distance(&joint, &pooled_normalized(&a.state[j], &b.state[j]), self.p)
            })
            .sum();
        1.0 - sum / self.mats.len() as f64
    }
}

/// HCC on pre-extracted coherence matrices (one per Fourier bin of the band).
///
/// Starts from singletons with dissimilarity `1 - band-mean coherence`; after
/// each merge the new cluster's dissimilarity to every other cluster is
/// `1 - band-mean cluster coherence`.
pub fn hcc_on_band_matrices(mats: &[DMatrix<f64>], p: u32, band: FrequencyBand) -> Result<MergeHistory> {
    check_exponent(p)?;
    if mats.is_empty() {
        return Err(Error::EmptyBand { lo: band.lo, hi: band.hi });
    }
    let n = mats[0].nrows();
    if n < 2 {
        return Err(Error::TooFewChannels { needed: 2, got: n });
    }
    Ok(agglomerate(&HccRule { mats, p }, n, Method::hcc(p)?, band))
}

/// Hierarchical cluster coherence over the Fourier bins of `band`.
pub fn hcc(field: &SpectralField, band: &FrequencyBand, p: u32) -> Result<MergeHistory> {
    field.expect_kind(FieldKind::Coherence)?;
    check_exponent(p)?;
    if field.n_channels() < 2 {
        return Err(Error::TooFewChannels { needed: 2, got: field.n_channels() });
    }
    let bins = field.band_indices(band)?;
    hcc_on_band_matrices(&field.real_matrices(&bins), p, band.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::cut;
    use crate::spectral::CMatrix;
    use num_complex::Complex64;

    fn field(mats: Vec<DMatrix<f64>>) -> SpectralField {
        let freqs = (1..=mats.len()).map(|j| j as f64).collect();
        let cm = mats.into_iter().map(|m| m.map(|v| Complex64::new(v, 0.0))).collect::<Vec<CMatrix>>();
        SpectralField::new(freqs, cm, FieldKind::Coherence).unwrap()
    }

    #[test]
    fn two_channels_single_step() {
        let f = field(vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 1.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.8, 0.8, 1.0]),
        ]);
        let h = hcc(&f, &FrequencyBand::new(0.0, 10.0).unwrap(), 1).unwrap();
        assert_eq!(h.steps.len(), 1);
        assert!((h.steps[0].dissimilarity - 0.4).abs() < 1e-12);
        assert_eq!(h.method, Method::HccP1);
    }

    #[test]
    fn block_diagonal_final_merge_is_one() {
        let mut c = DMatrix::<f64>::identity(4, 4);
        for (i, j, v) in [(0, 1, 0.9), (2, 3, 0.7)] {
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
        let h = hcc(&field(vec![c.clone(), c]), &FrequencyBand::new(0.0, 10.0).unwrap(), 1).unwrap();
        assert_eq!(h.steps.len(), 3);
        assert!((h.steps[2].dissimilarity - 1.0).abs() < 1e-12);
        assert_eq!(cut(&h, 2).unwrap().assignment(), &[0, 0, 1, 1]);
    }

    #[test]
    fn errors() {
        let f = field(vec![DMatrix::identity(3, 3)]);
        assert!(matches!(hcc(&f, &FrequencyBand::new(5.0, 6.0).unwrap(), 1), Err(Error::EmptyBand { .. })));
        assert!(matches!(hcc(&f, &FrequencyBand::new(0.0, 6.0).unwrap(), 3), Err(Error::InvalidExponent(3))));
        let one = field(vec![DMatrix::identity(1, 1)]);
        assert!(hcc(&one, &FrequencyBand::new(0.0, 6.0).unwrap(), 1).is_err());
    }
}
