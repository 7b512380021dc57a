use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::engine::{agglomerate, Agglomerator, Node};
use super::history::{MergeHistory, Method};
use crate::bands::FrequencyBand;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Mean pairwise dissimilarity (HAC).
    Average,
    /// Largest pairwise dissimilarity (HMC).
    Complete,
}

struct LinkageRule<'a> {
    dissim: &'a DMatrix<f64>,
    linkage: Linkage,
}

impl Agglomerator for LinkageRule<'_> {
    type State = ();

    fn singleton(&self, _: usize) {}

    fn initial(&self, a: usize, b: usize) -> f64 {
        self.dissim[(a, b)]
    }

    fn merge(&self, _: &Node<()>, _: &Node<()>, _: &[usize]) {}

    fn dissimilarity(&self, a: &Node<()>, b: &Node<()>) -> f64 {
        let pairs = a.members.iter().flat_map(|&i| b.members.iter().map(move |&j| self.dissim[(i, j)]));
        match self.linkage {
            Linkage::Average => pairs.sum::<f64>() / (a.members.len() * b.members.len()) as f64,
            Linkage::Complete => pairs.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Classic agglomeration on `1 - C` for an integrated coherence matrix `C`.
/// Average linkage gives HAC, complete linkage gives HMC.
pub fn linkage_cluster(band_matrix: &DMatrix<f64>, linkage: Linkage, band: FrequencyBand) -> Result<MergeHistory> {
    let n = band_matrix.nrows();
    if !band_matrix.is_square() {
        return Err(Error::SizeMismatch("coherence matrix is not square".into()));
    }
    if n < 2 {
        return Err(Error::TooFewChannels { needed: 2, got: n });
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((band_matrix[(i, j)] - band_matrix[(j, i)]).abs());
        }
    }
    if asym > 1e-8 {
        return Err(Error::Asymmetric(asym));
    }
    let dissim = band_matrix.map(|c| 1.0 - c);
    let method = match linkage {
        Linkage::Average => Method::Hac,
        Linkage::Complete => Method::Hmc,
    };
    Ok(agglomerate(&LinkageRule { dissim: &dissim, linkage }, n, method, band))
}
