use serde::{Deserialize, Serialize};

use crate::bands::FrequencyBand;
use crate::error::{Error, Result};
use crate::partition::Partition;

pub const DEFAULT_ELBOW_THRESHOLD: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    HccP1,
    HccP2,
    Hac,
    Hmc,
    SpectralBaseline,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::HccP1 => "hcc-p1",
            Method::HccP2 => "hcc-p2",
            Method::Hac => "hac",
            Method::Hmc => "hmc",
            Method::SpectralBaseline => "spectral-baseline",
        }
    }

    /// Accepts the serialized names plus `hcc` (p = 1).
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hcc" | "hcc-p1" => Ok(Method::HccP1),
            "hcc-p2" => Ok(Method::HccP2),
            "hac" => Ok(Method::Hac),
            "hmc" => Ok(Method::Hmc),
            "spectral-baseline" | "baseline" => Ok(Method::SpectralBaseline),
            _ => Err(Error::Unknown { what: "method", name: s.to_string() }),
        }
    }

    pub fn hcc(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Method::HccP1),
            2 => Ok(Method::HccP2),
            _ => Err(Error::InvalidExponent(p)),
        }
    }
}

/// One agglomeration step. Cluster ids are the smallest channel index in
/// the cluster, so the merged cluster keeps `merged.0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub step: usize,
    pub merged: (usize, usize),
    pub dissimilarity: f64,
    /// Clusters remaining after this merge.
    pub k: usize,
    pub membership: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeHistory {
    pub method: Method,
    pub band: FrequencyBand,
    pub n: usize,
    pub steps: Vec<MergeStep>,
    /// Dissimilarities that fell outside `[0, 1]` and were clamped.
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeCurve {
    pub k: Vec<usize>,
    pub d: Vec<f64>,
}

impl ScreeCurve {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,dissimilarity\n");
        for (k, d) in self.k.iter().zip(&self.d) {
            s.push_str(&format!("{k},{d}\n"));
        }
        s
    }
}

/// `(k_i, d_i)` in merge order.
pub fn scree(h: &MergeHistory) -> ScreeCurve {
    ScreeCurve {
        k: h.steps.iter().map(|s| s.k).collect(),
        d: h.steps.iter().map(|s| s.dissimilarity).collect(),
    }
}

/// Partition with exactly `k` clusters.
pub fn cut(h: &MergeHistory, k: usize) -> Result<Partition> {
    if k == 0 || k > h.n {
        return Err(Error::KOutOfRange { k, n: h.n });
    }
    if k == h.n {
        return Ok(Partition::singletons(h.n));
    }
    Ok(h.steps[h.n - k - 1].membership.clone())
}

/// Elbow rule on a scree curve: a merge whose dissimilarity exceeds the
/// previous merge's by more than `threshold` (on the unit dissimilarity
/// scale) marks the cluster count just before it as a candidate. Returns
/// the smallest candidate, or 1 when no jump qualifies.
pub fn suggest_k(s: &ScreeCurve, threshold: f64) -> usize {
    (1..s.len())
        .filter(|&i| s.d[i] - s.d[i - 1] > threshold)
        .map(|i| s.k[i] + 1)
        .min()
        .unwrap_or(1)
}

impl MergeHistory {
    pub fn scree(&self) -> ScreeCurve {
        scree(self)
    }

    pub fn cut(&self, k: usize) -> Result<Partition> {
        cut(self, k)
    }

    /// Channel-by-k table of cluster labels (rows = channels, columns =
    /// `k = n..1`), the data behind a cluster-merging plot.
    pub fn merge_table(&self) -> Vec<Vec<usize>> {
        let mut cols: Vec<Partition> = vec![Partition::singletons(self.n)];
        cols.extend(self.steps.iter().map(|s| s.membership.clone()));
        (0..self.n).map(|ch| cols.iter().map(|p| p.cluster_of(ch)).collect()).collect()
    }
}
