use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of N channels to k clusters labelled `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    k: usize,
    assignment: Vec<usize>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        let p = Partition::new(r.assignment)?;
        if p.k != r.k {
            return Err(Error::InvalidParameter(format!("declared k={} but assignment uses {}", r.k, p.k)));
        }
        Ok(p)
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr { k: p.k, assignment: p.assignment }
    }
}

impl Partition {
    /// Cluster ids must be exactly `0..k` with every id used.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidParameter("empty partition".into()));
        }
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; k];
        for &a in &assignment {
            used[a] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::InvalidParameter(format!("cluster id {missing} is unused")));
        }
        Ok(Self { assignment, k })
    }

    /// Relabels arbitrary ids to `0..k` in order of first appearance.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Result<Self> {
        let mut seen: Vec<&T> = Vec::new();
        let assignment = labels
            .iter()
            .map(|l| match seen.iter().position(|s| *s == l) {
                Some(i) => i,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            })
            .collect();
        Self::new(assignment)
    }

    /// Builds a partition from explicit member lists covering `0..n`.
    pub fn from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (c, members) in clusters.iter().enumerate() {
            for &m in members {
                if m >= n || assignment[m] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("channel {m} missing or assigned twice")));
                }
                assignment[m] = c;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::InvalidParameter("clusters do not cover every channel".into()));
        }
        Self::from_labels(&assignment)
    }

    pub fn singletons(n: usize) -> Self {
        Self { assignment: (0..n).collect(), k: n }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, channel: usize) -> usize {
        self.assignment[channel]
    }

    pub fn same_cluster(&self, i: usize, j: usize) -> bool {
        self.assignment[i] == self.assignment[j]
    }

    /// Member lists, indexed by cluster id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn members_with(&self, channel: usize) -> Vec<usize> {
        let c = self.assignment[channel];
        (0..self.n()).filter(|&i| self.assignment[i] == c).collect()
    }

    /// Same co-membership relation, ids renumbered by first appearance.
    pub fn canonical(&self) -> Partition {
        Self::from_labels(&self.assignment).expect("valid partition")
    }

    /// True when every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.n() != coarser.n() {
            return false;
        }
        let mut image = vec![usize::MAX; self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            let target = coarser.assignment[i];
            if image[c] == usize::MAX {
                image[c] = target;
            } else if image[c] != target {
                return false;
            }
        }
        true
    }

    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }
}
