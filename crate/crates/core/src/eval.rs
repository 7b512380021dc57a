//! Replicate-level summaries: co-membership affinity, adjusted Rand index
//! and pointwise quantile bands over scree curves.

use serde::{Deserialize, Serialize};

use crate::clustering::ScreeCurve;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Fraction of replicates in which each pair of channels shares a cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityMatrix {
    pub values: Vec<Vec<f64>>,
    pub replicates: usize,
}

impl AffinityMatrix {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Mean affinity over distinct pairs that share a block of `reference`.
    /// `None` when every block is a singleton.
    pub fn mean_within(&self, reference: &Partition) -> Option<f64> {
        self.mean_over(reference, true)
    }

    /// Mean affinity over pairs in different blocks of `reference`.
    pub fn mean_between(&self, reference: &Partition) -> Option<f64> {
        self.mean_over(reference, false)
    }

    fn mean_over(&self, reference: &Partition, within: bool) -> Option<f64> {
        let n = self.n().min(reference.n());
        let (mut sum, mut count) = (0.0, 0usize);
        for i in 0..n {
            for j in i + 1..n {
                if reference.same_cluster(i, j) == within {
                    sum += self.values[i][j];
                    count += 1;
                }
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// Square CSV with an optional header row of channel labels.
    pub fn to_csv(&self, labels: Option<&[String]>) -> String {
        let mut out = String::new();
        if let Some(l) = labels {
            out.push_str(&l.join(","));
            out.push('\n');
        }
        for row in &self.values {
            out.push_str(&row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

pub fn affinity(partitions: &[Partition]) -> Result<AffinityMatrix> {
    let first = partitions.first().ok_or_else(|| Error::InvalidParameter("need at least one partition".into()))?;
    let n = first.n();
    if let Some(p) = partitions.iter().find(|p| p.n() != n) {
        return Err(Error::SizeMismatch(format!("partition over {} channels, expected {n}", p.n())));
    }
    let m = partitions.len() as f64;
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
        for j in i + 1..n {
            let v = partitions.iter().filter(|p| p.same_cluster(i, j)).count() as f64 / m;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(AffinityMatrix { values, replicates: partitions.len() })
}

fn choose2(x: usize) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index. When both partitions are trivial in the same way
/// (the index is 0/0) the result is 1 for identical co-membership, else 0.
pub fn agreement(p: &Partition, q: &Partition) -> Result<f64> {
    if p.n() != q.n() {
        return Err(Error::SizeMismatch(format!("partitions over {} and {} channels", p.n(), q.n())));
    }
    let mut table = vec![vec![0usize; q.k()]; p.k()];
    for (a, b) in p.assignment().iter().zip(q.assignment()) {
        table[*a][*b] += 1;
    }
    let index: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let rows: f64 = table.iter().map(|r| choose2(r.iter().sum())).sum();
    let cols: f64 = (0..q.k()).map(|j| choose2(table.iter().map(|r| r[j]).sum())).sum();
    let total = choose2(p.n());
    let expected = if total > 0.0 { rows * cols / total } else { 0.0 };
    let max = 0.5 * (rows + cols);
    if (max - expected).abs() < 1e-12 {
        return Ok(if p.same_grouping(q) { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

pub const DEFAULT_QUANTILES: [f64; 3] = [0.1, 0.5, 0.9];

/// Pointwise quantiles of several scree curves; `values[q][i]` is quantile
/// `levels[q]` at `k[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeBand {
    pub k: Vec<usize>,
    pub levels: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ScreeBand {
    /// The curve at quantile level `q`, if it was computed.
    pub fn level(&self, q: f64) -> Option<ScreeCurve> {
        let i = self.levels.iter().position(|l| (l - q).abs() < 1e-12)?;
        Some(ScreeCurve { k: self.k.clone(), d: self.values[i].clone() })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k");
        for l in &self.levels {
            out.push_str(&format!(",q{l}"));
        }
        out.push('\n');
        for (i, k) in self.k.iter().enumerate() {
            out.push_str(&k.to_string());
            for v in &self.values {
                out.push_str(&format!(",{}", v[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn scree_band(curves: &[ScreeCurve], levels: &[f64]) -> Result<ScreeBand> {
    let first = curves.first().ok_or_else(|| Error::InvalidParameter("need at least one scree curve".into()))?;
    if let Some(c) = curves.iter().find(|c| c.k != first.k) {
        return Err(Error::SizeMismatch(format!("scree curve of length {}, expected {}", c.len(), first.len())));
    }
    if let Some(q) = levels.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidParameter(format!("quantile level {q} outside [0, 1]")));
    }
    let columns: Vec<Vec<f64>> = (0..first.len())
        .map(|i| {
            let mut col: Vec<f64> = curves.iter().map(|c| c.d[i]).collect();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();
    let values = levels.iter().map(|&q| columns.iter().map(|col| quantile(col, q)).collect()).collect();
    Ok(ScreeBand { k: first.k.clone(), levels: levels.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(a: &[usize]) -> Partition {
        Partition::from_labels(a).unwrap()
    }

    #[test]
    fn affinity_counts_co_membership() {
        let a = affinity(&[part(&[0, 0, 1]), part(&[0, 1, 1])]).unwrap();
        assert_eq!(a.get(0, 1), 0.5);
        assert_eq!(a.get(1, 2), 0.5);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.get(2, 2), 1.0);
        assert_eq!(a.replicates, 2);
        assert_eq!(a.mean_within(&part(&[0, 0, 1])), Some(0.5));
        assert!(affinity(&[]).is_err());
        assert!(affinity(&[part(&[0, 1]), part(&[0, 1, 2])]).is_err());
        assert_eq!(a.to_csv(None).lines().count(), 3);
    }

    #[test]
    fn ari_examples() {
        assert_eq!(agreement(&part(&[0, 0, 1, 1]), &part(&[5, 5, 2, 2])).unwrap(), 1.0);
        assert_eq!(agreement(&Partition::singletons(4), &part(&[0, 0, 0, 0])).unwrap(), 0.0);
        assert_eq!(agreement(&Partition::singletons(4), &Partition::singletons(4)).unwrap(), 1.0);
        // index 2, row pairs 6, column pairs 3, total 15: (2 - 1.2) / (4.5 - 1.2)
        let ari = agreement(&part(&[0, 0, 0, 1, 1, 1]), &part(&[0, 0, 1, 1, 2, 2])).unwrap();
        assert!((ari - 8.0 / 33.0).abs() < 1e-12);
        assert_eq!(agreement(&part(&[0, 0, 1, 1]), &part(&[0, 0, 0, 1])).unwrap(), 0.0);
        assert!(agreement(&part(&[0, 1]), &part(&[0, 1, 1])).is_err());
    }

    #[test]
    fn quantile_band() {
        let c1 = ScreeCurve { k: vec![2, 1], d: vec![0.1, 0.5] };
        let c2 = ScreeCurve { k: vec![2, 1], d: vec![0.3, 0.9] };
        let b = scree_band(&[c1.clone(), c2], &DEFAULT_QUANTILES).unwrap();
        assert!((b.values[1][0] - 0.2).abs() < 1e-12);
        assert!((b.values[1][1] - 0.7).abs() < 1e-12);
        let same = scree_band(&[c1.clone(), c1.clone()], &DEFAULT_QUANTILES).unwrap();
        assert!(same.values.iter().all(|v| v == &c1.d));
        assert_eq!(same.level(0.5).unwrap(), c1);
        assert!(scree_band(&[c1.clone(), ScreeCurve { k: vec![1], d: vec![0.2] }], &[0.5]).is_err());
        assert!(scree_band(&[c1], &[1.5]).is_err());
        assert!(scree_band(&[], &[0.5]).is_err());
    }
}
