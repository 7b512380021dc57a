//! Dependence between two groups of channels at one frequency.
//!
//! Cluster coherence compares the spectrum of the joint coherence matrix of
//! `left ∪ right` with the pooled spectra of its two diagonal blocks. All
//! eigenvalue sets are divided by the joint dimension `n1 + n2`, so two
//! uncorrelated groups score 0 and a single pair of channels scores exactly
//! their squared coherence (for `p = 1`).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{CMatrix, FieldKind, SpectralField};

/// Two disjoint, nonempty sets of channel indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClusterPair {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl ClusterPair {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidPair("clusters must be nonempty".into()));
        }
        for (i, a) in left.iter().enumerate() {
            if left[..i].contains(a) || right.contains(a) {
                return Err(Error::InvalidPair(format!("channel {a} appears twice")));
            }
        }
        for (i, b) in right.iter().enumerate() {
            if right[..i].contains(b) {
                return Err(Error::InvalidPair(format!("channel {b} appears twice")));
            }
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn swapped(&self) -> Self {
        Self { left: self.right.clone(), right: self.left.clone() }
    }

    /// `left` followed by `right`.
    pub fn joint(&self) -> Vec<usize> {
        self.left.iter().chain(&self.right).copied().collect()
    }

    fn check_bounds(&self, n: usize) -> Result<()> {
        match self.joint().into_iter().find(|&c| c >= n) {
            Some(c) => Err(Error::InvalidPair(format!("channel {c} out of range for {n} channels"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    CcoP1,
    CcoP2,
    Average,
    Minimum,
    Block,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::CcoP1 => "cco-p1",
            Measure::CcoP2 => "cco-p2",
            Measure::Average => "average",
            Measure::Minimum => "minimum",
            Measure::Block => "block",
        }
    }
}

/// A between-cluster measure evaluated at each frequency of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCurve {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub measure: Measure,
}

impl CoherenceCurve {
    /// Mean over the frequencies selected by `bins`.
    pub fn mean_over(&self, bins: &[usize]) -> f64 {
        bins.iter().map(|&j| self.values[j]).sum::<f64>() / bins.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("freq,value\n");
        for (f, v) in self.freqs.iter().zip(&self.values) {
            s.push_str(&format!("{f},{v}\n"));
        }
        s
    }
}

pub(crate) fn check_exponent(p: u32) -> Result<()> {
    if p == 1 || p == 2 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Raw eigenvalues of a symmetric matrix, clamped at zero, descending.
pub(crate) fn clamped_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        _ => m.symmetric_eigenvalues().iter().copied().collect(),
    };
    for v in &mut ev {
        *v = v.max(0.0);
    }
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigenvalues of `m` clamped below at zero, sorted descending, and divided
/// by `total`.
pub fn normalized_sorted_eigenvalues(m: &DMatrix<f64>, total: f64) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::SizeMismatch("matrix is not square".into()));
    }
    let asym = max_asymmetry(m);
    if asym > 1e-8 {
        return Err(Error::Asymmetric(asym));
    }
    Ok(clamped_eigenvalues(m.clone()).into_iter().map(|v| v / total).collect())
}

/// Lp distance between two descending eigenvalue lists (already normalized).
pub(crate) fn lp_distance(joint: &[f64], pooled: &[f64], p: u32) -> f64 {
    debug_assert_eq!(joint.len(), pooled.len());
    let diffs = joint.iter().zip(pooled).map(|(a, b)| (a - b).abs());
    if p == 1 {
        diffs.sum()
    } else {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    }
}

/// Pools two descending raw eigenvalue lists, re-sorts, and normalizes by the
/// joint dimension.
pub(crate) fn pooled_normalized(a: &[f64], b: &[f64]) -> Vec<f64> {
    let total = (a.len() + b.len()) as f64;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] >= b[j]) {
            out.push(a[i] / total);
            i += 1;
        } else {
            out.push(b[j] / total);
            j += 1;
        }
    }
    out
}

pub(crate) fn gather(c: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| c[(rows[i], rows[j])])
}

/// Cluster coherence between the two groups of `pair` for one coherence
/// matrix `c`, with `p` in `{1, 2}`.
pub fn cluster_coherence(c: &DMatrix<f64>, pair: &ClusterPair, p: u32) -> Result<f64> {
    check_exponent(p)?;
    pair.check_bounds(c.nrows())?;
    let joint_idx = pair.joint();
    let sub = gather(c, &joint_idx);
    let asym = max_asymmetry(&sub);
    if asym > 1e-8 {
        return Err(Error::Asymmetric(asym));
    }
    let total = joint_idx.len() as f64;
    let joint: Vec<f64> = clamped_eigenvalues(sub).into_iter().map(|v| v / total).collect();
    let a = clamped_eigenvalues(gather(c, pair.left()));
    let b = clamped_eigenvalues(gather(c, pair.right()));
    Ok(lp_distance(&joint, &pooled_normalized(&a, &b), p))
}

fn cross_block(c: &DMatrix<f64>, pair: &ClusterPair) -> Result<Vec<f64>> {
    pair.check_bounds(c.nrows())?;
    Ok(pair
        .left()
        .iter()
        .flat_map(|&i| pair.right().iter().map(move |&j| c[(i, j)]))
        .collect())
}

/// Mean of the between-cluster block of `c`.
pub fn average_coherence(c: &DMatrix<f64>, pair: &ClusterPair) -> Result<f64> {
    let block = cross_block(c, pair)?;
    Ok(block.iter().sum::<f64>() / block.len() as f64)
}

/// Minimum of the between-cluster block of `c`.
pub fn minimum_coherence(c: &DMatrix<f64>, pair: &ClusterPair) -> Result<f64> {
    Ok(cross_block(c, pair)?.into_iter().fold(f64::INFINITY, f64::min))
}

fn complex_gather(s: &CMatrix, rows: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), rows.len(), |i, j| s[(rows[i], rows[j])])
}

/// `1 - det(S_xy) / (det(S_x) det(S_y))` for a spectral matrix `s`.
///
/// Determinants are taken after scaling to unit diagonal, which leaves the
/// ratio unchanged; a diagonal block with normalized determinant below
/// 1e-12 is rejected as singular.
pub fn block_coherence(s: &CMatrix, pair: &ClusterPair) -> Result<f64> {
    pair.check_bounds(s.nrows())?;
    let joint_idx = pair.joint();
    let mut sub = complex_gather(s, &joint_idx);
    let scale: Vec<f64> = (0..sub.nrows())
        .map(|i| {
            let d = sub[(i, i)].re;
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(Error::ZeroAutoSpectrum { channel: joint_idx[i], freq: f64::NAN })
            }
        })
        .collect::<Result<_>>()?;
    for i in 0..sub.nrows() {
        for j in 0..sub.ncols() {
            sub[(i, j)] *= scale[i] * scale[j];
        }
    }
    let n1 = pair.left().len();
    let n2 = pair.right().len();
    let det_x = sub.view((0, 0), (n1, n1)).clone_owned().determinant().re;
    let det_y = sub.view((n1, n1), (n2, n2)).clone_owned().determinant().re;
    if det_x < 1e-12 {
        return Err(Error::SingularBlock { block: "left", det: det_x });
    }
    if det_y < 1e-12 {
        return Err(Error::SingularBlock { block: "right", det: det_y });
    }
    let det_xy = sub.determinant().re;
    Ok(1.0 - det_xy / (det_x * det_y))
}

/// Pointwise cluster coherence across every frequency of a coherence field.
pub fn cluster_coherence_curve(field: &SpectralField, pair: &ClusterPair, p: u32) -> Result<CoherenceCurve> {
    let measure = if p == 1 { Measure::CcoP1 } else { Measure::CcoP2 };
    check_exponent(p)?;
    measure_curve(field, pair, measure)
}

/// Any of the five measures across a field. `Block` needs a smoothed
/// spectral field; the others need a coherence field.
pub fn measure_curve(field: &SpectralField, pair: &ClusterPair, measure: Measure) -> Result<CoherenceCurve> {
    let values = match measure {
        Measure::Block => {
            field.expect_kind(FieldKind::SmoothedSpectrum)?;
            field.matrices().iter().map(|s| block_coherence(s, pair)).collect::<Result<Vec<_>>>()?
        }
        _ => {
            field.expect_kind(FieldKind::Coherence)?;
            let all: Vec<usize> = (0..field.n_freqs()).collect();
            field
                .real_matrices(&all)
                .iter()
                .map(|c| match measure {
                    Measure::CcoP1 => cluster_coherence(c, pair, 1),
                    Measure::CcoP2 => cluster_coherence(c, pair, 2),
                    Measure::Average => average_coherence(c, pair),
                    Measure::Minimum => minimum_coherence(c, pair),
                    Measure::Block => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(CoherenceCurve { freqs: field.freqs().to_vec(), values, measure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pair(l: &[usize], r: &[usize]) -> ClusterPair {
        ClusterPair::new(l.to_vec(), r.to_vec()).unwrap()
    }

    #[test]
    fn eigen_examples() {
        let id = DMatrix::<f64>::identity(2, 2);
        assert_eq!(normalized_sorted_eigenvalues(&id, 2.0).unwrap(), vec![0.5, 0.5]);
        let k = DMatrix::from_row_slice(2, 2, &[1.0, 0.81, 0.81, 1.0]);
        let ev = normalized_sorted_eigenvalues(&k, 2.0).unwrap();
        assert!((ev[0] - 0.905).abs() < 1e-12 && (ev[1] - 0.095).abs() < 1e-12);
        let ones = DMatrix::from_element(4, 4, 1.0);
        let ev = normalized_sorted_eigenvalues(&ones, 4.0).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|v| v.abs() < 1e-12));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(normalized_sorted_eigenvalues(&asym, 2.0), Err(Error::Asymmetric(_))));
    }

    #[test]
    fn singleton_pair_recovers_pairwise_coherence() {
        let k = 0.37;
        let c = DMatrix::from_row_slice(2, 2, &[1.0, k, k, 1.0]);
        let p = pair(&[0], &[1]);
        assert!((cluster_coherence(&c, &p, 1).unwrap() - k).abs() < 1e-14);
        // p = 2: sqrt(2 (k/2)^2) = k / sqrt(2)
        assert!((cluster_coherence(&c, &p, 2).unwrap() - k / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn uncorrelated_and_perfect() {
        let mut c = DMatrix::<f64>::identity(4, 4);
        c[(0, 1)] = 0.6;
        c[(1, 0)] = 0.6;
        c[(2, 3)] = 0.2;
        c[(3, 2)] = 0.2;
        let p = pair(&[0, 1], &[2, 3]);
        assert!(cluster_coherence(&c, &p, 1).unwrap().abs() < 1e-12);
        assert!(cluster_coherence(&c, &p, 2).unwrap().abs() < 1e-12);
        let ones = DMatrix::from_element(4, 4, 1.0);
        assert!((cluster_coherence(&ones, &p, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_all_ones_is_below_one() {
        // 2 min(n1, n2) / N for p = 1
        let ones = DMatrix::from_element(3, 3, 1.0);
        let v = cluster_coherence(&ones, &pair(&[0, 1], &[2]), 1).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let c = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(cluster_coherence(&c, &pair(&[0], &[1]), 3), Err(Error::InvalidExponent(3))));
        assert!(ClusterPair::new(vec![0, 1], vec![1]).is_err());
        assert!(ClusterPair::new(vec![], vec![1]).is_err());
        assert!(cluster_coherence(&c, &pair(&[0], &[5]), 1).is_err());
    }

    #[test]
    fn average_and_minimum() {
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, 0.2, 0.9, 1.0, 0.8, 0.2, 0.8, 1.0]);
        let p = pair(&[0, 1], &[2]);
        assert!((average_coherence(&c, &p).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(minimum_coherence(&c, &p).unwrap(), 0.2);
        let ones = DMatrix::from_element(3, 3, 1.0);
        assert_eq!(average_coherence(&ones, &p).unwrap(), 1.0);
        assert_eq!(minimum_coherence(&ones, &p).unwrap(), 1.0);
    }

    #[test]
    fn block_coherence_cases() {
        let z = |re: f64, im: f64| Complex64::new(re, im);
        let s = CMatrix::from_row_slice(2, 2, &[z(2.0, 0.0), z(1.0, 1.0), z(1.0, -1.0), z(3.0, 0.0)]);
        let b = block_coherence(&s, &pair(&[0], &[1])).unwrap();
        assert!((b - 2.0 / 6.0).abs() < 1e-14);
        let mut d = CMatrix::identity(3, 3);
        d[(0, 1)] = z(0.3, 0.2);
        d[(1, 0)] = z(0.3, -0.2);
        assert!(block_coherence(&d, &pair(&[0, 1], &[2])).unwrap().abs() < 1e-14);
        let sing = CMatrix::from_element(3, 3, z(1.0, 0.0));
        assert!(matches!(block_coherence(&sing, &pair(&[0, 1], &[2])), Err(Error::SingularBlock { .. })));
    }
}
