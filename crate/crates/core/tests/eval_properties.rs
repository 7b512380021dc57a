use hcc_core::{affinity, agreement, scree_band, Partition, ScreeCurve};
use proptest::prelude::*;

fn partition(n: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0usize..4, n).prop_map(|labels| Partition::from_labels(&labels).unwrap())
}

/// Adjusted Rand index from the pair-counting contingency table.
fn ari_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let c2 = |x: usize| (x * x.saturating_sub(1)) as f64 / 2.0;
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut table = vec![vec![0usize; kb]; ka];
    for i in 0..n {
        table[a[i]][b[i]] += 1;
    }
    let index: f64 = table.iter().flatten().map(|&x| c2(x)).sum();
    let rows: f64 = table.iter().map(|r| c2(r.iter().sum())).sum();
    let cols: f64 = (0..kb).map(|j| c2(table.iter().map(|r| r[j]).sum())).sum();
    let expected = rows * cols / c2(n);
    let max = (rows + cols) / 2.0;
    if max == expected {
        return if a == b { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

#[test]
fn singletons_against_one_cluster_is_zero() {
    let s = Partition::singletons(4);
    let one = Partition::from_labels(&[0, 0, 0, 0]).unwrap();
    assert_eq!(agreement(&s, &one).unwrap(), 0.0);
}

#[test]
fn affinity_fraction() {
    let p = Partition::from_labels(&[0, 0, 1]).unwrap();
    let q = Partition::from_labels(&[0, 1, 1]).unwrap();
    let a = affinity(&[p.clone(), q]).unwrap();
    assert_eq!(a.get(0, 1), 0.5);
    assert_eq!(a.get(1, 2), 0.5);
    assert_eq!(a.get(0, 2), 0.0);
    let single = affinity(&[p]).unwrap();
    assert_eq!(single.values, vec![vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    assert!(affinity(&[Partition::singletons(3), Partition::singletons(4)]).is_err());
}

#[test]
fn two_curve_median_is_the_mean() {
    let a = ScreeCurve { k: vec![3, 2, 1], d: vec![0.1, 0.2, 0.9] };
    let b = ScreeCurve { k: vec![3, 2, 1], d: vec![0.3, 0.2, 0.5] };
    let band = scree_band(&[a, b], &[0.5]).unwrap();
    assert_eq!(band.values[0], vec![0.2, 0.2, 0.7]);
    let short = ScreeCurve { k: vec![2, 1], d: vec![0.1, 0.2] };
    assert!(scree_band(&[band.level(0.5).unwrap(), short], &[0.5]).is_err());
}

proptest! {
    #[test]
    fn affinity_is_symmetric_with_unit_diagonal(ps in prop::collection::vec(partition(7), 1..12)) {
        let a = affinity(&ps).unwrap();
        prop_assert_eq!(a.replicates, ps.len());
        for i in 0..7 {
            prop_assert_eq!(a.get(i, i), 1.0);
            for j in 0..7 {
                prop_assert_eq!(a.get(i, j), a.get(j, i));
                prop_assert!((0.0..=1.0).contains(&a.get(i, j)));
            }
        }
    }

    #[test]
    fn agreement_matches_oracle_and_ignores_labels(p in partition(9), q in partition(9), shift in 1usize..4) {
        let got = agreement(&p, &q).unwrap();
        let want = ari_oracle(p.assignment(), q.assignment());
        prop_assert!((got - want).abs() < 1e-12, "{} vs {}", got, want);
        let relabeled: Vec<usize> = q.assignment().iter().map(|c| (c + shift) % 4 + 10).collect();
        let q2 = Partition::from_labels(&relabeled).unwrap();
        prop_assert!((agreement(&p, &q2).unwrap() - got).abs() < 1e-12);
        prop_assert!((agreement(&q, &p).unwrap() - got).abs() < 1e-12);
        prop_assert!((agreement(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_levels_are_monotone(ds in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 5), 1..20)) {
        let curves: Vec<ScreeCurve> = ds.into_iter().map(|d| ScreeCurve { k: vec![5, 4, 3, 2, 1], d }).collect();
        let levels = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
        let band = scree_band(&curves, &levels).unwrap();
        for i in 0..5 {
            for q in 1..levels.len() {
                prop_assert!(band.values[q][i] >= band.values[q - 1][i]);
            }
        }
    }
}
