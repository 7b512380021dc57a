use hcc_core::clustering::{hcc, hcc_on_band_matrices, linkage_cluster, Linkage};
use hcc_core::coherence::{cluster_coherence, ClusterPair};
use hcc_core::nalgebra::DMatrix;
use hcc_core::spectral::{coherence_field, estimate_spectrum, CMatrix, FieldKind};
use hcc_core::{FrequencyBand, MergeHistory, Partition, Smoothing, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn band() -> FrequencyBand {
    FrequencyBand::new(0.0, 50.0).unwrap()
}

fn random_coherence(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let rank = rng.random_range(1..=n);
    coherence_of_rank(n, rank, rng)
}

fn coherence_of_rank(n: usize, rank: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, rank, |_, _| rng.random_range(-1.0..1.0));
    let mut c = &g * g.transpose();
    let d: Vec<f64> = (0..n).map(|i| c[(i, i)].sqrt().max(1e-12)).collect();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] /= d[i] * d[j];
        }
        c[(i, i)] = 1.0;
    }
    // squared correlation is a valid coherence
    c.map(|v| v * v)
}

fn random_band(n: usize, bins: usize, seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..bins).map(|_| random_coherence(n, &mut rng)).collect()
}

fn mean_matrix(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut m = mats.iter().fold(DMatrix::zeros(mats[0].nrows(), mats[0].nrows()), |a, b| a + b);
    m /= mats.len() as f64;
    m
}

/// Brute-force agglomeration: every step rescans all cluster pairs with
/// `dist`, merging the smallest (ties to the lexicographically smallest
/// pair of minimum members). Returns `(merged ids, clamped dissimilarity)`.
fn oracle(n: usize, dist: impl Fn(&[usize], &[usize]) -> f64) -> Vec<((usize, usize), f64)> {
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let d = dist(&clusters[a], &clusters[b]).clamp(0.0, 1.0);
                let better = match best {
                    None => true,
                    Some((bd, ba, bb)) => {
                        d < bd || (d == bd && (clusters[a][0], clusters[b][0]) < (clusters[ba][0], clusters[bb][0]))
                    }
                };
                if better {
                    best = Some((d, a, b));
                }
            }
        }
        let (d, a, b) = best.unwrap();
        let (ia, ib) = (clusters[a][0].min(clusters[b][0]), clusters[a][0].max(clusters[b][0]));
        let mut merged = clusters[a].clone();
        merged.extend(&clusters[b]);
        merged.sort_unstable();
        clusters.remove(b);
        clusters[a] = merged;
        clusters.sort_by_key(|c| c[0]);
        out.push(((ia, ib), d));
    }
    out
}

fn assert_matches_oracle(h: &MergeHistory, want: &[((usize, usize), f64)]) {
    assert_eq!(h.steps.len(), want.len());
    for (s, (pair, d)) in h.steps.iter().zip(want) {
        assert_eq!(s.merged, *pair, "step {}", s.step);
        assert!((s.dissimilarity - d).abs() < 1e-10, "step {}: {} vs {d}", s.step, s.dissimilarity);
    }
}

#[test]
fn average_and_complete_linkage_match_brute_force() {
    for seed in 0..30 {
        let n = 3 + (seed as usize % 8);
        let c = mean_matrix(&random_band(n, 3, seed));
        let avg = oracle(n, |a, b| {
            a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| 1.0 - c[(i, j)]).sum::<f64>()
                / (a.len() * b.len()) as f64
        });
        assert_matches_oracle(&linkage_cluster(&c, Linkage::Average, band()).unwrap(), &avg);
        let max = oracle(n, |a, b| {
            a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| 1.0 - c[(i, j)]).fold(f64::NEG_INFINITY, f64::max)
        });
        assert_matches_oracle(&linkage_cluster(&c, Linkage::Complete, band()).unwrap(), &max);
    }
}

#[test]
fn hcc_matches_brute_force_cluster_coherence() {
    for seed in 0..20 {
        let n = 3 + (seed as usize % 6);
        let mats = random_band(n, 4, 100 + seed);
        for p in [1, 2] {
            let want = oracle(n, |a, b| {
                if a.len() == 1 && b.len() == 1 {
                    return 1.0 - mats.iter().map(|c| c[(a[0], b[0])]).sum::<f64>() / mats.len() as f64;
                }
                let pair = ClusterPair::new(a.to_vec(), b.to_vec()).unwrap();
                1.0 - mats.iter().map(|c| cluster_coherence(c, &pair, p).unwrap()).sum::<f64>() / mats.len() as f64
            });
            assert_matches_oracle(&hcc_on_band_matrices(&mats, p, band()).unwrap(), &want);
        }
    }
}

fn exact_field(mats: &[DMatrix<f64>]) -> SpectralField {
    let freqs: Vec<f64> = (1..=mats.len()).map(|j| j as f64).collect();
    let cm: Vec<CMatrix> = mats.iter().map(|m| m.map(|v| Complex64::new(v, 0.0))).collect();
    SpectralField::new(freqs, cm, FieldKind::Coherence).unwrap()
}

#[test]
fn separated_blocks_agree_across_methods() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (n1, n2) = (4, 3);
    let mats: Vec<DMatrix<f64>> = (0..5)
        .map(|_| {
            let mut c = DMatrix::zeros(n1 + n2, n1 + n2);
            c.view_mut((0, 0), (n1, n1)).copy_from(&random_coherence(n1, &mut rng));
            c.view_mut((n1, n1), (n2, n2)).copy_from(&random_coherence(n2, &mut rng));
            c
        })
        .collect();
    let field = exact_field(&mats);
    let b = FrequencyBand::new(0.0, 10.0).unwrap();
    let reference = Partition::from_labels(&[0, 0, 0, 0, 1, 1, 1]).unwrap();
    let h = hcc(&field, &b, 1).unwrap();
    assert_eq!(h.steps.last().unwrap().dissimilarity, 1.0);
    for history in [
        h,
        linkage_cluster(&mean_matrix(&mats), Linkage::Average, b.clone()).unwrap(),
        linkage_cluster(&mean_matrix(&mats), Linkage::Complete, b.clone()).unwrap(),
    ] {
        assert!(history.cut(2).unwrap().same_grouping(&reference), "{:?}", history.method);
    }
}

#[test]
fn bit_identical_across_thread_counts() {
    let spec = hcc_core::simgen::ExperimentSpec::preset("exp4").unwrap();
    let ts = spec.simulate(3).unwrap().data;
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let field = coherence_field(&estimate_spectrum(&ts, &Smoothing::default()).unwrap()).unwrap();
            hcc(&field, &spec.band, 1).unwrap()
        })
    };
    let one = serde_json::to_string(&run(1)).unwrap();
    assert_eq!(one, serde_json::to_string(&run(3)).unwrap());
    assert_eq!(one, serde_json::to_string(&run(8)).unwrap());
}

fn histories(n: usize, seed: u64) -> Vec<MergeHistory> {
    let mats = random_band(n, 3, seed);
    let c = mean_matrix(&mats);
    vec![
        hcc_on_band_matrices(&mats, 1, band()).unwrap(),
        hcc_on_band_matrices(&mats, 2, band()).unwrap(),
        linkage_cluster(&c, Linkage::Average, band()).unwrap(),
        linkage_cluster(&c, Linkage::Complete, band()).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steps_cuts_and_refinement(n in 2usize..12, seed in any::<u64>()) {
        for h in histories(n, seed) {
            prop_assert_eq!(h.steps.len(), n - 1);
            prop_assert_eq!(h.steps.last().unwrap().k, 1);
            for (i, s) in h.steps.iter().enumerate() {
                prop_assert_eq!(s.k, n - 1 - i);
                prop_assert_eq!(s.membership.k(), s.k);
                prop_assert!((0.0..=1.0).contains(&s.dissimilarity));
            }
            prop_assert!(h.cut(n).unwrap().same_grouping(&Partition::singletons(n)));
            prop_assert_eq!(h.cut(1).unwrap().k(), 1);
            for k in 2..=n {
                prop_assert!(h.cut(k).unwrap().refines(&h.cut(k - 1).unwrap()));
            }
            prop_assert!(h.cut(0).is_err());
            prop_assert!(h.cut(n + 1).is_err());
        }
    }

    #[test]
    fn first_hcc_merge_is_the_most_coherent_pair(n in 2usize..10, seed in any::<u64>()) {
        let mats = random_band(n, 3, seed);
        let c = mean_matrix(&mats);
        let h = hcc_on_band_matrices(&mats, 1, band()).unwrap();
        let (a, b) = h.steps[0].merged;
        prop_assert!((h.steps[0].dissimilarity - (1.0 - c[(a, b)])).abs() < 1e-12);
        let best = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| c[(i, j)]).fold(0.0, f64::max);
        prop_assert!((c[(a, b)] - best).abs() < 1e-12);
    }

    #[test]
    fn channel_order_does_not_change_groupings(n in 3usize..10, seed in any::<u64>()) {
        // full rank keeps dissimilarities distinct; exact ties break by
        // channel index and so legitimately depend on the order
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<DMatrix<f64>> = (0..3).map(|_| coherence_of_rank(n, n, &mut rng)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let permuted: Vec<DMatrix<f64>> = mats
            .iter()
            .map(|c| {
                let mut pc = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        pc[(perm[i], perm[j])] = c[(i, j)];
                    }
                }
                pc
            })
            .collect();
        let pairs = [
            (hcc_on_band_matrices(&mats, 1, band()).unwrap(), hcc_on_band_matrices(&permuted, 1, band()).unwrap()),
            (
                linkage_cluster(&mean_matrix(&mats), Linkage::Average, band()).unwrap(),
                linkage_cluster(&mean_matrix(&permuted), Linkage::Average, band()).unwrap(),
            ),
        ];
        for (h, hp) in pairs {
            for k in 1..=n {
                let p = h.cut(k).unwrap();
                let q = hp.cut(k).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(p.same_cluster(i, j), q.same_cluster(perm[i], perm[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn reruns_are_identical(n in 2usize..10, seed in any::<u64>()) {
        prop_assert_eq!(histories(n, seed), histories(n, seed));
    }
}
