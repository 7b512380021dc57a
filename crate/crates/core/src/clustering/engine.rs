use rayon::prelude::*;

use super::history::{MergeHistory, MergeStep, Method};
use crate::bands::FrequencyBand;
use crate::partition::Partition;

pub(crate) struct Node<S> {
    pub members: Vec<usize>,
    pub state: S,
}

/// Dissimilarity rule driving [`agglomerate`].
pub(crate) trait Agglomerator: Sync {
    type State: Send + Sync;

    fn singleton(&self, channel: usize) -> Self::State;

    /// Dissimilarity between two singletons.
    fn initial(&self, a: usize, b: usize) -> f64;

    /// State of the union of `a` and `b`; `members` is already the sorted union.
    fn merge(&self, a: &Node<Self::State>, b: &Node<Self::State>, members: &[usize]) -> Self::State;

    fn dissimilarity(&self, a: &Node<Self::State>, b: &Node<Self::State>) -> f64;
}

fn clamp_unit(v: f64, clamped: &mut usize) -> f64 {
    if v.is_nan() {
        *clamped += 1;
        return 1.0;
    }
    if !(0.0..=1.0).contains(&v) {
        *clamped += 1;
    }
    v.clamp(0.0, 1.0)
}

/// Generic agglomeration from `n` singletons down to one cluster. Each step
/// merges the pair with the smallest dissimilarity, ties going to the
/// lexicographically smallest pair of cluster ids; clusters are identified
/// by their smallest member.
pub(crate) fn agglomerate<A: Agglomerator>(agg: &A, n: usize, method: Method, band: FrequencyBand) -> MergeHistory {
    let mut clamped = 0usize;
    let mut dist = vec![0.0f64; n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let d = clamp_unit(agg.initial(a, b), &mut clamped);
            dist[a * n + b] = d;
            dist[b * n + a] = d;
        }
    }
    let mut nodes: Vec<Option<Node<A::State>>> =
        (0..n).map(|c| Some(Node { members: vec![c], state: agg.singleton(c) })).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut steps = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for (i, &a) in active.iter().enumerate() {
            for &b in &active[i + 1..] {
                let d = dist[a * n + b];
                if d < best.2 {
                    best = (a, b, d);
                }
            }
        }
        let (a, b, d) = best;
        let node_b = nodes[b].take().expect("active node");
        let node_a = nodes[a].take().expect("active node");
        let mut members: Vec<usize> = node_a.members.iter().chain(&node_b.members).copied().collect();
        members.sort_unstable();
        let state = agg.merge(&node_a, &node_b, &members);
        let merged = Node { members, state };
        active.retain(|&c| c != b);

        let others: Vec<usize> = active.iter().copied().filter(|&c| c != a).collect();
        let fresh: Vec<f64> = others
            .par_iter()
            .map(|&c| agg.dissimilarity(&merged, nodes[c].as_ref().expect("active node")))
            .collect();
        for (&c, &v) in others.iter().zip(&fresh) {
            let v = clamp_unit(v, &mut clamped);
            dist[a * n + c] = v;
            dist[c * n + a] = v;
        }
        nodes[a] = Some(merged);

        let mut labels = vec![0usize; n];
        for (rank, &rep) in active.iter().enumerate() {
            for &m in &nodes[rep].as_ref().expect("active node").members {
                labels[m] = rank;
            }
        }
        steps.push(MergeStep {
            step: steps.len() + 1,
            merged: (a, b),
            dissimilarity: d,
            k: active.len(),
            membership: Partition::new(labels).expect("labels cover 0..k"),
        });
    }

    MergeHistory { method, band, n, steps, clamped }
}
