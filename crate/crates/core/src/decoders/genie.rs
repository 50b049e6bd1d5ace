use rand::RngCore;

use crate::error::{Error, Result};
use crate::model::{CommunityLabels, SbmParams, SparseGraph};
use crate::rng;

/// Edges from a target node into each estimated community.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborCounts {
    pub l1: usize,
    pub l2: usize,
}

/// Counts the neighbors of `j` labeled 1 and 2 in `labels` (ignoring `j`'s
/// own entry).
pub fn neighbor_counts(graph: &SparseGraph, labels: &CommunityLabels, j: usize) -> NeighborCounts {
    let mut counts = NeighborCounts { l1: 0, l2: 0 };
    for &i in graph.neighbors(j) {
        if i == j {
            continue;
        }
        match labels.get(i) {
            1 => counts.l1 += 1,
            _ => counts.l2 += 1,
        }
    }
    counts
}

/// Likelihood-ratio decision between the two Poisson hypotheses.
///
/// Declares community 1 iff `l1 >= l2 + delta (b - a) / ln(a / b)`. When
/// `l1 - l2` sits exactly on the threshold the sign of `delta` decides
/// (positive: 1, negative: 2) and a fair coin from `rng` settles `delta = 0`.
pub fn threshold_decision(
    counts: NeighborCounts,
    delta: f64,
    a: f64,
    b: f64,
    rng: &mut impl RngCore,
) -> Result<u8> {
    if !(a > b && b > 0.0) {
        return Err(Error::Param(format!(
            "decision threshold needs a > b > 0, got a = {a}, b = {b}"
        )));
    }
    let threshold = delta * (b - a) / (a / b).ln();
    let margin = counts.l1 as f64 - counts.l2 as f64 - threshold;
    Ok(if margin > 0.0 {
        1
    } else if margin < 0.0 {
        2
    } else if delta > 0.0 {
        1
    } else if delta < 0.0 {
        2
    } else if rng::coin(rng) {
        1
    } else {
        2
    })
}

/// Labels node `j` given the true labels of every other node.
///
/// `revealed` has length `n`; its entry at `j` is ignored. The imbalance
/// `delta` is computed over the `n - 1` revealed nodes. `seed` drives the
/// coin used only for exact ties with `delta = 0`.
pub fn genie_single_node_test(
    graph: &SparseGraph,
    revealed: &CommunityLabels,
    j: usize,
    params: &SbmParams,
    seed: u64,
) -> Result<u8> {
    let n = graph.n();
    if revealed.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: revealed.len(),
        });
    }
    if j >= n {
        return Err(Error::Precondition(format!(
            "node {j} out of range for n = {n}"
        )));
    }
    let (mut n1, mut n2) = revealed.counts();
    match revealed.get(j) {
        1 => n1 -= 1,
        _ => n2 -= 1,
    }
    let others = (n1 + n2) as f64;
    let delta = if others > 0.0 {
        (n1 as f64 - n2 as f64) / others
    } else {
        0.0
    };
    let counts = neighbor_counts(graph, revealed, j);
    let mut rng = rng::stream(seed, rng::DECODER_STREAM);
    threshold_decision(counts, delta, params.a(), params.b(), &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: usize, j: usize, into: &[usize]) -> SparseGraph {
        SparseGraph::from_edges(n, into.iter().map(|&i| (i, j))).unwrap()
    }

    #[test]
    fn plain_majority_when_balanced() {
        let params = SbmParams::new(8.0, 2.0, 9).unwrap();
        // node 0 unknown; 4 revealed in each community
        let labels = CommunityLabels::new(vec![1, 1, 1, 1, 1, 2, 2, 2, 2]).unwrap();
        let g = star(9, 0, &[1, 2, 3, 5]);
        assert_eq!(
            neighbor_counts(&g, &labels, 0),
            NeighborCounts { l1: 3, l2: 1 }
        );
        assert_eq!(
            genie_single_node_test(&g, &labels, 0, &params, 0).unwrap(),
            1
        );
        let g = star(9, 0, &[1, 5, 6]);
        assert_eq!(
            genie_single_node_test(&g, &labels, 0, &params, 0).unwrap(),
            2
        );
    }

    #[test]
    fn balanced_tie_uses_seeded_coin() {
        let params = SbmParams::new(8.0, 2.0, 9).unwrap();
        let labels = CommunityLabels::new(vec![2, 1, 1, 1, 1, 2, 2, 2, 2]).unwrap();
        let g = star(9, 0, &[1, 5]);
        let outcomes: Vec<u8> = (0..64)
            .map(|s| genie_single_node_test(&g, &labels, 0, &params, s).unwrap())
            .collect();
        assert!(outcomes.contains(&1) && outcomes.contains(&2));
        let again: Vec<u8> = (0..64)
            .map(|s| genie_single_node_test(&g, &labels, 0, &params, s).unwrap())
            .collect();
        assert_eq!(outcomes, again);
    }

    #[test]
    fn ties_follow_imbalance_sign() {
        let params = SbmParams::new(8.0, 2.0, 8).unwrap();
        // revealed: four in community 1, three in community 2 -> delta > 0
        let labels = CommunityLabels::new(vec![1, 1, 1, 1, 1, 2, 2, 2]).unwrap();
        let g = star(8, 0, &[1, 5]);
        for s in 0..16 {
            assert_eq!(
                genie_single_node_test(&g, &labels, 0, &params, s).unwrap(),
                1
            );
        }
        let labels = CommunityLabels::new(vec![1, 1, 1, 1, 2, 2, 2, 2]).unwrap();
        let g = star(8, 0, &[1, 5]);
        for s in 0..16 {
            assert_eq!(
                genie_single_node_test(&g, &labels, 0, &params, s).unwrap(),
                2
            );
        }
    }

    #[test]
    fn large_imbalance_shifts_threshold() {
        // delta = 5/7, threshold = delta (b - a) / ln(a/b) = -3.09 -> needs l1 >= l2 - 3.09
        let mut rng = rng::stream(0, 0);
        let c = NeighborCounts { l1: 0, l2: 3 };
        assert_eq!(
            threshold_decision(c, 5.0 / 7.0, 8.0, 2.0, &mut rng).unwrap(),
            1
        );
        let c = NeighborCounts { l1: 0, l2: 4 };
        assert_eq!(
            threshold_decision(c, 5.0 / 7.0, 8.0, 2.0, &mut rng).unwrap(),
            2
        );
        assert!(threshold_decision(c, 0.0, 2.0, 2.0, &mut rng).is_err());
    }

    #[test]
    fn near_zero_inter_probability() {
        // only intra-community edges are possible, so any edge identifies the community
        let params = SbmParams::new(10.0, 1e-9, 10).unwrap();
        let labels = CommunityLabels::new(vec![2, 1, 1, 1, 1, 1, 2, 2, 2, 2]).unwrap();
        let g = star(10, 0, &[7]);
        assert_eq!(
            genie_single_node_test(&g, &labels, 0, &params, 3).unwrap(),
            2
        );
        let labels = CommunityLabels::new(vec![1, 1, 1, 1, 1, 1, 2, 2, 2, 2]).unwrap();
        let g = star(10, 0, &[2, 4]);
        assert_eq!(
            genie_single_node_test(&g, &labels, 0, &params, 3).unwrap(),
            1
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = SbmParams::new(3.0, 2.0, 4).unwrap();
        let labels = CommunityLabels::new(vec![1, 1, 2]).unwrap();
        assert!(genie_single_node_test(&SparseGraph::empty(4), &labels, 0, &params, 0).is_err());
        let labels = CommunityLabels::new(vec![1, 1, 2, 2]).unwrap();
        assert!(genie_single_node_test(&SparseGraph::empty(4), &labels, 4, &params, 0).is_err());
    }
}
