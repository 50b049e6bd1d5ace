use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CommunityLabels, SparseGraph};
use crate::rng;

/// Largest node count accepted by [`ExactBisection`]; `C(24, 12)` is about
/// 2.7 million splits.
pub const MAX_EXACT_NODES: usize = 24;

/// A balanced split: both communities hold `n/2` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionResult {
    pub labels: CommunityLabels,
    pub cut_size: usize,
    /// Found by exhaustive search (globally optimal).
    pub exact: bool,
}

/// Anything that produces a balanced split of an even-sized graph.
pub trait BisectionDecoder: Sync {
    fn decode(&self, graph: &SparseGraph, seed: u64) -> Result<BisectionResult>;
}

fn check_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddNodeCount(n));
    }
    Ok(())
}

/// Exhaustive minimum bisection.
///
/// Node 0 is pinned to community 1 and the remaining members of community 1
/// are enumerated as combinations in lexicographic order; the first split
/// reaching the minimum cut is kept, which is also the lexicographically
/// smallest label vector among the optimal ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactBisection;

impl ExactBisection {
    pub fn solve(graph: &SparseGraph) -> Result<BisectionResult> {
        let n = graph.n();
        check_even(n)?;
        if n > MAX_EXACT_NODES {
            return Err(Error::Budget {
                n,
                max: MAX_EXACT_NODES,
            });
        }
        if n == 0 {
            return Ok(BisectionResult {
                labels: CommunityLabels::new(Vec::new())?,
                cut_size: 0,
                exact: true,
            });
        }
        let adj: Vec<u32> = (0..n)
            .map(|i| graph.neighbors(i).iter().fold(0u32, |m, &j| m | (1 << j)))
            .collect();
        let cut_of = |set: u32| -> u32 {
            let outside = !set;
            (0..n)
                .filter(|&i| set >> i & 1 == 1)
                .map(|i| (adj[i] & outside).count_ones())
                .sum()
        };

        // choose k more members of community 1 among nodes 1..n
        let k = n / 2 - 1;
        let mut idx: Vec<usize> = (1..=k).collect();
        let mut best_set = 0u32;
        let mut best_cut = u32::MAX;
        loop {
            let set = idx.iter().fold(1u32, |m, &i| m | (1 << i));
            let cut = cut_of(set);
            if cut < best_cut {
                best_cut = cut;
                best_set = set;
            }
            // advance to the next combination of {1, .., n-1}
            let mut pos = k;
            while pos > 0 && idx[pos - 1] == n - 1 - (k - pos) {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for p in pos..k {
                idx[p] = idx[p - 1] + 1;
            }
        }
        let sides: Vec<bool> = (0..n).map(|i| best_set >> i & 1 == 1).collect();
        Ok(BisectionResult {
            labels: CommunityLabels::from_sides(&sides),
            cut_size: best_cut as usize,
            exact: true,
        })
    }
}

impl BisectionDecoder for ExactBisection {
    fn decode(&self, graph: &SparseGraph, _seed: u64) -> Result<BisectionResult> {
        Self::solve(graph)
    }
}

/// Multi-restart steepest-descent pair swapping.
///
/// Each restart starts from a uniformly random balanced split and repeatedly
/// applies the single swap (one node from each side) with the largest cut
/// reduction until none reduces the cut. Restart `r` uses the seed
/// `derive_seed(seed, r)`; the best cut wins, earliest restart on ties.
#[derive(Debug, Clone, Copy)]
pub struct LocalSearchBisection {
    pub restarts: usize,
}

impl LocalSearchBisection {
    pub fn new(restarts: usize) -> Self {
        Self {
            restarts: restarts.max(1),
        }
    }
}

impl Default for LocalSearchBisection {
    fn default() -> Self {
        Self::new(20)
    }
}

impl BisectionDecoder for LocalSearchBisection {
    fn decode(&self, graph: &SparseGraph, seed: u64) -> Result<BisectionResult> {
        let n = graph.n();
        check_even(n)?;
        let runs: Vec<(Vec<bool>, usize)> = (0..self.restarts)
            .into_par_iter()
            .map(|r| descend(graph, rng::derive_seed(seed, r as u64)))
            .collect();
        let (mut sides, cut_size) = runs
            .into_iter()
            .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
            .expect("at least one restart");
        if sides.first() == Some(&false) {
            sides.iter_mut().for_each(|s| *s = !*s);
        }
        Ok(BisectionResult {
            labels: CommunityLabels::from_sides(&sides),
            cut_size,
            exact: false,
        })
    }
}

/// External minus internal degree of `u`.
fn gain_term(graph: &SparseGraph, side: &[bool], u: usize) -> i64 {
    graph
        .neighbors(u)
        .iter()
        .map(|&w| if side[w] != side[u] { 1 } else { -1 })
        .sum()
}

/// Moves `x` to the other side, keeping `d` current.
fn move_node(graph: &SparseGraph, side: &mut [bool], d: &mut [i64], x: usize) {
    side[x] = !side[x];
    for &w in graph.neighbors(x) {
        d[w] += if side[w] == side[x] { -2 } else { 2 };
    }
    d[x] = -d[x];
}

fn descend(graph: &SparseGraph, seed: u64) -> (Vec<bool>, usize) {
    let n = graph.n();
    let mut rng = rng::stream(seed, rng::DECODER_STREAM);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut side = vec![false; n];
    for &u in &order[..n / 2] {
        side[u] = true;
    }
    let mut d: Vec<i64> = (0..n).map(|u| gain_term(graph, &side, u)).collect();
    let mut cut = graph
        .edges()
        .iter()
        .filter(|&&(i, j)| side[i] != side[j])
        .count() as i64;

    let mut left: Vec<usize> = Vec::with_capacity(n / 2);
    let mut right: Vec<usize> = Vec::with_capacity(n / 2);
    loop {
        left.clear();
        right.clear();
        for u in 0..n {
            if side[u] {
                left.push(u);
            } else {
                right.push(u);
            }
        }
        left.sort_by_key(|&u| (-d[u], u));
        right.sort_by_key(|&u| (-d[u], u));

        let mut best_gain = 0i64;
        let mut best_pair = None;
        let top_right = match right.first() {
            Some(&v) => d[v],
            None => break,
        };
        for &u in &left {
            if d[u] + top_right <= best_gain {
                break;
            }
            for &v in &right {
                if d[u] + d[v] <= best_gain {
                    break;
                }
                let g = d[u] + d[v] - if graph.has_edge(u, v) { 2 } else { 0 };
                if g > best_gain {
                    best_gain = g;
                    best_pair = Some((u, v));
                }
            }
        }
        let Some((u, v)) = best_pair else { break };
        move_node(graph, &mut side, &mut d, u);
        move_node(graph, &mut side, &mut d, v);
        cut -= best_gain;
    }
    debug_assert!(cut >= 0);
    debug_assert!((0..n).all(|u| d[u] == gain_term(graph, &side, u)));
    (side, cut as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> SparseGraph {
        SparseGraph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])
            .unwrap()
    }

    #[test]
    fn exact_separates_cliques() {
        let res = ExactBisection::solve(&two_triangles()).unwrap();
        assert_eq!(res.cut_size, 1);
        assert_eq!(res.labels.as_slice(), &[1, 1, 1, 2, 2, 2]);
        assert!(res.exact);
    }

    #[test]
    fn exact_empty_graph_lexicographic() {
        let res = ExactBisection::solve(&SparseGraph::empty(4)).unwrap();
        assert_eq!(res.cut_size, 0);
        assert_eq!(res.labels.as_slice(), &[1, 1, 2, 2]);
    }

    #[test]
    fn exact_refuses() {
        assert!(matches!(
            ExactBisection::solve(&SparseGraph::empty(5)),
            Err(Error::OddNodeCount(5))
        ));
        assert!(matches!(
            ExactBisection::solve(&SparseGraph::empty(26)),
            Err(Error::Budget { n: 26, max: 24 })
        ));
    }

    #[test]
    fn exact_handles_two_nodes() {
        let g = SparseGraph::from_edges(2, [(0, 1)]).unwrap();
        let res = ExactBisection::solve(&g).unwrap();
        assert_eq!(res.cut_size, 1);
        assert_eq!(res.labels.as_slice(), &[1, 2]);
    }

    #[test]
    fn local_finds_clique_split() {
        let res = LocalSearchBisection::new(4)
            .decode(&two_triangles(), 11)
            .unwrap();
        assert_eq!(res.cut_size, 1);
        assert!(!res.exact);
        assert_eq!(res.labels.as_slice(), &[1, 1, 1, 2, 2, 2]);
        assert_eq!(res.cut_size, two_triangles().cut_size(&res.labels));
    }

    #[test]
    fn local_is_deterministic() {
        let g = crate::model::generate(&crate::model::SbmParams::new(8.0, 2.0, 60).unwrap(), 3).1;
        let d = LocalSearchBisection::new(5);
        assert_eq!(d.decode(&g, 1).unwrap(), d.decode(&g, 1).unwrap());
        assert!(matches!(
            d.decode(&SparseGraph::empty(7), 1),
            Err(Error::OddNodeCount(7))
        ));
    }
}
