use rayon::prelude::*;

use super::bisection::BisectionDecoder;
use super::genie::{neighbor_counts, threshold_decision};
use crate::error::Result;
use crate::model::{CommunityLabels, SbmParams, SparseGraph};
use crate::rng;

/// How Step 2 relabels a node from its edge counts into the first-step sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefinementRule {
    /// More edges into side 1 than side 2 picks 1; ties by seeded coin.
    #[default]
    Majority,
    /// The imbalance-corrected likelihood-ratio threshold of the genie test,
    /// with `delta` measured on the first-step estimate.
    Threshold,
}

/// Global rough split followed by per-node neighbor refinement.
///
/// In faithful mode the first step is rerun once per node with that node held
/// out, and each run is aligned to the first run by a global flip. The
/// practical mode runs the first step once on the whole graph.
#[derive(Debug, Clone, Copy)]
pub struct TwoStep<D> {
    pub first_step: D,
    pub faithful: bool,
    pub rule: RefinementRule,
}

impl<D: BisectionDecoder> TwoStep<D> {
    pub fn practical(first_step: D) -> Self {
        Self {
            first_step,
            faithful: false,
            rule: RefinementRule::Majority,
        }
    }

    pub fn faithful(first_step: D) -> Self {
        Self {
            first_step,
            faithful: true,
            rule: RefinementRule::Majority,
        }
    }

    pub fn with_rule(mut self, rule: RefinementRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn decode(
        &self,
        graph: &SparseGraph,
        params: &SbmParams,
        seed: u64,
    ) -> Result<CommunityLabels> {
        let n = graph.n();
        if n % 2 == 1 {
            // drop the highest-index node, decode the rest, label it at random
            let kept: Vec<usize> = (0..n - 1).collect();
            let sub = graph.induced(&kept);
            let mut labels = self
                .decode(&sub, params, rng::derive_seed(seed, 0))?
                .into_vec();
            let mut coin = rng::stream(seed, rng::DECODER_STREAM);
            labels.push(if rng::coin(&mut coin) { 1 } else { 2 });
            return CommunityLabels::new(labels);
        }

        let first_seed = rng::derive_seed(seed, 1);
        let mut tie_rng = rng::stream(rng::derive_seed(seed, 2), rng::DECODER_STREAM);
        let mut out = Vec::with_capacity(n);
        if self.faithful {
            let runs = aligned_leave_one_out(graph, &self.first_step, first_seed)?;
            for (j, estimate) in runs.iter().enumerate() {
                out.push(self.refine(graph, params, estimate, j, &mut tie_rng)?);
            }
        } else {
            let estimate = self.first_step.decode(graph, first_seed)?.labels;
            for j in 0..n {
                out.push(self.refine(graph, params, &estimate, j, &mut tie_rng)?);
            }
        }
        CommunityLabels::new(out)
    }

    fn refine(
        &self,
        graph: &SparseGraph,
        params: &SbmParams,
        estimate: &CommunityLabels,
        j: usize,
        tie_rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<u8> {
        let counts = neighbor_counts(graph, estimate, j);
        let delta = match self.rule {
            RefinementRule::Majority => 0.0,
            RefinementRule::Threshold => {
                let (mut m1, mut m2) = estimate.counts();
                match estimate.get(j) {
                    1 => m1 -= 1,
                    _ => m2 -= 1,
                }
                let others = (m1 + m2) as f64;
                if others > 0.0 {
                    (m1 as f64 - m2 as f64) / others
                } else {
                    0.0
                }
            }
        };
        threshold_decision(counts, delta, params.a(), params.b(), tie_rng)
    }
}

/// Majority refinement with a practical or faithful first step.
pub fn two_step_decode<D: BisectionDecoder>(
    graph: &SparseGraph,
    params: &SbmParams,
    first_step: D,
    faithful: bool,
    seed: u64,
) -> Result<CommunityLabels> {
    TwoStep {
        first_step,
        faithful,
        rule: RefinementRule::Majority,
    }
    .decode(graph, params, seed)
}

/// Leave-one-out first-step estimates, aligned to run 0.
///
/// Run `j` decodes the graph without node `j` and without the highest-index
/// remaining node (so the decoded set has even size), then gives `j` label 1
/// and the second dropped node label 2, keeping the sides equal. Every run
/// after the first is flipped globally when it agrees with run 0 on fewer
/// than half of the nodes; exactly half keeps it as is. Run `j` uses the
/// seed `derive_seed(seed, j)` and runs are independent, so the parallel
/// schedule does not affect the output.
pub fn aligned_leave_one_out<D: BisectionDecoder + ?Sized>(
    graph: &SparseGraph,
    first_step: &D,
    seed: u64,
) -> Result<Vec<CommunityLabels>> {
    let n = graph.n();
    let mut runs: Vec<Vec<u8>> = (0..n)
        .into_par_iter()
        .map(|j| -> Result<Vec<u8>> {
            let extra = (0..n).rev().find(|&v| v != j);
            let kept: Vec<usize> = (0..n).filter(|&v| v != j && Some(v) != extra).collect();
            let mut full = vec![0u8; n];
            if !kept.is_empty() {
                let res =
                    first_step.decode(&graph.induced(&kept), rng::derive_seed(seed, j as u64))?;
                for (k, &v) in kept.iter().enumerate() {
                    full[v] = res.labels.get(k);
                }
            }
            full[j] = 1;
            if let Some(x) = extra {
                full[x] = 2;
            }
            Ok(full)
        })
        .collect::<Result<_>>()?;

    if let Some((reference, rest)) = runs.split_first_mut() {
        for run in rest {
            let agree = run
                .iter()
                .zip(reference.iter())
                .filter(|(x, y)| x == y)
                .count();
            if 2 * agree < n {
                run.iter_mut().for_each(|v| *v = 3 - *v);
            }
        }
    }
    runs.into_iter().map(CommunityLabels::new).collect()
}
