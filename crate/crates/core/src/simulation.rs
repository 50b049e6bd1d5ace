//! Seeded Monte Carlo estimation of the expected recovery error.
//!
//! Trial `i` of a plan uses the seed `derive_seed(master_seed, i)` for both
//! graph generation and decoding, and per-trial results are collected by
//! index before they are reduced, so a parallel run reproduces a sequential
//! one bit for bit.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::decoders::{
    genie_single_node_test, BisectionDecoder, ExactBisection, LocalSearchBisection, RefinementRule,
    TwoStep,
};
use crate::error::{Error, Result};
use crate::model::{self, recovery_error, CommunityLabels, SbmParams, SparseGraph};
use crate::rng;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_RESTARTS: usize = 20;

/// Decoder selection for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecoderSpec {
    /// Independent fair coin per node.
    RandomGuess,
    /// Returns the true labels; a harness self-check.
    TruthStub,
    ExactBisection,
    LocalBisection {
        restarts: usize,
    },
    /// Two-step procedure with a local-search first step.
    TwoStep {
        restarts: usize,
        faithful: bool,
        threshold_rule: bool,
    },
    /// Two-step procedure with the exhaustive first step.
    TwoStepExact {
        faithful: bool,
    },
}

impl DecoderSpec {
    pub const NAMES: [&'static str; 7] = [
        "random-guess",
        "truth-stub",
        "exact-bisection",
        "local-bisection",
        "two-step",
        "two-step-faithful",
        "two-step-exact",
    ];

    /// Parses a decoder name, filling in `restarts` where relevant.
    pub fn from_name(name: &str, restarts: usize) -> Result<Self> {
        Ok(match name {
            "random-guess" => Self::RandomGuess,
            "truth-stub" => Self::TruthStub,
            "exact-bisection" => Self::ExactBisection,
            "local-bisection" => Self::LocalBisection { restarts },
            "two-step" => Self::TwoStep {
                restarts,
                faithful: false,
                threshold_rule: false,
            },
            "two-step-faithful" => Self::TwoStep {
                restarts,
                faithful: true,
                threshold_rule: false,
            },
            "two-step-exact" => Self::TwoStepExact { faithful: false },
            other => {
                return Err(Error::Parse(format!(
                    "unknown decoder {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RandomGuess => "random-guess",
            Self::TruthStub => "truth-stub",
            Self::ExactBisection => "exact-bisection",
            Self::LocalBisection { .. } => "local-bisection",
            Self::TwoStep {
                faithful: false, ..
            } => "two-step",
            Self::TwoStep { faithful: true, .. } => "two-step-faithful",
            Self::TwoStepExact { .. } => "two-step-exact",
        }
    }

    /// Decodes one graph. `truth` is read only by [`DecoderSpec::TruthStub`].
    pub fn decode(
        &self,
        params: &SbmParams,
        graph: &SparseGraph,
        truth: &CommunityLabels,
        seed: u64,
    ) -> Result<CommunityLabels> {
        Ok(match *self {
            Self::RandomGuess => {
                let mut rng = rng::stream(seed, rng::DECODER_STREAM);
                let sides: Vec<bool> = (0..graph.n()).map(|_| rng::coin(&mut rng)).collect();
                CommunityLabels::from_sides(&sides)
            }
            Self::TruthStub => truth.clone(),
            Self::ExactBisection => ExactBisection.decode(graph, seed)?.labels,
            Self::LocalBisection { restarts } => {
                LocalSearchBisection::new(restarts)
                    .decode(graph, seed)?
                    .labels
            }
            Self::TwoStep {
                restarts,
                faithful,
                threshold_rule,
            } => TwoStep {
                first_step: LocalSearchBisection::new(restarts),
                faithful,
                rule: if threshold_rule {
                    RefinementRule::Threshold
                } else {
                    RefinementRule::Majority
                },
            }
            .decode(graph, params, seed)?,
            Self::TwoStepExact { faithful } => TwoStep {
                first_step: ExactBisection,
                faithful,
                rule: RefinementRule::Majority,
            }
            .decode(graph, params, seed)?,
        })
    }
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s, DEFAULT_RESTARTS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub params: SbmParams,
    pub decoder: DecoderSpec,
    pub trials: usize,
    pub master_seed: u64,
    /// Run trials on the rayon pool; results are identical either way.
    pub parallel: bool,
}

impl TrialPlan {
    pub fn new(params: SbmParams, decoder: DecoderSpec, trials: usize, master_seed: u64) -> Self {
        Self {
            params,
            decoder,
            trials,
            master_seed,
            parallel: true,
        }
    }

    pub fn trial_seed(&self, index: usize) -> u64 {
        rng::derive_seed(self.master_seed, index as u64)
    }
}

/// One trial for audit dumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub mean_r: f64,
    /// Sample standard deviation (`trials - 1` denominator; 0 for one trial).
    pub std_r: f64,
    pub stderr: f64,
    /// Normal-approximation 95% interval.
    pub ci95: (f64, f64),
    pub trials: usize,
    pub runtime_ms: u64,
}

impl TrialStats {
    pub fn from_values(values: &[f64], runtime_ms: u64) -> Self {
        let trials = values.len();
        let mean_r = values.iter().sum::<f64>() / trials as f64;
        let std_r = if trials > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean_r).powi(2)).sum();
            (ss / (trials - 1) as f64).sqrt()
        } else {
            0.0
        };
        let stderr = std_r / (trials as f64).sqrt();
        Self {
            mean_r,
            std_r,
            stderr,
            ci95: (mean_r - Z95 * stderr, mean_r + Z95 * stderr),
            trials,
            runtime_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub stats: TrialStats,
    pub records: Vec<TrialRecord>,
}

fn run_indexed<F>(trials: usize, parallel: bool, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let wrap = |i: usize| {
        f(i).map_err(|e| Error::Trial {
            index: i,
            source: Box::new(e),
        })
    };
    if parallel {
        (0..trials).into_par_iter().map(wrap).collect()
    } else {
        (0..trials).map(wrap).collect()
    }
}

/// Generates, decodes and scores `plan.trials` independent instances.
pub fn run_trials(plan: &TrialPlan) -> Result<TrialOutcome> {
    if plan.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let values = run_indexed(plan.trials, plan.parallel, |i| {
        let seed = plan.trial_seed(i);
        let (truth, graph) = model::generate(&plan.params, seed);
        let estimate =
            plan.decoder
                .decode(&plan.params, &graph, &truth, rng::derive_seed(seed, 1))?;
        Ok(recovery_error(&truth, &estimate)?.r)
    })?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let records = values
        .iter()
        .enumerate()
        .map(|(i, &r)| TrialRecord {
            trial: i,
            seed: plan.trial_seed(i),
            r,
        })
        .collect();
    Ok(TrialOutcome {
        stats: TrialStats::from_values(&values, runtime_ms),
        records,
    })
}

/// Error rate of the genie-aided test on node 0.
///
/// Each trial draws labels and node 0's edges (see [`model::generate_star`])
/// and records 1 when the test mislabels node 0. The mean estimates the
/// finite-`n` counterpart of the necessary bound.
pub fn run_genie_trials(
    params: &SbmParams,
    trials: usize,
    master_seed: u64,
    parallel: bool,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let values = run_indexed(trials, parallel, |i| {
        let seed = rng::derive_seed(master_seed, i as u64);
        let (labels, star) = model::generate_star(params, seed, 0);
        let guess = genie_single_node_test(&star, &labels, 0, params, rng::derive_seed(seed, 1))?;
        Ok(if guess == labels.get(0) { 0.0 } else { 1.0 })
    })?;
    Ok(TrialStats::from_values(
        &values,
        start.elapsed().as_millis() as u64,
    ))
}

/// CSV audit dump: `trial,seed,r`.
pub fn write_trial_dump(records: &[TrialRecord], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for rec in records {
        out.serialize(rec)?;
    }
    out.flush()?;
    Ok(())
}

/// One point of a sweep along `a = ratio * b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub b: f64,
    pub bounds: Option<BoundReport>,
    pub empirical: Option<TrialStats>,
    /// Failure for this point; the sweep continues past it.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub ratio: f64,
    pub n: usize,
    /// `None` disables simulation.
    pub decoder: Option<DecoderSpec>,
    pub trials: usize,
    pub master_seed: u64,
    /// Length cap of the conjectured sequence in each row.
    pub iterations: usize,
}

/// Bounds (and optionally a simulation) at every `a` in `a_values`, with
/// `b = a / ratio`. Rows come back sorted by `a`; point `k` of the sorted
/// list simulates with master seed `derive_seed(master_seed, k)`.
pub fn sweep(a_values: &[f64], config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if !(config.ratio > 1.0) {
        return Err(Error::Param(format!(
            "ratio > 1 required, got {}",
            config.ratio
        )));
    }
    if let Some(bad) = a_values.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::Param(format!(
            "a values must be positive, got {bad}"
        )));
    }
    let mut sorted = a_values.to_vec();
    sorted.sort_by(f64::total_cmp);

    Ok(sorted
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let b = a / config.ratio;
            let mut row = SweepRow {
                a,
                b,
                bounds: None,
                empirical: None,
                error: None,
            };
            match BoundReport::compute(a, b, config.iterations) {
                Ok(rep) => row.bounds = Some(rep),
                Err(e) => row.error = Some(e.to_string()),
            }
            if let (Some(decoder), true) = (config.decoder, config.trials > 0) {
                let sim = SbmParams::new(a, b, config.n).and_then(|params| {
                    let plan = TrialPlan::new(
                        params,
                        decoder,
                        config.trials,
                        rng::derive_seed(config.master_seed, k as u64),
                    );
                    run_trials(&plan)
                });
                match sim {
                    Ok(out) => row.empirical = Some(out.stats),
                    Err(e) => {
                        let msg = e.to_string();
                        row.error = Some(match row.error.take() {
                            Some(prev) => format!("{prev}; {msg}"),
                            None => msg,
                        });
                    }
                }
            }
            row
        })
        .collect())
}

/// Exact `E[min(B, n - B) / n]` for `B ~ Binomial(n, 1/2)`: the expected
/// error of guessing every label by a fair coin.
pub fn random_guess_expected_error(n: usize) -> f64 {
    // log-space binomial pmf to stay finite for large n
    let ln_half_n = n as f64 * 0.5f64.ln();
    let mut ln_choose = 0.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        total += (ln_choose + ln_half_n).exp() * k.min(n - k) as f64;
    }
    total / n as f64
}
