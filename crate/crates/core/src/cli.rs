//! Command implementations behind the `sbm` binary.
//!
//! Each command returns an [`OutputRecord`] (or writes CSV) so that the
//! binary only parses flags and chooses where output goes.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{BoundReport, Provenance};
use crate::error::{Error, Result};
use crate::model::{self, imbalance_check, SbmParams};
use crate::simulation::{
    self, run_trials, DecoderSpec, SweepConfig, SweepRow, TrialPlan, TrialStats,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the directory that relative output paths are
/// resolved against.
pub const OUTPUT_DIR_ENV: &str = "SBM_OUTPUT_DIR";

/// Frozen sweep CSV header; changing it requires a schema version bump.
pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "a",
    "b",
    "necessary",
    "alpha_hp",
    "refined",
    "iter1",
    "iter2",
    "empirical_mean",
    "ci_low",
    "ci_high",
];

/// Label attached to every empirical-versus-bound comparison.
pub const FINITE_N_NOTE: &str = "asymptotic claim, finite-n check";

/// Machine-readable result of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub seed: Option<u64>,
    pub error: Option<String>,
}

impl OutputRecord {
    fn ok(command: &str, inputs: Value, results: Value, seed: Option<u64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            results,
            seed,
            error: None,
        }
    }

    fn failed(command: &str, inputs: Value, seed: Option<u64>, err: &Error) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            results: Value::Null,
            seed,
            error: Some(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// Process exit code: 0 iff no error is recorded.
    pub fn exit_code(&self) -> i32 {
        if self.is_ok() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Tagged<T> {
    value: T,
    provenance: Provenance,
}

fn theorem<T>(value: T) -> Tagged<T> {
    Tagged {
        value,
        provenance: Provenance::Theorem,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaggedAlpha {
    value: f64,
    saturated: bool,
    residual: f64,
    provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaggedSequence {
    values: Vec<f64>,
    provenance: Provenance,
}

/// [`BoundReport`] with a provenance tag on every number.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaggedBounds {
    a: f64,
    b: f64,
    necessary: Tagged<f64>,
    alpha_hp: TaggedAlpha,
    refined: Tagged<Option<f64>>,
    iterated: TaggedSequence,
    correlated_possible: Tagged<bool>,
}

impl From<&BoundReport> for TaggedBounds {
    fn from(r: &BoundReport) -> Self {
        Self {
            a: r.a,
            b: r.b,
            necessary: theorem(r.necessary),
            alpha_hp: TaggedAlpha {
                value: r.alpha_hp.alpha,
                saturated: r.alpha_hp.saturated,
                residual: r.alpha_hp.residual,
                provenance: Provenance::Theorem,
            },
            refined: theorem(r.refined),
            iterated: TaggedSequence {
                values: r.iterated.clone(),
                provenance: Provenance::Conjecture,
            },
            correlated_possible: theorem(r.correlated_possible),
        }
    }
}

fn bounds_value(report: &BoundReport) -> Result<Value> {
    Ok(serde_json::to_value(TaggedBounds::from(report))?)
}

/// `bounds`: every closed-form bound for one `(a, b)`.
pub fn cmd_bounds(a: f64, b: f64, iterations: usize) -> OutputRecord {
    let inputs = json!({ "a": a, "b": b, "iterations": iterations });
    match BoundReport::compute(a, b, iterations).and_then(|r| bounds_value(&r)) {
        Ok(bounds) => OutputRecord::ok("bounds", inputs, json!({ "bounds": bounds }), None),
        Err(e) => OutputRecord::failed("bounds", inputs, None, &e),
    }
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub decoder: String,
    pub restarts: usize,
    pub trials: usize,
    pub seed: u64,
    pub iterations: usize,
    /// Per-trial `trial,seed,r` CSV.
    pub dump_trials: Option<PathBuf>,
}

/// `simulate`: Monte Carlo estimate next to the bounds.
pub fn cmd_simulate(args: &SimulateArgs) -> OutputRecord {
    let inputs = json!({
        "a": args.a,
        "b": args.b,
        "n": args.n,
        "decoder": args.decoder,
        "restarts": args.restarts,
        "trials": args.trials,
        "iterations": args.iterations,
    });
    match simulate(args) {
        Ok(results) => OutputRecord::ok("simulate", inputs, results, Some(args.seed)),
        Err(e) => OutputRecord::failed("simulate", inputs, Some(args.seed), &e),
    }
}

fn simulate(args: &SimulateArgs) -> Result<Value> {
    let params = SbmParams::new(args.a, args.b, args.n)?;
    let decoder = DecoderSpec::from_name(&args.decoder, args.restarts)?;
    let report = BoundReport::compute(args.a, args.b, args.iterations)?;
    let outcome = run_trials(&TrialPlan::new(params, decoder, args.trials, args.seed))?;
    if let Some(path) = &args.dump_trials {
        simulation::write_trial_dump(&outcome.records, create_output(path)?)?;
    }
    let stats = outcome.stats;
    let upper = report.refined.unwrap_or(report.alpha_hp.alpha);
    Ok(json!({
        "empirical": stats,
        "bounds": bounds_value(&report)?,
        "comparison": {
            "note": FINITE_N_NOTE,
            "above_necessary_minus_3se": stats.mean_r >= report.necessary - 3.0 * stats.stderr,
            "below_achievable_plus_3se": stats.mean_r <= upper + 3.0 * stats.stderr,
        },
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub a_min: f64,
    pub a_max: f64,
    pub points: usize,
    pub ratio: f64,
    pub n: usize,
    /// `None` disables simulation.
    pub decoder: Option<String>,
    pub restarts: usize,
    pub trials: usize,
    pub seed: u64,
    pub iterations: usize,
}

impl SweepArgs {
    pub fn a_values(&self) -> Vec<f64> {
        let step = (self.a_max - self.a_min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.a_max
                } else {
                    self.a_min + step * k as f64
                }
            })
            .collect()
    }
}

/// `sweep`: bounds (and optional simulations) along `a = ratio * b`.
pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    if !(args.a_min > 0.0 && args.a_min.is_finite()) {
        return Err(Error::Param(format!(
            "a_min > 0 required, got {}",
            args.a_min
        )));
    }
    if args.points < 2 {
        return Err(Error::Param(format!(
            "points >= 2 required, got {}",
            args.points
        )));
    }
    if !(args.a_max > args.a_min && args.a_max.is_finite()) {
        return Err(Error::Param(format!(
            "a_max > a_min required, got a_min = {}, a_max = {}",
            args.a_min, args.a_max
        )));
    }
    let decoder = args
        .decoder
        .as_deref()
        .map(|d| DecoderSpec::from_name(d, args.restarts))
        .transpose()?;
    simulation::sweep(
        &args.a_values(),
        &SweepConfig {
            ratio: args.ratio,
            n: args.n,
            decoder,
            trials: args.trials,
            master_seed: args.seed,
            iterations: args.iterations,
        },
    )
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Sweep rows as CSV with [`SWEEP_CSV_HEADER`]; absent values are empty.
pub fn write_sweep_csv(rows: &[SweepRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        let bounds = row.bounds.as_ref();
        let stats: Option<&TrialStats> = row.empirical.as_ref();
        out.write_record([
            row.a.to_string(),
            row.b.to_string(),
            opt(bounds.map(|r| r.necessary)),
            opt(bounds.map(|r| r.alpha_hp.alpha)),
            opt(bounds.and_then(|r| r.refined)),
            opt(bounds.and_then(|r| r.iterated.first().copied())),
            opt(bounds.and_then(|r| r.iterated.get(1).copied())),
            opt(stats.map(|s| s.mean_r)),
            opt(stats.map(|s| s.ci95.0)),
            opt(stats.map(|s| s.ci95.1)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Sweep rows wrapped in an [`OutputRecord`].
pub fn sweep_record(args: &SweepArgs, rows: &[SweepRow]) -> Result<OutputRecord> {
    let inputs = json!({
        "a_min": args.a_min,
        "a_max": args.a_max,
        "points": args.points,
        "ratio": args.ratio,
        "n": args.n,
        "decoder": args.decoder,
        "restarts": args.restarts,
        "trials": args.trials,
        "iterations": args.iterations,
    });
    let rows = rows
        .iter()
        .map(|row| -> Result<Value> {
            Ok(json!({
                "a": row.a,
                "b": row.b,
                "bounds": row.bounds.as_ref().map(bounds_value).transpose()?,
                "empirical": row.empirical,
                "note": row.empirical.map(|_| FINITE_N_NOTE),
                "error": row.error,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutputRecord::ok(
        "sweep",
        inputs,
        json!({ "rows": rows }),
        Some(args.seed),
    ))
}

/// `generate`: draw one instance and write the edge list and labels.
pub fn cmd_generate(
    a: f64,
    b: f64,
    n: usize,
    seed: u64,
    edges: &Path,
    labels: &Path,
) -> OutputRecord {
    let inputs = json!({ "a": a, "b": b, "n": n, "edges": edges, "labels": labels });
    let run = || -> Result<Value> {
        let params = SbmParams::new(a, b, n)?;
        let (truth, graph) = model::generate(&params, seed);
        let mut w = create_output(edges)?;
        graph.write_edge_list(&mut w)?;
        w.flush()?;
        let mut w = create_output(labels)?;
        writeln!(w, "{}", truth.to_line())?;
        w.flush()?;
        Ok(json!({
            "edge_count": graph.edge_count(),
            "imbalance": imbalance_check(&truth)?,
        }))
    };
    match run() {
        Ok(results) => OutputRecord::ok("generate", inputs, results, Some(seed)),
        Err(e) => OutputRecord::failed("generate", inputs, Some(seed), &e),
    }
}

/// Resolves relative paths against `$SBM_OUTPUT_DIR` when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn create_output(path: &Path) -> Result<BufWriter<File>> {
    let path = resolve_output(path);
    let file = File::create(&path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot write {}: {e}", path.display()),
        ))
    })?;
    Ok(BufWriter::new(file))
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Aligned human-readable rendering of a bounds report.
pub fn render_bounds_text(report: &BoundReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "a = {}, b = {}", report.a, report.b);
    let _ = writeln!(
        s,
        "{:<34} {:<12} {}",
        "necessary (converse)",
        "[theorem]",
        sig6(report.necessary)
    );
    let alpha = if report.alpha_hp.saturated {
        format!("{} (saturated)", sig6(report.alpha_hp.alpha))
    } else {
        sig6(report.alpha_hp.alpha)
    };
    let _ = writeln!(
        s,
        "{:<34} {:<12} {}",
        "high-probability alpha", "[theorem]", alpha
    );
    let refined = report
        .refined
        .map(sig6)
        .unwrap_or_else(|| "absent (alpha >= 1/4)".into());
    let _ = writeln!(
        s,
        "{:<34} {:<12} {}",
        "refined (two-step)", "[theorem]", refined
    );
    for (t, v) in report.iterated.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:<34} {:<12} {}",
            format!("iteration {}", t + 1),
            "[conjecture]",
            sig6(*v)
        );
    }
    let _ = writeln!(
        s,
        "{:<34} {:<12} {}",
        "correlated recovery possible", "[theorem]", report.correlated_possible
    );
    s
}

/// Aligned human-readable rendering of trial statistics.
pub fn render_stats_text(stats: &TrialStats) -> String {
    format!(
        "empirical mean r = {} (sd {}, se {}, 95% CI [{}, {}], {} trials, {} ms) -- {}\n",
        sig6(stats.mean_r),
        sig6(stats.std_r),
        sig6(stats.stderr),
        sig6(stats.ci95.0),
        sig6(stats.ci95.1),
        stats.trials,
        stats.runtime_ms,
        FINITE_N_NOTE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(0.123456789), "0.123457");
        assert_eq!(sig6(12.0), "12.0000");
        assert_eq!(sig6(0.5), "0.500000");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn bounds_record_tags() {
        let rec = cmd_bounds(100.0, 50.0, 2);
        assert!(rec.is_ok());
        let b = &rec.results["bounds"];
        assert_eq!(b["necessary"]["provenance"], "theorem");
        assert_eq!(b["refined"]["provenance"], "theorem");
        assert_eq!(b["iterated"]["provenance"], "conjecture");
        assert_eq!(b["iterated"]["values"].as_array().unwrap().len(), 2);
        assert_eq!(rec.seed, None);
    }

    #[test]
    fn bounds_record_error() {
        let rec = cmd_bounds(4.0, 4.0, 2);
        assert_eq!(rec.exit_code(), 2);
        assert!(rec.error.as_deref().unwrap().contains("a > b"));
    }

    #[test]
    fn sweep_argument_validation() {
        let args = SweepArgs {
            a_min: 10.0,
            a_max: 10.0,
            points: 2,
            ratio: 2.0,
            n: 100,
            decoder: None,
            restarts: 1,
            trials: 0,
            seed: 0,
            iterations: 2,
        };
        assert!(cmd_sweep(&args).is_err());
        assert!(cmd_sweep(&SweepArgs {
            a_max: 20.0,
            points: 1,
            ..args.clone()
        })
        .is_err());
        assert!(cmd_sweep(&SweepArgs {
            a_min: 0.0,
            a_max: 20.0,
            ..args.clone()
        })
        .is_err());
        let rows = cmd_sweep(&SweepArgs {
            a_max: 20.0,
            points: 3,
            ..args
        })
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.a).collect::<Vec<_>>(),
            vec![10.0, 15.0, 20.0]
        );
    }

    #[test]
    fn text_rendering_mentions_conjecture() {
        let rep = BoundReport::compute(200.0, 100.0, 2).unwrap();
        let text = render_bounds_text(&rep);
        assert!(text.contains("[conjecture]"));
        assert!(text.contains("iteration 2"));
        let rep = BoundReport::compute(60.0, 30.0, 2).unwrap();
        assert!(render_bounds_text(&rep).contains("absent"));
    }
}
