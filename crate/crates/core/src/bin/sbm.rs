use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sbm_recovery::bounds::{BoundReport, DEFAULT_MAX_ITERS};
use sbm_recovery::cli::{self, OutputRecord, SimulateArgs, SweepArgs};
use sbm_recovery::simulation::{TrialStats, DEFAULT_RESTARTS, DEFAULT_TRIALS};

#[derive(Parser)]
#[command(
    name = "sbm",
    version,
    about = "Partial-recovery bounds and simulations for the sparse two-community SBM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print every bound for one (a, b).
    Bounds {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Cap on the conjectured iteration sequence.
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        iterations: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Estimate the expected recovery error of a decoder by Monte Carlo.
    Simulate {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: usize,
        /// random-guess | truth-stub | exact-bisection | local-bisection |
        /// two-step | two-step-faithful | two-step-exact
        #[arg(long, default_value = "two-step")]
        decoder: String,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        iterations: usize,
        /// Write `trial,seed,r` for every trial.
        #[arg(long)]
        dump_trials: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Bounds (and optional simulations) along a = ratio * b.
    Sweep {
        #[arg(long)]
        a_min: f64,
        #[arg(long)]
        a_max: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
        #[arg(long, default_value_t = 2.0)]
        ratio: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Omit to skip simulation.
        #[arg(long)]
        decoder: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        iterations: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: SweepFormat,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one graph and write it as an edge list plus a labels line.
    Generate {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

fn emit(record: &OutputRecord, format: Format, text: impl FnOnce() -> String) -> ExitCode {
    match (format, &record.error) {
        (Format::Text, None) => print!("{}", text()),
        (Format::Text, Some(err)) => eprintln!("error: {err}"),
        (Format::Json, _) => match record.to_json() {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    }
    ExitCode::from(record.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Bounds {
            a,
            b,
            iterations,
            format,
        } => {
            let record = cli::cmd_bounds(a, b, iterations);
            emit(&record, format, || {
                BoundReport::compute(a, b, iterations)
                    .map(|r| cli::render_bounds_text(&r))
                    .unwrap_or_default()
            })
        }
        Command::Simulate {
            a,
            b,
            n,
            decoder,
            restarts,
            trials,
            seed,
            iterations,
            dump_trials,
            format,
        } => {
            let record = cli::cmd_simulate(&SimulateArgs {
                a,
                b,
                n,
                decoder,
                restarts,
                trials,
                seed,
                iterations,
                dump_trials,
            });
            emit(&record, format, || {
                let mut s = BoundReport::compute(a, b, iterations)
                    .map(|r| cli::render_bounds_text(&r))
                    .unwrap_or_default();
                if let Ok(stats) =
                    serde_json::from_value::<TrialStats>(record.results["empirical"].clone())
                {
                    s.push_str(&cli::render_stats_text(&stats));
                }
                s
            })
        }
        Command::Sweep {
            a_min,
            a_max,
            points,
            ratio,
            n,
            decoder,
            restarts,
            trials,
            seed,
            iterations,
            format,
            out,
        } => {
            let args = SweepArgs {
                a_min,
                a_max,
                points,
                ratio,
                n,
                decoder,
                restarts,
                trials,
                seed,
                iterations,
            };
            let result = cli::cmd_sweep(&args).and_then(|rows| {
                let mut sink: Box<dyn Write> = match &out {
                    Some(path) => Box::new(cli::create_output(path)?),
                    None => Box::new(io::stdout().lock()),
                };
                match format {
                    SweepFormat::Csv => cli::write_sweep_csv(&rows, &mut sink)?,
                    SweepFormat::Json => {
                        writeln!(sink, "{}", cli::sweep_record(&args, &rows)?.to_json()?)?
                    }
                }
                sink.flush()?;
                Ok(())
            });
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Generate {
            a,
            b,
            n,
            seed,
            edges,
            labels,
        } => {
            let record = cli::cmd_generate(a, b, n, seed, &edges, &labels);
            emit(&record, Format::Json, String::new)
        }
    }
}
