use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sawsle_core::pivot::RunStatus;
use sawsle_core::{Exponents, Statistic};

use sawsle_cli::analyze::{analyze, write_analysis};
use sawsle_cli::output::write_atomic;
use sawsle_cli::run::{load_accumulator, run, RunOptions};
use sawsle_cli::selftest::{run_selftest, Fault};
use sawsle_cli::tables::{enumeration_text, exact_table};
use sawsle_cli::RunConfig;

#[derive(Parser)]
#[command(
    name = "sawsle",
    version,
    about = "Half-plane SAW endpoint statistics against radial SLE(8/3)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample walks with the pivot algorithm and accumulate weighted statistics.
    Run(RunArgs),
    /// Produce CDF tables, the angular histogram and exponent fits.
    Analyze {
        /// Accumulator file, or a run directory containing accumulator.txt.
        input: PathBuf,
        /// Output directory (defaults to the run directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include a constant term in the (b, bbar) fit.
        #[arg(long)]
        intercept: bool,
    },
    /// Print the exact radial SLE CDFs on the standard grids as CSV.
    Exact {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every half-plane SAW of length N (N <= 12).
    Enumerate {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run quick consistency checks.
    Selftest {
        #[arg(long, value_enum, hide = true, default_value = "none")]
        inject_fault: FaultArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    None,
    SBranch,
}

#[derive(Args)]
struct RunArgs {
    /// key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    interval: Option<u64>,
    /// Warm-up iterations (default max(10 N, 10000)).
    #[arg(long)]
    warmup: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    checkpoint_every: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue from the checkpoints in the output directory.
    #[arg(long)]
    resume: bool,
    /// Stop every chain after this many iterations, leaving checkpoints.
    #[arg(long)]
    halt_after: Option<u64>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_text(&text)
                .with_context(|| format!("in {}", path.display()))?;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.samples {
            cfg.total_samples = v;
        }
        if let Some(v) = self.interval {
            cfg.sample_interval = v;
        }
        if self.warmup.is_some() {
            cfg.warmup = self.warmup;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.chains {
            cfg.chains = v;
        }
        if let Some(v) = self.blocks {
            cfg.blocks = v;
        }
        if let Some(v) = self.checkpoint_every {
            cfg.checkpoint_every = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        Ok(cfg)
    }
}

fn emit(out: Option<PathBuf>, text: String) -> Result<()> {
    match out {
        Some(path) => write_atomic(&path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main_inner(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let opts = RunOptions {
                resume: args.resume,
                halt_after: args.halt_after,
            };
            let summary = run(&cfg, &opts)?;
            for (c, r) in summary.chains.iter().enumerate() {
                eprintln!(
                    "chain {c}: {} samples, {} iterations, acceptance {:.4}, {:.2}s",
                    r.samples,
                    r.iterations,
                    r.acceptance_fraction,
                    r.wall_time.as_secs_f64()
                );
            }
            match (summary.status, summary.accumulator) {
                (RunStatus::Complete, Some(path)) => println!("complete: {}", path.display()),
                _ => println!(
                    "halted: resume with --resume --out {}",
                    cfg.out_dir.display()
                ),
            }
        }
        Command::Analyze {
            input,
            out,
            intercept,
        } => {
            let acc = load_accumulator(&input)?;
            let analysis = analyze(&acc, intercept)?;
            let dir = out.unwrap_or_else(|| {
                if input.is_dir() {
                    input.clone()
                } else {
                    input.parent().map(PathBuf::from).unwrap_or_default()
                }
            });
            write_analysis(&dir, &analysis)?;
            println!(
                "b = {:.6} +- {:.6}, bbar = {:.6} +- {:.6}, angular slope = {:.6} +- {:.6}",
                analysis.b(),
                analysis.exponent_fit.stderr(0),
                analysis.bbar(),
                analysis.exponent_fit.stderr(1),
                analysis.angular_slope(),
                analysis.angular_fit.stderr(0)
            );
            for stat in Statistic::ALL {
                println!(
                    "max |ecdf - exact| for {stat}: {:.5}",
                    analysis.max_cdf_deviation[stat.index()]
                );
            }
            println!("written to {}", dir.display());
        }
        Command::Exact { out } => emit(out, exact_table(&Exponents::conjectured())?)?,
        Command::Enumerate { n, out } => emit(out, enumeration_text(n)?)?,
        Command::Selftest { inject_fault } => {
            let fault = match inject_fault {
                FaultArg::None => Fault::None,
                FaultArg::SBranch => Fault::SBranch,
            };
            let checks = run_selftest(fault);
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
