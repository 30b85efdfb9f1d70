//! Multi-chain runs with per-chain checkpoints and a merged accumulator.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use sawsle_core::pivot::{resume_chain, RunStatus};
use sawsle_core::{
    stats_fast, weight, Accumulator, ChainObserver, ChainState, Exponents, LatticeWalk, RunReport,
};

use crate::config::RunConfig;
use crate::output::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const ACCUMULATOR_FILE: &str = "accumulator.txt";
pub const REPORT_FILE: &str = "report.txt";
const ACCUMULATOR_MARKER: &str = "--- accumulator ---";

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub resume: bool,
    /// Every chain stops once it has run this many iterations in total.
    pub halt_after: Option<u64>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub status: RunStatus,
    pub chains: Vec<RunReport>,
    /// Present once every chain has finished.
    pub accumulator: Option<PathBuf>,
}

pub fn checkpoint_path(dir: &Path, chain: usize) -> PathBuf {
    dir.join(format!("chain-{chain}.ckpt"))
}

struct ChainSink {
    acc: Accumulator,
    exponents: Exponents,
    path: PathBuf,
}

impl ChainObserver for ChainSink {
    fn observe(&mut self, walk: &LatticeWalk) -> sawsle_core::Result<()> {
        let stats = stats_fast(walk, self.exponents.nu)?;
        self.acc.accumulate(&stats, weight(&stats, &self.exponents));
        Ok(())
    }

    fn checkpoint(&mut self, state: &ChainState) -> sawsle_core::Result<()> {
        let mut buf = Vec::new();
        state.write_checkpoint(&mut buf)?;
        buf.extend_from_slice(ACCUMULATOR_MARKER.as_bytes());
        buf.push(b'\n');
        self.acc.write_text(&mut buf)?;
        write_atomic(&self.path, &buf)
            .map_err(|e| sawsle_core::Error::Io(std::io::Error::other(format!("{e:#}"))))
    }
}

fn read_chain_checkpoint(path: &Path) -> Result<(ChainState, Accumulator)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (state, acc) = text
        .split_once(&format!("\n{ACCUMULATOR_MARKER}\n"))
        .with_context(|| format!("{} has no accumulator section", path.display()))?;
    let state = ChainState::read_checkpoint(state.as_bytes())
        .with_context(|| format!("parsing chain state in {}", path.display()))?;
    let acc = Accumulator::read_text(acc.as_bytes())
        .with_context(|| format!("parsing accumulator in {}", path.display()))?;
    Ok((state, acc))
}

fn run_one(cfg: &RunConfig, chain: usize, opts: &RunOptions) -> Result<(RunReport, Accumulator)> {
    let mut config = cfg.chain_config(chain);
    config.halt_after = opts.halt_after;
    let path = checkpoint_path(&cfg.out_dir, chain);
    let (mut state, acc) = if opts.resume && path.exists() {
        read_chain_checkpoint(&path)?
    } else {
        (
            ChainState::start(&config),
            Accumulator::new(cfg.blocks, config.total_samples),
        )
    };
    let mut sink = ChainSink {
        acc,
        exponents: Exponents::conjectured(),
        path,
    };
    let report =
        resume_chain(&config, &mut state, &mut sink).with_context(|| format!("chain {chain}"))?;
    Ok((report, sink.acc))
}

fn report_text(cfg: &RunConfig, reports: &[RunReport]) -> String {
    let mut s = String::new();
    let wall: Duration = reports
        .iter()
        .map(|r| r.wall_time)
        .max()
        .unwrap_or_default();
    writeln!(s, "n={}", cfg.n).unwrap();
    for (c, r) in reports.iter().enumerate() {
        writeln!(
            s,
            "chain={c} status={:?} iterations={} accepted={} acceptance={:.6} samples={} seconds={:.3} rng={}",
            r.status,
            r.iterations,
            r.accepted,
            r.acceptance_fraction,
            r.samples,
            r.wall_time.as_secs_f64(),
            r.rng_algorithm
        )
        .unwrap();
    }
    writeln!(s, "wall_seconds={:.3}", wall.as_secs_f64()).unwrap();
    s
}

/// Runs (or resumes) every chain of `cfg` in parallel. When all chains
/// finish, their accumulators are merged in chain order and written to
/// `accumulator.txt` in the output directory.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = &cfg.out_dir;
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = cfg.manifest();
    if manifest_path.exists() {
        if !opts.resume {
            bail!(
                "{} already holds a run; pass --resume to continue it or choose another directory",
                dir.display()
            );
        }
        let existing = fs::read_to_string(&manifest_path)?;
        if existing != manifest {
            bail!(
                "the configuration differs from the run recorded in {}",
                manifest_path.display()
            );
        }
    } else {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_atomic(&manifest_path, manifest.as_bytes())?;
    }

    let results: Vec<Result<(RunReport, Accumulator)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.chains)
            .map(|c| scope.spawn(move || run_one(cfg, c, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(anyhow::anyhow!("chain thread panicked")))
            })
            .collect()
    });
    let mut reports = Vec::with_capacity(cfg.chains);
    let mut accs = Vec::with_capacity(cfg.chains);
    for r in results {
        let (report, acc) = r?;
        reports.push(report);
        accs.push(acc);
    }
    write_atomic(
        &dir.join(REPORT_FILE),
        report_text(cfg, &reports).as_bytes(),
    )?;

    if reports.iter().any(|r| r.status == RunStatus::Halted) {
        return Ok(RunSummary {
            status: RunStatus::Halted,
            chains: reports,
            accumulator: None,
        });
    }
    let mut iter = accs.into_iter();
    let mut merged = iter.next().expect("at least one chain");
    for acc in iter {
        merged.merge(&acc)?;
    }
    let mut buf = Vec::new();
    merged.write_text(&mut buf)?;
    let path = dir.join(ACCUMULATOR_FILE);
    write_atomic(&path, &buf)?;
    Ok(RunSummary {
        status: RunStatus::Complete,
        chains: reports,
        accumulator: Some(path),
    })
}

pub fn load_accumulator(path: &Path) -> Result<Accumulator> {
    let path = if path.is_dir() {
        path.join(ACCUMULATOR_FILE)
    } else {
        path.to_path_buf()
    };
    let text = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    Accumulator::read_text(text.as_slice()).with_context(|| format!("parsing {}", path.display()))
}
