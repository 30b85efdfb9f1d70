//! Run configuration: plain `key=value` text, also used as the run manifest.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use sawsle_core::estimators::DEFAULT_BLOCKS;
use sawsle_core::pivot::{
    default_warmup, ChainConfig, DEFAULT_CHECKPOINT_EVERY, DEFAULT_SAMPLE_INTERVAL,
};
use sawsle_core::rng::RNG_ALGORITHM;

pub const MANIFEST_FORMAT: &str = "sawsle-manifest v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub total_samples: u64,
    pub sample_interval: u64,
    /// `None` means `max(10 N, 10^4)` iterations.
    pub warmup: Option<u64>,
    pub seed: u64,
    pub chains: usize,
    pub blocks: usize,
    pub checkpoint_every: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 1000,
            total_samples: 1_000_000,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            warmup: None,
            seed: 1,
            chains: 1,
            blocks: DEFAULT_BLOCKS,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            out_dir: PathBuf::from("sawsle-run"),
        }
    }
}

impl RunConfig {
    pub fn warmup_iterations(&self) -> u64 {
        self.warmup.unwrap_or_else(|| default_warmup(self.n))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n as u64),
            ("samples", self.total_samples),
            ("interval", self.sample_interval),
            ("chains", self.chains as u64),
            ("blocks", self.blocks as u64),
            ("checkpoint_every", self.checkpoint_every),
        ];
        for (key, v) in positive {
            if v == 0 {
                bail!("`{key}` must be positive");
            }
        }
        if (self.chains as u64) > self.total_samples {
            bail!(
                "more chains ({}) than samples ({})",
                self.chains,
                self.total_samples
            );
        }
        Ok(())
    }

    /// Samples assigned to chain `c`: an even split, remainder to the first
    /// chains.
    pub fn samples_for_chain(&self, c: usize) -> u64 {
        let chains = self.chains as u64;
        self.total_samples / chains + u64::from((c as u64) < self.total_samples % chains)
    }

    /// Chain `c` reads stream `c` of the master seed.
    pub fn chain_config(&self, c: usize) -> ChainConfig {
        ChainConfig {
            n: self.n,
            sample_interval: self.sample_interval,
            warmup_iterations: self.warmup_iterations(),
            seed: self.seed,
            chain: c as u64,
            total_samples: self.samples_for_chain(c),
            checkpoint_every: self.checkpoint_every,
            halt_after: None,
        }
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value, got {raw:?}", no + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", no + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.replace('_', "")
                .parse()
                .ok()
                .with_context(|| format!("`{key}` expects an unsigned integer, got {v:?}"))
        }
        match key {
            "n" => self.n = num(key, value)?,
            "samples" => self.total_samples = num(key, value)?,
            "interval" => self.sample_interval = num(key, value)?,
            "warmup" => {
                self.warmup = if value == "default" {
                    None
                } else {
                    Some(num(key, value)?)
                }
            }
            "seed" => self.seed = num(key, value)?,
            "chains" => self.chains = num(key, value)?,
            "blocks" => self.blocks = num(key, value)?,
            "checkpoint_every" => self.checkpoint_every = num(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "format" if value == MANIFEST_FORMAT => {}
            "rng" if value == RNG_ALGORITHM => {}
            "rng" => {
                bail!("manifest was produced with rng {value:?}, this build has {RNG_ALGORITHM}")
            }
            // Informational manifest entries, derived from the keys above.
            "version" | "chain_streams" | "chain_samples" => {}
            _ => bail!("unknown configuration key {key:?}"),
        }
        Ok(())
    }

    /// Everything needed to reproduce the run's outputs.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let streams: Vec<String> = (0..self.chains).map(|c| c.to_string()).collect();
        let samples: Vec<String> = (0..self.chains)
            .map(|c| self.samples_for_chain(c).to_string())
            .collect();
        writeln!(s, "format={MANIFEST_FORMAT}").unwrap();
        writeln!(s, "version={}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(s, "n={}", self.n).unwrap();
        writeln!(s, "samples={}", self.total_samples).unwrap();
        writeln!(s, "interval={}", self.sample_interval).unwrap();
        writeln!(s, "warmup={}", self.warmup_iterations()).unwrap();
        writeln!(s, "seed={}", self.seed).unwrap();
        writeln!(s, "chains={}", self.chains).unwrap();
        writeln!(s, "blocks={}", self.blocks).unwrap();
        writeln!(s, "checkpoint_every={}", self.checkpoint_every).unwrap();
        writeln!(s, "rng={RNG_ALGORITHM}").unwrap();
        writeln!(s, "chain_streams={}", streams.join(",")).unwrap();
        writeln!(s, "chain_samples={}", samples.join(",")).unwrap();
        s
    }
}
