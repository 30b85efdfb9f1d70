//! `R^p`-weighted empirical distributions of the excursion statistics and of
//! the endpoint angle, with blocking error bars.
//!
//! Samples are assigned to a fixed number of consecutive blocks. Every block
//! keeps its own sums, global sums are the (compensated) sum over blocks, and
//! standard errors come from the spread of per-block estimates. Accumulators
//! from independent chains merge block by block.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::conformal::Statistic;
use crate::error::{Error, Result};
use crate::observables::TransformedStats;
use crate::sum::CompensatedSum;
use crate::walk::numbered_lines;

pub const ACCUMULATOR_HEADER: &str = "sawsle-accumulator v1";
pub const ANGULAR_BINS: usize = 1800;
pub const DEFAULT_BLOCKS: usize = 100;

/// Thresholds `(lo_cents + i) / 100` for `i` in `0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub lo_cents: u32,
    pub count: usize,
}

impl GridSpec {
    /// X on 0.00..=5.00, the others on 1.00..=5.00, all in steps of 0.01.
    pub fn standard(stat: Statistic) -> Self {
        match stat {
            Statistic::X => GridSpec {
                lo_cents: 0,
                count: 501,
            },
            _ => GridSpec {
                lo_cents: 100,
                count: 401,
            },
        }
    }

    pub fn standard_set() -> [GridSpec; 4] {
        Statistic::ALL.map(GridSpec::standard)
    }

    #[inline]
    pub fn threshold(&self, i: usize) -> f64 {
        (self.lo_cents as f64 + i as f64) / 100.0
    }

    pub fn thresholds(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.threshold(i)).collect()
    }

    /// Index of the smallest threshold `>= v`, or `count` when `v` is above
    /// the grid.
    #[inline]
    pub fn cell_of(&self, v: f64) -> usize {
        let guess = ((v * 100.0 - self.lo_cents as f64).ceil()).clamp(0.0, self.count as f64);
        let mut i = guess as usize;
        while i > 0 && self.threshold(i - 1) >= v {
            i -= 1;
        }
        while i < self.count && self.threshold(i) < v {
            i += 1;
        }
        i
    }
}

#[inline]
pub fn angular_bin(theta: f64, bins: usize) -> usize {
    ((theta / (PI / bins as f64)) as usize).min(bins - 1)
}

#[derive(Debug, Clone, PartialEq)]
struct Block {
    samples: u64,
    weight: CompensatedSum,
    weight_sq: CompensatedSum,
    /// Per-grid weight landing in each cell; index `count` is overflow.
    cells: [Vec<CompensatedSum>; 4],
    angular: Vec<CompensatedSum>,
    angular_sq: Vec<CompensatedSum>,
}

impl Block {
    fn new(grids: &[GridSpec; 4], bins: usize) -> Self {
        Block {
            samples: 0,
            weight: CompensatedSum::ZERO,
            weight_sq: CompensatedSum::ZERO,
            cells: grids.map(|g| vec![CompensatedSum::ZERO; g.count + 1]),
            angular: vec![CompensatedSum::ZERO; bins],
            angular_sq: vec![CompensatedSum::ZERO; bins],
        }
    }

    fn merge(&mut self, other: &Block) {
        self.samples += other.samples;
        self.weight.merge(&other.weight);
        self.weight_sq.merge(&other.weight_sq);
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            merge_vec(a, b);
        }
        merge_vec(&mut self.angular, &other.angular);
        merge_vec(&mut self.angular_sq, &other.angular_sq);
    }

    /// Weight at or below each threshold (prefix sums of the cells).
    fn cumulative(&self, stat: Statistic, count: usize) -> Vec<f64> {
        let mut acc = CompensatedSum::ZERO;
        self.cells[stat.index()][..count]
            .iter()
            .map(|c| {
                acc.merge(c);
                acc.value()
            })
            .collect()
    }
}

fn merge_vec(a: &mut [CompensatedSum], b: &[CompensatedSum]) {
    for (x, y) in a.iter_mut().zip(b) {
        x.merge(y);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    grids: [GridSpec; 4],
    angular_bins: usize,
    expected_samples: u64,
    samples: u64,
    blocks: Vec<Block>,
}

impl Accumulator {
    /// Empty accumulator with the standard grids and 1800 angular bins.
    /// `expected_samples` sets the block boundaries.
    pub fn new(block_count: usize, expected_samples: u64) -> Self {
        Self::with_layout(
            GridSpec::standard_set(),
            ANGULAR_BINS,
            block_count,
            expected_samples,
        )
    }

    pub fn with_layout(
        grids: [GridSpec; 4],
        angular_bins: usize,
        block_count: usize,
        expected_samples: u64,
    ) -> Self {
        assert!(block_count >= 1 && angular_bins >= 1);
        Accumulator {
            grids,
            angular_bins,
            expected_samples,
            samples: 0,
            blocks: vec![Block::new(&grids, angular_bins); block_count],
        }
    }

    pub fn grids(&self) -> &[GridSpec; 4] {
        &self.grids
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn expected_samples(&self) -> u64 {
        self.expected_samples
    }

    pub fn total_weight(&self) -> f64 {
        let mut t = CompensatedSum::ZERO;
        for b in &self.blocks {
            t.merge(&b.weight);
        }
        t.value()
    }

    fn block_of(&self, k: u64) -> usize {
        let n = self.blocks.len();
        if self.expected_samples == 0 {
            return n - 1;
        }
        ((k as u128 * n as u128 / self.expected_samples as u128) as usize).min(n - 1)
    }

    pub fn accumulate(&mut self, stats: &TransformedStats, w: f64) {
        assert!(w.is_finite() && w >= 0.0, "sample weight {w} is not finite");
        assert!(
            stats.theta > 0.0 && stats.theta < PI,
            "endpoint angle {} outside (0, pi)",
            stats.theta
        );
        let k = self.block_of(self.samples);
        let bin = angular_bin(stats.theta, self.angular_bins);
        let grids = self.grids;
        let block = &mut self.blocks[k];
        block.samples += 1;
        block.weight.add(w);
        block.weight_sq.add(w * w);
        for stat in Statistic::ALL {
            let v = stats.get(stat);
            assert!(v.is_finite(), "{stat} = {v} is not finite");
            let cell = grids[stat.index()].cell_of(v);
            block.cells[stat.index()][cell].add(w);
        }
        block.angular[bin].add(w);
        block.angular_sq[bin].add(w * w);
        self.samples += 1;
    }

    pub fn merge(&mut self, other: &Accumulator) -> Result<()> {
        if self.grids != other.grids {
            return Err(Error::Mismatch("threshold grids differ".into()));
        }
        if self.angular_bins != other.angular_bins {
            return Err(Error::Mismatch(format!(
                "{} vs {} angular bins",
                self.angular_bins, other.angular_bins
            )));
        }
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::Mismatch(format!(
                "{} vs {} blocks",
                self.blocks.len(),
                other.blocks.len()
            )));
        }
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.merge(b);
        }
        self.samples += other.samples;
        self.expected_samples += other.expected_samples;
        Ok(())
    }

    /// Combined sums over all blocks, as a single block.
    fn global(&self) -> Block {
        let mut g = Block::new(&self.grids, self.angular_bins);
        for b in &self.blocks {
            g.merge(b);
        }
        g
    }

    /// Raw weight at or below each threshold of `stat`.
    pub fn cumulative_weights(&self, stat: Statistic) -> Vec<f64> {
        self.global()
            .cumulative(stat, self.grids[stat.index()].count)
    }

    pub fn finalize(&self) -> Result<Finalized> {
        let global = self.global();
        let total = global.weight.value();
        if self.samples == 0 || !(total > 0.0) {
            return Err(Error::EmptyAccumulator);
        }
        let used: Vec<&Block> = self
            .blocks
            .iter()
            .filter(|b| b.samples > 0 && b.weight.value() > 0.0)
            .collect();
        let weight_sq = global.weight_sq.value();

        let cdfs = Statistic::ALL.map(|stat| {
            let grid = self.grids[stat.index()];
            let ecdf: Vec<f64> = global
                .cumulative(stat, grid.count)
                .into_iter()
                .map(|c| c / total)
                .collect();
            let per_block: Vec<Vec<f64>> = used
                .iter()
                .map(|b| {
                    let w = b.weight.value();
                    b.cumulative(stat, grid.count)
                        .into_iter()
                        .map(|c| c / w)
                        .collect()
                })
                .collect();
            let stderr = (0..grid.count)
                .map(|i| blocking_error(per_block.iter().map(|r| r[i])))
                .collect();
            CdfEstimate {
                stat,
                thresholds: grid.thresholds(),
                ecdf,
                stderr,
            }
        });

        let width = PI / self.angular_bins as f64;
        let angular = (0..self.angular_bins)
            .map(|k| {
                let sum = global.angular[k].value();
                let sq = global.angular_sq[k].value();
                let lo = k as f64 * width;
                AngularBin {
                    lo,
                    mid: lo + 0.5 * width,
                    hi: lo + width,
                    expectation: sum / total,
                    stderr: blocking_error(
                        used.iter().map(|b| b.angular[k].value() / b.weight.value()),
                    ),
                    effective_samples: if sq > 0.0 { sum * sum / sq } else { 0.0 },
                }
            })
            .collect();

        Ok(Finalized {
            cdfs,
            angular,
            total_weight: total,
            samples: self.samples,
            effective_samples: total * total / weight_sq,
            blocks_used: used.len(),
        })
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{ACCUMULATOR_HEADER}")?;
        writeln!(out, "blocks={}", self.blocks.len())?;
        writeln!(out, "angular_bins={}", self.angular_bins)?;
        for stat in Statistic::ALL {
            let g = self.grids[stat.index()];
            writeln!(
                out,
                "grid {} lo_cents={} count={}",
                stat, g.lo_cents, g.count
            )?;
        }
        writeln!(out, "expected={}", self.expected_samples)?;
        writeln!(out, "samples={}", self.samples)?;
        for (k, b) in self.blocks.iter().enumerate() {
            writeln!(out, "block {} samples={}", k, b.samples)?;
            write_row(&mut out, "weight", std::slice::from_ref(&b.weight))?;
            write_row(&mut out, "weight_sq", std::slice::from_ref(&b.weight_sq))?;
            for stat in Statistic::ALL {
                write_row(&mut out, &format!("cells {stat}"), &b.cells[stat.index()])?;
            }
            write_row(&mut out, "angular", &b.angular)?;
            write_row(&mut out, "angular_sq", &b.angular_sq)?;
        }
        writeln!(out, "end")?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = numbered_lines(input);
        let mut next = |what: &str| -> Result<(usize, String)> {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("accumulator ended before {what}")))?
        };
        let (_, header) = next("header")?;
        if header.trim() != ACCUMULATOR_HEADER {
            return Err(Error::Version {
                expected: ACCUMULATOR_HEADER,
                found: header,
            });
        }
        let block_count: usize = keyed(next("blocks")?, "blocks")?;
        let angular_bins: usize = keyed(next("angular_bins")?, "angular_bins")?;
        if block_count == 0 || angular_bins == 0 {
            return Err(Error::parse(2, "blocks and angular_bins must be positive"));
        }
        let mut grids = [GridSpec::standard(Statistic::X); 4];
        for stat in Statistic::ALL {
            let (no, line) = next("grid")?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["grid", name, lo, count] if *name == stat.name() => lo
                    .strip_prefix("lo_cents=")
                    .and_then(|v| v.parse().ok())
                    .zip(count.strip_prefix("count=").and_then(|v| v.parse().ok())),
                _ => None,
            };
            let (lo_cents, count) =
                parsed.ok_or_else(|| Error::parse(no, format!("bad grid line for {stat}")))?;
            grids[stat.index()] = GridSpec { lo_cents, count };
        }
        let expected: u64 = keyed(next("expected")?, "expected")?;
        let samples: u64 = keyed(next("samples")?, "samples")?;
        let mut acc = Accumulator::with_layout(grids, angular_bins, block_count, expected);
        acc.samples = samples;
        for k in 0..block_count {
            let (no, line) = next("block")?;
            let count = line
                .strip_prefix(&format!("block {k} samples="))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(no, format!("expected block {k} header")))?;
            let b = &mut acc.blocks[k];
            b.samples = count;
            read_row(
                next("weight")?,
                "weight",
                std::slice::from_mut(&mut b.weight),
            )?;
            read_row(
                next("weight_sq")?,
                "weight_sq",
                std::slice::from_mut(&mut b.weight_sq),
            )?;
            for stat in Statistic::ALL {
                read_row(
                    next("cells")?,
                    &format!("cells {stat}"),
                    &mut b.cells[stat.index()],
                )?;
            }
            read_row(next("angular")?, "angular", &mut b.angular)?;
            read_row(next("angular_sq")?, "angular_sq", &mut b.angular_sq)?;
        }
        let (no, end) = next("end")?;
        if end.trim() != "end" {
            return Err(Error::parse(no, "expected `end`"));
        }
        if acc.blocks.iter().map(|b| b.samples).sum::<u64>() != samples {
            return Err(Error::parse(0, "block sample counts do not add up"));
        }
        Ok(acc)
    }
}

fn keyed<T: std::str::FromStr>((no, line): (usize, String), key: &str) -> Result<T> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::parse(no, format!("expected `{key}=<value>`")))
}

// A compensated sum is rendered as `sum` or `sum/carry`, each in shortest
// round-trip decimal form.
fn write_row<W: Write>(out: &mut W, key: &str, values: &[CompensatedSum]) -> Result<()> {
    write!(out, "{key}")?;
    for v in values {
        let (s, c) = v.parts();
        if c == 0.0 {
            write!(out, " {s:?}")?;
        } else {
            write!(out, " {s:?}/{c:?}")?;
        }
    }
    writeln!(out)?;
    Ok(())
}

fn read_row((no, line): (usize, String), key: &str, into: &mut [CompensatedSum]) -> Result<()> {
    let rest = line
        .strip_prefix(key)
        .ok_or_else(|| Error::parse(no, format!("expected `{key}` row")))?;
    let mut n = 0;
    for (slot, tok) in into.iter_mut().zip(rest.split_whitespace()) {
        let (s, c) = tok.split_once('/').unwrap_or((tok, "0"));
        let parse = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(no, format!("bad number {v:?}")))
        };
        *slot = CompensatedSum::from_parts(parse(s)?, parse(c)?);
        n += 1;
    }
    if n != into.len() || rest.split_whitespace().count() != into.len() {
        return Err(Error::parse(
            no,
            format!("`{key}` row needs {} values", into.len()),
        ));
    }
    Ok(())
}

/// `sqrt(var(block estimates) / blocks)`; NaN with fewer than two blocks.
fn blocking_error(estimates: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = estimates.collect();
    let n = v.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfEstimate {
    pub stat: Statistic,
    pub thresholds: Vec<f64>,
    pub ecdf: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularBin {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
    /// Weighted fraction of samples whose endpoint angle falls in the bin.
    pub expectation: f64,
    pub stderr: f64,
    /// Kish effective sample count of the bin.
    pub effective_samples: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finalized {
    pub cdfs: [CdfEstimate; 4],
    pub angular: Vec<AngularBin>,
    pub total_weight: f64,
    pub samples: u64,
    /// Kish effective sample size `(sum w)^2 / sum w^2`.
    pub effective_samples: f64,
    pub blocks_used: usize,
}

impl Finalized {
    pub fn cdf(&self, stat: Statistic) -> &CdfEstimate {
        &self.cdfs[stat.index()]
    }
}
