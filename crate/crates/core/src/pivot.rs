//! Pivot-move Markov chain on N-step half-plane self-avoiding walks.
//!
//! A proposal picks a pivot index `k` uniformly in `1..N` and one of the seven
//! non-identity lattice symmetries, applies it to the tail `sites[k+1..]`
//! about `sites[k]`, and accepts iff the result is still a valid half-plane
//! walk. The proposal is symmetric, so the stationary law is uniform.

use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{ChainRng, RNG_ALGORITHM};
use crate::symmetry::SymmetryOp;
use crate::walk::{numbered_lines, LatticeWalk, OccupancyIndex, Site, MIN_INTERIOR_ROW};

pub const DEFAULT_SAMPLE_INTERVAL: u64 = 100;
pub const DEFAULT_CHECKPOINT_EVERY: u64 = 1_000_000;

pub fn initial_walk(n: usize) -> LatticeWalk {
    LatticeWalk::rod(n)
}

/// Warm-up discarded before the first sample: `max(10 N, 10^4)` iterations.
pub fn default_warmup(n: usize) -> u64 {
    (10 * n as u64).max(10_000)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainConfig {
    pub n: usize,
    pub sample_interval: u64,
    pub warmup_iterations: u64,
    pub seed: u64,
    /// Stream index of this chain under `seed`.
    pub chain: u64,
    pub total_samples: u64,
    pub checkpoint_every: u64,
    /// Stop (after checkpointing) once this many iterations have run in total.
    pub halt_after: Option<u64>,
}

impl ChainConfig {
    pub fn new(n: usize, total_samples: u64, seed: u64) -> Self {
        ChainConfig {
            n,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            warmup_iterations: default_warmup(n),
            seed,
            chain: 0,
            total_samples,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            halt_after: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("walk length N must be at least 1".into()));
        }
        if self.sample_interval < 1 {
            return Err(Error::Config("sample_interval must be at least 1".into()));
        }
        if self.total_samples < 1 {
            return Err(Error::Config("total_samples must be at least 1".into()));
        }
        if self.checkpoint_every < 1 {
            return Err(Error::Config("checkpoint_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Total iterations the chain runs: warm-up plus one interval per sample.
    pub fn final_iteration(&self) -> u64 {
        self.warmup_iterations + self.total_samples * self.sample_interval
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted {
        pivot: usize,
        op: SymmetryOp,
    },
    Rejected {
        pivot: usize,
        op: SymmetryOp,
    },
    /// N < 2: there is no interior pivot.
    NoMove,
}

#[derive(Debug, Clone)]
pub struct ChainState {
    walk: LatticeWalk,
    occupancy: OccupancyIndex,
    rng: ChainRng,
    iteration: u64,
    accepted: u64,
    samples: u64,
    scratch: Vec<Site>,
}

impl ChainState {
    pub fn new(walk: LatticeWalk, rng: ChainRng) -> Self {
        let occupancy = OccupancyIndex::build(&walk);
        ChainState {
            walk,
            occupancy,
            rng,
            iteration: 0,
            accepted: 0,
            samples: 0,
            scratch: Vec::new(),
        }
    }

    pub fn start(config: &ChainConfig) -> Self {
        Self::new(
            initial_walk(config.n),
            ChainRng::for_chain(config.seed, config.chain),
        )
    }

    pub fn walk(&self) -> &LatticeWalk {
        &self.walk
    }

    pub fn occupancy(&self) -> &OccupancyIndex {
        &self.occupancy
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn samples_delivered(&self) -> u64 {
        self.samples
    }

    pub fn rng(&self) -> &ChainRng {
        &self.rng
    }

    pub fn acceptance_fraction(&self) -> f64 {
        if self.iteration == 0 {
            0.0
        } else {
            self.accepted as f64 / self.iteration as f64
        }
    }

    /// One pivot proposal; the iteration counter always advances.
    pub fn pivot_step(&mut self) -> StepOutcome {
        self.iteration += 1;
        let n = self.walk.steps();
        if n < 2 {
            return StepOutcome::NoMove;
        }
        let pivot = self.rng.gen_range(1..n);
        let op = SymmetryOp::ALL[self.rng.gen_range(0..SymmetryOp::ALL.len())];
        if self.try_pivot(pivot, op) {
            self.accepted += 1;
            StepOutcome::Accepted { pivot, op }
        } else {
            StepOutcome::Rejected { pivot, op }
        }
    }

    /// Applies `op` to the tail after `pivot` if the result is a valid walk.
    pub fn try_pivot(&mut self, pivot: usize, op: SymmetryOp) -> bool {
        let sites = self.walk.sites();
        let centre = sites[pivot];
        self.scratch.clear();
        for s in &sites[pivot + 1..] {
            let t = op.apply_about(centre, *s);
            if t.y < MIN_INTERIOR_ROW {
                return false;
            }
            // Old tail sites are about to move, only the head can block.
            if matches!(self.occupancy.get(t), Some(i) if i as usize <= pivot) {
                return false;
            }
            self.scratch.push(t);
        }
        for s in &sites[pivot + 1..] {
            self.occupancy.remove(*s);
        }
        let tail = &mut self.walk.sites_mut()[pivot + 1..];
        for (j, (slot, t)) in tail.iter_mut().zip(&self.scratch).enumerate() {
            *slot = *t;
            self.occupancy.insert(*t, (pivot + 1 + j) as u32);
        }
        true
    }

    pub fn write_checkpoint<W: Write>(&self, mut out: W) -> Result<()> {
        self.walk.write_text(&mut out)?;
        writeln!(out, "rng={}", self.rng.tagged_state())?;
        writeln!(out, "iter={}", self.iteration)?;
        writeln!(out, "accepted={}", self.accepted)?;
        writeln!(out, "samples={}", self.samples)?;
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = numbered_lines(input);
        let walk = LatticeWalk::read_from_lines(&mut lines)?;
        let mut rng = None;
        let mut iteration = None;
        let mut accepted = None;
        let mut samples = None;
        for line in lines {
            let (no, text) = line?;
            if text.trim().is_empty() {
                continue;
            }
            let (key, value) = text
                .split_once('=')
                .ok_or_else(|| Error::parse(no, format!("expected key=value, got {text:?}")))?;
            let count = || {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::parse(no, format!("bad counter {value:?}")))
            };
            match key {
                "rng" => rng = Some(ChainRng::from_tagged_state(value)?),
                "iter" => iteration = Some(count()?),
                "accepted" => accepted = Some(count()?),
                "samples" => samples = Some(count()?),
                _ => return Err(Error::parse(no, format!("unknown checkpoint key {key:?}"))),
            }
        }
        let missing = |k: &str| Error::parse(0, format!("checkpoint lacks `{k}`"));
        let mut state = ChainState::new(walk, rng.ok_or_else(|| missing("rng"))?);
        state.iteration = iteration.ok_or_else(|| missing("iter"))?;
        state.accepted = accepted.unwrap_or(0);
        state.samples = samples.unwrap_or(0);
        Ok(state)
    }
}

/// Receives sampled walks and checkpoint notifications from a running chain.
pub trait ChainObserver {
    fn observe(&mut self, walk: &LatticeWalk) -> Result<()>;

    /// Called every `checkpoint_every` iterations, on halting and at the end.
    fn checkpoint(&mut self, _state: &ChainState) -> Result<()> {
        Ok(())
    }
}

impl<F: FnMut(&LatticeWalk) -> Result<()>> ChainObserver for F {
    fn observe(&mut self, walk: &LatticeWalk) -> Result<()> {
        self(walk)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    Halted,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub status: RunStatus,
    pub iterations: u64,
    pub accepted: u64,
    pub acceptance_fraction: f64,
    pub samples: u64,
    pub wall_time: Duration,
    pub rng_algorithm: &'static str,
}

pub fn run_chain<O: ChainObserver>(config: &ChainConfig, observer: &mut O) -> Result<RunReport> {
    config.validate()?;
    let mut state = ChainState::start(config);
    resume_chain(config, &mut state, observer)
}

/// Continues `state` until `config.total_samples` have been delivered or
/// `config.halt_after` is reached.
pub fn resume_chain<O: ChainObserver>(
    config: &ChainConfig,
    state: &mut ChainState,
    observer: &mut O,
) -> Result<RunReport> {
    config.validate()?;
    if state.walk.steps() != config.n {
        return Err(Error::Config(format!(
            "state holds a {}-step walk but the configuration asks for N = {}",
            state.walk.steps(),
            config.n
        )));
    }
    let started = Instant::now();
    let warmup = config.warmup_iterations;
    let mut status = RunStatus::Complete;
    while state.samples < config.total_samples {
        if config.halt_after.is_some_and(|h| state.iteration >= h) {
            status = RunStatus::Halted;
            break;
        }
        state.pivot_step();
        let it = state.iteration;
        if it == warmup && state.accepted == 0 {
            return Err(Error::NoAcceptance { iterations: it });
        }
        if it > warmup && (it - warmup).is_multiple_of(config.sample_interval) {
            observer.observe(&state.walk)?;
            state.samples += 1;
        }
        if it.is_multiple_of(config.checkpoint_every) && state.samples < config.total_samples {
            observer.checkpoint(state)?;
        }
    }
    if status == RunStatus::Complete && warmup == 0 && state.accepted == 0 {
        return Err(Error::NoAcceptance {
            iterations: state.iteration,
        });
    }
    observer.checkpoint(state)?;
    Ok(RunReport {
        status,
        iterations: state.iteration,
        accepted: state.accepted,
        acceptance_fraction: state.acceptance_fraction(),
        samples: state.samples,
        wall_time: started.elapsed(),
        rng_algorithm: RNG_ALGORITHM,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::validate_walk;

    fn walk(v: &[(i32, i32)]) -> LatticeWalk {
        LatticeWalk::new(v.iter().copied().map(Site::from).collect()).unwrap()
    }

    #[test]
    fn initial_walk_is_the_rod() {
        assert_eq!(initial_walk(1), walk(&[(0, 0), (0, 1)]));
        assert_eq!(initial_walk(3), walk(&[(0, 0), (0, 1), (0, 2), (0, 3)]));
        for n in 1..50 {
            assert!(validate_walk(initial_walk(n).sites()));
        }
    }

    #[test]
    fn half_plane_violation_is_rejected() {
        let mut st = ChainState::new(initial_walk(4), ChainRng::for_chain(1, 0));
        // Flipping the tail of a rod about (0,1) sends (0,2) to (0,0).
        assert!(!st.try_pivot(1, SymmetryOp::ReflectHorizontal));
        assert_eq!(st.walk(), &initial_walk(4));
        assert!(st.occupancy().matches(st.walk()));
    }

    #[test]
    fn collision_with_head_is_rejected() {
        // Rotating the last site (0,2) by 90 degrees about (1,2) lands on
        // (1,1), which belongs to the head; rotating by 180 lands on (2,2).
        let mut st = ChainState::new(
            walk(&[(0, 0), (0, 1), (1, 1), (1, 2), (0, 2)]),
            ChainRng::for_chain(1, 0),
        );
        let before = st.walk().clone();
        assert!(!st.try_pivot(3, SymmetryOp::Rotate90));
        assert_eq!(st.walk(), &before);
        assert!(st.try_pivot(3, SymmetryOp::Rotate180));
        assert_eq!(st.walk().endpoint(), Site::new(2, 2));
        assert!(st.occupancy().matches(st.walk()));
    }

    #[test]
    fn accepted_moves_replay_backwards() {
        let mut st = ChainState::new(initial_walk(40), ChainRng::for_chain(9, 0));
        let mut accepted = 0;
        for _ in 0..5_000 {
            let before = st.walk().clone();
            match st.pivot_step() {
                StepOutcome::Accepted { pivot, op } => {
                    accepted += 1;
                    assert!(validate_walk(st.walk().sites()));
                    let mut replay = st.clone();
                    assert!(replay.try_pivot(pivot, op.inverse()));
                    assert_eq!(replay.walk(), &before);
                }
                StepOutcome::Rejected { .. } => assert_eq!(st.walk(), &before),
                StepOutcome::NoMove => unreachable!(),
            }
        }
        assert!(accepted > 0);
        assert!(st.occupancy().matches(st.walk()));
        assert_eq!(st.iteration(), 5_000);
    }

    #[test]
    fn config_invariants() {
        let mut c = ChainConfig::new(10, 0, 1);
        assert!(c.validate().is_err());
        c.total_samples = 5;
        c.sample_interval = 0;
        assert!(c.validate().is_err());
        c.sample_interval = 1;
        assert!(c.validate().is_ok());
        assert_eq!(default_warmup(10), 10_000);
        assert_eq!(default_warmup(5_000), 50_000);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut c = ChainConfig::new(30, 100, 1234);
        c.sample_interval = 3;
        c.warmup_iterations = 200;
        let collect = |c: &ChainConfig| {
            let mut ends = Vec::new();
            run_chain(c, &mut |w: &LatticeWalk| {
                ends.push(w.endpoint());
                Ok(())
            })
            .unwrap();
            ends
        };
        let a = collect(&c);
        assert_eq!(a.len(), 100);
        assert_eq!(a, collect(&c));
        c.seed = 1235;
        assert_ne!(a, collect(&c));
    }

    #[test]
    fn length_one_chain_never_accepts() {
        let mut c = ChainConfig::new(1, 3, 0);
        c.warmup_iterations = 10;
        let err = run_chain(&c, &mut |_: &LatticeWalk| Ok(())).unwrap_err();
        assert!(matches!(err, Error::NoAcceptance { iterations: 10 }));
    }

    #[test]
    fn checkpoint_round_trip_and_resume() {
        let mut c = ChainConfig::new(25, 40, 77);
        c.sample_interval = 5;
        c.warmup_iterations = 50;
        let mut full = Vec::new();
        run_chain(&c, &mut |w: &LatticeWalk| {
            full.push(w.clone());
            Ok(())
        })
        .unwrap();

        let mut halted = c.clone();
        halted.halt_after = Some(123);
        let mut first = Vec::new();
        let mut state = ChainState::start(&halted);
        let report = resume_chain(&halted, &mut state, &mut |w: &LatticeWalk| {
            first.push(w.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(report.status, RunStatus::Halted);
        assert_eq!(report.iterations, 123);

        let mut text = Vec::new();
        state.write_checkpoint(&mut text).unwrap();
        let mut restored = ChainState::read_checkpoint(text.as_slice()).unwrap();
        assert_eq!(restored.walk(), state.walk());
        assert_eq!(restored.rng(), state.rng());
        assert_eq!(restored.iteration(), 123);
        resume_chain(&c, &mut restored, &mut |w: &LatticeWalk| {
            first.push(w.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(first, full);
    }
}
