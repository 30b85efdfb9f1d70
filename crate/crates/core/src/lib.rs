//! Fixed-length half-plane self-avoiding walks, sampled with the pivot
//! algorithm, mapped to curves from 0 to i and compared against radial
//! SLE(8/3).
//!
//! The pipeline is: [`pivot`] samples walks, [`observables`] maps each walk by
//! the Mobius transformation sending its endpoint to i and measures the
//! excursion statistics, [`estimators`] accumulates `R^p`-weighted empirical
//! distributions, and [`fitting`] estimates the exponents `b` and `bbar`
//! against the closed forms in [`conformal`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod enumerate;
pub mod error;
pub mod estimators;
pub mod exponents;
pub mod fitting;
pub mod observables;
pub mod pivot;
pub mod quadrature;
pub mod rng;
pub mod sum;
pub mod symmetry;
pub mod walk;

pub use conformal::{exact_cdf, ComplexPoint, SleCdfFactors, Statistic};
pub use enumerate::enumerate_half_plane_saws;
pub use error::{Error, Result};
pub use estimators::{Accumulator, Finalized, GridSpec};
pub use exponents::{Exponents, Rational};
pub use fitting::FitResult;
pub use observables::{stats_bruteforce, stats_fast, weight, TransformedStats};
pub use pivot::{initial_walk, run_chain, ChainConfig, ChainObserver, ChainState, RunReport};
pub use rng::ChainRng;
pub use symmetry::SymmetryOp;
pub use walk::{validate_walk, LatticeWalk, OccupancyIndex, Site};
