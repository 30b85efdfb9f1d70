//! Library side of the `sawsle` command: run configuration, multi-chain
//! orchestration, analysis output and self tests.

pub mod analyze;
pub mod config;
pub mod output;
pub mod run;
pub mod selftest;
pub mod tables;

pub use config::RunConfig;
