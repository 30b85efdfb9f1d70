//! Shared fixtures for the benchmarks.

use sawsle_core::{ChainRng, ChainState, LatticeWalk};

/// A chain state started from the rod and run for `10 N` pivot attempts.
pub fn equilibrated_state(n: usize, seed: u64) -> ChainState {
    let mut st = ChainState::new(LatticeWalk::rod(n), ChainRng::for_chain(seed, 0));
    for _ in 0..10 * n {
        st.pivot_step();
    }
    st
}
