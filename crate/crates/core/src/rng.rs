//! Seedable, splittable chain RNG with a serializable state.
//!
//! ChaCha with 8 rounds: the master seed fixes the key and each chain reads its
//! own stream, so chains are independent and any chain can be replayed alone.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRng(ChaCha8Rng);

impl ChainRng {
    pub fn for_chain(master_seed: u64, chain: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(chain);
        ChainRng(inner)
    }

    /// Key, stream and word position as 112 lowercase hex digits.
    pub fn state_hex(&self) -> String {
        let mut s = String::with_capacity(112);
        for byte in self.0.get_seed() {
            s.push_str(&format!("{byte:02x}"));
        }
        s.push_str(&format!("{:016x}", self.0.get_stream()));
        s.push_str(&format!("{:032x}", self.0.get_word_pos()));
        s
    }

    pub fn from_state_hex(hex: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("malformed {RNG_ALGORITHM} state {hex:?}"));
        if hex.len() != 112 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(bad());
        }
        let mut seed = [0u8; 32];
        for (i, byte) in seed.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
        }
        let stream = u64::from_str_radix(&hex[64..80], 16).map_err(|_| bad())?;
        let word_pos = u128::from_str_radix(&hex[80..112], 16).map_err(|_| bad())?;
        let mut inner = ChaCha8Rng::from_seed(seed);
        inner.set_stream(stream);
        inner.set_word_pos(word_pos);
        Ok(ChainRng(inner))
    }

    /// `<algorithm>:<hex state>`, as stored in checkpoints.
    pub fn tagged_state(&self) -> String {
        format!("{RNG_ALGORITHM}:{}", self.state_hex())
    }

    pub fn from_tagged_state(tagged: &str) -> Result<Self> {
        match tagged.split_once(':') {
            Some((RNG_ALGORITHM, hex)) => Self::from_state_hex(hex),
            _ => Err(Error::Version {
                expected: RNG_ALGORITHM,
                found: tagged.to_owned(),
            }),
        }
    }
}

impl RngCore for ChainRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_resumes_stream() {
        let mut a = ChainRng::for_chain(42, 3);
        for _ in 0..1001 {
            a.next_u32();
        }
        let mut b = ChainRng::from_tagged_state(&a.tagged_state()).unwrap();
        assert_eq!(a, b);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn chains_get_distinct_streams() {
        let mut a = ChainRng::for_chain(7, 0);
        let mut b = ChainRng::for_chain(7, 1);
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn rejects_foreign_algorithms() {
        assert!(ChainRng::from_tagged_state("pcg64:00").is_err());
        assert!(ChainRng::from_tagged_state("chacha8:zz").is_err());
    }
}
