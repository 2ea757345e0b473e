//! Seeded random streams.
//!
//! Every generator draws from ChaCha20 (`rand_chacha` 0.9, pinned in the
//! workspace manifest). The 64-bit user seed is expanded into the 256-bit key
//! by `SeedableRng::seed_from_u64`, and independent substreams are selected
//! with the ChaCha stream id. ChaCha is counter based, so substream `k` never
//! overlaps substream `j` and each can be regenerated on its own.
//!
//! Changing the algorithm, the seed expansion, or the stream assignment below
//! changes every synthetic data set; bump [`RNG_VERSION`] if that ever happens.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub const RNG_ALGORITHM: &str = "chacha20";
pub const RNG_VERSION: u32 = 1;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = stream_rng(42, 3).random_iter().take(8).collect();
        let b: Vec<u64> = stream_rng(42, 3).random_iter().take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream_rng(42, 0).random();
        let b: u64 = stream_rng(42, 1).random();
        let c: u64 = stream_rng(43, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pinned_first_draw() {
        // Guard against silent changes to the generator or seed expansion.
        let x: u64 = stream_rng(0, 0).random();
        assert_eq!(x, PINNED_FIRST_DRAW);
    }

    const PINNED_FIRST_DRAW: u64 = 449_479_075_714_955_186;
}
