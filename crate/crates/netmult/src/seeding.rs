//! Deterministic stream derivation: every randomized stage draws from a
//! ChaCha stream keyed by the user seed plus fixed stage tags, so results are
//! identical regardless of evaluation order.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const TAG_WEDDERBURN: u64 = 0x5753_0001;
pub const TAG_REALIZE: u64 = 0x5753_0002;
pub const TAG_VERIFY: u64 = 0x5753_0003;
/// Tag reserved for test harness streams.
pub const TAG_TEST: u64 = 0x5753_00FF;

/// A stream keyed by `(seed, tag, a, b)`.
pub fn derive_rng(seed: u64, tag: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(&a.to_le_bytes());
    key[24..32].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Standard complex Gaussian: independent `N(0,1)` real and imaginary parts.
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((rows, cols), |_| complex_gaussian(rng))
}
