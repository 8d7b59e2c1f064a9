//! Deterministic random streams.
//!
//! Every experiment derives its randomness from one 64-bit seed. Independent
//! streams (one per trial, per row, ...) are ChaCha stream ids under that seed,
//! so results do not depend on evaluation order or thread scheduling.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{lit, Real};

/// Generator for stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed for an independent family of streams, e.g. one per experiment role.
pub fn derive(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Circularly symmetric complex Gaussian with standard deviation `sigma` on
/// each of the real and imaginary parts.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, sigma: T) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit::<T>(re) * sigma, lit::<T>(im) * sigma)
}

/// Complex Gaussian with `E|z|² = 1`.
pub fn unit_complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    complex_gaussian(rng, lit::<T>(std::f64::consts::FRAC_1_SQRT_2))
}
