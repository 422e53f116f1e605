//! Counter-based random substreams.
//!
//! Every random draw is tied to `(seed, trial, purpose, a, b)`, so a trial's
//! output does not depend on which worker runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::Complex64;

/// What a substream is used for; keeps channel, noise and symbol draws apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Channel = 1,
    PilotNoise = 2,
    Symbols = 3,
    DataNoise = 4,
    Auxiliary = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for one `(trial, purpose, a, b)` cell under a master seed.
pub fn substream(seed: u64, trial: u64, purpose: Purpose, a: usize, b: usize) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(trial.wrapping_add(0x5DEE_CE66_D1CE_4E5B)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let stream = ((purpose as u64) << 56) | ((a as u64 & 0x0FFF_FFFF) << 28) | (b as u64 & 0x0FFF_FFFF);
    rng.set_stream(stream);
    rng
}

/// One draw of `CN(0, 1)`.
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vec<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}
