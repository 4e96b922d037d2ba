//! Seeded, counter-based random substreams.
//!
//! Every random draw in a sweep is keyed by `(seed, labels...)`; the labels
//! are folded into the ChaCha stream id, so a trial produces the same numbers
//! no matter which worker thread runs it or in what order.

use crate::linalg::{c, CMat, CVec};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SubstreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent generator for the given label path under `seed`.
pub fn substream(seed: u64, labels: &[u64]) -> SubstreamRng {
    let stream = labels.iter().fold(0x6D69_6C61_6300_0000u64, |acc, &l| {
        splitmix64(acc ^ splitmix64(l))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw from CN(0, 1).
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. CN(0, 1) entries, filled row-major.
pub fn complex_normal_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

pub fn complex_normal_vector(len: usize, rng: &mut impl Rng) -> CVec {
    CVec::from_fn(len, |_, _| complex_normal(rng))
}
