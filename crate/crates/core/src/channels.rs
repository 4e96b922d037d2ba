//! Random user channels: i.i.d. Rayleigh fading and the clustered geometric
//! model with half-wavelength ULA steering vectors.
//!
//! `H` is `K×N`; row `k` is `h_kᴴ`.

use crate::error::{MilacError, Result};
use crate::linalg::{c, CMat, CVec};
use crate::rng::{self, substream};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

pub const DEFAULT_PATHS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    Rayleigh,
    Clustered { paths: usize },
}

impl std::fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelModel::Rayleigh => write!(f, "rayleigh"),
            ChannelModel::Clustered { paths } => write!(f, "clustered({paths})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub h: CMat,
    pub model: ChannelModel,
    pub seed: u64,
}

impl ChannelMatrix {
    pub fn users(&self) -> usize {
        self.h.nrows()
    }

    pub fn antennas(&self) -> usize {
        self.h.ncols()
    }

    /// `h_k` as a column vector.
    pub fn user(&self, k: usize) -> CVec {
        self.h.row(k).adjoint()
    }

    pub fn is_finite(&self) -> bool {
        self.h.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `a(φ) = N^{-1/2} [1, e^{jπ sin φ}, …, e^{jπ(N−1) sin φ}]ᵀ`.
pub fn array_response(phi: f64, n: usize) -> CVec {
    let scale = 1.0 / (n as f64).sqrt();
    let s = PI * phi.sin();
    CVec::from_fn(n, |i, _| Complex64::from_polar(scale, s * i as f64))
}

/// `h = √(N/L) Σ_ℓ α_ℓ a(φ_ℓ)` for given gains and angles.
pub fn clustered_user(n: usize, gains: &[Complex64], angles: &[f64]) -> Result<CVec> {
    if gains.is_empty() || gains.len() != angles.len() {
        return Err(MilacError::InvalidArgument(
            "clustered channel needs L >= 1 matching gains and angles".into(),
        ));
    }
    let l = gains.len() as f64;
    let mut h = CVec::zeros(n);
    for (&g, &phi) in gains.iter().zip(angles) {
        h += array_response(phi, n) * g;
    }
    Ok(h * c((n as f64 / l).sqrt(), 0.0))
}

fn clustered_draw(n: usize, paths: usize, rng: &mut impl Rng) -> CVec {
    let gains: Vec<Complex64> = (0..paths).map(|_| rng::complex_normal(rng)).collect();
    let angles: Vec<f64> = (0..paths).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
    clustered_user(n, &gains, &angles).expect("paths >= 1 checked by caller")
}

/// i.i.d. CN(0, 1) entries, drawn user by user from one generator.
pub fn rayleigh_channel(n: usize, k: usize, rng: &mut impl Rng) -> ChannelMatrix {
    ChannelMatrix {
        h: rng::complex_normal_matrix(k, n, rng),
        model: ChannelModel::Rayleigh,
        seed: 0,
    }
}

/// Clustered geometric channel, angles independent per user and path.
pub fn clustered_channel(
    n: usize,
    k: usize,
    paths: usize,
    rng: &mut impl Rng,
) -> Result<ChannelMatrix> {
    if paths == 0 {
        return Err(MilacError::InvalidArgument(
            "clustered channel needs L >= 1".into(),
        ));
    }
    let mut h = CMat::zeros(k, n);
    for u in 0..k {
        let hk = clustered_draw(n, paths, rng);
        h.set_row(u, &hk.adjoint());
    }
    Ok(ChannelMatrix {
        h,
        model: ChannelModel::Clustered { paths },
        seed: 0,
    })
}

/// Channel for one trial with an independent substream per user, keyed by
/// `(seed, labels…, user)`.
pub fn channel_for_trial(
    model: ChannelModel,
    n: usize,
    k: usize,
    seed: u64,
    labels: &[u64],
) -> Result<ChannelMatrix> {
    let mut h = CMat::zeros(k, n);
    let mut key = labels.to_vec();
    key.push(0);
    for u in 0..k {
        *key.last_mut().unwrap() = u as u64;
        let mut r = substream(seed, &key);
        let hk = match model {
            ChannelModel::Rayleigh => rng::complex_normal_vector(n, &mut r),
            ChannelModel::Clustered { paths } => {
                if paths == 0 {
                    return Err(MilacError::InvalidArgument(
                        "clustered channel needs L >= 1".into(),
                    ));
                }
                clustered_draw(n, paths, &mut r)
            }
        };
        h.set_row(u, &hk.adjoint());
    }
    Ok(ChannelMatrix { h, model, seed })
}
