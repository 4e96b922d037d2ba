//! Microwave linear analog computer (MiLAC) beamforming for multiuser MISO
//! downlinks: multiport network algebra, beamforming-set membership, the
//! low-complexity WMMSE sum-rate solver and a Monte-Carlo sweep harness.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod lp;
pub mod network;
pub mod rng;
pub mod sets;
pub mod solvers;

pub use error::{MilacError, Result};
