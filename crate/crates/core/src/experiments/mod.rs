//! Monte-Carlo sum-rate sweeps over SNR and antenna count.

mod config;
mod csv_io;
mod plot;
mod selftest;
mod summary;
mod sweep;

pub use config::{ScenarioConfig, DEFAULT_TRIALS};
pub use csv_io::{
    channels_path, emit_csv, format_complex, matrix_from_csv, matrix_to_csv, parse_complex,
    parse_csv, read_channels, records_to_csv, write_channels, CSV_HEADER,
};
pub use plot::write_plots;
pub use selftest::{selftest, CheckOutcome};
pub use summary::{format_summary, summarize, SummaryRow};
pub use sweep::{digital_baseline, run_scheme, run_sweep, run_sweep_with_channels, TrialChannel};

use crate::error::MilacError;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Reduced-dimension WMMSE-LC.
    Milac,
    /// WMMSE-LC on the full `N×K` variable.
    MilacFulldim,
    Digital,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Milac => "milac",
            Scheme::MilacFulldim => "milac_fulldim",
            Scheme::Digital => "digital",
        }
    }

    pub fn is_milac(self) -> bool {
        !matches!(self, Scheme::Digital)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = MilacError;

    fn from_str(s: &str) -> Result<Self, MilacError> {
        match s {
            "milac" => Ok(Scheme::Milac),
            "milac_fulldim" => Ok(Scheme::MilacFulldim),
            "digital" => Ok(Scheme::Digital),
            _ => Err(MilacError::Config(format!(
                "unknown scheme `{s}` (milac | milac_fulldim | digital)"
            ))),
        }
    }
}

/// Solver outcome of one record. Serialized in the `converged` column as
/// `true`, `false` or `failed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    IterationCap,
    /// The solver returned an error; the rate is recorded as zero.
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "true",
            Status::IterationCap => "false",
            Status::Failed => "failed",
        }
    }
}

impl FromStr for Status {
    type Err = MilacError;

    fn from_str(s: &str) -> Result<Self, MilacError> {
        match s {
            "true" => Ok(Status::Converged),
            "false" => Ok(Status::IterationCap),
            "failed" => Ok(Status::Failed),
            _ => Err(MilacError::InvalidArgument(format!(
                "bad converged flag `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub trial: usize,
    pub seed: u64,
    pub sum_rate_bits: f64,
    pub iterations: usize,
    pub status: Status,
    pub wall_time_ms: f64,
}

impl SweepRecord {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}
