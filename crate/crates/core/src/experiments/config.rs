//! Scenario files: one `key = value` pair per line, `#` starts a comment,
//! lists are written `[a, b, c]` (a bare scalar is a one-element list).

use super::Scheme;
use crate::channels::{ChannelModel, DEFAULT_PATHS};
use crate::error::{MilacError, Result};
use crate::solvers::SolverConfig;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Antenna count used when `n_grid` is absent.
    pub n_antennas: usize,
    pub users: usize,
    pub channel: ChannelModel,
    pub snr_grid_db: Vec<f64>,
    pub n_grid: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    /// Tolerances and caps; `noise` is overwritten per SNR point.
    pub solver: SolverConfig,
    pub output: Option<PathBuf>,
    /// Also write the channel realizations next to the CSV.
    pub export_channels: bool,
    /// Measure solver wall time; off keeps the CSV reproducible byte for byte.
    pub timing: bool,
    /// Treat non-convergence as an error.
    pub strict: bool,
    /// Start each SNR point from the previous point's solutions.
    pub warm_start: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_antennas: 64,
            users: 4,
            channel: ChannelModel::Rayleigh,
            snr_grid_db: vec![0.0],
            n_grid: None,
            trials: DEFAULT_TRIALS,
            seed: 0,
            schemes: vec![Scheme::Milac, Scheme::Digital],
            solver: SolverConfig::default(),
            output: None,
            export_channels: false,
            timing: false,
            strict: false,
            warm_start: false,
        }
    }
}

impl ScenarioConfig {
    /// Antenna counts of the sweep.
    pub fn antenna_grid(&self) -> Vec<usize> {
        self.n_grid.clone().unwrap_or_else(|| vec![self.n_antennas])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MilacError::Config(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.users == 0 {
            return bad("K must be at least 1");
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_db must be a nonempty list of finite values");
        }
        let grid = self.antenna_grid();
        if grid.is_empty() {
            return bad("n_grid must be nonempty");
        }
        let n_min = *grid.iter().min().unwrap();
        if self.users > n_min {
            return Err(MilacError::Config(format!(
                "K = {} exceeds the smallest antenna count {n_min}",
                self.users
            )));
        }
        if self.schemes.is_empty() {
            return bad("schemes must be nonempty");
        }
        if (1..self.schemes.len()).any(|i| self.schemes[..i].contains(&self.schemes[i])) {
            return bad("schemes must not repeat");
        }
        if let ChannelModel::Clustered { paths: 0 } = self.channel {
            return bad("clustered channel needs at least one path");
        }
        self.solver
            .validate()
            .map_err(|e| MilacError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MilacError::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }
}

fn parse_list(raw: &str) -> Vec<&str> {
    let inner = raw
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(raw);
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_scalar<T: FromStr>(raw: &str, line: usize, key: &str) -> Result<T> {
    raw.parse().map_err(|_| MilacError::Parse {
        line,
        msg: format!("cannot parse `{raw}` for `{key}`"),
    })
}

fn parse_bool(raw: &str, line: usize, key: &str) -> Result<bool> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(MilacError::Parse {
            line,
            msg: format!("`{key}` expects true or false, got `{raw}`"),
        }),
    }
}

fn parse_channel(raw: &str, line: usize) -> Result<ChannelModel> {
    let lower = raw.to_ascii_lowercase();
    if lower == "rayleigh" {
        return Ok(ChannelModel::Rayleigh);
    }
    if lower == "clustered" {
        return Ok(ChannelModel::Clustered {
            paths: DEFAULT_PATHS,
        });
    }
    if let Some(arg) = lower
        .strip_prefix("clustered(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let paths = parse_scalar(arg.trim(), line, "channel")?;
        return Ok(ChannelModel::Clustered { paths });
    }
    Err(MilacError::Parse {
        line,
        msg: format!("unknown channel `{raw}` (rayleigh | clustered(L))"),
    })
}

impl FromStr for ScenarioConfig {
    type Err = MilacError;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let mut seen = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| MilacError::Parse {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if let Some(prev) = seen.insert(key.to_string(), line) {
                return Err(MilacError::Parse {
                    line,
                    msg: format!("`{key}` already set on line {prev}"),
                });
            }
            match key {
                "N" => cfg.n_antennas = parse_scalar(value, line, key)?,
                "K" => cfg.users = parse_scalar(value, line, key)?,
                "channel" => cfg.channel = parse_channel(value, line)?,
                "snr_db" => {
                    cfg.snr_grid_db = parse_list(value)
                        .into_iter()
                        .map(|v| parse_scalar(v, line, key))
                        .collect::<Result<_>>()?
                }
                "n_grid" => {
                    cfg.n_grid = Some(
                        parse_list(value)
                            .into_iter()
                            .map(|v| parse_scalar(v, line, key))
                            .collect::<Result<_>>()?,
                    )
                }
                "trials" => cfg.trials = parse_scalar(value, line, key)?,
                "seed" => cfg.seed = parse_scalar(value, line, key)?,
                "schemes" => {
                    cfg.schemes = parse_list(value)
                        .into_iter()
                        .map(|v| {
                            v.parse().map_err(|e: MilacError| MilacError::Parse {
                                line,
                                msg: e.to_string(),
                            })
                        })
                        .collect::<Result<_>>()?
                }
                "eps_out" => cfg.solver.eps_out = parse_scalar(value, line, key)?,
                "eps_in" => cfg.solver.eps_in = parse_scalar(value, line, key)?,
                "max_outer" => cfg.solver.max_outer = parse_scalar(value, line, key)?,
                "max_inner" => cfg.solver.max_inner = parse_scalar(value, line, key)?,
                "budget" => cfg.solver.budget = parse_scalar(value, line, key)?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                "export_channels" => cfg.export_channels = parse_bool(value, line, key)?,
                "timing" => cfg.timing = parse_bool(value, line, key)?,
                "strict" => cfg.strict = parse_bool(value, line, key)?,
                "warm_start" => cfg.warm_start = parse_bool(value, line, key)?,
                _ => {
                    return Err(MilacError::Parse {
                        line,
                        msg: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        Ok(cfg)
    }
}
