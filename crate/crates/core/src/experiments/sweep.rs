use super::{ScenarioConfig, Scheme, Status, SweepRecord};
use crate::channels::channel_for_trial;
use crate::error::Result;
use crate::linalg::CMat;
use crate::solvers::{
    digital_wmmse, digital_wmmse_warm, wmmse_lc, wmmse_lc_fulldim, wmmse_lc_fulldim_warm,
    wmmse_lc_warm, SolverConfig, SumRateResult,
};
use rayon::prelude::*;
use std::time::Instant;

/// A channel realization of the sweep, keyed by antenna count and trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialChannel {
    pub n: usize,
    pub trial: usize,
    pub h: CMat,
}

/// One scheme on one channel, as the sweep runs it. The digital baseline is
/// also warm-started from the reduced MiLAC solution.
pub fn run_scheme(scheme: Scheme, h: &CMat, cfg: &SolverConfig) -> Result<SumRateResult> {
    match scheme {
        Scheme::Milac => wmmse_lc(h, cfg),
        Scheme::MilacFulldim => wmmse_lc_fulldim(h, cfg),
        Scheme::Digital => {
            let warm = wmmse_lc(h, cfg)?;
            digital_baseline(h, cfg, &[&warm.w])
        }
    }
}

struct Task {
    n_idx: usize,
    n: usize,
    trial: usize,
}

/// Digital baseline: the cold-started WMMSE and one warm start from each
/// given MiLAC solution, keeping the best. Every MiLAC beamformer is digitally
/// feasible, so the baseline is never below the MiLAC rates on the channel.
pub fn digital_baseline(h: &CMat, cfg: &SolverConfig, warm: &[&CMat]) -> Result<SumRateResult> {
    let mut best = digital_wmmse(h, cfg)?;
    for w0 in warm {
        let cand = digital_wmmse_warm(h, w0, cfg)?;
        if cand.rate > best.rate {
            best = cand;
        }
    }
    Ok(best)
}

/// Every record of one `(N, trial)` pair: all SNR points and schemes on the
/// same channel draw.
fn run_task(cfg: &ScenarioConfig, task: &Task) -> Result<(Vec<(usize, SweepRecord)>, CMat)> {
    let channel = channel_for_trial(
        cfg.channel,
        task.n,
        cfg.users,
        cfg.seed,
        &[task.n as u64, task.trial as u64],
    )?;
    let h = &channel.h;
    let wants = |s: Scheme| cfg.schemes.contains(&s);
    let mut out = Vec::with_capacity(cfg.snr_grid_db.len() * cfg.schemes.len());
    // solutions at the previous SNR point, kept only when warm starts are on
    let mut prev: Vec<(Scheme, Result<SumRateResult>, f64)> = Vec::new();
    for (snr_idx, &snr) in cfg.snr_grid_db.iter().enumerate() {
        let solver = cfg.solver.clone().with_snr_db(snr);
        let timed = |f: &dyn Fn() -> Result<SumRateResult>| {
            let start = Instant::now();
            let r = f();
            (r, start.elapsed().as_secs_f64() * 1e3)
        };
        let previous = |s: Scheme| {
            prev.iter()
                .find(|(q, _, _)| *q == s)
                .and_then(|(_, r, _)| r.as_ref().ok())
        };
        let mut done: Vec<(Scheme, Result<SumRateResult>, f64)> = Vec::new();
        if wants(Scheme::Milac) || wants(Scheme::Digital) {
            let (r, t) = timed(&|| match previous(Scheme::Milac) {
                Some(last) => wmmse_lc_warm(h, &last.y, &last.p, &solver),
                None => wmmse_lc(h, &solver),
            });
            done.push((Scheme::Milac, r, t));
        }
        if wants(Scheme::MilacFulldim) {
            let (r, t) = timed(&|| match previous(Scheme::MilacFulldim) {
                Some(last) => wmmse_lc_fulldim_warm(h, &last.y, &last.p, &solver),
                None => wmmse_lc_fulldim(h, &solver),
            });
            done.push((Scheme::MilacFulldim, r, t));
        }
        if wants(Scheme::Digital) {
            let mut warm: Vec<&CMat> = done
                .iter()
                .filter_map(|(_, r, _)| r.as_ref().ok().map(|r| &r.w))
                .collect();
            warm.extend(previous(Scheme::Digital).map(|r| &r.w));
            let (r, t) = timed(&|| digital_baseline(h, &solver, &warm));
            done.push((Scheme::Digital, r, t));
        }
        for &scheme in &cfg.schemes {
            let (_, result, elapsed) = done.iter().find(|(s, _, _)| *s == scheme).unwrap();
            let elapsed = *elapsed;
            let (rate, iterations, status) = match result {
                Ok(r) => (
                    r.rate.max(0.0),
                    r.iterations,
                    if r.converged {
                        Status::Converged
                    } else {
                        Status::IterationCap
                    },
                ),
                Err(_) => (0.0, 0, Status::Failed),
            };
            out.push((
                snr_idx,
                SweepRecord {
                    scheme,
                    n: task.n,
                    k: cfg.users,
                    snr_db: snr,
                    trial: task.trial,
                    seed: cfg.seed,
                    sum_rate_bits: rate,
                    iterations,
                    status,
                    wall_time_ms: if cfg.timing { elapsed } else { 0.0 },
                },
            ));
        }
        if cfg.warm_start {
            prev = done;
        }
    }
    Ok((out, channel.h))
}

/// Runs the sweep on the current rayon pool and also returns the channels.
///
/// Records come back in `(N, SNR, trial, scheme)` order regardless of how the
/// trials were scheduled.
pub fn run_sweep_with_channels(
    cfg: &ScenarioConfig,
) -> Result<(Vec<SweepRecord>, Vec<TrialChannel>)> {
    cfg.validate()?;
    let tasks: Vec<Task> = cfg
        .antenna_grid()
        .into_iter()
        .enumerate()
        .flat_map(|(n_idx, n)| (0..cfg.trials).map(move |trial| Task { n_idx, n, trial }))
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|t| run_task(cfg, t))
        .collect::<Result<_>>()?;

    let scheme_rank = |s: Scheme| cfg.schemes.iter().position(|&x| x == s).unwrap();
    let mut keyed = Vec::new();
    let mut channels = Vec::with_capacity(tasks.len());
    for (task, (records, h)) in tasks.iter().zip(results) {
        for (snr_idx, rec) in records {
            let key = (task.n_idx, snr_idx, rec.trial, scheme_rank(rec.scheme));
            keyed.push((key, rec));
        }
        channels.push(TrialChannel {
            n: task.n,
            trial: task.trial,
            h,
        });
    }
    keyed.sort_by_key(|(key, _)| *key);
    Ok((keyed.into_iter().map(|(_, r)| r).collect(), channels))
}

pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_with_channels(cfg).map(|(r, _)| r)
}
