//! Numerical kernel checks run by the `selftest` command.

use crate::linalg::{self, c, CMat};
use crate::network::{
    complete_scattering, is_lossless_reciprocal, response_from_scattering, MilacResponse,
    NetworkTolerances,
};
use crate::rng::{complex_normal_matrix, substream};
use crate::sets::{min_power_envelope, MEMBERSHIP_REL_TOL};
use crate::solvers::{
    pgd_objective, pgd_wirtinger_gradient, spectral_ball_projection, split_rate,
    split_rate_gradient, update_p, YSubproblem,
};
use rand::Rng;
use std::time::Instant;

const SELFTEST_SEED: u64 = 0x5e1f;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error against the bound.
    pub worst: f64,
    pub bound: f64,
    pub millis: f64,
}

fn check(name: &'static str, bound: f64, body: impl FnOnce() -> f64) -> CheckOutcome {
    let start = Instant::now();
    let worst = body();
    CheckOutcome {
        name,
        passed: worst <= bound,
        worst,
        bound,
        millis: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn inner(a: &CMat, b: &CMat) -> f64 {
    (a.adjoint() * b).trace().re
}

/// Central differences along random directions, error normalized by
/// `‖∇‖·‖d‖`.
fn rate_gradient_error() -> f64 {
    let mut rng = substream(SELFTEST_SEED, &[1]);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = rng.random_range(1..=4);
        let n = rng.random_range(k..=8);
        let g = complex_normal_matrix(k, n, &mut rng);
        let y = complex_normal_matrix(n, k, &mut rng) * c(0.3, 0.0);
        let p: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
        let noise = 0.1 + rng.random::<f64>();
        let (gy, gp) = split_rate_gradient(&g, &y, &p, noise);
        let dy = complex_normal_matrix(n, k, &mut rng);
        let dp: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
        let at = |t: f64| {
            let yy = &y + &dy * c(t, 0.0);
            let pp: Vec<f64> = p.iter().zip(&dp).map(|(a, b)| a + t * b).collect();
            split_rate(&g, &yy, &pp, noise).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let analytic = inner(&gy, &dy) + gp.iter().zip(&dp).map(|(a, b)| a * b).sum::<f64>();
        let gnorm = (linalg::frobenius_sq(&gy) + gp.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let dnorm = (linalg::frobenius_sq(&dy) + dp.iter().map(|x| x * x).sum::<f64>()).sqrt();
        worst = worst.max((fd - analytic).abs() / (gnorm * dnorm));
    }
    worst
}

fn pgd_gradient_error() -> f64 {
    let mut rng = substream(SELFTEST_SEED, &[2]);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = rng.random_range(1..=4);
        let g = complex_normal_matrix(k, k, &mut rng);
        let u: Vec<_> = (0..k)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let omega: Vec<f64> = (0..k).map(|_| 1.0 + rng.random::<f64>()).collect();
        let p: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let sub = YSubproblem::new(&g, &u, &omega);
        let y = complex_normal_matrix(k, k, &mut rng);
        let d = complex_normal_matrix(k, k, &mut rng);
        let grad = pgd_wirtinger_gradient(&sub, &y, &p);
        let fd = (pgd_objective(&sub, &(&y + &d * c(h, 0.0)), &p)
            - pgd_objective(&sub, &(&y - &d * c(h, 0.0)), &p))
            / (2.0 * h);
        let analytic = 2.0 * inner(&grad, &d);
        let scale = 2.0 * linalg::frobenius(&grad) * linalg::frobenius(&d);
        worst = worst.max((fd - analytic).abs() / scale.max(f64::MIN_POSITIVE));
    }
    worst
}

/// Worst of the budget residual `|Σp − P_T|/P_T` when the multiplier is
/// active and the stationarity residual `|√p_k(β_k+λ) − α_k|/α_k`.
fn kkt_error() -> f64 {
    let mut rng = substream(SELFTEST_SEED, &[3]);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = rng.random_range(1..=8);
        let alpha: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0).collect();
        let beta: Vec<f64> = (0..k)
            .map(|_| rng.random::<f64>() * rng.random::<f64>())
            .collect();
        let budget = 0.1 + rng.random::<f64>() * 10.0;
        let out = update_p(&alpha, &beta, budget);
        let total: f64 = out.p.iter().sum();
        if total > budget * (1.0 + 1e-12) {
            return f64::INFINITY;
        }
        if out.lambda > 0.0 {
            worst = worst.max((total - budget).abs() / budget);
        }
        for j in 0..k {
            if alpha[j] > 0.0 {
                let r = (out.p[j].sqrt() * (beta[j] + out.lambda) - alpha[j]).abs() / alpha[j];
                worst = worst.max(r);
            }
        }
    }
    worst
}

/// Largest amount by which a random point of the ball beats the projection
/// (zero when the projection is optimal), plus any norm violation.
fn projection_error() -> f64 {
    let mut rng = substream(SELFTEST_SEED, &[4]);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (r, cdim) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let m = complex_normal_matrix(r, cdim, &mut rng) * c(0.2 + 2.0 * rng.random::<f64>(), 0.0);
        let proj = spectral_ball_projection(&m);
        worst = worst.max(linalg::spectral_norm(&proj) - 1.0);
        let dist = linalg::frobenius(&(&m - &proj));
        for _ in 0..1000 {
            let z = complex_normal_matrix(r, cdim, &mut rng);
            let cand = &z * c(rng.random::<f64>() / linalg::spectral_norm(&z), 0.0);
            worst = worst.max(dist - linalg::frobenius(&(&m - cand)));
        }
    }
    worst
}

fn completion_error() -> f64 {
    let mut rng = substream(SELFTEST_SEED, &[5]);
    let tol = NetworkTolerances::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = rng.random_range(1..=4);
        let n = rng.random_range(k..=12);
        let f = complex_normal_matrix(n, k, &mut rng);
        let f = &f * c(rng.random::<f64>() / linalg::spectral_norm(&f), 0.0);
        let theta = match complete_scattering(&MilacResponse { f: f.clone() }, &tol) {
            Ok(t) => t,
            Err(_) => return f64::INFINITY,
        };
        let rep = is_lossless_reciprocal(&theta.theta, 1e-9);
        let back = response_from_scattering(&theta)
            .map_or(f64::INFINITY, |r| linalg::frobenius(&(r.f - &f)));
        worst = worst
            .max(rep.symmetric_defect)
            .max(rep.unitary_defect)
            .max(back);
    }
    worst
}

fn witness_error() -> f64 {
    let f = CMat::from_element(2, 1, c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let w = CMat::from_fn(2, 2, |i, _| f[(i, 0)]);
    match min_power_envelope(&w, MEMBERSHIP_REL_TOL) {
        Ok(env) => (env.total - 4.0).abs(),
        Err(_) => f64::INFINITY,
    }
}

/// Runs every kernel check; all should pass in well under a minute.
pub fn selftest() -> Vec<CheckOutcome> {
    vec![
        check(
            "rate gradient vs finite differences",
            1e-6,
            rate_gradient_error,
        ),
        check(
            "PGD gradient vs finite differences",
            1e-6,
            pgd_gradient_error,
        ),
        check("power bisection KKT residual", 1e-9, kkt_error),
        check(
            "spectral projection vs random candidates",
            1e-12,
            projection_error,
        ),
        check("lossless reciprocal completion", 1e-9, completion_error),
        check("envelope of the [f f] witness", 1e-6, witness_error),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in selftest() {
            assert!(c.passed, "{c:?}");
        }
    }
}
