//! Exhaustive search over the reduced feasible set for `K ≤ 2`.
//!
//! `Y = U diag(s) Vᴴ` with `U, V` in 2×2 unitary sections (phases that do
//! not change the rate are quotiented out), `s ∈ (0, 1]²`, and full power
//! split `p = (tP_T, (1−t)P_T)`. The best grid points are then polished by a
//! bounded pattern search. Every evaluated point is feasible, so the result
//! is a certified lower bound on the optimum.

use crate::error::{MilacError, Result};
use crate::linalg::CMat;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// Best rate after local polishing (bits).
    pub rate: f64,
    /// Best rate on the raw grid (bits).
    pub grid_rate: f64,
    pub evaluations: usize,
}

const POLISH_STARTS: usize = 8;

type Params = [f64; 7];

fn bounds() -> [(f64, f64); 7] {
    [
        (0.0, FRAC_PI_2),
        (0.0, 2.0 * PI),
        (0.0, FRAC_PI_2),
        (0.0, 2.0 * PI),
        (0.0, 1.0),
        (0.0, 1.0),
        (0.0, 1.0),
    ]
}

struct TwoUser {
    g: [[Complex64; 2]; 2],
    budget: f64,
    noise: f64,
}

impl TwoUser {
    fn rate(&self, x: &Params) -> f64 {
        let [a, b, cc, chi, s1, s2, t] = *x;
        let (sa, ca) = a.sin_cos();
        let (sc, cc_) = cc.sin_cos();
        let eb = Complex64::from_polar(1.0, b);
        let ex = Complex64::from_polar(1.0, chi);
        let u = [
            [Complex64::new(ca, 0.0), -eb.conj() * sa],
            [eb * sa, Complex64::new(ca, 0.0)],
        ];
        let v = [
            [Complex64::new(cc_, 0.0), -ex * sc],
            [Complex64::new(sc, 0.0), ex * cc_],
        ];
        let s = [s1, s2];
        // Y = U diag(s) Vᴴ
        let mut y = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, yrow) in y.iter_mut().enumerate() {
            for (j, yij) in yrow.iter_mut().enumerate() {
                *yij = (0..2).map(|m| u[i][m] * s[m] * v[j][m].conj()).sum();
            }
        }
        let p = [t * self.budget, (1.0 - t) * self.budget];
        let mut gains = [[0.0; 2]; 2];
        for (k, grow) in gains.iter_mut().enumerate() {
            for (j, gkj) in grow.iter_mut().enumerate() {
                let a: Complex64 = (0..2).map(|m| self.g[k][m] * y[m][j]).sum();
                *gkj = p[j] * a.norm_sqr();
            }
        }
        let r0 = (gains[0][0] / (gains[0][1] + self.noise)).ln_1p();
        let r1 = (gains[1][1] / (gains[1][0] + self.noise)).ln_1p();
        (r0 + r1) / LN_2
    }
}

fn linspace(lo: f64, hi: f64, n: usize, include_hi: bool) -> Vec<f64> {
    let d = if include_hi { (n - 1).max(1) } else { n };
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / d as f64)
        .collect()
}

fn polish(
    f: &impl Fn(&Params) -> f64,
    start: Params,
    steps: [f64; 7],
    evals: &mut usize,
) -> (Params, f64) {
    let bnd = bounds();
    let mut x = start;
    let mut best = f(&x);
    let mut step = steps;
    while step.iter().any(|&s| s > 1e-9) {
        let mut improved = false;
        for d in 0..7 {
            if step[d] <= 1e-9 {
                continue;
            }
            for dir in [1.0, -1.0] {
                let mut cand = x;
                cand[d] = (cand[d] + dir * step[d]).clamp(bnd[d].0, bnd[d].1);
                *evals += 1;
                let val = f(&cand);
                if val > best {
                    best = val;
                    x = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in step.iter_mut() {
                *s *= 0.5;
            }
        }
    }
    (x, best)
}

/// Best sum rate over a grid of the reduced feasible set, `K ≤ 2`.
///
/// `resolution` is the number of grid points per bounded angle and per
/// singular value; phases use twice as many and the power split `2r+1`.
pub fn brute_force_oracle(
    hhat: &CMat,
    budget: f64,
    noise: f64,
    resolution: usize,
) -> Result<OracleResult> {
    let k = hhat.nrows();
    if k == 0 || k > 2 || hhat.ncols() != k {
        return Err(MilacError::Dimension(format!(
            "oracle handles reduced channels of size 1 or 2, got {}x{}",
            hhat.nrows(),
            hhat.ncols()
        )));
    }
    if !(noise > 0.0) || !(budget > 0.0) || resolution < 2 {
        return Err(MilacError::InvalidArgument(
            "oracle needs positive noise and budget and resolution >= 2".into(),
        ));
    }
    if k == 1 {
        let gain = hhat[(0, 0)].norm_sqr();
        let mut best = f64::NEG_INFINITY;
        let mut evals = 0;
        for &s in &linspace(0.0, 1.0, resolution, true) {
            for &t in &linspace(0.0, 1.0, resolution, true) {
                evals += 1;
                best = best.max((1.0 + t * budget * s * s * gain / noise).log2());
            }
        }
        return Ok(OracleResult {
            rate: best,
            grid_rate: best,
            evaluations: evals,
        });
    }

    let problem = TwoUser {
        g: [[hhat[(0, 0)], hhat[(0, 1)]], [hhat[(1, 0)], hhat[(1, 1)]]],
        budget,
        noise,
    };
    let f = |x: &Params| problem.rate(x);
    let r = resolution;
    let angles = linspace(0.0, FRAC_PI_2, r, true);
    let phases = linspace(0.0, 2.0 * PI, 2 * r, false);
    let svals = linspace(1.0 / r as f64, 1.0, r, true);
    let splits = linspace(0.0, 1.0, 2 * r + 1, true);

    let mut top: Vec<(f64, Params)> = Vec::new();
    let mut evals = 0;
    for &a in &angles {
        for &b in &phases {
            for &cc in &angles {
                for &chi in &phases {
                    for &s1 in &svals {
                        for &s2 in &svals {
                            for &t in &splits {
                                let x = [a, b, cc, chi, s1, s2, t];
                                let val = f(&x);
                                evals += 1;
                                if top.len() < POLISH_STARTS || val > top[top.len() - 1].0 {
                                    top.push((val, x));
                                    top.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap());
                                    top.truncate(POLISH_STARTS);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let grid_rate = top[0].0;
    let step = [
        angles[1] - angles[0],
        phases[1] - phases[0],
        angles[1] - angles[0],
        phases[1] - phases[0],
        svals.get(1).map_or(0.5, |s| s - svals[0]),
        svals.get(1).map_or(0.5, |s| s - svals[0]),
        splits[1] - splits[0],
    ];
    let mut best = grid_rate;
    for &(_, x) in &top {
        let (_, val) = polish(&f, x, step, &mut evals);
        best = best.max(val);
    }
    Ok(OracleResult {
        rate: best,
        grid_rate,
        evaluations: evals,
    })
}
