//! Dense tableau simplex for the small covering LPs of the power envelope.
//!
//! Solves `min 1ᵀp  s.t.  A p ≥ b, p ≥ 0` with `A ≥ 0`, `b ≥ 0` by running
//! the primal simplex on the dual `max bᵀz  s.t.  Aᵀz ≤ 1, z ≥ 0`, whose
//! slack basis is feasible from the start. The primal solution is read off
//! the reduced costs of the dual slacks.

use crate::error::{MilacError, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CoveringSolution {
    pub p: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// `rows[j]` holds the coefficients of the `j`-th constraint `rows[j]·p ≥ rhs[j]`.
pub fn solve_covering(rows: &[Vec<f64>], rhs: &[f64], dim: usize) -> Result<CoveringSolution> {
    if rows.len() != rhs.len() || rows.iter().any(|r| r.len() != dim) {
        return Err(MilacError::Dimension(
            "covering LP rows/rhs mismatch".into(),
        ));
    }
    if rows.iter().flatten().chain(rhs).any(|x| !x.is_finite()) {
        return Err(MilacError::InvalidArgument("non-finite LP data".into()));
    }
    let m = rows.len();
    let cols = m + dim;
    // tableau rows: one per primal variable p_i (dual constraint i)
    let mut t = vec![vec![0.0; cols + 1]; dim];
    for (i, trow) in t.iter_mut().enumerate() {
        for (j, r) in rows.iter().enumerate() {
            trow[j] = r[i];
        }
        trow[m + i] = 1.0;
        trow[cols] = 1.0;
    }
    let mut obj = vec![0.0; cols + 1];
    for (j, &b) in rhs.iter().enumerate() {
        obj[j] = -b;
    }
    let mut basis: Vec<usize> = (0..dim).map(|i| m + i).collect();

    let scale = rhs.iter().cloned().fold(1.0, f64::max);
    let eps = PIVOT_EPS * scale;
    let dantzig_budget = 50 * (dim + cols);
    let hard_cap = dantzig_budget + 200 * (dim + cols);
    let mut pivots = 0;
    loop {
        let bland = pivots >= dantzig_budget;
        let entering = if bland {
            (0..cols).find(|&j| obj[j] < -eps)
        } else {
            (0..cols)
                .filter(|&j| obj[j] < -eps)
                .min_by(|&a, &b| obj[a].partial_cmp(&obj[b]).unwrap())
        };
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for (i, trow) in t.iter().enumerate() {
            let a = trow[e];
            if a > PIVOT_EPS {
                let ratio = trow[cols] / a;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(MilacError::InvalidArgument(
                "covering LP is infeasible (dual unbounded)".into(),
            ));
        };
        let piv = t[r][e];
        for x in t[r].iter_mut() {
            *x /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, trow) in t.iter_mut().enumerate() {
            if i != r {
                let f = trow[e];
                if f != 0.0 {
                    for (x, &pr) in trow.iter_mut().zip(&pivot_row) {
                        *x -= f * pr;
                    }
                }
            }
        }
        let f = obj[e];
        for (x, &pr) in obj.iter_mut().zip(&pivot_row) {
            *x -= f * pr;
        }
        basis[r] = e;
        pivots += 1;
        if pivots > hard_cap {
            return Err(MilacError::NoConvergence {
                iterations: pivots,
                what: "simplex pivots".into(),
            });
        }
    }
    let p: Vec<f64> = (0..dim).map(|i| obj[m + i].max(0.0)).collect();
    Ok(CoveringSolution {
        objective: obj[cols],
        p,
        pivots,
    })
}
