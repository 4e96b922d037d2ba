use crate::error::{MilacError, Result};
use crate::linalg::{self, CMat};

/// `Σ_k ln(1 + SINR_k)` from the `K×K` matrix of effective gains
/// `A[k][j] = h_kᴴ w_j`.
pub(crate) fn rate_from_gains(a: &CMat, noise: f64) -> f64 {
    let k = a.nrows();
    let mut total = 0.0;
    for i in 0..k {
        let mut interf = noise;
        for j in 0..k {
            if j != i {
                interf += a[(i, j)].norm_sqr();
            }
        }
        total += (a[(i, i)].norm_sqr() / interf).ln_1p();
    }
    total
}

fn check(h: &CMat, w: &CMat, noise: f64) -> Result<()> {
    if !(noise > 0.0) {
        return Err(MilacError::InvalidArgument(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    if h.ncols() != w.nrows() || h.nrows() != w.ncols() {
        return Err(MilacError::Dimension(format!(
            "H is {}x{} but W is {}x{}",
            h.nrows(),
            h.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    Ok(())
}

/// Sum rate in nats.
pub fn sum_rate_nats(h: &CMat, w: &CMat, noise: f64) -> Result<f64> {
    check(h, w, noise)?;
    Ok(rate_from_gains(&(h * w), noise))
}

/// `Σ_k log₂(1 + |h_kᴴw_k|² / (Σ_{j≠k}|h_kᴴw_j|² + σ²))`.
pub fn sum_rate(h: &CMat, w: &CMat, noise: f64) -> Result<f64> {
    Ok(sum_rate_nats(h, w, noise)? / std::f64::consts::LN_2)
}

/// Sum rate of `Y diag(p)^{1/2}` on the effective channel `G`.
pub fn split_rate(g: &CMat, y: &CMat, p: &[f64], noise: f64) -> Result<f64> {
    let sq: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    sum_rate(g, &(y * linalg::real_diag(&sq)), noise)
}
