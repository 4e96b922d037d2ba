use crate::error::{MilacError, Result};
use crate::linalg::{self, CMat, HermitianEigen};

/// Reduced-dimension view of a full-row-rank channel `H` (`K×N`).
#[derive(Debug, Clone)]
pub struct ReducedChannel {
    /// `H̄ = HHᴴ`.
    pub hbar: CMat,
    /// `Ĥ = H̄^{1/2}` (Hermitian PSD).
    pub hhat: CMat,
    /// `H̄^{-1/2}`.
    pub hhat_inv: CMat,
    pub h: CMat,
}

impl ReducedChannel {
    pub fn users(&self) -> usize {
        self.h.nrows()
    }

    /// `X = H̄^{-1/2} Y diag(p)^{1/2}`.
    pub fn x_from_split(&self, y: &CMat, p: &[f64]) -> CMat {
        let sq: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
        &self.hhat_inv * y * linalg::real_diag(&sq)
    }

    /// `W = Hᴴ H̄^{-1/2} Y diag(p)^{1/2}`.
    pub fn lift_split(&self, y: &CMat, p: &[f64]) -> CMat {
        lift_solution(&self.x_from_split(y, p), &self.h)
    }

    /// `Hᴴ H̄^{-1/2}`, an `N×K` matrix with orthonormal columns.
    pub fn range_basis(&self) -> CMat {
        self.h.adjoint() * &self.hhat_inv
    }
}

/// Builds `H̄ = HHᴴ` and its principal square root; rejects rank-deficient `H`.
pub fn reduce_dimension(h: &CMat, rank_tol: f64) -> Result<ReducedChannel> {
    if h.nrows() == 0 || h.nrows() > h.ncols() {
        return Err(MilacError::Dimension(format!(
            "reduction needs 1 <= K <= N, got H of {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let hbar = h * h.adjoint();
    let eig = HermitianEigen::new(&hbar);
    let ratio = if eig.max() > 0.0 {
        eig.min() / eig.max()
    } else {
        0.0
    };
    if !(ratio > rank_tol) {
        return Err(MilacError::RankDeficient { ratio });
    }
    let hhat = eig.apply(|l| l.sqrt());
    let hhat_inv = eig.apply(|l| 1.0 / l.sqrt());
    Ok(ReducedChannel {
        hbar,
        hhat,
        hhat_inv,
        h: h.clone(),
    })
}

/// `W = HᴴX`.
pub fn lift_solution(x: &CMat, h: &CMat) -> CMat {
    h.adjoint() * x
}

/// Orthogonal projection `Hᴴ(HHᴴ)⁻¹H W` of `W` onto `Ran(Hᴴ)`.
pub fn project_onto_channel_range(h: &CMat, w: &CMat) -> Result<CMat> {
    let hbar = h * h.adjoint();
    let coeff = hbar
        .lu()
        .solve(&(h * w))
        .ok_or(MilacError::RankDeficient { ratio: 0.0 })?;
    Ok(h.adjoint() * coeff)
}
