//! Dense complex linear-algebra helpers shared by every module.
//!
//! Storage and Hermitian eigendecompositions use `nalgebra`; the SVD comes
//! from `faer`, whose complex SVD stays accurate on rank-deficient input
//! where nalgebra's does not. This module adds the
//! conventions the rest of the crate relies on: descending singular values,
//! a deterministic phase for singular vectors, ascending Hermitian
//! eigenvalues, PSD square roots and unitary completion of a partial basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Smallest modulus an entry must have to fix the phase of a singular vector.
const PHASE_PIVOT_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

fn to_faer(m: &CMat) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    to_faer(m)
        .singular_values()
        .expect("singular values did not converge")
        .into_iter()
        .fold(0.0, f64::max)
}

/// ‖M − Mᵀ‖_F (plain transpose, not conjugate).
pub fn symmetry_defect(m: &CMat) -> f64 {
    frobenius(&(m - m.transpose()))
}

/// ‖MᴴM − I‖_F.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.ncols();
    frobenius(&(m.adjoint() * m - CMat::identity(n, n)))
}

pub fn is_real_zero(m: &CMat, tol: f64) -> bool {
    m.iter().all(|z| z.re.abs() <= tol)
}

/// Thin SVD `M = U diag(s) Vᴴ` with `s` sorted descending.
///
/// The first entry of each left singular vector whose modulus exceeds
/// `1e-10` is rotated to the positive real axis; the matching right singular
/// vector absorbs the same phase so the product is unchanged.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

impl Svd {
    pub fn new(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let r = rows.min(cols);
        if r == 0 {
            return Svd {
                u: CMat::zeros(rows, 0),
                s: Vec::new(),
                v: CMat::zeros(cols, 0),
            };
        }
        let dec = to_faer(m).thin_svd().expect("SVD did not converge");
        let (fu, fs, fv) = (dec.U(), dec.S().column_vector(), dec.V());
        let mut u = CMat::zeros(rows, r);
        let mut v = CMat::zeros(cols, r);
        let mut s = Vec::with_capacity(r);
        // faer sorts the singular values in nonincreasing order already
        for j in 0..r {
            s.push(fs[j].re);
            let mut ucol = CVec::from_fn(rows, |i, _| fu[(i, j)]);
            let mut vcol = CVec::from_fn(cols, |i, _| fv[(i, j)]);
            if let Some(pivot) = ucol.iter().find(|z| z.norm() > PHASE_PIVOT_TOL) {
                let rot = pivot.conj() / pivot.norm();
                ucol *= rot;
                vcol *= rot;
            }
            u.set_column(j, &ucol);
            v.set_column(j, &vcol);
        }
        Svd { u, s, v }
    }

    /// Rebuilds `U diag(f(s)) Vᴴ`.
    pub fn recompose_with(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut us = self.u.clone();
        for (j, &sj) in self.s.iter().enumerate() {
            let scale = f(sj);
            us.column_mut(j).scale_mut(scale);
        }
        us * self.v.adjoint()
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(m: &CMat) -> Self {
        let n = m.nrows();
        // Symmetrize so roundoff asymmetry never reaches the solver.
        let herm = (m + m.adjoint()) * c(0.5, 0.0);
        let dec = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            dec.eigenvalues[a]
                .partial_cmp(&dec.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut vectors = CMat::zeros(n, n);
        let mut values = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            values.push(dec.eigenvalues[src]);
            vectors.set_column(dst, &dec.eigenvectors.column(src));
        }
        HermitianEigen { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) Vᴴ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut vs = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            vs.column_mut(j).scale_mut(f(lam));
        }
        vs * self.vectors.adjoint()
    }
}

/// Principal square root of a Hermitian PSD matrix; negative eigenvalues
/// from roundoff are clipped to zero.
pub fn psd_sqrt(m: &CMat) -> CMat {
    HermitianEigen::new(m).apply(|l| l.max(0.0).sqrt())
}

/// Extends an `m×r` matrix with orthonormal columns to an `m×m` unitary.
///
/// New columns come from Gram–Schmidt (applied twice) on the canonical basis
/// vectors, taking at each step the candidate with the largest residual, so
/// the completion is deterministic and real whenever the input is.
pub fn complete_unitary(partial: &CMat) -> CMat {
    let (m, r) = partial.shape();
    let mut out = CMat::zeros(m, m);
    for j in 0..r {
        out.set_column(j, &partial.column(j));
    }
    let mut filled = r;
    let mut used = vec![false; m];
    while filled < m {
        let mut best: Option<(usize, CVec, f64)> = None;
        for (e, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut cand = CVec::zeros(m);
            cand[e] = ONE;
            for _ in 0..2 {
                for j in 0..filled {
                    let q = out.column(j);
                    let proj = q.dotc(&cand);
                    cand -= q * proj;
                }
            }
            let norm = cand.norm();
            if best.as_ref().is_none_or(|b| norm > b.2 + 1e-12) {
                best = Some((e, cand, norm));
            }
        }
        let (e, cand, norm) = best.expect("a canonical vector always remains");
        used[e] = true;
        out.set_column(filled, &(cand / c(norm, 0.0)));
        filled += 1;
    }
    out
}

/// `diag(v)` for a real vector.
pub fn real_diag(v: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_deficient_svd_matches_gram_eigenvalues() {
        // low-rank products scaled to unit norm once tripped the SVD backend
        let mut rng = crate::rng::substream(17, &[]);
        for _ in 0..300 {
            let k = rng.random_range(2..=8);
            let n = rng.random_range(k..=32);
            let r = rng.random_range(1..k);
            let a = crate::rng::complex_normal_matrix(n, r, &mut rng);
            let b = crate::rng::complex_normal_matrix(r, k, &mut rng);
            let m = &a * b;
            let m = &m * c(1.0 / spectral_norm(&m), 0.0);
            let svd = Svd::new(&m);
            let top = HermitianEigen::new(&(m.adjoint() * &m)).max().sqrt();
            assert!((svd.s[0] - top).abs() < 1e-12, "{} vs {top}", svd.s[0]);
            assert!((svd.recompose_with(|x| x) - &m).norm() < 1e-12);
            assert!(svd.s[r..].iter().all(|&x| x < 1e-12));
        }
    }

    fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn svd_reconstructs_sorted_and_phase_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(r, k) in &[(5, 3), (3, 5), (4, 4), (1, 1)] {
            let m = random(r, k, &mut rng);
            let d = Svd::new(&m);
            assert!(frobenius(&(d.recompose_with(|s| s) - &m)) < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            for j in 0..d.s.len() {
                let first = d.u.column(j)[0];
                assert!(first.im.abs() < 1e-14 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn eigen_ascending_and_sqrt() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(4, 6, &mut rng);
        let h = &a * a.adjoint();
        let e = HermitianEigen::new(&h);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let s = psd_sqrt(&h);
        assert!(frobenius(&(&s * &s - &h)) < 1e-12 * frobenius(&h));
    }

    #[test]
    fn completion_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random(6, 2, &mut rng);
        let d = Svd::new(&m);
        let full = complete_unitary(&d.u);
        assert!(unitarity_defect(&full) < 1e-12);
        assert!(frobenius(&(full.columns(0, 2) - &d.u)) < 1e-15);
    }

    #[test]
    fn spectral_norm_of_identity_and_empty() {
        assert!((spectral_norm(&(CMat::identity(3, 3) * c(3.0, 0.0))) - 3.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&CMat::zeros(0, 0)), 0.0);
    }
}
