//! Lossless reciprocal multiport networks.
//!
//! A MiLAC with `K` RF-chain ports and `N` antenna ports is a fully connected
//! `(N+K)`-port network of tunable admittances. Ports `0..K` are the RF-chain
//! inputs and ports `K..K+N` the antennas. This module converts between the
//! tunable elements, the admittance matrix `Y`, the scattering matrix `Θ`,
//! and the `N×K` response block `F`, and builds a unitary symmetric `Θ`
//! realizing any `F` with `‖F‖₂ ≤ 1`.

use crate::error::{MilacError, Result};
use crate::linalg::{self, c, CMat, Svd, ONE, ZERO};
use num_complex::Complex64;

pub const DEFAULT_Z0: f64 = 50.0;

/// Numerical thresholds used throughout the network algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkTolerances {
    /// Relative symmetry defect accepted for `Y`.
    pub symmetry: f64,
    /// Reject `(I + Z₀Y)` or `(I + Θ)` below this reciprocal condition number.
    pub min_rcond: f64,
    /// Singular values in `(1, 1 + clip]` are clipped to one.
    pub clip: f64,
    /// Singular values below `rank · σ_max` are treated as zero.
    pub rank: f64,
}

impl Default for NetworkTolerances {
    fn default() -> Self {
        NetworkTolerances {
            symmetry: 1e-9,
            min_rcond: 1e-12,
            clip: 1e-9,
            rank: 1e-12,
        }
    }
}

/// Tunable elements: one shunt admittance per port and one coupling
/// admittance per unordered port pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TunableAdmittances {
    pub ground: Vec<Complex64>,
    /// Upper triangle `(n, j)` with `n < j`, row-major.
    pub coupling: Vec<Complex64>,
    pub reference_impedance: f64,
}

impl TunableAdmittances {
    pub fn zeros(ports: usize) -> Self {
        TunableAdmittances {
            ground: vec![ZERO; ports],
            coupling: vec![ZERO; ports * ports.saturating_sub(1) / 2],
            reference_impedance: DEFAULT_Z0,
        }
    }

    pub fn ports(&self) -> usize {
        self.ground.len()
    }

    fn pair_index(ports: usize, n: usize, j: usize) -> usize {
        let (a, b) = if n < j { (n, j) } else { (j, n) };
        // rows 0..a contribute (ports-1) + (ports-2) + ... entries
        a * ports - a * (a + 1) / 2 + (b - a - 1)
    }

    /// Coupling between ports `n` and `j` (symmetric, `n ≠ j`).
    pub fn coupling(&self, n: usize, j: usize) -> Complex64 {
        assert_ne!(n, j, "no self coupling");
        self.coupling[Self::pair_index(self.ports(), n, j)]
    }

    pub fn set_coupling(&mut self, n: usize, j: usize, value: Complex64) {
        assert_ne!(n, j, "no self coupling");
        let idx = Self::pair_index(self.ports(), n, j);
        self.coupling[idx] = value;
    }

    /// True when every element is purely imaginary within `tol` siemens.
    pub fn is_lossless(&self, tol: f64) -> bool {
        self.ground
            .iter()
            .chain(self.coupling.iter())
            .all(|z| z.re.abs() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceMatrix {
    pub y: CMat,
    pub n_antennas: usize,
    pub n_users: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub theta: CMat,
    pub n_antennas: usize,
    pub n_users: usize,
}

/// The normalized `N×K` response block (twice the physical response).
#[derive(Debug, Clone, PartialEq)]
pub struct MilacResponse {
    pub f: CMat,
}

impl MilacResponse {
    pub fn n_antennas(&self) -> usize {
        self.f.nrows()
    }

    pub fn n_users(&self) -> usize {
        self.f.ncols()
    }

    /// Physical response `F_MiLAC = F/2`.
    pub fn physical(&self) -> CMat {
        &self.f * c(0.5, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosslessReciprocalReport {
    pub symmetric_defect: f64,
    pub unitary_defect: f64,
    pub pass: bool,
}

fn check_ports(rows: usize, cols: usize, n: usize, k: usize) -> Result<()> {
    if rows != n + k || cols != n + k {
        return Err(MilacError::Dimension(format!(
            "expected {}x{} for N={n}, K={k}, got {rows}x{cols}",
            n + k,
            n + k
        )));
    }
    Ok(())
}

fn rcond(m: &CMat) -> f64 {
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Solves `A X = B` after checking the reciprocal condition number of `A`.
fn guarded_solve(a: CMat, b: CMat, min_rcond: f64) -> Result<CMat> {
    let rc = rcond(&a);
    if !(rc >= min_rcond) {
        return Err(MilacError::Singular {
            rcond: rc,
            threshold: min_rcond,
        });
    }
    a.lu().solve(&b).ok_or(MilacError::Singular {
        rcond: rc,
        threshold: min_rcond,
    })
}

/// Builds `Y` from the tunable elements:
/// `[Y]_{n,m} = −Ȳ_{n,m}` off the diagonal and `[Y]_{n,n} = Ȳ_n + Σ_{j≠n} Ȳ_{n,j}`.
pub fn admittances_to_matrix(
    elems: &TunableAdmittances,
    n_antennas: usize,
    n_users: usize,
) -> Result<AdmittanceMatrix> {
    let ports = n_antennas + n_users;
    if elems.ground.len() != ports || elems.coupling.len() != ports * ports.saturating_sub(1) / 2 {
        return Err(MilacError::Dimension(format!(
            "admittance set sized for {} ports / {} couplings, expected {ports} ports",
            elems.ground.len(),
            elems.coupling.len()
        )));
    }
    let mut y = CMat::zeros(ports, ports);
    for n in 0..ports {
        let mut diag = elems.ground[n];
        for j in 0..ports {
            if j != n {
                let yc = elems.coupling(n, j);
                y[(n, j)] = -yc;
                diag += yc;
            }
        }
        y[(n, n)] = diag;
    }
    Ok(AdmittanceMatrix {
        y,
        n_antennas,
        n_users,
    })
}

/// Inverse of [`admittances_to_matrix`].
pub fn matrix_to_admittances(
    y: &AdmittanceMatrix,
    z0: f64,
    tol: &NetworkTolerances,
) -> Result<TunableAdmittances> {
    let ports = y.n_antennas + y.n_users;
    check_ports(y.y.nrows(), y.y.ncols(), y.n_antennas, y.n_users)?;
    let defect = linalg::symmetry_defect(&y.y);
    let allowed = tol.symmetry * linalg::frobenius(&y.y);
    if defect > allowed {
        return Err(MilacError::Asymmetric {
            defect,
            tol: allowed,
        });
    }
    let mut out = TunableAdmittances::zeros(ports);
    out.reference_impedance = z0;
    for n in 0..ports {
        for j in (n + 1)..ports {
            out.set_coupling(n, j, -y.y[(n, j)]);
        }
    }
    for n in 0..ports {
        let mut ground = y.y[(n, n)];
        for j in 0..ports {
            if j != n {
                ground -= out.coupling(n, j);
            }
        }
        out.ground[n] = ground;
    }
    Ok(out)
}

/// `Θ = (I + Z₀Y)⁻¹ (I − Z₀Y)`.
pub fn scattering_from_admittance(
    y: &AdmittanceMatrix,
    z0: f64,
    tol: &NetworkTolerances,
) -> Result<ScatteringMatrix> {
    let ports = y.n_antennas + y.n_users;
    check_ports(y.y.nrows(), y.y.ncols(), y.n_antennas, y.n_users)?;
    let i = CMat::identity(ports, ports);
    let zy = &y.y * c(z0, 0.0);
    let theta = guarded_solve(&i + &zy, &i - &zy, tol.min_rcond)?;
    Ok(ScatteringMatrix {
        theta,
        n_antennas: y.n_antennas,
        n_users: y.n_users,
    })
}

/// `Y = Z₀⁻¹ (I + Θ)⁻¹ (I − Θ)`.
pub fn admittance_from_scattering(
    theta: &ScatteringMatrix,
    z0: f64,
    tol: &NetworkTolerances,
) -> Result<AdmittanceMatrix> {
    let ports = theta.n_antennas + theta.n_users;
    check_ports(
        theta.theta.nrows(),
        theta.theta.ncols(),
        theta.n_antennas,
        theta.n_users,
    )?;
    let i = CMat::identity(ports, ports);
    let y = guarded_solve(&i + &theta.theta, &i - &theta.theta, tol.min_rcond)? * c(1.0 / z0, 0.0);
    Ok(AdmittanceMatrix {
        y,
        n_antennas: theta.n_antennas,
        n_users: theta.n_users,
    })
}

/// Reads off `F = [Θ]_{K..K+N, 0..K}`.
pub fn response_from_scattering(theta: &ScatteringMatrix) -> Result<MilacResponse> {
    let (n, k) = (theta.n_antennas, theta.n_users);
    check_ports(theta.theta.nrows(), theta.theta.ncols(), n, k)?;
    Ok(MilacResponse {
        f: theta.theta.view((k, 0), (n, k)).into_owned(),
    })
}

/// Unitary symmetric completion of a response block.
///
/// With `F = U_F D_F V_Fᴴ` (full unitary `U_F`, `V_F`), returns
/// `Θ = [[Θ₁₁, Fᵀ], [F, Θ₂₂]]` where `Θ₁₁ = −V_F* S_K V_Fᴴ` (`K×K`) and
/// `Θ₂₂ = U_F S_N U_Fᵀ` (`N×N`), the `S` blocks carrying `√(1−σᵢ²)` on the
/// singular directions and ones elsewhere.
pub fn complete_scattering(
    response: &MilacResponse,
    tol: &NetworkTolerances,
) -> Result<ScatteringMatrix> {
    let f = &response.f;
    let (n, k) = f.shape();
    let svd = Svd::new(f);
    let smax = svd.s.first().copied().unwrap_or(0.0);
    if smax > 1.0 + tol.clip {
        return Err(MilacError::InfeasibleResponse {
            norm: smax,
            tol: tol.clip,
        });
    }
    let cutoff = tol.rank * smax;
    let sigma: Vec<f64> = svd
        .s
        .iter()
        .map(|&s| if s < cutoff { 0.0 } else { s.min(1.0) })
        .collect();
    let u_full = linalg::complete_unitary(&svd.u);
    let v_full = linalg::complete_unitary(&svd.v);

    let co = |s: f64| ((1.0 - s) * (1.0 + s)).max(0.0).sqrt();
    let mut s_k = vec![1.0; k];
    let mut s_n = vec![1.0; n];
    for (i, &s) in sigma.iter().enumerate() {
        s_k[i] = co(s);
        s_n[i] = co(s);
    }

    let theta11 = -(v_full.conjugate() * linalg::real_diag(&s_k) * v_full.adjoint());
    let theta22 = &u_full * linalg::real_diag(&s_n) * u_full.transpose();

    let mut theta = CMat::zeros(n + k, n + k);
    theta.view_mut((0, 0), (k, k)).copy_from(&theta11);
    theta.view_mut((0, k), (k, n)).copy_from(&f.transpose());
    theta.view_mut((k, 0), (n, k)).copy_from(f);
    theta.view_mut((k, k), (n, n)).copy_from(&theta22);
    Ok(ScatteringMatrix {
        theta,
        n_antennas: n,
        n_users: k,
    })
}

/// Symmetry and unitarity defects of a square matrix.
pub fn is_lossless_reciprocal(theta: &CMat, tol: f64) -> LosslessReciprocalReport {
    let symmetric_defect = linalg::symmetry_defect(theta);
    let unitary_defect = linalg::unitarity_defect(theta);
    LosslessReciprocalReport {
        symmetric_defect,
        unitary_defect,
        pass: symmetric_defect <= tol && unitary_defect <= tol,
    }
}

/// The identity network (all ports matched, nothing coupled).
pub fn matched_network(n_antennas: usize, n_users: usize) -> ScatteringMatrix {
    let p = n_antennas + n_users;
    let mut theta = CMat::zeros(p, p);
    for i in 0..p {
        theta[(i, i)] = ONE;
    }
    ScatteringMatrix {
        theta,
        n_antennas,
        n_users,
    }
}
