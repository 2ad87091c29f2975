//! Quantum Fisher information for rotations generated by J_n = n·J.
//!
//! The C-matrix is built from the spectral decomposition ρ = Σ λ_i |i⟩⟨i|:
//!
//! ```text
//! C_kl = Σ_{i≠j} (λ_i − λ_j)²/(λ_i + λ_j) · 2 Re(⟨i|J_k|j⟩⟨j|J_l|i⟩)
//! ```
//!
//! so that F(n) = n·C·n and, for pure states, F(n) = 4 Var(J_n). The
//! maximum over directions is the top eigenvalue of C.

use alloc::vec::Vec;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};

#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::{BlochVector, ChannelCoefficients};
use crate::error::{Error, Result};
use crate::state::{hermitian_eigen, CMatrix, DensityMatrix, C64};

/// Eigenvalue pairs with λ_i + λ_j below this are dropped from the sum.
pub const EPS_PAIR: f64 = 1e-12;

/// Relative tolerance for comparing branch values with the top eigenvalue.
pub const BRANCH_TOLERANCE: f64 = 1e-9;

pub type CMatrix3 = [[f64; 3]; 3];

/// Unit rotation axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl Direction {
    pub const X: Direction = Direction { n1: 1.0, n2: 0.0, n3: 0.0 };
    pub const Y: Direction = Direction { n1: 0.0, n2: 1.0, n3: 0.0 };
    pub const Z: Direction = Direction { n1: 0.0, n2: 0.0, n3: 1.0 };

    /// Normalises `v`; the overall sign is fixed so the first non-negligible
    /// component is positive.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain { what: "direction needs a non-zero finite vector", value: norm });
        }
        let mut u = [v[0] / norm, v[1] / norm, v[2] / norm];
        if let Some(lead) = u.iter().copied().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                u.iter_mut().for_each(|x| *x = -*x);
            }
        }
        Ok(Direction { n1: u[0], n2: u[1], n3: u[2] })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.n1, self.n2, self.n3]
    }
}

/// Which family of rotation axes attains the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Optimum lies in the x–y plane.
    Planar,
    /// Optimum is the z axis.
    Axial,
    /// Planar and axial optima coincide with the maximum.
    Degenerate,
    /// Optimum is neither in-plane nor axial (not produced by the states
    /// studied here, kept so the label is total).
    Oblique,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Planar => "planar",
            Branch::Axial => "axial",
            Branch::Degenerate => "degenerate",
            Branch::Oblique => "oblique",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiReport {
    pub c_matrix: CMatrix3,
    pub f_max: f64,
    pub optimal_direction: Direction,
    pub branch: Branch,
    /// Best F over in-plane axes (top eigenvalue of the x–y block).
    pub planar_value: f64,
    /// F along the z axis.
    pub axial_value: f64,
    /// F_max / N.
    pub f_mean: f64,
    pub n_qubits: usize,
}

impl QfiReport {
    /// F(n) = n·C·n.
    pub fn along(&self, n: &Direction) -> f64 {
        quadratic_form(&self.c_matrix, &n.as_array())
    }
}

pub fn quadratic_form(c: &CMatrix3, n: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for k in 0..3 {
        for l in 0..3 {
            acc += n[k] * c[k][l] * n[l];
        }
    }
    acc
}

// J·V using only the non-zero entries of J.
fn sparse_product(j: &CMatrix, v: &CMatrix) -> CMatrix {
    let n = j.nrows();
    let mut out = CMatrix::zeros(n, v.ncols());
    for col in 0..n {
        for row in 0..n {
            let x = j[(row, col)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for k in 0..v.ncols() {
                out[(row, k)] += x * v[(col, k)];
            }
        }
    }
    out
}

/// C-matrix with the default pair cutoff [`EPS_PAIR`].
pub fn c_matrix(rho: &DensityMatrix, generators: &[CMatrix; 3]) -> Result<CMatrix3> {
    c_matrix_with_eps(rho, generators, EPS_PAIR)
}

pub fn c_matrix_with_eps(rho: &DensityMatrix, generators: &[CMatrix; 3], eps_pair: f64) -> Result<CMatrix3> {
    let dim = rho.dim();
    if generators.iter().any(|g| g.nrows() != dim || g.ncols() != dim) {
        return Err(Error::Contract("generators must match the state dimension"));
    }
    let (lambda, v) = hermitian_eigen(rho.matrix())?;
    let v_adj = v.adjoint();
    let rotated: Vec<CMatrix> = generators.iter().map(|g| &v_adj * sparse_product(g, &v)).collect();

    let mut c = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let sum = lambda[i] + lambda[j];
            if sum < eps_pair {
                continue;
            }
            let diff = lambda[i] - lambda[j];
            let w = diff * diff / sum;
            if w == 0.0 {
                continue;
            }
            let g: [C64; 3] = [rotated[0][(i, j)], rotated[1][(i, j)], rotated[2][(i, j)]];
            for k in 0..3 {
                for l in k..3 {
                    // ⟨i|J_k|j⟩⟨j|J_l|i⟩ = g_k · conj(g_l)
                    c[k][l] += w * 2.0 * (g[k] * g[l].conj()).re;
                }
            }
        }
    }
    for k in 0..3 {
        for l in 0..k {
            c[k][l] = c[l][k];
        }
    }
    Ok(c)
}

/// Maximises F over directions and labels the optimal branch.
pub fn f_max(rho: &DensityMatrix, generators: &[CMatrix; 3]) -> Result<QfiReport> {
    let n = rho.qubit_count().unwrap_or(1).max(1);
    report_from_c(c_matrix(rho, generators)?, n)
}

/// Builds the report from a C-matrix: F_max is the top eigenvalue; the label
/// compares the best in-plane value and the axial value with it.
pub fn report_from_c(c: CMatrix3, n_qubits: usize) -> Result<QfiReport> {
    if n_qubits == 0 {
        return Err(Error::Contract("qubit count must be positive"));
    }
    if c.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Eigen);
    }
    let m = Matrix3::from_fn(|r, col| c[r][col]);
    let eig = SymmetricEigen::new(m);
    let top_idx = eig.eigenvalues.imax();
    let top = eig.eigenvalues[top_idx];

    let plane = SymmetricEigen::new(Matrix2::new(c[0][0], c[0][1], c[1][0], c[1][1]));
    let plane_idx = plane.eigenvalues.imax();
    let planar = plane.eigenvalues[plane_idx];
    let axial = c[2][2];

    let tol = BRANCH_TOLERANCE * top.abs().max(1.0);
    let planar_hits = (top - planar).abs() <= tol;
    let axial_hits = (top - axial).abs() <= tol;
    let (branch, direction) = if planar_hits && axial_hits {
        (Branch::Degenerate, Direction::Z)
    } else if axial_hits {
        (Branch::Axial, Direction::Z)
    } else if planar_hits {
        let u = plane.eigenvectors.column(plane_idx);
        (Branch::Planar, Direction::new([u[0], u[1], 0.0])?)
    } else {
        let u = eig.eigenvectors.column(top_idx);
        (Branch::Oblique, Direction::new([u[0], u[1], u[2]])?)
    };
    Ok(QfiReport {
        c_matrix: c,
        f_max: top,
        optimal_direction: direction,
        branch,
        planar_value: planar,
        axial_value: axial,
        f_mean: top / n_qubits as f64,
        n_qubits,
    })
}

/// F_max = e^{−2Λ} sin²θ + e^{−2Γ}(cosθ + δ)², i.e. |B(t)|².
pub fn single_qubit_fmax(theta: f64, coeffs: &ChannelCoefficients) -> f64 {
    let s = theta.sin();
    let z = theta.cos() + coeffs.delta;
    (-2.0 * coeffs.big_lambda).exp() * s * s + (-2.0 * coeffs.big_gamma).exp() * z * z
}

/// Average of the single-qubit F_max over the sphere of pure initial
/// states: (2/3)e^{−2Λ} + e^{−2Γ}(1/3 + δ²).
pub fn average_fmax(coeffs: &ChannelCoefficients) -> f64 {
    (2.0 / 3.0) * (-2.0 * coeffs.big_lambda).exp() + (-2.0 * coeffs.big_gamma).exp() * (1.0 / 3.0 + coeffs.delta * coeffs.delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitDirections {
    pub planar: Direction,
    pub axial: Direction,
    /// Set when B = 0 and every direction gives F = 0.
    pub degenerate: bool,
}

/// For one qubit every axis orthogonal to B attains F = |B|². The planar
/// representative is the in-plane axis orthogonal to (B₁, B₂), or ŷ when
/// that projection vanishes.
pub fn optimal_directions_single_qubit(bloch: &BlochVector) -> SingleQubitDirections {
    let proj = (bloch.b1 * bloch.b1 + bloch.b2 * bloch.b2).sqrt();
    let planar = if proj > 1e-15 { Direction { n1: -bloch.b2 / proj, n2: bloch.b1 / proj, n3: 0.0 } } else { Direction::Y };
    SingleQubitDirections { planar, axial: Direction::Z, degenerate: bloch.norm() == 0.0 }
}

/// Cramér–Rao variance bound with comparisons against the standard quantum
/// limit and the Heisenberg limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub f_value: f64,
    pub nu: u32,
    pub delta_phi_sq: f64,
    /// F/N > 1.
    pub beats_sql: bool,
    /// F/N equals N (to 1e-9 relative).
    pub heisenberg: bool,
}

/// (Δφ)² = 1/(ν F) for total Fisher information `f` of `n_qubits` probes.
pub fn phase_variance(f: f64, nu: u32, n_qubits: usize) -> Result<PhaseEstimate> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::UndefinedVariance { fisher: f });
    }
    if nu == 0 || n_qubits == 0 {
        return Err(Error::Contract("repetitions and qubit count must be positive"));
    }
    let n = n_qubits as f64;
    let mean = f / n;
    Ok(PhaseEstimate {
        f_value: f,
        nu,
        delta_phi_sq: 1.0 / (nu as f64 * f),
        beats_sql: mean > 1.0,
        heisenberg: (mean - n).abs() <= 1e-9 * n,
    })
}

/// F̄_max > 1 certifies entanglement.
pub fn entanglement_witness(f_mean: f64) -> bool {
    f_mean > 1.0
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;
    use crate::channel::{bloch_evolve, coefficients};
    use crate::state::{sigma_x, sigma_y, sigma_z};
    use core::f64::consts::FRAC_PI_2;

    fn half_paulis() -> [CMatrix; 3] {
        let h = C64::new(0.5, 0.0);
        [sigma_x() * h, sigma_y() * h, sigma_z() * h]
    }

    #[test]
    fn maximally_mixed_has_zero_qfi() {
        let r = f_max(&DensityMatrix::maximally_mixed(2).unwrap(), &half_paulis()).unwrap();
        assert!(r.c_matrix.iter().flatten().all(|x| *x == 0.0));
        assert_eq!(r.f_max, 0.0);
        assert_eq!(r.branch, Branch::Degenerate);
    }

    #[test]
    fn single_qubit_c_matrix_closed_form() {
        let b = BlochVector { b1: 0.3, b2: -0.2, b3: 0.5 };
        let c = c_matrix(&b.to_density(), &half_paulis()).unwrap();
        let v = b.as_array();
        let nb = b.norm_sqr();
        for k in 0..3 {
            for l in 0..3 {
                let expect = if k == l { nb } else { 0.0 } - v[k] * v[l];
                assert!((c[k][l] - expect).abs() < 1e-12, "{k}{l}");
            }
        }
    }

    #[test]
    fn single_qubit_report_is_planar_off_equator() {
        let b = BlochVector { b1: 0.3, b2: -0.2, b3: 0.5 };
        let r = f_max(&b.to_density(), &half_paulis()).unwrap();
        assert!((r.f_max - b.norm_sqr()).abs() < 1e-12);
        assert_eq!(r.branch, Branch::Planar);
        assert!(r.optimal_direction.n3.abs() < 1e-12);
        assert!((r.along(&r.optimal_direction) - r.f_max).abs() < 1e-12);
    }

    #[test]
    fn equator_state_is_degenerate() {
        let b = BlochVector { b1: 0.6, b2: 0.0, b3: 0.0 };
        let r = f_max(&b.to_density(), &half_paulis()).unwrap();
        assert_eq!(r.branch, Branch::Degenerate);
        assert_eq!(r.optimal_direction, Direction::Z);
    }

    #[test]
    fn closed_form_fmax_matches_bloch_norm() {
        let co = coefficients(0.4, 0.9, 0.3, 0.7, 1.0).unwrap();
        for th in [0.0, 0.3, FRAC_PI_2, 2.9] {
            let b = bloch_evolve(th, 0.7, &co, 1.0);
            assert!((single_qubit_fmax(th, &co) - b.norm_sqr()).abs() < 1e-12);
        }
        let id = ChannelCoefficients::identity(0.0);
        assert!((single_qubit_fmax(1.234, &id) - 1.0).abs() < 1e-15);
        assert!((average_fmax(&id) - 1.0).abs() < 1e-15);
        let equal = coefficients(0.6, 0.6, 0.0, 0.0, 1.0).unwrap();
        assert!((average_fmax(&equal) - (-1.2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn planar_representative_conventions() {
        let along_z = optimal_directions_single_qubit(&BlochVector { b1: 0.0, b2: 0.0, b3: 0.4 });
        assert_eq!(along_z.planar, Direction::Y);
        let along_x = optimal_directions_single_qubit(&BlochVector { b1: 0.5, b2: 0.0, b3: 0.0 });
        assert_eq!(along_x.planar, Direction::Y);
        assert!(optimal_directions_single_qubit(&BlochVector { b1: 0.0, b2: 0.0, b3: 0.0 }).degenerate);
    }

    #[test]
    fn phase_variance_arithmetic() {
        let p = phase_variance(25.0, 1, 5).unwrap();
        assert!((p.delta_phi_sq - 0.04).abs() < 1e-15);
        assert!(p.beats_sql && p.heisenberg);
        let sql = phase_variance(5.0, 1, 5).unwrap();
        assert!((sql.delta_phi_sq - 0.2).abs() < 1e-15);
        assert!(!sql.beats_sql && !sql.heisenberg);
        let four = phase_variance(5.0, 4, 5).unwrap();
        assert!((four.delta_phi_sq * 4.0 - sql.delta_phi_sq).abs() < 1e-15);
        assert!(matches!(phase_variance(0.0, 1, 1), Err(Error::UndefinedVariance { .. })));
        assert!(phase_variance(-1.0, 1, 1).is_err());
    }

    #[test]
    fn witness_is_strict() {
        assert!(entanglement_witness(5.0));
        assert!(!entanglement_witness(1.0));
    }

    #[test]
    fn direction_normalises_and_fixes_sign() {
        let d = Direction::new([0.0, -3.0, 4.0]).unwrap();
        assert!((d.n2 - 0.6).abs() < 1e-15 && (d.n3 + 0.8).abs() < 1e-15);
        assert!(Direction::new([0.0; 3]).is_err());
    }

    #[test]
    fn generator_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(c_matrix(&rho, &half_paulis()).is_err());
    }
}
