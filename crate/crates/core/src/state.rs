//! Density matrices and single-qubit operators.
//!
//! Basis convention: index 0 is the excited state |1⟩ and index 1 the
//! ground state |0⟩, so σ_z = diag(1, −1) and σ₊ = |1⟩⟨0| sits at (0, 1).
//! Multi-qubit indices are big-endian: qubit 0 is the most significant bit.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Trace and Hermiticity tolerance used when validating inputs.
pub const STATE_TOLERANCE: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Raising operator |1⟩⟨0|.
pub fn sigma_plus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// Lowering operator |0⟩⟨1|.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues (ascending) and eigenvectors (columns, same order) of a
/// Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    if values.iter().any(|v| !v.is_finite()) || vectors.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Eigen);
    }
    Ok((values, vectors))
}

/// Hermitian, unit-trace matrix. Positivity is not enforced: dynamics with
/// negative rates can push eigenvalues slightly below zero, and that is
/// monitored rather than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Contract("density matrix must be square and non-empty"));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain { what: "density matrix has non-finite entries", value: f64::NAN });
        }
        let herm = hermiticity_error(&m);
        if herm > STATE_TOLERANCE {
            return Err(Error::Domain { what: "density matrix is not Hermitian", value: herm });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::Domain { what: "density matrix trace differs from 1", value: tr.re });
        }
        Ok(DensityMatrix { m })
    }

    // For maps already known to preserve trace and Hermiticity.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        DensityMatrix { m }
    }

    /// |ψ⟩⟨ψ| for a normalised vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::Domain { what: "state vector is not normalised", value: norm });
        }
        let n = psi.len();
        Ok(DensityMatrix { m: CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()) })
    }

    /// Pure qubit state cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|0⟩, whose Bloch vector
    /// is (sinθ cosφ, sinθ sinφ, cosθ).
    pub fn qubit(theta: f64, varphi: f64) -> Self {
        let (half_s, half_c) = (0.5 * theta).sin_cos();
        let psi = [C64::new(half_c, 0.0), C64::from_polar(half_s, varphi)];
        DensityMatrix { m: CMatrix::from_fn(2, 2, |i, j| psi[i] * psi[j].conj()) }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Contract("dimension must be positive"));
        }
        let p = C64::new(1.0 / dim as f64, 0.0);
        Ok(DensityMatrix { m: CMatrix::from_diagonal_element(dim, dim, p) })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn qubit_count(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.m)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.m)?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// ⟨A⟩ = Tr(ρA).
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.m[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// Reduced state of one qubit (trace over all others).
    pub fn reduced_qubit(&self, qubit: usize) -> Result<DensityMatrix> {
        let n = self.qubit_count().ok_or(Error::Contract("dimension is not a power of two"))?;
        if qubit >= n {
            return Err(Error::Contract("qubit index out of range"));
        }
        let mask = 1usize << (n - 1 - qubit);
        let mut out = CMatrix::zeros(2, 2);
        for r in 0..self.dim() {
            let rb = usize::from(r & mask != 0);
            let partner = r & !mask;
            for cb in 0..2 {
                let c = partner | if cb == 1 { mask } else { 0 };
                out[(rb, cb)] += self.m[(r, c)];
            }
        }
        Ok(DensityMatrix { m: out })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn pauli_algebra() {
        let c = commutator(&sigma_x(), &sigma_y());
        let expect = sigma_z() * C64::new(0.0, 2.0);
        assert!((c - expect).norm() < 1e-15);
        assert!((sigma_plus() + sigma_minus() - sigma_x()).norm() < 1e-15);
        // σ₊ raises |0⟩ (index 1) to |1⟩ (index 0)
        assert_eq!(sigma_plus()[(0, 1)], ONE);
    }

    #[test]
    fn qubit_state_has_expected_bloch_vector() {
        let (th, ph) = (1.1, 2.3);
        let rho = DensityMatrix::qubit(th, ph);
        let bx = rho.expectation(&sigma_x()).re;
        let by = rho.expectation(&sigma_y()).re;
        let bz = rho.expectation(&sigma_z()).re;
        assert!((bx - th.sin() * ph.cos()).abs() < 1e-14);
        assert!((by - th.sin() * ph.sin()).abs() < 1e-14);
        assert!((bz - th.cos()).abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let bad_trace = CMatrix::from_diagonal_element(2, 2, ONE);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let mut non_herm = CMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        non_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        for v in rho.eigenvalues().unwrap() {
            assert!((v - 0.25).abs() < 1e-14);
        }
        assert!((rho.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn reduced_state_of_product() {
        let a = DensityMatrix::qubit(0.4, 0.2);
        let b = DensityMatrix::qubit(2.0, -1.0);
        let ab = DensityMatrix::new(a.matrix().kronecker(b.matrix())).unwrap();
        assert!(ab.reduced_qubit(0).unwrap().max_abs_diff(&a) < 1e-14);
        assert!(ab.reduced_qubit(1).unwrap().max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let rho = DensityMatrix::qubit(0.7, 0.3);
        let mixed = DensityMatrix::new(
            rho.matrix() * C64::new(0.6, 0.0) + DensityMatrix::maximally_mixed(2).unwrap().matrix() * C64::new(0.4, 0.0),
        )
        .unwrap();
        let (vals, vecs) = hermitian_eigen(mixed.matrix()).unwrap();
        assert!(vals[0] <= vals[1]);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(2, vals.iter().map(|v| C64::new(*v, 0.0))));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - mixed.matrix()).norm() < 1e-13);
    }
}
