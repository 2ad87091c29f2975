//! N qubits, each coupled to its own copy of the bath.
//!
//! The evolved GHZ state is diagonal in the computational basis apart from
//! one coherence between |1…1⟩ and |0…0⟩:
//!
//! ```text
//! ρ = Σ_s D(k_s)|s⟩⟨s| + ½c^N |1…1⟩⟨0…0| + h.c.,
//! D(k) = ½[a^k (1−a)^{N−k} + b^k (1−b)^{N−k}]
//! ```
//!
//! with k_s the number of excited qubits in the string s. Its spectrum is
//! therefore known up to a 2×2 block, and the C-matrix sums collapse to
//! binomially weighted sums over k. That is the fast path; the dense path
//! builds the 2^N matrices and runs the generic engine.

#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::{apply_single_qubit, BlochVector, ChannelCoefficients};
use crate::error::{Error, Result};
use crate::qfi::{f_max, report_from_c, CMatrix3, QfiReport, EPS_PAIR};
use crate::state::{CMatrix, DensityMatrix, C64, I, ONE, ZERO};

/// Largest N for which 2^N × 2^N matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest N accepted by [`collective_qfi_fast`]; binomial weights overflow
/// f64 shortly beyond it.
pub const MAX_FAST_QUBITS: usize = 1000;

/// Initial-state families with a structured fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputFamily {
    /// (|1…1⟩ + |0…0⟩)/√2
    Ghz,
    /// ⊗ (|1⟩ + |0⟩)/√2
    Product,
}

impl InputFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputFamily::Ghz => "ghz",
            InputFamily::Product => "product",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiQubitState {
    pub n_qubits: usize,
    pub rho: DensityMatrix,
}

fn check_dense(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Contract("at least one qubit is required"));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Resource { requested: n, max: MAX_DENSE_QUBITS });
    }
    Ok(())
}

/// J_k = ½ Σ_i σ_k^{(i)} on N qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveGenerators {
    pub j: [CMatrix; 3],
}

impl CollectiveGenerators {
    pub fn new(n: usize) -> Result<Self> {
        check_dense(n)?;
        let dim = 1usize << n;
        let mut jx = CMatrix::zeros(dim, dim);
        let mut jy = CMatrix::zeros(dim, dim);
        let mut jz = CMatrix::zeros(dim, dim);
        let half = C64::new(0.5, 0.0);
        for col in 0..dim {
            for q in 0..n {
                let mask = 1usize << (n - 1 - q);
                let row = col ^ mask;
                let ground = col & mask != 0;
                jx[(row, col)] += half;
                // ⟨1|σ_y|0⟩ = −i, ⟨0|σ_y|1⟩ = i
                jy[(row, col)] += if ground { -I * half } else { I * half };
                jz[(col, col)] += if ground { -half } else { half };
            }
        }
        Ok(CollectiveGenerators { j: [jx, jy, jz] })
    }
}

pub fn ghz_state(n: usize) -> Result<MultiQubitState> {
    check_dense(n)?;
    let dim = 1usize << n;
    let mut rho = CMatrix::zeros(dim, dim);
    let half = C64::new(0.5, 0.0);
    for &r in &[0, dim - 1] {
        for &c in &[0, dim - 1] {
            rho[(r, c)] = half;
        }
    }
    Ok(MultiQubitState { n_qubits: n, rho: DensityMatrix::from_trusted(rho) })
}

pub fn product_plus_state(n: usize) -> Result<MultiQubitState> {
    check_dense(n)?;
    let dim = 1usize << n;
    let p = C64::new(1.0 / dim as f64, 0.0);
    Ok(MultiQubitState { n_qubits: n, rho: DensityMatrix::from_trusted(CMatrix::from_element(dim, dim, p)) })
}

pub fn initial_state(family: InputFamily, n: usize) -> Result<MultiQubitState> {
    match family {
        InputFamily::Ghz => ghz_state(n),
        InputFamily::Product => product_plus_state(n),
    }
}

// Population of a string with k excited qubits, for initial population
// p of each qubit in |1⟩⟨1|.
fn string_weight(p: f64, k: usize, n: usize) -> f64 {
    p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

fn ghz_diagonal(a: f64, b: f64, k: usize, n: usize) -> f64 {
    0.5 * (string_weight(a, k, n) + string_weight(b, k, n))
}

fn kron_power(m: &CMatrix, n: usize) -> CMatrix {
    match n {
        0 => CMatrix::from_element(1, 1, ONE),
        1 => m.clone(),
        _ => {
            let half = kron_power(m, n / 2);
            let sq = half.kronecker(&half);
            if n % 2 == 1 {
                sq.kronecker(m)
            } else {
                sq
            }
        }
    }
}

/// State after every qubit has passed through the channel: for GHZ, half
/// the sum of the four tensor powers ⊗ε(|i⟩⟨j|); for the product input,
/// the tensor power of ε(|+⟩⟨+|).
pub fn evolve_local(family: InputFamily, n: usize, coeffs: &ChannelCoefficients) -> Result<MultiQubitState> {
    check_dense(n)?;
    let dim = 1usize << n;
    let rho = match family {
        InputFamily::Ghz => {
            let mut m = CMatrix::zeros(dim, dim);
            for s in 0..dim {
                let excited = n - s.count_ones() as usize;
                m[(s, s)] = C64::new(ghz_diagonal(coeffs.a, coeffs.b, excited, n), 0.0);
            }
            let coherence = coeffs.c.powu(n as u32) * 0.5;
            m[(0, dim - 1)] += coherence;
            m[(dim - 1, 0)] += coherence.conj();
            m
        }
        InputFamily::Product => {
            let single = apply_single_qubit(&DensityMatrix::qubit(core::f64::consts::FRAC_PI_2, 0.0), coeffs)?;
            kron_power(single.matrix(), n)
        }
    };
    Ok(MultiQubitState { n_qubits: n, rho: DensityMatrix::from_trusted(rho) })
}

/// Dense collective QFI: builds the generators and runs the generic engine.
pub fn collective_qfi(state: &MultiQubitState) -> Result<QfiReport> {
    let gens = CollectiveGenerators::new(state.n_qubits)?;
    let mut report = f_max(&state.rho, &gens.j)?;
    report.n_qubits = state.n_qubits;
    report.f_mean = report.f_max / state.n_qubits as f64;
    Ok(report)
}

fn pair_weight(x: f64, y: f64) -> f64 {
    let sum = x + y;
    if sum < EPS_PAIR {
        return 0.0;
    }
    (x - y) * (x - y) / sum
}

// Adds the contribution of one unordered eigenpair with matrix elements
// A_k = ⟨i|J_k|j⟩: both orderings together give 4 w Re(A_k conj(A_l)).
fn add_pair(c: &mut CMatrix3, w: f64, amp: &[C64; 3], multiplicity: f64) {
    if w == 0.0 {
        return;
    }
    for k in 0..3 {
        for l in 0..3 {
            c[k][l] += multiplicity * 4.0 * w * (amp[k] * amp[l].conj()).re;
        }
    }
}

// Eigenpairs of [[p, q], [q*, r]] with eigenvectors (u, v), larger first.
fn block_eigen(p: f64, r: f64, q: C64) -> [(f64, C64, C64); 2] {
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    let (hi, lo) = (mean + rad, mean - rad);
    // (M − λ)x = 0 has solutions (q, λ − p) and (λ − r, q*); keep the better conditioned
    let first = (q, C64::new(hi - p, 0.0));
    let second = (C64::new(hi - r, 0.0), q.conj());
    let n1 = first.0.norm_sqr() + first.1.norm_sqr();
    let n2 = second.0.norm_sqr() + second.1.norm_sqr();
    let (x, norm) = if n1 >= n2 { (first, n1) } else { (second, n2) };
    let (u, v) = if norm > 0.0 {
        let s = 1.0 / norm.sqrt();
        (x.0 * s, x.1 * s)
    } else {
        (ONE, ZERO)
    };
    [(hi, u, v), (lo, -v.conj(), u.conj())]
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn single_qubit_c(b: &BlochVector) -> CMatrix3 {
    let v = b.as_array();
    let nb = b.norm_sqr();
    let mut c = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            c[k][l] = if k == l { nb } else { 0.0 } - v[k] * v[l];
        }
    }
    c
}

/// Collective QFI without building 2^N matrices.
///
/// Product inputs use additivity, C = N·C₁. GHZ inputs use the block
/// structure above; the work is O(N).
pub fn collective_qfi_fast(family: InputFamily, n: usize, coeffs: &ChannelCoefficients) -> Result<QfiReport> {
    if n == 0 {
        return Err(Error::Contract("at least one qubit is required"));
    }
    if n > MAX_FAST_QUBITS {
        return Err(Error::Resource { requested: n, max: MAX_FAST_QUBITS });
    }
    let c = match family {
        InputFamily::Product => {
            let single = apply_single_qubit(&DensityMatrix::qubit(core::f64::consts::FRAC_PI_2, 0.0), coeffs)?;
            let c1 = single_qubit_c(&BlochVector::from_density(&single)?);
            let scale = n as f64;
            let mut c = [[0.0; 3]; 3];
            for k in 0..3 {
                for l in 0..3 {
                    c[k][l] = scale * c1[k][l];
                }
            }
            c
        }
        InputFamily::Ghz => ghz_c_matrix(n, coeffs),
    };
    report_from_c(c, n)
}

fn ghz_c_matrix(n: usize, coeffs: &ChannelCoefficients) -> CMatrix3 {
    let (a, b) = (coeffs.a, coeffs.b);
    let d = |k: usize| ghz_diagonal(a, b, k, n);
    let mut c = [[0.0; 3]; 3];
    let half = C64::new(0.5, 0.0);
    let nf = n as f64;

    // strings of weight k and k + 1 that are both outside the block
    for k in 1..n.saturating_sub(1) {
        let w = pair_weight(d(k), d(k + 1));
        let count = binomial(n, k) * (n - k) as f64;
        c[0][0] += count * w;
        c[1][1] += count * w;
    }

    let block = block_eigen(d(n), d(0), coeffs.c.powu(n as u32) * 0.5);

    // block eigenvectors against single-flip neighbours of |1…1⟩ and |0…0⟩
    for &(lambda, u, v) in &block {
        let (uc, vc) = (u.conj(), v.conj());
        if n == 2 {
            let amp = [half * (uc + vc), half * (-I * uc + I * vc), ZERO];
            add_pair(&mut c, pair_weight(lambda, d(1)), &amp, 2.0);
        } else if n >= 3 {
            let to_top = [half * uc, -I * half * uc, ZERO];
            add_pair(&mut c, pair_weight(lambda, d(n - 1)), &to_top, nf);
            let to_bottom = [half * vc, I * half * vc, ZERO];
            add_pair(&mut c, pair_weight(lambda, d(1)), &to_bottom, nf);
        }
    }

    // the two block eigenvectors against each other
    let [(l_hi, u_hi, v_hi), (l_lo, u_lo, v_lo)] = block;
    let z = C64::new(0.5 * nf, 0.0) * (u_hi.conj() * u_lo - v_hi.conj() * v_lo);
    let amp = if n == 1 {
        let x = u_hi.conj() * v_lo + v_hi.conj() * u_lo;
        let y = -I * u_hi.conj() * v_lo + I * v_hi.conj() * u_lo;
        [half * x, half * y, z]
    } else {
        [ZERO, ZERO, z]
    };
    add_pair(&mut c, pair_weight(l_hi, l_lo), &amp, 1.0);
    c
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;
    use crate::channel::coefficients;

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn generators_obey_su2() {
        for n in 1..=3 {
            let g = CollectiveGenerators::new(n).unwrap();
            let [x, y, z] = &g.j;
            assert!((commutator(x, y) - z * I).norm() < 1e-12);
            assert!((commutator(y, z) - x * I).norm() < 1e-12);
            assert!((commutator(z, x) - y * I).norm() < 1e-12);
        }
    }

    #[test]
    fn small_states() {
        let one = ghz_state(1).unwrap();
        assert_eq!(one, product_plus_state(1).unwrap());
        let two = ghz_state(2).unwrap();
        assert_eq!(two.rho.get(0, 3), C64::new(0.5, 0.0));
        assert_eq!(two.rho.get(1, 1), ZERO);
        for n in 1..=4 {
            assert!((ghz_state(n).unwrap().rho.purity() - 1.0).abs() < 1e-14);
        }
        assert!(matches!(ghz_state(13), Err(Error::Resource { .. })));
        assert!(ghz_state(0).is_err());
    }

    #[test]
    fn identity_channel_keeps_inputs() {
        let id = ChannelCoefficients::identity(0.0);
        for n in 1..=4 {
            for fam in [InputFamily::Ghz, InputFamily::Product] {
                let evolved = evolve_local(fam, n, &id).unwrap();
                assert!(evolved.rho.max_abs_diff(&initial_state(fam, n).unwrap().rho) < 1e-15);
            }
        }
    }

    #[test]
    fn initial_qfi_anchors() {
        let id = ChannelCoefficients::identity(0.0);
        for n in 1..=5 {
            let g = collective_qfi_fast(InputFamily::Ghz, n, &id).unwrap();
            assert!((g.f_max - (n * n) as f64).abs() < 1e-10, "n={n}: {}", g.f_max);
            let p = collective_qfi_fast(InputFamily::Product, n, &id).unwrap();
            assert!((p.f_max - n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn fast_matches_dense_small() {
        let co = coefficients(0.35, 0.5, 0.12, 0.9, 1.0).unwrap();
        for n in 1..=5 {
            for fam in [InputFamily::Ghz, InputFamily::Product] {
                let dense = collective_qfi(&evolve_local(fam, n, &co).unwrap()).unwrap();
                let fast = collective_qfi_fast(fam, n, &co).unwrap();
                for k in 0..3 {
                    for l in 0..3 {
                        assert!(
                            (dense.c_matrix[k][l] - fast.c_matrix[k][l]).abs() < 1e-10,
                            "{fam:?} n={n} C[{k}][{l}]: {} vs {}",
                            dense.c_matrix[k][l],
                            fast.c_matrix[k][l]
                        );
                    }
                }
                assert_eq!(dense.branch, fast.branch);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(8, 0), 1.0);
        assert_eq!(binomial(10, 7), 120.0);
    }

    #[test]
    fn fast_path_stays_finite_up_to_cap() {
        let co = coefficients(0.3, 0.4, 0.05, 1.0, 1.0).unwrap();
        let r = collective_qfi_fast(InputFamily::Ghz, MAX_FAST_QUBITS, &co).unwrap();
        assert!(r.f_max.is_finite() && r.f_max >= 0.0);
        assert!(matches!(collective_qfi_fast(InputFamily::Ghz, MAX_FAST_QUBITS + 1, &co), Err(Error::Resource { .. })));
    }
}
