//! Memory kernels, the analytic single-qubit map they define, and an
//! independent master-equation integrator used as its oracle.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{rate_sample, BathParams, RateSample, RateTable};
use crate::error::{Error, Result};
use crate::numeric::cumulative::{cumulative_simpson, richardson_estimate};
use crate::numeric::hermite;
use crate::numeric::ode::{dopri5, OdeOptions};
use crate::state::{sigma_minus, sigma_plus, sigma_z, CMatrix, DensityMatrix, C64, ONE};

/// Cumulative-integration error above which a table carries a warning.
pub const KERNEL_TOLERANCE: f64 = 1e-8;

/// Most negative Choi eigenvalue tolerated before a positivity warning.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// Map coefficients at one time point, together with the kernels they
/// were built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCoefficients {
    pub t: f64,
    pub big_gamma: f64,
    pub big_lambda: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub c: C64,
}

impl ChannelCoefficients {
    pub fn identity(t: f64) -> Self {
        ChannelCoefficients { t, big_gamma: 0.0, big_lambda: 0.0, delta: 0.0, a: 1.0, b: 0.0, c: ONE }
    }

    /// Smallest eigenvalue of the Choi matrix; negative means the map is not
    /// completely positive at this instant.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let (p, q) = (self.a, 1.0 - self.b);
        let mid = 0.5 * (p + q);
        let rad = (0.25 * (p - q) * (p - q) + self.c.norm_sqr()).sqrt();
        (1.0 - self.a).min(self.b).min(mid - rad)
    }
}

/// a = ½[(1+δe^{−Γ}) + e^{−Γ}], b = ½[(1+δe^{−Γ}) − e^{−Γ}], c = e^{−Λ−iω₀t}.
pub fn coefficients(big_gamma: f64, big_lambda: f64, delta: f64, t: f64, omega_0: f64) -> Result<ChannelCoefficients> {
    for (what, v) in [
        ("kernel Gamma is not finite", big_gamma),
        ("kernel Lambda is not finite", big_lambda),
        ("kernel delta is not finite", delta),
        ("time is not finite", t),
    ] {
        if !v.is_finite() {
            return Err(Error::Domain { what, value: v });
        }
    }
    let decay = (-big_gamma).exp();
    let bias = 1.0 + delta * decay;
    Ok(ChannelCoefficients {
        t,
        big_gamma,
        big_lambda,
        delta,
        a: 0.5 * (bias + decay),
        b: 0.5 * (bias - decay),
        c: C64::from_polar((-big_lambda).exp(), -omega_0 * t),
    })
}

/// Time derivatives of Γ, Λ, δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDerivatives {
    pub d_gamma: f64,
    pub d_lambda: f64,
    pub d_delta: f64,
}

impl KernelDerivatives {
    fn at_node(r: &RateSample, big_gamma: f64) -> Self {
        let d_gamma = r.gamma_plus + r.gamma_minus;
        KernelDerivatives { d_gamma, d_lambda: 0.5 * d_gamma + 2.0 * r.gamma_z, d_delta: big_gamma.exp() * (r.gamma_plus - r.gamma_minus) }
    }
}

/// Non-fatal numerical diagnostics attached to a channel table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Warning {
    /// Richardson estimate of a cumulative kernel exceeds [`KERNEL_TOLERANCE`].
    CoarseGrid { kernel: &'static str, estimate: f64 },
    /// First grid time where the map stops being completely positive.
    Positivity { t: f64, min_eigenvalue: f64 },
}

/// Kernels and coefficients on the grid of a rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTable {
    params: BathParams,
    grid: Vec<f64>,
    rates: Vec<RateSample>,
    coeffs: Vec<ChannelCoefficients>,
    derivs: Vec<KernelDerivatives>,
    warnings: Vec<Warning>,
}

/// Integrates the rates into Γ, Λ, δ (Simpson-type cumulative rule) and
/// builds the map coefficients at every grid point.
pub fn accumulate_kernels(rates: &RateTable) -> Result<ChannelTable> {
    let h = rates.step();
    let samples = rates.samples();
    let params = *rates.params();

    let sum_rates: Vec<f64> = samples.iter().map(|r| r.gamma_plus + r.gamma_minus).collect();
    let dephasing: Vec<f64> = samples.iter().map(|r| r.gamma_z).collect();
    let big_gamma = cumulative_simpson(&sum_rates, h);
    let z_integral = cumulative_simpson(&dephasing, h);
    let bias_rate: Vec<f64> = samples.iter().zip(&big_gamma).map(|(r, g)| g.exp() * (r.gamma_plus - r.gamma_minus)).collect();
    let delta = cumulative_simpson(&bias_rate, h);

    let mut warnings = Vec::new();
    for (kernel, values, cumul) in
        [("Gamma", &sum_rates, &big_gamma), ("gamma_z integral", &dephasing, &z_integral), ("delta", &bias_rate, &delta)]
    {
        let estimate = richardson_estimate(values, h, cumul);
        if estimate > KERNEL_TOLERANCE {
            warnings.push(Warning::CoarseGrid { kernel, estimate });
        }
    }

    let mut coeffs = Vec::with_capacity(samples.len());
    let mut derivs = Vec::with_capacity(samples.len());
    for (i, (t, r)) in rates.grid().iter().zip(samples).enumerate() {
        let lambda = 0.5 * big_gamma[i] + 2.0 * z_integral[i];
        let co = coefficients(big_gamma[i], lambda, delta[i], *t, params.omega_0)?;
        if !warnings.iter().any(|w| matches!(w, Warning::Positivity { .. })) {
            let m = co.choi_min_eigenvalue();
            if m < -POSITIVITY_TOLERANCE {
                warnings.push(Warning::Positivity { t: *t, min_eigenvalue: m });
            }
        }
        coeffs.push(co);
        derivs.push(KernelDerivatives::at_node(r, big_gamma[i]));
    }

    Ok(ChannelTable { params, grid: rates.grid().to_vec(), rates: samples.to_vec(), coeffs, derivs, warnings })
}

impl ChannelTable {
    pub fn params(&self) -> &BathParams {
        &self.params
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn rates(&self) -> &[RateSample] {
        &self.rates
    }

    pub fn coeffs(&self) -> &[ChannelCoefficients] {
        &self.coeffs
    }

    /// Exact kernel derivatives at the grid nodes.
    pub fn derivatives(&self) -> &[KernelDerivatives] {
        &self.derivs
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn t_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let t_max = self.t_max();
        if !(t >= 0.0 && t <= t_max * (1.0 + 1e-12)) {
            return Err(Error::Domain { what: "time outside the channel table", value: t });
        }
        let i = (t / self.step()).floor() as usize;
        Ok(i.min(self.grid.len() - 2))
    }

    /// Γ, Λ, δ and their derivatives at an arbitrary time, by cubic
    /// Hermite interpolation using the exact node derivatives. Grid nodes
    /// are reproduced exactly.
    pub fn kernels_at(&self, t: f64) -> Result<(ChannelCoefficients, KernelDerivatives)> {
        let i = self.locate(t)?;
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let (c0, c1) = (&self.coeffs[i], &self.coeffs[i + 1]);
        let (d0, d1) = (&self.derivs[i], &self.derivs[i + 1]);
        let (g, dg) = hermite(x0, x1, c0.big_gamma, c1.big_gamma, d0.d_gamma, d1.d_gamma, t);
        let (l, dl) = hermite(x0, x1, c0.big_lambda, c1.big_lambda, d0.d_lambda, d1.d_lambda, t);
        let (d, dd) = hermite(x0, x1, c0.delta, c1.delta, d0.d_delta, d1.d_delta, t);
        let co = coefficients(g, l, d, t, self.params.omega_0)?;
        Ok((co, KernelDerivatives { d_gamma: dg, d_lambda: dl, d_delta: dd }))
    }

    pub fn coefficients_at(&self, t: f64) -> Result<ChannelCoefficients> {
        Ok(self.kernels_at(t)?.0)
    }
}

/// Applies the map: ρ₁₁ → (a−b)ρ₁₁ + b, ρ₁₀ → cρ₁₀, ρ₀₁ → c*ρ₀₁.
pub fn apply_single_qubit(rho0: &DensityMatrix, coeffs: &ChannelCoefficients) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(Error::Contract("single-qubit map needs a 2x2 density matrix"));
    }
    let tr = rho0.trace();
    if (tr.re - 1.0).abs() > crate::state::STATE_TOLERANCE || tr.im.abs() > crate::state::STATE_TOLERANCE {
        return Err(Error::Domain { what: "input trace differs from 1", value: tr.re });
    }
    let excited = (coeffs.a - coeffs.b) * rho0.get(0, 0).re + coeffs.b;
    let coherence = coeffs.c * rho0.get(0, 1);
    let m = CMatrix::from_row_slice(2, 2, &[C64::new(excited, 0.0), coherence, coherence.conj(), C64::new(1.0 - excited, 0.0)]);
    Ok(DensityMatrix::from_trusted(m))
}

/// Real Bloch vector of a qubit state, ρ = ½(I + B·σ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl BlochVector {
    pub fn from_angles(theta: f64, varphi: f64) -> Self {
        BlochVector { b1: theta.sin() * varphi.cos(), b2: theta.sin() * varphi.sin(), b3: theta.cos() }
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::Contract("Bloch vector needs a 2x2 density matrix"));
        }
        let off = rho.get(0, 1);
        Ok(BlochVector { b1: 2.0 * off.re, b2: -2.0 * off.im, b3: (rho.get(0, 0) - rho.get(1, 1)).re })
    }

    pub fn to_density(&self) -> DensityMatrix {
        let half = 0.5;
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(half * (1.0 + self.b3), 0.0),
                C64::new(half * self.b1, -half * self.b2),
                C64::new(half * self.b1, half * self.b2),
                C64::new(half * (1.0 - self.b3), 0.0),
            ],
        );
        DensityMatrix::from_trusted(m)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.b1, self.b2, self.b3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.b1 * self.b1 + self.b2 * self.b2 + self.b3 * self.b3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Polar angle α and azimuth β of the vector.
    pub fn angles(&self) -> (f64, f64) {
        let r = self.norm();
        if r == 0.0 {
            return (0.0, 0.0);
        }
        ((self.b3 / r).clamp(-1.0, 1.0).acos(), self.b2.atan2(self.b1))
    }
}

/// Bloch vector at time `coeffs.t` for the pure initial state with angles
/// (θ, φ): B₁ + iB₂ = e^{−Λ} sinθ e^{i(ω₀t+φ)}, B₃ = e^{−Γ}(cosθ + δ).
pub fn bloch_evolve(theta: f64, varphi: f64, coeffs: &ChannelCoefficients, omega_0: f64) -> BlochVector {
    let radial = (-coeffs.big_lambda).exp() * theta.sin();
    let phase = omega_0 * coeffs.t + varphi;
    BlochVector { b1: radial * phase.cos(), b2: radial * phase.sin(), b3: (-coeffs.big_gamma).exp() * (theta.cos() + coeffs.delta) }
}

/// True when |a + b − 1| < tol and |(a − b) − c| < tol.
pub fn is_depolarizing(coeffs: &ChannelCoefficients, tol: f64) -> bool {
    (coeffs.a + coeffs.b - 1.0).abs() < tol && (C64::new(coeffs.a - coeffs.b, 0.0) - coeffs.c).norm() < tol
}

// Lindblad generator with σ_z, σ₊, σ₋ dissipators; state packed as
// [Re ρ00, Im ρ00, Re ρ01, ...] row-major.
struct Lindblad {
    hamiltonian: CMatrix,
    jumps: [CMatrix; 3],
    jump_products: [CMatrix; 3],
}

impl Lindblad {
    fn new(omega_0: f64) -> Self {
        let jumps = [sigma_z(), sigma_plus(), sigma_minus()];
        let jump_products = [jumps[0].adjoint() * &jumps[0], jumps[1].adjoint() * &jumps[1], jumps[2].adjoint() * &jumps[2]];
        Lindblad { hamiltonian: sigma_z() * C64::new(0.5 * omega_0, 0.0), jumps, jump_products }
    }

    fn apply(&self, rates: [f64; 3], rho: &CMatrix) -> CMatrix {
        let minus_i = C64::new(0.0, -1.0);
        let mut out = (&self.hamiltonian * rho - rho * &self.hamiltonian) * minus_i;
        for k in 0..3 {
            let (l, ll) = (&self.jumps[k], &self.jump_products[k]);
            let d = l * rho * l.adjoint() - (ll * rho + rho * ll) * C64::new(0.5, 0.0);
            out += d * C64::new(rates[k], 0.0);
        }
        out
    }
}

fn pack(m: &CMatrix, out: &mut [f64]) {
    for (k, z) in m.transpose().iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

fn unpack(y: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(2, 2, (0..4).map(|k| C64::new(y[2 * k], y[2 * k + 1])))
}

/// Integrates the time-local master equation
/// dρ/dt = −i[ω₀σ_z/2, ρ] + Σ_m γ_m(t) D[σ_m]ρ, m ∈ {z, +, −},
/// for several initial states at once, evaluating the rates by quadrature
/// at every stage. Returns one trajectory per initial state, sampled at
/// `times` (non-decreasing, starting at or after 0).
pub fn ode_oracle_batch(
    params: &BathParams,
    initial: &[DensityMatrix],
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<DensityMatrix>>> {
    params.validate()?;
    if initial.iter().any(|r| r.dim() != 2) {
        return Err(Error::Contract("master-equation oracle needs 2x2 density matrices"));
    }
    let generator = Lindblad::new(params.omega_0);
    let mut y0 = vec![0.0; 8 * initial.len()];
    for (k, rho) in initial.iter().enumerate() {
        pack(rho.matrix(), &mut y0[8 * k..8 * k + 8]);
    }
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let r = rate_sample(t, params)?;
        let rates = [r.gamma_z, r.gamma_plus, r.gamma_minus];
        for (block, out) in y.chunks(8).zip(dy.chunks_mut(8)) {
            pack(&generator.apply(rates, &unpack(block)), out);
        }
        Ok(())
    };
    let states = dopri5(rhs, 0.0, &y0, times, opts)?;
    let mut out: Vec<Vec<DensityMatrix>> = (0..initial.len()).map(|_| Vec::with_capacity(times.len())).collect();
    for y in &states {
        for (k, traj) in out.iter_mut().enumerate() {
            traj.push(DensityMatrix::from_trusted(unpack(&y[8 * k..8 * k + 8])));
        }
    }
    Ok(out)
}

/// Single-state form of [`ode_oracle_batch`].
pub fn ode_oracle(params: &BathParams, rho0: &DensityMatrix, times: &[f64], opts: &OdeOptions) -> Result<Vec<DensityMatrix>> {
    let mut all = ode_oracle_batch(params, core::slice::from_ref(rho0), times, opts)?;
    Ok(all.pop().unwrap_or_default())
}
