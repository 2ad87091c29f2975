//! Structured bosonic bath: spectral density, thermal factors and the
//! time-dependent decay rates of the time-convolutionless master equation.
//!
//! Units: ħ = k_B = 1 and the tunnelling frequency ω₀ = 1, so times are in
//! 1/ω₀ and temperatures in ω₀. All three rates share the integrand shape
//!
//! ```text
//! ½ ω^{s-1} · α ω_c^{1-s} e^{-ω/ω_c} · K(ω, t)
//! ```
//!
//! where `K` is bounded at ω → 0. Factoring the power law out lets the
//! first panel be integrated after the substitution ω = ω₁ v^k, which
//! removes the endpoint singularity for every s > 0.

use alloc::vec::Vec;
use core::f64::consts::PI;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numeric::quadrature::{integrate, QuadOptions};
use crate::numeric::sinc;

/// Upper integration limit in units of the cutoff frequency.
pub const OMEGA_MAX_OVER_CUTOFF: f64 = 50.0;

/// Absolute tolerance targeted by the rate quadratures.
pub const RATE_TOLERANCE: f64 = 1e-10;

/// Physical configuration of the bath and qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    /// Spectral exponent: s < 1 sub-Ohmic, s = 1 Ohmic, s > 1 super-Ohmic.
    pub s: f64,
    /// Cutoff frequency in units of ω₀.
    pub omega_c: f64,
    /// Qubit frequency; fixed to 1 by the unit convention.
    pub omega_0: f64,
    pub temperature: f64,
    /// Dimensionless coupling prefactor of the spectral density.
    pub alpha: f64,
}

impl Default for BathParams {
    fn default() -> Self {
        BathParams { s: 3.0, omega_c: 10.0, omega_0: 1.0, temperature: 0.01, alpha: 0.1 }
    }
}

impl BathParams {
    pub fn new(s: f64, omega_c: f64, temperature: f64, alpha: f64) -> Result<Self> {
        let p = BathParams { s, omega_c, omega_0: 1.0, temperature, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::Domain { what: "bath exponent s must be positive", value: self.s });
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::Domain { what: "cutoff frequency must be positive", value: self.omega_c });
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Domain { what: "temperature must be non-negative", value: self.temperature });
        }
        // α = 0 is allowed: it switches the bath off and gives the identity channel.
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain { what: "coupling prefactor must be non-negative", value: self.alpha });
        }
        if self.omega_0 != 1.0 {
            return Err(Error::Domain { what: "omega_0 is the frequency unit and must equal 1", value: self.omega_0 });
        }
        Ok(())
    }

    pub fn with_s(self, s: f64) -> Self {
        BathParams { s, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        BathParams { alpha, ..self }
    }

    pub fn with_temperature(self, temperature: f64) -> Self {
        BathParams { temperature, ..self }
    }

    // J(ω)/ω^s
    fn envelope(&self, omega: f64) -> f64 {
        self.alpha * self.omega_c.powf(1.0 - self.s) * (-omega / self.omega_c).exp()
    }
}

/// J(ω) = α ω^s ω_c^{1-s} e^{-ω/ω_c}.
pub fn spectral_density(omega: f64, params: &BathParams) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain { what: "spectral density needs omega >= 0", value: omega });
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    Ok(omega.powf(params.s) * params.envelope(omega))
}

/// Bose–Einstein occupation n_T(ω) = 1/(e^{ω/T} − 1); zero at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain { what: "thermal occupation needs omega > 0", value: omega });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

// ω·coth(ω/2T), bounded as ω → 0 (limit 2T); equals ω at T = 0.
fn omega_coth(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return omega;
    }
    let x = omega / (2.0 * temperature);
    let x_coth_x = if x < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    };
    2.0 * temperature * x_coth_x
}

// ω·n_T(ω), bounded as ω → 0 (limit T); zero at T = 0.
fn omega_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    let y = omega / temperature;
    if y > 700.0 {
        return 0.0;
    }
    let y_over = if y < 1e-6 { 1.0 - 0.5 * y } else { y / y.exp_m1() };
    temperature * y_over
}

// sin(x t)/x written as t·sinc(x t), smooth through x = 0.
fn sine_kernel(x: f64, t: f64) -> f64 {
    t * sinc(x * t)
}

/// Which of the two transition rates γ₊ (absorption, |0⟩→|1⟩) or γ₋
/// (emission, |1⟩→|0⟩).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy)]
enum Rate {
    Dephasing,
    Transition(RateSign),
}

impl Rate {
    // Bounded factor K(ω, t); the full integrand is ½ ω^{s-1} envelope(ω) K.
    fn kernel(self, omega: f64, t: f64, p: &BathParams) -> f64 {
        match self {
            Rate::Dephasing => omega_coth(omega, p.temperature) * sine_kernel(omega, t),
            Rate::Transition(sign) => {
                let wn = omega_occupation(omega, p.temperature);
                let wn1 = wn + omega;
                let (first, second) = match sign {
                    RateSign::Plus => (omega + p.omega_0, omega - p.omega_0),
                    RateSign::Minus => (omega - p.omega_0, omega + p.omega_0),
                };
                wn1 * sine_kernel(first, t) + wn * sine_kernel(second, t)
            }
        }
    }
}

fn panel_breaks(t: f64, p: &BathParams, first: f64) -> Vec<f64> {
    let omega_max = OMEGA_MAX_OVER_CUTOFF * p.omega_c;
    let mut anchors: Vec<f64> = Vec::new();
    anchors.push(first);
    let mut push = |x: f64| {
        if x > first && x < omega_max {
            anchors.push(x);
        }
    };
    push(p.omega_0);
    let mut m = p.omega_c;
    while m < omega_max {
        push(m);
        m *= 2.0;
    }
    anchors.push(omega_max);
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();

    // panels no wider than two oscillation periods of the sine kernels
    let width = (4.0 * PI / t).min(p.omega_c).max(1e-3);
    let mut breaks = Vec::with_capacity(anchors.len() * 4);
    for w in anchors.windows(2) {
        let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for k in 0..pieces {
            breaks.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
        }
    }
    breaks.push(omega_max);
    breaks
}

fn rate_integral(rate: Rate, t: f64, p: &BathParams) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain { what: "rates need t >= 0", value: t });
    }
    p.validate()?;
    if t == 0.0 || p.alpha == 0.0 {
        return Ok(0.0);
    }
    // head and tail share the error budget
    let opts = QuadOptions { abs_tol: 0.5 * RATE_TOLERANCE, rel_tol: 0.0, max_intervals: 20_000 };
    let s = p.s;

    // [0, ω₁] via ω = ω₁ v^k: integrand becomes ½ k ω₁^s v^{ks-1} envelope K
    let omega_1 = 0.5 * p.omega_0.min(p.omega_c);
    let k = (2.0 / s).ceil().max(1.0);
    let power = k * s - 1.0;
    let head = integrate(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            let omega = omega_1 * v.powf(k);
            0.5 * k * omega_1.powf(s) * v.powf(power) * p.envelope(omega) * rate.kernel(omega, t, p)
        },
        &[0.0, 0.25, 0.5, 1.0],
        &opts,
    )?;

    let breaks = panel_breaks(t, p, omega_1);
    let tail = integrate(|omega| 0.5 * omega.powf(s - 1.0) * p.envelope(omega) * rate.kernel(omega, t, p), &breaks, &opts)?;
    let estimate = head.error + tail.error;
    if estimate > RATE_TOLERANCE {
        return Err(Error::Quadrature { estimate, tolerance: RATE_TOLERANCE });
    }
    Ok(head.value + tail.value)
}

/// Dephasing rate γ_z(t) = ½∫J(ω) coth(ω/2T) sin(ωt)/ω dω (coth → 1 at T = 0).
pub fn rate_gamma_z(t: f64, params: &BathParams) -> Result<f64> {
    rate_integral(Rate::Dephasing, t, params)
}

/// Transition rates
/// γ_± = ½∫J(ω)[(n_T+1) sin((ω±ω₀)t)/(ω±ω₀) + n_T sin((ω∓ω₀)t)/(ω∓ω₀)] dω.
pub fn rate_gamma_pm(t: f64, params: &BathParams, sign: RateSign) -> Result<f64> {
    rate_integral(Rate::Transition(sign), t, params)
}

/// All three rates at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub t: f64,
    pub gamma_z: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl RateSample {
    pub fn zero(t: f64) -> Self {
        RateSample { t, gamma_z: 0.0, gamma_plus: 0.0, gamma_minus: 0.0 }
    }
}

/// Samples γ_z, γ₊, γ₋ at `t`. A quadrature failure is reported together
/// with the offending time.
pub fn rate_sample(t: f64, params: &BathParams) -> Result<RateSample> {
    let at_t = |e: Error| match e {
        Error::Quadrature { estimate, tolerance } => Error::RateSample { t, estimate, tolerance },
        other => other,
    };
    Ok(RateSample {
        t,
        gamma_z: rate_gamma_z(t, params).map_err(at_t)?,
        gamma_plus: rate_gamma_pm(t, params, RateSign::Plus).map_err(at_t)?,
        gamma_minus: rate_gamma_pm(t, params, RateSign::Minus).map_err(at_t)?,
    })
}

/// Rates sampled on a uniform grid starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    params: BathParams,
    grid: Vec<f64>,
    samples: Vec<RateSample>,
}

/// The uniform grid used by [`build_rate_table`]. Nested grids
/// (`n` and `2n − 1` points) share their common nodes bit for bit.
pub fn uniform_grid(t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain { what: "t_max must be positive", value: t_max });
    }
    if n_points < 2 {
        return Err(Error::Domain { what: "a rate table needs at least two points", value: n_points as f64 });
    }
    let last = (n_points - 1) as f64;
    Ok((0..n_points).map(|i| t_max * (i as f64 / last)).collect())
}

pub fn build_rate_table(params: &BathParams, t_max: f64, n_points: usize) -> Result<RateTable> {
    params.validate()?;
    let grid = uniform_grid(t_max, n_points)?;
    let samples = grid.iter().map(|&t| rate_sample(t, params)).collect::<Result<Vec<_>>>()?;
    RateTable::from_samples(*params, grid, samples)
}

impl RateTable {
    /// Assembles a table from externally computed samples (for example a
    /// parallel sweep). The grid must start at 0, increase strictly and be
    /// uniform, and each sample must sit on its grid point.
    pub fn from_samples(params: BathParams, grid: Vec<f64>, samples: Vec<RateSample>) -> Result<Self> {
        params.validate()?;
        if grid.len() < 2 || grid.len() != samples.len() {
            return Err(Error::Contract("rate table needs matching grid and samples with at least two points"));
        }
        if grid[0] != 0.0 {
            return Err(Error::Contract("rate table grid must start at t = 0"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("rate table grid must increase strictly"));
        }
        let h = grid[1] - grid[0];
        if grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
            return Err(Error::Contract("rate table grid must be uniform"));
        }
        for (t, r) in grid.iter().zip(&samples) {
            if *t != r.t {
                return Err(Error::Contract("rate sample time does not match its grid point"));
            }
            if !(r.gamma_z.is_finite() && r.gamma_plus.is_finite() && r.gamma_minus.is_finite()) {
                return Err(Error::Domain { what: "non-finite rate", value: r.t });
            }
        }
        Ok(RateTable { params, grid, samples })
    }

    pub fn params(&self) -> &BathParams {
        &self.params
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn samples(&self) -> &[RateSample] {
        &self.samples
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
}
