//! Detectors for the dynamical signatures: sign of the averaged-QFI flow,
//! Markovian/non-Markovian crossover, critical time, sudden change of the
//! optimal rotation axis, and the 1/N scaling of their separation.
//!
//! All "first time" detectors are relative to a window. Roots are bracketed
//! on the table grid and refined by bisection on the interpolated kernels.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{build_rate_table, BathParams};
use crate::channel::{accumulate_kernels, ChannelCoefficients, ChannelTable, KernelDerivatives};
use crate::error::{Error, Result};
use crate::multiqubit::{collective_qfi_fast, InputFamily};
use crate::numeric::bisect;
use crate::qfi::{average_fmax, phase_variance, Branch, BRANCH_TOLERANCE};

/// Root resolution in units of 1/ω_c.
pub const ROOT_RESOLUTION: f64 = 1e-6;

/// Time interval [start, end] in units of 1/ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start >= 0.0 && end > start && end.is_finite()) {
            return Err(Error::Domain { what: "window needs 0 <= start < end", value: end });
        }
        Ok(Window { start, end })
    }

    /// Window given in units of 1/ω_c.
    pub fn scaled(start: f64, end: f64, omega_c: f64) -> Result<Self> {
        Window::new(start / omega_c, end / omega_c)
    }

    /// The whole span of a table.
    pub fn full(channel: &ChannelTable) -> Self {
        Window { start: 0.0, end: channel.t_max() }
    }

    // Grid indices inside the window (endpoints included up to rounding).
    fn indices(&self, channel: &ChannelTable) -> Result<Vec<usize>> {
        let slack = 1e-9 * channel.step();
        if self.end > channel.t_max() + slack {
            return Err(Error::Domain { what: "window extends past the channel table", value: self.end });
        }
        let idx: Vec<usize> = channel
            .grid()
            .iter()
            .enumerate()
            .filter(|(_, t)| **t >= self.start - slack && **t <= self.end + slack)
            .map(|(i, _)| i)
            .collect();
        if idx.len() < 2 {
            return Err(Error::Contract("window must contain at least two grid points"));
        }
        Ok(idx)
    }
}

fn resolution(channel: &ChannelTable) -> f64 {
    ROOT_RESOLUTION / channel.params().omega_c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub t: f64,
    pub flow: f64,
}

/// dF^A/dt from the closed form of the averaged QFI:
/// −(4/3)Λ′e^{−2Λ} + e^{−2Γ}(−2Γ′(1/3 + δ²) + 2δδ′).
pub fn flow_from_kernels(co: &ChannelCoefficients, d: &KernelDerivatives) -> f64 {
    let lam = (-2.0 * co.big_lambda).exp();
    let gam = (-2.0 * co.big_gamma).exp();
    -(4.0 / 3.0) * d.d_lambda * lam + gam * (-2.0 * d.d_gamma * (1.0 / 3.0 + co.delta * co.delta) + 2.0 * co.delta * d.d_delta)
}

pub fn qfi_flow(channel: &ChannelTable, t: f64) -> Result<FlowSample> {
    let (co, d) = channel.kernels_at(t)?;
    Ok(FlowSample { t, flow: flow_from_kernels(&co, &d) })
}

/// F^A at an arbitrary time, for finite-difference checks of the flow.
pub fn averaged_qfi(channel: &ChannelTable, t: f64) -> Result<f64> {
    Ok(average_fmax(&channel.coefficients_at(t)?))
}

/// Flow at every grid node of the window.
pub fn flow_samples(channel: &ChannelTable, window: &Window) -> Result<Vec<FlowSample>> {
    window
        .indices(channel)?
        .into_iter()
        .map(|i| {
            let co = &channel.coeffs()[i];
            Ok(FlowSample { t: co.t, flow: flow_from_kernels(co, &channel.derivatives()[i]) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverReport {
    pub s: f64,
    /// First time the flow turns positive (units 1/ω₀).
    pub tau: Option<f64>,
    /// ω_c·τ.
    pub omega_c_tau: Option<f64>,
    pub markovian: bool,
}

/// First positive-flow time in `samples`, refined by bisection on
/// `flow_at` between the bracketing samples.
pub fn detect_positive_flow<F>(samples: &[FlowSample], mut flow_at: F, tol: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let Some(k) = samples.iter().skip(1).position(|s| s.flow > 0.0).map(|p| p + 1) else {
        return Ok(None);
    };
    let (lo, hi) = (samples[k - 1].t, samples[k].t);
    let mut failure = None;
    let root = bisect(
        |t| match flow_at(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(Some(root)),
    }
}

/// Markovian iff the flow never turns positive inside the window.
pub fn crossover_time(channel: &ChannelTable, window: &Window) -> Result<CrossoverReport> {
    let samples = flow_samples(channel, window)?;
    let tau = detect_positive_flow(&samples, |t| Ok(qfi_flow(channel, t)?.flow), resolution(channel))?;
    let omega_c = channel.params().omega_c;
    Ok(CrossoverReport { s: channel.params().s, tau, omega_c_tau: tau.map(|t| t * omega_c), markovian: tau.is_none() })
}

/// Smallest s in `[lo, hi]` whose dynamics show backflow, by bisection on
/// the predicate `non_markovian(s)` to width `resolution`. The predicate
/// must be false at `lo` and true at `hi`.
pub fn critical_bath_parameter<F>(mut non_markovian: F, lo: f64, hi: f64, resolution: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(lo < hi && resolution > 0.0) {
        return Err(Error::Contract("scan range must be increasing with positive resolution"));
    }
    if non_markovian(lo)? || !non_markovian(hi)? {
        return Err(Error::NotFound("no Markovian to non-Markovian transition in the scan range"));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > resolution {
        let mid = 0.5 * (a + b);
        if non_markovian(mid)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Builds the channel for one parameter set (serial rate sampling).
pub fn channel_for(params: &BathParams, t_max: f64, n_points: usize) -> Result<ChannelTable> {
    accumulate_kernels(&build_rate_table(params, t_max, n_points)?)
}

/// F̄_max(t) of the evolved input family.
pub fn mean_qfi(family: InputFamily, n: usize, channel: &ChannelTable, t: f64) -> Result<f64> {
    Ok(collective_qfi_fast(family, n, &channel.coefficients_at(t)?)?.f_mean)
}

/// First time F̄_max drops through 1. A family starting exactly at 1 (the
/// product input) gives the window start if F̄ later falls below 1.
pub fn critical_time(family: InputFamily, n: usize, channel: &ChannelTable, window: &Window) -> Result<Option<f64>> {
    let idx = window.indices(channel)?;
    let at_node = |i: usize| -> Result<f64> { Ok(collective_qfi_fast(family, n, &channel.coeffs()[i])?.f_mean - 1.0) };
    let first = at_node(idx[0])?;
    if first.abs() <= 1e-12 || first < 0.0 {
        for &i in &idx[1..] {
            if at_node(i)? < -1e-12 {
                return Ok(Some(channel.grid()[idx[0]]));
            }
        }
        return Ok(None);
    }
    let mut prev = idx[0];
    for &i in &idx[1..] {
        if at_node(i)? <= 0.0 {
            let mut failure = None;
            let root = bisect(
                |t| match mean_qfi(family, n, channel, t) {
                    Ok(v) => v - 1.0,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                channel.grid()[prev],
                channel.grid()[i],
                resolution(channel),
            );
            return match failure {
                Some(e) => Err(e),
                None => Ok(Some(root)),
            };
        }
        prev = i;
    }
    Ok(None)
}

/// A change of the optimal branch at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchFlip {
    pub t: f64,
    pub from: Branch,
    pub to: Branch,
}

fn branch_gap(family: InputFamily, n: usize, co: &ChannelCoefficients) -> Result<(f64, f64)> {
    let r = collective_qfi_fast(family, n, co)?;
    Ok((r.axial_value - r.planar_value, BRANCH_TOLERANCE * r.f_max.abs().max(1.0)))
}

fn strict_sign(gap: f64, tol: f64) -> i8 {
    if gap > tol {
        1
    } else if gap < -tol {
        -1
    } else {
        0
    }
}

/// First time the optimal branch (axial vs planar) changes from the first
/// strict branch seen in the window. Ties are skipped.
pub fn branch_flip_time(family: InputFamily, n: usize, channel: &ChannelTable, window: &Window) -> Result<Option<BranchFlip>> {
    let idx = window.indices(channel)?;
    let mut initial = 0i8;
    let mut last_initial = idx[0];
    for &i in &idx {
        let (gap, tol) = branch_gap(family, n, &channel.coeffs()[i])?;
        let sign = strict_sign(gap, tol);
        if sign == 0 {
            continue;
        }
        if initial == 0 {
            initial = sign;
        }
        if sign == initial {
            last_initial = i;
            continue;
        }
        let mut failure = None;
        let t = bisect(
            |t| match channel.coefficients_at(t).and_then(|co| branch_gap(family, n, &co)) {
                Ok((g, _)) => g,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            channel.grid()[last_initial],
            channel.grid()[i],
            resolution(channel),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let label = |s: i8| if s > 0 { Branch::Axial } else { Branch::Planar };
        return Ok(Some(BranchFlip { t, from: label(initial), to: label(sign) }));
    }
    Ok(None)
}

/// Sudden-change time of the GHZ input.
pub fn sudden_change_time(family: InputFamily, n: usize, channel: &ChannelTable, window: &Window) -> Result<Option<f64>> {
    if family != InputFamily::Ghz {
        return Err(Error::Contract("sudden-change detection is defined for the GHZ input"));
    }
    Ok(branch_flip_time(family, n, channel, window)?.map(|f| f.t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingReport {
    pub n_qubits: usize,
    pub t_c: Option<f64>,
    pub t_s: Option<f64>,
    /// ω_c (t_s − t_c) when both exist.
    pub gap: Option<f64>,
}

pub fn timing_report(n: usize, channel: &ChannelTable, window: &Window) -> Result<TimingReport> {
    let t_c = critical_time(InputFamily::Ghz, n, channel, window)?;
    let t_s = sudden_change_time(InputFamily::Ghz, n, channel, window)?;
    let gap = match (t_c, t_s) {
        (Some(c), Some(s)) => Some(channel.params().omega_c * (s - c)),
        _ => None,
    };
    Ok(TimingReport { n_qubits: n, t_c, t_s, gap })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least squares of gap against 1/N.
pub fn fit_inverse_n(points: &[(usize, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::Contract("scaling fit needs at least three points"));
    }
    if points.iter().any(|(n, g)| *n == 0 || !g.is_finite()) {
        return Err(Error::Contract("scaling fit needs positive N and finite gaps"));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(n, _)| 1.0 / *n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|(_, g)| *g).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Contract("scaling fit needs at least two distinct N"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ScalingFit { slope, intercept, r_squared, points: points.len() })
}

/// Timing reports for each N and the 1/N fit over those with both times.
pub fn scaling_fit(n_values: &[usize], channel: &ChannelTable, window: &Window) -> Result<(Vec<TimingReport>, ScalingFit)> {
    let reports = n_values.iter().map(|&n| timing_report(n, channel, window)).collect::<Result<Vec<_>>>()?;
    let points: Vec<(usize, f64)> = reports.iter().filter_map(|r| r.gap.map(|g| (r.n_qubits, g))).collect();
    let fit = fit_inverse_n(&points)?;
    Ok((reports, fit))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceRow {
    pub t: f64,
    pub var_ghz: f64,
    pub var_product: f64,
    /// GHZ planar-branch QFI.
    pub branch_planar: f64,
    /// GHZ axial-branch QFI.
    pub branch_axial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceTrajectories {
    pub n_qubits: usize,
    pub rows: Vec<VarianceRow>,
    /// Time of the largest GHZ variance in the window.
    pub max_variance_time: f64,
    /// Crossover time of the same channel, if any.
    pub tau: Option<f64>,
    /// Maximum within two grid steps of τ.
    pub coincides_with_tau: bool,
}

/// (Δφ)² = 1/F_max (ν = 1) for the GHZ and product inputs at every grid
/// node of the window.
pub fn variance_trajectories(n: usize, channel: &ChannelTable, window: &Window) -> Result<VarianceTrajectories> {
    let idx = window.indices(channel)?;
    let mut rows = Vec::with_capacity(idx.len());
    for &i in &idx {
        let co = &channel.coeffs()[i];
        let ghz = collective_qfi_fast(InputFamily::Ghz, n, co)?;
        let product = collective_qfi_fast(InputFamily::Product, n, co)?;
        rows.push(VarianceRow {
            t: co.t,
            var_ghz: phase_variance(ghz.f_max, 1, n)?.delta_phi_sq,
            var_product: phase_variance(product.f_max, 1, n)?.delta_phi_sq,
            branch_planar: ghz.planar_value,
            branch_axial: ghz.axial_value,
        });
    }
    let peak = rows.iter().fold(&rows[0], |best, r| if r.var_ghz > best.var_ghz { r } else { best });
    let max_variance_time = peak.t;
    let tau = crossover_time(channel, window)?.tau;
    let coincides_with_tau = tau.is_some_and(|t| (t - max_variance_time).abs() <= 2.0 * channel.step() * (1.0 + 1e-9));
    Ok(VarianceTrajectories { n_qubits: n, rows, max_variance_time, tau, coincides_with_tau })
}
