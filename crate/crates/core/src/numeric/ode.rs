//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with adaptive steps.

use alloc::vec;
use alloc::vec::Vec;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-9, abs_tol: 1e-9, initial_step: 1e-3, min_step: 1e-14, max_steps: 200_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights equal the last row of A (FSAL)
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = rhs(t, y)` from `t0` and returns the state at each of
/// `t_out` (non-decreasing, all ≥ t0). Steps are clipped to land exactly on
/// every output time.
pub fn dopri5<F>(mut rhs: F, t0: f64, y0: &[f64], t_out: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = opts.initial_step;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    let mut out = Vec::with_capacity(t_out.len());
    let mut steps = 0usize;

    rhs(t, &y, &mut k[0])?;
    for &target in t_out {
        if target < t {
            return Err(Error::Contract("output times must be non-decreasing and after t0"));
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepSizeCollapse { t, step: h });
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += step * A[s][j] * kj[i];
                    }
                    stage[i] = acc;
                }
                rhs(t + C[s] * step, &stage, &mut k[s])?;
            }
            let mut err_sq = 0.0;
            for i in 0..dim {
                let mut hi = y[i];
                let mut lo = y[i];
                for s in 0..7 {
                    hi += step * B5[s] * k[s][i];
                    lo += step * B4[s] * k[s][i];
                }
                y5[i] = hi;
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(hi.abs());
                err_sq += ((hi - lo) / scale).powi(2);
            }
            let err = (err_sq / dim.max(1) as f64).sqrt();
            steps += 1;
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y.copy_from_slice(&y5);
                k.swap(0, 6);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || grow < 1.0 {
                    h = step * grow;
                }
            } else {
                let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = step * shrink;
                if h < opts.min_step {
                    return Err(Error::StepSizeCollapse { t, step: h });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
