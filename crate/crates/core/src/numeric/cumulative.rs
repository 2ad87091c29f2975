use alloc::vec;
use alloc::vec::Vec;

/// Running integral ∫_{x0}^{x_i} f on a uniform grid of step `h`.
///
/// Even nodes use composite Simpson from the origin. Odd nodes add the
/// three-point partial-interval rule to the preceding even node, so every
/// node is third-order accurate locally and fourth-order globally.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    match n {
        0 | 1 => return out,
        2 => {
            out[1] = 0.5 * h * (values[0] + values[1]);
            return out;
        }
        _ => {}
    }
    out[1] = h / 12.0 * (5.0 * values[0] + 8.0 * values[1] - values[2]);
    let mut even = 0.0;
    let mut i = 2;
    while i < n {
        even += h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
        out[i] = even;
        if i + 1 < n {
            out[i + 1] = even + h / 12.0 * (-values[i - 1] + 8.0 * values[i] + 5.0 * values[i + 1]);
        }
        i += 2;
    }
    out
}

/// Richardson estimate of the largest cumulative error: compares the fine
/// result with the same rule run on every other node.
pub fn richardson_estimate(values: &[f64], h: f64, fine: &[f64]) -> f64 {
    if values.len() < 5 {
        return 0.0;
    }
    let coarse_values: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = cumulative_simpson(&coarse_values, 2.0 * h);
    coarse.iter().enumerate().map(|(k, c)| (fine[2 * k] - c).abs() / 15.0).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_at_even_nodes() {
        let h = 0.1;
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        let out = cumulative_simpson(&f, h);
        for (x, v) in xs.iter().zip(&out).step_by(2) {
            let exact = x.powi(4) / 4.0 - x * x / 2.0;
            assert!((v - exact).abs() < 1e-13, "{x}: {v} vs {exact}");
        }
    }

    #[test]
    fn quadratic_is_exact_everywhere() {
        let h = 0.1;
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - 1.0).collect();
        let out = cumulative_simpson(&f, h);
        for (x, v) in xs.iter().zip(&out) {
            assert!((v - (x.powi(3) - x)).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn two_points_fall_back_to_trapezoid() {
        assert_eq!(cumulative_simpson(&[1.0, 3.0], 0.5), vec![0.0, 1.0]);
    }

    #[test]
    fn smooth_function_converges_fourth_order() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
            let out = cumulative_simpson(&f, h);
            out.iter().enumerate().map(|(i, v)| (v - ((i as f64 * h).exp() - 1.0)).abs()).fold(0.0, f64::max)
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn richardson_small_for_smooth_data() {
        let n = 200;
        let h = 1.0 / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| (3.0 * i as f64 * h).sin()).collect();
        let out = cumulative_simpson(&f, h);
        assert!(richardson_estimate(&f, h, &out) < 1e-9);
    }
}
