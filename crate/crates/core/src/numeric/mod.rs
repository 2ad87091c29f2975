//! Numerical building blocks shared by the physics modules.

pub mod cumulative;
pub mod ode;
pub mod quadrature;

/// Bisection for a sign change of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `tol`. `f(lo)` and `f(hi)` must differ in sign
/// (a zero at either end is accepted). Returns the bracket midpoint.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cubic Hermite interpolation on `[x0, x1]` from end values and slopes.
/// Returns `(value, derivative)` at `x`.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let deriv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, deriv)
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        libm::sin(x) / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-11);
    }

    #[test]
    fn bisect_accepts_decreasing_functions() {
        let r = bisect(|x| 1.0 - x, 0.0, 3.0, 1e-10);
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| 2.0 * x * x * x - x + 0.5;
        let df = |x: f64| 6.0 * x * x - 1.0;
        let (v, d) = hermite(0.3, 0.7, f(0.3), f(0.7), df(0.3), df(0.7), 0.45);
        assert!((v - f(0.45)).abs() < 1e-14);
        assert!((d - df(0.45)).abs() < 1e-13);
    }

    #[test]
    fn sinc_is_continuous_at_series_switch() {
        let a = sinc(0.999_999e-4);
        let b = sinc(1.000_001e-4);
        assert!((a - b).abs() < 1e-12);
        assert_eq!(sinc(0.0), 1.0);
    }
}
