#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinboson_core::bath::BathParams;
use spinboson_core::state::CMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tanh-sinh quadrature on [a, b], refined by halving the step until two
/// levels agree to `tol`. Nodes are placed by their distance from the
/// nearer endpoint so endpoint singularities keep full precision.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let pi2 = std::f64::consts::FRAC_PI_2;
    let term = |u: f64| -> f64 {
        let s = pi2 * u.sinh();
        let c = s.cosh();
        // distance of the node from the nearer endpoint, in units of half-width
        let d = 1.0 / (c * s.abs().exp());
        if d == 0.0 {
            return 0.0;
        }
        let w = pi2 * u.cosh() / (c * c);
        let x = if u < 0.0 { a + half * d } else { b - half * d };
        if x <= a || x >= b {
            return 0.0;
        }
        w * f(x)
    };
    let u_max = 6.5;
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * h <= u_max {
        let u = k as f64 * h;
        sum += term(u) + term(-u);
        k += 1;
    }
    let mut estimate = half * h * sum;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= u_max {
            let u = k as f64 * h;
            sum += term(u) + term(-u);
            k += 2;
        }
        let next = half * h * sum;
        if (next - estimate).abs() <= tol {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Tanh-sinh over uniform panels of width `width` from 0 to `end`, with the
/// extra break points in `extra`.
pub fn paneled<F: Fn(f64) -> f64>(f: &F, end: f64, width: f64, extra: &[f64], tol: f64) -> f64 {
    let mut breaks: Vec<f64> = (0..).map(|i| i as f64 * width).take_while(|x| *x < end).collect();
    breaks.extend(extra.iter().copied().filter(|x| *x > 0.0 && *x < end));
    breaks.push(end);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks.windows(2).map(|w| tanh_sinh(f, w[0], w[1], tol)).sum()
}

fn sin_ratio(x: f64, t: f64) -> f64 {
    if x.abs() < 1e-8 {
        t
    } else {
        (x * t).sin() / x
    }
}

fn density(omega: f64, p: &BathParams) -> f64 {
    p.alpha * omega.powf(p.s) * p.omega_c.powf(1.0 - p.s) * (-omega / p.omega_c).exp()
}

fn coth_half(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        1.0
    } else {
        1.0 / (omega / (2.0 * temperature)).tanh()
    }
}

fn bose(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

/// Rates by tanh-sinh on unit panels, written directly from the defining
/// integrals: (γ_z, γ₊, γ₋).
pub fn oracle_rates(t: f64, p: &BathParams) -> (f64, f64, f64) {
    let end = 50.0 * p.omega_c;
    let width = (std::f64::consts::PI / t).min(1.0);
    let tol = 1e-12;
    let extra = [p.omega_0];
    let gz = paneled(&|w| 0.5 * density(w, p) * coth_half(w, p.temperature) * sin_ratio(w, t), end, width, &extra, tol);
    let pm = |sign: f64| {
        paneled(
            &|w| {
                let n = bose(w, p.temperature);
                0.5 * density(w, p) * ((n + 1.0) * sin_ratio(w + sign * p.omega_0, t) + n * sin_ratio(w - sign * p.omega_0, t))
            },
            end,
            width,
            &extra,
            tol,
        )
    };
    (gz, pm(1.0), pm(-1.0))
}

/// ∫ J(ω) coth(ω/2T) ω^k dω over [0, 50 ω_c].
pub fn oracle_moment(p: &BathParams, k: i32) -> f64 {
    paneled(&|w| density(w, p) * coth_half(w, p.temperature) * w.powi(k), 50.0 * p.omega_c, 5.0, &[p.omega_0], 1e-13)
}

pub fn random_unit_vector<R: Rng>(r: &mut R) -> [f64; 3] {
    loop {
        let v = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
        let n: f64 = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_pure<R: Rng>(r: &mut R, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_mixed<R: Rng>(r: &mut R, dim: usize, rank: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    let mut total = 0.0;
    for _ in 0..rank {
        let p: f64 = r.random_range(0.05..1.0);
        let psi = random_pure(r, dim);
        total += p;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += psi[i] * psi[j].conj() * p;
            }
        }
    }
    m / C64::new(total, 0.0)
}

pub fn random_unitary<R: Rng>(r: &mut R, dim: usize) -> CMatrix {
    let h = random_mixed(r, dim, dim);
    let eig = h.symmetric_eigen();
    let phases = DVector::from_iterator(dim, (0..dim).map(|_| C64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU))));
    &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// Matrix exponential of −iφA for Hermitian A.
pub fn rotation(a: &CMatrix, phi: f64) -> CMatrix {
    let eig = a.clone().symmetric_eigen();
    let d = DVector::from_iterator(a.nrows(), eig.eigenvalues.iter().map(|l| C64::from_polar(1.0, -phi * l)));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Variance of a Hermitian operator in a pure state.
pub fn variance(psi: &[C64], a: &CMatrix) -> f64 {
    let v = DVector::from_column_slice(psi);
    let av = a * &v;
    let mean = v.dotc(&av).re;
    let second = av.dotc(&av).re;
    second - mean * mean
}
