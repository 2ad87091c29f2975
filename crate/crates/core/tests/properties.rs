use proptest::prelude::*;
use spinboson_core::channel::{bloch_evolve, coefficients, BlochVector};
use spinboson_core::multiqubit::{collective_qfi_fast, CollectiveGenerators, InputFamily};
use spinboson_core::numeric::hermite;
use spinboson_core::qfi::{f_max, single_qubit_fmax, Branch};

proptest! {
    #[test]
    fn qubit_qfi_is_bloch_length_squared(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU, len in 0.0..1.0f64) {
        let b = BlochVector::from_angles(theta, phi);
        let b = BlochVector { b1: b.b1 * len, b2: b.b2 * len, b3: b.b3 * len };
        let gens = CollectiveGenerators::new(1).unwrap().j;
        let r = f_max(&b.to_density(), &gens).unwrap();
        prop_assert!((r.f_max - len * len).abs() < 1e-9);
        prop_assert!(r.branch != Branch::Axial);
        for k in 0..3 {
            prop_assert!(r.c_matrix[k][k] >= -1e-12);
        }
    }

    #[test]
    fn physical_kernels_give_contracting_map(
        gamma in 0.0..5.0f64,
        extra in 0.0..5.0f64,
        delta_frac in -1.0..1.0f64,
        t in 0.0..10.0f64,
        theta in 0.0..std::f64::consts::PI,
    ) {
        // Λ ≥ Γ/2 and |δ| ≤ 1 − e^{−Γ} hold along every physical trajectory
        let lambda = 0.5 * gamma + extra;
        let delta = delta_frac * (1.0 - (-gamma).exp());
        let co = coefficients(gamma, lambda, delta, t, 1.0).unwrap();
        let b = bloch_evolve(theta, 0.7, &co, 1.0);
        prop_assert!(b.norm() <= 1.0 + 1e-12);
        prop_assert!((single_qubit_fmax(theta, &co) - b.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn ghz_qfi_bounded_by_heisenberg(gamma in 0.0..3.0f64, extra in 0.0..3.0f64, n in 1usize..12) {
        let co = coefficients(gamma, 0.5 * gamma + extra, 0.0, 1.0, 1.0).unwrap();
        let r = collective_qfi_fast(InputFamily::Ghz, n, &co).unwrap();
        prop_assert!(r.f_max <= (n * n) as f64 + 1e-9);
        prop_assert!(r.f_max >= -1e-12);
    }

    #[test]
    fn hermite_reproduces_cubics(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, x in 0.0..1.0f64) {
        let f = |x: f64| a * x * x * x + b * x * x + c * x;
        let df = |x: f64| 3.0 * a * x * x + 2.0 * b * x + c;
        let (v, d) = hermite(0.0, 1.0, f(0.0), f(1.0), df(0.0), df(1.0), x);
        prop_assert!((v - f(x)).abs() < 1e-12);
        prop_assert!((d - df(x)).abs() < 1e-11);
    }
}
