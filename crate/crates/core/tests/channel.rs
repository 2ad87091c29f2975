mod common;

use rand::Rng;
use spinboson_core::analysis::channel_for;
use spinboson_core::bath::BathParams;
use spinboson_core::channel::{apply_single_qubit, bloch_evolve, is_depolarizing, ode_oracle_batch, BlochVector};
use spinboson_core::numeric::ode::OdeOptions;
use spinboson_core::state::DensityMatrix;

#[test]
fn plus_state_matches_master_equation() {
    let p = BathParams::default();
    let table = channel_for(&p, 1.0, 1001).unwrap();
    let plus = DensityMatrix::qubit(std::f64::consts::FRAC_PI_2, 0.0);
    let times = [0.1, 0.5, 1.0];
    let traj = &ode_oracle_batch(&p, std::slice::from_ref(&plus), &times, &OdeOptions::default()).unwrap()[0];
    for (t, rho_ode) in times.iter().zip(traj) {
        let closed = apply_single_qubit(&plus, &table.coefficients_at(*t).unwrap()).unwrap();
        let diff = closed.max_abs_diff(rho_ode);
        assert!(diff < 1e-6, "omega_c t = {}: {diff:e}", t * 10.0);
    }
}

#[test]
fn coefficients_match_oracle_populations_and_coherence() {
    // |1⟩ gives a directly, |0⟩ gives b, |+⟩ gives c/2 in the coherence
    let p = BathParams::default().with_s(1.0).with_temperature(0.1);
    let table = channel_for(&p, 0.5, 501).unwrap();
    let inputs = [
        DensityMatrix::qubit(0.0, 0.0),
        DensityMatrix::qubit(std::f64::consts::PI, 0.0),
        DensityMatrix::qubit(std::f64::consts::FRAC_PI_2, 0.0),
    ];
    let traj = ode_oracle_batch(&p, &inputs, &[0.5], &OdeOptions::default()).unwrap();
    let co = table.coefficients_at(0.5).unwrap();
    assert!((traj[0][0].get(0, 0).re - co.a).abs() < 1e-6);
    assert!((traj[1][0].get(0, 0).re - co.b).abs() < 1e-6);
    assert!((traj[2][0].get(0, 1) - co.c * 0.5).norm() < 1e-6);
}

#[test]
fn bloch_formula_agrees_with_map_for_random_angles() {
    let table = channel_for(&BathParams::default(), 2.0, 401).unwrap();
    let mut r = common::rng(7);
    for _ in 0..50 {
        let theta = r.random_range(0.0..std::f64::consts::PI);
        let varphi = r.random_range(0.0..std::f64::consts::TAU);
        let t = r.random_range(0.0..2.0);
        let co = table.coefficients_at(t).unwrap();
        let from_map = BlochVector::from_density(&apply_single_qubit(&DensityMatrix::qubit(theta, varphi), &co).unwrap()).unwrap();
        let direct = bloch_evolve(theta, varphi, &co, 1.0);
        for (x, y) in from_map.as_array().iter().zip(direct.as_array()) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(direct.norm() <= 1.0 + 1e-9);
    }
}

#[test]
fn trace_and_hermiticity_along_trajectory() {
    let table = channel_for(&BathParams::default().with_s(0.5), 2.0, 401).unwrap();
    for co in table.coeffs() {
        assert!((co.a - co.b - (-co.big_gamma).exp()).abs() < 1e-12);
        assert!((co.a + co.b - 1.0 - co.delta * (-co.big_gamma).exp()).abs() < 1e-12);
        assert!((co.c.norm() - (-co.big_lambda).exp()).abs() < 1e-12);
        let rho = apply_single_qubit(&DensityMatrix::qubit(1.0, 2.0), co).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12 && rho.trace().im.abs() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-12);
    }
}

#[test]
fn depolarizing_condition_along_physical_trajectory() {
    // c carries the phase e^{-iω₀t}, so a − b = c fails away from t = 0
    let table = channel_for(&BathParams::default(), 2.0, 201).unwrap();
    let hits: Vec<f64> = table.coeffs().iter().filter(|c| is_depolarizing(c, 1e-3)).map(|c| c.t).collect();
    assert_eq!(hits.first().copied(), Some(0.0));
    assert!(hits.iter().all(|t| *t < 0.05), "{hits:?}");
}

#[test]
fn default_coupling_keeps_map_positive() {
    for s in [0.5, 1.0, 3.0] {
        let table = channel_for(&BathParams::default().with_s(s), 2.0, 401).unwrap();
        for co in table.coeffs() {
            assert!(co.choi_min_eigenvalue() >= -1e-8, "s={s} t={}", co.t);
        }
    }
}
