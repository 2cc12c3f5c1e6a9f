use proptest::prelude::*;

use semiexplicit::harness::reference_oracle;
use semiexplicit::models::{
    canonical_to_vortex, check_gradients, disparate_ten_vortex_config, nls_model, nls_standard_ic, quartic_exact_model,
    quartic_standard_ic, ten_vortex_config, vortex_model, vortex_to_canonical, HamiltonianModel, PhasePoint,
};

fn perturbed(center: &PhasePoint, dq: &[f64], dp: &[f64]) -> PhasePoint {
    PhasePoint {
        q: center.q.iter().zip(dq).map(|(a, b)| a + b).collect(),
        p: center.p.iter().zip(dp).map(|(a, b)| a + b).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quartic_gradient_matches_differences(q in -5.0..5.0f64, p in -5.0..5.0f64) {
        let z = PhasePoint { q: vec![q], p: vec![p] };
        prop_assert!(check_gradients(&quartic_exact_model(), &z, 1e-5).unwrap() < 1e-6);
    }

    #[test]
    fn nls_gradient_matches_differences(dq in prop::collection::vec(-0.5..0.5f64, 5), dp in prop::collection::vec(-0.5..0.5f64, 5)) {
        let z = perturbed(&nls_standard_ic(), &dq, &dp);
        prop_assert!(check_gradients(&nls_model(5).unwrap(), &z, 1e-5).unwrap() < 1e-6);
    }

    #[test]
    fn vortex_gradient_matches_differences(dq in prop::collection::vec(-0.05..0.05f64, 10), dp in prop::collection::vec(-0.05..0.05f64, 10)) {
        let cfg = ten_vortex_config();
        let model = vortex_model(&cfg).unwrap();
        let z = perturbed(&vortex_to_canonical(&cfg).unwrap(), &dq, &dp);
        prop_assert!(check_gradients(&model, &z, 1e-6).unwrap() < 1e-5);
    }
}

#[test]
fn vortex_coordinates_round_trip() {
    for cfg in [ten_vortex_config(), disparate_ten_vortex_config()] {
        let z = vortex_to_canonical(&cfg).unwrap();
        let (x, y) = canonical_to_vortex(&z, &cfg.gamma).unwrap();
        for i in 0..cfg.len() {
            assert!((x[i] - cfg.x[i]).abs() <= 1e-14 * (1.0 + cfg.x[i].abs()));
            assert!((y[i] - cfg.y[i]).abs() <= 1e-14 * (1.0 + cfg.y[i].abs()));
        }
    }
}

fn invariant_values(model: &dyn HamiltonianModel, z: &PhasePoint) -> Vec<f64> {
    let mut v = vec![model.energy(&z.q, &z.p).unwrap()];
    v.extend(model.invariants(&z.q, &z.p).into_iter().map(|(_, x)| x));
    v
}

fn assert_conserved_along_oracle(model: &dyn HamiltonianModel, z0: &PhasePoint, t: f64, oracle_tol: f64, tol: f64) {
    let start = invariant_values(model, z0);
    let end = invariant_values(model, &reference_oracle(model, z0, t, oracle_tol).unwrap());
    for (a, b) in start.iter().zip(&end) {
        assert!((a - b).abs() <= tol * (1.0 + a.abs()), "{a} -> {b}");
    }
}

#[test]
fn invariants_hold_along_reference_solution() {
    assert_conserved_along_oracle(&quartic_exact_model(), &quartic_standard_ic(), 5.0, 1e-10, 1e-9);
    assert_conserved_along_oracle(&nls_model(5).unwrap(), &nls_standard_ic(), 2.0, 1e-8, 1e-8);
    let cfg = ten_vortex_config();
    assert_conserved_along_oracle(&vortex_model(&cfg).unwrap(), &vortex_to_canonical(&cfg).unwrap(), 2.0, 1e-10, 1e-9);
}

#[test]
fn vortex_model_exposes_three_invariants() {
    let model = vortex_model(&ten_vortex_config()).unwrap();
    assert_eq!(model.invariant_names(), ["Q", "P", "I_angular"]);
    assert_eq!(nls_model(5).unwrap().invariant_names(), ["total_mass"]);
    assert!(quartic_exact_model().invariant_names().is_empty());
}
