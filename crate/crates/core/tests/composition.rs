use semiexplicit::composition::{compose, suzuki, triple_jump, yoshida6, CompositionKind, CompositionScheme};
use semiexplicit::extended::{ExtendedStep, StrangStep};
use semiexplicit::harness::rk4_extended;
use semiexplicit::models::quartic_exact_model;
use semiexplicit::Error;

#[test]
fn schemes_are_consistent_and_palindromic() {
    let mut schemes = vec![yoshida6()];
    for order in [4, 6, 8] {
        schemes.push(triple_jump(order).unwrap());
        schemes.push(suzuki(order).unwrap());
    }
    for s in &schemes {
        assert!((s.sum() - 1.0).abs() < 1e-14, "{:?}", s.kind);
        assert!(s.is_palindromic());
    }
    assert_eq!(triple_jump(6).unwrap().len(), 9);
    assert_eq!(suzuki(6).unwrap().len(), 25);
    assert_eq!(yoshida6().len(), 7);
}

#[test]
fn odd_or_low_orders_are_rejected() {
    for order in [0, 1, 2, 3, 5] {
        assert!(matches!(triple_jump(order), Err(Error::InvalidOrder(_))));
        assert!(matches!(suzuki(order), Err(Error::InvalidOrder(_))));
    }
}

#[test]
fn build_dispatches_on_kind() {
    assert_eq!(CompositionScheme::build(CompositionKind::None, 2).unwrap().coefficients, [1.0]);
    assert_eq!(CompositionScheme::build(CompositionKind::TripleJump, 4).unwrap(), triple_jump(4).unwrap());
    assert_eq!(CompositionScheme::build(CompositionKind::Yoshida6, 6).unwrap(), yoshida6());
}

#[test]
fn composed_stage_count() {
    let model = quartic_exact_model();
    assert_eq!(compose(StrangStep::new(&model), suzuki(4).unwrap()).stages(), 15);
}

/// Local error of one composed step against a fine RK4 solution; the fitted
/// exponent must be one above the claimed order.
#[test]
fn composed_steps_reach_claimed_local_order() {
    let model = quartic_exact_model();
    let z = semiexplicit::extended::ExtendedPoint::new(vec![-2.3], vec![-2.1], vec![0.7], vec![0.5]);
    let schemes = [triple_jump(4).unwrap(), suzuki(4).unwrap(), triple_jump(6).unwrap(), yoshida6()];
    for scheme in schemes {
        let order = scheme.claimed_order as f64;
        let step = compose(StrangStep::new(&model), scheme);
        let err = |dt: f64| {
            let got = step.step(dt, &z).unwrap().to_flat();
            let want = rk4_extended(&model, &z, dt, 400).unwrap().to_flat();
            got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.04), err(0.02));
        let fitted = (e1 / e2).log2();
        assert!((fitted - (order + 1.0)).abs() < 0.5, "order {order}: fitted {fitted}");
    }
}
