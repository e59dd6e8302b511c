use jmfield_core::birth::BirthMeasure;
use jmfield_core::cone::{cone_measure_monte_carlo, ConeMeasure};
use jmfield_core::model::GrowthModel;
use jmfield_core::rng::{stream, Role};
use jmfield_core::shape::ConvexShape;
use jmfield_core::speed::SpeedProfile;
use std::f64::consts::PI;

fn cones() -> Vec<(ConeMeasure, f64)> {
    let mk = |s: ConvexShape, v: SpeedProfile, m: BirthMeasure| ConeMeasure::new(GrowthModel::new(s, v), m);
    vec![
        (mk(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::constant(1.0).unwrap(), BirthMeasure::power(1.0, 1.0).unwrap()), 1.5),
        (mk(ConvexShape::ball(2, 1.0).unwrap(), SpeedProfile::constant(1.0).unwrap(), BirthMeasure::power(2.0, 0.5).unwrap()), 1.0),
        (mk(ConvexShape::cuboid(&[1.0, 0.5]).unwrap(), SpeedProfile::constant(0.7).unwrap(), BirthMeasure::power(1.0, 2.0).unwrap()), 2.0),
        (
            mk(
                ConvexShape::polygon(&[[2.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -0.5]]).unwrap(),
                SpeedProfile::tabulated(&[(0.0, 0.0), (1.0, 0.5), (3.0, 4.5)]).unwrap(),
                BirthMeasure::discrete(&[(0.0, 0.3), (0.5, 1.0), (1.2, 0.7)]).unwrap(),
            ),
            2.0,
        ),
        (mk(ConvexShape::ball(3, 0.8).unwrap(), SpeedProfile::power(1.0, 1.5).unwrap(), BirthMeasure::power(1.0, 1.0).unwrap()), 1.2),
    ]
}

#[test]
fn quadrature_agrees_with_monte_carlo() {
    for (k, (cone, t)) in cones().into_iter().enumerate() {
        let f = cone.eval(t);
        let mut rng = stream(k as u64, 0, Role::ConeMonteCarlo);
        let (est, se) = cone_measure_monte_carlo(cone.model(), cone.measure(), t, 200_000, &mut rng);
        assert!((est - f).abs() <= 3.0 * se + 1e-12, "model {k}: F={f} mc={est}±{se}");
    }
}

#[test]
fn cone_measure_is_nondecreasing() {
    for (cone, t) in cones() {
        let mut prev = 0.0;
        for i in 0..=60 {
            let v = cone.eval(t * i as f64 / 20.0);
            assert!(v >= prev - 1e-12 * v.abs());
            prev = v;
        }
    }
}

#[test]
fn closed_form_examples() {
    let (linear, _) = cones().swap_remove(0);
    assert!((linear.eval(2.0) - 4.0).abs() < 1e-10);
    assert_eq!(linear.eval(0.0), 0.0);
    assert!((linear.survival(2.0) - (-4.0f64).exp()).abs() < 1e-12);
    assert!((linear.quantile((-4.0f64).exp()).unwrap() - 2.0).abs() < 1e-7);
    let disc = ConeMeasure::new(
        GrowthModel::new(ConvexShape::ball(2, 1.0).unwrap(), SpeedProfile::constant(1.0).unwrap()),
        BirthMeasure::power(1.0, 1.0).unwrap(),
    );
    assert!((disc.eval(1.0) - PI / 3.0).abs() < 1e-9);
    assert!((disc.quantile((-PI / 3.0).exp()).unwrap() - 1.0).abs() < 1e-7);
    assert!((ConvexShape::cuboid(&[1.0, 1.0]).unwrap().volume() - 4.0).abs() < 1e-12);
}
