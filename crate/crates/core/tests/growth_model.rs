use jmfield_core::model::{Germ, GrowthModel};
use jmfield_core::point::Point;
use jmfield_core::shape::ConvexShape;
use jmfield_core::speed::SpeedProfile;
use proptest::prelude::*;

fn models() -> Vec<GrowthModel> {
    vec![
        GrowthModel::new(ConvexShape::ball(2, 1.0).unwrap(), SpeedProfile::constant(1.0).unwrap()),
        GrowthModel::new(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::constant(2.0).unwrap()),
        GrowthModel::new(ConvexShape::cuboid(&[1.0, 0.5]).unwrap(), SpeedProfile::constant(0.7).unwrap()),
        GrowthModel::new(
            ConvexShape::polygon(&[[2.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -0.5]]).unwrap(),
            SpeedProfile::tabulated(&[(0.0, 0.0), (1.0, 0.5), (3.0, 4.5)]).unwrap(),
        ),
        GrowthModel::new(ConvexShape::ball(3, 0.8).unwrap(), SpeedProfile::tabulated(&[(0.0, 0.0), (2.0, 1.0)]).unwrap()),
    ]
}

/// Radial function of each test shape, written out independently of the crate.
fn radial_oracle(model_index: usize, u: &Point) -> f64 {
    let n = u.norm();
    let d = u.0.map(|c| c / n);
    match model_index {
        0 => 1.0,
        1 => 1.0,
        2 => (1.0 / d[0].abs()).min(0.5 / d[1].abs()),
        3 => {
            let v = [[2.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -0.5]];
            let mut best = f64::INFINITY;
            for i in 0..4 {
                let (p, q) = (v[i], v[(i + 1) % 4]);
                // Solve s d = p + w (q - p).
                let e = [q[0] - p[0], q[1] - p[1]];
                let det = d[0] * (-e[1]) - d[1] * (-e[0]);
                if det.abs() < 1e-15 {
                    continue;
                }
                let s = (p[0] * (-e[1]) - p[1] * (-e[0])) / det;
                let w = (d[0] * p[1] - d[1] * p[0]) / det;
                if s > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&w) {
                    best = best.min(s);
                }
            }
            best
        }
        _ => 0.8,
    }
}

fn point_strategy() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-6.0f64..6.0)
}

fn project(model: &GrowthModel, p: [f64; 3]) -> Point {
    let mut q = Point::ORIGIN;
    q.0[..model.dim()].copy_from_slice(&p[..model.dim()]);
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn speed_bound_holds(k in 0usize..5, xg in point_strategy(), x in point_strategy(), tg in 0.0f64..5.0) {
        let m = &models()[k];
        let g = Germ::new(project(m, xg), tg).unwrap();
        let x = project(m, x);
        let a = m.arrival_time(&g, &x);
        let lower = tg + x.distance(&g.location) / m.speed_bound().unwrap();
        prop_assert!(a - lower >= -1e-9 * (1.0 + a));
        prop_assert!(a >= tg);
    }

    #[test]
    fn crystals_are_nested(k in 0usize..5, x in point_strategy(), tg in 0.0f64..3.0, s in 0.0f64..6.0, dt in 0.0f64..4.0) {
        let m = &models()[k];
        let g = Germ::at_origin(tg);
        let x = project(m, x);
        if m.crystal_contains(&g, s, &x) {
            prop_assert!(m.crystal_contains(&g, s + dt, &x));
        }
    }

    #[test]
    fn sup_arrival_increases_and_dominates(k in 0usize..5, tg in 0.0f64..3.0, r in 0.0f64..10.0, dr in 0.01f64..3.0) {
        let m = &models()[k];
        let s0 = m.sup_arrival(tg, r);
        let s1 = m.sup_arrival(tg, r + dr);
        prop_assert!(s1 > s0);
        prop_assert!(s0 >= tg + r / m.speed_bound().unwrap() - 1e-9 * (1.0 + s0));
    }

    #[test]
    fn gauge_formula_matches_bisection(k in 0usize..5, xg in point_strategy(), x in point_strategy(), tg in 0.0f64..3.0) {
        let m = &models()[k];
        let g = Germ::new(project(m, xg), tg).unwrap();
        let x = project(m, x);
        let diff = x - g.location;
        prop_assume!(diff.norm() > 1e-6);
        let p = radial_oracle(k, &diff);
        let dist = diff.norm();
        let v = |t: f64| m.speed().distance(t);
        let (mut lo, mut hi) = (tg, tg + 1.0);
        while (v(hi) - v(tg)) * p < dist {
            hi = tg + 2.0 * (hi - tg);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (v(mid) - v(tg)) * p < dist { lo = mid } else { hi = mid }
        }
        let a = m.arrival_time(&g, &x);
        prop_assert!((a - hi).abs() <= 1e-9 * hi.abs().max(1.0), "{} vs {}", a, hi);
    }

    #[test]
    fn diameters_respect_shape_ratio(k in 0usize..5, tg in 0.0f64..3.0, dt in 0.0f64..5.0) {
        let m = &models()[k];
        let g = Germ::at_origin(tg);
        let outer = m.outer_diameter(&g, tg + dt).unwrap();
        let inner = m.inner_diameter(&g, tg + dt).unwrap();
        prop_assert!(inner <= outer);
        prop_assert!(outer <= m.shape_ratio() * inner * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn translation_covariance_is_exact(k in 0usize..5, xg in point_strategy(), x in point_strategy(), tg in 0.0f64..3.0) {
        let m = &models()[k];
        let g = Germ::new(project(m, xg), tg).unwrap();
        let x = project(m, x);
        prop_assert_eq!(m.arrival_time(&g, &x), m.arrival_time(&Germ::at_origin(tg), &(x - g.location)));
    }
}

#[test]
fn arrival_examples() {
    let ball = &models()[0];
    assert_eq!(ball.arrival_time(&Germ::at_origin(0.0), &Point::new2(3.0, 0.0)), 3.0);
    let quad = GrowthModel::new(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::power(1.0, 2.0).unwrap());
    let a = quad.arrival_time(&Germ::at_origin(1.0), &Point::new1(3.0));
    assert!((a - 2.0).abs() < 1e-12);
    assert!(quad.crystal_contains(&Germ::at_origin(1.0), 2.0, &Point::new1(3.0)));
    assert!((quad.localization_horizon(1.0) - 2f64.sqrt()).abs() < 1e-12);
    let square = GrowthModel::new(ConvexShape::cuboid(&[1.0, 1.0]).unwrap(), SpeedProfile::constant(1.0).unwrap());
    let g = Germ::at_origin(0.0);
    assert_eq!(square.inner_diameter(&g, 1.0).unwrap(), 2.0);
    assert!((square.outer_diameter(&g, 1.0).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(square.sup_arrival(0.0, 2.0), 2.0);
}
