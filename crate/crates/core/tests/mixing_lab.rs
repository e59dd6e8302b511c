use jmfield_core::birth::BirthMeasure;
use jmfield_core::cone::ConeMeasure;
use jmfield_core::exec::Sequential;
use jmfield_core::field::{GermField, PointField};
use jmfield_core::mixing::bounds::{
    beta_lower, beta_upper_1d, beta_upper_enclosed, beta_upper_quadrant, series_poly_bound, series_superexp_bound,
    SeriesOptions,
};
use jmfield_core::mixing::coupling::{estimate_coupling_delta, CouplingGeometry, ProbeGrid};
use jmfield_core::mixing::events::{covariance_decay, estimate_alpha_event};
use jmfield_core::mixing::{verify_cone_intersection, FieldShift};
use jmfield_core::model::{Germ, GrowthModel};
use jmfield_core::point::Point;
use jmfield_core::shape::ConvexShape;
use jmfield_core::speed::SpeedProfile;
use proptest::prelude::*;
use std::f64::consts::PI;

fn model(dim: usize) -> GrowthModel {
    let shape = if dim == 1 { ConvexShape::cuboid(&[1.0]).unwrap() } else { ConvexShape::ball(dim, 1.0).unwrap() };
    GrowthModel::new(shape, SpeedProfile::constant(1.0).unwrap())
}

fn cone(dim: usize) -> ConeMeasure {
    ConeMeasure::new(model(dim), BirthMeasure::power(1.0, 1.0).unwrap())
}

/// F for unit-ball shape, unit speed and Lebesgue birth measure: vol(B_d) t^(d+1) / (d+1).
fn closed_form_f(dim: usize, t: f64) -> f64 {
    let vol = match dim {
        1 => 2.0,
        2 => PI,
        _ => 4.0 * PI / 3.0,
    };
    vol * t.powi(dim as i32 + 1) / (dim as f64 + 1.0)
}

fn direct_series(dim: usize, c: f64) -> f64 {
    (1..=1_000_000u64).map(|k| (k as f64).powi(dim as i32 - 1) * (-closed_form_f(dim, c * k as f64)).exp()).sum()
}

#[test]
fn constants_are_recomputed_from_the_model() {
    for dim in [2, 3] {
        let c = cone(dim);
        for r in [1.0, 5.0, 16.0] {
            let b = beta_upper_quadrant(&c, dim, r, SeriesOptions::default()).unwrap();
            let m = c.model().speed_bound().unwrap();
            let a = c.model().shape_ratio();
            let h = 2.0 * (a + m);
            assert_eq!(b.constants.h, h);
            assert_eq!(b.constants.big_r, r / h);
            assert_eq!(b.constants.c, 2.0 * (r / h) / (dim as f64 * h));
        }
    }
}

#[test]
fn truncated_series_brackets_direct_summation() {
    let tol = 1e-8;
    for dim in [2, 3] {
        let c = cone(dim);
        for r in [2.0, 8.0, 16.0, 40.0] {
            let b = beta_upper_quadrant(&c, dim, r, SeriesOptions { tail_tol: tol, ..Default::default() }).unwrap();
            let s = b.series.unwrap();
            let direct = direct_series(dim, b.constants.c);
            assert!(s.partial_sum + s.tail_bound >= direct * (1.0 - 1e-10), "d={dim} r={r}");
            assert!((s.partial_sum - direct).abs() <= tol * direct, "d={dim} r={r}: {} vs {direct}", s.partial_sum);
        }
    }
}

#[test]
fn closed_forms_dominate_the_series() {
    // exp(-F(t)) <= gamma t^-(d + delta) with delta = 1 and gamma = sup t^3 exp(-pi t^3 / 3).
    let dim = 2;
    let gamma = 3.0 / PI * (-1.0f64).exp() * (1.0 + 1e-9);
    let c = cone(dim);
    for cc in [0.25, 0.5, 1.0, 2.0] {
        for t in (1..400).map(|i| i as f64 * 0.01) {
            assert!((-c.eval(t)).exp() <= gamma * t.powi(-3) * (1.0 + 1e-9));
        }
        let series = direct_series(dim, cc);
        assert!(series_poly_bound(gamma, 1.0, cc, dim).unwrap() >= series);
        // F(t) >= gamma' t^3 - 0 with gamma' = pi / 3, and a looser gamma' = 1.
        for g in [PI / 3.0, 1.0] {
            let b = series_superexp_bound(g, 3.0, 0.0, cc, dim).unwrap();
            assert!(b.value >= series * (1.0 - 1e-12));
        }
    }
}

#[test]
fn enclosed_bound_scales_quadrant_series() {
    let c = cone(2);
    let e = beta_upper_enclosed(&c, 2, 1.0, 14.0, SeriesOptions::default()).unwrap();
    let direct = direct_series(2, e.constants.c);
    assert!((e.value - 72.0 * direct).abs() <= 1e-8 * e.value);
}

#[test]
fn lower_bound_stays_below_upper_bound() {
    let c = cone(1);
    for i in 1..=40 {
        let r = 0.25 * i as f64;
        assert!(beta_lower(&c, 1.0, r).unwrap() <= beta_upper_1d(&c, r).unwrap());
    }
    let check = verify_cone_intersection(c.model(), c.measure(), 1.0, &[0.5, 1.0, 2.0, 4.0], 400, 3);
    assert!(check.passed);
}

#[test]
fn empirical_alpha_is_below_half_beta_upper() {
    let c = cone(1);
    let m = model(1);
    for h in [0.5, 1.0, 2.0, 3.0] {
        let e = estimate_alpha_event(&m, c.measure(), 1.0, Point::new1(h), 4000, 17, &Sequential).unwrap();
        assert!(e.gap <= 0.5 * beta_upper_1d(&c, h).unwrap() + 3.0 * e.sigma);
    }
}

#[test]
fn decay_curve_decreases() {
    let m = model(1);
    let measure = BirthMeasure::power(1.0, 1.0).unwrap();
    let curve = covariance_decay(&m, &measure, 1.0, &[0.5, 1.0, 2.0, 4.0, 8.0], 10_000, 23, &Sequential).unwrap();
    assert!(curve.decreasing);
    assert!(curve.kendall_tau < 0.0);
    for e in &curve.entries {
        assert!(e.gap >= 0.0 && e.gap <= 0.25 + 3.0 * e.sigma);
        assert!(e.p_ab <= e.p_a.min(e.p_b));
    }
}

#[test]
fn surrogate_fields_are_uncorrelated() {
    let m = model(1);
    let measure = BirthMeasure::power(1.0, 1.0).unwrap();
    let g = CouplingGeometry::HalfLines { r: 3.0 };
    let probes = ProbeGrid::for_geometry(&g, 1, 8, 3.0);
    let n = 2000;
    let rep = estimate_coupling_delta(&m, &measure, g, &probes, n, 31, &Sequential).unwrap();
    assert!(rep.eta_correlation.abs() <= 3.0 / (rep.used as f64).sqrt());
}

#[test]
fn quadrant_coupling_respects_series_bound() {
    let m = model(2);
    let c = cone(2);
    let measure = c.measure().clone();
    let r = 6.0;
    let g = CouplingGeometry::Quadrant { r };
    let probes = ProbeGrid::for_geometry(&g, 2, 16, 3.0);
    let rep = estimate_coupling_delta(&m, &measure, g, &probes, 300, 41, &Sequential).unwrap();
    let delta = beta_upper_quadrant(&c, 2, r, SeriesOptions::default()).unwrap().value / 16.0;
    for d in [rep.delta1, rep.delta2] {
        let p = delta.min(1.0);
        assert!(d <= p + 3.0 * (p * (1.0 - p) / rep.used as f64).sqrt() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_then_read_equals_read_shifted(
        germs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.0f64..3.0), 1..30),
        x in (-6.0f64..6.0, -6.0f64..6.0),
        h in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let m = model(2);
        let germs: Vec<Germ> = germs.iter().map(|&(a, b, t)| Germ::new(Point::new2(a, b), t).unwrap()).collect();
        let field = GermField::new(&m, &germs);
        let shift = FieldShift::new(Point::new2(h.0, h.1));
        let x = Point::new2(x.0, x.1);
        let shifted = shift.apply(&field);
        prop_assert_eq!(shifted.value_at(&x), field.value_at(&(x + shift.h)));
    }

    #[test]
    fn upper_bounds_are_nonincreasing(r in 0.1f64..20.0, dr in 0.01f64..5.0) {
        let c1 = cone(1);
        prop_assert!(beta_upper_1d(&c1, r + dr).unwrap() <= beta_upper_1d(&c1, r).unwrap());
        let c2 = cone(2);
        let a = beta_upper_quadrant(&c2, 2, r, SeriesOptions::default()).unwrap().value;
        let b = beta_upper_quadrant(&c2, 2, r + dr, SeriesOptions::default()).unwrap().value;
        prop_assert!(b <= a * (1.0 + 1e-9));
    }
}
