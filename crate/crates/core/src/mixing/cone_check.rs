//! Sampled check of the cone-intersection hypothesis
//! `K_t ∩ (K_t + h) ⊂ K_((1 + tau) t)` for `|h| <= tau t`.

use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::birth::BirthMeasure;
use crate::model::{Germ, GrowthModel};
use crate::point::Point;
use crate::rng::{self, Role, StreamRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeCounterexample {
    pub t: f64,
    pub h: Point,
    pub germ: Germ,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeIntersectionReport {
    pub tau: f64,
    pub t_grid: Vec<f64>,
    /// Sampled germs of `K_t ∩ (K_t + h)` that were tested.
    pub checks: u64,
    pub failures: u64,
    /// Sampled germs of `K_t ∪ (K_t + h)` outside `K_((1 + tau) t)`.
    pub union_failures: u64,
    pub counterexample: Option<ConeCounterexample>,
    pub passed: bool,
}

fn in_cone(model: &GrowthModel, germ: &Germ, target: &Point, t: f64) -> bool {
    model.arrival_time(germ, target) <= t
}

fn random_lag(dim: usize, radius: f64, rng: &mut StreamRng) -> Point {
    loop {
        let mut p = Point::ORIGIN;
        for a in 0..dim {
            p.0[a] = 2.0 * rng.random::<f64>() - 1.0;
        }
        if p.norm() <= 1.0 {
            return p * radius;
        }
    }
}

/// For each `t` and `lags_per_t` lags `h` (the first being 0), draws `samples`
/// germs `(x, s)` with `s ~ m` on `[0, t]` and `x` uniform on a box holding
/// `K_t`, keeps those in both cones, and tests membership in `K_((1 + tau) t)`.
pub fn verify_cone_intersection(
    model: &GrowthModel,
    measure: &BirthMeasure,
    tau: f64,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> ConeIntersectionReport {
    const LAGS_PER_T: usize = 8;
    let dim = model.dim();
    let mut rng = rng::stream(seed, 0, Role::ConeIntersection);
    let mut checks = 0u64;
    let mut failures = 0u64;
    let mut union_failures = 0u64;
    let mut counterexample = None;
    for &t in t_grid {
        if !(t > 0.0) || measure.cumulative_mass(t) == 0.0 {
            continue;
        }
        let half = model.shape().rho_max() * model.speed().distance(t);
        let outer = (1.0 + tau) * t;
        for lag in 0..LAGS_PER_T {
            let h = if lag == 0 { Point::ORIGIN } else { random_lag(dim, tau * t, &mut rng) };
            for _ in 0..samples {
                let mut x = Point::ORIGIN;
                for a in 0..dim {
                    x.0[a] = half * (2.0 * rng.random::<f64>() - 1.0) + if rng.random::<bool>() { h.0[a] } else { 0.0 };
                }
                let germ = Germ { location: x, birth_time: measure.sample_time(t, &mut rng) };
                let in_first = in_cone(model, &germ, &Point::ORIGIN, t);
                let in_second = in_cone(model, &germ, &h, t);
                let in_outer = in_cone(model, &germ, &Point::ORIGIN, outer);
                if (in_first || in_second) && !in_outer {
                    union_failures += 1;
                }
                if in_first && in_second {
                    checks += 1;
                    if !in_outer {
                        failures += 1;
                        counterexample.get_or_insert(ConeCounterexample { t, h, germ });
                    }
                }
            }
        }
    }
    ConeIntersectionReport {
        tau,
        t_grid: t_grid.to_vec(),
        checks,
        failures,
        union_failures,
        counterexample,
        passed: failures == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::ConvexShape;
    use crate::speed::SpeedProfile;

    #[test]
    fn linear_model_passes_for_tau_up_to_one() {
        let model = GrowthModel::new(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::constant(1.0).unwrap());
        let m = BirthMeasure::power(1.0, 1.0).unwrap();
        for tau in [0.25, 1.0] {
            let r = verify_cone_intersection(&model, &m, tau, &[0.5, 1.0, 4.0], 500, 1);
            assert!(r.passed);
            assert!(r.checks > 1000);
            assert_eq!(r.union_failures, 0);
        }
    }

    #[test]
    fn empty_cone_is_vacuous() {
        let model = GrowthModel::new(ConvexShape::ball(2, 1.0).unwrap(), SpeedProfile::constant(1.0).unwrap());
        let m = BirthMeasure::discrete(&[(100.0, 1.0)]).unwrap();
        let r = verify_cone_intersection(&model, &m, 1.0, &[1.0, 2.0], 100, 0);
        assert!(r.passed);
        assert_eq!(r.checks, 0);
    }
}
