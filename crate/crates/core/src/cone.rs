//! Causal-cone measure F(t) = Lambda(K_t) and the one-point survival law
//! P(xi(0) > t) = exp(-F(t)).

use alloc::vec::Vec;

use rand::Rng;

use crate::birth::BirthMeasure;
use crate::error::Error;
use crate::math;
use crate::model::{Germ, GrowthModel};
use crate::point::{Point, MAX_DIM};
use crate::quad::{self, QuadOptions};

/// Largest t probed by [`ConeMeasure::quantile`] before giving up.
pub const QUANTILE_CEILING: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct ConeMeasure {
    model: GrowthModel,
    measure: BirthMeasure,
    vol_k: f64,
    opts: QuadOptions,
}

impl ConeMeasure {
    pub fn new(model: GrowthModel, measure: BirthMeasure) -> Self {
        let vol_k = model.shape().volume();
        ConeMeasure { model, measure, vol_k, opts: QuadOptions::default() }
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.opts.rel_tol = rel_tol;
        self
    }

    pub fn model(&self) -> &GrowthModel {
        &self.model
    }

    pub fn measure(&self) -> &BirthMeasure {
        &self.measure
    }

    pub fn shape_volume(&self) -> f64 {
        self.vol_k
    }

    /// Integrates `g(s)` against m(ds) over `[0, t]`. `kinks` are s-values where
    /// `g` is not smooth.
    fn integrate_against_m<G: Fn(f64) -> f64>(&self, t: f64, g: G, kinks: &[f64]) -> f64 {
        match &self.measure {
            BirthMeasure::Discrete { atoms } => {
                atoms.iter().take_while(|a| a.0 <= t).map(|&(s, w)| w * g(s)).sum()
            }
            BirthMeasure::Power { alpha, beta } => {
                // s = t w^(1/beta) turns alpha s^(beta-1) ds into (alpha t^beta / beta) dw.
                let scale = alpha * math::powf(t, *beta) / beta;
                let breaks: Vec<f64> = kinks
                    .iter()
                    .chain(self.model.speed().knot_times())
                    .filter(|&&s| s > 0.0 && s < t)
                    .map(|&s| math::powf(s / t, *beta))
                    .collect();
                let inner = |w: f64| g(t * math::powf(w, 1.0 / beta));
                scale * quad::integrate(inner, 0.0, 1.0, &breaks, self.opts).value
            }
        }
    }

    /// F(t) = vol(K) * integral over [0, t] of (V(t) - V(s))^d m(ds).
    pub fn eval(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        let speed = self.model.speed();
        let vt = speed.distance(t);
        let d = self.model.dim() as i32;
        let section = |s: f64| math::powi((vt - speed.distance(s)).max(0.0), d);
        self.vol_k * self.integrate_against_m(t, section, &[])
    }

    /// P(xi(0) > t).
    pub fn survival(&self, t: f64) -> f64 {
        math::exp(-self.eval(t))
    }

    /// Smallest t with `exp(-F(t)) <= p`, to relative precision 1e-8.
    pub fn quantile(&self, p: f64) -> Result<f64, Error> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument("quantile level must lie in (0, 1)"));
        }
        let target = -math::ln(p);
        let mut hi = 1.0;
        while self.eval(hi) < target {
            hi *= 2.0;
            if hi > QUANTILE_CEILING {
                return Err(Error::QuantileUnreachable { target, ceiling: QUANTILE_CEILING });
            }
        }
        let mut lo = hi * 0.5;
        while lo > f64::MIN_POSITIVE && self.eval(lo) >= target {
            hi = lo;
            lo *= 0.5;
        }
        if lo <= f64::MIN_POSITIVE {
            return Ok(hi);
        }
        while hi - lo > 1e-8 * hi * 0.5 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Lambda(K_a ∩ (K_a + h)) for a one-dimensional model: the causal cones of
    /// two points a distance `|h|` apart, intersected.
    pub fn overlap_1d(&self, a: f64, h: f64) -> Result<f64, Error> {
        if self.model.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.model.dim() });
        }
        if !(a > 0.0) {
            return Ok(0.0);
        }
        let speed = self.model.speed();
        let width = self.model.shape().rho_min() + self.model.shape().rho_max();
        let va = speed.distance(a);
        let gap = h.abs();
        let section = |s: f64| (width * (va - speed.distance(s)) - gap).max(0.0);
        let kink = speed.inverse(va - gap / width);
        Ok(self.integrate_against_m(a, section, &[kink]))
    }

    /// P(xi(0) > a, xi(h) > a) for a one-dimensional model.
    pub fn joint_survival_1d(&self, a: f64, h: f64) -> Result<f64, Error> {
        let overlap = self.overlap_1d(a, h)?;
        Ok(math::exp(-(2.0 * self.eval(a) - overlap)))
    }
}

/// Plain Monte Carlo estimate of Lambda(K_t): germs `(x, s)` drawn uniformly from
/// a dominating box times m restricted to `[0, t]`, tested with `A_(x,s)(0) <= t`.
/// Returns `(estimate, standard_error)`.
pub fn cone_measure_monte_carlo<R: Rng + ?Sized>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    t: f64,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let mass = measure.cumulative_mass(t);
    if !(t > 0.0) || mass == 0.0 || samples == 0 {
        return (0.0, 0.0);
    }
    let dim = model.dim();
    let half = model.shape().rho_max() * model.speed().distance(t);
    let box_volume = math::powi(2.0 * half, dim as i32);
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut c = [0.0; MAX_DIM];
        for x in c.iter_mut().take(dim) {
            *x = half * (2.0 * rng.random::<f64>() - 1.0);
        }
        let s = measure.sample_time(t, rng);
        let g = Germ { location: Point(c), birth_time: s };
        if model.arrival_time(&g, &Point::ORIGIN) <= t {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let scale = box_volume * mass;
    (scale * p, scale * math::sqrt(p * (1.0 - p) / samples as f64))
}
