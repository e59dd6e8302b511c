//! The intensity measure `Lambda = lambda^d x m` and Poisson germ sampling on
//! bounded space-time windows.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::Error;
use crate::math;
use crate::model::Germ;
use crate::point::{Point, MAX_DIM};
use crate::rng::{self, Role};

/// Time component m of the intensity measure.
#[derive(Clone, Debug, PartialEq)]
pub enum BirthMeasure {
    /// m(dt) = alpha t^(beta - 1) dt.
    Power { alpha: f64, beta: f64 },
    /// Atoms `(t_i, w_i)` sorted by time.
    Discrete { atoms: Vec<(f64, f64)> },
}

impl BirthMeasure {
    pub fn power(alpha: f64, beta: f64) -> Result<Self, Error> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidMeasure("alpha and beta must be positive and finite"));
        }
        Ok(BirthMeasure::Power { alpha, beta })
    }

    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self, Error> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("discrete measure needs at least one atom"));
        }
        if atoms
            .iter()
            .any(|&(t, w)| !(t.is_finite() && t >= 0.0 && w.is_finite() && w > 0.0))
        {
            return Err(Error::InvalidMeasure("atoms need t >= 0 and w > 0"));
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(BirthMeasure::Discrete { atoms: sorted })
    }

    /// m([0, t]); atoms at exactly `t` are included.
    pub fn cumulative_mass(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            BirthMeasure::Power { alpha, beta } => alpha * math::powf(t, *beta) / beta,
            BirthMeasure::Discrete { atoms } => {
                atoms.iter().take_while(|a| a.0 <= t).map(|a| a.1).sum()
            }
        }
    }

    /// Draws a birth time from m restricted to `[0, horizon]` and normalised.
    /// Requires `cumulative_mass(horizon) > 0`.
    pub fn sample_time<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> f64 {
        match self {
            BirthMeasure::Power { beta, .. } => {
                let u: f64 = rng.random();
                horizon * math::powf(u, 1.0 / beta)
            }
            BirthMeasure::Discrete { atoms } => {
                let total = self.cumulative_mass(horizon);
                let mut u = rng.random::<f64>() * total;
                let live = atoms.iter().take_while(|a| a.0 <= horizon);
                let mut last = 0.0;
                for &(t, w) in live {
                    last = t;
                    if u < w {
                        return t;
                    }
                    u -= w;
                }
                last
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpatialRegion {
    Box { lo: Point, hi: Point },
    Ball { center: Point, radius: f64 },
}

/// Spatial region x `[0, horizon]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeWindow {
    dim: usize,
    region: SpatialRegion,
    horizon: f64,
}

impl SpaceTimeWindow {
    pub fn new(dim: usize, region: SpatialRegion, horizon: f64) -> Result<Self, Error> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(dim));
        }
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidWindow("time horizon must be finite and >= 0"));
        }
        match region {
            SpatialRegion::Box { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(Error::NonFinite("window bounds"));
                }
                if (0..dim).any(|i| lo.0[i] > hi.0[i]) {
                    return Err(Error::InvalidWindow("box lower corner exceeds upper corner"));
                }
            }
            SpatialRegion::Ball { center, radius } => {
                if !(center.is_finite() && radius.is_finite() && radius >= 0.0) {
                    return Err(Error::InvalidWindow("ball radius must be finite and >= 0"));
                }
            }
        }
        Ok(SpaceTimeWindow { dim, region, horizon })
    }

    pub fn ball(dim: usize, center: Point, radius: f64, horizon: f64) -> Result<Self, Error> {
        Self::new(dim, SpatialRegion::Ball { center, radius }, horizon)
    }

    pub fn cuboid(dim: usize, lo: Point, hi: Point, horizon: f64) -> Result<Self, Error> {
        Self::new(dim, SpatialRegion::Box { lo, hi }, horizon)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn region(&self) -> &SpatialRegion {
        &self.region
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn volume(&self) -> f64 {
        match self.region {
            SpatialRegion::Box { lo, hi } => (0..self.dim).map(|i| hi.0[i] - lo.0[i]).product(),
            SpatialRegion::Ball { radius, .. } => {
                math::unit_ball_volume(self.dim) * math::powi(radius, self.dim as i32)
            }
        }
    }

    pub fn contains(&self, g: &Germ) -> bool {
        let x = &g.location;
        let inside = match self.region {
            SpatialRegion::Box { lo, hi } => {
                (0..self.dim).all(|i| x.0[i] >= lo.0[i] && x.0[i] <= hi.0[i])
            }
            SpatialRegion::Ball { center, radius } => x.distance(&center) <= radius,
        };
        inside && x.fits_dim(self.dim) && g.birth_time >= 0.0 && g.birth_time <= self.horizon
    }

    fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut p = [0.0; MAX_DIM];
        match self.region {
            SpatialRegion::Box { lo, hi } => {
                for i in 0..self.dim {
                    p[i] = lo.0[i] + (hi.0[i] - lo.0[i]) * rng.random::<f64>();
                }
                Point(p)
            }
            SpatialRegion::Ball { center, radius } => loop {
                for c in p.iter_mut().take(self.dim) {
                    *c = 2.0 * rng.random::<f64>() - 1.0;
                }
                let q = Point(p);
                if q.dot(&q) <= 1.0 {
                    return center + q * radius;
                }
            },
        }
    }
}

/// A Poisson germ configuration. Germ `i` keeps index `i` for labelling and
/// tie-breaking.
#[derive(Clone, Debug, PartialEq)]
pub struct GermSample {
    pub germs: Vec<Germ>,
    pub window: SpaceTimeWindow,
    pub seed: u64,
    pub expected_count: f64,
}

/// Samples `N ~ Poisson(vol * m([0, T]))` germs with i.i.d. uniform locations and
/// birth times drawn from the normalised restriction of m.
pub fn sample_germs_with<R: Rng + ?Sized>(
    measure: &BirthMeasure,
    window: &SpaceTimeWindow,
    rng: &mut R,
) -> Vec<Germ> {
    let mean = window.volume() * measure.cumulative_mass(window.horizon());
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = match Poisson::new(mean) {
        Ok(p) => p.sample(rng) as usize,
        Err(_) => return Vec::new(),
    };
    (0..count)
        .map(|_| {
            let location = window.sample_location(rng);
            let birth_time = measure.sample_time(window.horizon(), rng);
            Germ { location, birth_time }
        })
        .collect()
}

/// Deterministic sample for `(measure, window, seed)`.
pub fn sample_germs(measure: &BirthMeasure, window: &SpaceTimeWindow, seed: u64) -> GermSample {
    let mut rng = rng::stream(seed, 0, Role::Germs);
    let germs = sample_germs_with(measure, window, &mut rng);
    GermSample {
        germs,
        window: *window,
        seed,
        expected_count: window.volume() * measure.cumulative_mass(window.horizon()),
    }
}
