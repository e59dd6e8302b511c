//! Germs and free-crystal arrival times for the gauge/speed model family
//! `C_g(t) = x_g + (V(t) - V(t_g)) K`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::point::Point;
use crate::shape::ConvexShape;
use crate::speed::SpeedProfile;

/// A birth event of the Poisson process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Germ {
    pub location: Point,
    pub birth_time: f64,
}

impl Germ {
    pub fn new(location: Point, birth_time: f64) -> Result<Self, Error> {
        if !location.is_finite() || !birth_time.is_finite() {
            return Err(Error::NonFinite("germ"));
        }
        if birth_time < 0.0 {
            return Err(Error::InvalidArgument("germ birth time must be >= 0"));
        }
        Ok(Germ { location, birth_time })
    }

    /// Germ at the origin.
    pub fn at_origin(birth_time: f64) -> Self {
        Germ { location: Point::ORIGIN, birth_time }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthModel {
    shape: ConvexShape,
    speed: SpeedProfile,
    speed_bound: Option<f64>,
}

impl GrowthModel {
    pub fn new(shape: ConvexShape, speed: SpeedProfile) -> Self {
        let speed_bound = speed.speed_bound().map(|l| l * shape.rho_max());
        GrowthModel { shape, speed, speed_bound }
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn shape(&self) -> &ConvexShape {
        &self.shape
    }

    pub fn speed(&self) -> &SpeedProfile {
        &self.speed
    }

    /// Speed-bound constant M = sup(v) * rho_max.
    pub fn speed_bound(&self) -> Result<f64, Error> {
        self.speed_bound.ok_or(Error::UnboundedSpeed)
    }

    /// Shape ratio A = rho_max / rho_min.
    pub fn shape_ratio(&self) -> f64 {
        self.shape.shape_ratio()
    }

    /// Rejects models the exact simulator cannot handle (unbounded or
    /// non-monotone speed).
    pub fn ensure_simulable(&self) -> Result<(), Error> {
        if !self.speed.is_strictly_increasing() {
            return Err(Error::NonMonotoneSpeed);
        }
        self.speed_bound().map(|_| ())
    }

    /// A_g(x) = V^{-1}(||x - x_g||_K + V(t_g)).
    pub fn arrival_time(&self, g: &Germ, x: &Point) -> f64 {
        if *x == g.location {
            return g.birth_time;
        }
        let reach = self.shape.gauge_norm(&(*x - g.location));
        self.speed.inverse(reach + self.speed.distance(g.birth_time))
    }

    /// Whether `x` belongs to `{A_g <= t}`.
    pub fn crystal_contains(&self, g: &Germ, t: f64, x: &Point) -> bool {
        self.arrival_time(g, x) <= t
    }

    /// Membership in the geometric free crystal `x_g + (V(t) - V(t_g)) K`,
    /// independent of how V is inverted.
    pub fn free_crystal_contains(&self, g: &Germ, t: f64, x: &Point) -> bool {
        if t < g.birth_time {
            return false;
        }
        let scale = self.speed.distance(t) - self.speed.distance(g.birth_time);
        scale >= 0.0 && self.shape.gauge_norm(&(*x - g.location)) <= scale
    }

    fn grown(&self, g: &Germ, t: f64) -> Result<f64, Error> {
        if t < g.birth_time {
            return Err(Error::BeforeBirth { t, birth: g.birth_time });
        }
        Ok(self.speed.distance(t) - self.speed.distance(g.birth_time))
    }

    /// Exterior diameter D_g(t).
    pub fn outer_diameter(&self, g: &Germ, t: f64) -> Result<f64, Error> {
        Ok(2.0 * self.shape.rho_max() * self.grown(g, t)?)
    }

    /// Interior diameter d_g(t).
    pub fn inner_diameter(&self, g: &Germ, t: f64) -> Result<f64, Error> {
        Ok(2.0 * self.shape.rho_min() * self.grown(g, t)?)
    }

    /// M_g(r) = sup_{|x| = r} A_g(x) for a germ at the origin born at `birth_time`.
    pub fn sup_arrival(&self, birth_time: f64, r: f64) -> f64 {
        if r == 0.0 {
            return birth_time;
        }
        self.speed
            .inverse(r / self.shape.rho_min() + self.speed.distance(birth_time))
    }

    /// H(R) = M_{(0,R)}(R).
    pub fn localization_horizon(&self, radius: f64) -> f64 {
        self.sup_arrival(radius, radius)
    }
}
