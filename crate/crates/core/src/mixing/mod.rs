//! Dependence bounds and their Monte Carlo counterparts.

pub mod bounds;
pub mod cone_check;
pub mod coupling;
pub mod events;

pub use bounds::{
    beta_lower, beta_upper_1d, beta_upper_enclosed, beta_upper_quadrant, bound_curve, series_poly_bound,
    series_superexp_bound, BoundCurve, BoundGeometry, SeriesOptions,
};
pub use cone_check::verify_cone_intersection;
pub use coupling::{estimate_coupling_delta, CouplingGeometry, CouplingReport, ProbeGrid};
pub use events::{covariance_decay, estimate_alpha_event, DecayCurve, EventGapEstimate};

use crate::field::PointField;
use crate::point::Point;

/// Spatial shift `S_h`: the shifted field read at `x` is the original read at `x + h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldShift {
    pub h: Point,
}

impl FieldShift {
    pub fn new(h: Point) -> Self {
        FieldShift { h }
    }

    pub fn apply<F: PointField>(&self, field: F) -> Shifted<F> {
        Shifted { inner: field, h: self.h }
    }
}

pub struct Shifted<F> {
    inner: F,
    h: Point,
}

impl<F: PointField> PointField for Shifted<F> {
    fn value_at(&self, x: &Point) -> Option<f64> {
        self.inner.value_at(&(*x + self.h))
    }
}

impl<F: PointField + ?Sized> PointField for &F {
    fn value_at(&self, x: &Point) -> Option<f64> {
        (**self).value_at(x)
    }
}
