use alloc::vec::Vec;

use crate::point::Point;

/// Membership predicate on germ locations, used to build region-restricted fields.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionPredicate {
    All,
    /// Closed ball.
    Ball { center: Point, radius: f64 },
    /// `{ x : normal . x <= offset }`.
    HalfSpace { normal: Point, offset: f64 },
    /// d = 1: `(-inf, bound]` when `upper` is true, `[bound, inf)` otherwise.
    HalfLine { bound: f64, upper: bool },
    Intersection(Vec<RegionPredicate>),
    Union(Vec<RegionPredicate>),
    /// `{ x : max_i |x_i| > half_width }`.
    OutsideBox { half_width: f64 },
}

impl RegionPredicate {
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            RegionPredicate::All => true,
            RegionPredicate::Ball { center, radius } => x.distance(center) <= *radius,
            RegionPredicate::HalfSpace { normal, offset } => normal.dot(x) <= *offset,
            RegionPredicate::HalfLine { bound, upper } => {
                if *upper {
                    x.0[0] <= *bound
                } else {
                    x.0[0] >= *bound
                }
            }
            RegionPredicate::Intersection(parts) => parts.iter().all(|p| p.contains(x)),
            RegionPredicate::Union(parts) => parts.iter().any(|p| p.contains(x)),
            RegionPredicate::OutsideBox { half_width } => x.norm_inf() > *half_width,
        }
    }
}
