//! Convex crystal shapes K described through their gauge (Minkowski) functional.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::point::{Point, MAX_DIM};
use crate::quad::{self, QuadOptions};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Facet {
    // Unit outward normal and support distance: the facet line is normal . x = offset.
    normal: [f64; 2],
    offset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeKind {
    Ball { radius: f64 },
    Box { half_widths: [f64; MAX_DIM] },
    /// Convex polygon (d = 2), vertices counter-clockwise.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A compact convex body K with the origin in its interior.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexShape {
    dim: usize,
    kind: ShapeKind,
    facets: Vec<Facet>,
    rho_min: f64,
    rho_max: f64,
    volume: f64,
}

fn check_dim(dim: usize) -> Result<(), Error> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

impl ConvexShape {
    pub fn ball(dim: usize, radius: f64) -> Result<Self, Error> {
        check_dim(dim)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidShape("ball radius must be positive and finite"));
        }
        Ok(ConvexShape {
            dim,
            kind: ShapeKind::Ball { radius },
            facets: Vec::new(),
            rho_min: radius,
            rho_max: radius,
            volume: math::unit_ball_volume(dim) * math::powi(radius, dim as i32),
        })
    }

    /// Axis-aligned box `[-h_1, h_1] x ... x [-h_d, h_d]`.
    pub fn cuboid(half_widths: &[f64]) -> Result<Self, Error> {
        let dim = half_widths.len();
        check_dim(dim)?;
        if half_widths.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidShape("box half-widths must be positive and finite"));
        }
        let mut h = [0.0; MAX_DIM];
        h[..dim].copy_from_slice(half_widths);
        let rho_min = half_widths.iter().copied().fold(f64::INFINITY, f64::min);
        let rho_max = math::sqrt(half_widths.iter().map(|x| x * x).sum());
        let volume = half_widths.iter().map(|x| 2.0 * x).product();
        Ok(ConvexShape {
            dim,
            kind: ShapeKind::Box { half_widths: h },
            facets: Vec::new(),
            rho_min,
            rho_max,
            volume,
        })
    }

    /// Convex polygon in the plane. Either orientation is accepted; the origin
    /// must lie strictly inside.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self, Error> {
        if vertices.len() < 3 {
            return Err(Error::InvalidShape("polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::NonFinite("polygon vertex"));
        }
        let n = vertices.len();
        let signed_area: f64 = (0..n)
            .map(|i| {
                let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
            * 0.5;
        if signed_area == 0.0 {
            return Err(Error::InvalidShape("degenerate polygon"));
        }
        let mut verts: Vec<[f64; 2]> = vertices.to_vec();
        if signed_area < 0.0 {
            verts.reverse();
        }
        let mut facets = Vec::with_capacity(n);
        for i in 0..n {
            let (p, q, r) = (verts[i], verts[(i + 1) % n], verts[(i + 2) % n]);
            let e1 = [q[0] - p[0], q[1] - p[1]];
            let e2 = [r[0] - q[0], r[1] - q[1]];
            if e1[0] * e2[1] - e1[1] * e2[0] <= 0.0 {
                return Err(Error::InvalidShape("polygon is not strictly convex"));
            }
            let len = math::sqrt(e1[0] * e1[0] + e1[1] * e1[1]);
            let normal = [e1[1] / len, -e1[0] / len];
            let offset = normal[0] * p[0] + normal[1] * p[1];
            if offset <= 0.0 {
                return Err(Error::InvalidShape("origin must lie strictly inside the polygon"));
            }
            facets.push(Facet { normal, offset });
        }
        let rho_min = facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
        let rho_max = verts
            .iter()
            .map(|v| math::sqrt(v[0] * v[0] + v[1] * v[1]))
            .fold(0.0, f64::max);
        let mut shape = ConvexShape {
            dim: 2,
            kind: ShapeKind::Polygon { vertices: verts },
            facets,
            rho_min,
            rho_max,
            volume: 0.0,
        };
        shape.volume = shape.angular_volume();
        Ok(shape)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    /// inf of the radial function.
    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    /// sup of the radial function.
    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Shape ratio `rho_max / rho_min` (the constant A bounding outer over inner diameter).
    pub fn shape_ratio(&self) -> f64 {
        self.rho_max / self.rho_min
    }

    /// Lebesgue measure of K.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Minkowski gauge `||x||_K = inf { s >= 0 : x in s K }`.
    pub fn gauge_norm(&self, x: &Point) -> f64 {
        match &self.kind {
            ShapeKind::Ball { radius } => x.norm() / radius,
            ShapeKind::Box { half_widths } => (0..self.dim)
                .map(|i| x.0[i].abs() / half_widths[i])
                .fold(0.0, f64::max),
            ShapeKind::Polygon { .. } => self
                .facets
                .iter()
                .map(|f| (f.normal[0] * x.0[0] + f.normal[1] * x.0[1]) / f.offset)
                .fold(0.0, f64::max),
        }
    }

    /// Radial function p(u): distance from 0 to the boundary of K along `u`.
    pub fn radial(&self, u: &Point) -> f64 {
        let n = u.norm();
        n / self.gauge_norm(u)
    }

    /// Polygon area as (1/2) * integral of p(theta)^2 over the circle,
    /// integrated sector by sector between consecutive vertices.
    fn angular_volume(&self) -> f64 {
        let ShapeKind::Polygon { vertices } = &self.kind else {
            return self.volume;
        };
        let n = vertices.len();
        let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, max_intervals: 200 };
        (0..n)
            .map(|i| {
                let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                let t0 = math::atan2(p[1], p[0]);
                let mut t1 = math::atan2(q[1], q[0]);
                if t1 <= t0 {
                    t1 += 2.0 * core::f64::consts::PI;
                }
                let f = |theta: f64| {
                    let r = self.radial(&Point::new2(math::cos(theta), math::sin(theta)));
                    0.5 * r * r
                };
                quad::integrate(f, t0, t1, &[], opts).value
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shoelace(v: &[[f64; 2]]) -> f64 {
        let n = v.len();
        0.5 * (0..n)
            .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
            .sum::<f64>()
            .abs()
    }

    #[test]
    fn volumes() {
        assert_eq!(ConvexShape::cuboid(&[1.0]).unwrap().volume(), 2.0);
        let disc = ConvexShape::ball(2, 1.0).unwrap();
        assert!((disc.volume() - core::f64::consts::PI).abs() < 1e-15);
        assert_eq!(ConvexShape::cuboid(&[1.0, 1.0]).unwrap().volume(), 4.0);
    }

    #[test]
    fn square_polygon_matches_polar_oracle() {
        let sq = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        let p = ConvexShape::polygon(&sq).unwrap();
        assert!((p.volume() - 4.0).abs() < 4e-8);
        assert!((p.rho_min() - 1.0).abs() < 1e-15);
        assert!((p.rho_max() - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn irregular_polygon_volume_vs_shoelace() {
        let v = [[2.0, -0.5], [1.5, 1.0], [-0.2, 1.7], [-1.0, 0.1], [-0.3, -1.2]];
        let p = ConvexShape::polygon(&v).unwrap();
        let exact = shoelace(&v);
        assert!(((p.volume() - exact) / exact).abs() < 1e-8);
        // clockwise input gives the same body
        let mut cw = v.to_vec();
        cw.reverse();
        assert_eq!(ConvexShape::polygon(&cw).unwrap().volume(), p.volume());
    }

    #[test]
    fn square_gauge_geometry() {
        let b = ConvexShape::cuboid(&[1.0, 1.0]).unwrap();
        assert_eq!(b.rho_min(), 1.0);
        assert!((b.rho_max() - core::f64::consts::SQRT_2).abs() < 1e-15);
        let diag = Point::new2(1.0, 1.0) * (1.0 / core::f64::consts::SQRT_2);
        assert!((b.radial(&diag) - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(b.radial(&Point::new2(0.0, 1.0)), 1.0);
    }

    #[test]
    fn polygon_rejects_origin_outside_and_nonconvex() {
        assert!(ConvexShape::polygon(&[[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]]).is_err());
        let dart = [[1.0, 0.0], [0.0, 0.2], [-1.0, 0.0], [0.0, 1.0]];
        assert!(ConvexShape::polygon(&dart).is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(ConvexShape::ball(4, 1.0).is_err());
        assert!(ConvexShape::ball(2, 0.0).is_err());
        assert!(ConvexShape::cuboid(&[1.0, -1.0]).is_err());
    }
}
