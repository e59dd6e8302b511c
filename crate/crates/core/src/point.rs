use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::math;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// A point of R^d, d <= 3, stored padded with zeros.
///
/// Coordinates past the dimension in use are kept at exactly zero so that
/// norms and dot products need no dimension argument.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; MAX_DIM]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; MAX_DIM]);

    pub fn new1(x: f64) -> Self {
        Point([x, 0.0, 0.0])
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    /// Builds a point from 1 to 3 finite coordinates.
    pub fn from_slice(coords: &[f64]) -> Result<Self, Error> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::Dimension(coords.len()));
        }
        let mut p = [0.0; MAX_DIM];
        for (slot, &c) in p.iter_mut().zip(coords) {
            if !c.is_finite() {
                return Err(Error::NonFinite("point coordinate"));
            }
            *slot = c;
        }
        Ok(Point(p))
    }

    /// `value` along `axis`, zero elsewhere.
    pub fn axis(axis: usize, value: f64) -> Self {
        let mut p = [0.0; MAX_DIM];
        p[axis] = value;
        Point(p)
    }

    pub fn coords(&self, dim: usize) -> &[f64] {
        &self.0[..dim]
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.dot(self))
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// True when every coordinate at index >= `dim` is zero.
    pub fn fits_dim(&self, dim: usize) -> bool {
        self.0[dim.min(MAX_DIM)..].iter().all(|&c| c == 0.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}
