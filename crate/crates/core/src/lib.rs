//! Birth-and-growth crystallization fields.
//!
//! Germs `(x_g, t_g)` are born by a Poisson process with intensity
//! `lambda^d x m`; each germ's free crystal reaches `x` at time `A_g(x)`, and the
//! crystallization field is `xi(x) = inf_g A_g(x)`. This crate simulates `xi`
//! exactly on finite windows, evaluates the causal-cone measure `F(t)` and the
//! dependence bounds it controls, and estimates the matching Monte Carlo
//! quantities.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is injected
//! through [`exec::Executor`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assumptions;
pub mod birth;
pub mod cone;
pub mod error;
pub mod exec;
pub mod field;
pub mod math;
pub mod mixing;
pub mod model;
pub mod point;
pub mod quad;
pub mod region;
pub mod rng;
pub mod shape;
pub mod speed;
pub mod stats;

pub use birth::{sample_germs, BirthMeasure, GermSample, SpaceTimeWindow, SpatialRegion};
pub use cone::ConeMeasure;
pub use error::Error;
pub use exec::{Executor, Sequential};
pub use field::{FieldGrid, GridSpec};
pub use model::{Germ, GrowthModel};
pub use point::Point;
pub use region::RegionPredicate;
pub use shape::ConvexShape;
pub use speed::SpeedProfile;
