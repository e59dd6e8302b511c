//! Monte Carlo coupling estimate of the mismatch probabilities
//! `delta_i = P(xi != eta_i somewhere on T_i)`.
//!
//! Probe values are exact: germs are drawn on the probe bounding box expanded by
//! `M T` times `[0, T]`, and every germ outside that window has `A_g > T` at
//! every probe. A replicate whose full field exceeds `T` at some probe is
//! dropped and counted.

use alloc::vec::Vec;

use serde::Serialize;

use crate::birth::{sample_germs_with, BirthMeasure, SpaceTimeWindow};
use crate::cone::ConeMeasure;
use crate::error::Error;
use crate::exec::Executor;
use crate::field::GermIndex;
use crate::math;
use crate::model::GrowthModel;
use crate::point::Point;
use crate::region::RegionPredicate;
use crate::rng::{self, Role};

/// Probability budget for a replicate's full field exceeding the horizon at any probe.
pub const HORIZON_BUDGET: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CouplingGeometry {
    /// `T1 = (-inf, 0]`, `T2 = [r, inf)`, split at `r / 2` (d = 1).
    HalfLines { r: f64 },
    /// `T1 = (-inf, 0]^d`, `T2 = prod [a_i, inf)` with `a_i = 2r / sqrt(d)`.
    Quadrant { r: f64 },
    /// `T1 = [-a, a]^d`, `T2` the complement of `[-b, b]^d`.
    Enclosed { a: f64, b: f64 },
}

impl CouplingGeometry {
    /// Band half-width r.
    pub fn r(&self, dim: usize) -> f64 {
        match *self {
            CouplingGeometry::HalfLines { r } | CouplingGeometry::Quadrant { r } => r,
            CouplingGeometry::Enclosed { a, b } => (b - 2.0 * a) * math::sqrt(dim as f64) / 4.0,
        }
    }

    /// Germ regions E1 and E2 feeding the surrogate fields.
    pub fn regions(&self, dim: usize) -> (RegionPredicate, RegionPredicate) {
        match *self {
            CouplingGeometry::HalfLines { r } => (
                RegionPredicate::HalfLine { bound: 0.5 * r, upper: true },
                RegionPredicate::HalfLine { bound: 0.5 * r, upper: false },
            ),
            CouplingGeometry::Quadrant { r } => {
                let e = diagonal(dim, 1.0 / math::sqrt(dim as f64));
                (
                    RegionPredicate::HalfSpace { normal: e, offset: r },
                    RegionPredicate::HalfSpace { normal: -e, offset: -r },
                )
            }
            CouplingGeometry::Enclosed { a, b } => {
                let level = (b + 2.0 * a) * math::sqrt(dim as f64) / 4.0;
                let normals = sign_vectors(dim);
                let inner = normals
                    .iter()
                    .map(|n| RegionPredicate::HalfSpace { normal: *n, offset: level })
                    .collect();
                let outer = normals
                    .iter()
                    .map(|n| RegionPredicate::HalfSpace { normal: -*n, offset: -level })
                    .collect();
                (RegionPredicate::Intersection(inner), RegionPredicate::Union(outer))
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<(), Error> {
        match *self {
            CouplingGeometry::HalfLines { r } => {
                if dim != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, found: dim });
                }
                positive(r)
            }
            CouplingGeometry::Quadrant { r } => positive(r),
            CouplingGeometry::Enclosed { a, b } => {
                if !(a >= 0.0 && b > 2.0 * a && b.is_finite()) {
                    return Err(Error::InvalidArgument("enclosed cubes need 0 <= 2a < b"));
                }
                Ok(())
            }
        }
    }
}

fn positive(r: f64) -> Result<(), Error> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("r must be positive and finite"))
    }
}

fn diagonal(dim: usize, v: f64) -> Point {
    let mut p = Point::ORIGIN;
    for a in 0..dim {
        p.0[a] = v;
    }
    p
}

/// Unit vectors `(alpha_1, ..., alpha_d) / sqrt(d)` for all sign patterns.
fn sign_vectors(dim: usize) -> Vec<Point> {
    let s = 1.0 / math::sqrt(dim as f64);
    (0..1usize << dim)
        .map(|mask| {
            let mut p = Point::ORIGIN;
            for a in 0..dim {
                p.0[a] = if mask >> a & 1 == 1 { -s } else { s };
            }
            p
        })
        .collect()
}

/// Finite probe subsets of T1 and T2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeGrid {
    pub t1: Vec<Point>,
    pub t2: Vec<Point>,
}

/// Offsets from the band, geometrically spaced on `[0, extent]`.
fn offsets(n: usize, extent: f64) -> Vec<f64> {
    const RATE: f64 = 0.15;
    if n <= 1 {
        return alloc::vec![0.0; n];
    }
    let top = math::exp(RATE * (n - 1) as f64) - 1.0;
    (0..n).map(|j| extent * (math::exp(RATE * j as f64) - 1.0) / top).collect()
}

impl ProbeGrid {
    /// Default probe layout with about `per_region` points in each of T1, T2,
    /// reaching `extent` away from the band.
    pub fn for_geometry(geometry: &CouplingGeometry, dim: usize, per_region: usize, extent: f64) -> Self {
        let n = per_region.max(1);
        match *geometry {
            CouplingGeometry::HalfLines { r } => {
                let o = offsets(n, extent);
                ProbeGrid {
                    t1: o.iter().map(|&x| Point::new1(-x)).collect(),
                    t2: o.iter().map(|&x| Point::new1(r + x)).collect(),
                }
            }
            CouplingGeometry::Quadrant { r } => {
                let corner = diagonal(dim, 2.0 * r / math::sqrt(dim as f64));
                let mut dirs = alloc::vec![diagonal(dim, 1.0 / math::sqrt(dim as f64))];
                for a in 0..dim {
                    dirs.push(Point::axis(a, 1.0));
                    let mut mixed = diagonal(dim, 1.0) + Point::axis(a, 1.0);
                    mixed = mixed * (1.0 / mixed.norm());
                    dirs.push(mixed);
                }
                let o = offsets(n, extent);
                let pick = |j: usize| dirs[j % dirs.len()] * o[j];
                ProbeGrid {
                    t1: (0..n).map(|j| -pick(j)).collect(),
                    t2: (0..n).map(|j| corner + pick(j)).collect(),
                }
            }
            CouplingGeometry::Enclosed { a, b } => {
                let side = (math::floor(math::powf(n as f64, 1.0 / dim as f64) + 1e-9) as usize).max(2);
                let total = side.pow(dim as u32);
                let t1 = (0..total)
                    .map(|mut flat| {
                        let mut p = Point::ORIGIN;
                        for ax in 0..dim {
                            let i = flat % side;
                            flat /= side;
                            p.0[ax] = -a + 2.0 * a * i as f64 / (side - 1) as f64;
                        }
                        p
                    })
                    .collect();
                let mut dirs: Vec<Point> = sign_vectors(dim).iter().map(|v| *v * math::sqrt(dim as f64)).collect();
                for ax in 0..dim {
                    dirs.push(Point::axis(ax, 1.0));
                    dirs.push(Point::axis(ax, -1.0));
                }
                let o = offsets(n, extent);
                let t2 = (0..n).map(|j| dirs[j % dirs.len()] * (b + o[j])).collect();
                ProbeGrid { t1, t2 }
            }
        }
    }

    fn bounding_box(&self, dim: usize) -> (Point, Point) {
        let mut lo = Point([f64::INFINITY; 3]);
        let mut hi = Point([f64::NEG_INFINITY; 3]);
        for p in self.t1.iter().chain(&self.t2) {
            for a in 0..dim {
                lo.0[a] = lo.0[a].min(p.0[a]);
                hi.0[a] = hi.0[a].max(p.0[a]);
            }
        }
        for a in dim..3 {
            lo.0[a] = 0.0;
            hi.0[a] = 0.0;
        }
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingReport {
    pub geometry: CouplingGeometry,
    pub r: f64,
    /// Replicates requested.
    pub replicates: usize,
    /// Replicates with every probe value within the horizon.
    pub used: usize,
    pub dropped: usize,
    pub mismatches1: u64,
    pub mismatches2: u64,
    pub delta1: f64,
    pub delta2: f64,
    /// 8 (delta1 + delta2).
    pub bound: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Standard error of `bound` from the per-replicate mismatch counts.
    pub sigma_bound: f64,
    /// Pearson correlation of `min(eta1, T)` at the first T1 probe with
    /// `min(eta2, T)` at the first T2 probe.
    pub eta_correlation: f64,
    pub horizon: f64,
    pub probes: ProbeGrid,
    /// Mismatch is only observed on the finite probe sets.
    pub probe_restricted: bool,
}

struct ReplicateOutcome {
    certified: bool,
    mismatch1: bool,
    mismatch2: bool,
    eta1: f64,
    eta2: f64,
}

/// Estimates the coupling mismatch frequencies on `probes` over `replicates`
/// independent germ samples.
pub fn estimate_coupling_delta<E: Executor>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    geometry: CouplingGeometry,
    probes: &ProbeGrid,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<CouplingReport, Error> {
    let dim = model.dim();
    geometry.validate(dim)?;
    model.ensure_simulable()?;
    if probes.t1.is_empty() || probes.t2.is_empty() {
        return Err(Error::InvalidArgument("probe sets must be non-empty"));
    }
    let m = model.speed_bound()?;
    let cone = ConeMeasure::new(model.clone(), measure.clone());
    let count = probes.t1.len() + probes.t2.len();
    let horizon = cone.quantile(HORIZON_BUDGET / count as f64)?;
    let (mut lo, mut hi) = probes.bounding_box(dim);
    for a in 0..dim {
        lo.0[a] -= m * horizon;
        hi.0[a] += m * horizon;
    }
    let window = SpaceTimeWindow::cuboid(dim, lo, hi, horizon)?;
    let (e1, e2) = geometry.regions(dim);

    let outcomes = exec.map(replicates, |i| {
        let mut rng = rng::stream(seed, i as u64, Role::Coupling);
        let germs = sample_germs_with(measure, &window, &mut rng);
        let full = GermIndex::new(model, &germs);
        let eta1 = GermIndex::filtered(model, &germs, |g| e1.contains(&g.location));
        let eta2 = GermIndex::filtered(model, &germs, |g| e2.contains(&g.location));
        let mut out = ReplicateOutcome { certified: true, mismatch1: false, mismatch2: false, eta1: horizon, eta2: horizon };
        for (set, index, flag) in [(&probes.t1, &eta1, 1), (&probes.t2, &eta2, 2)] {
            for (j, x) in set.iter().enumerate() {
                let Some((xi, _)) = full.nearest(x, horizon) else {
                    out.certified = false;
                    continue;
                };
                let eta = index.nearest(x, horizon).map(|(v, _)| v);
                if j == 0 {
                    let capped = eta.unwrap_or(horizon);
                    if flag == 1 {
                        out.eta1 = capped;
                    } else {
                        out.eta2 = capped;
                    }
                }
                if eta != Some(xi) {
                    if flag == 1 {
                        out.mismatch1 = true;
                    } else {
                        out.mismatch2 = true;
                    }
                }
            }
        }
        out
    });

    let used: Vec<&ReplicateOutcome> = outcomes.iter().filter(|o| o.certified).collect();
    let n = used.len();
    let mismatches1 = used.iter().filter(|o| o.mismatch1).count() as u64;
    let mismatches2 = used.iter().filter(|o| o.mismatch2).count() as u64;
    let nf = n.max(1) as f64;
    let delta1 = mismatches1 as f64 / nf;
    let delta2 = mismatches2 as f64 / nf;
    let sums: Vec<f64> = used.iter().map(|o| o.mismatch1 as u8 as f64 + o.mismatch2 as u8 as f64).collect();
    let mean = sums.iter().sum::<f64>() / nf;
    let var = sums.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / nf;
    let e1v: Vec<f64> = used.iter().map(|o| o.eta1).collect();
    let e2v: Vec<f64> = used.iter().map(|o| o.eta2).collect();
    Ok(CouplingReport {
        geometry,
        r: geometry.r(dim),
        replicates,
        used: n,
        dropped: replicates - n,
        mismatches1,
        mismatches2,
        delta1,
        delta2,
        bound: 8.0 * (delta1 + delta2),
        sigma1: crate::stats::binomial_sigma(delta1, n.max(1)),
        sigma2: crate::stats::binomial_sigma(delta2, n.max(1)),
        sigma_bound: 8.0 * math::sqrt(var / nf),
        eta_correlation: pearson(&e1v, &e2v),
        horizon,
        probes: probes.clone(),
        probe_restricted: true,
    })
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / math::sqrt(sxx * syy)
    }
}
