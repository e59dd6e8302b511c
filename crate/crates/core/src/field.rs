//! Exact finite-window simulation of `xi(x) = inf_g A_g(x)`.
//!
//! Germs are drawn on `ball(0, (M+1) H(R_c)) x [0, H(R_c)]`, where `R_c` is the
//! certification radius. Whenever the simulated `xi(0) <= R_c`, every value on
//! `|x| <= R_c` equals the untruncated field; the window cube `[-R, R]^d` is
//! covered by taking `R_c = R sqrt(d)`.

use alloc::vec::Vec;

use crate::birth::{sample_germs_with, BirthMeasure, SpaceTimeWindow};
use crate::error::Error;
use crate::exec::{Executor, Sequential};
use crate::math;
use crate::model::{Germ, GrowthModel};
use crate::point::{Point, MAX_DIM};
use crate::region::RegionPredicate;
use crate::rng::{self, Role};

/// Label value for grid points no germ reached.
pub const ABSENT_LABEL: u32 = u32::MAX;

// Relative slack applied when pruning with the speed bound, so that rounding in
// A_g can never hide a germ whose computed arrival is within the cutoff.
const PRUNE_SLACK: f64 = 1e-12;

/// Uniform bucket grid over germ locations with exact speed-bound pruning.
pub struct GermIndex<'a> {
    model: &'a GrowthModel,
    germs: &'a [Germ],
    dim: usize,
    ids: Vec<u32>,
    starts: Vec<u32>,
    min_birth: Vec<f64>,
    lo: [f64; MAX_DIM],
    cell: f64,
    dims: [usize; MAX_DIM],
    inv_speed: f64,
}

impl<'a> GermIndex<'a> {
    pub fn new(model: &'a GrowthModel, germs: &'a [Germ]) -> Self {
        Self::filtered(model, germs, |_| true)
    }

    /// Index over the germs accepted by `keep`; labels still refer to positions in `germs`.
    pub fn filtered<P: Fn(&Germ) -> bool>(model: &'a GrowthModel, germs: &'a [Germ], keep: P) -> Self {
        let dim = model.dim();
        let chosen: Vec<u32> = (0..germs.len() as u32).filter(|&i| keep(&germs[i as usize])).collect();
        let inv_speed = model.speed_bound().map(|m| 1.0 / m).unwrap_or(0.0);
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        if let Some(&first) = chosen.first() {
            lo = germs[first as usize].location.0;
            hi = lo;
            for &i in &chosen {
                let p = germs[i as usize].location.0;
                for a in 0..dim {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        let n = chosen.len().max(1);
        let extent: Vec<f64> = (0..dim).map(|a| (hi[a] - lo[a]).max(1e-9)).collect();
        let box_volume: f64 = extent.iter().product();
        let mut cell = math::powf(2.0 * box_volume / n as f64, 1.0 / dim as f64);
        let mut dims = [1usize; MAX_DIM];
        loop {
            let mut total = 1usize;
            for a in 0..dim {
                dims[a] = (math::ceil(extent[a] / cell) as usize).max(1);
                total = total.saturating_mul(dims[a]);
            }
            if total <= 4 * n + 8 {
                break;
            }
            cell *= 1.25;
        }
        let cells: usize = dims[..dim].iter().product();
        let mut counts = alloc::vec![0u32; cells + 1];
        let cell_of: Vec<usize> = chosen
            .iter()
            .map(|&i| Self::cell_index_for(&germs[i as usize].location, dim, &lo, cell, &dims))
            .collect();
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for c in 0..cells {
            counts[c + 1] += counts[c];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut ids = alloc::vec![0u32; chosen.len()];
        let mut min_birth = alloc::vec![f64::INFINITY; cells];
        for (&i, &c) in chosen.iter().zip(&cell_of) {
            ids[fill[c] as usize] = i;
            fill[c] += 1;
            min_birth[c] = min_birth[c].min(germs[i as usize].birth_time);
        }
        GermIndex { model, germs, dim, ids, starts, min_birth, lo, cell, dims, inv_speed }
    }

    fn cell_index_for(p: &Point, dim: usize, lo: &[f64; MAX_DIM], cell: f64, dims: &[usize; MAX_DIM]) -> usize {
        let mut idx = 0usize;
        for a in 0..dim {
            let c = math::floor((p.0[a] - lo[a]) / cell);
            let c = if c < 0.0 { 0 } else { (c as usize).min(dims[a] - 1) };
            idx = idx * dims[a] + c;
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Euclidean distance from `x` to the box of cell `m`.
    fn cell_distance(&self, x: &Point, m: &[usize; MAX_DIM]) -> f64 {
        let mut s = 0.0;
        for a in 0..self.dim {
            let l = self.lo[a] + m[a] as f64 * self.cell;
            let h = l + self.cell;
            let v = x.0[a];
            let d = if v < l {
                l - v
            } else if v > h {
                v - h
            } else {
                0.0
            };
            s += d * d;
        }
        math::sqrt(s)
    }

    fn visit_ring<F: FnMut(&[usize; MAX_DIM])>(&self, centre: &[usize; MAX_DIM], k: usize, f: &mut F) {
        let mut m = [0usize; MAX_DIM];
        self.ring_axis(centre, k, 0, false, &mut m, f);
    }

    fn ring_axis<F: FnMut(&[usize; MAX_DIM])>(
        &self,
        centre: &[usize; MAX_DIM],
        k: usize,
        axis: usize,
        on_ring: bool,
        m: &mut [usize; MAX_DIM],
        f: &mut F,
    ) {
        if axis == self.dim {
            if on_ring {
                f(m);
            }
            return;
        }
        let c = centre[axis] as isize;
        let k = k as isize;
        let top = self.dims[axis] as isize - 1;
        let last = axis + 1 == self.dim;
        let visit = |i: isize, m: &mut [usize; MAX_DIM], f: &mut F| {
            if i < 0 || i > top {
                return;
            }
            m[axis] = i as usize;
            let hit = on_ring || (i - c).abs() == k;
            self.ring_axis(centre, k as usize, axis + 1, hit, m, f);
        };
        if last && !on_ring {
            visit(c - k, m, f);
            if k != 0 {
                visit(c + k, m, f);
            }
        } else {
            for i in (c - k).max(0)..=(c + k).min(top) {
                visit(i, m, f);
            }
        }
    }

    /// Smallest arrival time at `x` among indexed germs, if it is `<= limit`,
    /// together with the germ's index. Ties go to the smallest index.
    pub fn nearest(&self, x: &Point, limit: f64) -> Option<(f64, u32)> {
        if self.ids.is_empty() {
            return None;
        }
        let mut centre = [0usize; MAX_DIM];
        let mut max_ring = 0usize;
        for a in 0..self.dim {
            let c = math::floor((x.0[a] - self.lo[a]) / self.cell);
            let c = if c < 0.0 { 0 } else { (c as usize).min(self.dims[a] - 1) };
            centre[a] = c;
            max_ring = max_ring.max(c).max(self.dims[a] - 1 - c);
        }
        let mut best = f64::INFINITY;
        let mut best_id = u32::MAX;
        for k in 0..=max_ring {
            let cutoff = best.min(limit);
            let slack = PRUNE_SLACK * cutoff.abs();
            let ring_bound = k.saturating_sub(1) as f64 * self.cell * self.inv_speed;
            if ring_bound > cutoff + slack {
                break;
            }
            self.visit_ring(&centre, k, &mut |m| {
                let cutoff = best.min(limit);
                let slack = PRUNE_SLACK * cutoff.abs();
                let mut flat = 0usize;
                for a in 0..self.dim {
                    flat = flat * self.dims[a] + m[a];
                }
                let (s, e) = (self.starts[flat] as usize, self.starts[flat + 1] as usize);
                if s == e {
                    return;
                }
                let lb = self.min_birth[flat] + self.cell_distance(x, m) * self.inv_speed;
                if lb > cutoff + slack {
                    return;
                }
                for &id in &self.ids[s..e] {
                    let a = self.model.arrival_time(&self.germs[id as usize], x);
                    if a <= limit && (a < best || (a == best && id < best_id)) {
                        best = a;
                        best_id = id;
                    }
                }
            });
        }
        (best_id != u32::MAX).then_some((best, best_id))
    }
}

/// Minimum over `germs` by exhaustive scan; the reference the index must reproduce.
pub fn brute_force_nearest(model: &GrowthModel, germs: &[Germ], x: &Point) -> Option<(f64, u32)> {
    let mut best: Option<(f64, u32)> = None;
    for (i, g) in germs.iter().enumerate() {
        let a = model.arrival_time(g, x);
        if best.is_none_or(|(b, _)| a < b) {
            best = Some((a, i as u32));
        }
    }
    best
}

/// Regular lattice of cell centres over an axis-aligned box. Flat indices are
/// row-major with the last axis varying fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub lo: Point,
    pub hi: Point,
    pub resolution: [u32; MAX_DIM],
}

impl GridSpec {
    pub fn new(dim: usize, lo: Point, hi: Point, resolution: &[u32]) -> Result<Self, Error> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(dim));
        }
        if resolution.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: resolution.len() });
        }
        if resolution.iter().any(|&r| r == 0) {
            return Err(Error::InvalidArgument("resolution must be >= 1 per axis"));
        }
        if (0..dim).any(|a| !(hi.0[a] > lo.0[a])) {
            return Err(Error::InvalidWindow("grid box must have positive extent"));
        }
        let mut res = [1u32; MAX_DIM];
        res[..dim].copy_from_slice(resolution);
        Ok(GridSpec { dim, lo, hi, resolution: res })
    }

    /// Cell-centre lattice over `[-half, half]^d`.
    pub fn cube(dim: usize, half: f64, resolution: &[u32]) -> Result<Self, Error> {
        if !(half.is_finite() && half > 0.0) {
            return Err(Error::InvalidWindow("window radius must be positive and finite"));
        }
        let mut lo = Point::ORIGIN;
        let mut hi = Point::ORIGIN;
        for a in 0..dim.min(MAX_DIM) {
            lo.0[a] = -half;
            hi.0[a] = half;
        }
        Self::new(dim, lo, hi, resolution)
    }

    pub fn len(&self) -> usize {
        self.resolution[..self.dim].iter().map(|&r| r as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut m = [0usize; MAX_DIM];
        for a in (0..self.dim).rev() {
            let r = self.resolution[a] as usize;
            m[a] = flat % r;
            flat /= r;
        }
        m
    }

    pub fn flat_index(&self, m: &[usize; MAX_DIM]) -> usize {
        (0..self.dim).fold(0, |acc, a| acc * self.resolution[a] as usize + m[a])
    }

    pub fn point(&self, flat: usize) -> Point {
        let m = self.multi_index(flat);
        let mut p = Point::ORIGIN;
        for a in 0..self.dim {
            let step = (self.hi.0[a] - self.lo.0[a]) / self.resolution[a] as f64;
            p.0[a] = self.lo.0[a] + (m[a] as f64 + 0.5) * step;
        }
        p
    }
}

/// Truncation parameters for a certification radius `R_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub certification_radius: f64,
    /// H(R_c).
    pub horizon: f64,
    /// (M + 1) H(R_c).
    pub radius: f64,
}

impl Truncation {
    pub fn new(model: &GrowthModel, certification_radius: f64) -> Result<Self, Error> {
        let m = model.speed_bound()?;
        let horizon = model.localization_horizon(certification_radius);
        Ok(Truncation { certification_radius, horizon, radius: (m + 1.0) * horizon })
    }

    pub fn window(&self, dim: usize) -> Result<SpaceTimeWindow, Error> {
        SpaceTimeWindow::ball(dim, Point::ORIGIN, self.radius, self.horizon)
    }
}

/// Sampled field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub grid: GridSpec,
    /// Crystallization times; NaN where nothing arrived by the horizon.
    pub values: Vec<f64>,
    /// Winning germ index; [`ABSENT_LABEL`] where nothing arrived.
    pub labels: Vec<u32>,
    pub certified: bool,
    pub seed: u64,
    pub replicate: u64,
    /// Half-width R of the window cube.
    pub window_radius: f64,
    pub truncation: Truncation,
    /// Simulated xi(0) when it is within the horizon.
    pub origin_value: Option<f64>,
    pub germ_count: usize,
    /// Radius doublings performed by [`adaptive_certify`].
    pub doublings: u32,
}

impl FieldGrid {
    pub fn value(&self, flat: usize) -> Option<f64> {
        let v = self.values[flat];
        (!v.is_nan()).then_some(v)
    }

    pub fn label(&self, flat: usize) -> Option<u32> {
        let l = self.labels[flat];
        (l != ABSENT_LABEL).then_some(l)
    }
}

/// Evaluates the truncated infimum at every grid point; values above `horizon`
/// are reported absent.
pub fn evaluate_grid<E: Executor>(
    model: &GrowthModel,
    germs: &[Germ],
    grid: &GridSpec,
    horizon: f64,
    exec: &E,
) -> (Vec<f64>, Vec<u32>) {
    let index = GermIndex::new(model, germs);
    let cells = exec.map(grid.len(), |i| index.nearest(&grid.point(i), horizon));
    cells
        .into_iter()
        .map(|c| match c {
            Some((v, l)) => (v, l),
            None => (f64::NAN, ABSENT_LABEL),
        })
        .unzip()
}

fn run_once<E: Executor>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    grid: &GridSpec,
    window_radius: f64,
    certification_radius: f64,
    seed: u64,
    replicate: u64,
    role: Role,
    exec: &E,
) -> Result<FieldGrid, Error> {
    let truncation = Truncation::new(model, certification_radius)?;
    let window = truncation.window(model.dim())?;
    let mut rng = rng::stream(seed, replicate, role);
    let germs = sample_germs_with(measure, &window, &mut rng);
    let index = GermIndex::new(model, &germs);
    let origin_value = index.nearest(&Point::ORIGIN, truncation.horizon).map(|(v, _)| v);
    let certified = origin_value.is_some_and(|v| v <= certification_radius);
    let (values, labels) = evaluate_grid(model, &germs, grid, truncation.horizon, exec);
    Ok(FieldGrid {
        grid: *grid,
        values,
        labels,
        certified,
        seed,
        replicate,
        window_radius,
        truncation,
        origin_value,
        germ_count: germs.len(),
        doublings: 0,
    })
}

fn check_inputs(model: &GrowthModel, radius: f64, resolution: &[u32]) -> Result<GridSpec, Error> {
    model.ensure_simulable()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument("window radius must be positive and finite"));
    }
    GridSpec::cube(model.dim(), radius, resolution)
}

/// One realization of the field on the cell-centre grid over `[-R, R]^d`.
pub fn simulate_field(
    model: &GrowthModel,
    measure: &BirthMeasure,
    radius: f64,
    resolution: &[u32],
    seed: u64,
) -> Result<FieldGrid, Error> {
    simulate_replicate(model, measure, radius, resolution, seed, 0, &Sequential)
}

/// Replicate `replicate` of a seeded experiment; grid points are spread over `exec`.
pub fn simulate_replicate<E: Executor>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    radius: f64,
    resolution: &[u32],
    seed: u64,
    replicate: u64,
    exec: &E,
) -> Result<FieldGrid, Error> {
    let grid = check_inputs(model, radius, resolution)?;
    let rc = radius * math::sqrt(model.dim() as f64);
    run_once(model, measure, &grid, radius, rc, seed, replicate, Role::Germs, exec)
}

/// Re-runs with a doubled certification radius (fresh stream per attempt)
/// until certified or `max_doublings` is spent. Output stays on the original window.
pub fn adaptive_certify<E: Executor>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    radius: f64,
    resolution: &[u32],
    seed: u64,
    replicate: u64,
    max_doublings: u32,
    exec: &E,
) -> Result<FieldGrid, Error> {
    let grid = check_inputs(model, radius, resolution)?;
    let base = radius * math::sqrt(model.dim() as f64);
    let mut attempt = 0u32;
    loop {
        let role = if attempt == 0 { Role::Germs } else { Role::Retry(attempt.min(31) as u8) };
        let rc = base * math::powi(2.0, attempt as i32);
        let mut field = run_once(model, measure, &grid, radius, rc, seed, replicate, role, exec)?;
        field.doublings = attempt;
        if field.certified || attempt >= max_doublings {
            return Ok(field);
        }
        attempt += 1;
    }
}

/// `min A_g(x)` over germs located in `region`, at each of `points`.
pub fn restricted_field(
    model: &GrowthModel,
    germs: &[Germ],
    region: &RegionPredicate,
    points: &[Point],
) -> Vec<Option<f64>> {
    let index = GermIndex::filtered(model, germs, |g| region.contains(&g.location));
    points
        .iter()
        .map(|x| index.nearest(x, f64::INFINITY).map(|(v, _)| v))
        .collect()
}

/// Johnson–Mehl mosaic: winning germ per grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct MosaicLabels {
    pub resolution: [u32; MAX_DIM],
    pub dim: usize,
    pub labels: Vec<Option<u32>>,
}

pub fn mosaic_labels(field: &FieldGrid) -> MosaicLabels {
    MosaicLabels {
        resolution: field.grid.resolution,
        dim: field.grid.dim,
        labels: (0..field.labels.len()).map(|i| field.label(i)).collect(),
    }
}

/// A realization evaluable at arbitrary points.
pub trait PointField {
    fn value_at(&self, x: &Point) -> Option<f64>;
}

/// Field generated by a fixed germ configuration.
pub struct GermField<'a> {
    index: GermIndex<'a>,
}

impl<'a> GermField<'a> {
    pub fn new(model: &'a GrowthModel, germs: &'a [Germ]) -> Self {
        GermField { index: GermIndex::new(model, germs) }
    }
}

impl PointField for GermField<'_> {
    fn value_at(&self, x: &Point) -> Option<f64> {
        self.index.nearest(x, f64::INFINITY).map(|(v, _)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Role};
    use crate::shape::ConvexShape;
    use crate::speed::SpeedProfile;
    use rand::Rng;

    fn disc() -> GrowthModel {
        GrowthModel::new(ConvexShape::ball(2, 1.0).unwrap(), SpeedProfile::constant(1.0).unwrap())
    }

    fn linear_1d() -> GrowthModel {
        GrowthModel::new(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::constant(1.0).unwrap())
    }

    #[test]
    fn index_matches_brute_force() {
        let models = [
            disc(),
            linear_1d(),
            GrowthModel::new(
                ConvexShape::polygon(&[[2.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -0.5]]).unwrap(),
                SpeedProfile::tabulated(&[(0.0, 0.0), (1.0, 0.5), (2.0, 2.5)]).unwrap(),
            ),
            GrowthModel::new(ConvexShape::cuboid(&[1.0, 0.5, 2.0]).unwrap(), SpeedProfile::constant(0.7).unwrap()),
        ];
        for (k, model) in models.iter().enumerate() {
            let mut r = stream(k as u64, 0, Role::Germs);
            let d = model.dim();
            let germs: Vec<Germ> = (0..300)
                .map(|_| {
                    let mut p = Point::ORIGIN;
                    for a in 0..d {
                        p.0[a] = 10.0 * r.random::<f64>() - 5.0;
                    }
                    Germ { location: p, birth_time: 3.0 * r.random::<f64>() }
                })
                .collect();
            let index = GermIndex::new(model, &germs);
            for _ in 0..200 {
                let mut x = Point::ORIGIN;
                for a in 0..d {
                    x.0[a] = 16.0 * r.random::<f64>() - 8.0;
                }
                assert_eq!(index.nearest(&x, f64::INFINITY), brute_force_nearest(model, &germs, &x));
            }
        }
    }

    #[test]
    fn unbounded_speed_index_still_exact() {
        let model = GrowthModel::new(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::power(1.0, 2.0).unwrap());
        let germs: Vec<Germ> = (0..50)
            .map(|i| Germ { location: Point::new1(i as f64 * 0.37 - 9.0), birth_time: (i % 7) as f64 * 0.3 })
            .collect();
        let index = GermIndex::new(&model, &germs);
        for i in 0..40 {
            let x = Point::new1(i as f64 * 0.5 - 10.0);
            assert_eq!(index.nearest(&x, f64::INFINITY), brute_force_nearest(&model, &germs, &x));
        }
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let model = linear_1d();
        let germs = [Germ::new(Point::new1(1.0), 0.0).unwrap(), Germ::new(Point::new1(-1.0), 0.0).unwrap()];
        let grid = GridSpec::cube(1, 2.0, &[2]).unwrap();
        // cell centres -1 and 1; evaluate at 0 through an explicit grid of one cell
        let mid = GridSpec::new(1, Point::new1(-0.5), Point::new1(0.5), &[1]).unwrap();
        let (v, l) = evaluate_grid(&model, &germs, &mid, 10.0, &Sequential);
        assert_eq!((v[0], l[0]), (1.0, 0));
        let (_, l2) = evaluate_grid(&model, &germs, &grid, 10.0, &Sequential);
        assert_eq!(l2, [1, 0]);
    }

    #[test]
    fn single_germ_field_is_its_arrival_function() {
        let model = disc();
        let g = Germ::new(Point::new2(0.3, -0.2), 0.4).unwrap();
        let grid = GridSpec::cube(2, 1.0, &[8, 8]).unwrap();
        let (v, l) = evaluate_grid(&model, &[g], &grid, 100.0, &Sequential);
        for i in 0..grid.len() {
            assert_eq!(v[i], model.arrival_time(&g, &grid.point(i)));
            assert_eq!(l[i], 0);
        }
    }

    #[test]
    fn empty_sample_gives_absent_uncertified_grid() {
        let model = disc();
        let measure = BirthMeasure::discrete(&[(1e6, 1.0)]).unwrap();
        let f = simulate_field(&model, &measure, 1.0, &[4, 4], 3).unwrap();
        assert_eq!(f.germ_count, 0);
        assert!(!f.certified);
        assert!(f.values.iter().all(|v| v.is_nan()));
        assert!(f.labels.iter().all(|&l| l == ABSENT_LABEL));
        assert_eq!(mosaic_labels(&f).labels, alloc::vec![None; 16]);
    }

    #[test]
    fn grid_indexing_round_trip() {
        let g = GridSpec::cube(3, 1.0, &[2, 3, 4]).unwrap();
        assert_eq!(g.len(), 24);
        for i in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(i)), i);
        }
        assert_eq!(g.multi_index(1), [0, 0, 1]);
        let p = g.point(0);
        assert!((p.0[0] + 0.5).abs() < 1e-15 && (p.0[2] + 0.75).abs() < 1e-15);
        assert!(GridSpec::cube(2, 1.0, &[0, 3]).is_err());
    }

    #[test]
    fn first_adaptive_attempt_equals_plain_simulation() {
        let model = disc();
        let measure = BirthMeasure::power(1.0, 1.0).unwrap();
        let plain = simulate_field(&model, &measure, 1.5, &[6, 6], 11).unwrap();
        let adaptive = adaptive_certify(&model, &measure, 1.5, &[6, 6], 11, 0, 3, &Sequential).unwrap();
        assert!(plain.certified);
        assert_eq!(plain, adaptive);
    }

    #[test]
    fn restricted_field_examples() {
        let model = linear_1d();
        let germs = [
            Germ::new(Point::new1(-2.0), 0.5).unwrap(),
            Germ::new(Point::new1(3.0), 0.1).unwrap(),
        ];
        let pts = [Point::new1(0.0), Point::new1(2.5)];
        let all = restricted_field(&model, &germs, &RegionPredicate::All, &pts);
        for (x, v) in pts.iter().zip(&all) {
            assert_eq!(*v, brute_force_nearest(&model, &germs, x).map(|p| p.0));
        }
        let none = restricted_field(&model, &germs, &RegionPredicate::OutsideBox { half_width: 10.0 }, &pts);
        assert_eq!(none, [None, None]);
        let left = restricted_field(&model, &germs, &RegionPredicate::HalfLine { bound: 0.0, upper: true }, &pts);
        assert_eq!(left, [Some(2.5), Some(5.0)]);
    }

    #[test]
    fn unsimulable_models_are_rejected() {
        let bad = GrowthModel::new(ConvexShape::cuboid(&[1.0]).unwrap(), SpeedProfile::power(1.0, 2.0).unwrap());
        let m = BirthMeasure::power(1.0, 1.0).unwrap();
        assert_eq!(simulate_field(&bad, &m, 1.0, &[4], 0).unwrap_err(), Error::UnboundedSpeed);
    }
}
