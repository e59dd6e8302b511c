//! Sampled numerical checks of the structural assumptions on free crystals.
//!
//! Each assumption is tested at randomized germs, points and times. A check
//! produces a normalised residual; the assumption passes when the worst
//! residual is at most its threshold. Failures never abort the run.

use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::math;
use crate::model::{Germ, GrowthModel};
use crate::point::Point;
use crate::rng::{self, Role, StreamRng};

/// Sampling plan for [`check_assumptions`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSpec {
    pub germs: usize,
    pub points: usize,
    pub times: usize,
    pub seed: u64,
    /// Relative tolerance.
    pub tolerance: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { germs: 16, points: 16, times: 8, seed: 0, tolerance: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AssumptionId {
    Translation,
    BirthFirst,
    Nesting,
    Continuity,
    SpeedBound,
    Coverage,
    Epigraph,
    Overtaking1d,
    NonDegenerate,
    DiameterGrowth,
}

impl AssumptionId {
    pub const ALL: [AssumptionId; 10] = [
        AssumptionId::Translation,
        AssumptionId::BirthFirst,
        AssumptionId::Nesting,
        AssumptionId::Continuity,
        AssumptionId::SpeedBound,
        AssumptionId::Coverage,
        AssumptionId::Epigraph,
        AssumptionId::Overtaking1d,
        AssumptionId::NonDegenerate,
        AssumptionId::DiameterGrowth,
    ];

    /// Short label: "1" .. "9" and "7a".
    pub fn label(self) -> &'static str {
        match self {
            AssumptionId::Translation => "1",
            AssumptionId::BirthFirst => "2",
            AssumptionId::Nesting => "3",
            AssumptionId::Continuity => "4",
            AssumptionId::SpeedBound => "5",
            AssumptionId::Coverage => "6",
            AssumptionId::Epigraph => "7",
            AssumptionId::Overtaking1d => "7a",
            AssumptionId::NonDegenerate => "8",
            AssumptionId::DiameterGrowth => "9",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            AssumptionId::Translation => "translation covariance A_(x_g,t_g)(x) = A_(0,t_g)(x - x_g)",
            AssumptionId::BirthFirst => "A_g(x_g) = t_g and A_g >= t_g",
            AssumptionId::Nesting => "C_g(s) inside the interior of C_g(t) for s < t",
            AssumptionId::Continuity => "x -> A_g(x) continuous (sampled modulus)",
            AssumptionId::SpeedBound => "A_g(x) >= t_g + |x - x_g| / M",
            AssumptionId::Coverage => "every ball is eventually covered",
            AssumptionId::Epigraph => "g1 in epigraph of A_g implies A_g <= A_g1",
            AssumptionId::Overtaking1d => "one-sided overtaking is permanent (d = 1)",
            AssumptionId::NonDegenerate => "D_g(t) <= A d_g(t)",
            AssumptionId::DiameterGrowth => "D_g(t + h) <= D_g(t) + D_(0,t)(t + h)",
        }
    }
}

/// Configuration at which the worst residual was observed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub germ: Germ,
    pub other_germ: Option<Germ>,
    pub point: Option<Point>,
    pub times: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionResult {
    pub id: AssumptionId,
    pub applicable: bool,
    pub passed: bool,
    pub checks: u64,
    pub worst_residual: f64,
    pub threshold: f64,
    pub witness: Option<Witness>,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub results: Vec<AssumptionResult>,
    pub tolerance: f64,
    pub seed: u64,
}

impl AssumptionReport {
    /// True when every applicable assumption passed.
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| !r.applicable || r.passed)
    }

    pub fn get(&self, id: AssumptionId) -> Option<&AssumptionResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionResult> {
        self.results.iter().filter(|r| r.applicable && !r.passed)
    }

    /// Number of (germ, point, time) triples examined by the nesting check.
    pub fn sampled_triples(&self) -> u64 {
        self.get(AssumptionId::Nesting).map_or(0, |r| r.checks)
    }
}

struct Tracker {
    id: AssumptionId,
    threshold: f64,
    checks: u64,
    worst: f64,
    witness: Option<Witness>,
}

impl Tracker {
    fn new(id: AssumptionId, threshold: f64) -> Self {
        Tracker { id, threshold, checks: 0, worst: f64::NEG_INFINITY, witness: None }
    }

    fn record(&mut self, residual: f64, witness: impl FnOnce() -> Witness) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks += 1;
        if residual > self.worst || self.witness.is_none() {
            self.worst = residual;
            let mut w = witness();
            w.residual = residual;
            self.witness = Some(w);
        }
    }

    fn finish(self, note: &'static str) -> AssumptionResult {
        let passed = self.checks > 0 && self.worst <= self.threshold;
        AssumptionResult {
            id: self.id,
            applicable: true,
            passed,
            checks: self.checks,
            worst_residual: if self.checks == 0 { 0.0 } else { self.worst },
            threshold: self.threshold,
            witness: self.witness,
            note,
        }
    }
}

fn witness(germ: &Germ, other: Option<&Germ>, point: Option<&Point>, times: &[f64]) -> Witness {
    Witness {
        germ: *germ,
        other_germ: other.copied(),
        point: point.copied(),
        times: times.to_vec(),
        residual: 0.0,
    }
}

/// |a - b| relative to the smaller magnitude; equal values (including equal
/// infinities) give zero.
fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / (1.0 + a.abs().min(b.abs()))
    }
}

/// Signed excess of `a` over `b`, normalised; zero when equal.
fn excess(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b) / (1.0 + a.abs().min(b.abs()))
    }
}

fn uniform_point<R: Rng + ?Sized>(dim: usize, centre: &Point, half: f64, rng: &mut R) -> Point {
    let mut p = *centre;
    for a in 0..dim {
        p.0[a] += half * (2.0 * rng.random::<f64>() - 1.0);
    }
    p
}

fn unit_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
    loop {
        let p = uniform_point(dim, &Point::ORIGIN, 1.0, rng);
        let n = p.norm();
        if n > 1e-3 && n <= 1.0 {
            return p * (1.0 / n);
        }
    }
}

struct Samples {
    germs: Vec<Germ>,
    points: Vec<Vec<Point>>,
    times: Vec<f64>,
    span: f64,
}

fn draw_samples(model: &GrowthModel, spec: &SampleSpec, rng: &mut StreamRng) -> Samples {
    let dim = model.dim();
    let reach = 10.0 * model.shape().rho_max();
    let knots = model.speed().knot_times();
    let last_knot = knots.last().copied().unwrap_or(0.0);
    let span = 10.0f64.max(1.5 * last_knot);
    let mut germs: Vec<Germ> = Vec::with_capacity(spec.germs);
    for i in 0..spec.germs {
        let germ = if i == 0 {
            Germ::at_origin(0.0)
        } else {
            Germ { location: uniform_point(dim, &Point::ORIGIN, 5.0, rng), birth_time: 5.0 * rng.random::<f64>() }
        };
        germs.push(germ);
    }
    let points = germs
        .iter()
        .map(|g| {
            (0..spec.points)
                .map(|j| if j == 0 { g.location } else { uniform_point(dim, &g.location, reach, rng) })
                .collect()
        })
        .collect();
    let mut times: Vec<f64> = knots.iter().copied().filter(|&t| t > 0.0).take(spec.times / 2).collect();
    while times.len() < spec.times {
        times.push(span * rng.random::<f64>());
    }
    times.sort_by(f64::total_cmp);
    Samples { germs, points, times, span }
}

/// Runs every check and returns the per-assumption verdicts.
pub fn check_assumptions(model: &GrowthModel, spec: &SampleSpec) -> AssumptionReport {
    let spec = SampleSpec {
        germs: spec.germs.max(1),
        points: spec.points.max(1),
        times: spec.times.max(1),
        ..*spec
    };
    let tol = if spec.tolerance > 0.0 { spec.tolerance } else { 1e-9 };
    let mut rng = rng::stream(spec.seed, 0, Role::Assumptions);
    let s = draw_samples(model, &spec, &mut rng);
    let results = alloc::vec![
        check_translation(model, &s, tol),
        check_birth(model, &s, tol),
        check_nesting(model, &s, tol, &mut rng),
        check_continuity(model, &s, tol, &mut rng),
        check_speed_bound(model, &s, tol),
        check_coverage(model, &s, tol, &mut rng),
        check_epigraph(model, &s, tol, &mut rng),
        check_overtaking(model, &s, tol, &mut rng),
        check_nondegenerate(model, &s, tol),
        check_diameter_growth(model, &s, tol),
    ];
    AssumptionReport { results, tolerance: tol, seed: spec.seed }
}

fn check_translation(model: &GrowthModel, s: &Samples, tol: f64) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::Translation, tol);
    for (g, pts) in s.germs.iter().zip(&s.points) {
        let g0 = Germ::at_origin(g.birth_time);
        for x in pts {
            let a = model.arrival_time(g, x);
            let b = model.arrival_time(&g0, &(*x - g.location));
            t.record(gap(a, b), || witness(g, Some(&g0), Some(x), &[]));
        }
    }
    t.finish("")
}

fn check_birth(model: &GrowthModel, s: &Samples, tol: f64) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::BirthFirst, tol);
    for (g, pts) in s.germs.iter().zip(&s.points) {
        let at_birth = model.arrival_time(g, &g.location);
        t.record(gap(at_birth, g.birth_time), || witness(g, None, Some(&g.location), &[g.birth_time]));
        for x in pts {
            let a = model.arrival_time(g, x);
            t.record(excess(g.birth_time, a), || witness(g, None, Some(x), &[]));
        }
    }
    t.finish("")
}

/// Geometric free crystal radius V(t) - V(t_g).
fn grown(model: &GrowthModel, g: &Germ, t: f64) -> f64 {
    model.speed().distance(t) - model.speed().distance(g.birth_time)
}

fn check_nesting(model: &GrowthModel, s: &Samples, tol: f64, rng: &mut StreamRng) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::Nesting, tol);
    let dim = model.dim();
    let shape = model.shape();
    for g in &s.germs {
        let times: Vec<f64> = s.times.iter().map(|&u| g.birth_time + u).collect();
        for (i, &ts) in times.iter().enumerate() {
            let rs = grown(model, g, ts);
            for j in 0..s.points.len().max(1) {
                // Points of C_g(ts), the last one on its boundary.
                let u = if j + 1 == s.points.len() { 1.0 } else { rng.random::<f64>() };
                let dir = unit_direction(dim, rng);
                let x = g.location + dir * (u * rs.max(0.0) * shape.radial(&dir));
                let gauge = shape.gauge_norm(&(x - g.location));
                if !(gauge <= rs) {
                    continue;
                }
                for &tt in &times[i + 1..] {
                    if tt <= ts {
                        continue;
                    }
                    let rt = grown(model, g, tt);
                    // Membership in C_g(tt), strictly inside for boundary points.
                    let residual = if u == 1.0 && rs > 0.0 && gauge >= rt {
                        excess(gauge, rt).max(2.0 * tol)
                    } else {
                        excess(gauge, rt)
                    };
                    t.record(residual, || witness(g, None, Some(&x), &[ts, tt]));
                }
            }
        }
    }
    t.finish("checked on the geometric free crystal x_g + (V(t) - V(t_g)) K")
}

fn check_continuity(model: &GrowthModel, s: &Samples, tol: f64, rng: &mut StreamRng) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::Continuity, math::sqrt(tol));
    let dim = model.dim();
    for (g, pts) in s.germs.iter().zip(&s.points) {
        for x in pts {
            let eps = 1e-12 * (1.0 + x.norm());
            let y = *x + unit_direction(dim, rng) * eps;
            let a = model.arrival_time(g, x);
            let b = model.arrival_time(g, &y);
            t.record(gap(a, b), || witness(g, None, Some(&y), &[a]));
        }
    }
    t.finish("|A(x + eps u) - A(x)| <= sqrt(tol) (1 + |A|) at eps = 1e-12 (1 + |x|)")
}

fn check_speed_bound(model: &GrowthModel, s: &Samples, tol: f64) -> AssumptionResult {
    let Ok(m) = model.speed_bound() else {
        let mut r = Tracker::new(AssumptionId::SpeedBound, tol).finish("growth speed is unbounded");
        r.passed = false;
        r.worst_residual = f64::INFINITY;
        r.witness = s.germs.first().map(|g| Witness {
            germ: *g,
            other_germ: None,
            point: None,
            times: Vec::new(),
            residual: f64::INFINITY,
        });
        return r;
    };
    let mut t = Tracker::new(AssumptionId::SpeedBound, tol);
    for (g, pts) in s.germs.iter().zip(&s.points) {
        for x in pts {
            let a = model.arrival_time(g, x);
            let lower = g.birth_time + x.distance(&g.location) / m;
            t.record(excess(lower, a), || witness(g, None, Some(x), &[]));
        }
    }
    t.finish("")
}

fn check_coverage(model: &GrowthModel, s: &Samples, tol: f64, rng: &mut StreamRng) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::Coverage, tol);
    let dim = model.dim();
    for g in &s.germs {
        let g0 = Germ::at_origin(g.birth_time);
        for pts in &s.points {
            for x in pts {
                let r = x.distance(&g.location);
                let sup = model.sup_arrival(g0.birth_time, r);
                if !sup.is_finite() {
                    t.record(f64::INFINITY, || witness(&g0, None, None, &[r]));
                    continue;
                }
                // Points of the sphere |y| = r arrive no later than M_g(r).
                let y = unit_direction(dim, rng) * r;
                let a = model.arrival_time(&g0, &y);
                t.record(excess(a, sup), || witness(&g0, None, Some(&y), &[sup]));
            }
        }
    }
    t.finish("sup_{|x|=r} A_(0,t_g)(x) is finite and bounds sampled arrivals")
}

fn check_epigraph(model: &GrowthModel, s: &Samples, tol: f64, rng: &mut StreamRng) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::Epigraph, tol);
    for (g, pts) in s.germs.iter().zip(&s.points) {
        for (k, y) in pts.iter().enumerate() {
            let ay = model.arrival_time(g, y);
            if !ay.is_finite() {
                continue;
            }
            let lift = if k % 2 == 0 { 0.0 } else { s.span * rng.random::<f64>() };
            let g1 = Germ { location: *y, birth_time: ay + lift };
            for x in pts {
                let a = model.arrival_time(g, x);
                let a1 = model.arrival_time(&g1, x);
                t.record(excess(a, a1), || witness(g, Some(&g1), Some(x), &[]));
            }
        }
    }
    t.finish("germs sampled on and above the graph of A_g")
}

fn check_overtaking(model: &GrowthModel, s: &Samples, tol: f64, rng: &mut StreamRng) -> AssumptionResult {
    if model.dim() != 1 {
        let mut r = Tracker::new(AssumptionId::Overtaking1d, tol).finish("only defined for d = 1");
        r.applicable = false;
        r.passed = true;
        return r;
    }
    let mut t = Tracker::new(AssumptionId::Overtaking1d, tol);
    let reach = 10.0 * model.shape().rho_max();
    for g1 in &s.germs {
        for g2 in &s.germs {
            if g1 == g2 {
                continue;
            }
            for side in [1.0, -1.0] {
                let x0 = g1.location.0[0] + side * reach * rng.random::<f64>();
                let p0 = Point::new1(x0);
                if !(model.arrival_time(g1, &p0) >= model.arrival_time(g2, &p0)) {
                    continue;
                }
                for _ in 0..s.points.len().min(8) {
                    let x = Point::new1(x0 + side * reach * rng.random::<f64>());
                    let a1 = model.arrival_time(g1, &x);
                    let a2 = model.arrival_time(g2, &x);
                    t.record(excess(a2, a1), || witness(g1, Some(g2), Some(&x), &[x0]));
                }
            }
        }
    }
    if t.checks == 0 {
        let mut r = t.finish("no overtaking configuration sampled");
        r.passed = true;
        return r;
    }
    t.finish("x_0 measured from x_g1")
}

fn check_nondegenerate(model: &GrowthModel, s: &Samples, tol: f64) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::NonDegenerate, tol);
    let ratio = model.shape_ratio();
    for g in &s.germs {
        for &u in &s.times {
            let tt = g.birth_time + u;
            let (Ok(outer), Ok(inner)) = (model.outer_diameter(g, tt), model.inner_diameter(g, tt)) else {
                continue;
            };
            t.record(excess(outer, ratio * inner), || witness(g, None, None, &[tt]));
        }
    }
    t.finish("")
}

fn check_diameter_growth(model: &GrowthModel, s: &Samples, tol: f64) -> AssumptionResult {
    let mut t = Tracker::new(AssumptionId::DiameterGrowth, tol);
    for g in &s.germs {
        for &u in &s.times {
            let tt = g.birth_time + u;
            for &h in &s.times {
                let lhs = model.outer_diameter(g, tt + h);
                let now = model.outer_diameter(g, tt);
                let fresh = model.outer_diameter(&Germ::at_origin(tt), tt + h);
                let (Ok(lhs), Ok(now), Ok(fresh)) = (lhs, now, fresh) else {
                    continue;
                };
                t.record(excess(lhs, now + fresh), || witness(g, None, None, &[tt, h]));
            }
        }
    }
    t.finish("D_(0,t)(t + h) is the diameter of a crystal born at t after growing for h")
}
