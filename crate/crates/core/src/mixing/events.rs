//! Two-point event gaps `|P(A ∩ B) - P(A) P(B)|` with `A = {xi(0) > a}` and
//! `B = {xi(h) > a}`.
//!
//! Both events only involve germs with `A_g <= a` at 0 or h, so sampling germs
//! on `bbox{0, h}` expanded by `M a` times `[0, a]` decides them exactly on
//! every replicate.

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
use crate::rng::{self, Role};
use crate::stats;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventGapEstimate {
    pub a: f64,
    pub h: Point,
    pub replicates: usize,
    pub count_a: u64,
    pub count_b: u64,
    pub count_ab: u64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    pub gap: f64,
    /// Delta-method standard error of `p_ab - p_a p_b`.
    pub sigma: f64,
    /// `exp(-F(a))`.
    pub exact_p_a: f64,
    /// Exact `P(A ∩ B)` (one-dimensional models).
    pub exact_p_ab: Option<f64>,
    pub exact_gap: Option<f64>,
    /// `2 * gap`, the event-based lower estimate of beta.
    pub beta_lower_estimate: f64,
}

/// Standard error of `p_ab - p_a p_b` from `n` replicates, via the influence
/// function `1_AB - p_b 1_A - p_a 1_B`.
pub fn gap_sigma(p_a: f64, p_b: f64, p_ab: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let second = p_ab + p_b * p_b * p_a + p_a * p_a * p_b - 2.0 * p_b * p_ab - 2.0 * p_a * p_ab
        + 2.0 * p_a * p_b * p_ab;
    let first = p_ab - 2.0 * p_a * p_b;
    math::sqrt((second - first * first).max(0.0) / n as f64)
}

pub fn estimate_alpha_event<E: Executor>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    a: f64,
    h: Point,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<EventGapEstimate, Error> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument("threshold a must be positive and finite"));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be >= 1"));
    }
    let dim = model.dim();
    let m = model.speed_bound()?;
    let mut lo = Point::ORIGIN;
    let mut hi = Point::ORIGIN;
    for ax in 0..dim {
        lo.0[ax] = h.0[ax].min(0.0) - m * a;
        hi.0[ax] = h.0[ax].max(0.0) + m * a;
    }
    let window = SpaceTimeWindow::cuboid(dim, lo, hi, a)?;
    let flags = exec.map(replicates, |i| {
        let mut rng = rng::stream(seed, i as u64, Role::Events);
        let germs = sample_germs_with(measure, &window, &mut rng);
        let index = GermIndex::new(model, &germs);
        let ev_a = index.nearest(&Point::ORIGIN, a).is_none();
        let ev_b = index.nearest(&h, a).is_none();
        (ev_a, ev_b)
    });
    let count_a = flags.iter().filter(|f| f.0).count() as u64;
    let count_b = flags.iter().filter(|f| f.1).count() as u64;
    let count_ab = flags.iter().filter(|f| f.0 && f.1).count() as u64;
    let n = replicates as f64;
    let (p_a, p_b, p_ab) = (count_a as f64 / n, count_b as f64 / n, count_ab as f64 / n);
    let gap = (p_ab - p_a * p_b).abs();
    let cone = ConeMeasure::new(model.clone(), measure.clone());
    let exact_p_a = cone.survival(a);
    let exact_p_ab = if dim == 1 { Some(cone.joint_survival_1d(a, h.0[0])?) } else { None };
    Ok(EventGapEstimate {
        a,
        h,
        replicates,
        count_a,
        count_b,
        count_ab,
        p_a,
        p_b,
        p_ab,
        gap,
        sigma: gap_sigma(p_a, p_b, p_ab, replicates),
        exact_p_a,
        exact_p_ab,
        exact_gap: exact_p_ab.map(|j| (j - exact_p_a * exact_p_a).abs()),
        beta_lower_estimate: 2.0 * gap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCurve {
    pub a: f64,
    pub lags: Vec<f64>,
    pub entries: Vec<EventGapEstimate>,
    /// Kendall tau between lag and gap; negative for a decaying trend.
    pub kendall_tau: f64,
    /// Whether the last gap is below the first.
    pub decreasing: bool,
}

/// Event gaps along the first axis at each lag; every lag reuses `seed`.
pub fn covariance_decay<E: Executor>(
    model: &GrowthModel,
    measure: &BirthMeasure,
    a: f64,
    lags: &[f64],
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<DecayCurve, Error> {
    if lags.is_empty() || lags.windows(2).any(|w| !(w[1] > w[0])) || lags[0] < 0.0 {
        return Err(Error::InvalidArgument("lags must be nonnegative and strictly increasing"));
    }
    let entries = lags
        .iter()
        .map(|&l| estimate_alpha_event(model, measure, a, Point::axis(0, l), replicates, seed, exec))
        .collect::<Result<Vec<_>, _>>()?;
    let gaps: Vec<f64> = entries.iter().map(|e| e.gap).collect();
    let decreasing = gaps.last() < gaps.first();
    Ok(DecayCurve {
        a,
        lags: lags.to_vec(),
        kendall_tau: stats::kendall_tau(lags, &gaps),
        decreasing,
        entries,
    })
}
