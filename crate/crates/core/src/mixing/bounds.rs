//! Upper and lower bounds on the absolute regularity coefficient.

use alloc::vec::Vec;

use serde::Serialize;

use crate::cone::ConeMeasure;
use crate::error::Error;
use crate::math;

/// Default relative tail tolerance for series truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Hard cap on summed terms.
pub const MAX_SERIES_TERMS: u64 = 10_000_000;
/// Terms after which a non-decreasing series is declared divergent.
const DIVERGENCE_PROBE: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesOptions {
    pub tail_tol: f64,
    pub max_terms: u64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { tail_tol: DEFAULT_TAIL_TOL, max_terms: MAX_SERIES_TERMS }
    }
}

/// Where a truncated series stopped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub terms: u64,
    pub partial_sum: f64,
    /// Geometric bound on the omitted tail; infinite when none was established.
    pub tail_bound: f64,
    pub converged: bool,
}

impl SeriesReport {
    /// The sum, or +inf when it was not shown to converge.
    pub fn value(&self) -> f64 {
        if self.converged {
            self.partial_sum
        } else {
            f64::INFINITY
        }
    }
}

/// Sums `sum_{k >= 1} term(k)` until the ratio-test geometric tail drops below
/// `tail_tol * partial`. Ratios must be below 1 and non-increasing for the tail
/// estimate to be used.
pub fn sum_series<T: FnMut(u64) -> f64>(mut term: T, opts: SeriesOptions) -> SeriesReport {
    let mut partial = 0.0;
    let mut prev_term = f64::NAN;
    let mut prev_ratio = f64::INFINITY;
    for k in 1..=opts.max_terms.max(1) {
        let t = term(k);
        if t.is_nan() || t < 0.0 {
            return SeriesReport { terms: k, partial_sum: partial, tail_bound: f64::INFINITY, converged: false };
        }
        partial += t;
        if !partial.is_finite() {
            return SeriesReport { terms: k, partial_sum: partial, tail_bound: f64::INFINITY, converged: false };
        }
        if k > 1 {
            if t == 0.0 {
                return SeriesReport { terms: k, partial_sum: partial, tail_bound: 0.0, converged: true };
            }
            let q = t / prev_term;
            if q < 1.0 && q <= prev_ratio * (1.0 + 1e-12) {
                let tail = t * q / (1.0 - q);
                if tail <= opts.tail_tol * partial {
                    return SeriesReport { terms: k, partial_sum: partial, tail_bound: tail, converged: true };
                }
            }
            if k >= DIVERGENCE_PROBE && !(q < 1.0) {
                return SeriesReport { terms: k, partial_sum: partial, tail_bound: f64::INFINITY, converged: false };
            }
            prev_ratio = q;
        }
        prev_term = t;
    }
    SeriesReport {
        terms: opts.max_terms.max(1),
        partial_sum: partial,
        tail_bound: f64::INFINITY,
        converged: false,
    }
}

/// `sum_{k >= 1} k^(d-1) exp(-F(C k))`.
pub fn cone_series(cone: &ConeMeasure, c: f64, dim: usize, opts: SeriesOptions) -> SeriesReport {
    sum_series(|k| math::powi(k as f64, dim as i32 - 1) * math::exp(-cone.eval(c * k as f64)), opts)
}

/// Geometric constants shared by the quadrant and enclosed-cube bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundConstants {
    /// Half-width of the separating band.
    pub r: f64,
    /// Speed-bound constant.
    pub m: f64,
    /// Shape ratio.
    pub a: f64,
    /// H = 2(A + M).
    pub h: f64,
    /// R = r / H.
    pub big_r: f64,
    /// C = 2R / (dH).
    pub c: f64,
}

impl BoundConstants {
    pub fn new(cone: &ConeMeasure, dim: usize, r: f64) -> Result<Self, Error> {
        let m = cone.model().speed_bound()?;
        let a = cone.model().shape_ratio();
        let h = 2.0 * (a + m);
        let big_r = r / h;
        let c = 2.0 * big_r / (dim as f64 * h);
        Ok(BoundConstants { r, m, a, h, big_r, c })
    }
}

/// One evaluated bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub constants: BoundConstants,
    pub series: Option<SeriesReport>,
}

/// `16 exp(-F(r / 2M))` for a one-dimensional model.
pub fn beta_upper_1d(cone: &ConeMeasure, r: f64) -> Result<f64, Error> {
    let d = cone.model().dim();
    if d != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: d });
    }
    let m = cone.model().speed_bound()?;
    Ok(16.0 * math::exp(-cone.eval(r / (2.0 * m))))
}

fn check_dim(cone: &ConeMeasure, dim: usize) -> Result<(), Error> {
    if dim != cone.model().dim() {
        return Err(Error::DimensionMismatch { expected: cone.model().dim(), found: dim });
    }
    if dim < 2 {
        return Err(Error::InvalidArgument("quadrant and enclosed bounds need d >= 2"));
    }
    Ok(())
}

/// `16 sum_k k^(d-1) exp(-F(C k))` for quadrants separated by a band of width 2r.
pub fn beta_upper_quadrant(cone: &ConeMeasure, dim: usize, r: f64, opts: SeriesOptions) -> Result<BoundValue, Error> {
    check_dim(cone, dim)?;
    let constants = BoundConstants::new(cone, dim, r)?;
    let series = cone_series(cone, constants.c, dim, opts);
    Ok(BoundValue { value: 16.0 * series.value(), constants, series: Some(series) })
}

/// `8 (1 + d 2^d) sum_k k^(d-1) exp(-F(C k))` for `T1 = [-a, a]^d` and
/// `T2` the complement of `[-b, b]^d`, with `r = (b - 2a) sqrt(d) / 4`.
pub fn beta_upper_enclosed(
    cone: &ConeMeasure,
    dim: usize,
    a: f64,
    b: f64,
    opts: SeriesOptions,
) -> Result<BoundValue, Error> {
    check_dim(cone, dim)?;
    if !(a >= 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("enclosed cubes need 0 <= a and 0 < b"));
    }
    let r = (b - 2.0 * a) * math::sqrt(dim as f64) / 4.0;
    let constants = BoundConstants::new(cone, dim, r)?;
    if b < 2.0 * (constants.h - 1.0) * a {
        return Err(Error::EnclosedGeometry { a, b, h: constants.h });
    }
    let series = cone_series(cone, constants.c, dim, opts);
    let prefactor = 8.0 * (1.0 + dim as f64 * math::powi(2.0, dim as i32));
    Ok(BoundValue { value: prefactor * series.value(), constants, series: Some(series) })
}

/// Riemann zeta for `s > 1`, by Euler–Maclaurin summation with cutoff 64.
pub fn zeta(s: f64) -> f64 {
    const N: u32 = 64;
    let n = N as f64;
    let head: f64 = (1..N).map(|k| math::powf(k as f64, -s)).sum();
    let ns = math::powf(n, -s);
    // Bernoulli corrections B2, B4, B6, B8.
    let mut tail = n * ns / (s - 1.0) + 0.5 * ns;
    let coeffs = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = ns / n;
    for (j, b) in coeffs.iter().enumerate() {
        tail += b / fact * rising * power;
        let p = 2 * j as u32 + 1;
        rising *= (s + p as f64) * (s + p as f64 + 1.0);
        fact *= (p as f64 + 2.0) * (p as f64 + 3.0);
        power /= n * n;
    }
    head + tail
}

/// Closed-form bound `gamma zeta(1 + delta) C^-(d + delta)` on the cone series
/// when `exp(-F(t)) <= gamma t^-(d + delta)`.
pub fn series_poly_bound(gamma: f64, delta: f64, c: f64, dim: usize) -> Result<f64, Error> {
    if !(gamma > 0.0 && delta > 0.0 && c > 0.0) {
        return Err(Error::InvalidArgument("gamma, delta and C must be positive"));
    }
    Ok(gamma * zeta(1.0 + delta) * math::powf(c, -(dim as f64 + delta)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuperExpBound {
    pub value: f64,
    pub c1: f64,
    pub c2: f64,
    pub terms: u64,
}

/// Closed-form bound `c2 exp(-gamma C^delta)` on the cone series when
/// `F(t) >= gamma t^delta - c`.
pub fn series_superexp_bound(gamma: f64, delta: f64, c: f64, big_c: f64, dim: usize) -> Result<SuperExpBound, Error> {
    if !(gamma > 0.0 && delta > 0.0 && c >= 0.0 && big_c > 0.0) {
        return Err(Error::InvalidArgument("gamma, delta, C must be positive and c >= 0"));
    }
    let c1 = math::exp(c);
    let rate = gamma * math::powf(big_c, delta);
    let mut sum = 0.0;
    let mut k: u64 = 1;
    loop {
        let kf = k as f64;
        let term = math::powi(kf, dim as i32 - 1) * math::exp(-rate * (math::powf(kf, delta) - 1.0));
        sum += term;
        if k > 1 && term < 1e-16 * sum {
            break;
        }
        if k >= MAX_SERIES_TERMS {
            return Err(Error::Unconverged { terms: k });
        }
        k += 1;
    }
    let c2 = c1 * sum;
    Ok(SuperExpBound { value: c2 * math::exp(-rate), c1, c2, terms: k })
}

/// `|exp(-2F(r/tau)) - exp(-F((1 + tau) r / tau))|`.
pub fn beta_lower(cone: &ConeMeasure, tau: f64, r: f64) -> Result<f64, Error> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be positive"));
    }
    let a = math::exp(-2.0 * cone.eval(r / tau));
    let b = math::exp(-cone.eval((1.0 + tau) * r / tau));
    Ok((a - b).abs())
}

/// Domain pair the upper bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BoundGeometry {
    /// `(-inf, 0]` and `[r, inf)` in d = 1.
    HalfLines,
    /// Quadrants separated by a band of width 2r.
    Quadrant,
    /// `[-a, a]^d` and the complement of `[-b, b]^d`, `b = 4r / sqrt(d) + 2a`.
    Enclosed { a: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundPoint {
    pub r: f64,
    pub upper: f64,
    pub lower: Option<f64>,
    pub constants: Option<BoundConstants>,
    pub series: Option<SeriesReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCurve {
    pub geometry: BoundGeometry,
    pub dim: usize,
    pub tau: Option<f64>,
    pub points: Vec<BoundPoint>,
}

/// Evaluates the upper bound (and the lower bound when `tau` is given) over `r_grid`.
pub fn bound_curve(
    cone: &ConeMeasure,
    geometry: BoundGeometry,
    r_grid: &[f64],
    tau: Option<f64>,
    opts: SeriesOptions,
) -> Result<BoundCurve, Error> {
    let dim = cone.model().dim();
    let mut points = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument("r grid values must be positive and finite"));
        }
        let (upper, constants, series) = match geometry {
            BoundGeometry::HalfLines => (beta_upper_1d(cone, r)?, None, None),
            BoundGeometry::Quadrant => {
                let b = beta_upper_quadrant(cone, dim, r, opts)?;
                (b.value, Some(b.constants), b.series)
            }
            BoundGeometry::Enclosed { a } => {
                let outer = 4.0 * r / math::sqrt(dim as f64) + 2.0 * a;
                let b = beta_upper_enclosed(cone, dim, a, outer, opts)?;
                (b.value, Some(b.constants), b.series)
            }
        };
        let lower = match tau {
            Some(t) => Some(beta_lower(cone, t, r)?),
            None => None,
        };
        points.push(BoundPoint { r, upper, lower, constants, series });
    }
    Ok(BoundCurve { geometry, dim, tau, points })
}
