//! Cumulative growth distance V(t) and its first-passage inverse.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedTable {
    times: Vec<f64>,
    values: Vec<f64>,
    // Running maximum of `values`; monotone, so first passage is a binary search.
    prefix_max: Vec<f64>,
    tail_slope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpeedProfile {
    /// V(t) = c t.
    Constant { c: f64 },
    /// V(t) = c t^kappa, kappa >= 1.
    Power { c: f64, kappa: f64 },
    /// Piecewise-linear V through the knots, extended past the last knot with the
    /// last segment's slope.
    Tabulated(SpeedTable),
}

impl SpeedProfile {
    pub fn constant(c: f64) -> Result<Self, Error> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSpeed("constant speed must be positive and finite"));
        }
        Ok(SpeedProfile::Constant { c })
    }

    pub fn power(c: f64, kappa: f64) -> Result<Self, Error> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSpeed("power coefficient must be positive and finite"));
        }
        if !(kappa.is_finite() && kappa >= 1.0) {
            return Err(Error::InvalidSpeed("power exponent must be >= 1"));
        }
        Ok(SpeedProfile::Power { c, kappa })
    }

    /// Knots `(t_i, V_i)` with `t_0 = 0`, `V_0 = 0` and strictly increasing times.
    ///
    /// Monotonicity of V is *not* enforced here so that the assumption checker can
    /// diagnose broken tables; see [`SpeedProfile::is_strictly_increasing`].
    pub fn tabulated(knots: &[(f64, f64)]) -> Result<Self, Error> {
        if knots.len() < 2 {
            return Err(Error::InvalidSpeed("table needs at least two knots"));
        }
        if knots.iter().any(|(t, v)| !(t.is_finite() && v.is_finite())) {
            return Err(Error::NonFinite("speed table knot"));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::InvalidSpeed("table must start at (0, 0)"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSpeed("table times must be strictly increasing"));
        }
        let times: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let values: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let mut prefix_max = Vec::with_capacity(values.len());
        let mut m = f64::NEG_INFINITY;
        for &v in &values {
            m = m.max(v);
            prefix_max.push(m);
        }
        let n = knots.len();
        let tail_slope = (values[n - 1] - values[n - 2]) / (times[n - 1] - times[n - 2]);
        Ok(SpeedProfile::Tabulated(SpeedTable { times, values, prefix_max, tail_slope }))
    }

    /// Cumulative distance V(t) for t >= 0.
    pub fn distance(&self, t: f64) -> f64 {
        match self {
            SpeedProfile::Constant { c } => c * t,
            SpeedProfile::Power { c, kappa } => c * math::powf(t, *kappa),
            SpeedProfile::Tabulated(tab) => {
                let k = tab.times.partition_point(|&x| x <= t);
                let n = tab.times.len();
                if k >= n {
                    tab.values[n - 1] + tab.tail_slope * (t - tab.times[n - 1])
                } else {
                    let (t0, t1) = (tab.times[k - 1], tab.times[k]);
                    let (v0, v1) = (tab.values[k - 1], tab.values[k]);
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    /// First-passage inverse: the smallest t >= 0 with V(t) >= u. Returns
    /// `+inf` when V never reaches `u`.
    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            SpeedProfile::Constant { c } => u / c,
            SpeedProfile::Power { c, kappa } => math::powf(u / c, 1.0 / kappa),
            SpeedProfile::Tabulated(tab) => {
                let k = tab.prefix_max.partition_point(|&m| m < u);
                let n = tab.times.len();
                if k >= n {
                    let v_last = tab.values[n - 1];
                    if tab.tail_slope <= 0.0 {
                        return f64::INFINITY;
                    }
                    tab.times[n - 1] + (u - v_last) / tab.tail_slope
                } else {
                    let (t0, t1) = (tab.times[k - 1], tab.times[k]);
                    let (v0, v1) = (tab.values[k - 1], tab.values[k]);
                    let t = t0 + (u - v0) * (t1 - t0) / (v1 - v0);
                    t.clamp(t0, t1)
                }
            }
        }
    }

    /// Supremum of the speed v = V', or `None` when unbounded.
    pub fn speed_bound(&self) -> Option<f64> {
        match self {
            SpeedProfile::Constant { c } => Some(*c),
            SpeedProfile::Power { c, kappa } => (*kappa == 1.0).then_some(*c),
            SpeedProfile::Tabulated(tab) => {
                let max_slope = tab
                    .times
                    .windows(2)
                    .zip(tab.values.windows(2))
                    .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
                    .fold(tab.tail_slope, f64::max);
                (max_slope > 0.0).then_some(max_slope)
            }
        }
    }

    /// Exact monotonicity for closed forms; segment slopes for tables.
    pub fn is_strictly_increasing(&self) -> bool {
        match self {
            SpeedProfile::Constant { .. } | SpeedProfile::Power { .. } => true,
            SpeedProfile::Tabulated(tab) => {
                tab.values.windows(2).all(|w| w[1] > w[0]) && tab.tail_slope > 0.0
            }
        }
    }

    /// Knot times (tabulated profiles only); used as quadrature breakpoints.
    pub fn knot_times(&self) -> &[f64] {
        match self {
            SpeedProfile::Tabulated(tab) => &tab.times,
            _ => &[],
        }
    }
}
