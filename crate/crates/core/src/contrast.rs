// SPDX-License-Identifier: MIT OR Apache-2.0

//! Indicator transforms, the empirical CDF and the nonparametric CUSUM
//! contrast.
//!
//! For an evaluation point `u` the indicator sequence is
//! `B_t(u) = 1{X_t <= u}`. The CUSUM contrast on `[s, e]` at split `b` is
//!
//! ```text
//! sqrt((e-b) / ((b-s+1)(e-s+1))) * sum_{t=s..=b} B_t(u)
//!   - sqrt((b-s+1) / ((e-b)(e-s+1))) * sum_{t=b+1..=e} B_t(u)
//! ```
//!
//! All indices are 1-based and inclusive.

use serde::{Deserialize, Serialize};

use crate::error::{NpidError, Result};

/// Clamp used in place of `sqrt(p(1-p))` when `p` is outside `[0.1, 0.9]`.
pub const RESCALE_FLOOR: f64 = 0.3;

/// An observed sequence `X_1..X_T`, optionally with its true change-points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    values: Vec<f64>,
    truth: Option<Vec<usize>>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(NpidError::EmptySeries);
        }
        if let Some(t) = values.iter().position(|v| v.is_nan()) {
            return Err(NpidError::domain(format!("NaN at position {}", t + 1)));
        }
        Ok(Self {
            values,
            truth: None,
        })
    }

    pub fn with_truth(values: Vec<f64>, truth: Vec<usize>) -> Result<Self> {
        let mut series = Self::new(values)?;
        validate_changepoints(&truth, series.len())?;
        series.truth = Some(truth);
        Ok(series)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn truth(&self) -> Option<&[usize]> {
        self.truth.as_deref()
    }

    /// 1-based access.
    #[inline]
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    /// Applies `f` elementwise, keeping the truth.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        let mut out = Self::new(values)?;
        out.truth.clone_from(&self.truth);
        Ok(out)
    }

    /// The contiguous sub-series `X_start..=X_end` (1-based), without truth.
    pub fn window(&self, start: usize, end: usize) -> Result<Self> {
        if start < 1 || start > end || end > self.len() {
            return Err(NpidError::domain(format!(
                "window [{start}, {end}] outside [1, {}]",
                self.len()
            )));
        }
        Self::new(self.values[start - 1..end].to_vec())
    }
}

/// Checks that positions are strictly increasing and within `[1, T-1]`.
pub(crate) fn validate_changepoints(points: &[usize], len: usize) -> Result<()> {
    for (i, &r) in points.iter().enumerate() {
        if r < 1 || r >= len {
            return Err(NpidError::domain(format!(
                "change-point {r} outside [1, {}]",
                len.saturating_sub(1)
            )));
        }
        if i > 0 && points[i - 1] >= r {
            return Err(NpidError::domain(format!(
                "change-points not strictly increasing at {r}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Every observed value is an evaluation point.
    FullDataQuantiles,
    /// Equally spaced points across the data range.
    ValueGrid,
}

/// Sorted evaluation points `u_1 <= .. <= u_Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoints {
    points: Vec<f64>,
    mode: EvalMode,
}

impl EvalPoints {
    /// Points are sorted on construction, so any ordering of the same
    /// multiset yields the same evaluation set.
    pub fn new(mut points: Vec<f64>, mode: EvalMode) -> Result<Self> {
        if points.is_empty() {
            return Err(NpidError::domain("evaluation set is empty"));
        }
        if points.iter().any(|u| u.is_nan()) {
            return Err(NpidError::domain("NaN evaluation point"));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self { points, mode })
    }

    /// All `T` data values, duplicates included.
    pub fn full(series: &Series) -> Self {
        let mut points = series.values().to_vec();
        points.sort_by(f64::total_cmp);
        Self {
            points,
            mode: EvalMode::FullDataQuantiles,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(1/n) #{t : sample_t <= u}`.
pub fn ecdf(sample: &[f64], u: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(NpidError::domain("ECDF of an empty sample"));
    }
    let below = sample.iter().filter(|&&x| x <= u).count();
    Ok(below as f64 / sample.len() as f64)
}

/// Left and right weights of the contrast at split `b` of `[s, e]`.
#[inline]
pub(crate) fn cusum_weights(s: usize, e: usize, b: usize) -> (f64, f64) {
    let n = (e - s + 1) as f64;
    let left = (b - s + 1) as f64;
    let right = (e - b) as f64;
    ((right / (left * n)).sqrt(), (left / (right * n)).sqrt())
}

pub(crate) fn check_split(s: usize, e: usize, b: usize, len: usize) -> Result<()> {
    if s < 1 || s > b || b >= e || e > len {
        return Err(NpidError::domain(format!(
            "need 1 <= s <= b < e <= T, got s={s}, b={b}, e={e}, T={len}"
        )));
    }
    Ok(())
}

/// The nonparametric CUSUM at split `b` of `[s, e]`, evaluated at `u`.
///
/// Direct summation; the profile code in [`crate::aggregation`] uses prefix
/// counts instead and is tested against this.
pub fn cusum(series: &Series, s: usize, e: usize, b: usize, u: f64) -> Result<f64> {
    check_split(s, e, b, series.len())?;
    let ind = |t: usize| if series.at(t) <= u { 1.0 } else { 0.0 };
    let pre: f64 = (s..=b).map(ind).sum();
    let post: f64 = (b + 1..=e).map(ind).sum();
    let (wl, wr) = cusum_weights(s, e, b);
    Ok(wl * pre - wr * post)
}

/// Standard deviation used to rescale the contrast at `u`, from the
/// full-sample fraction `p = mean_t 1{X_t <= u}`.
pub fn rescale_sd(series: &Series, u: f64) -> f64 {
    let below = series.values().iter().filter(|&&x| x <= u).count();
    rescale_from_fraction(below as f64 / series.len() as f64)
}

pub(crate) fn rescale_from_fraction(p: f64) -> f64 {
    if (0.1..=0.9).contains(&p) {
        (p * (1.0 - p)).sqrt()
    } else {
        RESCALE_FLOOR
    }
}

/// `q` equally spaced points strictly inside `[min X, max X]`.
///
/// A constant series yields the single point `min X`.
pub fn grid_points(series: &Series, q: usize) -> Result<EvalPoints> {
    if q == 0 {
        return Err(NpidError::domain("grid size must be at least 1"));
    }
    let (lo, hi) = series
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let range = hi - lo;
    if !range.is_finite() {
        return Err(NpidError::domain("grid over an unbounded data range"));
    }
    let points = if range == 0.0 {
        vec![lo]
    } else {
        (1..=q)
            .map(|j| lo + j as f64 * range / (q + 1) as f64)
            .collect()
    };
    Ok(EvalPoints {
        points,
        mode: EvalMode::ValueGrid,
    })
}

/// For each observation, the first evaluation index whose point covers it.
///
/// `1{X_t <= u_q}` holds exactly when `q >= first_covering[t]`; a value above
/// every point gets `Q`.
#[derive(Debug, Clone)]
pub(crate) struct IndicatorIndex {
    first_covering: Vec<usize>,
    width: usize,
}

impl IndicatorIndex {
    pub(crate) fn new(series: &Series, eval: &EvalPoints) -> Self {
        let pts = eval.points();
        let first_covering = series
            .values()
            .iter()
            .map(|&x| pts.partition_point(|&u| u < x))
            .collect();
        Self {
            first_covering,
            width: pts.len(),
        }
    }

    /// 1-based.
    #[inline]
    pub(crate) fn first_covering(&self, t: usize) -> usize {
        self.first_covering[t - 1]
    }

    #[inline]
    pub(crate) fn width(&self) -> usize {
        self.width
    }

    /// `#{t in [s, e] : X_t <= u_q}` for every `q`.
    pub(crate) fn counts(&self, s: usize, e: usize) -> Vec<f64> {
        let mut hist = vec![0.0f64; self.width + 1];
        for &fc in &self.first_covering[s - 1..e] {
            hist[fc] += 1.0;
        }
        let mut acc = 0.0;
        hist.truncate(self.width);
        for h in hist.iter_mut() {
            acc += *h;
            *h = acc;
        }
        hist
    }
}
