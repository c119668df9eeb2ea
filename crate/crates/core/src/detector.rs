// SPDX-License-Identifier: MIT OR Apache-2.0

//! Isolate-detect scanning with a threshold stopping rule.
//!
//! Starting from `[s, e] = [1, T]`, the detector alternates between
//! right-expanding intervals `[s, c]` and left-expanding intervals `[c, e]`
//! whose free endpoints step by `lambda`. The first interval whose largest
//! aggregated contrast exceeds `zeta_T = C sqrt(ln T)` yields a change-point
//! at its argmax; the scan then restarts on the part of `[s, e]` beyond that
//! interval. Scanning stops once a full pass finds nothing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregation::{Aggregator, NormKind};
use crate::contrast::{grid_points, EvalPoints, Series};
use crate::error::{NpidError, Result};

pub const DEFAULT_LAMBDA: usize = 15;
/// Longest series evaluated at every data value under [`EvalChoice::Auto`].
pub const FULL_EVAL_MAX_LEN: usize = 1000;
pub const DEFAULT_GRID_SIZE: usize = 300;
/// Window length for [`WindowSplit::Auto`], applied only to longer series.
pub const DEFAULT_WINDOW: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    Threshold,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalChoice {
    /// Full data for `T <= 1000`, otherwise a grid of 300 points.
    Auto,
    Full,
    Grid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RescaleChoice {
    /// On for `LInf` under BIC stopping, off otherwise.
    Auto,
    On,
    Off,
}

/// Where scanning resumes after a detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restart {
    /// From the far endpoint of the interval that produced the detection.
    IntervalEnd,
    /// From the detected location itself.
    AtEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowSplit {
    /// Windows of 2000 when `T > 2000`.
    Auto,
    Off,
    /// Windows of the given length when `T` exceeds it.
    Length(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub lambda: usize,
    pub norm: NormKind,
    /// `None` uses [`NormKind::default_constant`].
    pub threshold_constant: Option<f64>,
    pub stop: StopRule,
    pub eval: EvalChoice,
    pub rescale: RescaleChoice,
    pub restart: Restart,
    pub window_split: WindowSplit,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            norm: NormKind::LInf,
            threshold_constant: None,
            stop: StopRule::Threshold,
            eval: EvalChoice::Auto,
            rescale: RescaleChoice::Auto,
            restart: Restart::IntervalEnd,
            window_split: WindowSplit::Auto,
        }
    }
}

impl DetectorConfig {
    pub fn with_norm(norm: NormKind) -> Self {
        Self {
            norm,
            ..Self::default()
        }
    }

    pub fn constant(&self) -> f64 {
        self.threshold_constant
            .unwrap_or_else(|| self.norm.default_constant())
    }

    pub fn rescale_enabled(&self) -> bool {
        match self.rescale {
            // The threshold constants are calibrated on unscaled contrasts.
            RescaleChoice::Auto => self.norm == NormKind::LInf && self.stop == StopRule::Bic,
            RescaleChoice::On => true,
            RescaleChoice::Off => false,
        }
    }

    pub fn eval_points(&self, series: &Series) -> Result<EvalPoints> {
        match self.eval {
            EvalChoice::Full => Ok(EvalPoints::full(series)),
            EvalChoice::Grid(q) => grid_points(series, q),
            EvalChoice::Auto if series.len() <= FULL_EVAL_MAX_LEN => Ok(EvalPoints::full(series)),
            EvalChoice::Auto => grid_points(series, DEFAULT_GRID_SIZE),
        }
    }

    /// Window length to use for a series of length `len`, if splitting.
    pub fn window_length(&self, len: usize) -> Option<usize> {
        let w = match self.window_split {
            WindowSplit::Off => return None,
            WindowSplit::Auto => DEFAULT_WINDOW,
            WindowSplit::Length(w) => w,
        };
        (len > w).then_some(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(NpidError::domain("lambda must be at least 1"));
        }
        if let Some(c) = self.threshold_constant {
            if !(c > 0.0 && c.is_finite()) {
                return Err(NpidError::domain(format!(
                    "threshold constant must be positive, got {c}"
                )));
            }
        }
        if let EvalChoice::Grid(0) = self.eval {
            return Err(NpidError::domain("grid size must be at least 1"));
        }
        if let WindowSplit::Length(w) = self.window_split {
            if w < 2 {
                return Err(NpidError::domain("window length must be at least 2"));
            }
        }
        Ok(())
    }
}

/// Detected change-points, ascending, with the contrast value at detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub changepoints: Vec<usize>,
    pub scores: Vec<f64>,
    pub series_len: usize,
    pub config: DetectorConfig,
}

impl Segmentation {
    pub fn len(&self) -> usize {
        self.changepoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changepoints.is_empty()
    }
}

/// `C sqrt(ln T)`.
pub fn threshold(constant: f64, len: usize) -> Result<f64> {
    if len < 2 {
        return Err(NpidError::domain(format!(
            "threshold needs T >= 2, got {len}"
        )));
    }
    Ok(constant * (len as f64).ln().sqrt())
}

/// Expansion points for a series of length `T` and step `lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSchedule {
    pub lambda: usize,
    pub series_len: usize,
    /// `ceil(T / lambda)`
    pub k: usize,
    /// `lambda + 1, 2 lambda + 1, .., T`
    pub right: Vec<usize>,
    /// `T - lambda, T - 2 lambda, .., 1`
    pub left: Vec<usize>,
}

impl ExpansionSchedule {
    pub fn new(series_len: usize, lambda: usize) -> Result<Self> {
        if lambda == 0 || series_len == 0 {
            return Err(NpidError::domain("schedule needs T >= 1 and lambda >= 1"));
        }
        let k = series_len.div_ceil(lambda);
        let mut right: Vec<usize> = (1..k).map(|j| j * lambda + 1).collect();
        right.push(series_len);
        right.dedup();
        let mut left: Vec<usize> = (1..k).map(|j| series_len - j * lambda).collect();
        left.push(1);
        left.dedup();
        Ok(Self {
            lambda,
            series_len,
            k,
            right,
            left,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `[s, c]`, start fixed.
    Right,
    /// `[c, e]`, end fixed.
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
    pub side: Side,
}

/// Right- and left-expanding intervals inside `[s, e]`, interleaved
/// right-first. When one side runs out the other continues alone.
pub fn interval_sequences(s: usize, e: usize, schedule: &ExpansionSchedule) -> Vec<Interval> {
    if e <= s {
        return Vec::new();
    }
    let right: Vec<usize> = schedule
        .right
        .iter()
        .copied()
        .filter(|&c| c > s && c < e)
        .chain(std::iter::once(e))
        .collect();
    let left: Vec<usize> = schedule
        .left
        .iter()
        .copied()
        .filter(|&c| c < e && c > s)
        .chain(std::iter::once(s))
        .collect();
    let mut out = Vec::with_capacity(right.len() + left.len());
    for i in 0..right.len().max(left.len()) {
        if let Some(&c) = right.get(i) {
            out.push(Interval {
                start: s,
                end: c,
                side: Side::Right,
            });
        }
        if let Some(&c) = left.get(i) {
            out.push(Interval {
                start: c,
                end: e,
                side: Side::Left,
            });
        }
    }
    out
}

/// Work counters from a detection run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DetectionTrace {
    /// Intervals whose contrast profile was computed.
    pub intervals_scanned: usize,
    /// Full passes over an interval list, one per detection plus the last.
    pub passes: usize,
}

/// Threshold-stopped detection. `config.stop` is ignored; see [`segment`].
pub fn detect(series: &Series, config: &DetectorConfig) -> Result<Segmentation> {
    detect_traced(series, config).map(|(seg, _)| seg)
}

/// [`detect`] plus work counters.
pub fn detect_traced(
    series: &Series,
    config: &DetectorConfig,
) -> Result<(Segmentation, DetectionTrace)> {
    config.validate()?;
    let len = series.len();
    if len < 2 {
        return Err(NpidError::domain(format!(
            "detection needs T >= 2, got {len}"
        )));
    }
    let mut trace = DetectionTrace::default();
    let mut found = Vec::new();
    match config.window_length(len) {
        Some(w) => {
            for (start, end) in windows(len, w) {
                if end - start < 1 {
                    continue;
                }
                let part = series.window(start, end)?;
                let offset = start - 1;
                let local = scan(&part, config, &mut trace)?;
                found.extend(local.into_iter().map(|(b, v)| (b + offset, v)));
            }
        }
        None => found = scan(series, config, &mut trace)?,
    }
    found.sort_by_key(|&(b, _)| b);
    let (changepoints, scores) = found.into_iter().unzip();
    Ok((
        Segmentation {
            changepoints,
            scores,
            series_len: len,
            config: config.clone(),
        },
        trace,
    ))
}

/// Consecutive 1-based windows of length `w`; a trailing remainder shorter
/// than `w / 2` is absorbed into the last window.
pub(crate) fn windows(len: usize, w: usize) -> Vec<(usize, usize)> {
    let full = len / w;
    let rem = len % w;
    if full == 0 {
        return vec![(1, len)];
    }
    let mut out: Vec<(usize, usize)> = (0..full).map(|i| (i * w + 1, (i + 1) * w)).collect();
    if rem > 0 {
        if 2 * rem < w {
            out.last_mut().expect("at least one window").1 = len;
        } else {
            out.push((full * w + 1, len));
        }
    }
    out
}

fn scan(
    series: &Series,
    config: &DetectorConfig,
    trace: &mut DetectionTrace,
) -> Result<Vec<(usize, f64)>> {
    let len = series.len();
    let zeta = threshold(config.constant(), len)?;
    let schedule = ExpansionSchedule::new(len, config.lambda)?;
    let eval = config.eval_points(series)?;
    let agg = Aggregator::new(series, &eval, config.norm, config.rescale_enabled());

    let (mut s, mut e) = (1, len);
    let mut found = Vec::new();
    'pass: while e > s {
        trace.passes += 1;
        for iv in interval_sequences(s, e, &schedule) {
            trace.intervals_scanned += 1;
            let (b, v) = agg.profile(iv.start, iv.end)?.argmax();
            if v > zeta {
                found.push((b, v));
                match (iv.side, config.restart) {
                    (Side::Right, Restart::IntervalEnd) => s = iv.end,
                    (Side::Right, Restart::AtEstimate) => s = b + 1,
                    (Side::Left, Restart::IntervalEnd) => e = iv.start,
                    (Side::Left, Restart::AtEstimate) => e = b,
                }
                continue 'pass;
            }
        }
        break;
    }
    Ok(found)
}

/// Detection with the stopping rule named in `config.stop`.
pub fn segment(series: &Series, config: &DetectorConfig) -> Result<Segmentation> {
    match config.stop {
        StopRule::Threshold => detect(series, config),
        StopRule::Bic => crate::selector::detect_bic(series, config),
    }
}

macro_rules! impl_kebab_parse {
    ($ty:ty, $($name:literal => $val:expr),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = NpidError;

            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($val),)+
                    other => Err(NpidError::domain(format!(
                        concat!("unknown ", stringify!($ty), " `{}`"),
                        other
                    ))),
                }
            }
        }
    };
}

impl_kebab_parse!(StopRule, "threshold" => StopRule::Threshold, "bic" => StopRule::Bic);
impl_kebab_parse!(
    RescaleChoice,
    "auto" => RescaleChoice::Auto,
    "on" => RescaleChoice::On,
    "off" => RescaleChoice::Off,
);
impl_kebab_parse!(
    Restart,
    "interval-end" => Restart::IntervalEnd,
    "estimate" => Restart::AtEstimate,
    "at-estimate" => Restart::AtEstimate,
);

impl FromStr for EvalChoice {
    type Err = NpidError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(EvalChoice::Auto),
            "full" => Ok(EvalChoice::Full),
            n => n
                .parse::<usize>()
                .ok()
                .filter(|&q| q > 0)
                .map(EvalChoice::Grid)
                .ok_or_else(|| {
                    NpidError::domain(format!("grid must be `full` or Q >= 1, got `{n}`"))
                }),
        }
    }
}

impl FromStr for WindowSplit {
    type Err = NpidError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(WindowSplit::Auto),
            "off" => Ok(WindowSplit::Off),
            n => n
                .parse::<usize>()
                .ok()
                .filter(|&w| w >= 2)
                .map(WindowSplit::Length)
                .ok_or_else(|| {
                    NpidError::domain(format!("split must be auto, off or N >= 2, got `{n}`"))
                }),
        }
    }
}
