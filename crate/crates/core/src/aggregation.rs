// SPDX-License-Identifier: MIT OR Apache-2.0

//! Mean-dominant norms and the aggregated contrast profile of an interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contrast::{
    check_split, cusum_weights, rescale_from_fraction, EvalPoints, IndicatorIndex, Series,
};
use crate::error::{NpidError, Result};

/// Mean-dominant norm used to collapse a contrast vector to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// `(1/d) sum |y_i|`
    L1,
    /// `(1/sqrt d) sqrt(sum y_i^2)`
    L2,
    /// `max |y_i|`
    #[serde(rename = "linf")]
    LInf,
}

impl NormKind {
    /// Threshold constant used when none is configured.
    ///
    /// No calibrated value exists for `L1`; it shares the `L2` constant.
    pub fn default_constant(self) -> f64 {
        match self {
            NormKind::L1 | NormKind::L2 => 0.6,
            NormKind::LInf => 0.9,
        }
    }

    fn accumulator(self) -> NormAccumulator {
        NormAccumulator {
            kind: self,
            acc: 0.0,
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        })
    }
}

impl FromStr for NormKind {
    type Err = NpidError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" | "l_inf" | "inf" => Ok(NormKind::LInf),
            other => Err(NpidError::domain(format!("unknown norm `{other}`"))),
        }
    }
}

/// Streams absolute values into a norm without materializing the vector.
#[derive(Debug, Clone, Copy)]
struct NormAccumulator {
    kind: NormKind,
    acc: f64,
}

impl NormAccumulator {
    #[inline]
    fn push(&mut self, y: f64) {
        let a = y.abs();
        match self.kind {
            NormKind::L1 => self.acc += a,
            NormKind::L2 => self.acc += a * a,
            NormKind::LInf => {
                if a > self.acc {
                    self.acc = a;
                }
            }
        }
    }

    #[inline]
    fn finish(self, d: usize) -> f64 {
        let d = d as f64;
        match self.kind {
            NormKind::L1 => self.acc / d,
            NormKind::L2 => self.acc.sqrt() / d.sqrt(),
            NormKind::LInf => self.acc,
        }
    }
}

/// Norm of `|y|`, normalized by `d = y.len()`.
pub fn norm(kind: NormKind, y: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(NpidError::domain("norm of an empty vector"));
    }
    let mut acc = kind.accumulator();
    for &v in y {
        acc.push(v);
    }
    Ok(acc.finish(y.len()))
}

/// Aggregated contrast `v_b` for every split `b` in `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastProfile {
    pub start: usize,
    pub end: usize,
    pub values: Vec<f64>,
}

impl ContrastProfile {
    pub fn value_at(&self, b: usize) -> f64 {
        self.values[b - self.start]
    }

    /// Maximizing split and its value; ties go to the smallest `b`.
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (self.start, self.values[0]);
        for (i, &v) in self.values.iter().enumerate().skip(1) {
            if v > best.1 {
                best = (self.start + i, v);
            }
        }
        best
    }
}

/// Reusable contrast evaluator for one series and evaluation set.
///
/// Construction sorts the evaluation points against the data once; each
/// interval then costs `O((e - s) * Q)`.
#[derive(Debug, Clone)]
pub struct Aggregator<'a> {
    series: &'a Series,
    index: IndicatorIndex,
    scale: Option<Vec<f64>>,
    kind: NormKind,
}

impl<'a> Aggregator<'a> {
    pub fn new(series: &'a Series, eval: &EvalPoints, kind: NormKind, rescale: bool) -> Self {
        let index = IndicatorIndex::new(series, eval);
        let scale = rescale.then(|| {
            let n = series.len() as f64;
            index
                .counts(1, series.len())
                .into_iter()
                .map(|c| rescale_from_fraction(c / n))
                .collect()
        });
        Self {
            series,
            index,
            scale,
            kind,
        }
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn series(&self) -> &Series {
        self.series
    }

    pub fn eval_len(&self) -> usize {
        self.index.width()
    }

    #[inline]
    fn coordinate(&self, q: usize, wl: f64, wr: f64, pre: f64, post: f64) -> f64 {
        let y = wl * pre - wr * post;
        match &self.scale {
            Some(sd) => y / sd[q],
            None => y,
        }
    }

    /// Aggregated contrasts over `b = s..e-1`.
    pub fn profile(&self, s: usize, e: usize) -> Result<ContrastProfile> {
        if s < 1 || s >= e || e > self.series.len() {
            return Err(NpidError::domain(format!(
                "need 1 <= s < e <= T, got s={s}, e={e}, T={}",
                self.series.len()
            )));
        }
        let width = self.index.width();
        let total = self.index.counts(s, e);
        let mut pre = vec![0.0f64; width];
        let mut values = Vec::with_capacity(e - s);
        for b in s..e {
            for c in &mut pre[self.index.first_covering(b)..] {
                *c += 1.0;
            }
            let (wl, wr) = cusum_weights(s, e, b);
            let mut acc = self.kind.accumulator();
            for (q, (&l, &t)) in pre.iter().zip(&total).enumerate() {
                acc.push(self.coordinate(q, wl, wr, l, t - l));
            }
            values.push(acc.finish(width));
        }
        Ok(ContrastProfile {
            start: s,
            end: e,
            values,
        })
    }

    /// Aggregated contrast at the single split `b` of `[s, e]`.
    pub fn at(&self, s: usize, e: usize, b: usize) -> Result<f64> {
        check_split(s, e, b, self.series.len())?;
        let pre = self.index.counts(s, b);
        let post = self.index.counts(b + 1, e);
        let (wl, wr) = cusum_weights(s, e, b);
        let mut acc = self.kind.accumulator();
        for (q, (&l, &r)) in pre.iter().zip(&post).enumerate() {
            acc.push(self.coordinate(q, wl, wr, l, r));
        }
        Ok(acc.finish(self.index.width()))
    }
}

/// One-shot aggregation over `[s, e]`.
pub fn aggregate(
    series: &Series,
    s: usize,
    e: usize,
    kind: NormKind,
    eval: &EvalPoints,
    rescale: bool,
) -> Result<ContrastProfile> {
    Aggregator::new(series, eval, kind, rescale).profile(s, e)
}
