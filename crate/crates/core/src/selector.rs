// SPDX-License-Identifier: MIT OR Apache-2.0

//! Information-criterion stopping: overestimate with a lowered threshold,
//! order the candidates by importance, then pick the prefix of that order
//! minimizing a BIC built on the integrated empirical profile likelihood.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::aggregation::{Aggregator, NormKind};
use crate::contrast::{validate_changepoints, EvalPoints, Series};
use crate::detector::{detect, DetectorConfig, RescaleChoice, Segmentation, StopRule};
use crate::error::{NpidError, Result};

/// Overestimation threshold constant relative to the configured one.
pub const OVERESTIMATE_FACTOR: f64 = 0.8;
pub const PENALTY_EXPONENT: f64 = 2.1;

/// Candidates ordered most important first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub ordered: Vec<usize>,
    /// Triplet contrast of `ordered[i]` at the moment it was removed.
    pub removal_scores: Vec<f64>,
}

impl SolutionPath {
    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// The `j` most important candidates, ascending.
    pub fn model(&self, j: usize) -> Vec<usize> {
        let mut m = self.ordered[..j].to_vec();
        m.sort_unstable();
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicResult {
    pub chosen_j: usize,
    /// `BIC(0..=J)`.
    pub scores: Vec<f64>,
    pub penalty: f64,
    /// The chosen model, ascending.
    pub changepoints: Vec<usize>,
}

/// Every intermediate of a BIC-stopped run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicDetection {
    pub segmentation: Segmentation,
    pub candidates: Vec<usize>,
    pub path: SolutionPath,
    pub bic: BicResult,
}

/// Threshold detection with the constant lowered by 20%.
///
/// Rescaling is resolved against `config` as given, so `Auto` under BIC
/// stopping rescales here.
pub fn overestimate(series: &Series, config: &DetectorConfig) -> Result<Vec<usize>> {
    let lowered = DetectorConfig {
        threshold_constant: Some(OVERESTIMATE_FACTOR * config.constant()),
        stop: StopRule::Threshold,
        rescale: if config.rescale_enabled() {
            RescaleChoice::On
        } else {
            RescaleChoice::Off
        },
        ..config.clone()
    };
    detect(series, &lowered).map(|seg| seg.changepoints)
}

/// Orders `candidates` by repeatedly dropping the one whose contrast on the
/// span between its neighbours is smallest. The last survivor comes first.
pub fn solution_path(
    series: &Series,
    candidates: &[usize],
    kind: NormKind,
    eval: &EvalPoints,
    rescale: bool,
) -> Result<SolutionPath> {
    validate_changepoints(candidates, series.len())?;
    let agg = Aggregator::new(series, eval, kind, rescale);
    let len = series.len();
    let mut live = candidates.to_vec();
    let triplet = |live: &[usize], j: usize| -> Result<f64> {
        let prev = if j == 0 { 0 } else { live[j - 1] };
        let next = live.get(j + 1).copied().unwrap_or(len);
        agg.at(prev + 1, next, live[j])
    };
    let mut scores = (0..live.len())
        .map(|j| triplet(&live, j))
        .collect::<Result<Vec<_>>>()?;

    let mut removed = Vec::with_capacity(live.len());
    let mut removed_scores = Vec::with_capacity(live.len());
    while !live.is_empty() {
        let mut m = 0;
        for (j, &v) in scores.iter().enumerate().skip(1) {
            if v < scores[m] {
                m = j;
            }
        }
        removed.push(live.remove(m));
        removed_scores.push(scores.remove(m));
        // Only the two neighbours of the removed candidate changed span.
        if m > 0 {
            scores[m - 1] = triplet(&live, m - 1)?;
        }
        if m < live.len() {
            scores[m] = triplet(&live, m)?;
        }
    }
    removed.reverse();
    removed_scores.reverse();
    Ok(SolutionPath {
        ordered: removed,
        removal_scores: removed_scores,
    })
}

/// Segment contributions to the integrated likelihood, memoized by span.
struct Likelihood {
    len: usize,
    /// For each observation, the number of values strictly below it.
    below: Vec<usize>,
    cache: HashMap<(usize, usize), f64>,
}

impl Likelihood {
    fn new(series: &Series) -> Self {
        let mut sorted = series.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        let below = series
            .values()
            .iter()
            .map(|&x| sorted.partition_point(|&v| v < x))
            .collect();
        Self {
            len: series.len(),
            below,
            cache: HashMap::new(),
        }
    }

    /// `sum_l (n / (l (T - l))) h(F(X_[l]))` for the segment `lo+1..=hi`.
    fn segment(&mut self, lo: usize, hi: usize) -> f64 {
        if let Some(&v) = self.cache.get(&(lo, hi)) {
            return v;
        }
        let t_len = self.len;
        let n = hi - lo;
        // hist[k]: segment values with exactly k observations below them.
        let mut hist = vec![0usize; t_len];
        for &k in &self.below[lo..hi] {
            hist[k] += 1;
        }
        let mut covered = 0usize;
        let mut sum = 0.0;
        // The l-th order statistic covers a value iff l - 1 >= its `below`.
        for (idx, &h) in hist.iter().enumerate().take(t_len.saturating_sub(1)) {
            covered += h;
            let l = idx + 1;
            if l < 2 {
                continue;
            }
            let f = covered as f64 / n as f64;
            let w = n as f64 / (l as f64 * (t_len - l) as f64);
            sum += w * binary_neg_entropy(f);
        }
        self.cache.insert((lo, hi), sum);
        sum
    }

    fn total(&mut self, breakpoints: &[usize]) -> f64 {
        let mut bounds = Vec::with_capacity(breakpoints.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(breakpoints);
        bounds.push(self.len);
        let inner: f64 = bounds.windows(2).map(|w| self.segment(w[0], w[1])).sum();
        self.len as f64 * inner
    }
}

/// `f ln f + (1 - f) ln(1 - f)` with `0 ln 0 = 0`.
#[inline]
fn binary_neg_entropy(f: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
    term(f) + term(1.0 - f)
}

/// Integrated profile log-likelihood of the segmentation at `breakpoints`.
pub fn st_likelihood(series: &Series, breakpoints: &[usize]) -> Result<f64> {
    validate_changepoints(breakpoints, series.len())?;
    Ok(Likelihood::new(series).total(breakpoints))
}

/// `0.5 (ln T)^2.1`.
pub fn bic_penalty(len: usize) -> f64 {
    0.5 * (len as f64).ln().powf(PENALTY_EXPONENT)
}

/// Minimizes `-S_T(model_j) + j p_T` over the prefixes of `path`.
pub fn bic_select(series: &Series, path: &SolutionPath) -> Result<BicResult> {
    validate_changepoints(&path.model(path.len()), series.len())?;
    let penalty = bic_penalty(series.len());
    let mut lik = Likelihood::new(series);
    let scores: Vec<f64> = (0..=path.len())
        .map(|j| -lik.total(&path.model(j)) + j as f64 * penalty)
        .collect();
    let mut chosen_j = 0;
    for (j, &v) in scores.iter().enumerate().skip(1) {
        if v < scores[chosen_j] {
            chosen_j = j;
        }
    }
    Ok(BicResult {
        chosen_j,
        changepoints: path.model(chosen_j),
        scores,
        penalty,
    })
}

/// Overestimate, build the solution path and select by BIC.
///
/// The path ranks candidates on unscaled contrasts, whatever rescaling the
/// overestimation used.
pub fn detect_bic(series: &Series, config: &DetectorConfig) -> Result<Segmentation> {
    detect_bic_detailed(series, config).map(|d| d.segmentation)
}

pub fn detect_bic_detailed(series: &Series, config: &DetectorConfig) -> Result<BicDetection> {
    let candidates = overestimate(series, config)?;
    let eval = config.eval_points(series)?;
    let path = solution_path(series, &candidates, config.norm, &eval, false)?;
    let bic = bic_select(series, &path)?;
    let scores = bic
        .changepoints
        .iter()
        .map(|cp| {
            let i = path
                .ordered
                .iter()
                .position(|b| b == cp)
                .ok_or_else(|| NpidError::domain("selected point missing from path"))?;
            Ok(path.removal_scores[i])
        })
        .collect::<Result<Vec<_>>>()?;
    let segmentation = Segmentation {
        changepoints: bic.changepoints.clone(),
        scores,
        series_len: series.len(),
        config: config.clone(),
    };
    Ok(BicDetection {
        segmentation,
        candidates,
        path,
        bic,
    })
}
