// SPDX-License-Identifier: MIT OR Apache-2.0

//! Accuracy metrics and seeded replication studies.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregation::NormKind;
use crate::detector::{segment, DetectorConfig, StopRule};
use crate::error::{NpidError, Result};
use crate::simgen::{generate, ModelId, ModelSpec};

/// Scaled Hausdorff distance between true and estimated change-points.
///
/// `None` when either set is empty, where the distance carries no
/// information.
pub fn hausdorff(truth: &[usize], est: &[usize], longest_segment: usize) -> Option<f64> {
    if truth.is_empty() || est.is_empty() {
        return None;
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&a| to.iter().map(|&b| a.abs_diff(b)).min().unwrap_or(0))
            .max()
            .unwrap_or(0)
    };
    let d = directed(truth, est).max(directed(est, truth));
    Some(d as f64 / longest_segment.max(1) as f64)
}

/// Longest true segment, with the series ends as boundaries.
pub fn longest_segment(truth: &[usize], len: usize) -> usize {
    let mut prev = 0;
    let mut longest = 0;
    for &r in truth.iter().chain(std::iter::once(&len)) {
        longest = longest.max(r.saturating_sub(prev));
        prev = r;
    }
    longest
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub reps: usize,
    pub base_seed: u64,
    /// Run replications on the rayon pool. Results are identical either
    /// way; runtimes are measured per replication and will be noisier.
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub seed: u64,
    pub estimates: Vec<usize>,
    /// `N_hat - N`.
    pub count_error: i64,
    pub hausdorff: Option<f64>,
    pub runtime_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub model: ModelId,
    pub norm: NormKind,
    pub stop: StopRule,
    pub reps: usize,
    pub base_seed: u64,
    /// `N_hat - N` over successful replications.
    pub frequencies: BTreeMap<i64, usize>,
    /// Mean over replications where both truth and estimate are nonempty.
    pub mean_hausdorff: Option<f64>,
    pub mean_runtime_secs: f64,
    pub failures: usize,
    pub records: Vec<ReplicationRecord>,
}

impl StudyReport {
    pub fn frequency(&self, count_error: i64) -> usize {
        self.frequencies.get(&count_error).copied().unwrap_or(0)
    }

    /// Header for [`StudyReport::csv_row`].
    pub fn csv_header() -> &'static str {
        "model,method,<=-2,-1,0,1,>=2,d_H,time_s"
    }

    /// One row in the layout of the usual `N_hat - N` frequency table.
    pub fn csv_row(&self) -> String {
        let le = self
            .frequencies
            .iter()
            .filter(|(&k, _)| k <= -2)
            .map(|(_, &v)| v)
            .sum::<usize>();
        let ge = self
            .frequencies
            .iter()
            .filter(|(&k, _)| k >= 2)
            .map(|(_, &v)| v)
            .sum::<usize>();
        let dh = self
            .mean_hausdorff
            .map_or_else(|| "-".to_string(), |d| format!("{d:.3}"));
        format!(
            "{},NPID-{}-{},{},{},{},{},{},{},{:.3}",
            self.model,
            self.norm,
            match self.stop {
                StopRule::Threshold => "threshold",
                StopRule::Bic => "bic",
            },
            le,
            self.frequency(-1),
            self.frequency(0),
            self.frequency(1),
            ge,
            dh,
            self.mean_runtime_secs
        )
    }
}

fn replicate(model: ModelId, config: &DetectorConfig, seed: u64) -> ReplicationRecord {
    let failed = |msg: String| ReplicationRecord {
        seed,
        estimates: Vec::new(),
        count_error: 0,
        hausdorff: None,
        runtime_secs: 0.0,
        failure: Some(msg),
    };
    let series = match generate(&ModelSpec::new(model, seed)) {
        Ok(s) => s,
        Err(e) => return failed(e.to_string()),
    };
    let truth = series.truth().unwrap_or(&[]).to_vec();
    let started = Instant::now();
    let seg = match segment(&series, config) {
        Ok(s) => s,
        Err(e) => return failed(e.to_string()),
    };
    let runtime_secs = started.elapsed().as_secs_f64();
    let n_s = longest_segment(&truth, series.len());
    ReplicationRecord {
        seed,
        count_error: seg.len() as i64 - truth.len() as i64,
        hausdorff: hausdorff(&truth, &seg.changepoints, n_s),
        estimates: seg.changepoints,
        runtime_secs,
        failure: None,
    }
}

/// Runs `reps` replications with seeds `base_seed, base_seed + 1, ..`.
///
/// A failing replication is recorded and excluded from the aggregates.
pub fn replicate_study(
    model: ModelId,
    config: &DetectorConfig,
    options: &StudyOptions,
) -> Result<StudyReport> {
    if options.reps == 0 {
        return Err(NpidError::domain("a study needs at least one replication"));
    }
    config.validate()?;
    let seeds: Vec<u64> = (0..options.reps as u64)
        .map(|i| options.base_seed.wrapping_add(i))
        .collect();
    let records: Vec<ReplicationRecord> = if options.parallel {
        seeds
            .par_iter()
            .map(|&s| replicate(model, config, s))
            .collect()
    } else {
        seeds.iter().map(|&s| replicate(model, config, s)).collect()
    };

    let ok: Vec<&ReplicationRecord> = records.iter().filter(|r| r.failure.is_none()).collect();
    let mut frequencies = BTreeMap::new();
    for r in &ok {
        *frequencies.entry(r.count_error).or_insert(0) += 1;
    }
    let dists: Vec<f64> = ok.iter().filter_map(|r| r.hausdorff).collect();
    let mean_hausdorff =
        (!dists.is_empty()).then(|| dists.iter().sum::<f64>() / dists.len() as f64);
    let mean_runtime_secs = if ok.is_empty() {
        0.0
    } else {
        ok.iter().map(|r| r.runtime_secs).sum::<f64>() / ok.len() as f64
    };
    Ok(StudyReport {
        model,
        norm: config.norm,
        stop: config.stop,
        reps: options.reps,
        base_seed: options.base_seed,
        failures: records.len() - ok.len(),
        frequencies,
        mean_hausdorff,
        mean_runtime_secs,
        records,
    })
}
