// SPDX-License-Identifier: MIT OR Apache-2.0

//! Versioned JSON documents written by the subcommands.

use npid::{BicDetection, DetectorConfig, ModelId, Segmentation, SolutionPath, StudyReport};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicSummary {
    pub chosen_j: usize,
    pub scores: Vec<f64>,
    pub penalty: f64,
}

/// Result of `detect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub schema: u32,
    pub series_len: usize,
    /// 1-based: observations `..=r` precede the change.
    pub changepoints: Vec<usize>,
    pub scores: Vec<f64>,
    /// Overestimated candidates, BIC stopping only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<SolutionPath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bic: Option<BicSummary>,
    pub config: DetectorConfig,
    pub runtime_ms: f64,
}

impl RunOutput {
    pub fn from_threshold(seg: Segmentation, runtime_ms: f64) -> Self {
        Self {
            schema: SCHEMA,
            series_len: seg.series_len,
            changepoints: seg.changepoints,
            scores: seg.scores,
            candidates: None,
            path: None,
            bic: None,
            config: seg.config,
            runtime_ms,
        }
    }

    pub fn from_bic(d: BicDetection, runtime_ms: f64) -> Self {
        Self {
            schema: SCHEMA,
            series_len: d.segmentation.series_len,
            changepoints: d.segmentation.changepoints,
            scores: d.segmentation.scores,
            candidates: Some(d.candidates),
            path: Some(d.path),
            bic: Some(BicSummary {
                chosen_j: d.bic.chosen_j,
                scores: d.bic.scores,
                penalty: d.bic.penalty,
            }),
            config: d.segmentation.config,
            runtime_ms,
        }
    }
}

/// Sidecar written next to a simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub schema: u32,
    pub model: ModelId,
    pub seed: u64,
    pub series_len: usize,
    pub changepoints: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutput {
    pub schema: u32,
    pub config: DetectorConfig,
    pub report: StudyReport,
}
