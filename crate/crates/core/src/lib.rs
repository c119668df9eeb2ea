// SPDX-License-Identifier: MIT OR Apache-2.0

//! Nonparametric isolate-detect (NPID) estimation of multiple change-points
//! in the distribution of a univariate, serially independent sequence.
//!
//! The detector scans right- and left-expanding intervals so each tested
//! interval holds at most one change-point, aggregates empirical-CDF CUSUM
//! contrasts across evaluation points with a mean-dominant norm, and stops
//! either by thresholding or by minimizing an information criterion over a
//! solution path of candidates.
//!
//! All positions exposed by this crate are 1-based: a change-point `r`
//! means observations `1..=r` and `r+1..=T` come from different
//! distributions.

#![forbid(unsafe_code)]

pub mod aggregation;
pub mod contrast;
pub mod detector;
pub mod error;
pub mod eval;
pub mod selector;
pub mod simgen;

pub use aggregation::{aggregate, norm, Aggregator, ContrastProfile, NormKind};
pub use contrast::{cusum, ecdf, grid_points, rescale_sd, EvalMode, EvalPoints, Series};
pub use detector::{
    detect, detect_traced, interval_sequences, segment, threshold, DetectionTrace, DetectorConfig,
    EvalChoice, ExpansionSchedule, Interval, RescaleChoice, Restart, Segmentation, Side, StopRule,
    WindowSplit,
};
pub use error::{NpidError, Result};
pub use eval::{hausdorff, longest_segment, replicate_study, StudyOptions, StudyReport};
pub use selector::{
    bic_penalty, bic_select, detect_bic, detect_bic_detailed, overestimate, solution_path,
    st_likelihood, BicDetection, BicResult, SolutionPath,
};
pub use simgen::{generate, ModelId, ModelSpec};
