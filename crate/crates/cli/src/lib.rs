// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end: `detect`, `simulate`, `study` and `evaluate`.

#![forbid(unsafe_code)]

pub mod error;
pub mod input;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use npid::{
    detect, detect_bic_detailed, generate, hausdorff, longest_segment, replicate_study,
    DetectorConfig, EvalChoice, ModelId, ModelSpec, NormKind, RescaleChoice, Restart, StopRule,
    StudyOptions, StudyReport, WindowSplit,
};
use serde::Serialize;

pub use error::CliError;
use output::{RunOutput, StudyOutput, TruthFile, SCHEMA};

#[derive(Debug, Parser)]
#[command(
    name = "npid",
    version,
    about = "Nonparametric isolate-detect change-point detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect change-points in a CSV series.
    Detect {
        input: PathBuf,
        #[command(flatten)]
        method: MethodArgs,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a benchmark series and its true change-points.
    Simulate {
        #[arg(long)]
        model: ModelId,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Writes `<prefix>.csv` and `<prefix>.truth.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded replication study on a benchmark model.
    Study {
        #[arg(long)]
        model: ModelId,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// First seed; replication i uses seed + i.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        method: MethodArgs,
        /// Run replications on one thread.
        #[arg(long)]
        serial: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a one-row frequency table.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Scaled Hausdorff distance between two change-point sets.
    Evaluate {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        est: PathBuf,
        /// Series length.
        #[arg(long = "T", visible_alias = "len")]
        len: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, default_value = "linf")]
    pub norm: NormKind,
    #[arg(long, default_value_t = npid::detector::DEFAULT_LAMBDA)]
    pub lambda: usize,
    /// Threshold constant; defaults per norm.
    #[arg(long = "const")]
    pub constant: Option<f64>,
    /// `threshold` or `bic`.
    #[arg(long, default_value = "bic")]
    pub stop: StopRule,
    /// `auto`, `full`, or a grid size Q.
    #[arg(long, default_value = "auto")]
    pub grid: EvalChoice,
    /// `auto`, `on` or `off`.
    #[arg(long, default_value = "auto")]
    pub rescale: RescaleChoice,
    /// `interval-end` or `estimate`.
    #[arg(long, default_value = "interval-end")]
    pub restart: Restart,
    /// `auto`, `off`, or a window length.
    #[arg(long, default_value = "auto")]
    pub split: WindowSplit,
}

impl MethodArgs {
    pub fn config(&self) -> Result<DetectorConfig, CliError> {
        let cfg = DetectorConfig {
            lambda: self.lambda,
            norm: self.norm,
            threshold_constant: self.constant,
            stop: self.stop,
            eval: self.grid,
            rescale: self.rescale,
            restart: self.restart,
            window_split: self.split,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("output types serialize");
    match out {
        Some(path) => write_file(path, &(text + "\n")),
        None => print_line(&text),
    }
}

fn print_line(text: &str) -> Result<(), CliError> {
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| CliError::Write {
        path: "stdout".into(),
        source: e,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Write {
        path: path.display().to_string(),
        source: e,
    })
}

fn run_detect(input: &Path, method: &MethodArgs, out: Option<&Path>) -> Result<(), CliError> {
    let series = input::read_series(input)?;
    let config = method.config()?;
    let started = Instant::now();
    let output = match config.stop {
        StopRule::Threshold => {
            let seg = detect(&series, &config)?;
            RunOutput::from_threshold(seg, started.elapsed().as_secs_f64() * 1e3)
        }
        StopRule::Bic => {
            let d = detect_bic_detailed(&series, &config)?;
            RunOutput::from_bic(d, started.elapsed().as_secs_f64() * 1e3)
        }
    };
    write_json(&output, out)
}

fn run_simulate(model: ModelId, seed: u64, prefix: &Path) -> Result<(), CliError> {
    let series = generate(&ModelSpec::new(model, seed))?;
    let mut csv = String::with_capacity(series.len() * 20);
    for v in series.values() {
        csv.push_str(&format!("{v}\n"));
    }
    let stem = prefix.display().to_string();
    write_file(Path::new(&format!("{stem}.csv")), &csv)?;
    let truth = TruthFile {
        schema: SCHEMA,
        model,
        seed,
        series_len: series.len(),
        changepoints: series.truth().unwrap_or(&[]).to_vec(),
    };
    write_json(&truth, Some(Path::new(&format!("{stem}.truth.json"))))
}

fn run_study(
    model: ModelId,
    options: StudyOptions,
    method: &MethodArgs,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    let config = method.config()?;
    let report = replicate_study(model, &config, &options)?;
    if let Some(path) = csv {
        let table = format!("{}\n{}\n", StudyReport::csv_header(), report.csv_row());
        write_file(path, &table)?;
    }
    write_json(
        &StudyOutput {
            schema: SCHEMA,
            config,
            report,
        },
        out,
    )
}

fn run_evaluate(truth: &Path, est: &Path, len: usize) -> Result<Option<f64>, CliError> {
    let t = input::read_changepoints(truth)?;
    let e = input::read_changepoints(est)?;
    for (path, points) in [(truth, &t), (est, &e)] {
        if let Some(&bad) = points.iter().find(|&&r| r == 0 || r >= len) {
            return Err(CliError::Format {
                path: path.display().to_string(),
                msg: format!("change-point {bad} outside [1, {}]", len.saturating_sub(1)),
            });
        }
    }
    Ok(hausdorff(&t, &e, longest_segment(&t, len)))
}

/// Runs a parsed command, writing results to stdout or the named files.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect { input, method, out } => run_detect(&input, &method, out.as_deref()),
        Command::Simulate { model, seed, out } => run_simulate(model, seed, &out),
        Command::Study {
            model,
            reps,
            seed,
            method,
            serial,
            out,
            csv,
        } => {
            let options = StudyOptions {
                reps,
                base_seed: seed,
                parallel: !serial,
            };
            run_study(model, options, &method, out.as_deref(), csv.as_deref())
        }
        Command::Evaluate { truth, est, len } => {
            let d = run_evaluate(&truth, &est, len)?;
            print_line(&d.map_or_else(|| "NA".to_string(), |v| v.to_string()))
        }
    }
}
