//! `qfe`: subsample, simulate, fit and replay quantum-feature surrogates.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use qfe_core::dataset::write_dataset_csv;
use qfe_core::downstream::{parity_dataset, ParityInputs};

use commands::{stage, Run};

#[derive(Parser)]
#[command(name = "qfe", version, about = "Quantum-feature surrogate pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline configuration (TOML)
    #[arg(short, long)]
    config: PathBuf,
    /// Run directory; defaults to `output_dir` from the config
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Pick the stratified k-medoids subsample of the training rows
    Subsample(Common),
    /// Simulate quantum features for the subsample rows
    Extract {
        #[command(flatten)]
        common: Common,
        /// Index file (default: <run>/subsample.idx)
        #[arg(long)]
        indices: Option<PathBuf>,
    },
    /// Fit the Ridge surrogate to the extracted features
    TrainSurrogate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        indices: Option<PathBuf>,
    },
    /// Predict features for every dataset row with coverage flags
    Replay {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Train the downstream classifier on replayed training rows
    Train {
        #[command(flatten)]
        common: Common,
        /// Feature table (default: <run>/replay.csv)
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Evaluate the classifier on the test rows
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        classifier: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Classical vs full-quantum vs surrogate on one split
    Compare(Common),
    /// Every stage, then the comparison report and manifest
    RunAll(Common),
    /// Write a synthetic parity-labelled dataset
    Generate {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 500)]
        rows: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Columns whose sign product sets the label
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
        parity: Vec<usize>,
        /// Width of the corner clusters
        #[arg(long, default_value_t = 0.1, conflicts_with = "uniform")]
        spread: f64,
        /// Uniform inputs instead of corner clusters
        #[arg(long)]
        uniform: bool,
        #[arg(long)]
        seed: u64,
    },
}

fn open(c: &Common) -> Result<Run> {
    stage("config", || Run::open(&c.config, c.out.clone(), c.seed))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Subsample(c) => {
            let run = open(&c)?;
            stage("subsample", || commands::subsample(&run))
        }
        Command::Extract { common, indices } => {
            let run = open(&common)?;
            stage("extract", || commands::extract(&run, indices.as_deref()))
        }
        Command::TrainSurrogate {
            common,
            features,
            indices,
        } => {
            let run = open(&common)?;
            stage("train-surrogate", || {
                commands::train_surrogate(&run, features.as_deref(), indices.as_deref())
            })
        }
        Command::Replay { common, model } => {
            let run = open(&common)?;
            stage("replay", || commands::replay(&run, model.as_deref()))
        }
        Command::Train { common, features } => {
            let run = open(&common)?;
            stage("train", || commands::train(&run, features.as_deref()))
        }
        Command::Evaluate {
            common,
            classifier,
            features,
        } => {
            let run = open(&common)?;
            stage("evaluate", || {
                commands::evaluate_cmd(&run, classifier.as_deref(), features.as_deref())
            })
        }
        Command::Compare(c) => {
            let run = open(&c)?;
            stage("compare", || commands::compare(&run))
        }
        Command::RunAll(c) => {
            let run = open(&c)?;
            commands::run_all(&run)
        }
        Command::Generate {
            out,
            rows,
            dim,
            parity,
            spread,
            uniform,
            seed,
        } => stage("generate", || {
            let inputs = if uniform {
                ParityInputs::Uniform
            } else {
                ParityInputs::Blobs { spread }
            };
            let ds = parity_dataset(rows, dim, &parity, inputs, seed)?;
            artifacts::write(&out, &write_dataset_csv(&ds, "label"))?;
            println!("generate: {rows} rows x {dim} columns -> {}", out.display());
            Ok(())
        }),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
