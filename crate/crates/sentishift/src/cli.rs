//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sentishift_core::sentiment::Weighting;

use crate::commands::{self, EconAction, FeaturesAction};
use crate::config::{Overrides, Resolved};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "sentishift", version, about = "Affect word-list statistics, sentiment indices and VECM analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "sentishift.toml")]
    pub config: PathBuf,
    /// Global seed; every stage derives its own seed from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output root directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated corpus tag filter.
    #[arg(long, global = true, value_delimiter = ',')]
    pub tags: Option<Vec<String>>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rating means per list and permutation tests against a reference list.
    Lexstat {
        /// Permutation resamples per test.
        #[arg(long)]
        resamples: Option<usize>,
        /// Repeats of the valence-matched comparison.
        #[arg(long)]
        repeats: Option<usize>,
        /// Valence buckets of the matched comparison.
        #[arg(long)]
        buckets: Option<usize>,
    },
    /// Feature regressors from word embeddings.
    Features {
        #[arg(value_enum)]
        action: FeaturesCmd,
        /// Cross-validation folds.
        #[arg(long)]
        k_folds: Option<usize>,
        /// Training epochs per regressor (upper bound; early stopping applies).
        #[arg(long)]
        max_epochs: Option<usize>,
        /// Hidden units per regressor.
        #[arg(long)]
        hidden_units: Option<usize>,
    },
    /// PCA and two-cluster split of a list's predicted features.
    Split {
        /// Configured list to split.
        #[arg(long)]
        list: Option<String>,
        /// k-means restarts.
        #[arg(long)]
        restarts: Option<usize>,
        /// Label tied clusters in cluster order instead of failing.
        #[arg(long)]
        allow_tie: bool,
    },
    /// Monthly sentiment indices from the corpus.
    Index {
        /// How article scores combine within a month.
        #[arg(long, value_enum)]
        weighting: Option<WeightingArg>,
    },
    /// Unit roots, cointegration, VECM, impulse responses, variance decomposition.
    Econ {
        #[arg(value_enum)]
        action: EconCmd,
        /// Levels-VAR lag (default: Schwarz criterion up to --max-lag).
        #[arg(long)]
        lag: Option<usize>,
        /// Cointegration rank (default: Johansen trace test at 5%).
        #[arg(long)]
        rank: Option<usize>,
        /// Largest lag considered by the Schwarz criterion.
        #[arg(long)]
        max_lag: Option<usize>,
        /// Months of impulse responses / variance decomposition.
        #[arg(long)]
        horizon: Option<usize>,
        /// Bootstrap replications for IRF bands; 0 disables them.
        #[arg(long)]
        replications: Option<usize>,
        /// Confidence level of the IRF bands.
        #[arg(long)]
        level: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeaturesCmd {
    Train,
    Predict,
    Crossval,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EconCmd {
    Adf,
    Johansen,
    Vecm,
    Irf,
    Fevd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightingArg {
    Unweighted,
    Length,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        let g = &self.global;
        let mut o = Overrides {
            seed: g.seed,
            out: g.out.clone(),
            tags: g.tags.clone(),
            ..Default::default()
        };
        match &self.command {
            Command::Lexstat {
                resamples,
                repeats,
                buckets,
            } => {
                o.resamples = *resamples;
                o.repeats = *repeats;
                o.buckets = *buckets;
            }
            Command::Features {
                k_folds,
                max_epochs,
                hidden_units,
                ..
            } => {
                o.k_folds = *k_folds;
                o.max_epochs = *max_epochs;
                o.hidden_units = *hidden_units;
            }
            Command::Split {
                list,
                restarts,
                allow_tie,
            } => {
                o.split_list = list.clone();
                o.restarts = *restarts;
                o.allow_tie = *allow_tie;
            }
            Command::Index { weighting } => {
                o.weighting = weighting.map(|w| match w {
                    WeightingArg::Unweighted => Weighting::Unweighted,
                    WeightingArg::Length => Weighting::Length,
                });
            }
            Command::Econ {
                lag,
                rank,
                max_lag,
                horizon,
                replications,
                level,
                ..
            } => {
                o.lag = *lag;
                o.rank = *rank;
                o.max_lag = *max_lag;
                o.horizon = *horizon;
                o.replications = *replications;
                o.level = *level;
            }
        }
        o
    }
}

/// Loads the configuration and runs one subcommand; returns the directory
/// it wrote.
pub fn run(cli: &Cli) -> Result<PathBuf> {
    let r = Resolved::load(&cli.global.config, &cli.overrides())?;
    log::info!("config hash {}", r.hash);
    match &cli.command {
        Command::Lexstat { .. } => commands::lexstat(&r),
        Command::Features { action, .. } => commands::features(
            &r,
            match action {
                FeaturesCmd::Train => FeaturesAction::Train,
                FeaturesCmd::Predict => FeaturesAction::Predict,
                FeaturesCmd::Crossval => FeaturesAction::Crossval,
            },
        ),
        Command::Split { .. } => commands::split(&r),
        Command::Index { .. } => commands::index(&r),
        Command::Econ { action, .. } => commands::econ(
            &r,
            match action {
                EconCmd::Adf => EconAction::Adf,
                EconCmd::Johansen => EconAction::Johansen,
                EconCmd::Vecm => EconAction::Vecm,
                EconCmd::Irf => EconAction::Irf,
                EconCmd::Fevd => EconAction::Fevd,
            },
        ),
    }
}
