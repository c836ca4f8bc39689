//! Command-line front end for the three-phase pipeline.
//!
//! Every stage reads and writes inside the output directory:
//!
//! | stage        | reads                          | writes                                              |
//! |--------------|--------------------------------|-----------------------------------------------------|
//! | characterize | sources                        | `metafeatures.csv`, `rejected.json`                 |
//! | targets      | sources                        | `targets.csv`                                       |
//! | assemble     | `metafeatures.csv`, `targets.csv` | `metadb_raw.csv`, `metadb.csv`, `metadb.provenance.json` |
//! | evaluate     | `metadb.csv`                   | `run/` bundle                                       |
//! | plot         | `run/metrics.csv`              | `run/rmse.svg`, `run/r2.svg`                        |
//! | fetch        | OpenML ids                     | cache directory                                     |

mod commands;
pub mod config;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_assemble, cmd_characterize, cmd_evaluate, cmd_fetch, cmd_plot, cmd_targets, Rejection};
pub use config::PipelineConfig;

use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "abstractmeta", version, about = "Meta-feature extraction and abstract meta-feature evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed applied to extraction, base evaluation and the CV plan.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Dotted override such as `network.epochs=100`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    #[arg(long = "plan.repeats", global = true)]
    pub plan_repeats: Option<usize>,
    #[arg(long = "plan.folds", global = true)]
    pub plan_folds: Option<usize>,
    #[arg(long = "network.epochs", global = true)]
    pub network_epochs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Validate sources and extract traditional meta-features.
    Characterize,
    /// Measure base-learner AUCs.
    Targets,
    /// Build and preprocess the meta-database.
    Assemble,
    /// Run the repeated cross-validation experiment.
    Evaluate,
    /// Draw violin plots from a run bundle.
    Plot,
    /// Download OpenML datasets into the cache.
    Fetch,
}

impl Cli {
    /// Resolves the effective configuration: defaults, file, `--set`, then flags.
    pub fn config(&self) -> Result<PipelineConfig> {
        let mut overrides = self.set.clone();
        if let Some(out) = &self.out {
            overrides.push(format!("out={}", toml_string(&out.to_string_lossy())));
        }
        if let Some(seed) = self.seed {
            for key in ["extraction.seed", "base_eval.seed", "plan.master_seed"] {
                overrides.push(format!("{key}={seed}"));
            }
        }
        if let Some(jobs) = self.jobs {
            overrides.push(format!("jobs={jobs}"));
        }
        if let Some(r) = self.plan_repeats {
            overrides.push(format!("plan.repeats={r}"));
        }
        if let Some(f) = self.plan_folds {
            overrides.push(format!("plan.folds={f}"));
        }
        if let Some(e) = self.network_epochs {
            overrides.push(format!("network.epochs={e}"));
        }
        PipelineConfig::load(self.config.as_deref(), &overrides)
    }
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

pub fn dispatch(command: Command, cfg: &PipelineConfig) -> Result<()> {
    match command {
        Command::Characterize => cmd_characterize(cfg).map(|_| ()),
        Command::Targets => cmd_targets(cfg).map(|_| ()),
        Command::Assemble => cmd_assemble(cfg).map(|_| ()),
        Command::Evaluate => cmd_evaluate(cfg).map(|_| ()),
        Command::Plot => cmd_plot(cfg).map(|_| ()),
        Command::Fetch => cmd_fetch(cfg),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code:
/// 0 success, 1 usage or configuration, 2 data error, 3 internal.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = std::panic::catch_unwind(|| -> Result<()> {
        let cfg = cli.config()?;
        if let Some(jobs) = cfg.jobs {
            // a second call in the same process keeps the existing pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
        }
        dispatch(cli.command, &cfg)
    });
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure");
            3
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
