//! Experiment driver: configuration, seed sweeps, property suites and artifacts.

pub mod config;
pub mod experiment;
pub mod lemma_suite;
pub mod report;

use thiserror::Error;

use crate::congest::SimError;
use crate::gossip::GossipError;
use crate::graph::{GraphError, ScheduleError};
use crate::mixing::MixError;
use crate::spectral::SpectralError;
use crate::walks::WalkError;

pub use config::{Algorithm, ExperimentConfig, TauSource};
pub use experiment::{aggregate, run_experiment, Aggregate, Detail, RunReport, SeedRecord};
pub use lemma_suite::{lemma_suite, LemmaCheck, LemmaConfig, LemmaReport, LemmaScope};
pub use report::{gossip_rows, write_artifacts, GossipRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Gossip(#[from] GossipError),
    #[error(transparent)]
    Mix(#[from] MixError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit status: 2 for configuration and schedule problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Schedule(_) | Self::Graph(_) => 2,
            _ => 1,
        }
    }
}
