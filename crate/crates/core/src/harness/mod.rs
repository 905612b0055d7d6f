//! Experiment driver: configuration, seeded runs and batches, self-healing
//! trials, growth snapshots and file output.

mod batch;
mod config;
mod evolution;
mod healing;
mod output;
mod snapshot;

use thiserror::Error;

pub use batch::{run_batch, run_batch_with, BatchRecord, FiveNumber};
pub use config::{parse_grid, RunConfig};
pub use evolution::{phase_rng, run_evolution, run_neat, GenerationStats, NeatRun, Phase, RunRecord};
pub use healing::{self_healing_experiment, Disturbance, HealingReport, Recovery, Trial, CLOSE_SIMILARITY};
pub use output::{
    export_batch_csv, export_curve_csv, export_run_csv, load_genome, read_run_csv, run_manifest, save_genome,
    write_outputs,
};
pub use snapshot::{snapshot_file_name, snapshot_growth, Snapshot, SnapshotSet};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("champion did not stabilize within {0} steps")]
    NotConverged(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Genome(#[from] crate::neat::GenomeError),
    #[error(transparent)]
    Devo(#[from] crate::devo::DevoError),
    #[error(transparent)]
    Eval(#[from] crate::flags::EvalError),
    #[error(transparent)]
    Image(#[from] crate::flags::ImageError),
}
