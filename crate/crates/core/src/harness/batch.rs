//! Independent repeated runs and their box-plot statistics.

use super::evolution::{run_evolution, RunRecord};
use super::{HarnessError, RunConfig};

/// Box-plot five-number summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    /// Quartiles use linear interpolation between order statistics.
    /// Returns `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(FiveNumber {
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug)]
pub struct BatchRecord {
    pub runs: Vec<RunRecord>,
}

impl BatchRecord {
    pub fn final_fitnesses(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.best_fitness).collect()
    }

    pub fn summary(&self) -> FiveNumber {
        FiveNumber::of(&self.final_fitnesses()).expect("batches hold at least one run")
    }

    /// Online curve averaged over runs. Shorter runs are extended with
    /// their final value.
    pub fn mean_curve(&self) -> Vec<f64> {
        let len = self.runs.iter().map(|r| r.generations.len()).max().unwrap_or(0);
        (0..len)
            .map(|g| {
                let sum: f64 = self
                    .runs
                    .iter()
                    .map(|r| r.generations[g.min(r.generations.len() - 1)].best_fitness)
                    .sum();
                sum / self.runs.len() as f64
            })
            .collect()
    }

    /// Final-generation mean enabled-edge count of each run.
    pub fn final_mean_edges(&self) -> Vec<f64> {
        self.runs
            .iter()
            .map(|r| r.generations.last().map_or(0.0, |g| g.mean_genome_edges))
            .collect()
    }
}

/// Runs `cfg.runs` independent runs, indices `0..runs`.
pub fn run_batch(cfg: &RunConfig) -> Result<BatchRecord, HarnessError> {
    run_batch_with(cfg, |_| {})
}

/// [`run_batch`] with a callback after each finished run.
pub fn run_batch_with(cfg: &RunConfig, mut on_run: impl FnMut(&RunRecord)) -> Result<BatchRecord, HarnessError> {
    cfg.validate()?;
    let mut runs = Vec::with_capacity(cfg.runs);
    for r in 0..cfg.runs {
        let record = run_evolution(cfg, r)?;
        on_run(&record);
        runs.push(record);
    }
    Ok(BatchRecord { runs })
}
