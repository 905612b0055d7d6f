//! CSV tables, champion files and run manifests.

use std::fmt::Write as _;
use std::path::Path;

use crate::neat::Genome;

use super::batch::BatchRecord;
use super::evolution::{GenerationStats, RunRecord};
use super::{HarnessError, RunConfig};

const GENERATION_HEADER: [&str; 6] =
    ["generation", "best_fitness", "mean_fitness", "species_count", "mean_genome_edges", "evaluations"];

/// One row per generation. Floats use the shortest round-trip form.
pub fn export_run_csv(record: &RunRecord, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(GENERATION_HEADER)?;
    for g in &record.generations {
        w.write_record([
            g.generation.to_string(),
            format!("{:?}", g.best_fitness),
            format!("{:?}", g.mean_fitness),
            g.species_count.to_string(),
            format!("{:?}", g.mean_genome_edges),
            g.evaluations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`export_run_csv`].
pub fn read_run_csv(path: impl AsRef<Path>) -> Result<Vec<GenerationStats>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(GENERATION_HEADER) {
        return Err(HarnessError::Config("unexpected CSV header".into()));
    }
    let bad = |e: String| HarnessError::Config(format!("bad CSV field: {e}"));
    r.records()
        .map(|row| {
            let row = row?;
            let f = |i: usize| row[i].parse::<f64>().map_err(|e| bad(e.to_string()));
            let n = |i: usize| row[i].parse::<usize>().map_err(|e| bad(e.to_string()));
            Ok(GenerationStats {
                generation: n(0)?,
                best_fitness: f(1)?,
                mean_fitness: f(2)?,
                species_count: n(3)?,
                mean_genome_edges: f(4)?,
                evaluations: n(5)?,
            })
        })
        .collect()
}

/// One row per run plus, after a blank line, nothing else: summary
/// statistics go to the manifest.
pub fn export_batch_csv(batch: &BatchRecord, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["run", "seed", "best_fitness", "generations", "final_mean_genome_edges", "iterations_of_best"])?;
    for r in &batch.runs {
        w.write_record([
            r.run_index.to_string(),
            r.seed.to_string(),
            format!("{:?}", r.best_fitness),
            r.generations.len().to_string(),
            format!("{:?}", r.generations.last().map_or(0.0, |g| g.mean_genome_edges)),
            r.iterations_of_best.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Averaged online curve, one row per generation.
pub fn export_curve_csv(batch: &BatchRecord, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["generation", "mean_best_fitness"])?;
    for (g, v) in batch.mean_curve().into_iter().enumerate() {
        w.write_record([g.to_string(), format!("{v:?}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_genome(genome: &Genome, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    std::fs::write(path, genome.to_text())?;
    Ok(())
}

pub fn load_genome(path: impl AsRef<Path>) -> Result<Genome, HarnessError> {
    Ok(Genome::from_text(&std::fs::read_to_string(path)?)?)
}

/// Plain-text manifest: the configuration echo followed by per-run seeds
/// and results.
pub fn run_manifest(cfg: &RunConfig, runs: &[RunRecord]) -> String {
    let mut s = String::from("# morphogrid run manifest\n");
    s.push_str(&cfg.to_text());
    let _ = writeln!(s, "\n[results]");
    for r in runs {
        let _ = writeln!(
            s,
            "run {} seed {} best_fitness {:?} generations {} iterations_of_best {}",
            r.run_index,
            r.seed,
            r.best_fitness,
            r.generations.len(),
            r.iterations_of_best
        );
    }
    if runs.len() > 1 {
        let fitness: Vec<f64> = runs.iter().map(|r| r.best_fitness).collect();
        if let Some(f) = super::FiveNumber::of(&fitness) {
            let _ = writeln!(
                s,
                "summary min {:?} q1 {:?} median {:?} q3 {:?} max {:?}",
                f.min, f.q1, f.median, f.q3, f.max
            );
        }
    }
    s
}

/// Writes `manifest.txt`, `run{r}.csv` and `champion{r}.genome` for every
/// run into `dir`, plus `batch.csv` and `curve.csv` when there is more than
/// one run.
pub fn write_outputs(cfg: &RunConfig, batch: &BatchRecord, dir: impl AsRef<Path>) -> Result<(), HarnessError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for r in &batch.runs {
        export_run_csv(r, dir.join(format!("run{}.csv", r.run_index)))?;
        save_genome(&r.best_genome, dir.join(format!("champion{}.genome", r.run_index)))?;
    }
    if batch.runs.len() > 1 {
        export_batch_csv(batch, dir.join("batch.csv"))?;
        export_curve_csv(batch, dir.join("curve.csv"))?;
    }
    std::fs::write(dir.join("manifest.txt"), run_manifest(cfg, &batch.runs))?;
    Ok(())
}
