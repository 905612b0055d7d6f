//! Graymap dumps of an organism at chosen growth steps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::devo::{grow, GrowthConfig, Organism};
use crate::flags::{ModelVariant, PgmFormat};
use crate::neat::Genome;

use super::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    /// Requested step.
    pub requested: usize,
    /// Step actually imaged: `requested`, or the last step growth ran to.
    pub taken: usize,
    /// Phenotype first, then chemicals `1..=M`.
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct SnapshotSet {
    pub converged: bool,
    /// Steps growth takes from the zero state.
    pub growth_iterations: usize,
    pub snapshots: Vec<Snapshot>,
    pub manifest: PathBuf,
}

/// File name for channel `channel` (0 = phenotype, `k` = chemical `k`) at
/// step `iteration`.
pub fn snapshot_file_name(iteration: usize, channel: usize) -> String {
    if channel == 0 {
        format!("iter{iteration:04}_phenotype.pgm")
    } else {
        format!("iter{iteration:04}_chem{channel}.pgm")
    }
}

/// Grows `champion` from the zero state and writes the phenotype and every
/// chemical map at each step in `iterations` into `out_dir`, plus a
/// `snapshots.txt` manifest. Steps past the point where growth stops
/// (convergence or the cap) are imaged from the final state and flagged in
/// the manifest.
pub fn snapshot_growth(
    champion: &Genome,
    variant: ModelVariant,
    width: usize,
    height: usize,
    gcfg: &GrowthConfig,
    iterations: &[usize],
    out_dir: &Path,
) -> Result<SnapshotSet, HarnessError> {
    let chemicals = match variant {
        ModelVariant::Developmental { chemicals, .. } => chemicals,
        ModelVariant::Regression => {
            return Err(HarnessError::Config("the regression variant has no growth to snapshot".into()))
        }
    };
    std::fs::create_dir_all(out_dir)?;
    let fresh = Organism::new(champion, width, height, chemicals)?;
    let reference = grow(fresh.clone(), gcfg);
    let last = reference.iterations_used;

    let mut order: Vec<usize> = iterations.to_vec();
    order.sort_unstable();
    order.dedup();

    let mut organism = fresh;
    let mut manifest = String::new();
    let _ = writeln!(manifest, "grid {width}x{height} variant {variant} chemicals {chemicals}");
    let status = if reference.converged { "converged" } else { "did not converge" };
    let _ = writeln!(manifest, "growth {status} after {last} steps");
    let mut snapshots = Vec::new();
    for requested in order {
        let taken = requested.min(last);
        while organism.iteration() < taken {
            organism.grid_step();
        }
        let mut files = Vec::with_capacity(chemicals + 1);
        for channel in 0..=chemicals {
            let image = if channel == 0 { organism.phenotype() } else { organism.chemical_map(channel)? };
            let path = out_dir.join(snapshot_file_name(requested, channel));
            image.save_pgm(&path, PgmFormat::Plain)?;
            files.push(path);
        }
        let note = if taken < requested { format!(" (growth stopped at {taken}; final state used)") } else { String::new() };
        let _ = writeln!(manifest, "step {requested}: {} files{note}", files.len());
        snapshots.push(Snapshot { requested, taken, files });
    }
    let manifest_path = out_dir.join("snapshots.txt");
    std::fs::write(&manifest_path, manifest)?;
    Ok(SnapshotSet { converged: reference.converged, growth_iterations: last, snapshots, manifest: manifest_path })
}
