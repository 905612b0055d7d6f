//! Evolve a two-chemical recurrent organism on the three-bands flag and dump
//! its phenotype and chemical fields at several growth steps.
//!
//! cargo run --release --example growth_snapshots -- [out_dir] [generations]

use std::path::PathBuf;

use morphogrid::flags::TargetKind;
use morphogrid::harness::{run_evolution, save_genome, snapshot_growth, RunConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "snapshots".into()));
    let generations: usize = args.next().map_or(60, |s| s.parse().expect("generations"));

    let mut cfg = RunConfig::desk("2-recurr".parse().unwrap(), TargetKind::ThreeBands);
    cfg.neat = cfg.neat.with_generations(generations);
    let record = run_evolution(&cfg, 0).unwrap();
    println!("best fitness {:.6}, stabilizes in {} steps", record.best_fitness, record.iterations_of_best);

    std::fs::create_dir_all(&out).unwrap();
    save_genome(&record.best_genome, out.join("champion.genome")).unwrap();
    let steps = [0, 1, 2, 4, 8, 16, 32, record.iterations_of_best];
    let set = snapshot_growth(&record.best_genome, cfg.variant, cfg.width, cfg.height, &cfg.growth, &steps, &out).unwrap();
    for s in &set.snapshots {
        println!("step {:4}: {}", s.requested, s.files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>().join(", "));
    }
    println!("manifest: {}", set.manifest.display());
}
