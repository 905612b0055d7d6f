//! Several independent runs of one configuration, summarized as a box plot
//! (five-number summary) and an averaged online curve. Writes the CSV
//! tables, champion genomes and the manifest.
//!
//! cargo run --release --example batch_statistics -- [config_file] [out_dir]

use morphogrid::harness::{run_batch_with, write_outputs, RunConfig};

const DEFAULT: &str = "
[run]
variant = regression
target = disc
grid = 16x16
runs = 5
seed = 100

[neat]
pop_size = 150
generations = 100
";

fn main() {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => RunConfig::load(path).expect("valid configuration file"),
        None => RunConfig::parse(DEFAULT).unwrap(),
    };
    let out = args.next().unwrap_or_else(|| "batch_out".into());

    let batch = run_batch_with(&cfg, |r| println!("run {} (seed {}): {:.6}", r.run_index, r.seed, r.best_fitness)).unwrap();
    let s = batch.summary();
    println!("min {:.5}  q1 {:.5}  median {:.5}  q3 {:.5}  max {:.5}", s.min, s.q1, s.median, s.q3, s.max);
    let curve = batch.mean_curve();
    for g in (0..curve.len()).step_by(10) {
        println!("generation {g:4}: mean best {:.5}", curve[g]);
    }
    write_outputs(&cfg, &batch, &out).unwrap();
    println!("tables and champions in {out}");
}
