//! Evolve a one-chemical feedforward organism to draw the two-bands flag on
//! a 16x16 grid, then print the champion's phenotype.
//!
//! cargo run --release --example evolve_two_bands -- [seed] [generations]

use std::time::Instant;

use morphogrid::devo::{grow, Organism};
use morphogrid::flags::{ModelVariant, TargetKind};
use morphogrid::harness::{run_evolution, RunConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let generations: usize = args.next().map_or(150, |s| s.parse().expect("generations"));

    let variant: ModelVariant = "1-ffwd".parse().unwrap();
    let mut cfg = RunConfig::desk(variant, TargetKind::TwoBands);
    cfg.seed = seed;
    cfg.neat = cfg.neat.with_generations(generations);

    let start = Instant::now();
    let record = run_evolution(&cfg, 0).expect("valid configuration");
    for g in record.generations.iter().step_by(10) {
        println!(
            "gen {:4}  best {:.5}  mean {:.4}  species {:3}  edges {:.1}",
            g.generation, g.best_fitness, g.mean_fitness, g.species_count, g.mean_genome_edges
        );
    }
    println!(
        "best fitness {:.6} after {} generations ({:.1}s); champion stabilizes in {} steps",
        record.best_fitness,
        record.generations.len(),
        start.elapsed().as_secs_f64(),
        record.iterations_of_best
    );

    let organism = Organism::new(&record.best_genome, cfg.width, cfg.height, 1).unwrap();
    let phenotype = grow(organism, &cfg.growth).phenotype.expect("champion converges");
    for row in 0..phenotype.height() {
        let line: String = (0..phenotype.width())
            .map(|c| match phenotype.get(row, c) {
                0..=63 => ' ',
                64..=127 => '.',
                128..=191 => '+',
                _ => '#',
            })
            .collect();
        println!("|{line}|");
    }
}
