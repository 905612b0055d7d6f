//! Evolve a champion (or load one), then disturb its fixed point with unit
//! Gaussian noise and with a fully random state, and let it grow back.
//!
//! cargo run --release --example self_healing -- [champion.genome]

use morphogrid::flags::{ModelVariant, TargetKind};
use morphogrid::harness::{load_genome, run_evolution, self_healing_experiment, Disturbance, RunConfig};

fn main() {
    let cfg = RunConfig::desk("1-ffwd".parse().unwrap(), TargetKind::TwoBands);
    let champion = match std::env::args().nth(1) {
        Some(path) => load_genome(path).expect("readable genome file"),
        None => {
            println!("evolving a 1-ffwd champion on 2bands (16x16, 150 generations)...");
            let record = run_evolution(&cfg, 0).unwrap();
            println!("best fitness {:.6}", record.best_fitness);
            record.best_genome
        }
    };
    let variant = ModelVariant::of_genome(&champion).expect("genome arity matches a variant");

    for disturbance in [Disturbance::Gaussian { sigma: 1.0 }, Disturbance::Randomize] {
        let report =
            self_healing_experiment(&champion, variant, cfg.width, cfg.height, &cfg.growth, 20, disturbance, 7)
                .expect("champion stabilizes");
        println!(
            "{disturbance:?}: exact {:.0}%, close {:.0}%, diverged {:.0}%, regrowth {:.1} steps on average (original growth {})",
            100.0 * report.exact_fraction(),
            100.0 * report.close_fraction(),
            100.0 * report.diverged_fraction(),
            report.mean_recovery_iterations(),
            report.original_iterations
        );
    }
}
