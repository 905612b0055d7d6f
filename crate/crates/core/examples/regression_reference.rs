//! The non-developmental reference: each cell maps its own (x, y) to a gray
//! level. Evolves it on every target at desk scale and prints the final
//! fitness next to the target.
//!
//! cargo run --release --example regression_reference -- [generations]

use morphogrid::flags::{make_target, regression_image, ModelVariant, TargetKind};
use morphogrid::harness::{run_evolution, RunConfig};

fn main() {
    let generations: usize = std::env::args().nth(1).map_or(150, |s| s.parse().expect("generations"));
    for target in TargetKind::ALL {
        let mut cfg = RunConfig::desk(ModelVariant::Regression, target);
        cfg.neat = cfg.neat.with_generations(generations);
        let record = run_evolution(&cfg, 0).unwrap();
        println!(
            "{:10} best {:.6}  hidden nodes {}  links {}",
            target.name(),
            record.best_fitness,
            record.best_genome.hidden_count(),
            record.best_genome.enabled_edges()
        );
        let painted = regression_image(&record.best_genome, cfg.width, cfg.height).unwrap();
        let wanted = make_target(target, cfg.width, cfg.height).unwrap();
        for row in 0..cfg.height {
            let line = |img: &morphogrid::flags::GrayImage| -> String {
                (0..img.width()).map(|c| shade(img.get(row, c))).collect()
            };
            println!("  {}   {}", line(&painted), line(&wanted));
        }
    }
}

fn shade(level: u8) -> char {
    match level {
        0..=63 => ' ',
        64..=127 => '.',
        128..=191 => '+',
        _ => '#',
    }
}
