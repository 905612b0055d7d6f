//! Sanity check of the NEAT engine on XOR: 20 seeds, population 150, at
//! most 100 generations each. A run succeeds as soon as any network in its
//! population puts all four cases on the correct side of 0.5.
//!
//! Structural mutation rates are the customary XOR ones (add node 0.03, add
//! link 0.05); every other parameter keeps its default.
//!
//! cargo run --release --example xor_validation

use std::time::Instant;

use morphogrid::harness::run_neat;
use morphogrid::neat::{Genome, IoShape, NeatConfig};
use morphogrid::neuro::Topology;

const CASES: [([f64; 2], f64); 4] = [([0.0, 0.0], 0.0), ([0.0, 1.0], 1.0), ([1.0, 0.0], 1.0), ([1.0, 1.0], 0.0)];

fn outputs(genome: &Genome) -> [f64; 4] {
    let wiring = genome.compile().expect("feedforward genome compiles");
    let mut state = vec![0.0; wiring.num_neurons()];
    CASES.map(|([a, b], _)| {
        wiring.forward_in_place(&mut state, &[a, b, 1.0]);
        state[wiring.output_ids()[0]]
    })
}

/// `4 - sum of squared errors`.
fn fitness(genome: &Genome) -> f64 {
    let out = outputs(genome);
    4.0 - out.iter().zip(CASES).map(|(o, (_, t))| (o - t).powi(2)).sum::<f64>()
}

fn solves(genome: &Genome) -> bool {
    outputs(genome).iter().zip(CASES).all(|(o, (_, t))| (*o > 0.5) == (t > 0.5))
}

fn main() {
    let neat = NeatConfig { pop_size: 150, p_add_node: 0.03, p_add_link: 0.05, ..NeatConfig::default() }
        .with_generations(100);
    let start = Instant::now();
    let mut solved = 0;
    for seed in 0..20 {
        let run = run_neat(&neat, IoShape::new(2, 1), Topology::Feedforward, seed, fitness, |g, _| solves(g));
        match run.solved_at {
            Some(generation) => {
                solved += 1;
                let out = outputs(&run.champion).map(|o| format!("{o:.3}"));
                println!(
                    "seed {seed:2}: generation {generation:3}, {} hidden, {} links, outputs {}",
                    run.champion.hidden_count(),
                    run.champion.enabled_edges(),
                    out.join(" ")
                );
            }
            None => println!("seed {seed:2}: unsolved, best fitness {:.3}", run.champion_fitness),
        }
    }
    println!("{solved}/20 runs solved XOR in {:.1}s", start.elapsed().as_secs_f64());
}
