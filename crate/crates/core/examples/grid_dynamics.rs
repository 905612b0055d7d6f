//! Step an organism by hand: a random recurrent two-chemical controller on
//! an 8x8 grid, printing the energy after each step and the halting
//! decision of `grow`.
//!
//! cargo run --example grid_dynamics -- [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use morphogrid::devo::{grow, GrowthConfig, Organism};
use morphogrid::neat::{mutate_add_node, Genome, InnovationRegistry, IoShape};
use morphogrid::neuro::Topology;

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let io = IoShape::new(8, 3);
    let mut registry = InnovationRegistry::new(io);
    let mut genome = Genome::minimal(io, Topology::Recurrent, &mut registry, (-1.0, 1.0), &mut rng);
    for _ in 0..3 {
        mutate_add_node(&mut genome, &mut registry, &mut rng);
    }
    println!("{genome}");

    let mut organism = Organism::new(&genome, 8, 8, 2).unwrap();
    println!("{} cells x {} neurons", 64, organism.neurons_per_cell());
    for _ in 0..12 {
        organism.grid_step();
        println!("t = {:2}  E = {:.12}", organism.iteration(), organism.energy());
    }

    let result = grow(Organism::new(&genome, 8, 8, 2).unwrap(), &GrowthConfig::default());
    match result.phenotype {
        Some(p) => println!(
            "stabilized after {} steps; phenotype uses {} gray levels",
            result.iterations_used,
            p.distinct_levels()
        ),
        None => println!("no fixed point within {} steps: fitness would be 0", result.iterations_used),
    }
}
