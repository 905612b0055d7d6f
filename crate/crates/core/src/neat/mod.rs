//! NeuroEvolution of Augmenting Topologies.
//!
//! Genomes start from the minimal fully connected inputs→outputs layout and
//! grow by node splits and link additions. Historical markings (innovation
//! numbers) align genes for crossover and for the compatibility distance
//! that drives speciation with explicit fitness sharing.

mod config;
mod genome;
mod mutation;
mod population;
mod species;

pub use config::{ConfigError, NeatConfig};
pub use genome::{
    ConnGene, Genome, GenomeError, Innovation, InnovationRegistry, IoShape, NodeGene, NodeId,
    NodeRole,
};
pub use mutation::{
    compatibility_distance, crossover, enforce_io_connectivity, mutate_add_link, mutate_add_node,
    mutate_toggle, mutate_weights,
};
pub use population::{init_population, reproduce, Evolver};
pub use species::{allocate_offspring, Species, SpeciesSet};
