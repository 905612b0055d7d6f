//! Multi-cellular developmental design with evolved neural controllers.
//!
//! A fixed grid of cells each runs a clone of one small sigmoid network.
//! Cells exchange "chemicals" with their four orthogonal neighbours, and
//! the whole organism is iterated until its energy (sum of squared neuron
//! activations) stops changing. The differentiation output of every cell,
//! read at that fixed point, is the phenotype: a grayscale image scored
//! against a target pattern. Controllers are evolved with NEAT.
//!
//! * [`neuro`]: controller networks and their update rules
//! * [`neat`]: genomes, variation, speciation, reproduction
//! * [`devo`]: organisms, growth until stabilization, perturbation
//! * [`flags`]: target images, graymap I/O, similarity, genome evaluation
//! * [`harness`]: seeded runs, batches, self-healing trials, snapshots, CSV
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod devo;
pub mod flags;
pub mod harness;
pub mod neat;
pub mod neuro;
