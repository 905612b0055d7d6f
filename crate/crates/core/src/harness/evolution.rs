//! Seeded evolutionary runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::devo::{grow, Organism};
use crate::flags::{evaluate, make_target, ModelVariant, TargetKind};
use crate::neat::{Evolver, Genome, IoShape, NeatConfig};
use crate::neuro::Topology;

use super::{HarnessError, RunConfig};

/// Random stream families. Every phase of every generation draws from its
/// own ChaCha stream, so how fitness is computed cannot shift the
/// randomness used for variation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Init,
    Speciate,
    Reproduce,
}

/// Generator for `phase` of `generation` in a run seeded with `seed`.
pub fn phase_rng(seed: u64, generation: usize, phase: Phase) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = match phase {
        Phase::Init => 0,
        Phase::Speciate => 1 + 2 * generation as u64,
        Phase::Reproduce => 2 + 2 * generation as u64,
    };
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best fitness found so far in the run.
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub species_count: usize,
    pub mean_genome_edges: f64,
    /// Fitness computations so far, elites included.
    pub evaluations: usize,
}

/// Outcome of [`run_neat`].
#[derive(Clone, Debug)]
pub struct NeatRun {
    pub champion: Genome,
    pub champion_fitness: f64,
    pub generations: Vec<GenerationStats>,
    /// First generation holding a genome that satisfied the stop predicate.
    pub solved_at: Option<usize>,
}

/// Runs NEAT for `neat.generations()` generations or until `stop` accepts
/// some genome of a generation, which then becomes the returned champion.
/// Fitness is computed in parallel and collected by genome index.
pub fn run_neat<F, S>(neat: &NeatConfig, io: IoShape, kind: Topology, seed: u64, fitness: F, stop: S) -> NeatRun
where
    F: Fn(&Genome) -> f64 + Sync,
    S: Fn(&Genome, f64) -> bool,
{
    let mut evolver = Evolver::new(neat.clone(), io, kind, &mut phase_rng(seed, 0, Phase::Init));
    let mut champion: Option<(Genome, f64)> = None;
    let mut generations = Vec::new();
    let mut evaluations = 0;
    let mut solved_at = None;
    let total = neat.generations();
    for generation in 0..total {
        let population = evolver.population();
        let fitnesses: Vec<f64> = population.par_iter().map(&fitness).collect();
        evaluations += fitnesses.len();

        let (best_idx, &best) = fitnesses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("population is non-empty");
        let edges: usize = population.iter().map(Genome::enabled_edges).sum();
        let mean_genome_edges = edges as f64 / population.len() as f64;
        let solver = population.iter().zip(&fitnesses).position(|(g, &f)| stop(g, f));
        if let Some(i) = solver {
            champion = Some((population[i].clone(), fitnesses[i]));
        } else if champion.as_ref().is_none_or(|(_, f)| best > *f) {
            champion = Some((population[best_idx].clone(), best));
        }
        let best_so_far = generations.last().map_or(best, |g: &GenerationStats| g.best_fitness.max(best));
        let species_count = evolver.speciate(&fitnesses, &mut phase_rng(seed, generation, Phase::Speciate));
        generations.push(GenerationStats {
            generation,
            best_fitness: best_so_far,
            mean_fitness: fitnesses.iter().sum::<f64>() / fitnesses.len() as f64,
            species_count,
            mean_genome_edges,
            evaluations,
        });
        if solver.is_some() {
            solved_at = Some(generation);
            break;
        }
        if generation + 1 < total {
            evolver.reproduce(&fitnesses, &mut phase_rng(seed, generation, Phase::Reproduce));
        }
    }
    let (champion, champion_fitness) = champion.expect("at least one generation");
    NeatRun { champion, champion_fitness, generations, solved_at }
}

/// Everything recorded about one run of a flag experiment.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    pub variant: ModelVariant,
    pub target: TargetKind,
    pub best_genome: Genome,
    pub best_fitness: f64,
    pub generations: Vec<GenerationStats>,
    /// Growth steps the champion needs to stabilize (1 for regression).
    pub iterations_of_best: usize,
}

impl RunRecord {
    /// Best-so-far fitness per generation.
    pub fn online_curve(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.best_fitness).collect()
    }

    pub fn mean_genome_edges(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.mean_genome_edges).collect()
    }
}

/// Run `run_index` of the experiment described by `cfg`, seeded with
/// `cfg.seed + run_index`.
pub fn run_evolution(cfg: &RunConfig, run_index: usize) -> Result<RunRecord, HarnessError> {
    cfg.validate()?;
    let target = make_target(cfg.target, cfg.width, cfg.height)?;
    let variant = cfg.variant;
    let seed = cfg.seed.wrapping_add(run_index as u64);
    let fitness = |g: &Genome| evaluate(g, variant, &target, &cfg.growth).expect("population arity matches variant");
    let run = run_neat(&cfg.neat, variant.io_shape(), variant.topology(), seed, fitness, |_, _| false);
    let iterations_of_best = match variant {
        ModelVariant::Regression => 1,
        ModelVariant::Developmental { chemicals, .. } => {
            let organism = Organism::new(&run.champion, cfg.width, cfg.height, chemicals)?;
            grow(organism, &cfg.growth).iterations_used
        }
    };
    Ok(RunRecord {
        run_index,
        seed,
        variant,
        target: cfg.target,
        best_genome: run.champion,
        best_fitness: run.champion_fitness,
        generations: run.generations,
        iterations_of_best,
    })
}
