//! Population initialization, reproduction, and the generation driver.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::config::NeatConfig;
use super::genome::{Genome, InnovationRegistry, IoShape};
use super::mutation::{
    crossover, enforce_io_connectivity, mutate_add_link, mutate_add_node, mutate_toggle,
    mutate_weights,
};
use super::species::{allocate_offspring, Species, SpeciesSet};
use crate::neuro::Topology;

/// `pop_size` minimal genomes sharing one innovation registry.
pub fn init_population<R: Rng + ?Sized>(
    cfg: &NeatConfig,
    io: IoShape,
    kind: Topology,
    rng: &mut R,
) -> (Vec<Genome>, InnovationRegistry) {
    assert!(io.n_inputs >= 1 && io.n_outputs >= 1, "need at least one input and one output");
    let mut registry = InnovationRegistry::new(io);
    let population = (0..cfg.pop_size)
        .map(|_| Genome::minimal(io, kind, &mut registry, cfg.init_weight_range, rng))
        .collect();
    (population, registry)
}

/// Builds the next population from the current one.
///
/// Each species with a nonzero allocation keeps its champion(s) unchanged;
/// the rest of its offspring come from parents drawn uniformly among the
/// best `ceil(reproduction_ratio * size)` members, by crossover with
/// probability `p_crossover` and cloning otherwise, followed by mutation.
pub fn reproduce<R: Rng + ?Sized>(
    population: &[Genome],
    fitnesses: &[f64],
    species: &[Species],
    counts: &[usize],
    cfg: &NeatConfig,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Vec<Genome> {
    let mut next = Vec::with_capacity(cfg.pop_size);
    for (s, &count) in species.iter().zip(counts) {
        if count == 0 {
            continue;
        }
        let mut ranked = s.members.clone();
        // Stable sort: ties keep population order.
        ranked.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]));

        let elites = cfg.elite_per_species.min(count).min(ranked.len());
        next.extend(ranked[..elites].iter().map(|&i| population[i].clone()));

        let pool_size = ((cfg.reproduction_ratio * ranked.len() as f64).ceil() as usize).clamp(1, ranked.len());
        let pool = &ranked[..pool_size];
        for _ in elites..count {
            let mut child = if rng.random::<f64>() < cfg.p_crossover {
                let &a = pool.choose(rng).unwrap();
                let &b = pool.choose(rng).unwrap();
                let (fitter, other) = if fitnesses[b] > fitnesses[a] { (b, a) } else { (a, b) };
                crossover(&population[fitter], &population[other], registry, cfg.init_weight_range, rng)
            } else {
                population[*pool.choose(rng).unwrap()].clone()
            };
            mutate_weights(&mut child, cfg, rng);
            if rng.random::<f64>() < cfg.p_add_node {
                mutate_add_node(&mut child, registry, rng);
            }
            if rng.random::<f64>() < cfg.p_add_link {
                mutate_add_link(&mut child, registry, cfg.init_weight_range, rng);
            }
            mutate_toggle(&mut child, cfg, rng);
            enforce_io_connectivity(&mut child, registry, cfg.init_weight_range, rng);
            next.push(child);
        }
    }
    next
}

/// Generation-by-generation NEAT state.
///
/// The caller evaluates [`Evolver::population`], then calls
/// [`Evolver::speciate`] and, unless the run is over,
/// [`Evolver::reproduce`].
#[derive(Clone, Debug)]
pub struct Evolver {
    cfg: NeatConfig,
    population: Vec<Genome>,
    species: SpeciesSet,
    registry: InnovationRegistry,
    generation: usize,
}

impl Evolver {
    pub fn new<R: Rng + ?Sized>(cfg: NeatConfig, io: IoShape, kind: Topology, rng: &mut R) -> Self {
        let (population, registry) = init_population(&cfg, io, kind, rng);
        Evolver {
            cfg,
            population,
            species: SpeciesSet::new(),
            registry,
            generation: 0,
        }
    }

    pub fn config(&self) -> &NeatConfig {
        &self.cfg
    }

    pub fn population(&self) -> &[Genome] {
        &self.population
    }

    pub fn species(&self) -> &[Species] {
        self.species.species()
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Clusters the current population and returns the species count.
    pub fn speciate<R: Rng + ?Sized>(&mut self, fitnesses: &[f64], rng: &mut R) -> usize {
        assert_eq!(fitnesses.len(), self.population.len());
        self.species.speciate(&self.population, &self.cfg);
        self.species.record_fitness(fitnesses);
        self.species.choose_representatives(&self.population, rng);
        self.species.len()
    }

    /// Replaces the population with the next generation. Must follow
    /// [`Evolver::speciate`] for the same fitnesses.
    pub fn reproduce<R: Rng + ?Sized>(&mut self, fitnesses: &[f64], rng: &mut R) {
        let all = self.species.species();
        let top = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_holder = all
            .iter()
            .position(|s| s.members.iter().any(|&i| fitnesses[i] == top))
            .unwrap_or(0);
        let active: Vec<Species> = match self.cfg.stagnation_generations {
            Some(limit) => all
                .iter()
                .enumerate()
                .filter(|(k, s)| *k == best_holder || s.stagnant_for < limit)
                .map(|(_, s)| s.clone())
                .collect(),
            None => all.to_vec(),
        };
        let counts = allocate_offspring(&active, fitnesses, self.cfg.pop_size);
        let next = reproduce(
            &self.population,
            fitnesses,
            &active,
            &counts,
            &self.cfg,
            &mut self.registry,
            rng,
        );
        debug_assert_eq!(next.len(), self.cfg.pop_size);
        self.population = next;
        self.generation += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quiet() -> NeatConfig {
        NeatConfig {
            pop_size: 12,
            p_crossover: 0.0,
            p_add_node: 0.0,
            p_add_link: 0.0,
            p_enable_link: 0.0,
            p_disable_link: 0.0,
            p_weight_gauss: 0.0,
            p_weight_uniform: 0.0,
            ..NeatConfig::default()
        }
    }

    #[test]
    fn init_population_shares_innovations() {
        let cfg = NeatConfig { pop_size: 5, ..NeatConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (pop, _) = init_population(&cfg, IoShape::new(8, 3), Topology::Recurrent, &mut rng);
        assert_eq!(pop.len(), 5);
        for g in &pop {
            assert_eq!(g.conns().len(), 27);
            assert!(g.satisfies_io_constraint());
            let a: Vec<_> = g.conns().iter().map(|c| (c.innovation, c.from, c.to)).collect();
            let b: Vec<_> = pop[0].conns().iter().map(|c| (c.innovation, c.from, c.to)).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn degenerate_configuration_clones_exactly() {
        let cfg = quiet();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut evo = Evolver::new(cfg, IoShape::new(2, 1), Topology::Feedforward, &mut rng);
        let before = evo.population().to_vec();
        let fitnesses: Vec<f64> = (0..12).map(|i| i as f64).collect();
        evo.speciate(&fitnesses, &mut rng);
        evo.reproduce(&fitnesses, &mut rng);
        assert_eq!(evo.population().len(), 12);
        for g in evo.population() {
            assert!(before.contains(g));
        }
    }

    #[test]
    fn single_member_species_keeps_champion() {
        let cfg = NeatConfig { pop_size: 6, ..NeatConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (pop, mut reg) = init_population(&cfg, IoShape::new(2, 1), Topology::Feedforward, &mut rng);
        let species = vec![Species {
            id: 0,
            representative: pop[3].clone(),
            members: vec![3],
            best_fitness: 1.0,
            stagnant_for: 0,
        }];
        let fit = vec![0.0; 6];
        let next = reproduce(&pop, &fit, &species, &[6], &cfg, &mut reg, &mut rng);
        assert_eq!(next.len(), 6);
        assert_eq!(next[0], pop[3]);
        for child in &next[1..] {
            // Mutated clones: same structure (no add-node/link at these rates
            // is likely but not guaranteed), always valid.
            assert!(child.check().is_ok());
            assert!(child.satisfies_io_constraint());
        }
    }

    #[test]
    fn population_size_is_constant_and_champion_survives() {
        let cfg = NeatConfig { pop_size: 30, p_add_node: 0.2, p_add_link: 0.2, ..NeatConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut evo = Evolver::new(cfg, IoShape::new(3, 2), Topology::Recurrent, &mut rng);
        for gen in 0..15 {
            // Arbitrary deterministic fitness: fewer edges is better.
            let fit: Vec<f64> = evo
                .population()
                .iter()
                .enumerate()
                .map(|(i, g)| 1.0 / (1.0 + g.enabled_edges() as f64) + i as f64 * 1e-6)
                .collect();
            let best = evo.population()[fit
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0]
                .clone();
            evo.speciate(&fit, &mut rng);
            evo.reproduce(&fit, &mut rng);
            assert_eq!(evo.population().len(), 30, "generation {gen}");
            assert!(evo.population().contains(&best));
            assert!(evo.population().iter().all(|g| g.satisfies_io_constraint() && g.check().is_ok()));
        }
    }

    #[test]
    fn stagnant_species_stop_reproducing() {
        let cfg = NeatConfig {
            pop_size: 20,
            compat_threshold: 0.05,
            stagnation_generations: Some(1),
            ..quiet()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut evo = Evolver::new(cfg, IoShape::new(2, 1), Topology::Feedforward, &mut rng);
        let fit: Vec<f64> = (0..20).map(|i| if i == 0 { 1.0 } else { 0.5 }).collect();
        evo.speciate(&fit, &mut rng);
        evo.speciate(&fit, &mut rng); // no improvement -> every species stagnant
        let previous = evo.population().to_vec();
        let parents: Vec<usize> = evo
            .species()
            .iter()
            .filter(|s| s.members.contains(&0) || s.stagnant_for < 1)
            .flat_map(|s| s.members.iter().copied())
            .collect();
        assert!(parents.len() < 20, "some species must be stagnant");
        evo.reproduce(&fit, &mut rng);
        // Quiet config: offspring are exact clones of non-stagnant species' members.
        for g in evo.population() {
            assert!(parents.iter().any(|&i| &previous[i] == g));
        }
    }
}
