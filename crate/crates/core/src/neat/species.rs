//! Speciation and explicit fitness sharing.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::config::NeatConfig;
use super::genome::Genome;
use super::mutation::compatibility_distance;

#[derive(Clone, Debug)]
pub struct Species {
    pub id: usize,
    /// Genome new individuals are compared against.
    pub representative: Genome,
    /// Indices into the current population.
    pub members: Vec<usize>,
    /// Best raw fitness ever seen in this species.
    pub best_fitness: f64,
    /// Generations since `best_fitness` last improved.
    pub stagnant_for: usize,
}

/// Species carried across generations.
#[derive(Clone, Debug, Default)]
pub struct SpeciesSet {
    species: Vec<Species>,
    next_id: usize,
}

impl SpeciesSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    /// Assigns each genome to the first species whose representative (taken
    /// from the previous generation) is within `compat_threshold`, founding
    /// new species as needed. Species left without members are dropped.
    pub fn speciate(&mut self, population: &[Genome], cfg: &NeatConfig) {
        for s in &mut self.species {
            s.members.clear();
        }
        for (index, genome) in population.iter().enumerate() {
            let home = self.species.iter().position(|s| {
                compatibility_distance(genome, &s.representative, cfg) < cfg.compat_threshold
            });
            match home {
                Some(k) => self.species[k].members.push(index),
                None => {
                    self.species.push(Species {
                        id: self.next_id,
                        representative: genome.clone(),
                        members: vec![index],
                        best_fitness: f64::NEG_INFINITY,
                        stagnant_for: 0,
                    });
                    self.next_id += 1;
                }
            }
        }
        self.species.retain(|s| !s.members.is_empty());
    }

    /// Updates per-species best fitness and stagnation counters.
    pub fn record_fitness(&mut self, fitnesses: &[f64]) {
        for s in &mut self.species {
            let best = s
                .members
                .iter()
                .map(|&i| fitnesses[i])
                .fold(f64::NEG_INFINITY, f64::max);
            if best > s.best_fitness {
                s.best_fitness = best;
                s.stagnant_for = 0;
            } else {
                s.stagnant_for += 1;
            }
        }
    }

    /// Picks each species' representative for the next generation uniformly
    /// among its current members.
    pub fn choose_representatives<R: Rng + ?Sized>(&mut self, population: &[Genome], rng: &mut R) {
        for s in &mut self.species {
            let &k = s.members.choose(rng).expect("species are never empty");
            s.representative = population[k].clone();
        }
    }
}

/// Offspring counts per species under explicit fitness sharing.
///
/// Species `s` gets `round(pop_size * A_s / A)` where `A_s` is the sum of
/// its members' fitness divided by its size. The species holding the best
/// individual absorbs the rounding residual and never receives zero. With
/// zero total fitness every species gets an equal share.
pub fn allocate_offspring(species: &[Species], fitnesses: &[f64], pop_size: usize) -> Vec<usize> {
    if species.is_empty() {
        return Vec::new();
    }
    let best_species = best_species_index(species, fitnesses);
    let adjusted: Vec<f64> = species
        .iter()
        .map(|s| s.members.iter().map(|&i| fitnesses[i]).sum::<f64>() / s.members.len() as f64)
        .collect();
    let total: f64 = adjusted.iter().sum();

    let mut counts: Vec<usize> = if total > 0.0 {
        adjusted
            .iter()
            .map(|a| (pop_size as f64 * a / total).round() as usize)
            .collect()
    } else {
        vec![pop_size / species.len(); species.len()]
    };
    counts[best_species] = counts[best_species].max(1);

    let mut assigned: usize = counts.iter().sum();
    if assigned < pop_size {
        counts[best_species] += pop_size - assigned;
    }
    // Over-allocation from rounding: trim the largest other shares first.
    while assigned > pop_size {
        let k = (0..counts.len())
            .filter(|&k| k != best_species || counts[k] > 1)
            .max_by_key(|&k| (counts[k], std::cmp::Reverse(k)))
            .expect("pop_size >= 1");
        counts[k] -= 1;
        assigned -= 1;
    }
    counts
}

fn best_species_index(species: &[Species], fitnesses: &[f64]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, s) in species.iter().enumerate() {
        for &i in &s.members {
            if fitnesses[i] > best.1 {
                best = (k, fitnesses[i]);
            }
        }
    }
    best.0
}
