//! Self-repair trials: disturb a grown organism and let it grow again.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::devo::{grow, GrowthConfig, Organism};
use crate::flags::{similarity, GrayImage, ModelVariant};
use crate::neat::Genome;

use super::HarnessError;

/// Similarity to the original phenotype above which a recovery counts as
/// close.
pub const CLOSE_SIMILARITY: f64 = 0.99;

/// How the grown state is disturbed before each regrowth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Disturbance {
    /// Add `N(0, sigma^2)` to every neuron activation.
    Gaussian { sigma: f64 },
    /// Replace every activation and chemical with a uniform `[0, 1)` draw.
    Randomize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recovery {
    /// Identical discrete phenotype.
    Exact,
    /// Similarity to the original phenotype at least [`CLOSE_SIMILARITY`].
    Close,
    Diverged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub recovery: Recovery,
    pub converged: bool,
    /// Regrowth steps taken.
    pub iterations: usize,
    /// Similarity of the regrown phenotype (or of the state reached at the
    /// cap) to the original phenotype.
    pub similarity: f64,
}

#[derive(Clone, Debug)]
pub struct HealingReport {
    pub disturbance: Disturbance,
    pub original: GrayImage,
    pub original_iterations: usize,
    pub trials: Vec<Trial>,
}

impl HealingReport {
    fn fraction(&self, r: Recovery) -> f64 {
        if self.trials.is_empty() {
            return 0.0;
        }
        self.trials.iter().filter(|t| t.recovery == r).count() as f64 / self.trials.len() as f64
    }

    pub fn exact_fraction(&self) -> f64 {
        self.fraction(Recovery::Exact)
    }

    pub fn close_fraction(&self) -> f64 {
        self.fraction(Recovery::Close)
    }

    pub fn diverged_fraction(&self) -> f64 {
        self.fraction(Recovery::Diverged)
    }

    pub fn mean_recovery_iterations(&self) -> f64 {
        let n = self.trials.len().max(1) as f64;
        self.trials.iter().map(|t| t.iterations as f64).sum::<f64>() / n
    }
}

/// Grows `champion` to its fixed point on a `width x height` grid, then
/// runs `trials` independent disturb-and-regrow trials from that state.
/// Trial `k` draws from ChaCha stream `k` of `seed`.
pub fn self_healing_experiment(
    champion: &Genome,
    variant: ModelVariant,
    width: usize,
    height: usize,
    gcfg: &GrowthConfig,
    trials: usize,
    disturbance: Disturbance,
    seed: u64,
) -> Result<HealingReport, HarnessError> {
    let chemicals = match variant {
        ModelVariant::Developmental { chemicals, .. } => chemicals,
        ModelVariant::Regression => {
            return Err(HarnessError::Config("the regression variant has no growth dynamics to disturb".into()))
        }
    };
    if let Disturbance::Gaussian { sigma } = disturbance {
        if !(sigma >= 0.0) {
            return Err(HarnessError::Config(format!("sigma must be non-negative, got {sigma}")));
        }
    }
    let grown = grow(Organism::new(champion, width, height, chemicals)?, gcfg);
    let original = grown.phenotype.ok_or(HarnessError::NotConverged(gcfg.max_iterations))?;
    let fixed_point = grown.final_state;

    let trials = (0..trials)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut organism = fixed_point.clone();
            match disturbance {
                Disturbance::Gaussian { sigma } => organism.perturb(sigma, &mut rng),
                Disturbance::Randomize => organism.randomize_state(&mut rng),
            }
            let regrown = grow(organism, gcfg);
            let image = regrown.phenotype.clone().unwrap_or_else(|| regrown.final_state.phenotype());
            let sim = similarity(&image, &original).expect("same grid");
            let recovery = match (regrown.converged, image == original) {
                (true, true) => Recovery::Exact,
                (true, false) if sim >= CLOSE_SIMILARITY => Recovery::Close,
                _ => Recovery::Diverged,
            };
            Trial { recovery, converged: regrown.converged, iterations: regrown.iterations_used, similarity: sim }
        })
        .collect();
    Ok(HealingReport { disturbance, original, original_iterations: grown.iterations_used, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neat::{ConnGene, IoShape};
    use crate::neuro::Topology;

    fn zero_genome() -> Genome {
        let io = IoShape::new(4, 2);
        let conns = (0..10)
            .map(|k| ConnGene { innovation: k, from: (k / 2) as u32, to: io.output_id(k as usize % 2), weight: 0.0, enabled: true })
            .collect();
        Genome::from_genes(io, Topology::Feedforward, &[], conns).unwrap()
    }

    #[test]
    fn no_noise_recovers_at_once() {
        let v = ModelVariant::ALL[0];
        let gcfg = GrowthConfig::default();
        let r = self_healing_experiment(&zero_genome(), v, 5, 5, &gcfg, 6, Disturbance::Gaussian { sigma: 0.0 }, 3).unwrap();
        assert_eq!(r.exact_fraction(), 1.0);
        assert!(r.trials.iter().all(|t| t.iterations <= gcfg.stability_window));
    }

    #[test]
    fn constant_controller_always_heals() {
        // Outputs ignore all inputs, so any disturbance is forgotten in one step.
        let v = ModelVariant::ALL[0];
        let gcfg = GrowthConfig::default();
        for d in [Disturbance::Gaussian { sigma: 1.0 }, Disturbance::Randomize] {
            let r = self_healing_experiment(&zero_genome(), v, 4, 4, &gcfg, 5, d, 8).unwrap();
            assert_eq!(r.exact_fraction(), 1.0);
            assert_eq!(r.close_fraction() + r.diverged_fraction(), 0.0);
            assert_eq!(r.original, GrayImage::filled(4, 4, 128).unwrap());
        }
    }

    #[test]
    fn refuses_regression_and_non_convergent() {
        let gcfg = GrowthConfig::default();
        let g = zero_genome();
        let d = Disturbance::Gaussian { sigma: 1.0 };
        assert!(self_healing_experiment(&g, ModelVariant::Regression, 4, 4, &gcfg, 1, d, 0).is_err());

        let io = IoShape::new(4, 2);
        let mut conns = g.conns().to_vec();
        conns[8].weight = 10.0; // bias -> output 0
        conns.push(ConnGene { innovation: 20, from: io.output_id(0), to: io.output_id(0), weight: -20.0, enabled: true });
        let osc = Genome::from_genes(io, Topology::Recurrent, &[], conns).unwrap();
        let err = self_healing_experiment(&osc, ModelVariant::ALL[1], 4, 4, &gcfg, 1, d, 0);
        assert!(matches!(err, Err(HarnessError::NotConverged(_))));
    }
}
