use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("probability `{name}` = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("`{name}` must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("range `{name}` is empty: [{lo}, {hi}]")]
    EmptyRange { name: &'static str, lo: f64, hi: f64 },
}

/// Parameters of the NEAT optimizer.
///
/// Defaults reproduce the settings used for the flag experiments: population
/// 500 over 250000 evaluations, speciation coefficients 1.0 / 1.0 / 0.2.
#[derive(Clone, Debug, PartialEq)]
pub struct NeatConfig {
    pub pop_size: usize,
    pub max_evaluations: usize,
    /// Fraction of each species (best first) eligible as parents.
    pub reproduction_ratio: f64,
    pub elite_per_species: usize,
    pub p_crossover: f64,
    pub p_add_node: f64,
    pub p_add_link: f64,
    pub p_enable_link: f64,
    pub p_disable_link: f64,
    pub p_weight_gauss: f64,
    pub weight_gauss_sigma: f64,
    pub p_weight_uniform: f64,
    /// Excess gene coefficient.
    pub c1: f64,
    /// Disjoint gene coefficient.
    pub c2: f64,
    /// Mean weight difference coefficient.
    pub c3: f64,
    pub compat_threshold: f64,
    pub init_weight_range: (f64, f64),
    pub uniform_reset_range: (f64, f64),
    /// Species that have not improved for this many generations stop
    /// reproducing. `None` disables the rule.
    pub stagnation_generations: Option<usize>,
}

impl Default for NeatConfig {
    fn default() -> Self {
        NeatConfig {
            pop_size: 500,
            max_evaluations: 250_000,
            reproduction_ratio: 0.2,
            elite_per_species: 1,
            p_crossover: 0.15,
            p_add_node: 0.01,
            p_add_link: 0.01,
            p_enable_link: 0.045,
            p_disable_link: 0.045,
            p_weight_gauss: 0.8,
            weight_gauss_sigma: 0.1,
            p_weight_uniform: 0.01,
            c1: 1.0,
            c2: 1.0,
            c3: 0.2,
            compat_threshold: 3.0,
            init_weight_range: (-1.0, 1.0),
            uniform_reset_range: (-5.0, 5.0),
            stagnation_generations: None,
        }
    }
}

impl NeatConfig {
    /// Number of generations that fit in the evaluation budget (at least 1).
    pub fn generations(&self) -> usize {
        (self.max_evaluations / self.pop_size.max(1)).max(1)
    }

    pub fn with_generations(mut self, generations: usize) -> Self {
        self.max_evaluations = generations * self.pop_size;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size < 2 {
            return Err(ConfigError::PopulationTooSmall(self.pop_size));
        }
        let probabilities = [
            ("reproduction_ratio", self.reproduction_ratio),
            ("p_crossover", self.p_crossover),
            ("p_add_node", self.p_add_node),
            ("p_add_link", self.p_add_link),
            ("p_enable_link", self.p_enable_link),
            ("p_disable_link", self.p_disable_link),
            ("p_weight_gauss", self.p_weight_gauss),
            ("p_weight_uniform", self.p_weight_uniform),
        ];
        for (name, value) in probabilities {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        let non_negative = [
            ("weight_gauss_sigma", self.weight_gauss_sigma),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("compat_threshold", self.compat_threshold),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0) {
                return Err(ConfigError::Negative { name, value });
            }
        }
        for (name, (lo, hi)) in [
            ("init_weight_range", self.init_weight_range),
            ("uniform_reset_range", self.uniform_reset_range),
        ] {
            if !(lo < hi) {
                return Err(ConfigError::EmptyRange { name, lo, hi });
            }
        }
        Ok(())
    }
}
