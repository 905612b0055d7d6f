//! Experiment description and its `key = value` text form.
//!
//! ```text
//! # desk-scale two bands
//! [run]
//! variant = 1-ffwd
//! target = 2bands
//! grid = 16x16
//! runs = 5
//! seed = 1
//!
//! [neat]
//! pop_size = 150
//! generations = 150
//!
//! [growth]
//! stability_window = 8
//! ```
//!
//! Unknown sections or keys are errors. Missing keys keep their defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::devo::GrowthConfig;
use crate::flags::{ModelVariant, TargetKind};
use crate::neat::NeatConfig;
use crate::neuro::Topology;

use super::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub variant: ModelVariant,
    pub target: TargetKind,
    pub width: usize,
    pub height: usize,
    pub neat: NeatConfig,
    pub growth: GrowthConfig,
    pub runs: usize,
    /// Run `r` is seeded with `seed + r`.
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            variant: ModelVariant::Developmental { chemicals: 1, topology: Topology::Feedforward },
            target: TargetKind::TwoBands,
            width: 32,
            height: 32,
            neat: NeatConfig::default(),
            growth: GrowthConfig::default(),
            runs: 16,
            seed: 0,
            out_dir: None,
        }
    }
}

impl RunConfig {
    /// Minutes-scale setting: 16x16 grid, population 150, 150 generations,
    /// five runs.
    pub fn desk(variant: ModelVariant, target: TargetKind) -> Self {
        let neat = NeatConfig { pop_size: 150, ..NeatConfig::default() }.with_generations(150);
        RunConfig { variant, target, width: 16, height: 16, neat, runs: 5, ..RunConfig::default() }
    }

    /// Full-size setting: 32x32 grid, population 500, 250000 evaluations,
    /// sixteen runs. Expect hours per run.
    pub fn full(variant: ModelVariant, target: TargetKind) -> Self {
        RunConfig { variant, target, ..RunConfig::default() }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.width < 2 || self.height < 2 {
            return Err(HarnessError::Config(format!("grid {}x{} is smaller than 2x2", self.width, self.height)));
        }
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        self.neat.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.growth.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses the sectioned text form on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = RunConfig::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` of `text` to `self`.
    pub fn apply(&mut self, text: &str) -> Result<(), HarnessError> {
        let mut section = String::new();
        // A `generations` key resolves against the final population size.
        let mut generations = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| HarnessError::Config(format!("line {}: {msg}", n + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(section.as_str(), "run" | "neat" | "growth") {
                    return Err(at(format!("unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if section == "neat" && key == "generations" {
                generations = Some(num::<usize>(value).map_err(at)?);
                continue;
            }
            self.set(&section, key, value).map_err(at)?;
        }
        if let Some(g) = generations {
            self.neat.max_evaluations = g * self.neat.pop_size;
        }
        Ok(())
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        let neat = &mut self.neat;
        let growth = &mut self.growth;
        match (section, key) {
            ("run", "variant") => self.variant = value.parse()?,
            ("run", "target") => self.target = value.parse()?,
            ("run", "grid") => (self.width, self.height) = parse_grid(value)?,
            ("run", "runs") => self.runs = num(value)?,
            ("run", "seed") => self.seed = num(value)?,
            ("run", "out") => self.out_dir = Some(PathBuf::from(value)),
            ("neat", "pop_size") => neat.pop_size = num(value)?,
            ("neat", "max_evaluations") => neat.max_evaluations = num(value)?,
            ("neat", "reproduction_ratio") => neat.reproduction_ratio = num(value)?,
            ("neat", "elite_per_species") => neat.elite_per_species = num(value)?,
            ("neat", "p_crossover") => neat.p_crossover = num(value)?,
            ("neat", "p_add_node") => neat.p_add_node = num(value)?,
            ("neat", "p_add_link") => neat.p_add_link = num(value)?,
            ("neat", "p_enable_link") => neat.p_enable_link = num(value)?,
            ("neat", "p_disable_link") => neat.p_disable_link = num(value)?,
            ("neat", "p_weight_gauss") => neat.p_weight_gauss = num(value)?,
            ("neat", "weight_gauss_sigma") => neat.weight_gauss_sigma = num(value)?,
            ("neat", "p_weight_uniform") => neat.p_weight_uniform = num(value)?,
            ("neat", "c1") => neat.c1 = num(value)?,
            ("neat", "c2") => neat.c2 = num(value)?,
            ("neat", "c3") => neat.c3 = num(value)?,
            ("neat", "compat_threshold") => neat.compat_threshold = num(value)?,
            ("neat", "init_weight_range") => neat.init_weight_range = parse_range(value)?,
            ("neat", "uniform_reset_range") => neat.uniform_reset_range = parse_range(value)?,
            ("neat", "stagnation_generations") => {
                neat.stagnation_generations = match value {
                    "none" | "off" => None,
                    v => Some(num(v)?),
                }
            }
            ("growth", "max_iterations") => growth.max_iterations = num(value)?,
            ("growth", "stability_window") => growth.stability_window = num(value)?,
            ("growth", "energy_epsilon") => growth.energy_epsilon = num(value)?,
            ("", _) => return Err(format!("key `{key}` outside any section")),
            _ => return Err(format!("unknown key `{key}` in [{section}]")),
        }
        Ok(())
    }

    /// Canonical text form; [`RunConfig::parse`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let n = &self.neat;
        let g = &self.growth;
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "variant = {}", self.variant);
        let _ = writeln!(s, "target = {}", self.target);
        let _ = writeln!(s, "grid = {}x{}", self.width, self.height);
        let _ = writeln!(s, "runs = {}", self.runs);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(out) = &self.out_dir {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "\n[neat]");
        let fields: [(&str, String); 17] = [
            ("pop_size", n.pop_size.to_string()),
            ("max_evaluations", n.max_evaluations.to_string()),
            ("reproduction_ratio", format!("{:?}", n.reproduction_ratio)),
            ("elite_per_species", n.elite_per_species.to_string()),
            ("p_crossover", format!("{:?}", n.p_crossover)),
            ("p_add_node", format!("{:?}", n.p_add_node)),
            ("p_add_link", format!("{:?}", n.p_add_link)),
            ("p_enable_link", format!("{:?}", n.p_enable_link)),
            ("p_disable_link", format!("{:?}", n.p_disable_link)),
            ("p_weight_gauss", format!("{:?}", n.p_weight_gauss)),
            ("weight_gauss_sigma", format!("{:?}", n.weight_gauss_sigma)),
            ("p_weight_uniform", format!("{:?}", n.p_weight_uniform)),
            ("c1", format!("{:?}", n.c1)),
            ("c2", format!("{:?}", n.c2)),
            ("c3", format!("{:?}", n.c3)),
            ("compat_threshold", format!("{:?}", n.compat_threshold)),
            (
                "stagnation_generations",
                n.stagnation_generations.map_or("none".into(), |v| v.to_string()),
            ),
        ];
        for (k, v) in fields {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "init_weight_range = {:?},{:?}", n.init_weight_range.0, n.init_weight_range.1);
        let _ = writeln!(s, "uniform_reset_range = {:?},{:?}", n.uniform_reset_range.0, n.uniform_reset_range.1);
        let _ = writeln!(s, "\n[growth]");
        let _ = writeln!(s, "max_iterations = {}", g.max_iterations);
        let _ = writeln!(s, "stability_window = {}", g.stability_window);
        let _ = writeln!(s, "energy_epsilon = {:?}", g.energy_epsilon);
        s
    }
}

fn num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

/// `WxH`, e.g. `16x16`.
pub fn parse_grid(value: &str) -> Result<(usize, usize), String> {
    let (w, h) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid `{value}` is not WxH"))?;
    Ok((num(w.trim())?, num(h.trim())?))
}

fn parse_range(value: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = value.split_once(',').ok_or_else(|| format!("range `{value}` is not lo,hi"))?;
    Ok((num(lo.trim())?, num(hi.trim())?))
}
