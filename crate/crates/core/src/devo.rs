//! Grid organisms and their growth dynamics.
//!
//! Every cell of a `width x height` grid runs the same compiled controller
//! with its own activations. A cell's inputs are the chemical outputs its
//! four neighbours produced at the previous step, in the fixed slot order
//! North, East, South, West (chemicals `1..=M` within each direction),
//! followed by the constant bias slot. Neighbours outside the grid
//! contribute 0. Output neuron 0 is the cell's differentiation value
//! (its gray level); outputs `1..=M` are the chemicals it broadcasts.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::flags::{discretize, GrayImage};
use crate::neat::Genome;
use crate::neuro::{NetworkError, Wiring};

#[derive(Debug, Error, PartialEq)]
pub enum DevoError {
    #[error("controller has {inputs} inputs and {outputs} outputs; {chemicals} chemicals need {} inputs and {} outputs", 4 * chemicals, chemicals + 1)]
    Arity {
        inputs: usize,
        outputs: usize,
        chemicals: usize,
    },
    #[error("grid must be at least 1x1, got {0}x{1}")]
    EmptyGrid(usize, usize),
    #[error("chemical index {index} out of range 1..={chemicals}")]
    ChemicalOutOfRange { index: usize, chemicals: usize },
    #[error("invalid growth configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Neighbour offsets in input-slot order: North, East, South, West.
const DIRECTIONS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

#[derive(Clone, Debug, PartialEq)]
pub struct Organism {
    width: usize,
    height: usize,
    chemicals: usize,
    wiring: Arc<Wiring>,
    /// `cells x neurons`, cell index `row * width + col`.
    activations: Vec<f64>,
    /// `cells x chemicals`: what each cell broadcast at the last step.
    chem: Vec<f64>,
    next_chem: Vec<f64>,
    inputs: Vec<f64>,
    scratch: Vec<f64>,
    iteration: usize,
}

impl Organism {
    /// Fresh organism (all activations and chemicals 0) from a genome whose
    /// arity is `4 * chemicals` inputs and `chemicals + 1` outputs.
    pub fn new(genome: &Genome, width: usize, height: usize, chemicals: usize) -> Result<Self, DevoError> {
        let io = genome.io();
        if io.n_inputs != 4 * chemicals || io.n_outputs != chemicals + 1 {
            return Err(DevoError::Arity {
                inputs: io.n_inputs,
                outputs: io.n_outputs,
                chemicals,
            });
        }
        Self::from_wiring(Arc::new(genome.compile()?), width, height, chemicals)
    }

    /// Fresh organism from an already compiled controller. The wiring must
    /// have `4 * chemicals + 1` input slots (the last one is the bias) and
    /// `chemicals + 1` outputs.
    pub fn from_wiring(wiring: Arc<Wiring>, width: usize, height: usize, chemicals: usize) -> Result<Self, DevoError> {
        if width == 0 || height == 0 {
            return Err(DevoError::EmptyGrid(width, height));
        }
        if wiring.num_inputs() != 4 * chemicals + 1 || wiring.output_ids().len() != chemicals + 1 {
            return Err(DevoError::Arity {
                inputs: wiring.num_inputs().saturating_sub(1),
                outputs: wiring.output_ids().len(),
                chemicals,
            });
        }
        let cells = width * height;
        let n = wiring.num_neurons();
        Ok(Organism {
            width,
            height,
            chemicals,
            activations: vec![0.0; cells * n],
            chem: vec![0.0; cells * chemicals],
            next_chem: vec![0.0; cells * chemicals],
            inputs: vec![0.0; 4 * chemicals + 1],
            scratch: vec![0.0; n],
            iteration: 0,
            wiring,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn chemicals(&self) -> usize {
        self.chemicals
    }

    pub fn wiring(&self) -> &Wiring {
        &self.wiring
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn neurons_per_cell(&self) -> usize {
        self.wiring.num_neurons()
    }

    /// All activations, cell-major.
    pub fn activations(&self) -> &[f64] {
        &self.activations
    }

    pub fn cell(&self, row: usize, col: usize) -> &[f64] {
        let n = self.neurons_per_cell();
        let idx = row * self.width + col;
        &self.activations[idx * n..(idx + 1) * n]
    }

    /// Chemical buffer, cell-major.
    pub fn chem_buffer(&self) -> &[f64] {
        &self.chem
    }

    /// Overwrites the state of every cell and refreshes the chemical buffer
    /// from the new output values.
    pub fn set_activations(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.activations.len(), "activation length mismatch");
        self.activations.copy_from_slice(values);
        self.refresh_chem();
    }

    fn refresh_chem(&mut self) {
        let n = self.neurons_per_cell();
        let m = self.chemicals;
        for idx in 0..self.width * self.height {
            for k in 0..m {
                self.chem[idx * m + k] = self.activations[idx * n + self.wiring.output_ids()[k + 1]];
            }
        }
    }

    /// Zeroes all activations and chemicals and rewinds the step counter.
    pub fn reset(&mut self) {
        self.activations.fill(0.0);
        self.chem.fill(0.0);
        self.iteration = 0;
    }

    /// One synchronous update of every cell. All cells read the chemical
    /// buffer produced at the previous step.
    pub fn grid_step(&mut self) {
        let (w, h, m) = (self.width, self.height, self.chemicals);
        let n = self.wiring.num_neurons();
        let outputs = self.wiring.output_ids();
        let bias = 4 * m;
        self.inputs[bias] = 1.0;
        for row in 0..h {
            for col in 0..w {
                for (d, &(dr, dc)) in DIRECTIONS.iter().enumerate() {
                    let r = row as isize + dr;
                    let c = col as isize + dc;
                    let slots = &mut self.inputs[d * m..(d + 1) * m];
                    if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
                        slots.fill(0.0);
                    } else {
                        let j = r as usize * w + c as usize;
                        slots.copy_from_slice(&self.chem[j * m..(j + 1) * m]);
                    }
                }
                let idx = row * w + col;
                let state = &mut self.activations[idx * n..(idx + 1) * n];
                self.wiring.advance(state, &self.inputs, &mut self.scratch);
                for k in 0..m {
                    self.next_chem[idx * m + k] = state[outputs[k + 1]];
                }
            }
        }
        std::mem::swap(&mut self.chem, &mut self.next_chem);
        self.iteration += 1;
    }

    /// Sum of squared activations over every neuron of every cell.
    pub fn energy(&self) -> f64 {
        self.activations.iter().map(|a| a * a).sum()
    }

    /// Differentiation outputs discretized to gray levels.
    pub fn phenotype(&self) -> GrayImage {
        let n = self.neurons_per_cell();
        let out = self.wiring.output_ids()[0];
        GrayImage::from_fn(self.width, self.height, |r, c| {
            discretize(self.activations[(r * self.width + c) * n + out])
        })
        .expect("grid is non-empty")
    }

    /// Chemical `k` (1-based) of the buffer as a gray image.
    pub fn chemical_map(&self, k: usize) -> Result<GrayImage, DevoError> {
        let m = self.chemicals;
        if k == 0 || k > m {
            return Err(DevoError::ChemicalOutOfRange { index: k, chemicals: m });
        }
        Ok(GrayImage::from_fn(self.width, self.height, |r, c| {
            discretize(self.chem[(r * self.width + c) * m + k - 1])
        })
        .expect("grid is non-empty"))
    }

    /// Adds independent `N(0, sigma^2)` noise to every activation (no
    /// clamping) and refreshes the chemical buffer from the perturbed
    /// outputs.
    pub fn perturb<R: Rng + ?Sized>(&mut self, sigma: f64, rng: &mut R) {
        assert!(sigma >= 0.0, "sigma must be non-negative");
        if sigma == 0.0 {
            return;
        }
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        for a in &mut self.activations {
            *a += normal.sample(rng);
        }
        self.refresh_chem();
    }

    /// Sets every activation and every chemical independently uniform in
    /// `[0, 1)`.
    pub fn randomize_state<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for a in &mut self.activations {
            *a = rng.random::<f64>();
        }
        for c in &mut self.chem {
            *c = rng.random::<f64>();
        }
    }
}

/// Halting rule for growth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthConfig {
    pub max_iterations: usize,
    /// Number of consecutive energy differences that must stay within
    /// `energy_epsilon`.
    pub stability_window: usize,
    pub energy_epsilon: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            max_iterations: 1024,
            stability_window: 8,
            energy_epsilon: 0.0,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<(), DevoError> {
        if self.stability_window == 0 {
            return Err(DevoError::Config("stability_window must be at least 1"));
        }
        if self.max_iterations < self.stability_window {
            return Err(DevoError::Config("max_iterations must be at least stability_window"));
        }
        if !(self.energy_epsilon >= 0.0) {
            return Err(DevoError::Config("energy_epsilon must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GrowthResult {
    pub converged: bool,
    pub iterations_used: usize,
    /// Present iff `converged`.
    pub phenotype: Option<GrayImage>,
    /// Energy of the state growth started from.
    pub initial_energy: f64,
    /// Energy after each step.
    pub energy_trace: Vec<f64>,
    pub final_state: Organism,
}

/// Steps the organism until `stability_window` consecutive energy
/// differences are all within `energy_epsilon` or `max_iterations` steps
/// have run. The first difference is taken against the starting state.
pub fn grow(mut organism: Organism, cfg: &GrowthConfig) -> GrowthResult {
    let initial_energy = organism.energy();
    let mut previous = initial_energy;
    let mut stable = 0;
    let mut trace = Vec::with_capacity(cfg.max_iterations.min(4096));
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        organism.grid_step();
        let e = organism.energy();
        trace.push(e);
        if (e - previous).abs() <= cfg.energy_epsilon {
            stable += 1;
        } else {
            stable = 0;
        }
        previous = e;
        if stable >= cfg.stability_window {
            converged = true;
            break;
        }
    }
    GrowthResult {
        converged,
        iterations_used: trace.len(),
        phenotype: converged.then(|| organism.phenotype()),
        initial_energy,
        energy_trace: trace,
        final_state: organism,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neat::{ConnGene, IoShape};
    use crate::neuro::Topology;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_genome(chemicals: usize, kind: Topology) -> Genome {
        let io = IoShape::new(4 * chemicals, chemicals + 1);
        let mut conns = Vec::new();
        let mut inn = 0;
        for i in 0..=io.n_inputs {
            for o in 0..io.n_outputs {
                conns.push(ConnGene { innovation: inn, from: i as u32, to: io.output_id(o), weight: 0.0, enabled: true });
                inn += 1;
            }
        }
        Genome::from_genes(io, kind, &[], conns).unwrap()
    }

    #[test]
    fn fresh_organism() {
        let g = zero_genome(2, Topology::Feedforward);
        let org = Organism::new(&g, 32, 32, 2).unwrap();
        assert_eq!(org.activations().len(), 1024 * 3);
        assert_eq!(org.wiring().num_inputs(), 9);
        assert_eq!(org.wiring().output_ids().len(), 3);
        assert_eq!(org.energy(), 0.0);
        assert_eq!(org, Organism::new(&g, 32, 32, 2).unwrap());
        assert!(matches!(Organism::new(&g, 4, 4, 1), Err(DevoError::Arity { .. })));
        assert!(matches!(Organism::new(&g, 0, 4, 2), Err(DevoError::EmptyGrid(0, 4))));
    }

    #[test]
    fn zero_weights_step_to_half() {
        let g = zero_genome(2, Topology::Feedforward);
        let mut org = Organism::new(&g, 5, 4, 2).unwrap();
        assert_eq!(org.chemical_map(1).unwrap(), GrayImage::filled(5, 4, 0).unwrap());
        org.grid_step();
        assert!(org.activations().iter().all(|&a| a == 0.5));
        assert!(org.chem_buffer().iter().all(|&c| c == 0.5));
        assert_eq!(org.chemical_map(2).unwrap(), GrayImage::filled(5, 4, 128).unwrap());
        assert_eq!(org.phenotype(), GrayImage::filled(5, 4, 128).unwrap());
        assert!(org.chemical_map(0).is_err() && org.chemical_map(3).is_err());
    }

    #[test]
    fn energy_arithmetic() {
        let g = zero_genome(1, Topology::Recurrent);
        let mut org = Organism::new(&g, 2, 2, 1).unwrap();
        // 2 outputs per cell; add a third neuron by using a wider wiring.
        let wiring = Wiring::new(3, 5, &[], &[], vec![0, 1], Topology::Recurrent).unwrap();
        let mut wide = Organism::from_wiring(Arc::new(wiring), 2, 2, 1).unwrap();
        wide.grid_step();
        assert_eq!(wide.energy(), 3.0);
        org.grid_step();
        assert_eq!(org.energy(), 2.0);
    }

    #[test]
    fn single_cell_sees_no_chemicals() {
        // Output 0 copies chemical input North with a large weight; in a
        // 1x1 grid that input is always 0, so output stays sigmoid(0).
        let io = IoShape::new(4, 2);
        let conns = vec![
            ConnGene { innovation: 0, from: 0, to: io.output_id(0), weight: 10.0, enabled: true },
            ConnGene { innovation: 1, from: 4, to: io.output_id(1), weight: 3.0, enabled: true },
        ];
        let g = Genome::from_genes(io, Topology::Feedforward, &[], conns).unwrap();
        let mut org = Organism::new(&g, 1, 1, 1).unwrap();
        for _ in 0..5 {
            org.grid_step();
            assert_eq!(org.cell(0, 0)[0], 0.5);
        }
    }

    #[test]
    fn zero_weight_growth_trace() {
        let g = zero_genome(1, Topology::Feedforward);
        let org = Organism::new(&g, 7, 3, 1).unwrap();
        let result = grow(org, &GrowthConfig::default());
        assert!(result.converged);
        assert_eq!(result.iterations_used, 9);
        assert_eq!(result.energy_trace.len(), 9);
        assert_eq!(result.phenotype.unwrap(), GrayImage::filled(7, 3, 128).unwrap());
    }

    #[test]
    fn zero_iteration_cap() {
        let g = zero_genome(1, Topology::Feedforward);
        let org = Organism::new(&g, 3, 3, 1).unwrap();
        let cfg = GrowthConfig { max_iterations: 0, ..GrowthConfig::default() };
        let result = grow(org, &cfg);
        assert!(!result.converged);
        assert!(result.phenotype.is_none());
        assert_eq!(result.iterations_used, 0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn oscillating_organism_hits_cap() {
        // Strong negative self feedback on the sole output: a period-2 orbit.
        let io = IoShape::new(0, 1);
        let conns = vec![
            ConnGene { innovation: 0, from: 1, to: 1, weight: -20.0, enabled: true },
            ConnGene { innovation: 1, from: 0, to: 1, weight: 10.0, enabled: true },
        ];
        let g = Genome::from_genes(io, Topology::Recurrent, &[], conns).unwrap();
        let org = Organism::new(&g, 2, 2, 0).unwrap();
        let cfg = GrowthConfig { max_iterations: 64, ..GrowthConfig::default() };
        let result = grow(org, &cfg);
        assert!(!result.converged);
        assert_eq!(result.iterations_used, 64);
        assert_eq!(result.energy_trace.len(), 64);
    }

    #[test]
    fn perturbation_controls() {
        let g = zero_genome(2, Topology::Recurrent);
        let mut org = Organism::new(&g, 4, 4, 2).unwrap();
        org.grid_step();
        let before = org.clone();
        org.perturb(0.0, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(org, before);

        let mut a = before.clone();
        let mut b = before.clone();
        a.perturb(1.0, &mut ChaCha8Rng::seed_from_u64(5));
        b.perturb(1.0, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        assert_ne!(a, before);
        // Chemical buffer mirrors the perturbed chemical outputs.
        let n = a.neurons_per_cell();
        for idx in 0..16 {
            for k in 0..2 {
                assert_eq!(a.chem_buffer()[idx * 2 + k], a.activations()[idx * n + a.wiring().output_ids()[k + 1]]);
            }
        }

        let mut r1 = before.clone();
        let mut r2 = before.clone();
        r1.randomize_state(&mut ChaCha8Rng::seed_from_u64(9));
        r2.randomize_state(&mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(r1, r2);
        assert!(r1.activations().iter().chain(r1.chem_buffer()).all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn fixed_point_regrowth_within_window() {
        let g = zero_genome(1, Topology::Feedforward);
        let grown = grow(Organism::new(&g, 4, 4, 1).unwrap(), &GrowthConfig::default());
        let again = grow(grown.final_state.clone(), &GrowthConfig::default());
        assert!(again.converged);
        assert_eq!(again.iterations_used, 8);
        assert_eq!(again.phenotype, grown.phenotype);
    }
}
