//! Test-side oracles, written directly from the model definition without
//! going through `Wiring` or `Organism`.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morphogrid::neat::{mutate_add_link, mutate_add_node, Genome, InnovationRegistry, IoShape, NodeId, NodeRole};
use morphogrid::neuro::Topology;

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// The whole grid as one big recurrent network: every neuron of every cell
/// is a node, and each neighbour-chemical input becomes a plain recurrent
/// connection from the neighbour's chemical output neuron.
pub struct Monolith {
    pub width: usize,
    pub height: usize,
    /// Neurons per cell, in the organism's layout: outputs in order, then
    /// hidden nodes by ascending id.
    pub per_cell: usize,
    /// `(target, source, weight)` over global neuron indices.
    edges: Vec<(usize, usize, f64)>,
    bias: Vec<f64>,
    pub state: Vec<f64>,
}

/// Organism-local index of each non-input genome node.
pub fn local_index(genome: &Genome) -> impl Fn(NodeId) -> usize + '_ {
    let io = genome.io();
    let mut hidden: Vec<NodeId> = genome.nodes().iter().filter(|n| n.role == NodeRole::Hidden).map(|n| n.id).collect();
    hidden.sort_unstable();
    move |id| {
        let first_out = io.output_id(0);
        if id >= first_out && id < first_out + io.n_outputs as NodeId {
            (id - first_out) as usize
        } else {
            io.n_outputs + hidden.iter().position(|&h| h == id).expect("hidden node")
        }
    }
}

impl Monolith {
    pub fn new(genome: &Genome, width: usize, height: usize, chemicals: usize) -> Self {
        assert_eq!(genome.kind(), Topology::Recurrent);
        let io = genome.io();
        assert_eq!(io.n_inputs, 4 * chemicals);
        let per_cell = io.n_outputs + genome.hidden_count();
        let idx = local_index(genome);
        let cells = width * height;
        let mut edges = Vec::new();
        let mut bias = vec![0.0; cells * per_cell];
        let dirs: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];
        for row in 0..height {
            for col in 0..width {
                let cell = row * width + col;
                for c in genome.conns().iter().filter(|c| c.enabled) {
                    let target = cell * per_cell + idx(c.to);
                    let from = c.from as usize;
                    if from == io.n_inputs {
                        bias[target] += c.weight;
                    } else if from < io.n_inputs {
                        let (d, k) = (from / chemicals, from % chemicals);
                        let (r, q) = (row as isize + dirs[d].0, col as isize + dirs[d].1);
                        if r >= 0 && q >= 0 && (r as usize) < height && (q as usize) < width {
                            let neighbour = r as usize * width + q as usize;
                            edges.push((target, neighbour * per_cell + 1 + k, c.weight));
                        }
                    } else {
                        edges.push((target, cell * per_cell + idx(c.from), c.weight));
                    }
                }
            }
        }
        Monolith { width, height, per_cell, edges, bias, state: vec![0.0; cells * per_cell] }
    }

    /// One synchronous update of every neuron in the system.
    pub fn step(&mut self) {
        let mut net = self.bias.clone();
        for &(t, s, w) in &self.edges {
            net[t] += w * self.state[s];
        }
        self.state = net.into_iter().map(logistic).collect();
    }
}

/// A recurrent controller for `chemicals` chemicals with a few hidden nodes,
/// extra links (self loops and cycles allowed) and weights in [-3, 3].
pub fn random_recurrent_genome(chemicals: usize, seed: u64) -> Genome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let io = IoShape::new(4 * chemicals, chemicals + 1);
    let mut reg = InnovationRegistry::new(io);
    let mut g = Genome::minimal(io, Topology::Recurrent, &mut reg, (-3.0, 3.0), &mut rng);
    for _ in 0..rng.random_range(1..5) {
        mutate_add_node(&mut g, &mut reg, &mut rng);
    }
    for _ in 0..rng.random_range(2..8) {
        mutate_add_link(&mut g, &mut reg, (-3.0, 3.0), &mut rng);
    }
    let text = g.to_text();
    // Re-randomize weights through the text form to keep the genome valid.
    let lines: Vec<String> = text
        .lines()
        .map(|l| {
            let mut f: Vec<String> = l.split_whitespace().map(String::from).collect();
            if f[0] == "conn" {
                f[4] = format!("{:?}", rng.random_range(-3.0..3.0));
            }
            f.join(" ")
        })
        .collect();
    Genome::from_text(&lines.join("\n")).unwrap()
}

/// Largest per-activation difference between an organism's state and the
/// monolith's over `steps` steps, starting both from zero.
pub fn max_trajectory_gap(genome: &Genome, width: usize, height: usize, chemicals: usize, steps: usize) -> f64 {
    let mut org = morphogrid::devo::Organism::new(genome, width, height, chemicals).unwrap();
    let mut mono = Monolith::new(genome, width, height, chemicals);
    assert_eq!(org.activations().len(), mono.state.len());
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        org.grid_step();
        mono.step();
        for (a, b) in org.activations().iter().zip(&mono.state) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// A feedforward controller built like [`random_recurrent_genome`].
pub fn random_feedforward_genome(chemicals: usize, seed: u64) -> Genome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let io = IoShape::new(4 * chemicals, chemicals + 1);
    let mut reg = InnovationRegistry::new(io);
    let mut g = Genome::minimal(io, Topology::Feedforward, &mut reg, (-4.0, 4.0), &mut rng);
    for _ in 0..rng.random_range(0..4) {
        mutate_add_node(&mut g, &mut reg, &mut rng);
    }
    for _ in 0..rng.random_range(0..6) {
        mutate_add_link(&mut g, &mut reg, (-4.0, 4.0), &mut rng);
    }
    g
}
