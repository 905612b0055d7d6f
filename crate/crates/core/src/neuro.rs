//! Discrete-time sigmoid networks used as cell controllers.
//!
//! A [`Wiring`] holds the immutable weights of a controller: neuron-to-neuron
//! weights `w[i][j]` and input-to-neuron weights `z[i][j]`. Activation state
//! is kept apart so that many cells can share one wiring while owning their
//! own activations. [`Network`] pairs a wiring with a single activation
//! vector for standalone use.
//!
//! Two update semantics are provided:
//!
//! * synchronous: every neuron computes
//!   `a_i(t+1) = sigmoid(sum_j w_ij a_j(t) + sum_j z_ij I_j(t))`
//!   from the pre-step activation vector;
//! * forward pass: neurons are updated once each in topological order, so a
//!   neuron sees the current-step values of its predecessors. Only available
//!   for acyclic (feedforward) wirings.

use std::fmt;

use thiserror::Error;

/// Standard logistic sigmoid.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Connection graph family of a controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    Feedforward,
    Recurrent,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Feedforward => "feedforward",
            Topology::Recurrent => "recurrent",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "feedforward" | "ffwd" => Ok(Topology::Feedforward),
            "recurrent" | "recurr" => Ok(Topology::Recurrent),
            other => Err(format!("unknown topology `{other}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("feedforward wiring contains a cycle")]
    Cycle,
    #[error("neuron index {index} out of range (network has {len} neurons)")]
    NeuronOutOfRange { index: usize, len: usize },
    #[error("input index {index} out of range (network has {len} inputs)")]
    InputOutOfRange { index: usize, len: usize },
}

/// Incoming edges of every neuron in compressed row form.
#[derive(Clone, Debug, PartialEq)]
struct Incoming {
    offsets: Vec<usize>,
    sources: Vec<usize>,
    weights: Vec<f64>,
}

impl Incoming {
    /// Builds rows from `(target, source, weight)` triples. Duplicate
    /// target/source pairs are summed.
    fn build(rows: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = edges.to_vec();
        sorted.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (t, s, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == t && last.1 == s => last.2 += w,
                _ => merged.push((t, s, w)),
            }
        }
        let mut offsets = vec![0; rows + 1];
        for &(t, _, _) in &merged {
            offsets[t + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        Incoming {
            offsets,
            sources: merged.iter().map(|e| e.1).collect(),
            weights: merged.iter().map(|e| e.2).collect(),
        }
    }

    #[inline]
    fn dot(&self, row: usize, values: &[f64]) -> f64 {
        let (lo, hi) = (self.offsets[row], self.offsets[row + 1]);
        self.sources[lo..hi]
            .iter()
            .zip(&self.weights[lo..hi])
            .map(|(&s, &w)| w * values[s])
            .sum()
    }

    fn iter_row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.offsets[row], self.offsets[row + 1]);
        self.sources[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }
}

/// Immutable weights and layout of a controller.
#[derive(Clone, Debug, PartialEq)]
pub struct Wiring {
    num_neurons: usize,
    num_inputs: usize,
    neuron_in: Incoming,
    input_in: Incoming,
    output_ids: Vec<usize>,
    kind: Topology,
    topo_order: Option<Vec<usize>>,
}

impl Wiring {
    /// `neuron_weights` holds `(i, j, w_ij)`: weight of the edge from neuron
    /// `j` into neuron `i`. `input_weights` holds `(i, j, z_ij)` for input
    /// slot `j` into neuron `i`.
    pub fn new(
        num_neurons: usize,
        num_inputs: usize,
        neuron_weights: &[(usize, usize, f64)],
        input_weights: &[(usize, usize, f64)],
        output_ids: Vec<usize>,
        kind: Topology,
    ) -> Result<Self, NetworkError> {
        for &(i, j, _) in neuron_weights {
            for index in [i, j] {
                if index >= num_neurons {
                    return Err(NetworkError::NeuronOutOfRange { index, len: num_neurons });
                }
            }
        }
        for &(i, j, _) in input_weights {
            if i >= num_neurons {
                return Err(NetworkError::NeuronOutOfRange { index: i, len: num_neurons });
            }
            if j >= num_inputs {
                return Err(NetworkError::InputOutOfRange { index: j, len: num_inputs });
            }
        }
        for &index in &output_ids {
            if index >= num_neurons {
                return Err(NetworkError::NeuronOutOfRange { index, len: num_neurons });
            }
        }
        let neuron_in = Incoming::build(num_neurons, neuron_weights);
        let input_in = Incoming::build(num_neurons, input_weights);
        let topo_order = match kind {
            Topology::Feedforward => Some(topological_order(num_neurons, &neuron_in)?),
            Topology::Recurrent => None,
        };
        Ok(Wiring {
            num_neurons,
            num_inputs,
            neuron_in,
            input_in,
            output_ids,
            kind,
            topo_order,
        })
    }

    pub fn num_neurons(&self) -> usize {
        self.num_neurons
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn output_ids(&self) -> &[usize] {
        &self.output_ids
    }

    pub fn kind(&self) -> Topology {
        self.kind
    }

    pub fn topo_order(&self) -> Option<&[usize]> {
        self.topo_order.as_deref()
    }

    /// Nonzero neuron-to-neuron weights as `(i, j, w_ij)`.
    pub fn neuron_weights(&self) -> Vec<(usize, usize, f64)> {
        (0..self.num_neurons)
            .flat_map(|i| self.neuron_in.iter_row(i).map(move |(j, w)| (i, j, w)))
            .collect()
    }

    /// Input weights as `(i, j, z_ij)`.
    pub fn input_weights(&self) -> Vec<(usize, usize, f64)> {
        (0..self.num_neurons)
            .flat_map(|i| self.input_in.iter_row(i).map(move |(j, w)| (i, j, w)))
            .collect()
    }

    /// Length of the longest chain of neurons (counted in neurons). Only
    /// meaningful for acyclic wirings; returns `None` otherwise.
    pub fn depth(&self) -> Option<usize> {
        let order = match &self.topo_order {
            Some(order) => order.clone(),
            None => topological_order(self.num_neurons, &self.neuron_in).ok()?,
        };
        let mut depth = vec![1usize; self.num_neurons];
        for &i in &order {
            for (j, _) in self.neuron_in.iter_row(i) {
                depth[i] = depth[i].max(depth[j] + 1);
            }
        }
        Some(depth.into_iter().max().unwrap_or(0))
    }

    #[inline]
    fn net_input(&self, neuron: usize, activations: &[f64], inputs: &[f64]) -> f64 {
        self.neuron_in.dot(neuron, activations) + self.input_in.dot(neuron, inputs)
    }

    /// One synchronous update: `next` is computed entirely from `prev`.
    pub fn step_into(&self, prev: &[f64], inputs: &[f64], next: &mut [f64]) {
        assert_eq!(inputs.len(), self.num_inputs, "input length mismatch");
        debug_assert_eq!(prev.len(), self.num_neurons);
        for (i, slot) in next.iter_mut().enumerate().take(self.num_neurons) {
            *slot = sigmoid(self.net_input(i, prev, inputs));
        }
    }

    /// One forward pass in topological order, in place.
    ///
    /// Panics if the wiring is recurrent.
    pub fn forward_in_place(&self, state: &mut [f64], inputs: &[f64]) {
        assert_eq!(inputs.len(), self.num_inputs, "input length mismatch");
        let order = self
            .topo_order
            .as_ref()
            .expect("forward pass requires a feedforward wiring");
        for &i in order {
            state[i] = sigmoid(self.net_input(i, state, inputs));
        }
    }

    /// One growth step worth of computation: a forward pass for
    /// feedforward wirings, a synchronous update for recurrent ones.
    /// `scratch` must have `num_neurons` slots; it is only used by the
    /// recurrent path.
    #[inline]
    pub fn advance(&self, state: &mut [f64], inputs: &[f64], scratch: &mut [f64]) {
        match self.kind {
            Topology::Feedforward => self.forward_in_place(state, inputs),
            Topology::Recurrent => {
                self.step_into(state, inputs, scratch);
                state.copy_from_slice(&scratch[..self.num_neurons]);
            }
        }
    }
}

fn topological_order(n: usize, incoming: &Incoming) -> Result<Vec<usize>, NetworkError> {
    let mut indegree = vec![0usize; n];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in incoming.iter_row(i) {
            if i == j {
                return Err(NetworkError::Cycle);
            }
            indegree[i] += 1;
            outgoing[j].push(i);
        }
    }
    // Kahn's algorithm, smallest index first so the order is canonical.
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &k in &outgoing[i] {
            indegree[k] -= 1;
            if indegree[k] == 0 {
                ready.insert(k);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(NetworkError::Cycle)
    }
}

/// A wiring together with one activation vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    wiring: Wiring,
    activations: Vec<f64>,
    scratch: Vec<f64>,
}

impl Network {
    pub fn new(wiring: Wiring) -> Self {
        let n = wiring.num_neurons();
        Network {
            wiring,
            activations: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    pub fn wiring(&self) -> &Wiring {
        &self.wiring
    }

    pub fn kind(&self) -> Topology {
        self.wiring.kind
    }

    pub fn num_neurons(&self) -> usize {
        self.wiring.num_neurons
    }

    pub fn num_inputs(&self) -> usize {
        self.wiring.num_inputs
    }

    pub fn activations(&self) -> &[f64] {
        &self.activations
    }

    pub fn activations_mut(&mut self) -> &mut [f64] {
        &mut self.activations
    }

    /// Current values of the output neurons, in `output_ids` order.
    pub fn outputs(&self) -> Vec<f64> {
        self.wiring
            .output_ids
            .iter()
            .map(|&i| self.activations[i])
            .collect()
    }

    pub fn step_synchronous(&mut self, inputs: &[f64]) {
        self.wiring
            .step_into(&self.activations, inputs, &mut self.scratch);
        std::mem::swap(&mut self.activations, &mut self.scratch);
    }

    pub fn forward_pass(&mut self, inputs: &[f64]) {
        self.wiring.forward_in_place(&mut self.activations, inputs);
    }

    /// Growth-step semantics of the wiring's kind.
    pub fn advance(&mut self, inputs: &[f64]) {
        match self.wiring.kind {
            Topology::Feedforward => self.forward_pass(inputs),
            Topology::Recurrent => self.step_synchronous(inputs),
        }
    }

    pub fn reset(&mut self) {
        self.activations.iter_mut().for_each(|a| *a = 0.0);
    }

    /// Sum of squared activations.
    pub fn energy(&self) -> f64 {
        self.activations.iter().map(|a| a * a).sum()
    }
}
