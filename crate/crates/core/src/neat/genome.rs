//! Direct encoding of controllers: node genes plus innovation-numbered
//! connection genes.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::neuro::{NetworkError, Topology, Wiring};

pub type NodeId = u32;
pub type Innovation = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Input,
    Bias,
    Output,
    Hidden,
}

impl NodeRole {
    fn as_str(self) -> &'static str {
        match self {
            NodeRole::Input => "input",
            NodeRole::Bias => "bias",
            NodeRole::Output => "output",
            NodeRole::Hidden => "hidden",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeGene {
    pub id: NodeId,
    pub role: NodeRole,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnGene {
    pub innovation: Innovation,
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

/// Input/output arity of a controller. `n_inputs` excludes the bias input,
/// which every genome carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IoShape {
    pub n_inputs: usize,
    pub n_outputs: usize,
}

impl IoShape {
    pub fn new(n_inputs: usize, n_outputs: usize) -> Self {
        IoShape { n_inputs, n_outputs }
    }

    pub fn bias_id(&self) -> NodeId {
        self.n_inputs as NodeId
    }

    pub fn output_id(&self, k: usize) -> NodeId {
        (self.n_inputs + 1 + k) as NodeId
    }

    /// First id available for hidden nodes.
    pub fn first_hidden_id(&self) -> NodeId {
        (self.n_inputs + 1 + self.n_outputs) as NodeId
    }
}

/// Historical markings shared by every genome of a run.
///
/// The same `(from, to)` pair always receives the same innovation number,
/// and splitting the same connection always proposes the same node id.
#[derive(Clone, Debug)]
pub struct InnovationRegistry {
    next_innovation: Innovation,
    seen: HashMap<(NodeId, NodeId), Innovation>,
    next_node_id: NodeId,
    split_seen: HashMap<Innovation, NodeId>,
}

impl InnovationRegistry {
    /// Registry pre-seeded with the fully connected inputs(+bias)→outputs
    /// layout, so initial genes carry innovations `0..(n_inputs+1)*n_outputs`.
    pub fn new(io: IoShape) -> Self {
        let mut reg = InnovationRegistry {
            next_innovation: 0,
            seen: HashMap::new(),
            next_node_id: io.first_hidden_id(),
            split_seen: HashMap::new(),
        };
        for i in 0..=io.n_inputs {
            for o in 0..io.n_outputs {
                reg.connection(i as NodeId, io.output_id(o));
            }
        }
        reg
    }

    pub fn connection(&mut self, from: NodeId, to: NodeId) -> Innovation {
        *self.seen.entry((from, to)).or_insert_with(|| {
            let innovation = self.next_innovation;
            self.next_innovation += 1;
            innovation
        })
    }

    pub fn split(&mut self, innovation: Innovation) -> NodeId {
        if let Some(&id) = self.split_seen.get(&innovation) {
            return id;
        }
        let id = self.fresh_node();
        self.split_seen.insert(innovation, id);
        id
    }

    pub fn fresh_node(&mut self) -> NodeId {
        let id = self.next_node_id;
        self.next_node_id += 1;
        id
    }

    pub fn next_innovation(&self) -> Innovation {
        self.next_innovation
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenomeError {
    #[error("connection genes are not in strictly increasing innovation order")]
    InnovationOrder,
    #[error("connection {0} references an unknown node")]
    UnknownNode(Innovation),
    #[error("connection {0} targets an input or bias node")]
    IntoInput(Innovation),
    #[error("duplicate connection between the same pair of nodes (innovation {0})")]
    DuplicatePair(Innovation),
    #[error("feedforward genome contains a cycle")]
    Cycle,
    #[error("feedforward genome has a connection leaving an output node (innovation {0})")]
    FromOutput(Innovation),
    #[error("node layout does not match {n_inputs} inputs + bias and {n_outputs} outputs")]
    Layout { n_inputs: usize, n_outputs: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// NEAT genotype.
///
/// Node ids are laid out as inputs `0..n_inputs`, the bias at `n_inputs`,
/// outputs right after, hidden nodes above that. Connection genes are kept
/// sorted by innovation number.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    io: IoShape,
    kind: Topology,
    nodes: Vec<NodeGene>,
    conns: Vec<ConnGene>,
}

impl Genome {
    /// Inputs and bias fully connected to every output with weights drawn
    /// uniformly from `weight_range`.
    pub fn minimal<R: Rng + ?Sized>(
        io: IoShape,
        kind: Topology,
        registry: &mut InnovationRegistry,
        weight_range: (f64, f64),
        rng: &mut R,
    ) -> Self {
        let mut nodes = Vec::with_capacity(io.n_inputs + 1 + io.n_outputs);
        for i in 0..io.n_inputs {
            nodes.push(NodeGene { id: i as NodeId, role: NodeRole::Input });
        }
        nodes.push(NodeGene { id: io.bias_id(), role: NodeRole::Bias });
        for o in 0..io.n_outputs {
            nodes.push(NodeGene { id: io.output_id(o), role: NodeRole::Output });
        }
        let mut conns = Vec::with_capacity((io.n_inputs + 1) * io.n_outputs);
        for i in 0..=io.n_inputs {
            for o in 0..io.n_outputs {
                let (from, to) = (i as NodeId, io.output_id(o));
                conns.push(ConnGene {
                    innovation: registry.connection(from, to),
                    from,
                    to,
                    weight: rng.random_range(weight_range.0..=weight_range.1),
                    enabled: true,
                });
            }
        }
        conns.sort_by_key(|c| c.innovation);
        Genome { io, kind, nodes, conns }
    }

    /// Builds a genome from explicit genes, checking every structural
    /// invariant except I/O connectivity (see [`Genome::satisfies_io_constraint`]).
    pub fn from_genes(
        io: IoShape,
        kind: Topology,
        hidden: &[NodeId],
        conns: Vec<ConnGene>,
    ) -> Result<Self, GenomeError> {
        let mut nodes = Vec::new();
        for i in 0..io.n_inputs {
            nodes.push(NodeGene { id: i as NodeId, role: NodeRole::Input });
        }
        nodes.push(NodeGene { id: io.bias_id(), role: NodeRole::Bias });
        for o in 0..io.n_outputs {
            nodes.push(NodeGene { id: io.output_id(o), role: NodeRole::Output });
        }
        let mut hidden = hidden.to_vec();
        hidden.sort_unstable();
        hidden.dedup();
        for id in hidden {
            if id < io.first_hidden_id() {
                return Err(GenomeError::Layout { n_inputs: io.n_inputs, n_outputs: io.n_outputs });
            }
            nodes.push(NodeGene { id, role: NodeRole::Hidden });
        }
        let genome = Genome { io, kind, nodes, conns };
        genome.check()?;
        Ok(genome)
    }

    pub fn io(&self) -> IoShape {
        self.io
    }

    pub fn kind(&self) -> Topology {
        self.kind
    }

    pub fn nodes(&self) -> &[NodeGene] {
        &self.nodes
    }

    pub fn conns(&self) -> &[ConnGene] {
        &self.conns
    }

    pub(crate) fn conns_mut(&mut self) -> &mut [ConnGene] {
        &mut self.conns
    }

    pub fn role(&self, id: NodeId) -> Option<NodeRole> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| self.nodes[i].role)
    }

    pub fn has_node(&self, id: NodeId) -> bool {
        self.role(id).is_some()
    }

    pub fn enabled_edges(&self) -> usize {
        self.conns.iter().filter(|c| c.enabled).count()
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.role == NodeRole::Hidden).count()
    }

    pub fn find(&self, innovation: Innovation) -> Option<&ConnGene> {
        self.conns
            .binary_search_by_key(&innovation, |c| c.innovation)
            .ok()
            .map(|i| &self.conns[i])
    }

    pub fn has_pair(&self, from: NodeId, to: NodeId) -> bool {
        self.conns.iter().any(|c| c.from == from && c.to == to)
    }

    pub fn set_enabled(&mut self, innovation: Innovation, enabled: bool) -> bool {
        match self.conns.binary_search_by_key(&innovation, |c| c.innovation) {
            Ok(i) => {
                self.conns[i].enabled = enabled;
                true
            }
            Err(_) => false,
        }
    }

    pub(crate) fn add_hidden(&mut self, id: NodeId) {
        let pos = self.nodes.partition_point(|n| n.id < id);
        self.nodes.insert(pos, NodeGene { id, role: NodeRole::Hidden });
    }

    pub(crate) fn insert_conn(&mut self, gene: ConnGene) {
        let pos = self.conns.partition_point(|c| c.innovation < gene.innovation);
        debug_assert!(self.conns.get(pos).is_none_or(|c| c.innovation != gene.innovation));
        self.conns.insert(pos, gene);
    }

    fn incident_enabled(&self, id: NodeId) -> bool {
        self.conns
            .iter()
            .any(|c| c.enabled && (c.from == id || c.to == id))
    }

    /// Every input and every output node touches at least one enabled
    /// connection.
    pub fn satisfies_io_constraint(&self) -> bool {
        self.unconnected_io().is_empty()
    }

    /// Input and output node ids lacking an enabled incident connection.
    pub fn unconnected_io(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| matches!(n.role, NodeRole::Input | NodeRole::Output))
            .filter(|n| !self.incident_enabled(n.id))
            .map(|n| n.id)
            .collect()
    }

    /// Whether `to` can reach `from` over any gene, enabled or not.
    pub(crate) fn reaches(&self, start: NodeId, goal: NodeId) -> bool {
        let mut stack = vec![start];
        let mut seen = HashSet::new();
        while let Some(n) = stack.pop() {
            if n == goal {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.conns.iter().filter(|c| c.from == n).map(|c| c.to));
            }
        }
        false
    }

    /// Acyclicity over all genes. Disabled genes are included so that
    /// re-enabling never closes a loop.
    pub fn is_acyclic(&self) -> bool {
        let mut indegree: HashMap<NodeId, usize> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for c in &self.conns {
            *indegree.entry(c.to).or_default() += 1;
        }
        let mut ready: Vec<NodeId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        let mut visited = 0;
        while let Some(n) = ready.pop() {
            visited += 1;
            for c in self.conns.iter().filter(|c| c.from == n) {
                let d = indegree.get_mut(&c.to).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(c.to);
                }
            }
        }
        visited == indegree.len()
    }

    /// Structural invariants (innovation order, endpoints, duplicates,
    /// feedforward acyclicity).
    pub fn check(&self) -> Result<(), GenomeError> {
        let mut pairs = HashSet::new();
        for (k, c) in self.conns.iter().enumerate() {
            if k > 0 && self.conns[k - 1].innovation >= c.innovation {
                return Err(GenomeError::InnovationOrder);
            }
            let (Some(_), Some(to_role)) = (self.role(c.from), self.role(c.to)) else {
                return Err(GenomeError::UnknownNode(c.innovation));
            };
            if matches!(to_role, NodeRole::Input | NodeRole::Bias) {
                return Err(GenomeError::IntoInput(c.innovation));
            }
            if self.kind == Topology::Feedforward && self.role(c.from) == Some(NodeRole::Output) {
                return Err(GenomeError::FromOutput(c.innovation));
            }
            if !pairs.insert((c.from, c.to)) {
                return Err(GenomeError::DuplicatePair(c.innovation));
            }
        }
        if self.kind == Topology::Feedforward && !self.is_acyclic() {
            return Err(GenomeError::Cycle);
        }
        Ok(())
    }

    /// Neuron index of a node in the compiled network: outputs first (in
    /// output order), then hidden nodes by id. Inputs and bias are input
    /// slots, not neurons.
    fn neuron_index(&self) -> HashMap<NodeId, usize> {
        let mut map = HashMap::new();
        for o in 0..self.io.n_outputs {
            map.insert(self.io.output_id(o), o);
        }
        let hidden = self.nodes.iter().filter(|n| n.role == NodeRole::Hidden);
        for (slot, n) in (self.io.n_outputs..).zip(hidden) {
            map.insert(n.id, slot);
        }
        map
    }

    /// Compiles the enabled genes into an executable wiring.
    ///
    /// Input slots `0..n_inputs` carry the external inputs and slot
    /// `n_inputs` the constant bias. Output neuron `k` is `output_ids[k]`.
    pub fn compile(&self) -> Result<Wiring, NetworkError> {
        let index = self.neuron_index();
        let num_neurons = index.len();
        let mut w = Vec::new();
        let mut z = Vec::new();
        for c in self.conns.iter().filter(|c| c.enabled) {
            let target = index[&c.to];
            match self.role(c.from) {
                Some(NodeRole::Input) | Some(NodeRole::Bias) => z.push((target, c.from as usize, c.weight)),
                _ => w.push((target, index[&c.from], c.weight)),
            }
        }
        Wiring::new(
            num_neurons,
            self.io.n_inputs + 1,
            &w,
            &z,
            (0..self.io.n_outputs).collect(),
            self.kind,
        )
    }

    /// Line-oriented text form, one gene per line. Weights are written in
    /// shortest round-trip notation so parsing restores them bit-exactly.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Genome, GenomeError> {
        let err = |line: usize, message: &str| GenomeError::Parse { line, message: message.to_string() };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 10
            || h[0] != "genome"
            || h[2] != "inputs"
            || h[4] != "outputs"
            || h[6] != "nodes"
            || h[8] != "connections"
        {
            return Err(err(hl, "malformed header"));
        }
        let kind: Topology = h[1].parse().map_err(|e: String| err(hl, &e))?;
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(hl, "bad count"));
        let io = IoShape::new(num(h[3])?, num(h[5])?);
        let (n_nodes, n_conns) = (num(h[7])?, num(h[9])?);

        let mut hidden = Vec::new();
        let mut node_count = 0;
        let mut conns = Vec::new();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.first().copied() {
                Some("node") if f.len() == 3 => {
                    let id: NodeId = f[1].parse().map_err(|_| err(ln, "bad node id"))?;
                    let role = match f[2] {
                        "input" => NodeRole::Input,
                        "bias" => NodeRole::Bias,
                        "output" => NodeRole::Output,
                        "hidden" => NodeRole::Hidden,
                        _ => return Err(err(ln, "unknown node role")),
                    };
                    if role == NodeRole::Hidden {
                        hidden.push(id);
                    }
                    node_count += 1;
                }
                Some("conn") if f.len() == 6 => {
                    conns.push(ConnGene {
                        innovation: f[1].parse().map_err(|_| err(ln, "bad connection field"))?,
                        from: f[2].parse().map_err(|_| err(ln, "bad connection field"))?,
                        to: f[3].parse().map_err(|_| err(ln, "bad connection field"))?,
                        weight: f[4].parse().map_err(|_| err(ln, "bad connection field"))?,
                        enabled: match f[5] {
                            "1" => true,
                            "0" => false,
                            _ => return Err(err(ln, "enabled flag must be 0 or 1")),
                        },
                    });
                }
                _ => return Err(err(ln, "unrecognized line")),
            }
        }
        if node_count != n_nodes || conns.len() != n_conns {
            return Err(err(hl, "gene counts do not match header"));
        }
        let genome = Genome::from_genes(io, kind, &hidden, conns)?;
        if genome.nodes.len() != n_nodes {
            return Err(GenomeError::Layout { n_inputs: io.n_inputs, n_outputs: io.n_outputs });
        }
        Ok(genome)
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "genome {} inputs {} outputs {} nodes {} connections {}",
            self.kind,
            self.io.n_inputs,
            self.io.n_outputs,
            self.nodes.len(),
            self.conns.len(),
        )?;
        for n in &self.nodes {
            writeln!(f, "node {} {}", n.id, n.role.as_str())?;
        }
        for c in &self.conns {
            writeln!(
                f,
                "conn {} {} {} {:?} {}",
                c.innovation,
                c.from,
                c.to,
                c.weight,
                u8::from(c.enabled)
            )?;
        }
        Ok(())
    }
}
