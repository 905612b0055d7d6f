//! Variation operators and the compatibility distance.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::NeatConfig;
use super::genome::{ConnGene, Genome, Innovation, InnovationRegistry, NodeId, NodeRole};
use crate::neuro::Topology;

/// `c1 * E / N + c2 * D / N + c3 * mean|dw|`, with `N = 1` when both genomes
/// have fewer than 20 genes, otherwise the larger gene count.
pub fn compatibility_distance(a: &Genome, b: &Genome, cfg: &NeatConfig) -> f64 {
    let (ga, gb) = (a.conns(), b.conns());
    let (mut i, mut j) = (0, 0);
    let (mut disjoint, mut matching, mut weight_diff) = (0usize, 0usize, 0.0);
    while i < ga.len() && j < gb.len() {
        let (x, y) = (ga[i].innovation, gb[j].innovation);
        if x == y {
            matching += 1;
            weight_diff += (ga[i].weight - gb[j].weight).abs();
            i += 1;
            j += 1;
        } else if x < y {
            disjoint += 1;
            i += 1;
        } else {
            disjoint += 1;
            j += 1;
        }
    }
    let excess = (ga.len() - i) + (gb.len() - j);
    let longest = ga.len().max(gb.len());
    let n = if longest < 20 { 1.0 } else { longest as f64 };
    let mean_diff = if matching > 0 { weight_diff / matching as f64 } else { 0.0 };
    cfg.c1 * excess as f64 / n + cfg.c2 * disjoint as f64 / n + cfg.c3 * mean_diff
}

/// Splits a uniformly chosen enabled connection `a -> b` (weight `w`) into
/// `a -> c` (weight 1) and `c -> b` (weight `w`). Returns the new node id,
/// or `None` if the genome has no enabled connection.
pub fn mutate_add_node<R: Rng + ?Sized>(
    genome: &mut Genome,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Option<NodeId> {
    let enabled: Vec<usize> = (0..genome.conns().len())
        .filter(|&k| genome.conns()[k].enabled)
        .collect();
    let &k = enabled.choose(rng)?;
    let old = genome.conns()[k];
    genome.conns_mut()[k].enabled = false;

    let mut node = registry.split(old.innovation);
    if genome.has_node(node) {
        // Same connection split before in this lineage.
        node = registry.fresh_node();
    }
    genome.add_hidden(node);
    genome.insert_conn(ConnGene {
        innovation: registry.connection(old.from, node),
        from: old.from,
        to: node,
        weight: 1.0,
        enabled: true,
    });
    genome.insert_conn(ConnGene {
        innovation: registry.connection(node, old.to),
        from: node,
        to: old.to,
        weight: old.weight,
        enabled: true,
    });
    Some(node)
}

/// All pairs that could receive a new connection.
fn legal_new_links(genome: &Genome) -> Vec<(NodeId, NodeId)> {
    let feedforward = genome.kind() == Topology::Feedforward;
    let sources: Vec<NodeId> = genome
        .nodes()
        .iter()
        .filter(|n| !(feedforward && n.role == NodeRole::Output))
        .map(|n| n.id)
        .collect();
    let targets: Vec<NodeId> = genome
        .nodes()
        .iter()
        .filter(|n| matches!(n.role, NodeRole::Output | NodeRole::Hidden))
        .map(|n| n.id)
        .collect();
    let mut pairs = Vec::new();
    for &from in &sources {
        for &to in &targets {
            if genome.has_pair(from, to) {
                continue;
            }
            if feedforward && (from == to || genome.reaches(to, from)) {
                continue;
            }
            pairs.push((from, to));
        }
    }
    pairs
}

/// Adds one enabled connection between a random legal pair, weight uniform
/// in `weight_range`. Returns the innovation, or `None` when no legal pair
/// exists.
pub fn mutate_add_link<R: Rng + ?Sized>(
    genome: &mut Genome,
    registry: &mut InnovationRegistry,
    weight_range: (f64, f64),
    rng: &mut R,
) -> Option<Innovation> {
    let pairs = legal_new_links(genome);
    let &(from, to) = pairs.choose(rng)?;
    let innovation = registry.connection(from, to);
    genome.insert_conn(ConnGene {
        innovation,
        from,
        to,
        weight: rng.random_range(weight_range.0..=weight_range.1),
        enabled: true,
    });
    Some(innovation)
}

/// Per-genome Gaussian gate, then per-gene Gaussian perturbation; per-gene
/// uniform reset drawn independently.
pub fn mutate_weights<R: Rng + ?Sized>(genome: &mut Genome, cfg: &NeatConfig, rng: &mut R) {
    let normal = Normal::new(0.0, cfg.weight_gauss_sigma).expect("sigma must be finite and >= 0");
    if rng.random::<f64>() < cfg.p_weight_gauss {
        for c in genome.conns_mut() {
            c.weight += normal.sample(rng);
        }
    }
    let (lo, hi) = cfg.uniform_reset_range;
    for c in genome.conns_mut() {
        if rng.random::<f64>() < cfg.p_weight_uniform {
            c.weight = rng.random_range(lo..=hi);
        }
    }
}

/// Enables a random disabled gene with probability `p_enable_link`, then
/// disables a random enabled gene with probability `p_disable_link`. The
/// disable branch only considers genes whose removal keeps every input and
/// output connected.
pub fn mutate_toggle<R: Rng + ?Sized>(genome: &mut Genome, cfg: &NeatConfig, rng: &mut R) {
    if rng.random::<f64>() < cfg.p_enable_link {
        let disabled: Vec<Innovation> = genome
            .conns()
            .iter()
            .filter(|c| !c.enabled)
            .map(|c| c.innovation)
            .collect();
        if let Some(&innovation) = disabled.choose(rng) {
            genome.set_enabled(innovation, true);
        }
    }
    if rng.random::<f64>() < cfg.p_disable_link {
        let candidates: Vec<Innovation> = genome
            .conns()
            .iter()
            .filter(|c| c.enabled && can_disable(genome, c))
            .map(|c| c.innovation)
            .collect();
        if let Some(&innovation) = candidates.choose(rng) {
            genome.set_enabled(innovation, false);
        }
    }
}

fn is_io(genome: &Genome, id: NodeId) -> bool {
    matches!(genome.role(id), Some(NodeRole::Input | NodeRole::Output))
}

fn can_disable(genome: &Genome, gene: &ConnGene) -> bool {
    let still_connected = |id: NodeId| {
        genome.conns().iter().any(|c| {
            c.enabled && c.innovation != gene.innovation && (c.from == id || c.to == id)
        })
    };
    [gene.from, gene.to]
        .into_iter()
        .all(|id| !is_io(genome, id) || still_connected(id))
}

/// Gives every input and output node lacking an enabled incident connection
/// one: input -> random output, or random input -> output. A matching
/// disabled gene is re-enabled rather than duplicated. Returns the number of
/// repairs made.
pub fn enforce_io_connectivity<R: Rng + ?Sized>(
    genome: &mut Genome,
    registry: &mut InnovationRegistry,
    weight_range: (f64, f64),
    rng: &mut R,
) -> usize {
    let io = genome.io();
    let mut repairs = 0;
    for id in genome.unconnected_io() {
        // A previous repair in this loop may already have fixed this node.
        if genome.conns().iter().any(|c| c.enabled && (c.from == id || c.to == id)) {
            continue;
        }
        let (from, to) = if genome.role(id) == Some(NodeRole::Input) {
            (id, io.output_id(rng.random_range(0..io.n_outputs)))
        } else {
            (rng.random_range(0..io.n_inputs) as NodeId, id)
        };
        let weight = rng.random_range(weight_range.0..=weight_range.1);
        if let Some(existing) = genome.conns().iter().find(|c| c.from == from && c.to == to) {
            let innovation = existing.innovation;
            genome.set_enabled(innovation, true);
        } else {
            genome.insert_conn(ConnGene {
                innovation: registry.connection(from, to),
                from,
                to,
                weight,
                enabled: true,
            });
        }
        repairs += 1;
    }
    repairs
}

/// Historical-marking crossover. Matching genes come from a uniformly
/// chosen parent, disjoint and excess genes from `fitter` only, so the child
/// has exactly `fitter`'s structure. I/O connectivity is repaired afterwards.
pub fn crossover<R: Rng + ?Sized>(
    fitter: &Genome,
    other: &Genome,
    registry: &mut InnovationRegistry,
    weight_range: (f64, f64),
    rng: &mut R,
) -> Genome {
    assert_eq!(fitter.kind(), other.kind(), "crossover between different topology kinds");
    let mut child = fitter.clone();
    let theirs = other.conns();
    let mut j = 0;
    for gene in child.conns_mut() {
        while j < theirs.len() && theirs[j].innovation < gene.innovation {
            j += 1;
        }
        if j < theirs.len() && theirs[j].innovation == gene.innovation && rng.random::<bool>() {
            gene.weight = theirs[j].weight;
            gene.enabled = theirs[j].enabled;
        }
    }
    enforce_io_connectivity(&mut child, registry, weight_range, rng);
    child
}
