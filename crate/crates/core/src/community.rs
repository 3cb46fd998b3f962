//! Weighted publication similarity graphs and Louvain modularity
//! optimisation.
//!
//! Publications of a block are linked with weight 2 when they share a
//! co-author and weight 1 when the closest link is a co-author of a
//! co-author. Louvain then splits threshold clusters whose halves are only
//! held together by a few such links.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::{BlockDistances, Clustering};
use crate::gold::Block;
use crate::graph::{BfsScratch, BipartiteGraph};
use crate::{Error, Result};

pub const SHARED_COAUTHOR_WEIGHT: f64 = 2.0;
pub const SECOND_ORDER_WEIGHT: f64 = 1.0;

/// Undirected weighted graph over one block's publications.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPubGraph {
    nodes: Vec<String>,
    adj: Vec<Vec<(u32, f64)>>,
    total_weight: f64,
}

impl WeightedPubGraph {
    /// Builds a graph from `(i, j, weight)` edges over `nodes`. Self loops,
    /// repeated pairs and non-positive weights are rejected.
    pub fn from_edges<I>(nodes: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = nodes.len();
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        let mut total_weight = 0.0;
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) out of range"
                )));
            }
            if i == j {
                return Err(Error::InvalidArgument(format!("self loop on node {i}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "edge weight {w} must be positive"
                )));
            }
            adj[i].push((j as u32, w));
            adj[j].push((i as u32, w));
            total_weight += w;
        }
        for row in &mut adj {
            row.sort_by_key(|e| e.0);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidArgument("repeated edge".into()));
            }
        }
        Ok(WeightedPubGraph {
            nodes,
            adj,
            total_weight,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.adj[i]
    }

    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }

    /// Edge weight between `i` and `j`, if any.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let row = &self.adj[i];
        row.binary_search_by(|&(k, _)| k.cmp(&(j as u32)))
            .ok()
            .map(|k| row[k].1)
    }

    /// Edges as `(i, j, weight)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| (j as usize) > i)
                .map(move |&(j, w)| (i, j as usize, w))
        })
    }
}

/// Links every pair of block members at co-author order 1 (weight 2) or
/// order 2 (weight 1), with the block's name excluded from paths.
pub fn build_similarity_graph(block: &Block, graph: &BipartiteGraph) -> Result<WeightedPubGraph> {
    build_similarity_graph_with(block, graph, &mut BfsScratch::new())
}

pub fn build_similarity_graph_with(
    block: &Block,
    graph: &BipartiteGraph,
    scratch: &mut BfsScratch,
) -> Result<WeightedPubGraph> {
    let distances = BlockDistances::compute(block, graph, 2, scratch)?;
    let edges = (0..distances.len()).flat_map(|i| {
        distances
            .row(i)
            .iter()
            .filter(move |&&(j, _)| j as usize > i)
            .map(move |&(j, order)| {
                let w = if order == 1 {
                    SHARED_COAUTHOR_WEIGHT
                } else {
                    SECOND_ORDER_WEIGHT
                };
                (i, j as usize, w)
            })
    });
    WeightedPubGraph::from_edges(block.members().to_vec(), edges)
}

/// Community of every node, numbered densely from 0 in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<u32>,
}

impl Partition {
    pub fn from_labels<L: Ord + Copy>(labels: &[L]) -> Self {
        let mut seen: Vec<(L, u32)> = Vec::new();
        let assignment = labels
            .iter()
            .map(|l| match seen.iter().find(|(k, _)| k == l) {
                Some(&(_, id)) => id,
                None => {
                    let id = seen.len() as u32;
                    seen.push((*l, id));
                    id
                }
            })
            .collect();
        Partition { assignment }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n as u32).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
        }
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&m| m as usize + 1)
    }
}

/// Weighted modularity with resolution `γ` on the null-model term:
/// `Q = Σ_c [ W_in(c) / W − γ (S(c) / 2W)² ]`.
pub fn modularity(g: &WeightedPubGraph, p: &Partition, resolution: f64) -> Result<f64> {
    if p.len() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "partition of {} nodes for a graph of {}",
            p.len(),
            g.node_count()
        )));
    }
    if g.total_weight <= 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let k = p.community_count();
    let mut inside = vec![0.0; k];
    let mut strength = vec![0.0; k];
    for (i, row) in g.adj.iter().enumerate() {
        let c = p.assignment[i] as usize;
        for &(j, w) in row {
            strength[c] += w;
            if p.assignment[j as usize] as usize == c {
                inside[c] += w / 2.0;
            }
        }
    }
    Ok(level_modularity(
        &inside,
        &strength,
        g.total_weight,
        resolution,
    ))
}

fn level_modularity(inside: &[f64], strength: &[f64], total: f64, resolution: f64) -> f64 {
    let two_w = 2.0 * total;
    inside
        .iter()
        .zip(strength)
        .map(|(&w_in, &s)| w_in / total - resolution * (s / two_w) * (s / two_w))
        .sum()
}

/// Order in which local moving visits nodes on the first run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeOrder {
    /// Ascending record id.
    #[default]
    SortedId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LouvainConfig {
    pub resolution: f64,
    /// Upper bound on coarsening levels.
    pub max_passes: usize,
    pub node_order: NodeOrder,
    /// Seeds the node orders of the restarts.
    pub seed: u64,
    /// Extra runs with shuffled node orders; the partition with the highest
    /// modularity wins, earlier runs winning ties.
    pub restarts: usize,
    /// After the last level, move single nodes once more starting from the
    /// projected partition.
    pub refine_final: bool,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            resolution: 1.0,
            max_passes: 100,
            node_order: NodeOrder::SortedId,
            seed: 0,
            restarts: 16,
            refine_final: true,
        }
    }
}

impl LouvainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidArgument(
                "max_passes must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a Louvain run with its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainOutcome {
    pub partition: Partition,
    /// Coarsening levels that moved at least one node.
    pub passes: usize,
    /// Modularity of the singleton start followed by the value after each
    /// improving level (and after the final refinement, if it moved nodes).
    /// Empty for edgeless graphs.
    pub q_trace: Vec<f64>,
}

impl LouvainOutcome {
    pub fn modularity(&self) -> Option<f64> {
        self.q_trace.last().copied()
    }
}

/// One coarsening level. Self loops carry the weight internal to the merged
/// node; degrees count them twice.
struct Level {
    adj: Vec<Vec<(u32, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn base(g: &WeightedPubGraph) -> Self {
        let degree = (0..g.node_count()).map(|i| g.weighted_degree(i)).collect();
        Level {
            adj: g.adj.clone(),
            self_loop: vec![0.0; g.node_count()],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses communities (dense labels) into single nodes.
    fn aggregate(&self, comm: &[u32], count: usize) -> Level {
        let mut self_loop = vec![0.0; count];
        let mut degree = vec![0.0; count];
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); count];
        for i in 0..self.len() {
            let c = comm[i] as usize;
            self_loop[c] += self.self_loop[i];
            degree[c] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let d = comm[j as usize];
                if d as usize == c {
                    self_loop[c] += w / 2.0;
                } else {
                    rows[c].push((d, w));
                }
            }
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
            for &(d, w) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == d => last.1 += w,
                    _ => merged.push((d, w)),
                }
            }
            *row = merged;
        }
        Level {
            adj: rows,
            self_loop,
            degree,
        }
    }

    fn modularity(&self, comm: &[u32], total: f64, resolution: f64) -> f64 {
        let k = comm.iter().max().map_or(0, |&m| m as usize + 1);
        let mut inside = vec![0.0; k];
        let mut strength = vec![0.0; k];
        for i in 0..self.len() {
            let c = comm[i] as usize;
            inside[c] += self.self_loop[i];
            strength[c] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                if comm[j as usize] as usize == c {
                    inside[c] += w / 2.0;
                }
            }
        }
        level_modularity(&inside, &strength, total, resolution)
    }

    /// Greedy single-node moves until a full sweep changes nothing. Returns
    /// whether any node moved.
    ///
    /// Moving node `i` into community `d` changes `Q` by a constant plus
    /// `(w_id − γ·S_d·k_i / 2W) / W`, so candidates are ranked by the bracket.
    /// A node only leaves its community for a strictly better one; among
    /// equally good targets the lowest community id wins.
    fn local_moving(&self, comm: &mut [u32], order: &[u32], total: f64, resolution: f64) -> bool {
        let n = self.len();
        let two_w = 2.0 * total;
        let mut strength = vec![0.0; n];
        for i in 0..n {
            strength[comm[i] as usize] += self.degree[i];
        }
        let mut link = vec![0.0; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in order {
                let i = i as usize;
                let k_i = self.degree[i];
                if k_i == 0.0 {
                    continue;
                }
                let own = comm[i];
                strength[own as usize] -= k_i;
                for &(j, w) in &self.adj[i] {
                    let c = comm[j as usize];
                    if link[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    link[c as usize] += w;
                }
                touched.sort_unstable();
                let score = |c: u32, link: &[f64]| {
                    link[c as usize] - resolution * strength[c as usize] * k_i / two_w
                };
                let eps = 1e-12 * k_i.max(1.0);
                let mut best = own;
                let mut best_score = score(own, &link);
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let s = score(c, &link);
                    let better = if best == own {
                        s > best_score + eps
                    } else {
                        s > best_score + eps || (s >= best_score - eps && c < best)
                    };
                    if better {
                        best = c;
                        best_score = s;
                    }
                }
                for &c in &touched {
                    link[c as usize] = 0.0;
                }
                touched.clear();
                strength[best as usize] += k_i;
                if best != own {
                    comm[i] = best;
                    moved = true;
                }
            }
            if !moved {
                return moved_any;
            }
            moved_any = true;
        }
    }
}

/// Renumbers labels densely in order of first appearance.
fn densify(labels: &mut [u32]) -> usize {
    let mut map = vec![u32::MAX; labels.len()];
    let mut next = 0u32;
    for l in labels.iter_mut() {
        let slot = &mut map[*l as usize];
        if *slot == u32::MAX {
            *slot = next;
            next += 1;
        }
        *l = *slot;
    }
    next as usize
}

/// Multi-level Louvain: local moving to convergence, then aggregation of
/// communities into nodes, repeated until a level moves nothing. The first
/// run visits nodes in index order; `cfg.restarts` further runs use seeded
/// shuffles and replace it only with strictly higher modularity.
pub fn louvain(g: &WeightedPubGraph, cfg: &LouvainConfig) -> Result<Partition> {
    louvain_detailed(g, cfg).map(|o| o.partition)
}

pub fn louvain_detailed(g: &WeightedPubGraph, cfg: &LouvainConfig) -> Result<LouvainOutcome> {
    cfg.validate()?;
    let n = g.node_count();
    if g.total_weight <= 0.0 {
        return Ok(LouvainOutcome {
            partition: Partition::singletons(n),
            passes: 0,
            q_trace: Vec::new(),
        });
    }
    let base = Level::base(g);
    let mut best = run_levels(&base, g.total_weight, cfg, None);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let candidate = run_levels(&base, g.total_weight, cfg, Some(&mut rng));
        let (q_best, q_new) = (best.modularity(), candidate.modularity());
        if q_new
            .zip(q_best)
            .is_some_and(|(new, old)| new > old + 1e-12)
        {
            best = candidate;
        }
    }
    Ok(best)
}

fn visiting_order(n: usize, rng: &mut Option<&mut ChaCha8Rng>) -> Vec<u32> {
    let mut order: Vec<u32> = (0..n as u32).collect();
    if let Some(rng) = rng {
        order.shuffle(*rng);
    }
    order
}

/// One full multi-level run. Without `rng` nodes are visited in index order.
fn run_levels(
    base: &Level,
    total: f64,
    cfg: &LouvainConfig,
    mut rng: Option<&mut ChaCha8Rng>,
) -> LouvainOutcome {
    let gamma = cfg.resolution;
    let n = base.len();
    let mut node_comm: Vec<u32> = (0..n as u32).collect();
    let mut q_trace = vec![base.modularity(&node_comm, total, gamma)];
    let mut passes = 0;

    let mut coarse: Option<Level> = None;
    while passes < cfg.max_passes {
        let level = coarse.as_ref().unwrap_or(base);
        let mut comm: Vec<u32> = (0..level.len() as u32).collect();
        let order = visiting_order(level.len(), &mut rng);
        if !level.local_moving(&mut comm, &order, total, gamma) {
            break;
        }
        passes += 1;
        let count = densify(&mut comm);
        for c in node_comm.iter_mut() {
            *c = comm[*c as usize];
        }
        q_trace.push(base.modularity(&node_comm, total, gamma));
        coarse = Some(level.aggregate(&comm, count));
    }

    let order = visiting_order(n, &mut rng);
    if cfg.refine_final && base.local_moving(&mut node_comm, &order, total, gamma) {
        densify(&mut node_comm);
        q_trace.push(base.modularity(&node_comm, total, gamma));
    }

    LouvainOutcome {
        partition: Partition::from_labels(&node_comm),
        passes,
        q_trace,
    }
}

/// Summary of one block refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub clustering: Clustering,
    /// Modularity of the base clustering on the similarity graph.
    pub q_before: Option<f64>,
    pub q_after: Option<f64>,
    pub passes: usize,
    pub communities: usize,
}

/// Replaces the threshold-3 clusters of `base` by Louvain communities of the
/// block's weighted similarity graph.
pub fn refine_clustering(
    block: &Block,
    base: &Clustering,
    graph: &BipartiteGraph,
    cfg: &LouvainConfig,
) -> Result<Clustering> {
    refine_clustering_detailed(block, base, graph, cfg, &mut BfsScratch::new())
        .map(|r| r.clustering)
}

pub fn refine_clustering_detailed(
    block: &Block,
    base: &Clustering,
    graph: &BipartiteGraph,
    cfg: &LouvainConfig,
    scratch: &mut BfsScratch,
) -> Result<Refinement> {
    if base.members() != block.members() {
        return Err(Error::InvalidArgument(format!(
            "base clustering does not cover block {:?}",
            block.block_key()
        )));
    }
    let sim = build_similarity_graph_with(block, graph, scratch)?;
    let outcome = louvain_detailed(&sim, cfg)?;
    let q_before = modularity(&sim, &Partition::from_labels(base.labels()), cfg.resolution).ok();
    let clustering = Clustering::from_labels(
        block.block_key(),
        block.members().to_vec(),
        outcome.partition.assignment(),
    )?;
    Ok(Refinement {
        communities: clustering.cluster_count(),
        q_after: outcome.modularity(),
        q_before,
        passes: outcome.passes,
        clustering,
    })
}
