//! Bipartite author/publication network and bounded distance queries.
//!
//! Distances follow the convention of counting the nodes strictly between two
//! publications on a shortest path. Paths alternate publication and author
//! nodes, so every finite distance is odd: `1` for a shared co-author, `3`
//! for a co-author of a co-author. The *co-author order* `k = (d + 1) / 2`
//! counts publication hops instead.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::mention::RawRecord;
use crate::{Error, Result};

/// Length of a shortest publication-to-publication path, counted in
/// intermediate nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PubDistance {
    Finite(u32),
    Infinite,
}

impl PubDistance {
    pub fn from_order(order: u32) -> PubDistance {
        PubDistance::Finite(2 * order - 1)
    }

    /// Co-author order `(d + 1) / 2` of a finite distance.
    pub fn order(self) -> Option<u32> {
        match self {
            PubDistance::Finite(d) => Some(d.div_ceil(2)),
            PubDistance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, PubDistance::Finite(_))
    }

    /// `d <= threshold`; infinite distances never qualify.
    pub fn within(self, threshold: u32) -> bool {
        matches!(self, PubDistance::Finite(d) if d <= threshold)
    }
}

impl fmt::Display for PubDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PubDistance::Finite(d) => write!(f, "{d}"),
            PubDistance::Infinite => f.write_str("inf"),
        }
    }
}

/// Largest co-author order reachable within node-distance `max_d`.
pub fn order_bound(max_d: u32) -> u32 {
    max_d.div_ceil(2)
}

/// Author/publication network over a whole corpus.
///
/// Nodes are addressed by dense indices: publications in record id order and
/// authors in name order. Both adjacency directions are stored as compressed
/// rows sorted by neighbour index, which fixes the BFS visitation order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BipartiteGraph {
    pubs: Vec<String>,
    authors: Vec<String>,
    pub_offsets: Vec<u32>,
    pub_authors: Vec<u32>,
    author_offsets: Vec<u32>,
    author_pubs: Vec<u32>,
}

/// Flat representation used by on-disk snapshots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphParts {
    pub pubs: Vec<String>,
    pub authors: Vec<String>,
    /// `(publication index, author index)` pairs.
    pub edges: Vec<(u32, u32)>,
}

impl BipartiteGraph {
    /// Builds the network from parsed records.
    ///
    /// Only records that take part in co-authorship are used (at least one
    /// author, not a home page). Authors are keyed by surface name, so any
    /// gold suffix is ignored and homonyms share one node.
    pub fn build<'a, I>(records: I) -> BipartiteGraph
    where
        I: IntoIterator<Item = &'a RawRecord>,
    {
        let mut rows: Vec<(&'a str, Vec<&'a str>)> = Vec::new();
        let mut names: BTreeSet<&'a str> = BTreeSet::new();
        for record in records {
            if !record.in_network() {
                continue;
            }
            let row: Vec<&str> = record
                .mentions
                .iter()
                .map(|m| m.surface_name.as_str())
                .collect();
            names.extend(row.iter().copied());
            rows.push((record.record_id.as_str(), row));
        }
        rows.sort_by(|a, b| a.0.cmp(b.0));

        let authors: Vec<String> = names.into_iter().map(String::from).collect();
        let mut pubs: Vec<String> = Vec::with_capacity(rows.len());
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (id, row) in &rows {
            if pubs.last().map(String::as_str) != Some(*id) {
                pubs.push(String::from(*id));
            }
            let p = (pubs.len() - 1) as u32;
            for name in row {
                let a = authors
                    .binary_search_by(|x| x.as_str().cmp(name))
                    .expect("interned above") as u32;
                edges.push((p, a));
            }
        }
        Self::assemble(pubs, authors, edges)
    }

    fn assemble(pubs: Vec<String>, authors: Vec<String>, mut edges: Vec<(u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let (pub_offsets, pub_authors) = compress(pubs.len(), edges.iter().copied());
        let mut flipped: Vec<(u32, u32)> = edges.iter().map(|&(p, a)| (a, p)).collect();
        flipped.sort_unstable();
        let (author_offsets, author_pubs) = compress(authors.len(), flipped.into_iter());
        BipartiteGraph {
            pubs,
            authors,
            pub_offsets,
            pub_authors,
            author_offsets,
            author_pubs,
        }
    }

    /// Rebuilds a graph from snapshot parts, checking sortedness and bounds.
    pub fn from_parts(parts: GraphParts) -> Result<Self> {
        let sorted = |v: &[String]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&parts.pubs) || !sorted(&parts.authors) {
            return Err(Error::InvalidArgument(
                "node tables must be strictly sorted".into(),
            ));
        }
        let (np, na) = (parts.pubs.len() as u32, parts.authors.len() as u32);
        if let Some(&(p, a)) = parts.edges.iter().find(|&&(p, a)| p >= np || a >= na) {
            return Err(Error::InvalidArgument(format!(
                "edge ({p}, {a}) out of range"
            )));
        }
        Ok(Self::assemble(parts.pubs, parts.authors, parts.edges))
    }

    pub fn to_parts(&self) -> GraphParts {
        let edges = (0..self.pubs.len() as u32)
            .flat_map(|p| self.authors_of(p).iter().map(move |&a| (p, a)))
            .collect();
        GraphParts {
            pubs: self.pubs.clone(),
            authors: self.authors.clone(),
            edges,
        }
    }

    pub fn pub_count(&self) -> usize {
        self.pubs.len()
    }

    pub fn author_count(&self) -> usize {
        self.authors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.pub_authors.len()
    }

    pub fn pub_index(&self, record_id: &str) -> Option<u32> {
        self.pubs
            .binary_search_by(|p| p.as_str().cmp(record_id))
            .ok()
            .map(|i| i as u32)
    }

    pub fn author_index(&self, name: &str) -> Option<u32> {
        self.authors
            .binary_search_by(|a| a.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    pub fn pub_id(&self, index: u32) -> &str {
        &self.pubs[index as usize]
    }

    pub fn author_name(&self, index: u32) -> &str {
        &self.authors[index as usize]
    }

    pub fn authors_of(&self, pub_index: u32) -> &[u32] {
        let i = pub_index as usize;
        &self.pub_authors[self.pub_offsets[i] as usize..self.pub_offsets[i + 1] as usize]
    }

    pub fn pubs_of(&self, author_index: u32) -> &[u32] {
        let i = author_index as usize;
        &self.author_pubs[self.author_offsets[i] as usize..self.author_offsets[i + 1] as usize]
    }

    fn require_pub(&self, record_id: &str) -> Result<u32> {
        self.pub_index(record_id)
            .ok_or_else(|| Error::UnknownPublication(record_id.into()))
    }

    /// Shortest distance between two publications, ignoring the node of
    /// `excluded_author`. Returns [`PubDistance::Infinite`] when no path of at
    /// most `max_d` intermediate nodes exists.
    pub fn pub_distance(
        &self,
        p1: &str,
        p2: &str,
        max_d: u32,
        excluded_author: &str,
    ) -> Result<PubDistance> {
        let (a, b) = (self.require_pub(p1)?, self.require_pub(p2)?);
        if a == b {
            return Err(Error::InvalidArgument(format!(
                "distance of {p1:?} to itself"
            )));
        }
        let excluded = self.author_index(excluded_author);
        let mut scratch = BfsScratch::new();
        Ok(self.distance_with(&mut scratch, a, b, max_d, excluded))
    }

    /// Index-level [`BipartiteGraph::pub_distance`] with reusable scratch.
    pub fn distance_with(
        &self,
        scratch: &mut BfsScratch,
        from: u32,
        to: u32,
        max_d: u32,
        excluded: Option<u32>,
    ) -> PubDistance {
        let mut found = PubDistance::Infinite;
        self.bfs(scratch, from, order_bound(max_d), excluded, |q, order| {
            if q == to {
                found = PubDistance::from_order(order);
                false
            } else {
                true
            }
        });
        found
    }

    /// Every publication within co-author order `k` of `p` (node-distance at
    /// most `2k - 1`), mapped to its minimal order.
    pub fn pubs_within(
        &self,
        p: &str,
        k: u32,
        excluded_author: &str,
    ) -> Result<BTreeMap<String, u32>> {
        let from = self.require_pub(p)?;
        let excluded = self.author_index(excluded_author);
        let mut scratch = BfsScratch::new();
        Ok(self
            .neighborhood_with(&mut scratch, from, k, excluded)
            .into_iter()
            .map(|(q, order)| (self.pubs[q as usize].clone(), order))
            .collect())
    }

    /// Index-level [`BipartiteGraph::pubs_within`]: `(publication, order)` in
    /// BFS visitation order.
    pub fn neighborhood_with(
        &self,
        scratch: &mut BfsScratch,
        from: u32,
        k: u32,
        excluded: Option<u32>,
    ) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        self.bfs(scratch, from, k, excluded, |q, order| {
            out.push((q, order));
            true
        });
        out
    }

    /// Layered BFS over publication hops. `visit` is called once per newly
    /// reached publication with its order; returning `false` stops the search.
    fn bfs<F>(
        &self,
        scratch: &mut BfsScratch,
        from: u32,
        max_order: u32,
        excluded: Option<u32>,
        mut visit: F,
    ) where
        F: FnMut(u32, u32) -> bool,
    {
        scratch.reset(self.pubs.len(), self.authors.len());
        scratch.mark_pub(from);
        let mut frontier = alloc::vec![from];
        let mut next = Vec::new();
        for order in 1..=max_order {
            for &q in &frontier {
                for &a in self.authors_of(q) {
                    if Some(a) == excluded || !scratch.mark_author(a) {
                        continue;
                    }
                    for &r in self.pubs_of(a) {
                        if scratch.mark_pub(r) {
                            if !visit(r, order) {
                                return;
                            }
                            next.push(r);
                        }
                    }
                }
            }
            if next.is_empty() {
                return;
            }
            core::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
    }
}

fn compress(rows: usize, pairs: impl Iterator<Item = (u32, u32)>) -> (Vec<u32>, Vec<u32>) {
    let mut offsets = alloc::vec![0u32; rows + 1];
    let mut targets = Vec::new();
    for (row, target) in pairs {
        offsets[row as usize + 1] += 1;
        targets.push(target);
    }
    for i in 0..rows {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}

/// Visited marks for repeated BFS runs over one graph.
///
/// Marks are epoch stamps, so resetting between searches is O(1) once the
/// tables are sized.
#[derive(Debug, Clone, Default)]
pub struct BfsScratch {
    pub_seen: Vec<u32>,
    author_seen: Vec<u32>,
    epoch: u32,
}

impl BfsScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, pubs: usize, authors: usize) {
        if self.pub_seen.len() < pubs {
            self.pub_seen.resize(pubs, 0);
        }
        if self.author_seen.len() < authors {
            self.author_seen.resize(authors, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.pub_seen.iter_mut().for_each(|s| *s = 0);
            self.author_seen.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    fn mark_pub(&mut self, p: u32) -> bool {
        let slot = &mut self.pub_seen[p as usize];
        let fresh = *slot != self.epoch;
        *slot = self.epoch;
        fresh
    }

    fn mark_author(&mut self, a: u32) -> bool {
        let slot = &mut self.author_seen[a as usize];
        let fresh = *slot != self.epoch;
        *slot = self.epoch;
        fresh
    }
}
