//! Pairwise threshold clustering of a block.
//!
//! Every unordered pair of a block's publications is compared once. A pair
//! whose co-authorship distance is within the threshold is "true" and the two
//! publications end up in the same cluster, merging existing clusters where
//! needed. Publications that are never similar to anything stay singletons.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::gold::{Block, BlockSet};
use crate::graph::{order_bound, BfsScratch, BipartiteGraph, PubDistance};
use crate::{Error, Result};

/// Number of pairwise comparisons needed for all blocks: `sum m(m-1)/2`.
pub fn count_comparisons(bs: &BlockSet) -> u64 {
    bs.blocks().iter().map(|b| pair_count(b.m())).sum()
}

pub fn pair_count(m: usize) -> u64 {
    let m = m as u64;
    m * m.saturating_sub(1) / 2
}

/// Union-find with path halving and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            rank: alloc::vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns `false` if they were already one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if self.rank[ra] < self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi as u32;
        if self.rank[lo] == self.rank[hi] {
            self.rank[hi] += 1;
        }
        true
    }

    /// Root of every element, in element order.
    pub fn roots(&mut self) -> Vec<usize> {
        (0..self.len()).map(|i| self.find(i)).collect()
    }
}

/// A partition of one block's publications into predicted authors.
///
/// Clusters are numbered densely in order of their smallest record id, and a
/// cluster's id is that smallest record id. Two clusterings of the same
/// members into the same groups therefore compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    block_key: String,
    members: Vec<String>,
    labels: Vec<u32>,
    count: u32,
}

impl Clustering {
    /// Builds a clustering from arbitrary per-member group labels.
    /// `members` must be strictly ascending.
    pub fn from_labels<L: Ord + Copy>(
        block_key: impl Into<String>,
        members: Vec<String>,
        labels: &[L],
    ) -> Result<Self> {
        if members.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} members",
                labels.len(),
                members.len()
            )));
        }
        if !members.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "members must be strictly ascending".into(),
            ));
        }
        let mut dense: BTreeMap<L, u32> = BTreeMap::new();
        let labels = labels
            .iter()
            .map(|l| {
                let next = dense.len() as u32;
                *dense.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Clustering {
            block_key: block_key.into(),
            members,
            labels,
            count: dense.len() as u32,
        })
    }

    /// Every member of `block` in its own cluster.
    pub fn singletons(block: &Block) -> Self {
        let labels: Vec<usize> = (0..block.m()).collect();
        Self::from_labels(block.block_key(), block.members().to_vec(), &labels)
            .expect("block members are sorted")
    }

    /// The gold partition of `block`.
    pub fn gold(block: &Block) -> Self {
        let labels: Vec<&str> = block.gold_labels().iter().map(String::as_str).collect();
        Self::from_labels(block.block_key(), block.members().to_vec(), &labels)
            .expect("block members are sorted")
    }

    pub fn block_key(&self) -> &str {
        &self.block_key
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    /// Dense cluster index of each member, parallel to [`Clustering::members`].
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn cluster_count(&self) -> usize {
        self.count as usize
    }

    pub fn position(&self, record_id: &str) -> Option<usize> {
        self.members
            .binary_search_by(|m| m.as_str().cmp(record_id))
            .ok()
    }

    /// Cluster id (smallest record id of the cluster) of a member.
    pub fn cluster_id_of(&self, record_id: &str) -> Option<&str> {
        let label = self.labels[self.position(record_id)?];
        Some(self.cluster_id(label))
    }

    /// Id of dense cluster `label`.
    pub fn cluster_id(&self, label: u32) -> &str {
        // Labels are assigned in member order, so the first hit is the smallest id.
        let first = self
            .labels
            .iter()
            .position(|&l| l == label)
            .expect("label in range");
        &self.members[first]
    }

    /// Member indices of every cluster, clusters in label order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.cluster_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// `(record_id, cluster_id)` for every member.
    pub fn assignment(&self) -> Vec<(&str, &str)> {
        let ids: Vec<&str> = self
            .clusters()
            .iter()
            .map(|c| self.members[c[0]].as_str())
            .collect();
        self.members
            .iter()
            .zip(&self.labels)
            .map(|(m, &l)| (m.as_str(), ids[l as usize]))
            .collect()
    }

    /// Whether every cluster of `finer` lies inside one cluster of `self`.
    pub fn is_coarsening_of(&self, finer: &Clustering) -> bool {
        if self.members != finer.members {
            return false;
        }
        let mut image: Vec<Option<u32>> = alloc::vec![None; finer.cluster_count()];
        for (&fine, &coarse) in finer.labels.iter().zip(&self.labels) {
            match image[fine as usize] {
                None => image[fine as usize] = Some(coarse),
                Some(c) if c != coarse => return false,
                Some(_) => {}
            }
        }
        true
    }
}

/// Bounded neighbourhoods of a block's members inside the corpus network,
/// restricted to other members of the same block.
#[derive(Debug, Clone)]
pub struct BlockDistances {
    max_order: u32,
    /// For each member: `(other member, minimal order)` sorted by member.
    rows: Vec<Vec<(u32, u32)>>,
}

impl BlockDistances {
    /// Runs one BFS per member, up to co-author order `max_order`, with the
    /// block's own name excluded.
    pub fn compute(
        block: &Block,
        graph: &BipartiteGraph,
        max_order: u32,
        scratch: &mut BfsScratch,
    ) -> Result<Self> {
        let index: Vec<u32> = block
            .members()
            .iter()
            .map(|id| {
                graph
                    .pub_index(id)
                    .ok_or_else(|| Error::UnknownPublication(id.clone()))
            })
            .collect::<Result<_>>()?;
        // Members and publication indices are both in record id order.
        let excluded = graph.author_index(block.block_key());
        let rows = index
            .iter()
            .map(|&p| {
                let mut row: Vec<(u32, u32)> = graph
                    .neighborhood_with(scratch, p, max_order, excluded)
                    .into_iter()
                    .filter_map(|(q, order)| {
                        index.binary_search(&q).ok().map(|j| (j as u32, order))
                    })
                    .collect();
                row.sort_unstable();
                row
            })
            .collect();
        Ok(BlockDistances { max_order, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Distance between members `i` and `j`, infinite beyond the bound.
    pub fn distance(&self, i: usize, j: usize) -> PubDistance {
        let row = &self.rows[i];
        match row.binary_search_by(|&(m, _)| m.cmp(&(j as u32))) {
            Ok(k) => PubDistance::from_order(row[k].1),
            Err(_) => PubDistance::Infinite,
        }
    }

    /// Finite-distance neighbours of member `i` with their orders.
    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }
}

/// Compares all unordered pairs `(i, j)`, `i < j`, in row-major order and
/// merges every pair for which `similar` holds. Returns the resulting
/// clustering and the number of comparisons made.
pub fn cluster_pairs<F>(
    block_key: &str,
    members: &[String],
    mut similar: F,
) -> Result<(Clustering, u64)>
where
    F: FnMut(usize, usize) -> Result<bool>,
{
    let m = members.len();
    let mut sets = DisjointSet::new(m);
    let mut comparisons = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            comparisons += 1;
            if similar(i, j)? {
                sets.union(i, j);
            }
        }
    }
    let clustering = Clustering::from_labels(block_key, members.to_vec(), &sets.roots())?;
    Ok((clustering, comparisons))
}

fn check_threshold(threshold: u32) -> Result<()> {
    if threshold == 0 || threshold.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be odd and at least 1, got {threshold}"
        )));
    }
    Ok(())
}

/// Clusters a block: two publications are merged when their distance, with
/// the block's name excluded, is at most `threshold`.
pub fn cluster_block(block: &Block, graph: &BipartiteGraph, threshold: u32) -> Result<Clustering> {
    cluster_block_counted(block, graph, threshold, &mut BfsScratch::new()).map(|(c, _)| c)
}

/// [`cluster_block`] with caller-provided scratch, also returning the number
/// of pairwise comparisons (always `m(m-1)/2`).
pub fn cluster_block_counted(
    block: &Block,
    graph: &BipartiteGraph,
    threshold: u32,
    scratch: &mut BfsScratch,
) -> Result<(Clustering, u64)> {
    check_threshold(threshold)?;
    let distances = BlockDistances::compute(block, graph, order_bound(threshold), scratch)?;
    cluster_pairs(block.block_key(), block.members(), |i, j| {
        Ok(distances.distance(i, j).within(threshold))
    })
}
