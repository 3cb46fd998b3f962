//! Brute-force reference implementations used to check the library.
//!
//! Nothing here calls into the algorithms under test; every routine works
//! from plain adjacency data with the most direct method available.
#![allow(dead_code, clippy::needless_range_loop, clippy::too_many_arguments)]

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// BCubed triple of item `e` by explicit pair counting over all items.
pub fn bcubed_item(pred: &[usize], gold: &[usize], e: usize, alpha: f64) -> (f64, f64, f64) {
    let (mut same_cluster, mut same_class, mut correct) = (0usize, 0usize, 0usize);
    for other in 0..pred.len() {
        let c = pred[other] == pred[e];
        let g = gold[other] == gold[e];
        same_cluster += c as usize;
        same_class += g as usize;
        correct += (c && g) as usize;
    }
    let p = correct as f64 / same_cluster as f64;
    let r = correct as f64 / same_class as f64;
    let f = if p == 0.0 || r == 0.0 {
        0.0
    } else {
        1.0 / (alpha / p + (1.0 - alpha) / r)
    };
    (p, r, f)
}

/// Mean item triple of a block.
pub fn bcubed_block(pred: &[usize], gold: &[usize], alpha: f64) -> (f64, f64, f64) {
    let n = pred.len() as f64;
    let mut sum = (0.0, 0.0, 0.0);
    for e in 0..pred.len() {
        let (p, r, f) = bcubed_item(pred, gold, e, alpha);
        sum.0 += p;
        sum.1 += r;
        sum.2 += f;
    }
    (sum.0 / n, sum.1 / n, sum.2 / n)
}

/// A toy corpus: publication id -> author names.
#[derive(Debug, Clone)]
pub struct ToyCorpus {
    pub pubs: Vec<(String, Vec<String>)>,
}

impl ToyCorpus {
    /// `n_pubs` publications; the first `focal_pubs` carry `focal`, with an
    /// embedded gold suffix chosen from `gold_authors` identities. Every
    /// publication gets up to `max_coauthors` names from a pool of `pool`.
    pub fn random(
        rng: &mut impl Rng,
        n_pubs: usize,
        focal_pubs: usize,
        gold_authors: usize,
        pool: usize,
        max_coauthors: usize,
    ) -> Self {
        let pubs = (0..n_pubs)
            .map(|i| {
                let mut names: Vec<String> = Vec::new();
                if i < focal_pubs {
                    names.push(format!(
                        "Focal Name {:04}",
                        rng.random_range(1..=gold_authors)
                    ));
                }
                let k = rng.random_range(0..=max_coauthors);
                for _ in 0..k {
                    names.push(format!("Co {}", letters(rng.random_range(0..pool))));
                }
                (format!("pub{i:04}"), names)
            })
            .collect();
        ToyCorpus { pubs }
    }

    pub fn surface(name: &str) -> String {
        let b = name.as_bytes();
        if b.len() > 5 && b[b.len() - 5] == b' ' && b[b.len() - 4..].iter().all(u8::is_ascii_digit)
        {
            name[..name.len() - 5].to_string()
        } else {
            name.to_string()
        }
    }
}

pub fn letters(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (i % 26) as u8);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    String::from_utf8(s).unwrap()
}

/// Explicit node graph over publications and authors, searched by plain BFS.
pub struct ExplicitGraph {
    /// node -> neighbours; nodes are "P:<id>" and "A:<name>".
    adj: HashMap<String, Vec<String>>,
}

impl ExplicitGraph {
    pub fn new(corpus: &ToyCorpus) -> Self {
        let mut adj: HashMap<String, Vec<String>> = HashMap::new();
        for (id, names) in &corpus.pubs {
            if names.is_empty() {
                continue;
            }
            let p = format!("P:{id}");
            adj.entry(p.clone()).or_default();
            let distinct: HashSet<String> = names.iter().map(|n| ToyCorpus::surface(n)).collect();
            for n in distinct {
                let a = format!("A:{n}");
                adj.get_mut(&p).unwrap().push(a.clone());
                adj.entry(a).or_default().push(p.clone());
            }
        }
        ExplicitGraph { adj }
    }

    pub fn has_pub(&self, id: &str) -> bool {
        self.adj.contains_key(&format!("P:{id}"))
    }

    /// Intermediate-node counts from `id` to every reachable publication,
    /// never entering the excluded author node.
    pub fn distances_from(&self, id: &str, excluded: &str) -> HashMap<String, usize> {
        let banned = format!("A:{excluded}");
        let start = format!("P:{id}");
        let mut hops: HashMap<String, usize> = HashMap::new();
        hops.insert(start.clone(), 0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let d = hops[&u];
            for v in &self.adj[&u] {
                if *v == banned || hops.contains_key(v) {
                    continue;
                }
                hops.insert(v.clone(), d + 1);
                queue.push_back(v.clone());
            }
        }
        hops.into_iter()
            .filter_map(|(node, edges)| {
                let pid = node.strip_prefix("P:")?;
                (pid != id).then(|| (pid.to_string(), edges - 1))
            })
            .collect()
    }
}

/// Connected components of the relation `related(i, j)` over `n` items by
/// depth-first transitive closure; returns a component label per item.
pub fn closure_components(n: usize, related: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if label[v] == usize::MAX && v != u && (related(u, v) || related(v, u)) {
                    label[v] = s;
                    stack.push(v);
                }
            }
        }
    }
    label
}

/// Whether two labelings describe the same grouping.
pub fn same_partition<A: Eq + std::hash::Hash + Copy, B: Eq + std::hash::Hash + Copy>(
    a: &[A],
    b: &[B],
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ab: HashMap<A, B> = HashMap::new();
    let mut ba: HashMap<B, A> = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

/// Dense symmetric weight matrix.
#[derive(Debug, Clone)]
pub struct DenseGraph {
    pub w: Vec<Vec<f64>>,
}

impl DenseGraph {
    pub fn new(n: usize) -> Self {
        DenseGraph {
            w: vec![vec![0.0; n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn add(&mut self, i: usize, j: usize, weight: f64) {
        self.w[i][j] += weight;
        self.w[j][i] += weight;
    }

    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.w[i][j] > 0.0 {
                    out.push((i, j, self.w[i][j]));
                }
            }
        }
        out
    }

    /// `Q = 1/(2W) Σ_ij [A_ij − γ k_i k_j / 2W] δ(c_i, c_j)` by double loop.
    pub fn modularity(&self, labels: &[usize], gamma: f64) -> f64 {
        let n = self.n();
        let k: Vec<f64> = self.w.iter().map(|row| row.iter().sum()).collect();
        let two_w: f64 = k.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    q += self.w[i][j] - gamma * k[i] * k[j] / two_w;
                }
            }
        }
        q / two_w
    }

    /// Maximum modularity over every set partition (restricted growth
    /// strings), with its labeling.
    pub fn exhaustive_max(&self, gamma: f64) -> (f64, Vec<usize>) {
        let n = self.n();
        let k: Vec<f64> = self.w.iter().map(|row| row.iter().sum()).collect();
        let two_w: f64 = k.iter().sum();
        let mut best = (f64::NEG_INFINITY, vec![0; n]);
        let mut labels = vec![0usize; n];
        let mut inside = vec![0.0f64; n];
        let mut strength = vec![0.0f64; n];
        fn rec(
            g: &DenseGraph,
            k: &[f64],
            two_w: f64,
            gamma: f64,
            i: usize,
            used: usize,
            labels: &mut Vec<usize>,
            inside: &mut Vec<f64>,
            strength: &mut Vec<f64>,
            best: &mut (f64, Vec<usize>),
        ) {
            let n = g.n();
            if i == n {
                let mut q = 0.0;
                for c in 0..used {
                    q += 2.0 * inside[c] / two_w - gamma * (strength[c] / two_w).powi(2);
                }
                if q > best.0 {
                    *best = (q, labels.clone());
                }
                return;
            }
            for c in 0..=used.min(n - 1) {
                if c > used {
                    break;
                }
                let mut gain = 0.0;
                for j in 0..i {
                    if labels[j] == c {
                        gain += g.w[i][j];
                    }
                }
                labels[i] = c;
                inside[c] += gain;
                strength[c] += k[i];
                let next_used = if c == used { used + 1 } else { used };
                rec(
                    g,
                    k,
                    two_w,
                    gamma,
                    i + 1,
                    next_used,
                    labels,
                    inside,
                    strength,
                    best,
                );
                inside[c] -= gain;
                strength[c] -= k[i];
            }
        }
        rec(
            self,
            &k,
            two_w,
            gamma,
            0,
            0,
            &mut labels,
            &mut inside,
            &mut strength,
            &mut best,
        );
        best
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi style graph with weights from `weights`; may be edgeless.
pub fn random_dense(rng: &mut impl Rng, n: usize, p: f64, weights: &[f64]) -> DenseGraph {
    let mut g = DenseGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.add(i, j, weights[rng.random_range(0..weights.len())]);
            }
        }
    }
    g
}

pub fn clique_pair(size: usize) -> DenseGraph {
    let mut g = DenseGraph::new(2 * size);
    for base in [0, size] {
        for i in 0..size {
            for j in i + 1..size {
                g.add(base + i, base + j, 1.0);
            }
        }
    }
    g.add(size - 1, size, 1.0);
    g
}

pub fn star(n: usize) -> DenseGraph {
    let mut g = DenseGraph::new(n);
    for i in 1..n {
        g.add(0, i, 1.0);
    }
    g
}

pub fn path(n: usize) -> DenseGraph {
    let mut g = DenseGraph::new(n);
    for i in 1..n {
        g.add(i - 1, i, 1.0);
    }
    g
}

/// Two planted authors with weight-2 links inside each group (a connected
/// random graph over a spanning path) and `bridges` weight-1 links across.
pub fn planted_pair(rng: &mut impl Rng, sizes: (usize, usize), bridges: usize) -> DenseGraph {
    let n = sizes.0 + sizes.1;
    let mut g = DenseGraph::new(n);
    for (start, len) in [(0, sizes.0), (sizes.0, sizes.1)] {
        for i in 1..len {
            g.add(start + i - 1, start + i, 2.0);
        }
        for i in 0..len {
            for j in i + 2..len {
                if rng.random_bool(0.5) {
                    g.add(start + i, start + j, 2.0);
                }
            }
        }
    }
    let mut placed = 0;
    while placed < bridges {
        let i = rng.random_range(0..sizes.0);
        let j = sizes.0 + rng.random_range(0..sizes.1);
        if g.w[i][j] == 0.0 {
            g.add(i, j, 1.0);
            placed += 1;
        }
    }
    g
}
