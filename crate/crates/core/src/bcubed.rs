//! BCubed precision, recall and F.
//!
//! For a publication `e` with predicted cluster `C(e)` and gold author `L(e)`:
//! precision is `|C(e) ∩ L(e)| / |C(e)|`, recall is `|C(e) ∩ L(e)| / |L(e)|`,
//! and F is the weighted harmonic combination `1 / (α/P + (1-α)/R)`.
//! Block scores average the item triples, F included; corpus scores average
//! block triples.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::cluster::Clustering;
use crate::gold::Block;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BcubedScores {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

impl BcubedScores {
    pub const PERFECT: BcubedScores = BcubedScores {
        precision: 1.0,
        recall: 1.0,
        f: 1.0,
    };

    pub fn new(precision: f64, recall: f64, f: f64) -> Self {
        BcubedScores {
            precision,
            recall,
            f,
        }
    }

    /// Component-wise arithmetic mean; `None` for an empty input.
    pub fn mean<'a, I>(scores: I) -> Option<BcubedScores>
    where
        I: IntoIterator<Item = &'a BcubedScores>,
    {
        let mut n = 0usize;
        let mut sum = BcubedScores::default();
        for s in scores {
            n += 1;
            sum.precision += s.precision;
            sum.recall += s.recall;
            sum.f += s.f;
        }
        (n > 0).then(|| {
            let n = n as f64;
            BcubedScores::new(sum.precision / n, sum.recall / n, sum.f / n)
        })
    }
}

/// How block-level F is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FMode {
    /// Mean of the per-item F values.
    #[default]
    PerItem,
    /// F of the block's mean precision and mean recall.
    HarmonicOfMeans,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Weight of precision in F, in `(0, 1)`.
    pub alpha: f64,
    pub f_mode: FMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            alpha: 0.5,
            f_mode: FMode::PerItem,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )))
        }
    }
}

/// `1 / (α/P + (1-α)/R)`, defined as 0 when either side is 0.
pub fn f_measure(precision: f64, recall: f64, alpha: f64) -> f64 {
    if precision <= 0.0 || recall <= 0.0 {
        0.0
    } else {
        1.0 / (alpha / precision + (1.0 - alpha) / recall)
    }
}

/// Contingency counts between predicted clusters and gold authors.
struct Overlap {
    cluster_size: Vec<u32>,
    gold_size: Vec<u32>,
    gold_of: Vec<u32>,
    joint: BTreeMap<(u32, u32), u32>,
}

impl Overlap {
    fn new(c: &Clustering, b: &Block) -> Result<Self> {
        if c.members() != b.members() {
            return Err(Error::InvalidArgument(format!(
                "clustering of {:?} does not cover block {:?}",
                c.block_key(),
                b.block_key()
            )));
        }
        let mut gold_ids: BTreeMap<&str, u32> = BTreeMap::new();
        let gold_of: Vec<u32> = b
            .gold_labels()
            .iter()
            .map(|g| {
                let next = gold_ids.len() as u32;
                *gold_ids.entry(g.as_str()).or_insert(next)
            })
            .collect();
        let mut cluster_size = alloc::vec![0u32; c.cluster_count()];
        let mut gold_size = alloc::vec![0u32; gold_ids.len()];
        let mut joint = BTreeMap::new();
        for (&l, &g) in c.labels().iter().zip(&gold_of) {
            cluster_size[l as usize] += 1;
            gold_size[g as usize] += 1;
            *joint.entry((l, g)).or_insert(0) += 1;
        }
        Ok(Overlap {
            cluster_size,
            gold_size,
            gold_of,
            joint,
        })
    }

    fn item(&self, c: &Clustering, i: usize, alpha: f64) -> BcubedScores {
        let (l, g) = (c.labels()[i], self.gold_of[i]);
        let both = self.joint[&(l, g)] as f64;
        let precision = both / self.cluster_size[l as usize] as f64;
        let recall = both / self.gold_size[g as usize] as f64;
        BcubedScores::new(precision, recall, f_measure(precision, recall, alpha))
    }
}

/// Scores of one publication of the block.
pub fn item_scores(
    c: &Clustering,
    b: &Block,
    record_id: &str,
    cfg: &EvalConfig,
) -> Result<BcubedScores> {
    let i = b
        .position(record_id)
        .ok_or_else(|| Error::UnknownPublication(record_id.into()))?;
    Ok(Overlap::new(c, b)?.item(c, i, cfg.alpha))
}

/// Scores of every publication of the block, in member order.
pub fn all_item_scores(c: &Clustering, b: &Block, cfg: &EvalConfig) -> Result<Vec<BcubedScores>> {
    let overlap = Overlap::new(c, b)?;
    Ok((0..b.m()).map(|i| overlap.item(c, i, cfg.alpha)).collect())
}

/// Mean item scores of a block.
pub fn block_scores(c: &Clustering, b: &Block, cfg: &EvalConfig) -> Result<BcubedScores> {
    let items = all_item_scores(c, b, cfg)?;
    let mut mean = BcubedScores::mean(&items).expect("blocks are never empty");
    if cfg.f_mode == FMode::HarmonicOfMeans {
        mean.f = f_measure(mean.precision, mean.recall, cfg.alpha);
    }
    Ok(mean)
}

/// Unweighted mean over blocks.
pub fn corpus_scores(per_block: &[BcubedScores]) -> Result<BcubedScores> {
    BcubedScores::mean(per_block)
        .ok_or_else(|| Error::InvalidArgument("no blocks to average".into()))
}

/// Mean over blocks weighted by block size (publication-level average).
pub fn corpus_scores_weighted(per_block: &[(BcubedScores, usize)]) -> Result<BcubedScores> {
    let total: usize = per_block.iter().map(|(_, m)| m).sum();
    if total == 0 {
        return Err(Error::InvalidArgument("no publications to average".into()));
    }
    let mut sum = BcubedScores::default();
    for (s, m) in per_block {
        let w = *m as f64;
        sum.precision += s.precision * w;
        sum.recall += s.recall * w;
        sum.f += s.f * w;
    }
    let t = total as f64;
    Ok(BcubedScores::new(
        sum.precision / t,
        sum.recall / t,
        sum.f / t,
    ))
}
