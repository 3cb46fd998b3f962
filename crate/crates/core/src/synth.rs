//! Seeded planted-author corpora.
//!
//! Each block is one ambiguous name shared by several planted authors. Every
//! author writes with a private pool of co-authors; each paper reuses one
//! co-author from an earlier paper of the same author, so an author's papers
//! are connected through shared co-authors. With probability `bridge_rate` a
//! paper also lists a "common" co-author drawn from a pool shared by all
//! authors of the block, which is what links different people wrongly.
//!
//! Names never end in digits except the focal mention's gold suffix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mention::{gold_key, parse_mention, AuthorMention, RawRecord, RecordKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub blocks: usize,
    /// Inclusive range of planted authors per block.
    pub authors_per_block: (usize, usize),
    /// Inclusive range of papers per planted author.
    pub pubs_per_author: (usize, usize),
    /// Private co-author pool size as a fraction of the author's paper count.
    pub coauthor_pool_ratio: f64,
    /// Inclusive range of private co-authors per paper.
    pub coauthors_per_pub: (usize, usize),
    /// Probability that a paper also lists a common co-author of the block.
    pub bridge_rate: f64,
    /// Number of common co-author names per block.
    pub common_pool: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            blocks: 28,
            authors_per_block: (2, 4),
            pubs_per_author: (110, 170),
            coauthor_pool_ratio: 0.5,
            coauthors_per_pub: (1, 3),
            bridge_rate: 0.2,
            common_pool: 4,
            seed: 2015,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let range_ok = |(lo, hi): (usize, usize)| lo >= 1 && lo <= hi;
        if !range_ok(self.authors_per_block)
            || !range_ok(self.pubs_per_author)
            || !range_ok(self.coauthors_per_pub)
        {
            return Err(Error::InvalidArgument(
                "ranges must satisfy 1 <= min <= max".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.bridge_rate) {
            return Err(Error::InvalidArgument(format!(
                "bridge rate {} outside [0, 1]",
                self.bridge_rate
            )));
        }
        if self.coauthor_pool_ratio.is_nan() || self.coauthor_pool_ratio <= 0.0 {
            return Err(Error::InvalidArgument(
                "coauthor pool ratio must be positive".into(),
            ));
        }
        if self.bridge_rate > 0.0 && self.common_pool == 0 {
            return Err(Error::InvalidArgument(
                "bridges need a non-empty common pool".into(),
            ));
        }
        Ok(())
    }
}

/// Alphabetic tag for an index: 0 -> "A", 25 -> "Z", 26 -> "Ba", ...
pub fn alpha_tag(mut i: usize) -> String {
    let mut letters = Vec::new();
    loop {
        letters.push((i % 26) as u8);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    letters
        .iter()
        .rev()
        .enumerate()
        .map(|(pos, &l)| {
            let base = if pos == 0 { b'A' } else { b'a' };
            (base + l) as char
        })
        .collect()
}

/// Ambiguous name of synthetic block `b`.
pub fn block_name(b: usize) -> String {
    format!("Name {}", alpha_tag(b))
}

fn ceil_usize(x: f64) -> usize {
    let floor = x as usize;
    if (floor as f64) < x {
        floor + 1
    } else {
        floor
    }
}

fn mention(raw: &str) -> AuthorMention {
    parse_mention(raw).expect("generated names are non-empty")
}

/// Generates the records of a synthetic corpus. Gold labels are carried by
/// the focal mention's suffix.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<RawRecord>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    for b in 0..cfg.blocks {
        let name = block_name(b);
        let btag = alpha_tag(b);
        let authors = rng.random_range(cfg.authors_per_block.0..=cfg.authors_per_block.1);
        let common: Vec<String> = (0..cfg.common_pool)
            .map(|s| format!("Common {btag} {}", alpha_tag(s)))
            .collect();
        for j in 0..authors {
            let focal = gold_key(&name, &format!("{:04}", j + 1));
            let atag = alpha_tag(j);
            let pubs = rng.random_range(cfg.pubs_per_author.0..=cfg.pubs_per_author.1);
            let pool_size = ceil_usize(pubs as f64 * cfg.coauthor_pool_ratio).max(2);
            let pool: Vec<String> = (0..pool_size)
                .map(|t| format!("Coauthor {btag} {atag} {}", alpha_tag(t)))
                .collect();
            let mut used: Vec<usize> = Vec::new();
            for t in 0..pubs {
                let want = rng.random_range(cfg.coauthors_per_pub.0..=cfg.coauthors_per_pub.1);
                let mut picks: Vec<usize> = Vec::with_capacity(want);
                if let Some(&prev) = used.choose(&mut rng) {
                    picks.push(prev);
                }
                while picks.len() < want.min(pool_size) {
                    let c = rng.random_range(0..pool_size);
                    if !picks.contains(&c) {
                        picks.push(c);
                    }
                }
                for &c in &picks {
                    if !used.contains(&c) {
                        used.push(c);
                    }
                }
                let mut names: Vec<&str> = picks.iter().map(|&c| pool[c].as_str()).collect();
                if cfg.bridge_rate > 0.0 && rng.random_bool(cfg.bridge_rate) {
                    names.push(common.choose(&mut rng).expect("validated non-empty"));
                }
                let slot = rng.random_range(0..=names.len());
                names.insert(slot, &focal);
                records.push(RawRecord {
                    record_id: format!("synth/{b:04}/{j:02}/{t:04}"),
                    kind: RecordKind::Article,
                    title: format!("Planted paper {t} of author {atag} in block {btag}"),
                    venue: Some(format!("Venue {atag}")),
                    year: Some(1990 + (t % 30) as i32),
                    mentions: names.into_iter().map(mention).collect(),
                });
            }
        }
    }
    Ok(records)
}
