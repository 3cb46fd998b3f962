//! Gold standard extraction and homonym blocking.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mention::{gold_key, RawRecord};
use crate::{Error, Result};

/// block key -> gold author key -> record ids.
pub type GoldEntries = BTreeMap<String, BTreeMap<String, BTreeSet<String>>>;

/// Publications of every suffix-disambiguated author, grouped by the shared
/// surface name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldStandard {
    entries: GoldEntries,
    dropped: Vec<(String, String)>,
}

impl GoldStandard {
    /// Wraps externally supplied entries. Consistency is checked by
    /// [`build_blocks`].
    pub fn from_entries(entries: GoldEntries) -> Self {
        GoldStandard {
            entries,
            dropped: Vec::new(),
        }
    }

    pub fn entries(&self) -> &GoldEntries {
        &self.entries
    }

    pub fn into_entries(self) -> GoldEntries {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct gold author keys over all blocks.
    pub fn author_count(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    /// `(block_key, record_id)` pairs left out because two different gold
    /// authors of the same block co-wrote the record.
    pub fn dropped(&self) -> &[(String, String)] {
        &self.dropped
    }

    /// Every record id mentioned anywhere in the gold standard.
    pub fn record_ids(&self) -> BTreeSet<&str> {
        self.entries
            .values()
            .flat_map(|authors| authors.values())
            .flat_map(|ids| ids.iter().map(String::as_str))
            .collect()
    }
}

/// Collects every suffixed mention into the gold standard.
///
/// Blocks with fewer than `min_gold_authors` distinct gold authors are
/// discarded; `1` keeps every name with at least one disambiguated author.
/// Home page records (`www`) are skipped.
pub fn build_gold_standard<'a, I>(records: I, min_gold_authors: usize) -> GoldStandard
where
    I: IntoIterator<Item = &'a RawRecord>,
{
    let mut entries = GoldEntries::new();
    // (block, record) -> gold key, to catch two gold authors of one name on one record
    let mut seen: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut conflicts: BTreeSet<(String, String)> = BTreeSet::new();

    for record in records {
        if !record.kind.is_publication() {
            continue;
        }
        for mention in &record.mentions {
            let Some(id) = mention.gold_id.as_deref() else {
                continue;
            };
            let key = gold_key(&mention.surface_name, id);
            let slot = (mention.surface_name.clone(), record.record_id.clone());
            match seen.get(&slot) {
                Some(prev) if *prev != key => {
                    conflicts.insert(slot);
                    continue;
                }
                Some(_) => continue,
                None => {
                    seen.insert(slot, key.clone());
                }
            }
            entries
                .entry(mention.surface_name.clone())
                .or_default()
                .entry(key)
                .or_default()
                .insert(record.record_id.clone());
        }
    }

    for (block, record) in &conflicts {
        if let Some(authors) = entries.get_mut(block) {
            for ids in authors.values_mut() {
                ids.remove(record);
            }
            authors.retain(|_, ids| !ids.is_empty());
        }
    }
    let min = min_gold_authors.max(1);
    entries.retain(|_, authors| authors.len() >= min);

    GoldStandard {
        entries,
        dropped: conflicts.into_iter().collect(),
    }
}

/// All gold publications of one ambiguous name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    block_key: String,
    members: Vec<String>,
    gold_label: Vec<String>,
}

impl Block {
    /// Builds a block from `(record_id, gold_key)` pairs. Record ids must be
    /// distinct.
    pub fn new<I>(block_key: impl Into<String>, labelled: I) -> Result<Block>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let block_key = block_key.into();
        let mut pairs: Vec<(String, String)> = labelled.into_iter().collect();
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::GoldConflict {
                    block: block_key,
                    record: w[0].0.clone(),
                    first: w[0].1.clone(),
                    second: w[1].1.clone(),
                });
            }
        }
        if pairs.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "block {block_key:?} has no members"
            )));
        }
        let (members, gold_label) = pairs.into_iter().unzip();
        Ok(Block {
            block_key,
            members,
            gold_label,
        })
    }

    pub fn block_key(&self) -> &str {
        &self.block_key
    }

    /// Member record ids in ascending order.
    pub fn members(&self) -> &[String] {
        &self.members
    }

    /// Gold author key of each member, parallel to [`Block::members`].
    pub fn gold_labels(&self) -> &[String] {
        &self.gold_label
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn position(&self, record_id: &str) -> Option<usize> {
        self.members
            .binary_search_by(|m| m.as_str().cmp(record_id))
            .ok()
    }

    pub fn label_of(&self, record_id: &str) -> Option<&str> {
        self.position(record_id)
            .map(|i| self.gold_label[i].as_str())
    }

    pub fn gold_author_count(&self) -> usize {
        self.gold_label.iter().collect::<BTreeSet<_>>().len()
    }
}

/// Blocks ordered by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockSet {
    blocks: Vec<Block>,
}

impl BlockSet {
    /// Sorts blocks by key and rejects duplicate keys.
    pub fn new(mut blocks: Vec<Block>) -> Result<BlockSet> {
        blocks.sort_by(|a, b| a.block_key.cmp(&b.block_key));
        if let Some(w) = blocks.windows(2).find(|w| w[0].block_key == w[1].block_key) {
            return Err(Error::InvalidArgument(format!(
                "duplicate block key {:?}",
                w[0].block_key
            )));
        }
        Ok(BlockSet { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn get(&self, block_key: &str) -> Option<&Block> {
        self.blocks
            .binary_search_by(|b| b.block_key.as_str().cmp(block_key))
            .ok()
            .map(|i| &self.blocks[i])
    }

    /// Total number of publications over all blocks.
    pub fn publication_count(&self) -> usize {
        self.blocks.iter().map(Block::m).sum()
    }

    pub fn gold_author_count(&self) -> usize {
        self.blocks.iter().map(Block::gold_author_count).sum()
    }
}

/// Turns the gold standard into one block per name.
pub fn build_blocks(gold: &GoldStandard) -> Result<BlockSet> {
    let mut blocks = Vec::with_capacity(gold.entries.len());
    for (key, authors) in &gold.entries {
        let labelled = authors
            .iter()
            .flat_map(|(author, ids)| ids.iter().map(move |id| (id.clone(), author.clone())));
        blocks.push(Block::new(key.clone(), labelled)?);
    }
    BlockSet::new(blocks)
}

/// Draws `count` blocks uniformly without replacement. The result is ordered
/// by block key and depends only on `(n, count, seed)`.
pub fn sample_blocks(bs: &BlockSet, count: usize, seed: u64) -> Result<BlockSet> {
    if count > bs.n() {
        return Err(Error::InvalidArgument(format!(
            "cannot sample {count} blocks out of {}",
            bs.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, bs.n(), count).into_vec();
    picked.sort_unstable();
    Ok(BlockSet {
        blocks: picked.into_iter().map(|i| bs.blocks[i].clone()).collect(),
    })
}
