//! JSON report documents and their plain-text tables.

use std::fmt::Write as _;

use namesake_core::BcubedScores;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub p: f64,
    pub r: f64,
    pub f: f64,
}

impl From<BcubedScores> for Triple {
    fn from(s: BcubedScores) -> Self {
        Triple {
            p: s.precision,
            r: s.recall,
            f: s.f,
        }
    }
}

impl From<Triple> for BcubedScores {
    fn from(t: Triple) -> Self {
        BcubedScores::new(t.p, t.r, t.f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub block_key: String,
    pub m: usize,
    pub p: f64,
    pub r: f64,
    pub f: f64,
}

/// Evaluation of one threshold over the selected blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub threshold: u32,
    pub alpha: f64,
    /// Pairwise distance comparisons performed, `sum m(m-1)/2`.
    pub comparisons: u64,
    pub per_block: Vec<BlockRow>,
    /// Macro average of the per-block rows, in row order.
    pub corpus: Triple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: Option<u64>,
    pub blocks: usize,
    pub publications: usize,
    pub gold_authors: usize,
    pub evaluations: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// No block passed the size filter.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonBlockRow {
    pub block_key: String,
    pub m: usize,
    pub before: Triple,
    pub after: Triple,
}

/// Threshold-3 clustering of common names before and after refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonNamesReport {
    pub status: Status,
    pub threshold: u32,
    pub min_pubs: usize,
    pub seed: Option<u64>,
    pub blocks: usize,
    pub publications: usize,
    pub before: Option<Triple>,
    pub after: Option<Triple>,
    pub per_block: Vec<CommonBlockRow>,
}

/// Louvain summary of one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityRow {
    pub block_key: String,
    #[serde(rename = "Q_before")]
    pub q_before: Option<f64>,
    #[serde(rename = "Q_after")]
    pub q_after: Option<f64>,
    pub passes: usize,
    pub communities: usize,
}

/// Any report `namesake report` knows how to print.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyReport {
    Run(RunReport),
    CommonNames(CommonNamesReport),
    Communities(Vec<CommunityRow>),
}

fn row(out: &mut String, label: &str, t: &Triple) {
    let _ = writeln!(out, "{label:<24}{:>10.4}{:>10.4}{:>10.4}", t.p, t.r, t.f);
}

fn header(out: &mut String, first: &str) {
    let _ = writeln!(
        out,
        "{first:<24}{:>10}{:>10}{:>10}",
        "precision", "recall", "F"
    );
}

impl AnyReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self {
            AnyReport::Run(r) => {
                let seed = r.seed.map_or("-".to_owned(), |s| s.to_string());
                let _ = writeln!(
                    out,
                    "{} blocks, {} gold authors, {} publications (seed {seed})",
                    r.blocks, r.gold_authors, r.publications
                );
                header(&mut out, "threshold");
                for e in &r.evaluations {
                    row(&mut out, &e.threshold.to_string(), &e.corpus);
                }
            }
            AnyReport::CommonNames(r) => {
                let _ = writeln!(
                    out,
                    "{} names with more than {} publications ({} publications), threshold {}",
                    r.blocks, r.min_pubs, r.publications, r.threshold
                );
                match (r.status.clone(), r.before, r.after) {
                    (Status::Ok, Some(before), Some(after)) => {
                        header(&mut out, "");
                        row(&mut out, "before optimization", &before);
                        row(&mut out, "after optimization", &after);
                    }
                    _ => out.push_str("no qualifying names\n"),
                }
            }
            AnyReport::Communities(rows) => {
                let _ = writeln!(
                    out,
                    "{:<24}{:>10}{:>10}{:>8}{:>13}",
                    "block", "Q before", "Q after", "passes", "communities"
                );
                let q = |v: Option<f64>| v.map_or("-".to_owned(), |q| format!("{q:.4}"));
                for c in rows {
                    let _ = writeln!(
                        out,
                        "{:<24}{:>10}{:>10}{:>8}{:>13}",
                        c.block_key,
                        q(c.q_before),
                        q(c.q_after),
                        c.passes,
                        c.communities
                    );
                }
            }
        }
        out
    }
}
