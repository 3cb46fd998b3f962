//! The experiment commands behind the CLI.
//!
//! Blocks are processed on a rayon pool of `workers` threads and collected in
//! block-key order, so every report is byte-identical whatever the worker
//! count.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use namesake_core::cluster::cluster_block_counted;
use namesake_core::community::refine_clustering_detailed;
use namesake_core::gold::GoldStandard;
use namesake_core::graph::BfsScratch;
use namesake_core::mention::RawRecord;
use namesake_core::{
    block_scores, build_blocks, build_gold_standard, corpus_scores, count_comparisons,
    sample_blocks, BcubedScores, BipartiteGraph, Block, BlockSet, Clustering,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, SynthSettings};
use crate::error::{AppError, Result};
use crate::formats::{self, FormatError, RecordLines};
use crate::report::{
    BlockRow, CommonBlockRow, CommonNamesReport, CommunityRow, EvalReport, RunReport, Status,
    Triple,
};
use crate::xml;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const GOLD_FILE: &str = "gold.json";
pub const GRAPH_FILE: &str = "graph.bin";
pub const RUN_REPORT_FILE: &str = "run_report.json";
pub const COMMON_NAMES_FILE: &str = "common_names.json";
pub const COMMUNITIES_FILE: &str = "communities.json";
pub const REFINED_CLUSTERS_FILE: &str = "clusters_refined.tsv";

/// Threshold whose clusters are refined for common names.
pub const COMMON_NAME_THRESHOLD: u32 = 3;

pub fn clusters_file(threshold: u32) -> String {
    format!("clusters_t{threshold}.tsv")
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdin()))
    } else {
        let f = File::open(path).map_err(|e| AppError::io(path, e))?;
        Ok(Box::new(f))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path, e))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| AppError::io(path, io::Error::from(e)))?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| AppError::io(path, e))
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start {workers} workers: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSummary {
    pub records: usize,
    pub gold_blocks: usize,
    pub gold_authors: usize,
    pub dropped: usize,
}

/// Parses a DBLP XML dump (path or `-` for stdin, optionally gzipped) into
/// `records.jsonl` and `gold.json` under `out_dir`, plus `graph.bin` when
/// `snapshot` is set.
///
/// Records stream straight to disk; only those carrying a gold suffix (and,
/// for the snapshot, the network records) are kept in memory.
pub fn ingest(
    input: &Path,
    out_dir: &Path,
    min_gold_authors: usize,
    snapshot: bool,
) -> Result<IngestSummary> {
    let reader = xml::open_xml(open_input(input)?).map_err(|e| AppError::io(input, e))?;
    let records_path = out_dir.join(RECORDS_FILE);
    let mut out = create(&records_path)?;
    let mut suffixed = Vec::new();
    let mut network = Vec::new();
    let mut count = 0usize;
    for record in reader {
        let record = record.map_err(|source| AppError::Xml {
            path: input.to_path_buf(),
            source,
        })?;
        formats::write_record(&mut out, &record).map_err(|e| AppError::io(&records_path, e))?;
        count += 1;
        if snapshot && record.in_network() {
            network.push(record.clone());
        }
        if record.mentions.iter().any(|m| m.gold_id.is_some()) {
            suffixed.push(record);
        }
    }
    out.flush().map_err(|e| AppError::io(&records_path, e))?;

    let gold = build_gold_standard(&suffixed, min_gold_authors);
    if gold.is_empty() {
        warn!("no disambiguated author names found; the gold standard is empty");
    }
    for (block, record) in gold.dropped() {
        warn!(
            "record {record} lists two different {block:?} authors; left out of the gold standard"
        );
    }
    let gold_path = out_dir.join(GOLD_FILE);
    formats::write_gold(create(&gold_path)?, gold.entries())
        .map_err(|e| AppError::format(&gold_path, e))?;

    if snapshot {
        let graph = BipartiteGraph::build(&network);
        let path = out_dir.join(GRAPH_FILE);
        formats::write_snapshot(create(&path)?, &graph).map_err(|e| AppError::format(&path, e))?;
    }
    let summary = IngestSummary {
        records: count,
        gold_blocks: gold.entries().len(),
        gold_authors: gold.author_count(),
        dropped: gold.dropped().len(),
    };
    info!(
        "ingested {} records; gold standard has {} names and {} authors",
        summary.records, summary.gold_blocks, summary.gold_authors
    );
    Ok(summary)
}

pub fn read_records(path: &Path) -> Result<Vec<RawRecord>> {
    let input: Box<dyn BufRead> = Box::new(BufReader::new(open_input(path)?));
    RecordLines::new(input)
        .collect::<Result<Vec<_>, FormatError>>()
        .map_err(|e| AppError::format(path, e))
}

/// The co-authorship network plus the gold blocks to evaluate.
pub struct Corpus {
    pub graph: BipartiteGraph,
    pub blocks: BlockSet,
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| AppError::Usage(format!("no {what} given")))
}

pub fn load_corpus(cfg: &ExperimentConfig) -> Result<Corpus> {
    let graph = match &cfg.graph {
        Some(path) => {
            let f = File::open(path).map_err(|e| AppError::io(path, e))?;
            formats::read_snapshot(BufReader::new(f)).map_err(|e| AppError::format(path, e))?
        }
        None => BipartiteGraph::build(&read_records(required(&cfg.records, "record file")?)?),
    };
    let gold_path = required(&cfg.gold, "gold standard")?;
    let f = File::open(gold_path).map_err(|e| AppError::io(gold_path, e))?;
    let entries =
        formats::read_gold(BufReader::new(f)).map_err(|e| AppError::format(gold_path, e))?;
    let gold = GoldStandard::from_entries(entries);
    check_gold(&gold, &graph)?;
    let blocks = build_blocks(&gold)?;
    let min = cfg.min_gold_authors.max(1);
    let blocks = BlockSet::new(
        blocks
            .into_blocks()
            .into_iter()
            .filter(|b| b.gold_author_count() >= min)
            .collect(),
    )?;
    info!(
        "{} publications and {} authors in the network, {} gold blocks",
        graph.pub_count(),
        graph.author_count(),
        blocks.n()
    );
    Ok(Corpus { graph, blocks })
}

/// Every gold record must be a publication of the network that lists the
/// block's name among its authors.
pub fn check_gold(gold: &GoldStandard, graph: &BipartiteGraph) -> Result<()> {
    for (block, authors) in gold.entries() {
        let name = graph.author_index(block);
        for record in authors.values().flatten() {
            let listed = match (graph.pub_index(record), name) {
                (Some(p), Some(a)) => graph.authors_of(p).binary_search(&a).is_ok(),
                (None, _) => {
                    return Err(AppError::Data(format!(
                        "gold record {record:?} is not in the corpus"
                    )))
                }
                (Some(_), None) => false,
            };
            if !listed {
                return Err(AppError::Data(format!(
                    "gold record {record:?} does not list author {block:?}"
                )));
            }
        }
    }
    Ok(())
}

/// The blocks an experiment runs on: a seeded sample, or all of them.
pub fn select_blocks(cfg: &ExperimentConfig, blocks: &BlockSet) -> Result<BlockSet> {
    if cfg.all_blocks {
        return Ok(blocks.clone());
    }
    let seed = cfg.seed.ok_or_else(|| {
        AppError::Usage("sampling needs an explicit --seed (or use --all-blocks)".into())
    })?;
    sample_blocks(blocks, cfg.sample_count, seed).map_err(|e| AppError::Usage(e.to_string()))
}

/// Clusters every block at `threshold`, in parallel, returning the
/// clusterings in block order and the number of comparisons made.
pub fn cluster_blocks(
    pool: &rayon::ThreadPool,
    blocks: &BlockSet,
    graph: &BipartiteGraph,
    threshold: u32,
) -> Result<(Vec<Clustering>, u64)> {
    let results = pool.install(|| {
        blocks
            .blocks()
            .par_iter()
            .map_init(BfsScratch::new, |scratch, b| {
                cluster_block_counted(b, graph, threshold, scratch)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let comparisons = results.iter().map(|(_, n)| n).sum();
    Ok((results.into_iter().map(|(c, _)| c).collect(), comparisons))
}

fn score_blocks(
    blocks: &[Block],
    clusterings: &[Clustering],
    cfg: &ExperimentConfig,
) -> Result<Vec<BcubedScores>> {
    let eval = cfg.eval_config();
    blocks
        .iter()
        .zip(clusterings)
        .map(|(b, c)| block_scores(c, b, &eval).map_err(AppError::from))
        .collect()
}

/// Clusters the selected blocks at each threshold and evaluates them.
///
/// Writes `run_report.json` and one `clusters_t<k>.tsv` per threshold to the
/// output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let corpus = load_corpus(cfg)?;
    let selected = select_blocks(cfg, &corpus.blocks)?;
    let pool = thread_pool(cfg.workers)?;
    let mut evaluations = Vec::new();
    for threshold in cfg.sorted_thresholds() {
        let (clusterings, comparisons) =
            cluster_blocks(&pool, &selected, &corpus.graph, threshold)?;
        let expected = count_comparisons(&selected);
        if comparisons != expected {
            return Err(AppError::Data(format!(
                "made {comparisons} comparisons, expected {expected}"
            )));
        }
        info!("threshold {threshold}: {comparisons} publication comparisons");
        let scores = score_blocks(selected.blocks(), &clusterings, cfg)?;
        let path = cfg.out_dir.join(clusters_file(threshold));
        formats::write_clusters(create(&path)?, selected.blocks().iter().zip(&clusterings))
            .map_err(|e| AppError::format(&path, e))?;
        evaluations.push(EvalReport {
            threshold,
            alpha: cfg.alpha,
            comparisons,
            per_block: selected
                .blocks()
                .iter()
                .zip(&scores)
                .map(|(b, s)| BlockRow {
                    block_key: b.block_key().to_owned(),
                    m: b.m(),
                    p: s.precision,
                    r: s.recall,
                    f: s.f,
                })
                .collect(),
            corpus: corpus_scores(&scores)?.into(),
        });
    }
    let report = RunReport {
        seed: if cfg.all_blocks { None } else { cfg.seed },
        blocks: selected.n(),
        publications: selected.publication_count(),
        gold_authors: selected.gold_author_count(),
        evaluations,
    };
    write_json(&cfg.out_dir.join(RUN_REPORT_FILE), &report)?;
    Ok(report)
}

/// Compares threshold-3 clustering of common names (more than
/// `common_name_min_pubs` publications) before and after modularity
/// refinement.
///
/// Writes `common_names.json`, `communities.json` and
/// `clusters_refined.tsv`. When no name qualifies the report has status
/// `empty`.
pub fn common_names(cfg: &ExperimentConfig) -> Result<CommonNamesReport> {
    cfg.validate()?;
    let corpus = load_corpus(cfg)?;
    let selected = select_blocks(cfg, &corpus.blocks)?;
    let common = BlockSet::new(
        selected
            .into_blocks()
            .into_iter()
            .filter(|b| b.m() > cfg.common_name_min_pubs)
            .collect(),
    )?;
    let pool = thread_pool(cfg.workers)?;
    let (base, _) = cluster_blocks(&pool, &common, &corpus.graph, COMMON_NAME_THRESHOLD)?;
    let louvain = cfg.louvain_config();
    let refinements = pool.install(|| {
        common
            .blocks()
            .par_iter()
            .zip(&base)
            .map_init(BfsScratch::new, |scratch, (b, c)| {
                refine_clustering_detailed(b, c, &corpus.graph, &louvain, scratch)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let refined: Vec<Clustering> = refinements.iter().map(|r| r.clustering.clone()).collect();
    let before = score_blocks(common.blocks(), &base, cfg)?;
    let after = score_blocks(common.blocks(), &refined, cfg)?;

    let status = if common.n() == 0 {
        warn!(
            "no name has more than {} publications; writing an empty report",
            cfg.common_name_min_pubs
        );
        Status::Empty
    } else {
        Status::Ok
    };
    let report = CommonNamesReport {
        status,
        threshold: COMMON_NAME_THRESHOLD,
        min_pubs: cfg.common_name_min_pubs,
        seed: if cfg.all_blocks { None } else { cfg.seed },
        blocks: common.n(),
        publications: common.publication_count(),
        before: corpus_scores(&before).ok().map(Triple::from),
        after: corpus_scores(&after).ok().map(Triple::from),
        per_block: common
            .blocks()
            .iter()
            .zip(before.iter().zip(&after))
            .map(|(b, (s0, s1))| CommonBlockRow {
                block_key: b.block_key().to_owned(),
                m: b.m(),
                before: (*s0).into(),
                after: (*s1).into(),
            })
            .collect(),
    };
    let communities: Vec<CommunityRow> = common
        .blocks()
        .iter()
        .zip(&refinements)
        .map(|(b, r)| CommunityRow {
            block_key: b.block_key().to_owned(),
            q_before: r.q_before,
            q_after: r.q_after,
            passes: r.passes,
            communities: r.communities,
        })
        .collect();
    write_json(&cfg.out_dir.join(COMMON_NAMES_FILE), &report)?;
    write_json(&cfg.out_dir.join(COMMUNITIES_FILE), &communities)?;
    let path = cfg.out_dir.join(REFINED_CLUSTERS_FILE);
    formats::write_clusters(create(&path)?, common.blocks().iter().zip(&refined))
        .map_err(|e| AppError::format(&path, e))?;
    Ok(report)
}

/// Writes a synthetic corpus as `records.jsonl` and `gold.json`.
pub fn synth(settings: &SynthSettings, out_dir: &Path) -> Result<IngestSummary> {
    let cfg = settings.to_core();
    cfg.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let records = namesake_core::synth::generate(&cfg)?;
    let path = out_dir.join(RECORDS_FILE);
    let mut out = create(&path)?;
    for r in &records {
        formats::write_record(&mut out, r).map_err(|e| AppError::io(&path, e))?;
    }
    out.flush().map_err(|e| AppError::io(&path, e))?;
    let gold = build_gold_standard(&records, 1);
    let gold_path = out_dir.join(GOLD_FILE);
    formats::write_gold(create(&gold_path)?, gold.entries())
        .map_err(|e| AppError::format(&gold_path, e))?;
    Ok(IngestSummary {
        records: records.len(),
        gold_blocks: gold.entries().len(),
        gold_authors: gold.author_count(),
        dropped: gold.dropped().len(),
    })
}
