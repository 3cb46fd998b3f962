use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use namesake::config::{ExperimentConfig, FModeName};
use namesake::report::AnyReport;
use namesake::{pipeline, AppError, Result};

/// Disambiguate homonym author names with co-authorship distances.
#[derive(Debug, Parser)]
#[command(name = "namesake", version)]
struct Cli {
    /// TOML configuration; flags take precedence.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a DBLP XML dump into canonical records and a gold standard.
    Ingest {
        /// XML file, plain or gzipped; `-` reads standard input.
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        min_gold_authors: Option<usize>,
        /// Also write a binary snapshot of the co-authorship network.
        #[arg(long)]
        snapshot: bool,
    },
    /// Cluster sampled blocks at each threshold and evaluate with BCubed.
    Run(ExperimentArgs),
    /// Refine the clusters of common names with Louvain communities.
    CommonNames(ExperimentArgs),
    /// Generate a synthetic corpus with planted authors.
    Synth(SynthArgs),
    /// Print the tables of report files.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Graph snapshot written by `ingest --snapshot`.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Distance threshold; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    threshold: Vec<u32>,
    #[arg(long)]
    sample_count: Option<usize>,
    /// Use every gold block instead of a sample.
    #[arg(long)]
    all_blocks: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    f_mode: Option<FModeArg>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Names need more publications than this to count as common.
    #[arg(long)]
    min_block_size: Option<usize>,
    #[arg(long)]
    min_gold_authors: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FModeArg {
    PerItem,
    HarmonicOfMeans,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    blocks: Option<usize>,
    /// Planted authors per block, `MIN-MAX` or a single number.
    #[arg(long, value_parser = parse_range)]
    authors: Option<[usize; 2]>,
    /// Publications per planted author, `MIN-MAX` or a single number.
    #[arg(long, value_parser = parse_range)]
    pubs: Option<[usize; 2]>,
    #[arg(long)]
    bridge_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_range(s: &str) -> std::result::Result<[usize; 2], String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once('-') {
        Some((lo, hi)) => Ok([num(lo)?, num(hi)?]),
        None => num(s).map(|n| [n, n]),
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<ExperimentConfig> {
    path.map_or_else(
        || Ok(ExperimentConfig::default()),
        |p| ExperimentConfig::load(p),
    )
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ExperimentArgs {
    fn apply(self, cfg: &mut ExperimentConfig) {
        if self.records.is_some() {
            cfg.records = self.records;
        }
        if self.gold.is_some() {
            cfg.gold = self.gold;
        }
        if self.graph.is_some() {
            cfg.graph = self.graph;
        }
        if !self.threshold.is_empty() {
            cfg.thresholds = self.threshold;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        cfg.all_blocks |= self.all_blocks;
        set(&mut cfg.out_dir, self.out);
        set(&mut cfg.sample_count, self.sample_count);
        set(&mut cfg.alpha, self.alpha);
        set(&mut cfg.resolution, self.resolution);
        set(&mut cfg.common_name_min_pubs, self.min_block_size);
        set(&mut cfg.min_gold_authors, self.min_gold_authors);
        set(&mut cfg.louvain_restarts, self.restarts);
        set(&mut cfg.workers, self.workers);
        if let Some(m) = self.f_mode {
            cfg.f_mode = match m {
                FModeArg::PerItem => FModeName::PerItem,
                FModeArg::HarmonicOfMeans => FModeName::HarmonicOfMeans,
            };
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = load_config(cli.config.as_ref())?;
    match cli.command {
        Command::Ingest {
            input,
            out,
            min_gold_authors,
            snapshot,
        } => {
            let out = out.unwrap_or(cfg.out_dir);
            let s = pipeline::ingest(
                &input,
                &out,
                min_gold_authors.unwrap_or(cfg.min_gold_authors),
                snapshot,
            )?;
            println!(
                "{} records, {} gold names, {} gold authors -> {}",
                s.records,
                s.gold_blocks,
                s.gold_authors,
                out.display()
            );
        }
        Command::Run(args) => {
            args.apply(&mut cfg);
            let report = pipeline::run(&cfg)?;
            print!("{}", AnyReport::Run(report).render());
        }
        Command::CommonNames(args) => {
            args.apply(&mut cfg);
            let report = pipeline::common_names(&cfg)?;
            print!("{}", AnyReport::CommonNames(report).render());
        }
        Command::Synth(args) => {
            let s = &mut cfg.synth;
            set(&mut s.blocks, args.blocks);
            set(&mut s.authors_per_block, args.authors);
            set(&mut s.pubs_per_author, args.pubs);
            set(&mut s.bridge_rate, args.bridge_rate);
            set(&mut s.seed, args.seed);
            let out = args.out.unwrap_or(cfg.out_dir.clone());
            let summary = pipeline::synth(&cfg.synth, &out)?;
            println!(
                "{} records, {} names, {} planted authors -> {}",
                summary.records,
                summary.gold_blocks,
                summary.gold_authors,
                out.display()
            );
        }
        Command::Report { files } => {
            for path in files {
                let text = std::fs::read_to_string(&path).map_err(|e| AppError::io(&path, e))?;
                let report: AnyReport = serde_json::from_str(&text).map_err(|e| {
                    AppError::Data(format!("{}: not a namesake report: {e}", path.display()))
                })?;
                print!("{}", report.render());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
