//! Experiment configuration, read from TOML and overridden by command-line
//! flags.
//!
//! ```toml
//! records = "data/records.jsonl"
//! gold = "data/gold.json"
//! out_dir = "results"
//! thresholds = [1, 3]
//! sample_count = 1000
//! seed = 2015
//!
//! [synth]
//! blocks = 28
//! bridge_rate = 0.2
//! ```

use std::path::{Path, PathBuf};

use namesake_core::synth::SynthConfig;
use namesake_core::{EvalConfig, FMode, LouvainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Canonical record file.
    pub records: Option<PathBuf>,
    /// Gold standard JSON.
    pub gold: Option<PathBuf>,
    /// Graph snapshot; when present it is used instead of rebuilding the
    /// network from `records`.
    pub graph: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub thresholds: Vec<u32>,
    pub sample_count: usize,
    /// Use every block instead of a sample.
    pub all_blocks: bool,
    /// Sampling seed. Required whenever blocks are sampled.
    pub seed: Option<u64>,
    pub alpha: f64,
    pub f_mode: FModeName,
    /// Names need strictly more publications than this to count as common.
    pub common_name_min_pubs: usize,
    pub min_gold_authors: usize,
    pub resolution: f64,
    pub louvain_restarts: usize,
    pub louvain_seed: u64,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    pub synth: SynthSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            records: None,
            gold: None,
            graph: None,
            out_dir: PathBuf::from("results"),
            thresholds: vec![1, 3],
            sample_count: 1000,
            all_blocks: false,
            seed: None,
            alpha: 0.5,
            f_mode: FModeName::PerItem,
            common_name_min_pubs: 200,
            min_gold_authors: 1,
            resolution: 1.0,
            louvain_restarts: LouvainConfig::default().restarts,
            louvain_seed: 0,
            workers: 0,
            synth: SynthSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FModeName {
    #[default]
    PerItem,
    HarmonicOfMeans,
}

impl From<FModeName> for FMode {
    fn from(m: FModeName) -> FMode {
        match m {
            FModeName::PerItem => FMode::PerItem,
            FModeName::HarmonicOfMeans => FMode::HarmonicOfMeans,
        }
    }
}

/// Serializable mirror of [`SynthConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSettings {
    pub blocks: usize,
    pub authors_per_block: [usize; 2],
    pub pubs_per_author: [usize; 2],
    pub coauthor_pool_ratio: f64,
    pub coauthors_per_pub: [usize; 2],
    pub bridge_rate: f64,
    pub common_pool: usize,
    pub seed: u64,
}

impl Default for SynthSettings {
    fn default() -> Self {
        SynthSettings::from(&SynthConfig::default())
    }
}

impl From<&SynthConfig> for SynthSettings {
    fn from(c: &SynthConfig) -> Self {
        SynthSettings {
            blocks: c.blocks,
            authors_per_block: c.authors_per_block.into(),
            pubs_per_author: c.pubs_per_author.into(),
            coauthor_pool_ratio: c.coauthor_pool_ratio,
            coauthors_per_pub: c.coauthors_per_pub.into(),
            bridge_rate: c.bridge_rate,
            common_pool: c.common_pool,
            seed: c.seed,
        }
    }
}

impl SynthSettings {
    pub fn to_core(&self) -> SynthConfig {
        SynthConfig {
            blocks: self.blocks,
            authors_per_block: self.authors_per_block.into(),
            pubs_per_author: self.pubs_per_author.into(),
            coauthor_pool_ratio: self.coauthor_pool_ratio,
            coauthors_per_pub: self.coauthors_per_pub.into(),
            bridge_rate: self.bridge_rate,
            common_pool: self.common_pool,
            seed: self.seed,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| AppError::Usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(AppError::Usage(m));
        if self.thresholds.is_empty() {
            return usage("at least one threshold is required".into());
        }
        if let Some(t) = self
            .thresholds
            .iter()
            .find(|&&t| t == 0 || t.is_multiple_of(2))
        {
            return usage(format!("threshold {t} is not an odd distance >= 1"));
        }
        if self.sample_count == 0 {
            return usage("sample count must be at least 1".into());
        }
        self.eval_config()
            .validate()
            .map_err(|e| AppError::Usage(e.to_string()))?;
        self.louvain_config()
            .validate()
            .map_err(|e| AppError::Usage(e.to_string()))?;
        self.synth
            .to_core()
            .validate()
            .map_err(|e| AppError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            alpha: self.alpha,
            f_mode: self.f_mode.into(),
        }
    }

    pub fn louvain_config(&self) -> LouvainConfig {
        LouvainConfig {
            resolution: self.resolution,
            restarts: self.louvain_restarts,
            seed: self.louvain_seed,
            ..LouvainConfig::default()
        }
    }

    /// Thresholds in ascending order without repeats.
    pub fn sorted_thresholds(&self) -> Vec<u32> {
        let mut t = self.thresholds.clone();
        t.sort_unstable();
        t.dedup();
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_experiments() {
        let c = ExperimentConfig::default();
        assert_eq!(c.thresholds, [1, 3]);
        assert_eq!(c.sample_count, 1000);
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.common_name_min_pubs, 200);
        assert_eq!(c.resolution, 1.0);
        assert!(c.validate().is_ok());
        assert_eq!(c.synth.to_core(), SynthConfig::default());
    }

    #[test]
    fn toml_overrides_defaults() {
        let c = ExperimentConfig::from_toml(
            "thresholds = [3]\nseed = 7\nf_mode = \"harmonic-of-means\"\n[synth]\nblocks = 3\nauthors_per_block = [2, 2]\n",
        )
        .unwrap();
        assert_eq!(c.thresholds, [3]);
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.f_mode, FModeName::HarmonicOfMeans);
        assert_eq!(c.synth.blocks, 3);
        assert_eq!(c.synth.authors_per_block, [2, 2]);
        assert_eq!(c.sample_count, 1000);
    }

    #[test]
    fn bad_configs_are_usage_errors() {
        assert!(ExperimentConfig::from_toml("colour = 1").is_err());
        for text in [
            "thresholds = [2]",
            "thresholds = []",
            "alpha = 1.0",
            "sample_count = 0",
            "resolution = 0.0",
        ] {
            let c = ExperimentConfig::from_toml(text).unwrap();
            assert_eq!(c.validate().unwrap_err().exit_code(), 1, "{text}");
        }
    }
}
