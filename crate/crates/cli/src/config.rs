use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use graphbench_core::client::ModelConfig;
use graphbench_core::prompt::{expand_strategies, MstMode, RenderOptions, DEFAULT_EXEMPLAR_SEED};
use graphbench_core::{Bucket, Strategy, Style, Task};
use serde::{Deserialize, Serialize};

pub const DEFAULT_STRATEGIES: [&str; 6] = ["0-shot", "k-shot", "bag", "0-cot", "pseudo", "pseudo+k-shot"];
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_PARALLEL: usize = 4;

/// Settings shared by the config file and the command line. Every field is
/// optional so that a flag only overrides what it names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub seed: Option<u64>,
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub tasks: Option<Vec<String>>,
    pub buckets: Option<Vec<String>>,
    pub strategies: Option<Vec<String>>,
    pub styles: Option<Vec<String>>,
    pub shots: Option<Vec<usize>>,
    pub backend: Option<String>,
    pub parallel: Option<usize>,
    pub cache: Option<PathBuf>,
    pub mst_mode: Option<MstMode>,
    pub label_base: Option<usize>,
    pub exemplar_seed: Option<u64>,
    pub model: Option<ModelConfig>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `over` win; the rest come from `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            seed: over.seed.or(self.seed),
            dataset: over.dataset.or(self.dataset),
            out: over.out.or(self.out),
            tasks: over.tasks.or(self.tasks),
            buckets: over.buckets.or(self.buckets),
            strategies: over.strategies.or(self.strategies),
            styles: over.styles.or(self.styles),
            shots: over.shots.or(self.shots),
            backend: over.backend.or(self.backend),
            parallel: over.parallel.or(self.parallel),
            cache: over.cache.or(self.cache),
            mst_mode: over.mst_mode.or(self.mst_mode),
            label_base: over.label_base.or(self.label_base),
            exemplar_seed: over.exemplar_seed.or(self.exemplar_seed),
            model: over.model.or(self.model),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn tasks(&self) -> Result<Vec<Task>> {
        match &self.tasks {
            None => Ok(Task::ALL.to_vec()),
            Some(names) => {
                let mut out: Vec<Task> =
                    names.iter().map(|n| n.parse::<Task>().map_err(anyhow::Error::msg)).collect::<Result<_>>()?;
                out.sort();
                out.dedup();
                Ok(out)
            }
        }
    }

    pub fn buckets(&self) -> Result<Vec<Bucket>> {
        match &self.buckets {
            None => Ok(Bucket::ALL.to_vec()),
            Some(names) => {
                let mut out: Vec<Bucket> =
                    names.iter().map(|n| n.parse::<Bucket>().map_err(anyhow::Error::msg)).collect::<Result<_>>()?;
                out.sort();
                out.dedup();
                Ok(out)
            }
        }
    }

    pub fn strategies(&self) -> Result<Vec<Strategy>> {
        let tokens: Vec<String> = match &self.strategies {
            Some(t) => t.clone(),
            None => DEFAULT_STRATEGIES.iter().map(|s| s.to_string()).collect(),
        };
        let styles: Vec<Style> = match &self.styles {
            Some(names) => names.iter().map(|n| n.parse::<Style>()).collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        let shots = self.shots.clone().unwrap_or_default();
        if shots.contains(&0) {
            bail!("--shots must be at least 1");
        }
        let out = expand_strategies(&tokens, &shots, &styles)?;
        if out.is_empty() {
            bail!("no strategies selected");
        }
        Ok(out)
    }

    pub fn parallel(&self) -> Result<usize> {
        match self.parallel.unwrap_or(DEFAULT_PARALLEL) {
            0 => bail!("--parallel must be at least 1"),
            p => Ok(p),
        }
    }

    pub fn render_options(&self) -> RenderOptions {
        RenderOptions {
            label_base: self.label_base,
            mst_mode: self.mst_mode.unwrap_or_default(),
            exemplar_seed: self.exemplar_seed.unwrap_or(DEFAULT_EXEMPLAR_SEED),
        }
    }
}
