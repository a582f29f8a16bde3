use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::complexity::SimpsonEstimator;
use crate::corpus::{Month, PromptTag};
use crate::error::{Error, Result};
use crate::lexicon::LexiconFormat;
use crate::report::Format;
use crate::stats::{Adjustment, Center, TTestMode};
use crate::synthgen::{SynthSpec, TraitSpec};
use crate::traitlab::{Featurization, ModelKind};

/// Whole-pipeline configuration, read from TOML. Relative paths resolve
/// against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub skip_bad: bool,
    pub input: InputConfig,
    pub features: FeaturesConfig,
    pub trend: TrendConfig,
    pub compare: CompareConfig,
    pub traits: TraitsConfig,
    pub lexicon: LexiconConfig,
    pub synth: SynthConfig,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            out: PathBuf::from("out"),
            format: Format::Csv,
            skip_bad: false,
            input: InputConfig::default(),
            features: FeaturesConfig::default(),
            trend: TrendConfig::default(),
            compare: CompareConfig::default(),
            traits: TraitsConfig::default(),
            lexicon: LexiconConfig::default(),
            synth: SynthConfig::default(),
            base_dir: PathBuf::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub documents: Option<PathBuf>,
    pub rewrites: Option<PathBuf>,
    pub parses: Option<PathBuf>,
    pub lexicons: Vec<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub external_predictions: Option<PathBuf>,
    pub min_words: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub simpson: SimpsonEstimator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrendConfig {
    /// First month coded ONSET = 1 (a date selects its month).
    pub onset: Month,
    pub min_docs: usize,
    pub granger: bool,
    pub max_lag: usize,
    pub detector_threshold: f64,
    pub adf_alpha: f64,
    /// Fix the AR(1) coefficient instead of searching the grid.
    pub fixed_rho: Option<f64>,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            onset: Month::new(2022, 11),
            min_docs: 2,
            granger: false,
            max_lag: 20,
            detector_threshold: 0.5,
            adf_alpha: 0.05,
            fixed_rho: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub levene_center: Center,
    pub similarity_threshold: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            levene_center: Center::Mean,
            similarity_threshold: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraitsConfig {
    pub names: Vec<String>,
    pub classifier: ModelKind,
    pub featurization: Featurization,
    pub k: usize,
    /// Number of seeds, derived from the global seed.
    pub seeds: usize,
    pub reg_grid: Vec<f64>,
    pub baseline_trials: usize,
    pub min_successful_runs: usize,
    /// Restrict rewrites to one llm/prompt cell.
    pub llm: Option<String>,
    pub prompt: Option<PromptTag>,
}

impl Default for TraitsConfig {
    fn default() -> Self {
        let e = crate::traitlab::ExperimentConfig::default();
        TraitsConfig {
            names: Vec::new(),
            classifier: e.classifier,
            featurization: e.featurization,
            k: e.k,
            seeds: e.seeds.len(),
            reg_grid: e.reg_grid,
            baseline_trials: e.baseline_trials,
            min_successful_runs: e.min_successful_runs,
            llm: None,
            prompt: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Concatenate each author's documents before scoring.
    #[default]
    Author,
    Document,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconConfig {
    pub traits: Vec<String>,
    pub adjustment: Adjustment,
    pub t_test: TTestMode,
    pub aggregate: Aggregation,
    /// Use the bundled demonstration lexicon when no files are given.
    pub use_demo: bool,
    pub format: Option<LexiconFormat>,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        LexiconConfig {
            traits: Vec::new(),
            adjustment: Adjustment::Bonferroni,
            t_test: TTestMode::Welch,
            aggregate: Aggregation::Author,
            use_demo: false,
            format: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    #[default]
    Shock,
    Trait,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub shock: SynthSpec,
    #[serde(rename = "trait")]
    pub trait_spec: TraitSpec,
    pub compare_docs: usize,
    pub compare_shrink: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            kind: SynthKind::Shock,
            shock: SynthSpec::default(),
            trait_spec: TraitSpec::default(),
            compare_docs: 300,
            compare_shrink: 0.5,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.base_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.out)
    }

    /// Canonical text hashed into report provenance. The output directory
    /// is left out so reports do not depend on where they are written.
    pub fn canonical(&self) -> Result<String> {
        let mut c = self.clone();
        c.out = PathBuf::new();
        toml::to_string(&c).map_err(|e| Error::Invariant(format!("config serialization: {e}")))
    }

    pub fn documents_path(&self) -> Result<PathBuf> {
        self.input
            .documents
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| Error::invalid("config lacks input.documents"))
    }

    pub fn rewrites_path(&self) -> Result<PathBuf> {
        self.input
            .rewrites
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| Error::invalid("config lacks input.rewrites"))
    }

    /// Check that every referenced input exists.
    pub fn validate_paths(&self) -> Result<()> {
        let i = &self.input;
        for p in [&i.documents, &i.rewrites, &i.parses, &i.ratings, &i.external_predictions]
            .into_iter()
            .flatten()
            .chain(&i.lexicons)
        {
            let p = self.resolve(p);
            if !p.exists() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        let cfg = PipelineConfig::from_toml(
            r#"
            seed = 7
            [input]
            documents = "docs.jsonl"
            [trend]
            onset = "2022-11-30"
            granger = true
            [synth]
            kind = "trait"
            [synth.trait]
            n_authors = 40
            "#,
        )
        .unwrap();
        assert_eq!(cfg.trend.onset, Month::new(2022, 11));
        assert_eq!(cfg.synth.trait_spec.n_authors, 40);
        assert_eq!(cfg.traits.k, 5);
        let mut again = PipelineConfig::from_toml(&cfg.canonical().unwrap()).unwrap();
        again.out = cfg.out.clone();
        assert_eq!(again, cfg);
        assert!(PipelineConfig::from_toml("bogus = 1").is_err());
    }
}
