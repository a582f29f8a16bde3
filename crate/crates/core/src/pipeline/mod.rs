//! Config-driven orchestration behind the `stylodrift` binary.
//!
//! Each command reads inputs named in a [`PipelineConfig`], writes its
//! reports into the output directory and returns an [`Outcome`]. Errors
//! map onto stable exit codes with [`exit_code`].

mod config;
mod corpus_cmds;
mod model_cmds;

pub use config::{
    Aggregation, CompareConfig, FeaturesConfig, InputConfig, LexiconConfig, PipelineConfig, SynthConfig, SynthKind,
    TraitsConfig, TrendConfig,
};
pub use corpus_cmds::{cmd_compare, cmd_features, cmd_similarity, cmd_trend};
pub use model_cmds::{cmd_lexicon, cmd_synth, cmd_traits};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::complexity::{compute_features, ComplexityVector, FeatureOptions};
use crate::corpus::{load_conllu, load_documents, tokenize, Document, SentenceParse, TokenStream};
use crate::error::{Error, Result};
use crate::report::Provenance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INSUFFICIENT: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

/// 2 for input problems, 3 for insufficient data, 4 for internal
/// invariant violations.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. }
        | Error::Malformed { .. }
        | Error::DuplicateId(_)
        | Error::DegenerateDocument(_)
        | Error::InvalidInput(_) => EXIT_INPUT,
        Error::InsufficientData(_) | Error::ZeroVariance(_) | Error::Singular(_) => EXIT_INSUFFICIENT,
        Error::Invariant(_) => EXIT_INVARIANT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Features,
    Trend,
    Compare,
    Similarity,
    Traits,
    Lexicon,
    Synth,
}

/// What a command wrote, plus warnings that set a nonzero status.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub status: i32,
}

impl Outcome {
    fn warn(&mut self, status: i32, message: impl Into<String>) {
        let m = message.into();
        log::warn!("{m}");
        self.warnings.push(m);
        self.status = self.status.max(status);
    }
}

pub fn run(command: Command, cfg: &PipelineConfig) -> Result<Outcome> {
    match command {
        Command::Features => cmd_features(cfg),
        Command::Trend => cmd_trend(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Similarity => cmd_similarity(cfg),
        Command::Traits => cmd_traits(cfg),
        Command::Lexicon => cmd_lexicon(cfg),
        Command::Synth => cmd_synth(cfg),
    }
}

struct Ctx {
    prov: Provenance,
    out: PathBuf,
}

fn context(cfg: &PipelineConfig) -> Result<Ctx> {
    cfg.validate_paths()?;
    output_context(cfg)
}

fn output_context(cfg: &PipelineConfig) -> Result<Ctx> {
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    Ok(Ctx {
        prov: Provenance::for_config(&cfg.canonical()?),
        out,
    })
}

fn load_docs(cfg: &PipelineConfig, path: &Path) -> Result<Vec<Document>> {
    let docs = load_documents(path, cfg.input.min_words)?;
    log::info!("loaded {} documents from {}", docs.len(), path.display());
    Ok(docs)
}

fn load_parses(cfg: &PipelineConfig) -> Result<BTreeMap<String, Vec<SentenceParse>>> {
    match &cfg.input.parses {
        Some(p) => load_conllu(cfg.resolve(p)),
        None => Ok(BTreeMap::new()),
    }
}

/// Complexity vectors aligned with `docs`; `None` marks a degenerate
/// document skipped under `skip_bad`.
fn feature_vectors(
    cfg: &PipelineConfig,
    docs: &[Document],
    parses: &BTreeMap<String, Vec<SentenceParse>>,
    outcome: &mut Outcome,
) -> Result<Vec<Option<ComplexityVector>>> {
    use rayon::prelude::*;
    let opts = FeatureOptions {
        simpson: cfg.features.simpson,
    };
    let results: Vec<Result<ComplexityVector>> = docs
        .par_iter()
        .map(|d| {
            let tokens = tokenize(d)?;
            if tokens.len() < 2 {
                return Err(Error::DegenerateDocument(d.id.clone()));
            }
            compute_features(&tokens, parses.get(&d.id).map(Vec::as_slice), opts)
        })
        .collect();
    let mut out = Vec::with_capacity(docs.len());
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(v) => out.push(Some(v)),
            Err(Error::DegenerateDocument(id)) if cfg.skip_bad => {
                log::warn!("skipping degenerate document `{id}`");
                skipped += 1;
                out.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    if skipped > 0 {
        outcome.warnings.push(format!("skipped {skipped} degenerate documents"));
        log::warn!("skipped {skipped} degenerate documents");
    }
    Ok(out)
}

fn tokens_or_skip(cfg: &PipelineConfig, docs: &[Document]) -> Result<Vec<Option<TokenStream>>> {
    docs.iter()
        .map(|d| match tokenize(d) {
            Ok(t) => Ok(Some(t)),
            Err(Error::DegenerateDocument(id)) if cfg.skip_bad => {
                log::warn!("skipping degenerate document `{id}`");
                Ok(None)
            }
            Err(e) => Err(e),
        })
        .collect()
}

/// File-name-safe form of a label.
fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_contract() {
        assert_eq!(exit_code(&Error::invalid("x")), 2);
        assert_eq!(exit_code(&Error::DuplicateId("x".into())), 2);
        assert_eq!(exit_code(&Error::insufficient("x")), 3);
        assert_eq!(exit_code(&Error::Invariant("x".into())), 4);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("big five/open"), "big_five_open");
    }
}
