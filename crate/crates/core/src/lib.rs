//! Stylometric drift toolkit.
//!
//! Measures lexical and syntactic complexity of documents, tracks the
//! between-document variance of those measures month by month, tests for
//! level/slope shocks and Granger-causal links to an AI-attribution rate,
//! quantifies how rewrites erode trait-predictive signal, and runs
//! dictionary-category association batteries.
//!
//! The crate is organized by stage:
//!
//! - [`corpus`]: document, parse and rewrite-pair ingestion, tokenization
//! - [`complexity`]: per-document complexity features and composite score
//! - [`timeseries`]: monthly variance series, reliability, ADF, growth model, Granger
//! - [`seed`]: seed derivation for reproducible random streams
//! - [`stats`]: distributions and the hypothesis-test battery
//! - [`similarity`]: embedding cosine reports and rating agreement
//! - [`traitlab`]: TF-IDF linear classifiers and the rewrite-erosion harness
//! - [`lexicon`]: dictionary loading, category ratios and association tests
//! - [`synthgen`]: ground-truth synthetic corpora
//! - [`pipeline`]: config-driven report generation behind the `stylodrift` binary

pub mod complexity;
pub mod corpus;
pub mod error;
pub mod lexicon;
mod linalg;
pub mod pipeline;
pub mod report;
pub mod similarity;
pub mod seed;
pub mod stats;
pub mod synthgen;
pub mod timeseries;
pub mod traitlab;

pub use error::{Error, Result};
pub use pipeline::PipelineConfig;
