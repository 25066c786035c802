//! Historical named-entity recognition pipeline.
//!
//! - [`corpus`]: ingestion (BRAT, JSONL, the public release layout), IOB2
//!   encoding, validation, stratified splitting and statistics.
//! - [`metrics`]: strict entity F1, token accuracy, Cohen's kappa and
//!   inter-annotator agreement reports.
//! - [`analysis`]: per-region TF-IDF term ranking.
//! - [`autodiff`]: a small reverse-mode differentiation engine.
//! - [`model`]: a windowed feed-forward token tagger with a NER head and a
//!   region discriminator head on shared features.
//! - [`training`]: baseline, gradient-reversal and loss-reversal training,
//!   evaluation, cross-region matrices and embedding export.
//! - [`synthetic`]: seeded corpus generators used by tests and benchmarks.

pub mod corpus;
pub mod autodiff;
pub mod metrics;
pub mod analysis;
pub mod model;
pub mod training;
pub mod synthetic;

pub use corpus::{Corpus, Document, EntityLabel, EntitySpan, Region, Sentence, Tag, TagSequence, Token};
