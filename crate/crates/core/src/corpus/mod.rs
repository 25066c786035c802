//! Corpus model and preprocessing: BRAT ingestion, tokenization, span
//! alignment, IOB2 encoding, validation, splitting and statistics.

mod brat;
mod io;
mod iob;
mod split;
mod stats;
mod tokenize;
mod types;
mod validate;

use std::path::Path;

use thiserror::Error;

pub use brat::{align_spans, brat_document, parse_brat, RawSpan};
pub use io::{export_conll, load_histnero_dir, load_jsonl, load_jsonl_file, save_jsonl};
pub use iob::{decode_iob, decode_iob_strings, encode_iob};
pub use split::{apply_split_file, sentence_key, split_dataset, CorpusSplit, SplitFile, SplitSpec};
pub use stats::{corpus_stats, CorpusStats, EntityCounts, LabelStats};
pub use tokenize::{tokenize, tokenize_at};
pub use types::{
    tokens_from_strings, Corpus, Document, EntityLabel, EntitySpan, Region, Sentence, Tag,
    TagSequence, Token, MAX_YEAR, MIN_YEAR,
};
pub use validate::{validate, EntitySpanRef, Violation};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Alignment { line: usize, message: String },
    #[error("line {line}: unsupported BRAT feature: {feature}")]
    Unsupported { line: usize, feature: &'static str },
    #[error("annotation {id} ({start}..{end}) does not cover any token of a single sentence")]
    SpanOutsideText { id: String, start: usize, end: usize },
    #[error("annotations {first} and {second} overlap after token alignment")]
    NestedAnnotation { first: String, second: String },
    #[error("spans overlap at token {token}")]
    OverlappingSpans { token: usize },
    #[error("span {first}..={last} outside a sentence of {n_tokens} tokens")]
    SpanOutOfRange {
        first: usize,
        last: usize,
        n_tokens: usize,
    },
    #[error("{tags} tags for {tokens} tokens")]
    LengthMismatch { tokens: usize, tags: usize },
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("unknown entity label `{0}`")]
    UnknownLabel(String),
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("split file: {0}")]
    SplitFile(String),
    #[error("cannot access {path}")]
    IoAt {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CorpusError {
    pub(crate) fn io_at(path: &Path, source: std::io::Error) -> Self {
        CorpusError::IoAt {
            path: path.display().to_string(),
            source,
        }
    }
}
