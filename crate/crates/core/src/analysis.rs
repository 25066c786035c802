//! Per-region TF-IDF term ranking.
//!
//! Each region is one virtual document (the concatenation of its sentences).
//! `tf = ln(1 + count)` (or the raw count), `idf = ln(N / df)` where `N` is
//! the number of regions present and `df` the number of regions using the
//! term. No vector normalization is applied.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Region};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfWeighting {
    #[default]
    Log,
    Raw,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TfIdfOptions {
    pub tf: TfWeighting,
    /// Lowercase terms to ignore. Empty by default.
    pub stopwords: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TfIdfEntry {
    pub term: String,
    pub region: Region,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRanking {
    pub region: Region,
    pub entries: Vec<TfIdfEntry>,
}

/// Lowercased term of a token, or `None` for pure punctuation.
pub fn term_of(token: &str) -> Option<String> {
    token
        .chars()
        .any(char::is_alphanumeric)
        .then(|| token.to_lowercase())
}

fn region_counts(corpus: &Corpus, options: &TfIdfOptions) -> BTreeMap<Region, HashMap<String, usize>> {
    let regions: BTreeSet<Region> = corpus.sentences().map(|s| s.region).collect();
    regions
        .into_par_iter()
        .map(|region| {
            let mut counts: HashMap<String, usize> = HashMap::new();
            for s in corpus.sentences().filter(|s| s.region == region) {
                for t in &s.tokens {
                    if let Some(term) = term_of(&t.text) {
                        if !options.stopwords.contains(&term) {
                            *counts.entry(term).or_default() += 1;
                        }
                    }
                }
            }
            (region, counts)
        })
        .collect()
}

/// Every term's score in every region where it occurs.
pub fn tfidf_scores(corpus: &Corpus, options: &TfIdfOptions) -> BTreeMap<Region, BTreeMap<String, f64>> {
    let counts = region_counts(corpus, options);
    let n = counts.len();
    if n == 1 {
        log::warn!("TF-IDF over a single region: every idf is 0");
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for c in counts.values() {
        for term in c.keys() {
            *df.entry(term.as_str()).or_default() += 1;
        }
    }
    counts
        .iter()
        .map(|(&region, c)| {
            let scores = c
                .iter()
                .map(|(term, &count)| {
                    let tf = match options.tf {
                        TfWeighting::Log => (count as f64).ln_1p(),
                        TfWeighting::Raw => count as f64,
                    };
                    let idf = (n as f64 / df[term.as_str()] as f64).ln();
                    (term.clone(), tf * idf)
                })
                .collect();
            (region, scores)
        })
        .collect()
}

/// The `k` highest-scoring terms of each region present in the corpus,
/// ordered by descending score and then ascending term.
pub fn tfidf_top_k(corpus: &Corpus, k: usize, options: &TfIdfOptions) -> Result<Vec<RegionRanking>, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::ZeroK);
    }
    Ok(tfidf_scores(corpus, options)
        .into_iter()
        .map(|(region, scores)| {
            let mut entries: Vec<TfIdfEntry> = scores
                .into_iter()
                .map(|(term, score)| TfIdfEntry { term, region, score })
                .collect();
            entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
            entries.truncate(k);
            RegionRanking { region, entries }
        })
        .collect())
}

/// Tab-separated `region, rank, term, score` with a header row.
pub fn write_tsv<W: Write>(rankings: &[RegionRanking], mut out: W) -> io::Result<()> {
    writeln!(out, "region\trank\tterm\tscore")?;
    for r in rankings {
        for (i, e) in r.entries.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{:.6}", r.region.name(), i + 1, e.term, e.score)?;
        }
    }
    Ok(())
}
