use std::fmt;

use serde::Serialize;

use super::{Corpus, EntityLabel, Region};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EntityCounts {
    /// Tokens covered by entities.
    pub tokens: usize,
    pub entities: usize,
    /// `tokens / entities`, 0 when there are no entities.
    pub tokens_per_entity: f64,
}

impl EntityCounts {
    fn add(&mut self, tokens: usize, entities: usize) {
        self.tokens += tokens;
        self.entities += entities;
        self.tokens_per_entity = if self.entities == 0 {
            0.0
        } else {
            self.tokens as f64 / self.entities as f64
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelStats {
    pub label: EntityLabel,
    pub per_region: Vec<(Region, EntityCounts)>,
    pub total: EntityCounts,
}

/// Entity statistics keyed by label and region, plus corpus totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sentences: usize,
    pub tokens: usize,
    pub labels: Vec<LabelStats>,
    pub total: EntityCounts,
}

impl CorpusStats {
    pub fn get(&self, label: EntityLabel, region: Region) -> EntityCounts {
        self.labels[label.index()].per_region[region.code()].1
    }

    pub fn label_total(&self, label: EntityLabel) -> EntityCounts {
        self.labels[label.index()].total
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut grid = [[EntityCounts::default(); Region::COUNT]; 5];
    let mut tokens = 0;
    let mut sentences = 0;
    for s in corpus.sentences() {
        sentences += 1;
        tokens += s.len();
        for span in &s.spans {
            grid[span.label.index()][s.region.code()].add(span.len(), 1);
        }
    }
    let mut total = EntityCounts::default();
    let labels = EntityLabel::ALL
        .iter()
        .map(|&label| {
            let mut label_total = EntityCounts::default();
            let per_region = Region::ALL
                .iter()
                .map(|&r| {
                    let c = grid[label.index()][r.code()];
                    label_total.add(c.tokens, c.entities);
                    (r, c)
                })
                .collect();
            total.add(label_total.tokens, label_total.entities);
            LabelStats {
                label,
                per_region,
                total: label_total,
            }
        })
        .collect();
    CorpusStats {
        sentences,
        tokens,
        labels,
        total,
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:<14} {:>10} {:>10} {:>10}",
            "Entity", "Region", "Tokens", "Entities", "Tok/Ent"
        )?;
        for l in &self.labels {
            for (r, c) in &l.per_region {
                writeln!(
                    f,
                    "{:<14} {:<14} {:>10} {:>10} {:>10.2}",
                    l.label.name(),
                    r.name(),
                    c.tokens,
                    c.entities,
                    c.tokens_per_entity
                )?;
            }
            writeln!(
                f,
                "{:<14} {:<14} {:>10} {:>10} {:>10.2}",
                l.label.name(),
                "Total",
                l.total.tokens,
                l.total.entities,
                l.total.tokens_per_entity
            )?;
        }
        writeln!(
            f,
            "{:<14} {:<14} {:>10} {:>10} {:>10.2}",
            "Total", "-", self.total.tokens, self.total.entities, self.total.tokens_per_entity
        )?;
        write!(f, "sentences: {}  tokens: {}", self.sentences, self.tokens)
    }
}
