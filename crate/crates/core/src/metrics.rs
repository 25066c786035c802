//! Entity-level strict F1, token accuracy, Cohen's kappa and
//! inter-annotator agreement.
//!
//! Conventions: precision, recall and F1 are 0 whenever their denominator is
//! 0. Kappa is computed at token level over the 11 IOB2 tags (including `O`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, EntityLabel, EntitySpan, Region, Tag, TagSequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("no items to score")]
    Empty,
    #[error("kappa undefined: both annotators use a single identical class distribution but disagree")]
    DegenerateMarginals,
    #[error("annotation layers differ: {0}")]
    LayerMismatch(String),
}

/// Precision, recall and F1 with the counts they were computed from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp as f64, (tp + fp) as f64);
        let recall = ratio(tp as f64, (tp + fn_) as f64);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        Self {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F1Report {
    pub overall: Prf,
    pub per_label: BTreeMap<EntityLabel, Prf>,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

/// Strict matching: a predicted span is a true positive iff an as yet
/// unmatched gold span has the same label and the same first and last token.
/// Overall scores are micro-averaged; per-label scores only look at spans of
/// that label.
pub fn strict_f1(gold: &[Vec<EntitySpan>], pred: &[Vec<EntitySpan>]) -> Result<F1Report, MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::LengthMismatch {
            what: "sentence count",
            left: gold.len(),
            right: pred.len(),
        });
    }
    let mut per = [Counts::default(); 5];
    for (g, p) in gold.iter().zip(pred) {
        let mut unmatched: HashMap<EntitySpan, usize> = HashMap::new();
        for s in g {
            *unmatched.entry(*s).or_default() += 1;
        }
        for s in p {
            let c = &mut per[s.label.index()];
            match unmatched.get_mut(s) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    c.tp += 1;
                }
                _ => c.fp += 1,
            }
        }
        for (s, n) in unmatched {
            per[s.label.index()].fn_ += n;
        }
    }
    let total = per.iter().fold(Counts::default(), |a, c| Counts {
        tp: a.tp + c.tp,
        fp: a.fp + c.fp,
        fn_: a.fn_ + c.fn_,
    });
    Ok(F1Report {
        overall: Prf::from_counts(total.tp, total.fp, total.fn_),
        per_label: EntityLabel::ALL
            .iter()
            .map(|&l| {
                let c = per[l.index()];
                (l, Prf::from_counts(c.tp, c.fp, c.fn_))
            })
            .collect(),
    })
}

fn check_aligned(a: &[TagSequence], b: &[TagSequence]) -> Result<usize, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            what: "sentence count",
            left: a.len(),
            right: b.len(),
        });
    }
    let mut total = 0;
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() {
            return Err(MetricsError::LengthMismatch {
                what: "sentence length",
                left: x.len(),
                right: y.len(),
            });
        }
        total += x.len();
    }
    Ok(total)
}

/// Fraction of tokens whose predicted tag equals the gold tag, over all 11
/// tags including `O`.
pub fn token_accuracy(gold: &[TagSequence], pred: &[TagSequence]) -> Result<f64, MetricsError> {
    let total = check_aligned(gold, pred)?;
    if total == 0 {
        return Err(MetricsError::Empty);
    }
    let correct = gold
        .iter()
        .zip(pred)
        .flat_map(|(g, p)| g.iter().zip(p.iter()))
        .filter(|(g, p)| g == p)
        .count();
    Ok(correct as f64 / total as f64)
}

/// Cohen's kappa over two aligned label sequences drawn from `0..classes`.
pub fn kappa_from_labels(a: &[usize], b: &[usize], classes: usize) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            what: "sequence length",
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = a.len() as f64;
    let mut ca = vec![0usize; classes];
    let mut cb = vec![0usize; classes];
    let mut agree = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        ca[x] += 1;
        cb[y] += 1;
        agree += usize::from(x == y);
    }
    let p_o = agree as f64 / n;
    let p_e: f64 = ca
        .iter()
        .zip(&cb)
        .map(|(&x, &y)| (x as f64 / n) * (y as f64 / n))
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return if agree == a.len() {
            Ok(1.0)
        } else {
            Err(MetricsError::DegenerateMarginals)
        };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Token-level Cohen's kappa over the IOB2 tag alphabet.
pub fn cohens_kappa(tags_a: &[TagSequence], tags_b: &[TagSequence]) -> Result<f64, MetricsError> {
    check_aligned(tags_a, tags_b)?;
    let flat = |seqs: &[TagSequence]| -> Vec<usize> {
        seqs.iter().flat_map(|s| s.iter().map(|t| t.index())).collect()
    };
    kappa_from_labels(&flat(tags_a), &flat(tags_b), Tag::COUNT)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    pub kappa: f64,
    /// Strict F1 of annotator B against annotator A as reference.
    pub f1: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub overall: Agreement,
    pub per_region: BTreeMap<Region, Agreement>,
    pub per_label: BTreeMap<EntityLabel, Agreement>,
}

fn restrict_tags(tags: &TagSequence, label: EntityLabel) -> TagSequence {
    TagSequence(
        tags.iter()
            .map(|&t| if t.label() == Some(label) { t } else { Tag::O })
            .collect(),
    )
}

fn restrict_spans(spans: &[EntitySpan], label: EntityLabel) -> Vec<EntitySpan> {
    spans.iter().filter(|s| s.label == label).copied().collect()
}

struct Layers {
    region: Vec<Region>,
    tags_a: Vec<TagSequence>,
    tags_b: Vec<TagSequence>,
    spans_a: Vec<Vec<EntitySpan>>,
    spans_b: Vec<Vec<EntitySpan>>,
}

fn aligned_layers(ann_a: &Corpus, ann_b: &Corpus) -> Result<Layers, MetricsError> {
    let by_id: HashMap<&str, _> = ann_b.documents().iter().map(|d| (d.id.as_str(), d)).collect();
    if by_id.len() != ann_a.documents().len() {
        return Err(MetricsError::LayerMismatch(format!(
            "{} documents vs {}",
            ann_a.documents().len(),
            by_id.len()
        )));
    }
    let mut layers = Layers {
        region: Vec::new(),
        tags_a: Vec::new(),
        tags_b: Vec::new(),
        spans_a: Vec::new(),
        spans_b: Vec::new(),
    };
    for da in ann_a.documents() {
        let db = by_id
            .get(da.id.as_str())
            .ok_or_else(|| MetricsError::LayerMismatch(format!("document `{}` missing", da.id)))?;
        if da.sentences.len() != db.sentences.len() {
            return Err(MetricsError::LayerMismatch(format!(
                "document `{}` has {} vs {} sentences",
                da.id,
                da.sentences.len(),
                db.sentences.len()
            )));
        }
        for (i, (sa, sb)) in da.sentences.iter().zip(&db.sentences).enumerate() {
            if sa.words().ne(sb.words()) {
                return Err(MetricsError::LayerMismatch(format!(
                    "document `{}` sentence {i} is tokenized differently",
                    da.id
                )));
            }
            layers.region.push(sa.region);
            layers.tags_a.push(sa.tags.clone());
            layers.tags_b.push(sb.tags.clone());
            layers.spans_a.push(sa.spans.clone());
            layers.spans_b.push(sb.spans.clone());
        }
    }
    Ok(layers)
}

fn agreement(
    tags_a: &[TagSequence],
    tags_b: &[TagSequence],
    spans_a: &[Vec<EntitySpan>],
    spans_b: &[Vec<EntitySpan>],
) -> Result<Agreement, MetricsError> {
    Ok(Agreement {
        kappa: cohens_kappa(tags_a, tags_b)?,
        f1: strict_f1(spans_a, spans_b)?.overall,
    })
}

/// Agreement between two annotation layers of the same tokenized documents,
/// overall, per region and per entity label. For a label, both layers are
/// restricted to that label's tags and spans before scoring.
pub fn iaa_report(ann_a: &Corpus, ann_b: &Corpus) -> Result<AgreementReport, MetricsError> {
    let l = aligned_layers(ann_a, ann_b)?;
    let overall = agreement(&l.tags_a, &l.tags_b, &l.spans_a, &l.spans_b)?;

    let mut per_region = BTreeMap::new();
    for r in Region::ALL {
        let idx: Vec<usize> = (0..l.region.len()).filter(|&i| l.region[i] == r).collect();
        if idx.is_empty() {
            continue;
        }
        let pick_t = |v: &[TagSequence]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        let pick_s = |v: &[Vec<EntitySpan>]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        per_region.insert(
            r,
            agreement(
                &pick_t(&l.tags_a),
                &pick_t(&l.tags_b),
                &pick_s(&l.spans_a),
                &pick_s(&l.spans_b),
            )?,
        );
    }

    let mut per_label = BTreeMap::new();
    for label in EntityLabel::ALL {
        let ta: Vec<_> = l.tags_a.iter().map(|t| restrict_tags(t, label)).collect();
        let tb: Vec<_> = l.tags_b.iter().map(|t| restrict_tags(t, label)).collect();
        let sa: Vec<_> = l.spans_a.iter().map(|s| restrict_spans(s, label)).collect();
        let sb: Vec<_> = l.spans_b.iter().map(|s| restrict_spans(s, label)).collect();
        per_label.insert(label, agreement(&ta, &tb, &sa, &sb)?);
    }
    Ok(AgreementReport {
        overall,
        per_region,
        per_label,
    })
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>8} {:>8}", "Group", "CK", "F1")?;
        let row = |f: &mut fmt::Formatter<'_>, name: &str, a: &Agreement| {
            writeln!(f, "{:<14} {:>8.1} {:>8.1}", name, a.kappa * 100.0, a.f1.f1 * 100.0)
        };
        for (r, a) in &self.per_region {
            row(f, r.name(), a)?;
        }
        for (l, a) in &self.per_label {
            row(f, l.name(), a)?;
        }
        row(f, "Total", &self.overall)
    }
}
