use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::TrainError;
use crate::corpus::{decode_iob, Corpus, EntityLabel, Region, TagSequence};
use crate::metrics::{strict_f1, token_accuracy};
use crate::model::{argmax_rows, featurize, tags_from_logits, TaggerParams};

const EVAL_CHUNK: usize = 64;

/// Model output for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub tags: TagSequence,
    /// Argmax region code of the discriminator at every token.
    pub domains: Vec<usize>,
}

/// Runs the tagger over every sentence of `corpus`, in corpus order.
pub fn predict_corpus(params: &TaggerParams, corpus: &Corpus) -> Result<Vec<Prediction>, TrainError> {
    let vocab = params.config().vocab_size;
    let ids: Vec<Vec<usize>> = corpus
        .sentences()
        .map(|s| featurize(&s.words().collect::<Vec<_>>(), vocab))
        .collect();
    if ids.iter().any(Vec::is_empty) {
        return Err(TrainError::Model(crate::model::ModelError::EmptySentence));
    }
    let chunks: Vec<Vec<Prediction>> = ids
        .par_chunks(EVAL_CHUNK)
        .map(|chunk| {
            let out = params.forward(chunk)?;
            Ok(out
                .into_iter()
                .map(|o| Prediction {
                    tags: tags_from_logits(&o.ner_logits),
                    domains: argmax_rows(&o.domain_logits),
                })
                .collect())
        })
        .collect::<Result<_, TrainError>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub accuracy: f64,
    pub f1: f64,
}

/// Accuracy and strict F1 per region and overall, F1 per entity label.
/// Regions absent from the evaluated subset are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub sentences: usize,
    pub tokens: usize,
    pub per_region: BTreeMap<Region, Option<Scores>>,
    pub per_label: BTreeMap<EntityLabel, f64>,
    pub overall: Scores,
    /// Token accuracy of the region discriminator, when predictions carry it.
    pub domain_accuracy: Option<f64>,
}

fn scores(gold: &[&TagSequence], pred: &[&TagSequence]) -> Result<Scores, TrainError> {
    let g: Vec<TagSequence> = gold.iter().map(|t| (*t).clone()).collect();
    let p: Vec<TagSequence> = pred.iter().map(|t| (*t).clone()).collect();
    let gs: Vec<_> = g.iter().map(decode_iob).collect();
    let ps: Vec<_> = p.iter().map(decode_iob).collect();
    Ok(Scores {
        accuracy: token_accuracy(&g, &p)?,
        f1: strict_f1(&gs, &ps)?.overall.f1,
    })
}

/// Scores predicted tag sequences (one per sentence, corpus order) against
/// the corpus annotations. Predictions are decoded with the IOB repair rule.
pub fn evaluate_predictions(
    corpus: &Corpus,
    predicted: &[TagSequence],
    domains: Option<&[Vec<usize>]>,
) -> Result<EvalReport, TrainError> {
    let sentences: Vec<_> = corpus.sentences().collect();
    if sentences.is_empty() {
        return Err(TrainError::EmptySubset("evaluation"));
    }
    if predicted.len() != sentences.len() {
        return Err(TrainError::Metrics(crate::metrics::MetricsError::LengthMismatch {
            what: "predicted sentences",
            left: sentences.len(),
            right: predicted.len(),
        }));
    }
    let gold: Vec<&TagSequence> = sentences.iter().map(|s| &s.tags).collect();
    let pred: Vec<&TagSequence> = predicted.iter().collect();
    let overall = scores(&gold, &pred)?;

    let mut per_region = BTreeMap::new();
    for r in Region::ALL {
        let idx: Vec<usize> = (0..sentences.len()).filter(|&i| sentences[i].region == r).collect();
        let entry = if idx.is_empty() {
            None
        } else {
            let g: Vec<_> = idx.iter().map(|&i| gold[i]).collect();
            let p: Vec<_> = idx.iter().map(|&i| pred[i]).collect();
            Some(scores(&g, &p)?)
        };
        per_region.insert(r, entry);
    }

    let gs: Vec<_> = gold.iter().map(|t| decode_iob(t)).collect();
    let ps: Vec<_> = pred.iter().map(|t| decode_iob(t)).collect();
    let per_label = strict_f1(&gs, &ps)?
        .per_label
        .into_iter()
        .map(|(l, prf)| (l, prf.f1))
        .collect();

    let domain_accuracy = match domains {
        Some(d) => {
            let mut hit = 0usize;
            let mut total = 0usize;
            for (s, ds) in sentences.iter().zip(d) {
                hit += ds.iter().filter(|&&x| x == s.region.code()).count();
                total += ds.len();
            }
            Some(hit as f64 / total.max(1) as f64)
        }
        None => None,
    };
    Ok(EvalReport {
        sentences: sentences.len(),
        tokens: sentences.iter().map(|s| s.len()).sum(),
        per_region,
        per_label,
        overall,
        domain_accuracy,
    })
}

pub fn evaluate(params: &TaggerParams, corpus: &Corpus) -> Result<EvalReport, TrainError> {
    if corpus.sentence_count() == 0 {
        return Err(TrainError::EmptySubset("evaluation"));
    }
    let preds = predict_corpus(params, corpus)?;
    let (tags, domains): (Vec<_>, Vec<_>) = preds.into_iter().map(|p| (p.tags, p.domains)).unzip();
    evaluate_predictions(corpus, &tags, Some(&domains))
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |x: Option<f64>| match x {
            Some(v) => format!("{:>7.2}", v * 100.0),
            None => format!("{:>7}", "-"),
        };
        write!(f, "{:<8}", "")?;
        for r in Region::ALL {
            write!(f, " {:>7} {:>7}", format!("{} Acc", r.short()), "F1")?;
        }
        writeln!(f, " {:>7} {:>7}", "Total", "F1")?;
        write!(f, "{:<8}", "tagger")?;
        for s in self.per_region.values() {
            write!(f, " {} {}", cell(s.map(|s| s.accuracy)), cell(s.map(|s| s.f1)))?;
        }
        writeln!(
            f,
            " {} {}",
            cell(Some(self.overall.accuracy)),
            cell(Some(self.overall.f1))
        )?;
        writeln!(f)?;
        for l in EntityLabel::ALL {
            write!(f, " {:>13}", l.name())?;
        }
        writeln!(f)?;
        for l in EntityLabel::ALL {
            write!(f, " {:>13.2}", self.per_label[&l] * 100.0)?;
        }
        writeln!(f)?;
        if let Some(d) = self.domain_accuracy {
            writeln!(f, "discriminator accuracy: {:.2}", d * 100.0)?;
        }
        write!(f, "sentences: {}  tokens: {}", self.sentences, self.tokens)
    }
}
