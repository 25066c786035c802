use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    clip_gradients, compute_losses, evaluate, examples_from_corpus, AdamState, Mode, TrainConfig,
    TrainError,
};
use crate::corpus::Corpus;
use crate::model::{TaggerConfig, TaggerParams};

/// Sentences available to one training run.
#[derive(Debug, Clone, Copy)]
pub struct TrainData<'a> {
    pub train: &'a Corpus,
    pub valid: &'a Corpus,
    /// Extra sentences whose tags are ignored; they only supervise the
    /// discriminator (and so only matter in the adversarial modes).
    pub unlabeled: Option<&'a Corpus>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Token-weighted mean of the batch NER losses.
    pub ner_loss: f64,
    /// Token-weighted mean of the batch discriminator losses.
    pub domain_loss: f64,
    pub total_loss: f64,
    pub valid_f1: f64,
    pub valid_accuracy: f64,
    pub valid_domain_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters after the epoch with the best validation F1 (earliest on ties).
    pub best: TaggerParams,
    pub last: TaggerParams,
    /// 1-based.
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
}

/// Trains a freshly initialized tagger. The result is a pure function of the
/// data and both configs.
pub fn train(data: TrainData<'_>, tagger: &TaggerConfig, config: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    tagger.validate()?;
    if data.train.sentence_count() == 0 {
        return Err(TrainError::EmptySubset("training"));
    }
    if data.valid.sentence_count() == 0 {
        return Err(TrainError::EmptySubset("validation"));
    }
    let mut examples = examples_from_corpus(data.train, tagger.vocab_size, true);
    if let Some(u) = data.unlabeled {
        examples.extend(examples_from_corpus(u, tagger.vocab_size, false));
    }
    if examples.is_empty() {
        return Err(TrainError::EmptySubset("training"));
    }

    let mut params = TaggerParams::init(tagger)?;
    let mut adam = AdamState::new(params.tensors());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lambda = config.effective_lambda();
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, TaggerParams)> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let (mut ner_sum, mut ner_tokens) = (0.0, 0usize);
        let (mut dom_sum, mut dom_tokens) = (0.0, 0usize);
        for (b, idx) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<_> = idx.iter().map(|&i| examples[i].clone()).collect();
            let (loss, mut grads) = compute_losses(&params, &batch, config.mode, lambda).map_err(|e| match e {
                TrainError::NonFinite { context } => TrainError::NonFinite {
                    context: format!("epoch {epoch}, batch {b}: {context}"),
                },
                other => other,
            })?;
            ner_sum += loss.ner * loss.labeled_tokens as f64;
            ner_tokens += loss.labeled_tokens;
            dom_sum += loss.domain * loss.tokens as f64;
            dom_tokens += loss.tokens;
            clip_gradients(&mut grads, config.clip_norm);
            adam.update(params.tensors_mut(), &grads, config.lr, config.weight_decay);
        }
        let report = evaluate(&params, data.valid)?;
        let ner_loss = ner_sum / ner_tokens.max(1) as f64;
        let domain_loss = dom_sum / dom_tokens.max(1) as f64;
        let total_loss = match config.mode {
            Mode::Baseline => ner_loss,
            Mode::GradRev => ner_loss + domain_loss,
            Mode::LossRev => ner_loss - lambda * domain_loss,
        };
        let record = EpochRecord {
            epoch,
            ner_loss,
            domain_loss,
            total_loss,
            valid_f1: report.overall.f1,
            valid_accuracy: report.overall.accuracy,
            valid_domain_accuracy: report.domain_accuracy.unwrap_or(0.0),
        };
        log::info!(
            "{} epoch {epoch}: L_y {:.4} L_d {:.4} valid F1 {:.4} acc {:.4} D acc {:.4}",
            config.mode,
            record.ner_loss,
            record.domain_loss,
            record.valid_f1,
            record.valid_accuracy,
            record.valid_domain_accuracy
        );
        if best.as_ref().is_none_or(|(f1, _, _)| record.valid_f1 > *f1) {
            best = Some((record.valid_f1, epoch, params.clone()));
        }
        history.push(record);
    }
    let (_, best_epoch, best) = best.expect("at least one epoch");
    Ok(TrainOutcome {
        best,
        last: params,
        best_epoch,
        history,
    })
}
