//! Post-hoc discriminator probe: a fresh region classifier trained on frozen
//! features measures how much region information the features still carry.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{predict_corpus, AdamState, TrainError};
use crate::autodiff::{Array, Graph};
use crate::corpus::Corpus;
use crate::model::{featurize, ModelError, ParamId, TaggerParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub epochs: usize,
    pub lr: f64,
    /// Tokens per batch.
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            lr: 1e-2,
            batch_size: 256,
            seed: 0,
        }
    }
}

/// Returns a copy of `params` whose discriminator head has been re-initialized
/// and trained, with F and C frozen, to predict each token's region.
pub fn fit_domain_probe(params: &TaggerParams, corpus: &Corpus, config: &ProbeConfig) -> Result<TaggerParams, TrainError> {
    if corpus.sentence_count() == 0 {
        return Err(TrainError::EmptySubset("probe"));
    }
    if config.epochs == 0 || config.batch_size == 0 || !(config.lr.is_finite() && config.lr > 0.0) {
        return Err(TrainError::Config("probe needs epochs, batch_size and lr > 0".into()));
    }
    let vocab = params.config().vocab_size;
    let hidden = params.config().hidden_dim;
    let mut rows: Vec<(Vec<f64>, usize)> = Vec::new();
    for s in corpus.sentences() {
        let ids = featurize(&s.words().collect::<Vec<_>>(), vocab);
        let out = params.forward(&[ids])?;
        let h = &out[0].features;
        for r in 0..h.rows() {
            rows.push((h.row(r).to_vec(), s.region.code()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut probe = params.clone();
    let bound = 1.0 / (hidden as f64).sqrt();
    for x in probe.get_mut(ParamId::DomainWeight).data_mut() {
        *x = rng.gen_range(-bound..bound);
    }
    probe.get_mut(ParamId::DomainBias).data_mut().fill(0.0);
    let mut head = vec![
        probe.get(ParamId::DomainWeight).clone(),
        probe.get(ParamId::DomainBias).clone(),
    ];
    let mut adam = AdamState::new(&head);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for idx in order.chunks(config.batch_size) {
            let data: Vec<f64> = idx.iter().flat_map(|&i| rows[i].0.iter().copied()).collect();
            let targets: Vec<usize> = idx.iter().map(|&i| rows[i].1).collect();
            let step = || -> Result<Vec<Array>, ModelError> {
                let mut g = Graph::new();
                let h = g.leaf(Array::new(vec![idx.len(), hidden], data.clone())?)?;
                let w = g.leaf(head[0].clone())?;
                let b = g.leaf(head[1].clone())?;
                let z = g.matmul(h, w)?;
                let z = g.add(z, b)?;
                let loss = g.softmax_cross_entropy(z, &targets)?;
                g.backward(loss)?;
                Ok(vec![g.grad(w).expect("ran"), g.grad(b).expect("ran")])
            };
            let grads = step()?;
            adam.update(&mut head, &grads, config.lr, 0.0);
        }
    }
    let [w, b]: [Array; 2] = head.try_into().expect("two tensors");
    *probe.get_mut(ParamId::DomainWeight) = w;
    *probe.get_mut(ParamId::DomainBias) = b;
    Ok(probe)
}

/// Fraction of tokens whose discriminator argmax is their sentence's region.
pub fn domain_accuracy(params: &TaggerParams, corpus: &Corpus) -> Result<f64, TrainError> {
    let preds = predict_corpus(params, corpus)?;
    let mut hit = 0usize;
    let mut total = 0usize;
    for (s, p) in corpus.sentences().zip(&preds) {
        hit += p.domains.iter().filter(|&&d| d == s.region.code()).count();
        total += p.domains.len();
    }
    if total == 0 {
        return Err(TrainError::EmptySubset("probe"));
    }
    Ok(hit as f64 / total as f64)
}
