use serde::Serialize;

use super::{Mode, TrainError};
use crate::autodiff::{Array, AutodiffError, Graph};
use crate::corpus::Corpus;
use crate::model::{featurize, ModelError, ParamId, TaggerParams};

/// One featurized sentence. `tags` is `None` for sentences that only feed
/// the discriminator.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub ids: Vec<usize>,
    pub tags: Option<Vec<usize>>,
    pub domain: usize,
}

pub fn examples_from_corpus(corpus: &Corpus, vocab_size: usize, labeled: bool) -> Vec<Example> {
    corpus
        .sentences()
        .filter(|s| !s.tokens.is_empty())
        .map(|s| Example {
            ids: featurize(&s.words().collect::<Vec<_>>(), vocab_size),
            tags: labeled.then(|| s.tags.iter().map(|t| t.index()).collect()),
            domain: s.region.code(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossBreakdown {
    /// NER loss `L_y`.
    pub ner: f64,
    /// Discriminator loss `L_d`.
    pub domain: f64,
    /// The objective of the mode: `L_y`, `L_y + L_d` or `L_y - λ·L_d`.
    pub total: f64,
    pub labeled_tokens: usize,
    pub tokens: usize,
}

fn non_finite(e: ModelError, mode: Mode, batch: &[Example]) -> TrainError {
    match e {
        ModelError::Autodiff(AutodiffError::NonFinite { op }) => TrainError::NonFinite {
            context: format!(
                "{mode} loss on a batch of {} sentences ({} tokens), op {op}",
                batch.len(),
                batch.iter().map(|e| e.ids.len()).sum::<usize>()
            ),
        },
        other => TrainError::Model(other),
    }
}

/// Losses of `mode` on `batch` and the gradient of the mode's objective with
/// respect to every parameter tensor, in [`ParamId`] order.
pub fn compute_losses(
    params: &TaggerParams,
    batch: &[Example],
    mode: Mode,
    lambda: f64,
) -> Result<(LossBreakdown, Vec<Array>), TrainError> {
    if batch.is_empty() {
        return Err(TrainError::EmptySubset("batch"));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(TrainError::Config("lambda must be non-negative".into()));
    }
    let run = || -> Result<_, ModelError> {
        let mut g = Graph::new();
        let ids: Vec<Vec<usize>> = batch.iter().map(|e| e.ids.clone()).collect();
        let scale = (mode == Mode::GradRev).then_some(-lambda);
        let f = params.forward_graph(&mut g, &ids, scale)?;

        let mut ner_targets = Vec::new();
        let mut domain_targets = Vec::new();
        for e in batch {
            match &e.tags {
                Some(tags) => ner_targets.extend(tags.iter().map(|&t| Some(t))),
                None => ner_targets.extend(std::iter::repeat_n(None, e.ids.len())),
            }
            domain_targets.extend(std::iter::repeat_n(e.domain, e.ids.len()));
        }
        let l_y = g.masked_softmax_cross_entropy(f.ner_logits, &ner_targets)?;
        let l_d = g.softmax_cross_entropy(f.domain_logits, &domain_targets)?;
        let total = match mode {
            Mode::Baseline => l_y,
            Mode::GradRev => g.add(l_y, l_d)?,
            Mode::LossRev => {
                let scaled = g.scale(l_d, -lambda)?;
                g.add(l_y, scaled)?
            }
        };
        g.backward(total)?;
        let grads = f
            .params
            .iter()
            .map(|&v| g.grad(v).expect("backward ran"))
            .collect::<Vec<_>>();
        let breakdown = LossBreakdown {
            ner: g.value(l_y).data()[0],
            domain: g.value(l_d).data()[0],
            total: g.value(total).data()[0],
            labeled_tokens: ner_targets.iter().flatten().count(),
            tokens: domain_targets.len(),
        };
        Ok((breakdown, grads))
    };
    let (breakdown, grads) = run().map_err(|e| non_finite(e, mode, batch))?;
    debug_assert_eq!(grads.len(), ParamId::ALL.len());
    Ok((breakdown, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Block, TaggerConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(seed: u64) -> (TaggerParams, Vec<Example>) {
        let cfg = TaggerConfig {
            vocab_size: 50,
            embed_dim: 4,
            hidden_dim: 6,
            context_window: 1,
            seed,
            ..TaggerConfig::default()
        };
        let params = TaggerParams::init(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let batch = (0..4)
            .map(|i| {
                let n = rng.gen_range(1..6);
                Example {
                    ids: (0..n).map(|_| rng.gen_range(0..50)).collect(),
                    tags: (i != 3).then(|| (0..n).map(|_| rng.gen_range(0..11)).collect()),
                    domain: rng.gen_range(0..4),
                }
            })
            .collect();
        (params, batch)
    }

    fn block_grads(grads: &[Array], block: Block) -> Vec<&Array> {
        ParamId::ALL
            .iter()
            .filter(|id| id.block() == block)
            .map(|id| &grads[id.index()])
            .collect()
    }

    #[test]
    fn baseline_leaves_domain_head_without_gradient() {
        let (p, b) = setup(1);
        let (loss, grads) = compute_losses(&p, &b, Mode::Baseline, 0.1).unwrap();
        assert_eq!(loss.total, loss.ner);
        assert!(loss.domain > 0.0);
        for g in block_grads(&grads, Block::Domain) {
            assert!(g.data().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn lambda_zero_loss_rev_matches_baseline_exactly() {
        let (p, b) = setup(2);
        let (lb, gb) = compute_losses(&p, &b, Mode::Baseline, 0.0).unwrap();
        let (ll, gl) = compute_losses(&p, &b, Mode::LossRev, 0.0).unwrap();
        assert_eq!(ll.total, lb.ner);
        for block in [Block::Feature, Block::Label] {
            assert_eq!(block_grads(&gb, block), block_grads(&gl, block));
        }
    }

    #[test]
    fn reversal_modes_are_algebraically_related() {
        let lambda = 0.1;
        let (p, b) = setup(3);
        let (lg, gg) = compute_losses(&p, &b, Mode::GradRev, lambda).unwrap();
        let (ll, gl) = compute_losses(&p, &b, Mode::LossRev, lambda).unwrap();
        assert_eq!(lg.total, lg.ner + lg.domain);
        assert!((ll.total - (ll.ner - lambda * ll.domain)).abs() < 1e-15);
        for id in ParamId::ALL {
            let (a, c) = (&gg[id.index()], &gl[id.index()]);
            let factor = if id.block() == Block::Domain { -lambda } else { 1.0 };
            let scale = a.max_abs().max(c.max_abs()).max(f64::MIN_POSITIVE);
            for (x, y) in a.data().iter().zip(c.data()) {
                assert!((factor * x - y).abs() / scale <= 1e-12, "{}", id.name());
            }
        }
    }

    #[test]
    fn unlabeled_sentences_only_feed_the_discriminator() {
        let (p, mut b) = setup(4);
        for e in &mut b {
            e.tags = None;
        }
        let (loss, grads) = compute_losses(&p, &b, Mode::GradRev, 0.1).unwrap();
        assert_eq!(loss.ner, 0.0);
        assert_eq!(loss.labeled_tokens, 0);
        for g in block_grads(&grads, Block::Label) {
            assert!(g.data().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn empty_batch_and_negative_lambda_are_errors() {
        let (p, b) = setup(5);
        assert!(compute_losses(&p, &[], Mode::Baseline, 0.1).is_err());
        assert!(compute_losses(&p, &b, Mode::LossRev, -1.0).is_err());
    }

    #[test]
    fn nan_parameters_abort_with_diagnostics() {
        let (mut p, b) = setup(6);
        p.get_mut(ParamId::NerBias).data_mut()[0] = f64::NAN;
        match compute_losses(&p, &b, Mode::LossRev, 0.1) {
            Err(TrainError::NonFinite { context }) => assert!(context.contains("loss_rev")),
            other => panic!("{other:?}"),
        }
    }
}
