//! Cross-region adaptation on the synthetic two-domain corpus: trains each
//! mode on labeled source sentences plus unlabeled target sentences and
//! reports strict F1 on the target test sentences.
//!
//! cargo run --release --example adaptation -p histnero-core -- [seeds] [epochs] [lr]

use std::time::Instant;

use histnero::corpus::{split_dataset, Corpus, SplitSpec};
use histnero::model::TaggerConfig;
use histnero::synthetic::{two_domain_corpus, TwoDomainSpec};
use histnero::training::{
    domain_accuracy, evaluate, fit_domain_probe, train, Mode, ProbeConfig, TrainConfig, TrainData,
};

fn merge(a: &Corpus, b: &Corpus) -> Corpus {
    Corpus::new(a.documents().iter().chain(b.documents()).cloned().collect()).unwrap()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seeds: u64 = args.get(1).map_or(5, |s| s.parse().unwrap());
    let epochs: usize = args.get(2).map_or(15, |s| s.parse().unwrap());
    let lr: f64 = args.get(3).map_or(1e-3, |s| s.parse().unwrap());
    let lambda: f64 = args.get(4).map_or(0.1, |s| s.parse().unwrap());
    let env = |k: &str| std::env::var(k).ok();
    let spec = TwoDomainSpec {
        spell_context: env("SPELL_CONTEXT").is_none_or(|v| v == "1"),
        lexicon_size: env("LEXICON").map_or(60, |v| v.parse().unwrap()),
        ..TwoDomainSpec::default()
    };
    let probe_epochs: usize = env("PROBE_EPOCHS").map_or(10, |v| v.parse().unwrap());
    let hidden: usize = env("HIDDEN").map_or(64, |v| v.parse().unwrap());
    let start = Instant::now();
    let mut sums = [0.0f64; 3];
    for seed in 0..seeds {
        let corpus = two_domain_corpus(&TwoDomainSpec { seed, ..spec });
        let split_spec = SplitSpec { seed, ..SplitSpec::default() };
        let src = split_dataset(&corpus.region(spec.source), &split_spec).unwrap();
        let tgt = split_dataset(&corpus.region(spec.target), &split_spec).unwrap();
        let valid_both = merge(&src.valid, &tgt.valid);
        let tagger = TaggerConfig {
            vocab_size: 1 << 12,
            embed_dim: 32,
            hidden_dim: hidden,
            context_window: 2,
            seed,
            ..TaggerConfig::default()
        };
        for (i, mode) in Mode::ALL.into_iter().enumerate() {
            let cfg = TrainConfig { mode, epochs, lr, lambda, seed, ..TrainConfig::default() };
            let out = train(
                TrainData { train: &src.train, valid: &src.valid, unlabeled: Some(&tgt.train) },
                &tagger,
                &cfg,
            )
            .unwrap();
            let cross = evaluate(&out.best, &tgt.test).unwrap().overall.f1;
            let within = evaluate(&out.best, &src.test).unwrap().overall.f1;
            let d_acc = domain_accuracy(&out.best, &valid_both).unwrap();
            let probe = fit_domain_probe(&out.best, &merge(&src.train, &tgt.train), &ProbeConfig { seed, epochs: probe_epochs, ..ProbeConfig::default() }).unwrap();
            let probe_acc = domain_accuracy(&probe, &valid_both).unwrap();
            sums[i] += cross;
            println!(
                "seed {seed} {mode:<9} best@{:>2} in-domain {:.3} cross {:.3} D-acc {:.3} probe {:.3} last L_y {:.3} L_d {:.3}",
                out.best_epoch,
                within,
                cross,
                d_acc,
                probe_acc,
                out.history.last().unwrap().ner_loss,
                out.history.last().unwrap().domain_loss,
            );
        }
    }
    for (i, mode) in Mode::ALL.into_iter().enumerate() {
        println!("{mode:<9} mean cross-domain F1 {:.4}", sums[i] / seeds as f64);
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
}
