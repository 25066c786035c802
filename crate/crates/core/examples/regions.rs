//! 4x4 train-region x eval-region strict F1 on the coupled synthetic corpus,
//! where Bessarabia and Moldavia share one generator.
//!
//! cargo run --release --example regions -p histnero-core -- [seeds] [sentences per region]

use std::time::Instant;

use histnero::corpus::{split_dataset, Region, SplitSpec};
use histnero::model::TaggerConfig;
use histnero::synthetic::coupled_regions_corpus;
use histnero::training::{inter_regional, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seeds: u64 = args.get(1).map_or(5, |s| s.parse().unwrap());
    let per_region: usize = args.get(2).map_or(300, |s| s.parse().unwrap());
    let start = Instant::now();
    for seed in 0..seeds {
        let corpus = coupled_regions_corpus(per_region, 60, seed);
        let split = split_dataset(&corpus, &SplitSpec { seed, ..SplitSpec::default() }).unwrap();
        let tagger = TaggerConfig {
            vocab_size: 1 << 12,
            embed_dim: 32,
            hidden_dim: 64,
            seed,
            ..TaggerConfig::default()
        };
        let m = inter_regional(&split, &tagger, &TrainConfig { seed, ..TrainConfig::default() }, 0).unwrap();
        println!("seed {seed}\n{m}");
        let (b, mo) = (Region::Bessarabia, Region::Moldavia);
        let coupled = m.get(b, mo).min(m.get(mo, b));
        let mut cross: f64 = 0.0;
        for i in Region::ALL {
            for j in Region::ALL {
                if i != j && !((i == b && j == mo) || (i == mo && j == b)) {
                    cross = cross.max(m.get(i, j));
                }
            }
        }
        println!("coupled min {coupled:.3} vs cross max {cross:.3}");
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
}
