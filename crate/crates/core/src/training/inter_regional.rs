use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, train, TrainConfig, TrainData, TrainError};
use crate::corpus::{CorpusSplit, Region};
use crate::model::TaggerConfig;

/// Strict F1 of a tagger trained on one region (rows) and evaluated on the
/// test sentences of each region (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMatrix {
    pub regions: [Region; Region::COUNT],
    pub f1: [[f64; Region::COUNT]; Region::COUNT],
}

impl RegionMatrix {
    pub fn get(&self, train: Region, eval: Region) -> f64 {
        self.f1[train.code()][eval.code()]
    }
}

/// Trains one tagger per region on that region's training and validation
/// sentences, then scores it on every region's test sentences. Training runs
/// are independent and may use up to `jobs` threads (0 = all cores); the
/// result does not depend on `jobs`.
pub fn inter_regional(
    split: &CorpusSplit,
    tagger: &TaggerConfig,
    config: &TrainConfig,
    jobs: usize,
) -> Result<RegionMatrix, TrainError> {
    config.validate()?;
    let subsets = Region::ALL.map(|r| (split.train.region(r), split.valid.region(r), split.test.region(r)));
    for (r, (tr, va, te)) in Region::ALL.iter().zip(&subsets) {
        for (subset, c) in [("training", tr), ("validation", va), ("test", te)] {
            if c.sentence_count() == 0 {
                return Err(TrainError::EmptyRegion { region: *r, subset });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| TrainError::Config(format!("thread pool: {e}")))?;
    let rows: Vec<[f64; Region::COUNT]> = pool.install(|| {
        subsets
            .par_iter()
            .map(|(tr, va, _)| {
                let out = train(
                    TrainData {
                        train: tr,
                        valid: va,
                        unlabeled: None,
                    },
                    tagger,
                    config,
                )?;
                let mut row = [0.0; Region::COUNT];
                for (j, (_, _, te)) in subsets.iter().enumerate() {
                    row[j] = evaluate(&out.best, te)?.overall.f1;
                }
                Ok(row)
            })
            .collect::<Result<_, TrainError>>()
    })?;
    let mut f1 = [[0.0; Region::COUNT]; Region::COUNT];
    for (i, row) in rows.into_iter().enumerate() {
        f1[i] = row;
    }
    Ok(RegionMatrix {
        regions: Region::ALL,
        f1,
    })
}

impl fmt::Display for RegionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14}", "train \\ eval")?;
        for r in &self.regions {
            write!(f, " {:>8}", r.short())?;
        }
        for (r, row) in self.regions.iter().zip(&self.f1) {
            write!(f, "\n{:<14}", r.name())?;
            for v in row {
                write!(f, " {:>8.2}", v * 100.0)?;
            }
        }
        Ok(())
    }
}
