use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub train_ratio: f64,
    pub valid_ratio: f64,
    pub test_ratio: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_ratio: 0.8,
            valid_ratio: 0.1,
            test_ratio: 0.1,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let ratios = [self.train_ratio, self.valid_ratio, self.test_ratio];
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(CorpusError::Config("split ratios must be positive".into()));
        }
        let sum: f64 = ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CorpusError::Config(format!(
                "split ratios sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Stable identifier of a sentence: `<doc_id>#<index within document>`.
pub fn sentence_key(doc_id: &str, index: usize) -> String {
    format!("{doc_id}#{index}")
}

/// Explicit sentence-to-subset assignment, e.g. a published split.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SplitFile {
    pub train: Vec<String>,
    pub valid: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Corpus,
    pub valid: Corpus,
    pub test: Corpus,
    /// Sentence keys of each subset, in corpus order.
    keys: SplitFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Subset {
    Train,
    Valid,
    Test,
}

fn materialize(corpus: &Corpus, assignment: &HashMap<String, Subset>) -> CorpusSplit {
    let pick = |which: Subset| {
        corpus.filter_sentences(|d, i, _| assignment.get(&sentence_key(&d.id, i)) == Some(&which))
    };
    let mut keys = SplitFile::default();
    for d in corpus.documents() {
        for i in 0..d.sentences.len() {
            let key = sentence_key(&d.id, i);
            match assignment.get(&key) {
                Some(Subset::Train) => keys.train.push(key),
                Some(Subset::Valid) => keys.valid.push(key),
                Some(Subset::Test) => keys.test.push(key),
                None => {}
            }
        }
    }
    CorpusSplit {
        train: pick(Subset::Train),
        valid: pick(Subset::Valid),
        test: pick(Subset::Test),
        keys,
    }
}

/// Rounds the `regions x subsets` table of expected counts so that every row
/// sums to its region size, every column to its subset size, and every cell
/// is within one of its exact value.
fn apportion(region_sizes: &[usize], subset_sizes: [usize; 3]) -> Vec<[usize; 3]> {
    let total: usize = region_sizes.iter().sum();
    let mut cells = vec![[0usize; 3]; region_sizes.len()];
    let mut frac = vec![[0f64; 3]; region_sizes.len()];
    for (r, &n) in region_sizes.iter().enumerate() {
        for s in 0..3 {
            let exact = n as f64 * subset_sizes[s] as f64 / total as f64;
            cells[r][s] = exact.floor() as usize;
            frac[r][s] = exact - exact.floor();
        }
    }
    let mut row_deficit: Vec<usize> = region_sizes
        .iter()
        .zip(&cells)
        .map(|(&n, c)| n - c.iter().sum::<usize>())
        .collect();
    for s in 0..3 {
        let assigned: usize = cells.iter().map(|c| c[s]).sum();
        let deficit = subset_sizes[s] - assigned;
        // Ryser's construction: give the extra units to the rows with the
        // largest remaining deficit, preferring larger fractional parts.
        let mut order: Vec<usize> = (0..region_sizes.len()).collect();
        order.sort_by(|&a, &b| {
            row_deficit[b]
                .cmp(&row_deficit[a])
                .then(frac[b][s].total_cmp(&frac[a][s]))
                .then(a.cmp(&b))
        });
        for &r in order.iter().take(deficit) {
            debug_assert!(row_deficit[r] > 0);
            cells[r][s] += 1;
            row_deficit[r] -= 1;
        }
    }
    debug_assert!(row_deficit.iter().all(|&d| d == 0));
    cells
}

/// Sentence-level split, stratified by region and deterministic per seed.
///
/// Global subset sizes are `round(n * valid)` and `round(n * test)` with the
/// remainder going to train; per-region counts stay within one sentence of
/// the region's proportional share.
pub fn split_dataset(corpus: &Corpus, spec: &SplitSpec) -> Result<CorpusSplit, CorpusError> {
    spec.validate()?;
    let mut by_region: BTreeMap<Region, Vec<String>> = BTreeMap::new();
    for d in corpus.documents() {
        for (i, s) in d.sentences.iter().enumerate() {
            by_region
                .entry(s.region)
                .or_default()
                .push(sentence_key(&d.id, i));
        }
    }
    let n = corpus.sentence_count();
    let valid = (n as f64 * spec.valid_ratio).round() as usize;
    let test = (n as f64 * spec.test_ratio).round() as usize;
    let train = n.saturating_sub(valid + test);
    if train + valid + test != n {
        return Err(CorpusError::Config("split ratios leave no training data".into()));
    }

    let sizes: Vec<usize> = by_region.values().map(Vec::len).collect();
    let counts = if n == 0 {
        Vec::new()
    } else {
        apportion(&sizes, [train, valid, test])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut assignment = HashMap::with_capacity(n);
    for (keys, c) in by_region.into_values().zip(counts) {
        let mut keys = keys;
        keys.shuffle(&mut rng);
        let mut it = keys.into_iter();
        for (subset, count) in [(Subset::Train, c[0]), (Subset::Valid, c[1]), (Subset::Test, c[2])] {
            for key in it.by_ref().take(count) {
                assignment.insert(key, subset);
            }
        }
    }
    Ok(materialize(corpus, &assignment))
}

/// Applies an explicit split. Every sentence must be listed exactly once.
pub fn apply_split_file(corpus: &Corpus, file: &SplitFile) -> Result<CorpusSplit, CorpusError> {
    let mut known: HashMap<String, Option<Subset>> = HashMap::new();
    for d in corpus.documents() {
        for i in 0..d.sentences.len() {
            known.insert(sentence_key(&d.id, i), None);
        }
    }
    for (subset, keys) in [
        (Subset::Train, &file.train),
        (Subset::Valid, &file.valid),
        (Subset::Test, &file.test),
    ] {
        for key in keys {
            let slot = known
                .get_mut(key)
                .ok_or_else(|| CorpusError::SplitFile(format!("unknown sentence `{key}`")))?;
            if slot.is_some() {
                return Err(CorpusError::SplitFile(format!("sentence `{key}` listed twice")));
            }
            *slot = Some(subset);
        }
    }
    let mut assignment = HashMap::with_capacity(known.len());
    for (key, subset) in known {
        let subset = subset
            .ok_or_else(|| CorpusError::SplitFile(format!("sentence `{key}` not assigned")))?;
        assignment.insert(key, subset);
    }
    Ok(materialize(corpus, &assignment))
}

impl CorpusSplit {
    pub fn to_split_file(&self) -> SplitFile {
        self.keys.clone()
    }
}
