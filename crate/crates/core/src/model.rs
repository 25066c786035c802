//! Windowed feed-forward token tagger.
//!
//! Feature extractor F: hashed-vocabulary embeddings of the `2w + 1` tokens
//! around each position are concatenated and passed through one tanh layer,
//! giving `h_i`. Two heads read the same `h_i`: the NER head C (11 tags) and
//! the region discriminator D (4 regions).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autodiff::{Array, AutodiffError, Graph, Var};
use crate::corpus::{Region, Tag, TagSequence};

pub const N_TAGS: usize = Tag::COUNT;
pub const N_DOMAINS: usize = Region::COUNT;

const CHECKPOINT_FORMAT: &str = "histnero-tagger";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid tagger config: {0}")]
    Config(String),
    #[error("cannot run the tagger on an empty sentence")]
    EmptySentence,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    /// Tokens of context on each side.
    pub context_window: usize,
    pub n_tags: usize,
    pub n_domains: usize,
    pub seed: u64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        Self {
            vocab_size: 1 << 15,
            embed_dim: 64,
            hidden_dim: 128,
            context_window: 2,
            n_tags: N_TAGS,
            n_domains: N_DOMAINS,
            seed: 0,
        }
    }
}

impl TaggerConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("vocab_size", self.vocab_size),
            ("embed_dim", self.embed_dim),
            ("hidden_dim", self.hidden_dim),
        ] {
            if v == 0 {
                return Err(ModelError::Config(format!("{name} must be at least 1")));
            }
        }
        if self.n_tags != N_TAGS || self.n_domains != N_DOMAINS {
            return Err(ModelError::Config(format!(
                "the tagger predicts {N_TAGS} tags and {N_DOMAINS} regions, got {} and {}",
                self.n_tags, self.n_domains
            )));
        }
        Ok(())
    }

    fn window_width(&self) -> usize {
        2 * self.context_window + 1
    }

    /// Row of the embedding table used beyond sentence boundaries.
    pub fn padding_id(&self) -> usize {
        self.vocab_size
    }
}

/// Which of the three parameter blocks a tensor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Block {
    /// θ_F
    Feature,
    /// θ_C
    Label,
    /// θ_D
    Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamId {
    Embedding,
    HiddenWeight,
    HiddenBias,
    NerWeight,
    NerBias,
    DomainWeight,
    DomainBias,
}

impl ParamId {
    pub const ALL: [ParamId; 7] = [
        ParamId::Embedding,
        ParamId::HiddenWeight,
        ParamId::HiddenBias,
        ParamId::NerWeight,
        ParamId::NerBias,
        ParamId::DomainWeight,
        ParamId::DomainBias,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ParamId::Embedding => "F.embedding",
            ParamId::HiddenWeight => "F.hidden.weight",
            ParamId::HiddenBias => "F.hidden.bias",
            ParamId::NerWeight => "C.weight",
            ParamId::NerBias => "C.bias",
            ParamId::DomainWeight => "D.weight",
            ParamId::DomainBias => "D.bias",
        }
    }

    pub fn block(self) -> Block {
        match self {
            ParamId::Embedding | ParamId::HiddenWeight | ParamId::HiddenBias => Block::Feature,
            ParamId::NerWeight | ParamId::NerBias => Block::Label,
            ParamId::DomainWeight | ParamId::DomainBias => Block::Domain,
        }
    }

    fn shape(self, c: &TaggerConfig) -> Vec<usize> {
        match self {
            ParamId::Embedding => vec![c.vocab_size + 1, c.embed_dim],
            ParamId::HiddenWeight => vec![c.window_width() * c.embed_dim, c.hidden_dim],
            ParamId::HiddenBias => vec![1, c.hidden_dim],
            ParamId::NerWeight => vec![c.hidden_dim, c.n_tags],
            ParamId::NerBias => vec![1, c.n_tags],
            ParamId::DomainWeight => vec![c.hidden_dim, c.n_domains],
            ParamId::DomainBias => vec![1, c.n_domains],
        }
    }

    /// Fan-in used to scale the initial uniform weights; `None` for biases.
    fn fan_in(self, c: &TaggerConfig) -> Option<usize> {
        match self {
            ParamId::Embedding => Some(c.embed_dim),
            ParamId::HiddenWeight => Some(c.window_width() * c.embed_dim),
            ParamId::NerWeight | ParamId::DomainWeight => Some(c.hidden_dim),
            ParamId::HiddenBias | ParamId::NerBias | ParamId::DomainBias => None,
        }
    }
}

/// Tagger parameters, one tensor per [`ParamId`] in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerParams {
    config: TaggerConfig,
    tensors: Vec<Array>,
}

#[derive(Serialize, Deserialize)]
struct NamedTensor {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    config: TaggerConfig,
    params: Vec<NamedTensor>,
}

impl TaggerParams {
    /// Weights uniform in `±1/sqrt(fan_in)` from a ChaCha stream seeded with
    /// `config.seed`; biases zero.
    pub fn init(config: &TaggerConfig) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let tensors = ParamId::ALL
            .iter()
            .map(|&id| {
                let shape = id.shape(config);
                let n: usize = shape.iter().product();
                let data = match id.fan_in(config) {
                    Some(fan_in) => {
                        let bound = 1.0 / (fan_in as f64).sqrt();
                        (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
                    }
                    None => vec![0.0; n],
                };
                Array::new(shape, data)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            config: *config,
            tensors,
        })
    }

    pub fn config(&self) -> &TaggerConfig {
        &self.config
    }

    pub fn get(&self, id: ParamId) -> &Array {
        &self.tensors[id.index()]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Array {
        &mut self.tensors[id.index()]
    }

    pub fn tensors(&self) -> &[Array] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Array] {
        &mut self.tensors
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors.iter().map(Array::len).sum()
    }

    pub fn block_parameter_count(&self, block: Block) -> usize {
        ParamId::ALL
            .iter()
            .filter(|id| id.block() == block)
            .map(|id| self.get(*id).len())
            .sum()
    }

    /// Builds the forward pass for a batch of sentences (already featurized)
    /// on `graph`. With `domain_gradient_scale = Some(f)`, the discriminator
    /// reads `scale_gradient(h, f)` instead of `h`.
    pub fn forward_graph(
        &self,
        graph: &mut Graph,
        batch: &[Vec<usize>],
        domain_gradient_scale: Option<f64>,
    ) -> Result<ForwardVars, ModelError> {
        if batch.iter().any(Vec::is_empty) || batch.is_empty() {
            return Err(ModelError::EmptySentence);
        }
        let c = &self.config;
        let params: Vec<Var> = self
            .tensors
            .iter()
            .map(|t| graph.leaf(t.clone()))
            .collect::<Result<_, _>>()?;
        let p = |id: ParamId| params[id.index()];

        let w = c.context_window as isize;
        let mut windows = Vec::with_capacity(c.window_width());
        for offset in -w..=w {
            let mut ids = Vec::new();
            for sentence in batch {
                let n = sentence.len() as isize;
                for i in 0..n {
                    let j = i + offset;
                    ids.push(if (0..n).contains(&j) {
                        sentence[j as usize]
                    } else {
                        c.padding_id()
                    });
                }
            }
            windows.push(graph.embedding_lookup(p(ParamId::Embedding), &ids)?);
        }
        let x = if windows.len() == 1 {
            windows[0]
        } else {
            graph.concat(&windows)?
        };
        let pre = graph.matmul(x, p(ParamId::HiddenWeight))?;
        let pre = graph.add(pre, p(ParamId::HiddenBias))?;
        let h = graph.tanh(pre)?;

        let ner = graph.matmul(h, p(ParamId::NerWeight))?;
        let ner_logits = graph.add(ner, p(ParamId::NerBias))?;

        let d_in = match domain_gradient_scale {
            Some(f) => graph.scale_gradient(h, f)?,
            None => h,
        };
        let dom = graph.matmul(d_in, p(ParamId::DomainWeight))?;
        let domain_logits = graph.add(dom, p(ParamId::DomainBias))?;
        Ok(ForwardVars {
            params,
            features: h,
            ner_logits,
            domain_logits,
        })
    }

    /// Per-sentence features and logits.
    pub fn forward(&self, batch: &[Vec<usize>]) -> Result<Vec<SentenceOutput>, ModelError> {
        let mut g = Graph::new();
        let f = self.forward_graph(&mut g, batch, None)?;
        let (h, ner, dom) = (g.value(f.features), g.value(f.ner_logits), g.value(f.domain_logits));
        let mut out = Vec::with_capacity(batch.len());
        let mut row = 0;
        for sentence in batch {
            let rows = row..row + sentence.len();
            out.push(SentenceOutput {
                features: slice_rows(h, rows.clone()),
                ner_logits: slice_rows(ner, rows.clone()),
                domain_logits: slice_rows(dom, rows),
            });
            row += sentence.len();
        }
        Ok(out)
    }

    /// Argmax tag of every token. The result is not repaired; decoding with
    /// [`crate::corpus::decode_iob`] reads stray `I-` tags as `B-`.
    pub fn predict_tags<S: AsRef<str>>(&self, tokens: &[S]) -> Result<TagSequence, ModelError> {
        let ids = featurize(tokens, self.config.vocab_size);
        let out = self.forward(&[ids])?;
        Ok(tags_from_logits(&out[0].ner_logits))
    }

    pub fn save_json<W: Write>(&self, out: W) -> Result<(), ModelError> {
        let ck = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: self.config,
            params: ParamId::ALL
                .iter()
                .map(|&id| NamedTensor {
                    name: id.name().into(),
                    shape: self.get(id).shape().to_vec(),
                    data: self.get(id).data().to_vec(),
                })
                .collect(),
        };
        serde_json::to_writer(out, &ck)?;
        Ok(())
    }

    pub fn load_json<R: Read>(input: R) -> Result<Self, ModelError> {
        let ck: Checkpoint = serde_json::from_reader(input)?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(ModelError::Checkpoint(format!(
                "unsupported container {} v{}",
                ck.format, ck.version
            )));
        }
        ck.config.validate()?;
        if ck.params.len() != ParamId::ALL.len() {
            return Err(ModelError::Checkpoint(format!(
                "expected {} tensors, found {}",
                ParamId::ALL.len(),
                ck.params.len()
            )));
        }
        let mut tensors = Vec::with_capacity(ck.params.len());
        for (id, t) in ParamId::ALL.iter().zip(ck.params) {
            let expected = id.shape(&ck.config);
            if t.name != id.name() || t.shape != expected {
                return Err(ModelError::Checkpoint(format!(
                    "tensor `{}` {:?} where `{}` {:?} was expected",
                    t.name,
                    t.shape,
                    id.name(),
                    expected
                )));
            }
            let a = Array::new(t.shape, t.data)?;
            if !a.all_finite() {
                return Err(ModelError::Checkpoint(format!("tensor `{}` is not finite", t.name)));
            }
            tensors.push(a);
        }
        Ok(Self {
            config: ck.config,
            tensors,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.save_json(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Self::load_json(BufReader::new(File::open(path)?))
    }
}

/// Graph handles produced by [`TaggerParams::forward_graph`]. `params` holds
/// one leaf per [`ParamId`], in order.
#[derive(Debug, Clone)]
pub struct ForwardVars {
    pub params: Vec<Var>,
    pub features: Var,
    pub ner_logits: Var,
    pub domain_logits: Var,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceOutput {
    /// `[n_tokens, hidden_dim]`
    pub features: Array,
    /// `[n_tokens, 11]`
    pub ner_logits: Array,
    /// `[n_tokens, 4]`
    pub domain_logits: Array,
}

fn slice_rows(a: &Array, rows: std::ops::Range<usize>) -> Array {
    let cols = a.cols();
    let data = a.data()[rows.start * cols..rows.end * cols].to_vec();
    Array::new(vec![rows.len(), cols], data).expect("row slice")
}

/// Row-wise argmax; ties go to the lowest index.
pub fn argmax_rows(a: &Array) -> Vec<usize> {
    (0..a.rows())
        .map(|r| {
            let row = a.row(r);
            let mut best = 0;
            for (i, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

pub fn tags_from_logits(ner_logits: &Array) -> TagSequence {
    TagSequence(
        argmax_rows(ner_logits)
            .into_iter()
            .map(|i| Tag::from_index(i).expect("11 logits per token"))
            .collect(),
    )
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Vocabulary id of each token: FNV-1a of the UTF-8 bytes of the lowercased
/// token, modulo `vocab_size`.
pub fn featurize<S: AsRef<str>>(tokens: &[S], vocab_size: usize) -> Vec<usize> {
    tokens
        .iter()
        .map(|t| (fnv1a64(t.as_ref().to_lowercase().as_bytes()) % vocab_size as u64) as usize)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> TaggerConfig {
        TaggerConfig {
            vocab_size: 97,
            embed_dim: 5,
            hidden_dim: 7,
            context_window: 1,
            seed: 3,
            ..TaggerConfig::default()
        }
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn featurize_folds_case_and_stays_in_range() {
        let ids = featurize(&["Ion", "ion", "ION", "București"], 1000);
        assert_eq!(ids[0], ids[1]);
        assert_eq!(ids[1], ids[2]);
        assert!(ids.iter().all(|&i| i < 1000));
        assert_eq!(featurize(&["Ion"], 1000), featurize(&["Ion"], 1000));
    }

    #[test]
    fn init_is_seeded_and_biases_are_zero() {
        let a = TaggerParams::init(&small()).unwrap();
        assert_eq!(a, TaggerParams::init(&small()).unwrap());
        let other = TaggerParams::init(&TaggerConfig { seed: 4, ..small() }).unwrap();
        assert_ne!(a, other);
        for id in [ParamId::HiddenBias, ParamId::NerBias, ParamId::DomainBias] {
            assert!(a.get(id).data().iter().all(|&x| x == 0.0));
        }
        let bound = 1.0 / (15f64).sqrt();
        assert!(a.get(ParamId::HiddenWeight).max_abs() <= bound);
    }

    #[test]
    fn partition_is_total_and_disjoint() {
        let p = TaggerParams::init(&small()).unwrap();
        let total: usize = [Block::Feature, Block::Label, Block::Domain]
            .iter()
            .map(|&b| p.block_parameter_count(b))
            .sum();
        assert_eq!(total, p.parameter_count());
        assert_eq!(p.block_parameter_count(Block::Label), 7 * 11 + 11);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(TaggerParams::init(&TaggerConfig { hidden_dim: 0, ..small() }).is_err());
        assert!(TaggerParams::init(&TaggerConfig { n_tags: 9, ..small() }).is_err());
    }

    #[test]
    fn output_shapes_and_empty_sentence() {
        let p = TaggerParams::init(&small()).unwrap();
        let out = p.forward(&[vec![1, 2, 3], vec![4]]).unwrap();
        assert_eq!(out[0].ner_logits.shape(), &[3, 11]);
        assert_eq!(out[0].domain_logits.shape(), &[3, 4]);
        assert_eq!(out[1].features.shape(), &[1, 7]);
        assert!(matches!(p.forward(&[vec![]]), Err(ModelError::EmptySentence)));
    }

    #[test]
    fn permuting_sentences_permutes_outputs() {
        let p = TaggerParams::init(&small()).unwrap();
        let a = vec![5, 6, 7];
        let b = vec![8, 9];
        let ab = p.forward(&[a.clone(), b.clone()]).unwrap();
        let ba = p.forward(&[b, a]).unwrap();
        assert_eq!(ab[0], ba[1]);
        assert_eq!(ab[1], ba[0]);
    }

    #[test]
    fn zeroing_domain_head_leaves_ner_logits_bit_identical() {
        let p = TaggerParams::init(&small()).unwrap();
        let mut q = p.clone();
        for id in [ParamId::DomainWeight, ParamId::DomainBias] {
            q.get_mut(id).data_mut().iter_mut().for_each(|x| *x = 0.0);
        }
        let a = p.forward(&[vec![1, 2, 3]]).unwrap();
        let b = q.forward(&[vec![1, 2, 3]]).unwrap();
        assert_eq!(a[0].ner_logits, b[0].ner_logits);
        assert_ne!(a[0].domain_logits, b[0].domain_logits);
    }

    #[test]
    fn context_window_sees_neighbours_only() {
        let p = TaggerParams::init(&small()).unwrap();
        let a = p.forward(&[vec![1, 2, 3, 4]]).unwrap();
        let b = p.forward(&[vec![1, 2, 3, 50]]).unwrap();
        // window 1: token 1 sees tokens 0..=2 only
        assert_eq!(a[0].features.row(1), b[0].features.row(1));
        assert_ne!(a[0].features.row(2), b[0].features.row(2));
    }

    #[test]
    fn prediction_is_deterministic_and_shift_invariant() {
        let p = TaggerParams::init(&small()).unwrap();
        let words = ["Domnul", "Ion", "la", "Iași"];
        assert_eq!(p.predict_tags(&words).unwrap(), p.predict_tags(&words).unwrap());
        let mut q = p.clone();
        q.get_mut(ParamId::NerBias).data_mut().iter_mut().for_each(|x| *x += 3.5);
        assert_eq!(p.predict_tags(&words).unwrap(), q.predict_tags(&words).unwrap());
    }

    #[test]
    fn untrained_tagger_spreads_predictions_over_tags() {
        // Over many random tokens and several random initializations, each tag
        // is predicted for roughly 1/11 of tokens.
        let mut counts = [0usize; N_TAGS];
        let mut total = 0;
        for seed in 0..40 {
            let p = TaggerParams::init(&TaggerConfig {
                vocab_size: 4096,
                embed_dim: 16,
                hidden_dim: 16,
                seed,
                ..small()
            })
            .unwrap();
            let words: Vec<String> = (0..500).map(|i| format!("w{seed}-{i}")).collect();
            for t in p.predict_tags(&words).unwrap().iter() {
                counts[t.index()] += 1;
                total += 1;
            }
        }
        for c in counts {
            let share = c as f64 / total as f64;
            assert!((share - 1.0 / 11.0).abs() < 0.05, "{counts:?}");
        }
    }

    #[test]
    fn checkpoint_round_trip_is_exact_and_validated() {
        let p = TaggerParams::init(&small()).unwrap();
        let mut buf = Vec::new();
        p.save_json(&mut buf).unwrap();
        assert_eq!(TaggerParams::load_json(buf.as_slice()).unwrap(), p);

        let mut v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        v["params"][1]["shape"] = serde_json::json!([2, 2]);
        let broken = serde_json::to_vec(&v).unwrap();
        assert!(matches!(
            TaggerParams::load_json(broken.as_slice()),
            Err(ModelError::Checkpoint(_))
        ));
    }
}
