//! Seeded synthetic corpora for tests, benchmarks and the adaptation
//! experiments.
//!
//! Sentences are drawn from a fixed set of templates whose slots are filled
//! with entities from a syllable-generated lexicon and then written in one of
//! three orthographies. Romanian spelling changed considerably over the
//! period the corpus covers (final short `ŭ`, cedilla vs comma diacritics,
//! Latinist `ĕ`/`ê`), which is what makes the regions look different to a
//! token-level model.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokens_from_strings, Corpus, Document, EntityLabel, EntitySpan, Region, Sentence};

/// How words are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orthography {
    /// Present-day spelling.
    Modern,
    /// Transition-period spelling: short `ĭ`/`ŭ` at the end of words (added
    /// after a final consonant), cedilla `ş`/`ţ`, `î` for `â`, `ĕ` for `ă`.
    Transitional,
    /// Etymological spelling: `ĕ` for `ă`, `ê` for `â`/`î`, plain `s`/`t`,
    /// final `u` after consonants.
    Latinist,
}

fn is_vowel(c: char) -> bool {
    "aeiouăâîĕêŭ".contains(c.to_lowercase().next().unwrap_or(c))
}

/// Writes a modern-spelled word in `orthography`. Digits and punctuation are
/// never changed.
pub fn spell(word: &str, orthography: Orthography) -> String {
    if !word.chars().any(char::is_alphabetic) {
        return word.to_string();
    }
    let ends_in_consonant = word.chars().last().is_some_and(|c| c.is_alphabetic() && !is_vowel(c));
    match orthography {
        Orthography::Modern => word.to_string(),
        Orthography::Transitional => {
            let mut w: String = word
                .chars()
                .map(|c| match c {
                    'â' => 'î',
                    'ă' => 'ĕ',
                    'ș' => 'ş',
                    'ț' => 'ţ',
                    'Ș' => 'Ş',
                    'Ț' => 'Ţ',
                    c => c,
                })
                .collect();
            if ends_in_consonant {
                w.push('ŭ');
            } else if w.ends_with('i') || w.ends_with('u') {
                let last = w.pop().expect("non-empty");
                w.push(if last == 'i' { 'ĭ' } else { 'ŭ' });
            }
            w
        }
        Orthography::Latinist => {
            let mut w: String = word
                .chars()
                .map(|c| match c {
                    'ă' => 'ĕ',
                    'â' | 'î' => 'ê',
                    'Î' => 'Ê',
                    'ș' => 's',
                    'ț' => 't',
                    'Ș' => 'S',
                    'Ț' => 'T',
                    c => c,
                })
                .collect();
            if ends_in_consonant {
                w.push('u');
            }
            w
        }
    }
}

/// Entity vocabulary of one generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub first_names: Vec<String>,
    pub surnames: Vec<String>,
    pub places: Vec<String>,
    pub organisations: Vec<String>,
    pub products: Vec<String>,
}

const ONSETS: [&str; 24] = [
    "b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cr", "dr", "gr", "pr",
    "st", "tr", "ș", "ț", "str",
];
const NUCLEI: [&str; 9] = ["a", "e", "i", "o", "u", "ă", "â", "ea", "ia"];
const MONTHS: [&str; 12] = [
    "ianuarie", "februarie", "martie", "aprilie", "mai", "iunie", "iulie", "august", "septembrie",
    "octombrie", "noiembrie", "decembrie",
];
const ORG_HEADS: [&str; 5] = ["Societatea", "Banca", "Partidul", "Asociația", "Liga"];

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn stem(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    (0..syllables)
        .map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), NUCLEI.choose(rng).unwrap()))
        .collect()
}

fn unique_words(rng: &mut ChaCha8Rng, n: usize, make: impl Fn(&mut ChaCha8Rng) -> String) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(n);
    while out.len() < n {
        let w = make(rng);
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

impl Lexicon {
    /// Syllable-generated names; the same seed gives the same lexicon.
    pub fn generate(seed: u64, size: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first_names = unique_words(&mut rng, size, |r| {
            let n = r.gen_range(1..=2);
            capitalize(&stem(r, n)) + ["", "n", "l", "r"].choose(r).unwrap()
        });
        let surnames = unique_words(&mut rng, size, |r| {
            let n = r.gen_range(1..=2);
            capitalize(&stem(r, n)) + ["escu", "eanu", "ovici", "aș", "ciuc"].choose(r).unwrap()
        });
        let places = unique_words(&mut rng, size, |r| {
            let n = r.gen_range(1..=2);
            capitalize(&stem(r, n)) + ["ești", "eni", "ova", "ău", "iu", "șani"].choose(r).unwrap()
        });
        let organisations = unique_words(&mut rng, size / 2, |r| {
            let n = r.gen_range(2..=3);
            capitalize(&stem(r, n)) + ["ul", "ia", "ana"].choose(r).unwrap()
        });
        let products = unique_words(&mut rng, size / 2, |r| {
            let n = r.gen_range(2..=3);
            capitalize(&stem(r, n)) + ["ul", "ea", "ta"].choose(r).unwrap()
        });
        Self {
            first_names,
            surnames,
            places,
            organisations,
            products,
        }
    }

    fn entity(&self, rng: &mut ChaCha8Rng, label: EntityLabel) -> Vec<String> {
        let pick = |v: &[String], rng: &mut ChaCha8Rng| v.choose(rng).unwrap().clone();
        match label {
            EntityLabel::Person => {
                if rng.gen_bool(0.3) {
                    vec![pick(&self.surnames, rng)]
                } else {
                    vec![pick(&self.first_names, rng), pick(&self.surnames, rng)]
                }
            }
            EntityLabel::Location => vec![pick(&self.places, rng)],
            EntityLabel::Organisation => {
                vec![ORG_HEADS.choose(rng).unwrap().to_string(), pick(&self.organisations, rng)]
            }
            EntityLabel::Product => vec![pick(&self.products, rng)],
            EntityLabel::Date => {
                let year = rng.gen_range(1817..=1990).to_string();
                if rng.gen_bool(0.5) {
                    vec![year]
                } else {
                    let day = rng.gen_range(1..=28).to_string();
                    vec![day, MONTHS.choose(rng).unwrap().to_string(), year]
                }
            }
        }
    }
}

/// `{P}` person, `{L}` location, `{O}` organisation, `{R}` product, `{D}` date.
const TEMPLATES: [&str; 14] = [
    "{P} a sosit ieri la {L} .",
    "domnul {P} a fost ales în {O} .",
    "la {D} s-a deschis la {L} o școală nouă .",
    "ziarul {R} scrie despre {P} .",
    "în {D} , {O} din {L} a ținut o adunare .",
    "{P} și {P} au plecat din {L} spre {L} .",
    "membrii {O} au citit {R} în {D} .",
    "primăria din {L} a trimis o scrisoare lui {P} .",
    "oamenii din sat lucrează la câmp toată ziua .",
    "{P} a publicat un articol în {R} .",
    "negustorii din {L} vând grâu și vin la târg .",
    "la adunarea {O} a vorbit {P} .",
    "în anul {D} foametea a lovit satele din jurul {L} .",
    "preotul satului a citit scrisoarea cu glas tare .",
];

/// One generator: a lexicon, an orthography and a template weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct Dialect {
    pub lexicon: Lexicon,
    pub orthography: Orthography,
    /// Whether context words are also written in `orthography` (entities
    /// always are).
    pub spell_context: bool,
}

impl Dialect {
    /// Draws one sentence.
    pub fn sentence(&self, rng: &mut ChaCha8Rng, region: Region) -> Sentence {
        let template = TEMPLATES.choose(rng).unwrap();
        let mut words = Vec::new();
        let mut spans = Vec::new();
        for piece in template.split(' ') {
            let label = match piece {
                "{P}" => Some(EntityLabel::Person),
                "{L}" => Some(EntityLabel::Location),
                "{O}" => Some(EntityLabel::Organisation),
                "{R}" => Some(EntityLabel::Product),
                "{D}" => Some(EntityLabel::Date),
                _ => None,
            };
            match label {
                Some(label) => {
                    let entity = self.lexicon.entity(rng, label);
                    let first = words.len();
                    words.extend(entity.iter().map(|w| spell(w, self.orthography)));
                    spans.push(EntitySpan::new(label, first, words.len() - 1));
                }
                None if self.spell_context => words.push(spell(piece, self.orthography)),
                None => words.push(piece.to_string()),
            }
        }
        Sentence::from_spans(tokens_from_strings(&words), spans, region).expect("templates yield disjoint spans")
    }

    fn documents(&self, rng: &mut ChaCha8Rng, region: Region, sentences: usize, prefix: &str) -> Vec<Document> {
        const PER_DOC: usize = 10;
        (0..sentences.div_ceil(PER_DOC))
            .map(|d| {
                let n = PER_DOC.min(sentences - d * PER_DOC);
                Document {
                    id: format!("{prefix}-{}-{d:04}", region.short().trim_end_matches('.').to_lowercase()),
                    region,
                    year: Some(rng.gen_range(1817..=1990)),
                    sentences: (0..n).map(|_| self.sentence(rng, region)).collect(),
                }
            })
            .collect()
    }
}

/// Parameters of the two-domain adaptation corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDomainSpec {
    pub source: Region,
    pub target: Region,
    pub sentences_per_domain: usize,
    pub lexicon_size: usize,
    pub spell_context: bool,
    pub seed: u64,
}

impl Default for TwoDomainSpec {
    fn default() -> Self {
        Self {
            source: Region::Bessarabia,
            target: Region::Transylvania,
            sentences_per_domain: 600,
            lexicon_size: 60,
            spell_context: true,
            seed: 0,
        }
    }
}

/// Two regions describing the same world (same lexicon and templates) in
/// different spellings: the source in the transition-period orthography, the
/// target in the modern one. Entity tokens therefore never coincide across
/// the two regions except for numbers.
pub fn two_domain_corpus(spec: &TwoDomainSpec) -> Corpus {
    let lexicon = Lexicon::generate(spec.seed, spec.lexicon_size);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
    let mut docs = Vec::new();
    for (region, orthography) in [(spec.source, Orthography::Transitional), (spec.target, Orthography::Modern)] {
        let dialect = Dialect {
            lexicon: lexicon.clone(),
            orthography,
            spell_context: spec.spell_context,
        };
        docs.extend(dialect.documents(&mut rng, region, spec.sentences_per_domain, "syn"));
    }
    Corpus::new(docs).expect("generated ids are unique")
}

/// Four regions where Bessarabia and Moldavia share one generator while
/// Transylvania and Wallachia each have their own lexicon and orthography.
pub fn coupled_regions_corpus(sentences_per_region: usize, lexicon_size: usize, seed: u64) -> Corpus {
    let shared = Dialect {
        lexicon: Lexicon::generate(seed, lexicon_size),
        orthography: Orthography::Transitional,
        spell_context: true,
    };
    let dialects = [
        (Region::Bessarabia, shared.clone()),
        (Region::Moldavia, shared),
        (
            Region::Transylvania,
            Dialect {
                lexicon: Lexicon::generate(seed.wrapping_add(1_000), lexicon_size),
                orthography: Orthography::Latinist,
                spell_context: true,
            },
        ),
        (
            Region::Wallachia,
            Dialect {
                lexicon: Lexicon::generate(seed.wrapping_add(2_000), lexicon_size),
                orthography: Orthography::Modern,
                spell_context: true,
            },
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0de);
    let docs = dialects
        .iter()
        .flat_map(|(region, d)| d.documents(&mut rng, *region, sentences_per_region, "reg"))
        .collect();
    Corpus::new(docs).expect("generated ids are unique")
}

/// A small corpus where every entity is a single token that always carries
/// the same label, so memorizing the lexicon suffices.
pub fn separable_corpus(sentences: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lexicon: [(EntityLabel, [&str; 3]); 5] = [
        (EntityLabel::Person, ["Ion", "Maria", "Vasile"]),
        (EntityLabel::Organisation, ["Astra", "Junimea", "Sfatul"]),
        (EntityLabel::Location, ["Iași", "Chișinău", "Brașov"]),
        (EntityLabel::Product, ["Albina", "Dacia", "Universul"]),
        (EntityLabel::Date, ["1848", "1859", "1918"]),
    ];
    let filler = ["a", "venit", "azi", "cu", "noi", "și", "apoi", "plecat"];
    let docs = (0..sentences)
        .map(|i| {
            let region = Region::ALL[i % Region::COUNT];
            let n = rng.gen_range(3..8);
            let mut words: Vec<String> = (0..n).map(|_| filler.choose(&mut rng).unwrap().to_string()).collect();
            let (label, names) = lexicon.choose(&mut rng).unwrap();
            let at = rng.gen_range(0..=words.len());
            words.insert(at, names.choose(&mut rng).unwrap().to_string());
            words.push(".".into());
            let sentence = Sentence::from_spans(tokens_from_strings(&words), vec![EntitySpan::new(*label, at, at)], region)
                .expect("one span");
            Document {
                id: format!("sep-{i:05}"),
                region,
                year: None,
                sentences: vec![sentence],
            }
        })
        .collect();
    Corpus::new(docs).expect("unique ids")
}
