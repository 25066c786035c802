use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{iob, CorpusError};

/// Historical region a document was collected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Bessarabia,
    Moldavia,
    Transylvania,
    Wallachia,
}

impl Region {
    pub const ALL: [Region; 4] = [
        Region::Bessarabia,
        Region::Moldavia,
        Region::Transylvania,
        Region::Wallachia,
    ];
    pub const COUNT: usize = 4;

    /// Stable class index used by the domain head.
    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Region> {
        Self::ALL.get(code).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Bessarabia => "Bessarabia",
            Region::Moldavia => "Moldavia",
            Region::Transylvania => "Transylvania",
            Region::Wallachia => "Wallachia",
        }
    }

    /// Column header abbreviation used in evaluation tables.
    pub fn short(self) -> &'static str {
        match self {
            Region::Bessarabia => "Bess.",
            Region::Moldavia => "Mold.",
            Region::Transylvania => "Trans.",
            Region::Wallachia => "Wall.",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // English names plus the Romanian ones used in the public release.
        match s.trim().to_lowercase().as_str() {
            "bessarabia" | "basarabia" | "bess." | "bess" => Ok(Region::Bessarabia),
            "moldavia" | "moldova" | "mold." | "mold" => Ok(Region::Moldavia),
            "transylvania" | "transilvania" | "ardeal" | "trans." | "trans" => {
                Ok(Region::Transylvania)
            }
            "wallachia" | "muntenia" | "țara românească" | "tara romaneasca" | "wall." | "wall" => {
                Ok(Region::Wallachia)
            }
            _ => Err(CorpusError::UnknownRegion(s.to_string())),
        }
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Entity type. The spelling `ORGANISATION` follows the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityLabel {
    Person,
    Organisation,
    Location,
    Product,
    Date,
}

impl EntityLabel {
    pub const ALL: [EntityLabel; 5] = [
        EntityLabel::Person,
        EntityLabel::Organisation,
        EntityLabel::Location,
        EntityLabel::Product,
        EntityLabel::Date,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            EntityLabel::Person => "PERSON",
            EntityLabel::Organisation => "ORGANISATION",
            EntityLabel::Location => "LOCATION",
            EntityLabel::Product => "PRODUCT",
            EntityLabel::Date => "DATE",
        }
    }
}

impl fmt::Display for EntityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntityLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PERSON" => Ok(EntityLabel::Person),
            // the BRAT configuration of some annotators uses the US spelling
            "ORGANISATION" | "ORGANIZATION" => Ok(EntityLabel::Organisation),
            "LOCATION" => Ok(EntityLabel::Location),
            "PRODUCT" => Ok(EntityLabel::Product),
            "DATE" => Ok(EntityLabel::Date),
            _ => Err(CorpusError::UnknownLabel(s.to_string())),
        }
    }
}

impl Serialize for EntityLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EntityLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One IOB2 tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    O,
    B(EntityLabel),
    I(EntityLabel),
}

impl Tag {
    pub const COUNT: usize = 11;

    /// Class index: `O` is 0, then `B-X`, `I-X` pairs in label order.
    pub fn index(self) -> usize {
        match self {
            Tag::O => 0,
            Tag::B(l) => 1 + 2 * l.index(),
            Tag::I(l) => 2 + 2 * l.index(),
        }
    }

    pub fn from_index(i: usize) -> Option<Tag> {
        match i {
            0 => Some(Tag::O),
            1..=10 => {
                let label = EntityLabel::ALL[(i - 1) / 2];
                Some(if i % 2 == 1 {
                    Tag::B(label)
                } else {
                    Tag::I(label)
                })
            }
            _ => None,
        }
    }

    pub fn all() -> impl Iterator<Item = Tag> {
        (0..Self::COUNT).filter_map(Tag::from_index)
    }

    pub fn label(self) -> Option<EntityLabel> {
        match self {
            Tag::O => None,
            Tag::B(l) | Tag::I(l) => Some(l),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::O => f.write_str("O"),
            Tag::B(l) => write!(f, "B-{l}"),
            Tag::I(l) => write!(f, "I-{l}"),
        }
    }
}

impl FromStr for Tag {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(Tag::O);
        }
        let unknown = || CorpusError::UnknownTag(s.to_string());
        let (prefix, label) = s.split_once('-').ok_or_else(unknown)?;
        let label: EntityLabel = label.parse().map_err(|_| unknown())?;
        match prefix {
            "B" => Ok(Tag::B(label)),
            "I" => Ok(Tag::I(label)),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-token tags of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagSequence(pub Vec<Tag>);

impl TagSequence {
    pub fn outside(n: usize) -> Self {
        Self(vec![Tag::O; n])
    }

    /// Parses tag strings, failing on the first unknown one.
    pub fn parse<S: AsRef<str>>(tags: &[S]) -> Result<Self, CorpusError> {
        tags.iter()
            .map(|t| t.as_ref().parse())
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tag> {
        self.0.iter()
    }

    /// True when every `I-X` follows a `B-X` or `I-X`.
    pub fn is_valid_iob2(&self) -> bool {
        let mut prev = Tag::O;
        for &t in &self.0 {
            if let Tag::I(l) = t {
                if prev.label() != Some(l) {
                    return false;
                }
            }
            prev = t;
        }
        true
    }
}

impl From<Vec<Tag>> for TagSequence {
    fn from(v: Vec<Tag>) -> Self {
        Self(v)
    }
}

/// A token with character (not byte) offsets into its source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            text: text.into(),
            start,
            end,
        }
    }
}

/// Builds tokens for pre-tokenized text by laying the tokens out with single
/// spaces between them.
pub fn tokens_from_strings<S: AsRef<str>>(words: &[S]) -> Vec<Token> {
    let mut offset = 0;
    words
        .iter()
        .map(|w| {
            let w = w.as_ref();
            let len = w.chars().count();
            let tok = Token::new(w, offset, offset + len);
            offset += len + 1;
            tok
        })
        .collect()
}

/// Entity mention over an inclusive token range. Spans order by position,
/// then label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntitySpan {
    pub label: EntityLabel,
    pub first: usize,
    pub last: usize,
}

impl Ord for EntitySpan {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.first, self.last, self.label).cmp(&(other.first, other.last, other.label))
    }
}

impl PartialOrd for EntitySpan {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl EntitySpan {
    pub fn new(label: EntityLabel, first: usize, last: usize) -> Self {
        Self { label, first, last }
    }

    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.first <= other.last && other.first <= self.last
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub tags: TagSequence,
    /// Derived from `tags` by the constructors; kept alongside so that
    /// hand-built or externally produced sentences can be validated.
    pub spans: Vec<EntitySpan>,
    pub region: Region,
}

impl Sentence {
    /// Builds a sentence from stored tags. Stray `I-X` tags are repaired when
    /// deriving spans, and the stored tags are re-encoded accordingly.
    pub fn from_tags(tokens: Vec<Token>, tags: TagSequence, region: Region) -> Result<Self, CorpusError> {
        if tokens.len() != tags.len() {
            return Err(CorpusError::LengthMismatch {
                tokens: tokens.len(),
                tags: tags.len(),
            });
        }
        let spans = iob::decode_iob(&tags);
        let tags = iob::encode_iob(&spans, tokens.len())?;
        Ok(Self {
            tokens,
            tags,
            spans,
            region,
        })
    }

    pub fn from_spans(tokens: Vec<Token>, spans: Vec<EntitySpan>, region: Region) -> Result<Self, CorpusError> {
        let tags = iob::encode_iob(&spans, tokens.len())?;
        let mut spans = spans;
        spans.sort();
        Ok(Self {
            tokens,
            tags,
            spans,
            region,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    /// Surface form of a span: its tokens joined with single spaces.
    pub fn surface(&self, span: &EntitySpan) -> String {
        self.tokens[span.first..=span.last]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub region: Region,
    pub year: Option<u16>,
    pub sentences: Vec<Sentence>,
}

pub const MIN_YEAR: u16 = 1817;
pub const MAX_YEAR: u16 = 1990;

/// Ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateDocument(d.id.clone()));
            }
        }
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn is_empty(&self) -> bool {
        self.documents.iter().all(|d| d.sentences.is_empty())
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn token_count(&self) -> usize {
        self.sentences().map(Sentence::len).sum()
    }

    /// Keeps only the sentences for which `keep(doc, index, sentence)` holds;
    /// documents left without sentences are dropped.
    pub fn filter_sentences(&self, mut keep: impl FnMut(&Document, usize, &Sentence) -> bool) -> Corpus {
        let documents = self
            .documents
            .iter()
            .filter_map(|d| {
                let sentences: Vec<Sentence> = d
                    .sentences
                    .iter()
                    .enumerate()
                    .filter(|(i, s)| keep(d, *i, s))
                    .map(|(_, s)| s.clone())
                    .collect();
                (!sentences.is_empty()).then(|| Document {
                    sentences,
                    ..d.clone()
                })
            })
            .collect();
        Corpus { documents }
    }

    pub fn region(&self, region: Region) -> Corpus {
        self.filter_sentences(|_, _, s| s.region == region)
    }
}
