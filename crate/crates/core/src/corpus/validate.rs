use std::fmt;

use serde::Serialize;

use super::{iob, Document, EntitySpan, MAX_YEAR, MIN_YEAR};

/// One problem found by [`validate`]. Sentence and token positions are
/// zero-based indices within the document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OverlappingSpans {
        sentence: usize,
        first: EntitySpanRef,
        second: EntitySpanRef,
    },
    SpanOutOfRange {
        sentence: usize,
        span: EntitySpanRef,
        n_tokens: usize,
    },
    TagLengthMismatch {
        sentence: usize,
        tokens: usize,
        tags: usize,
    },
    TagsDisagreeWithSpans {
        sentence: usize,
    },
    BadTokenOffsets {
        sentence: usize,
        token: usize,
    },
    RegionMismatch {
        sentence: usize,
    },
    YearOutOfRange {
        year: u16,
    },
    EmptySentence {
        sentence: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EntitySpanRef {
    pub label: &'static str,
    pub first: usize,
    pub last: usize,
}

impl From<&EntitySpan> for EntitySpanRef {
    fn from(s: &EntitySpan) -> Self {
        Self {
            label: s.label.name(),
            first: s.first,
            last: s.last,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OverlappingSpans {
                sentence,
                first,
                second,
            } => write!(
                f,
                "sentence {sentence}: {} {}..{} overlaps {} {}..{}",
                first.label, first.first, first.last, second.label, second.first, second.last
            ),
            Violation::SpanOutOfRange {
                sentence,
                span,
                n_tokens,
            } => write!(
                f,
                "sentence {sentence}: {} {}..{} outside {n_tokens} tokens",
                span.label, span.first, span.last
            ),
            Violation::TagLengthMismatch {
                sentence,
                tokens,
                tags,
            } => write!(f, "sentence {sentence}: {tags} tags for {tokens} tokens"),
            Violation::TagsDisagreeWithSpans { sentence } => {
                write!(f, "sentence {sentence}: tags do not decode to the stored spans")
            }
            Violation::BadTokenOffsets { sentence, token } => {
                write!(f, "sentence {sentence}: token {token} has inconsistent offsets")
            }
            Violation::RegionMismatch { sentence } => {
                write!(f, "sentence {sentence}: region differs from its document")
            }
            Violation::YearOutOfRange { year } => {
                write!(f, "year {year} outside {MIN_YEAR}..={MAX_YEAR}")
            }
            Violation::EmptySentence { sentence } => write!(f, "sentence {sentence}: no tokens"),
        }
    }
}

/// Checks a document against the annotation rules: no overlapping or nested
/// spans, one tag per token, tags consistent with spans, and well-formed
/// token offsets. Returns an empty list for a well-formed document.
pub fn validate(doc: &Document) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(year) = doc.year {
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            out.push(Violation::YearOutOfRange { year });
        }
    }
    for (si, s) in doc.sentences.iter().enumerate() {
        let before = out.len();
        if s.tokens.is_empty() {
            out.push(Violation::EmptySentence { sentence: si });
        }
        if s.region != doc.region {
            out.push(Violation::RegionMismatch { sentence: si });
        }
        let mut prev_end = 0;
        for (ti, t) in s.tokens.iter().enumerate() {
            let ok = t.start < t.end
                && t.start >= prev_end
                && t.text.chars().count() == t.end - t.start;
            if !ok {
                out.push(Violation::BadTokenOffsets {
                    sentence: si,
                    token: ti,
                });
            }
            prev_end = t.end;
        }
        if s.tags.len() != s.tokens.len() {
            out.push(Violation::TagLengthMismatch {
                sentence: si,
                tokens: s.tokens.len(),
                tags: s.tags.len(),
            });
        }
        let mut spans = s.spans.clone();
        spans.sort();
        for span in &spans {
            if span.first > span.last || span.last >= s.tokens.len() {
                out.push(Violation::SpanOutOfRange {
                    sentence: si,
                    span: span.into(),
                    n_tokens: s.tokens.len(),
                });
            }
        }
        for (i, a) in spans.iter().enumerate() {
            for b in &spans[i + 1..] {
                if a.overlaps(b) {
                    out.push(Violation::OverlappingSpans {
                        sentence: si,
                        first: a.into(),
                        second: b.into(),
                    });
                }
            }
        }
        // only meaningful when the structural checks above passed
        if out.len() == before && iob::decode_iob(&s.tags) != spans {
            out.push(Violation::TagsDisagreeWithSpans { sentence: si });
        }
    }
    out
}
