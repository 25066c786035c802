use super::{CorpusError, EntitySpan, Tag, TagSequence};

/// IOB2 encoding: `B-X` on the first token of each span, `I-X` on the rest.
pub fn encode_iob(spans: &[EntitySpan], n_tokens: usize) -> Result<TagSequence, CorpusError> {
    let mut tags = vec![Tag::O; n_tokens];
    let mut taken = vec![false; n_tokens];
    for span in spans {
        if span.first > span.last || span.last >= n_tokens {
            return Err(CorpusError::SpanOutOfRange {
                first: span.first,
                last: span.last,
                n_tokens,
            });
        }
        for i in span.first..=span.last {
            if taken[i] {
                return Err(CorpusError::OverlappingSpans { token: i });
            }
            taken[i] = true;
            tags[i] = if i == span.first {
                Tag::B(span.label)
            } else {
                Tag::I(span.label)
            };
        }
    }
    Ok(TagSequence(tags))
}

/// Decodes tags into maximal spans. A stray `I-X` (not continuing an `X`
/// span) opens a new span, as if it were `B-X`.
pub fn decode_iob(tags: &TagSequence) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    let mut open: Option<EntitySpan> = None;
    for (i, &tag) in tags.iter().enumerate() {
        match tag {
            Tag::O => {
                spans.extend(open.take());
            }
            Tag::B(label) => {
                spans.extend(open.take());
                open = Some(EntitySpan::new(label, i, i));
            }
            Tag::I(label) => match &mut open {
                Some(span) if span.label == label => span.last = i,
                _ => {
                    spans.extend(open.take());
                    open = Some(EntitySpan::new(label, i, i));
                }
            },
        }
    }
    spans.extend(open);
    spans
}

/// Decodes raw tag strings, rejecting anything outside the 11-tag alphabet.
pub fn decode_iob_strings<S: AsRef<str>>(tags: &[S]) -> Result<Vec<EntitySpan>, CorpusError> {
    Ok(decode_iob(&TagSequence::parse(tags)?))
}
