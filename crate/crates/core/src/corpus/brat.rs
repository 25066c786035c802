//! BRAT standoff ingestion.
//!
//! A document is a `.txt` file plus an `.ann` file whose `T` lines look like
//! `T1<TAB>PERSON 0 5<TAB>Mihai`. Offsets are character offsets into the
//! text. Only text-bound annotations are consumed; relations, events,
//! attributes and notes are skipped with a warning.

use log::warn;

use super::{tokenize::tokenize_at, CorpusError, Document, EntityLabel, EntitySpan, Region, Sentence, Token};

/// A text-bound annotation before token alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSpan {
    pub id: String,
    pub label: EntityLabel,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

pub fn parse_brat(text: &str, ann: &str) -> Result<Vec<RawSpan>, CorpusError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    for (idx, line) in ann.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if !line.starts_with('T') {
            warn!("ann line {line_no}: skipping non text-bound annotation");
            continue;
        }
        let malformed = |reason: &str| CorpusError::Parse {
            line: line_no,
            message: reason.to_string(),
        };
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or_default();
        let middle = fields.next().ok_or_else(|| malformed("missing annotation field"))?;
        let surface = fields.next().ok_or_else(|| malformed("missing surface field"))?;

        let (label, offsets) = middle
            .split_once(' ')
            .ok_or_else(|| malformed("expected `LABEL start end`"))?;
        if offsets.contains(';') {
            return Err(CorpusError::Unsupported {
                line: line_no,
                feature: "discontinuous span",
            });
        }
        let mut nums = offsets.split(' ');
        let parse_offset = |s: Option<&str>| -> Result<usize, CorpusError> {
            s.and_then(|v| v.parse().ok())
                .ok_or_else(|| malformed("offsets must be non-negative integers"))
        };
        let start = parse_offset(nums.next())?;
        let end = parse_offset(nums.next())?;
        if nums.next().is_some() {
            return Err(malformed("expected exactly two offsets"));
        }
        if start >= end {
            return Err(malformed("span start must precede its end"));
        }
        let label: EntityLabel = label.parse().map_err(|_| CorpusError::Parse {
            line: line_no,
            message: format!("unknown entity label `{label}`"),
        })?;
        if end > chars.len() {
            return Err(CorpusError::Alignment {
                line: line_no,
                message: format!("span {start}..{end} exceeds text length {}", chars.len()),
            });
        }
        let actual: String = chars[start..end].iter().collect();
        if actual != surface {
            return Err(CorpusError::Alignment {
                line: line_no,
                message: format!("surface `{surface}` does not match text `{actual}`"),
            });
        }
        out.push(RawSpan {
            id: id.to_string(),
            label,
            start,
            end,
            surface: surface.to_string(),
        });
    }
    Ok(out)
}

/// Maps character spans onto the smallest window of tokens covering them.
///
/// A span that cuts through a token is widened to include the whole token.
/// Resulting spans are returned sorted; overlapping windows are an error.
pub fn align_spans(tokens: &[Token], raw: &[RawSpan]) -> Result<Vec<EntitySpan>, CorpusError> {
    let mut spans = Vec::with_capacity(raw.len());
    for r in raw {
        let first = tokens.iter().position(|t| t.end > r.start && t.start < r.end);
        let last = tokens.iter().rposition(|t| t.end > r.start && t.start < r.end);
        let (Some(first), Some(last)) = (first, last) else {
            return Err(CorpusError::SpanOutsideText {
                id: r.id.clone(),
                start: r.start,
                end: r.end,
            });
        };
        spans.push((EntitySpan::new(r.label, first, last), r.id.as_str()));
    }
    spans.sort();
    for pair in spans.windows(2) {
        if pair[0].0.overlaps(&pair[1].0) {
            return Err(CorpusError::NestedAnnotation {
                first: pair[0].1.to_string(),
                second: pair[1].1.to_string(),
            });
        }
    }
    Ok(spans.into_iter().map(|(s, _)| s).collect())
}

/// Builds a document from a BRAT pair. Each non-blank line of the text is a
/// sentence; an annotation may not cross a line break.
pub fn brat_document(
    id: &str,
    region: Region,
    year: Option<u16>,
    text: &str,
    ann: &str,
) -> Result<Document, CorpusError> {
    let raw = parse_brat(text, ann)?;
    let mut sentences = Vec::new();
    let mut assigned = vec![false; raw.len()];
    let mut offset = 0;
    for line in text.split('\n') {
        let len = line.chars().count();
        let (line_start, line_end) = (offset, offset + len);
        offset = line_end + 1;
        let tokens = tokenize_at(line, line_start);
        if tokens.is_empty() {
            continue;
        }
        let mut inside = Vec::new();
        for (i, r) in raw.iter().enumerate() {
            if r.start >= line_start && r.end <= line_end {
                inside.push(r.clone());
                assigned[i] = true;
            }
        }
        let spans = align_spans(&tokens, &inside)?;
        sentences.push(Sentence::from_spans(tokens, spans, region)?);
    }
    if let Some(i) = assigned.iter().position(|a| !a) {
        return Err(CorpusError::SpanOutsideText {
            id: raw[i].id.clone(),
            start: raw[i].start,
            end: raw[i].end,
        });
    }
    Ok(Document {
        id: id.to_string(),
        region,
        year,
        sentences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;
    use crate::corpus::EntityLabel::*;

    fn raw(label: EntityLabel, start: usize, end: usize) -> RawSpan {
        RawSpan {
            id: format!("T{start}"),
            label,
            start,
            end,
            surface: String::new(),
        }
    }

    #[test]
    fn parses_a_single_entity() {
        let spans = parse_brat("Mihai merge.", "T1\tPERSON 0 5\tMihai").unwrap();
        assert_eq!(
            spans,
            vec![RawSpan {
                id: "T1".into(),
                label: Person,
                start: 0,
                end: 5,
                surface: "Mihai".into()
            }]
        );
    }

    #[test]
    fn empty_annotation_file() {
        assert!(parse_brat("abc", "").unwrap().is_empty());
    }

    #[test]
    fn surface_mismatch_is_alignment_error() {
        let err = parse_brat("abc", "T1\tPERSON 0 2\txy").unwrap_err();
        assert!(matches!(err, CorpusError::Alignment { line: 1, .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let ann = "T1\tPERSON 0 1\ta\nT2\tPERSON zero 1\ta";
        let err = parse_brat("abc", ann).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }), "{err}");
        assert!(matches!(
            parse_brat("abc", "T1\tPERSON 0 1"),
            Err(CorpusError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn discontinuous_spans_are_unsupported() {
        let err = parse_brat("ab cd", "T1\tPERSON 0 2;3 5\tab cd").unwrap_err();
        assert!(matches!(err, CorpusError::Unsupported { line: 1, .. }));
    }

    #[test]
    fn non_text_bound_lines_are_skipped() {
        let ann = "T1\tDATE 0 4\t1848\nR1\tRel Arg1:T1 Arg2:T1\n#1\tAnnotatorNotes T1\tnote";
        assert_eq!(parse_brat("1848", ann).unwrap().len(), 1);
    }

    #[test]
    fn align_exact_boundaries() {
        let tokens = tokenize("Ion Popescu vine");
        assert_eq!(
            align_spans(&tokens, &[raw(Person, 0, 11)]).unwrap(),
            vec![EntitySpan::new(Person, 0, 1)]
        );
    }

    /// Smallest window [i, j] that contains every token touching the span.
    fn brute_force_window(tokens: &[Token], start: usize, end: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..tokens.len() {
            for j in i..tokens.len() {
                let covers = tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.end > start && t.start < end)
                    .all(|(k, _)| i <= k && k <= j);
                let touches = (i..=j).any(|k| tokens[k].end > start && tokens[k].start < end);
                if covers && touches && best.is_none_or(|(a, b)| j - i < b - a) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    #[test]
    fn partial_token_span_expands_to_whole_token() {
        let tokens = tokenize("Ion Popescu vine");
        let got = align_spans(&tokens, &[raw(Person, 4, 7)]).unwrap();
        assert_eq!(got, vec![EntitySpan::new(Person, 1, 1)]);
        let text = "Ion Popescu, din Chișinău, vine la 12 mai 1918.";
        let tokens = tokenize(text);
        let n = text.chars().count();
        for start in 0..n {
            for end in start + 1..=n {
                let aligned = align_spans(&tokens, &[raw(Date, start, end)]).ok();
                let expected = brute_force_window(&tokens, start, end)
                    .map(|(i, j)| vec![EntitySpan::new(Date, i, j)]);
                assert_eq!(aligned, expected, "span {start}..{end}");
            }
        }
    }

    #[test]
    fn overlapping_token_ranges_are_rejected() {
        let tokens = tokenize("Ion Popescu vine");
        let err = align_spans(&tokens, &[raw(Person, 0, 6), raw(Location, 5, 11)]).unwrap_err();
        assert!(matches!(err, CorpusError::NestedAnnotation { .. }));
    }

    #[test]
    fn whitespace_only_span_is_outside_text() {
        let tokens = tokenize("a  b");
        assert!(matches!(
            align_spans(&tokens, &[raw(Date, 1, 3)]),
            Err(CorpusError::SpanOutsideText { .. })
        ));
    }

    #[test]
    fn document_splits_lines_into_sentences() {
        let text = "Domnul Ion Brătianu a sosit.\n\nLa 1 mai 1877 la București.\n";
        let ann = "T1\tPERSON 7 19\tIon Brătianu\nT2\tDATE 33 43\t1 mai 1877\nT3\tLOCATION 47 56\tBucurești";
        let doc = brat_document("d1", Region::Wallachia, Some(1877), text, ann).unwrap();
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0].spans, vec![EntitySpan::new(Person, 1, 2)]);
        assert_eq!(
            doc.sentences[1].spans,
            vec![EntitySpan::new(Date, 1, 3), EntitySpan::new(Location, 5, 5)]
        );
        assert_eq!(doc.sentences[1].tokens[1].start, 33);
    }

    #[test]
    fn span_crossing_a_line_break_is_rejected() {
        let text = "Ion Popescu\nvine";
        let ann = "T1\tPERSON 4 16\tPopescu vine";
        assert!(brat_document("d", Region::Moldavia, None, text, ann).is_err());
    }
}
