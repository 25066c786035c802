//! Serialized corpus forms.
//!
//! The canonical format is JSONL, one sentence per line:
//! `{"doc_id": "...", "region": "Moldavia", "tokens": [...], "tags": [...], "year": 1900}`
//! (`year` optional). Lines of one document are consecutive or at least share
//! `doc_id`; they are grouped back into documents in first-seen order.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::split::{sentence_key, SplitFile};
use super::{tokens_from_strings, Corpus, CorpusError, Document, Region, Sentence, Tag, TagSequence};

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    doc_id: String,
    region: Region,
    tokens: Vec<String>,
    tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    year: Option<u16>,
}

/// Groups sentences into documents, keeping first-seen document order.
#[derive(Default)]
struct DocumentBuilder {
    docs: Vec<Document>,
    index: HashMap<String, usize>,
}

impl DocumentBuilder {
    /// Appends a sentence and returns its index within its document.
    fn push(
        &mut self,
        line: usize,
        doc_id: &str,
        year: Option<u16>,
        sentence: Sentence,
    ) -> Result<usize, CorpusError> {
        let at = |message: String| CorpusError::Parse { line, message };
        match self.index.get(doc_id) {
            Some(&i) => {
                let doc = &mut self.docs[i];
                if doc.region != sentence.region {
                    return Err(at(format!("document `{doc_id}` changes region")));
                }
                if year.is_some() && doc.year != year {
                    return Err(at(format!("document `{doc_id}` changes year")));
                }
                doc.sentences.push(sentence);
                Ok(doc.sentences.len() - 1)
            }
            None => {
                self.index.insert(doc_id.to_string(), self.docs.len());
                self.docs.push(Document {
                    id: doc_id.to_string(),
                    region: sentence.region,
                    year,
                    sentences: vec![sentence],
                });
                Ok(0)
            }
        }
    }

    fn finish(self) -> Result<Corpus, CorpusError> {
        Corpus::new(self.docs)
    }
}

pub fn load_jsonl<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut builder = DocumentBuilder::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let at = |message: String| CorpusError::Parse {
            line: line_no,
            message,
        };
        let rec: SentenceRecord = serde_json::from_str(&line).map_err(|e| at(e.to_string()))?;
        let tags = TagSequence::parse(&rec.tags).map_err(|e| at(e.to_string()))?;
        if rec.tokens.is_empty() {
            return Err(at("sentence without tokens".into()));
        }
        let sentence = Sentence::from_tags(tokens_from_strings(&rec.tokens), tags, rec.region)
            .map_err(|e| at(e.to_string()))?;
        builder.push(line_no, &rec.doc_id, rec.year, sentence)?;
    }
    builder.finish()
}

pub fn load_jsonl_file(path: &Path) -> Result<Corpus, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io_at(path, e))?;
    load_jsonl(std::io::BufReader::new(file))
}

pub fn save_jsonl<W: Write>(corpus: &Corpus, mut writer: W) -> Result<(), CorpusError> {
    for d in corpus.documents() {
        for s in &d.sentences {
            let rec = SentenceRecord {
                doc_id: d.id.clone(),
                region: s.region,
                tokens: s.tokens.iter().map(|t| t.text.clone()).collect(),
                tags: s.tags.iter().map(Tag::to_string).collect(),
                year: d.year,
            };
            serde_json::to_writer(&mut writer, &rec).map_err(std::io::Error::from)?;
            writer.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// One `token<TAB>tag` line per token, a blank line after every sentence.
pub fn export_conll<W: Write>(corpus: &Corpus, mut writer: W) -> Result<(), CorpusError> {
    for s in corpus.sentences() {
        for (t, tag) in s.tokens.iter().zip(s.tags.iter()) {
            writeln!(writer, "{}\t{}", t.text, tag)?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

fn subset_file(dir: &Path, names: &[&str]) -> Option<std::path::PathBuf> {
    for name in names {
        for ext in ["jsonl", "json"] {
            let p = dir.join(format!("{name}.{ext}"));
            if p.is_file() {
                return Some(p);
            }
        }
    }
    None
}

fn histnero_records(text: &str) -> Result<Vec<(usize, Value)>, CorpusError> {
    if text.trim_start().starts_with('[') {
        let all: Vec<Value> = serde_json::from_str(text).map_err(|e| CorpusError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        return Ok(all.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect());
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|v| (i + 1, v))
                .map_err(|e| CorpusError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}

fn histnero_tag(v: &Value) -> Option<Tag> {
    match v {
        Value::Number(n) => n.as_u64().and_then(|i| Tag::from_index(i as usize)),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Reads the public release laid out as `train`, `valid` (or `validation`,
/// `dev`) and `test` files of JSON records, returning the corpus and the
/// published split.
///
/// Each record needs `tokens` and `ner_tags` (integer class ids in the
/// `O, B-PERSON, I-PERSON, ...` order, or tag strings) and `region`. The
/// document id is read from `doc_id`/`document_id`/`doc`; records without one
/// become single-sentence documents.
pub fn load_histnero_dir(dir: &Path) -> Result<(Corpus, SplitFile), CorpusError> {
    let mut builder = DocumentBuilder::default();
    let mut split = SplitFile::default();
    let subsets: [(&[&str], &str); 3] = [
        (&["train"], "train"),
        (&["valid", "validation", "dev"], "valid"),
        (&["test"], "test"),
    ];
    for (names, subset) in subsets {
        let path = subset_file(dir, names).ok_or_else(|| {
            CorpusError::Config(format!("no {subset} file in {}", dir.display()))
        })?;
        let text = fs::read_to_string(&path).map_err(|e| CorpusError::io_at(&path, e))?;
        for (line, rec) in histnero_records(&text)? {
            let at = |message: String| CorpusError::Parse { line, message };
            let tokens: Vec<String> = rec
                .get("tokens")
                .and_then(Value::as_array)
                .ok_or_else(|| at("missing `tokens`".into()))?
                .iter()
                .map(|t| t.as_str().map(str::to_string))
                .collect::<Option<_>>()
                .ok_or_else(|| at("non-string token".into()))?;
            let tags: Vec<Tag> = rec
                .get("ner_tags")
                .or_else(|| rec.get("tags"))
                .and_then(Value::as_array)
                .ok_or_else(|| at("missing `ner_tags`".into()))?
                .iter()
                .map(histnero_tag)
                .collect::<Option<_>>()
                .ok_or_else(|| at("tag outside the 11-tag alphabet".into()))?;
            let region: Region = rec
                .get("region")
                .and_then(Value::as_str)
                .ok_or_else(|| at("missing `region`".into()))?
                .parse()
                .map_err(|e: CorpusError| at(e.to_string()))?;
            let year = rec
                .get("year")
                .and_then(Value::as_u64)
                .and_then(|y| u16::try_from(y).ok());
            let doc_id = ["doc_id", "document_id", "doc"]
                .iter()
                .find_map(|k| rec.get(*k))
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .unwrap_or_else(|| format!("{subset}-{line}"));
            if tokens.is_empty() {
                continue;
            }
            let sentence = Sentence::from_tags(tokens_from_strings(&tokens), TagSequence(tags), region)
                .map_err(|e| at(e.to_string()))?;
            let idx = builder.push(line, &doc_id, year, sentence)?;
            let key = sentence_key(&doc_id, idx);
            match subset {
                "train" => split.train.push(key),
                "valid" => split.valid.push(key),
                _ => split.test.push(key),
            }
        }
    }
    Ok((builder.finish()?, split))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{EntityLabel, EntitySpan};

    fn sample() -> Corpus {
        let s1 = Sentence::from_spans(
            tokens_from_strings(&["Ion", "Popescu", "vine", "."]),
            vec![EntitySpan::new(EntityLabel::Person, 0, 1)],
            Region::Wallachia,
        )
        .unwrap();
        let s2 = Sentence::from_tags(
            tokens_from_strings(&["La", "1848"]),
            TagSequence::parse(&["O", "B-DATE"]).unwrap(),
            Region::Wallachia,
        )
        .unwrap();
        Corpus::new(vec![
            Document {
                id: "a".into(),
                region: Region::Wallachia,
                year: Some(1848),
                sentences: vec![s1, s2.clone()],
            },
            Document {
                id: "b".into(),
                region: Region::Wallachia,
                year: None,
                sentences: vec![s2],
            },
        ])
        .unwrap()
    }

    #[test]
    fn jsonl_round_trip() {
        let corpus = sample();
        let mut buf = Vec::new();
        save_jsonl(&corpus, &mut buf).unwrap();
        let back = load_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, corpus);
        let mut again = Vec::new();
        save_jsonl(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn jsonl_line_format() {
        let mut buf = Vec::new();
        save_jsonl(&sample(), &mut buf).unwrap();
        let first = String::from_utf8(buf).unwrap().lines().next().unwrap().to_string();
        assert_eq!(
            first,
            r#"{"doc_id":"a","region":"Wallachia","tokens":["Ion","Popescu","vine","."],"tags":["B-PERSON","I-PERSON","O","O"],"year":1848}"#
        );
    }

    #[test]
    fn truncated_line_is_reported() {
        let mut buf = Vec::new();
        save_jsonl(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        let cut = &lines[1][..lines[1].len() / 2];
        lines[1] = cut;
        let err = load_jsonl(lines.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn unknown_tag_and_length_mismatch_are_parse_errors() {
        let bad_tag = r#"{"doc_id":"a","region":"Moldavia","tokens":["x"],"tags":["B-MISC"]}"#;
        assert!(matches!(
            load_jsonl(bad_tag.as_bytes()),
            Err(CorpusError::Parse { line: 1, .. })
        ));
        let short = r#"{"doc_id":"a","region":"Moldavia","tokens":["x","y"],"tags":["O"]}"#;
        assert!(load_jsonl(short.as_bytes()).is_err());
    }

    #[test]
    fn conll_format() {
        let s = Sentence::from_tags(
            tokens_from_strings(&["Ion"]),
            TagSequence::parse(&["B-PERSON"]).unwrap(),
            Region::Moldavia,
        )
        .unwrap();
        let corpus = Corpus::new(vec![Document {
            id: "d".into(),
            region: Region::Moldavia,
            year: None,
            sentences: vec![s],
        }])
        .unwrap();
        let mut buf = Vec::new();
        export_conll(&corpus, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "Ion\tB-PERSON\n\n");
    }

    #[test]
    fn histnero_layout_is_ingested_with_its_split() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("train.json"),
            concat!(
                r#"{"id":"0","tokens":["Ion","merge"],"ner_tags":[1,0],"region":"Bessarabia","doc_id":"d1"}"#,
                "\n",
                r#"{"id":"1","tokens":["la","Iași"],"ner_tags":[0,5],"region":"Bessarabia","doc_id":"d1"}"#,
                "\n"
            ),
        )
        .unwrap();
        fs::write(
            dir.path().join("validation.json"),
            r#"{"id":"2","tokens":["1","mai"],"ner_tags":["B-DATE","I-DATE"],"region":"Moldavia","doc_id":"d2"}"#,
        )
        .unwrap();
        fs::write(
            dir.path().join("test.json"),
            r#"[{"id":"3","tokens":["Anul"],"ner_tags":[0],"region":"Bessarabia","doc_id":"d1"}]"#,
        )
        .unwrap();
        let (corpus, split) = load_histnero_dir(dir.path()).unwrap();
        assert_eq!(corpus.sentence_count(), 4);
        assert_eq!(split.train, vec!["d1#0", "d1#1"]);
        assert_eq!(split.valid, vec!["d2#0"]);
        assert_eq!(split.test, vec!["d1#2"]);
        let d1 = &corpus.documents()[0];
        assert_eq!(d1.sentences[1].spans, vec![EntitySpan::new(EntityLabel::Location, 1, 1)]);
    }
}
