use std::io::Write;

use super::TrainError;
use crate::autodiff::Array;
use crate::corpus::{Corpus, Region};
use crate::model::{featurize, TaggerParams};

/// Mean feature vector `h` of every sentence, with its region.
pub fn sentence_embeddings(params: &TaggerParams, corpus: &Corpus) -> Result<Vec<(Region, Vec<f64>)>, TrainError> {
    let vocab = params.config().vocab_size;
    corpus
        .sentences()
        .map(|s| {
            let ids = featurize(&s.words().collect::<Vec<_>>(), vocab);
            let out = params.forward(&[ids])?;
            Ok((s.region, column_means(&out[0].features)))
        })
        .collect()
}

fn column_means(a: &Array) -> Vec<f64> {
    let mut mean = vec![0.0; a.cols()];
    for r in 0..a.rows() {
        for (m, x) in mean.iter_mut().zip(a.row(r)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= a.rows() as f64);
    mean
}

/// One row per sentence: region name, then `hidden_dim` values with six
/// decimals, tab-separated. No header.
pub fn write_embeddings_tsv<W: Write>(params: &TaggerParams, corpus: &Corpus, mut out: W) -> Result<(), TrainError> {
    for (region, v) in sentence_embeddings(params, corpus)? {
        write!(out, "{}", region.name())?;
        for x in v {
            write!(out, "\t{x:.6}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokens_from_strings, Document, Sentence, TagSequence};
    use crate::model::TaggerConfig;

    #[test]
    fn one_row_per_sentence_with_hidden_dim_values() {
        let words = ["Ion", "la", "Iași"];
        let sentence = Sentence::from_tags(tokens_from_strings(&words), TagSequence::outside(3), Region::Moldavia).unwrap();
        let corpus = Corpus::new(vec![Document {
            id: "d".into(),
            region: Region::Moldavia,
            year: None,
            sentences: vec![sentence.clone(), sentence],
        }])
        .unwrap();
        let params = TaggerParams::init(&TaggerConfig {
            vocab_size: 64,
            embed_dim: 3,
            hidden_dim: 5,
            ..TaggerConfig::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_embeddings_tsv(&params, &corpus, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].split('\t').count(), 6);
        assert!(rows[0].starts_with("Moldavia\t"));
        assert_eq!(rows[0], rows[1]);
    }
}
