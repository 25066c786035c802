use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use histnero::analysis::{tfidf_top_k, write_tsv, TfIdfOptions, TfWeighting};
use histnero::corpus::{
    apply_split_file, brat_document, corpus_stats, export_conll, load_histnero_dir, load_jsonl_file, save_jsonl,
    split_dataset, validate, CorpusSplit, Region, SplitFile,
};
use histnero::metrics::iaa_report;
use histnero::model::TaggerParams;
use histnero::training::{evaluate, inter_regional, train, write_embeddings_tsv, TrainData};
use histnero::Corpus;
use serde_json::json;

use crate::args::*;
use crate::config::RunConfig;
use crate::manifest::{write_json, RunManifest};
use crate::UsageError;

/// Reads a JSONL corpus, or the release directory together with its
/// published split.
fn load_corpus(path: &Path) -> Result<(Corpus, Option<SplitFile>)> {
    if path.is_dir() {
        let (corpus, split) =
            load_histnero_dir(path).with_context(|| format!("loading release directory {}", path.display()))?;
        Ok((corpus, Some(split)))
    } else {
        let corpus = load_jsonl_file(path).with_context(|| format!("loading {}", path.display()))?;
        Ok((corpus, None))
    }
}

fn read_split_file(path: &Path) -> Result<SplitFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing split file {}", path.display()))
}

/// An explicit split file wins over the release's published split, which wins
/// over a fresh stratified split.
fn resolve_split(corpus: &Corpus, published: Option<SplitFile>, split_file: Option<&Path>, cfg: &RunConfig) -> Result<CorpusSplit> {
    let file = match split_file {
        Some(p) => Some(read_split_file(p)?),
        None => published,
    };
    Ok(match file {
        Some(f) => apply_split_file(corpus, &f)?,
        None => split_dataset(corpus, &cfg.split)?,
    })
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn inputs<'a>(required: &[&'a Path], optional: &[&'a Option<PathBuf>]) -> Vec<&'a Path> {
    let extra = optional.iter().filter_map(|p| p.as_deref());
    required.iter().copied().chain(extra).collect()
}

pub fn stats(a: &StatsArgs) -> Result<()> {
    let (corpus, _) = load_corpus(&a.input.input)?;
    let stats = corpus_stats(&corpus);
    println!("{stats}");
    if let Some(out) = &a.out {
        create_out(out)?;
        write_json(&out.join("stats.json"), &stats)?;
        RunManifest::new("stats", json!({}), &[&a.input.input], None)?.write(out)?;
    }
    Ok(())
}

pub fn validate_cmd(a: &ValidateArgs) -> Result<()> {
    let (corpus, _) = load_corpus(&a.input.input)?;
    let mut report = Vec::new();
    for doc in corpus.documents() {
        let v = validate(doc);
        for violation in &v {
            println!("{}\t{violation}", doc.id);
        }
        if !v.is_empty() {
            report.push(json!({ "doc_id": doc.id, "violations": v }));
        }
    }
    if let Some(out) = &a.out {
        create_out(out)?;
        write_json(&out.join("violations.json"), &report)?;
        RunManifest::new("validate", json!({}), &[&a.input.input], None)?.write(out)?;
    }
    if !report.is_empty() {
        bail!("{} of {} documents have violations", report.len(), corpus.documents().len());
    }
    println!("{} documents, no violations", corpus.documents().len());
    Ok(())
}

/// `.txt` files with a matching `.ann`, in file-name order.
fn brat_pairs(input: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let txts: Vec<PathBuf> = if input.is_dir() {
        let mut v: Vec<PathBuf> = fs::read_dir(input)
            .with_context(|| format!("listing {}", input.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        v.retain(|p| p.extension().is_some_and(|e| e == "txt"));
        v.sort();
        v
    } else {
        vec![input.to_path_buf()]
    };
    if txts.is_empty() {
        bail!("no .txt files in {}", input.display());
    }
    txts.into_iter()
        .map(|t| {
            let ann = t.with_extension("ann");
            if !ann.is_file() {
                bail!("{} has no annotation file {}", t.display(), ann.display());
            }
            Ok((t, ann))
        })
        .collect()
}

pub fn convert(a: &ConvertArgs) -> Result<()> {
    let corpus = match a.from {
        InputFormat::Brat => {
            let Some(region) = &a.region else {
                return Err(UsageError("--from brat needs --region".into()).into());
            };
            let region: Region = region.parse().map_err(|e| UsageError(format!("--region: {e}")))?;
            let mut docs = Vec::new();
            for (txt, ann) in brat_pairs(&a.input)? {
                let id = txt.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                let text = fs::read_to_string(&txt).with_context(|| format!("reading {}", txt.display()))?;
                let ann_text = fs::read_to_string(&ann).with_context(|| format!("reading {}", ann.display()))?;
                docs.push(brat_document(&id, region, a.year, &text, &ann_text).with_context(|| format!("converting {}", txt.display()))?);
            }
            Corpus::new(docs)?
        }
        InputFormat::Jsonl => load_jsonl_file(&a.input).with_context(|| format!("loading {}", a.input.display()))?,
        InputFormat::Histnero => load_histnero_dir(&a.input).with_context(|| format!("loading {}", a.input.display()))?.0,
    };
    create_out(&a.out)?;
    let name = match a.to {
        OutputFormat::Jsonl => "corpus.jsonl",
        OutputFormat::Conll => "corpus.conll",
    };
    let mut w = create_file(&a.out.join(name))?;
    match a.to {
        OutputFormat::Jsonl => save_jsonl(&corpus, &mut w)?,
        OutputFormat::Conll => export_conll(&corpus, &mut w)?,
    }
    w.flush()?;
    let config = json!({
        "from": format!("{:?}", a.from).to_lowercase(),
        "to": format!("{:?}", a.to).to_lowercase(),
        "region": a.region,
        "year": a.year,
    });
    RunManifest::new("convert", config, &[&a.input], None)?.write(&a.out)?;
    eprintln!("wrote {} sentences to {}", corpus.sentence_count(), a.out.join(name).display());
    Ok(())
}

pub fn split(a: &SplitArgs, mut cfg: RunConfig) -> Result<()> {
    if let Some(seed) = a.seed {
        cfg.set_seed(seed);
    }
    let (corpus, _) = load_corpus(&a.input.input)?;
    let s = split_dataset(&corpus, &cfg.split)?;
    create_out(&a.out)?;
    for (name, c) in [("train", &s.train), ("valid", &s.valid), ("test", &s.test)] {
        let mut w = create_file(&a.out.join(format!("{name}.jsonl")))?;
        save_jsonl(c, &mut w)?;
        w.flush()?;
        println!("{name}\t{}", c.sentence_count());
    }
    write_json(&a.out.join("split.json"), &s.to_split_file())?;
    RunManifest::new("split", json!({ "split": cfg.split }), &[&a.input.input], Some(cfg.split.seed))?.write(&a.out)?;
    Ok(())
}

pub fn iaa(a: &IaaArgs) -> Result<()> {
    let (first, _) = load_corpus(&a.input.input)?;
    let (second, _) = load_corpus(&a.against)?;
    let report = iaa_report(&first, &second)?;
    print!("{report}");
    if let Some(out) = &a.out {
        create_out(out)?;
        write_json(&out.join("iaa.json"), &report)?;
        RunManifest::new("iaa", json!({}), &[&a.input.input, &a.against], None)?.write(out)?;
    }
    Ok(())
}

pub fn tfidf(a: &TfidfArgs) -> Result<()> {
    let (corpus, _) = load_corpus(&a.input.input)?;
    let mut options = TfIdfOptions {
        tf: if a.raw_tf { TfWeighting::Raw } else { TfWeighting::Log },
        ..TfIdfOptions::default()
    };
    if let Some(p) = &a.stopwords {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        options.stopwords = text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect();
    }
    if a.k == 0 {
        return Err(UsageError("--k must be at least 1".into()).into());
    }
    let rankings = tfidf_top_k(&corpus, a.k, &options)?;
    write_tsv(&rankings, io::stdout().lock())?;
    if let Some(out) = &a.out {
        create_out(out)?;
        let mut w = create_file(&out.join("tfidf.tsv"))?;
        write_tsv(&rankings, &mut w)?;
        w.flush()?;
        let config = json!({ "k": a.k, "options": options });
        RunManifest::new("tfidf", config, &inputs(&[&a.input.input], &[&a.stopwords]), None)?.write(out)?;
    }
    Ok(())
}

pub fn train_cmd(a: &TrainArgs, mut cfg: RunConfig) -> Result<()> {
    cfg.apply(&a.flags);
    let (corpus, published) = load_corpus(&a.input.input)?;
    let split = resolve_split(&corpus, published, a.split_file.as_deref(), &cfg)?;
    let unlabeled = match &a.unlabeled {
        Some(p) => Some(load_corpus(p)?.0),
        None => None,
    };
    let outcome = train(
        TrainData {
            train: &split.train,
            valid: &split.valid,
            unlabeled: unlabeled.as_ref(),
        },
        &cfg.model,
        &cfg.train,
    )?;

    println!("epoch\tL_y\tL_d\ttotal\tvalid F1");
    for r in &outcome.history {
        println!(
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}{}",
            r.epoch,
            r.ner_loss,
            r.domain_loss,
            r.total_loss,
            r.valid_f1,
            if r.epoch == outcome.best_epoch { "\t*" } else { "" }
        );
    }
    let valid = evaluate(&outcome.best, &split.valid)?;
    let test = if split.test.sentence_count() > 0 {
        Some(evaluate(&outcome.best, &split.test)?)
    } else {
        None
    };
    match &test {
        Some(t) => println!("\ntest ({} sentences)\n{t}", t.sentences),
        None => println!("\nvalid ({} sentences)\n{valid}", valid.sentences),
    }

    create_out(&a.out)?;
    write_json(
        &a.out.join("history.json"),
        &json!({ "best_epoch": outcome.best_epoch, "epochs": outcome.history }),
    )?;
    write_json(&a.out.join("eval.json"), &json!({ "valid": valid, "test": test }))?;
    write_json(&a.out.join("split.json"), &split.to_split_file())?;
    outcome.best.save(&a.out.join("model.json"))?;
    outcome.last.save(&a.out.join("model_last.json"))?;
    let config = json!({
        "run": cfg,
        "split_file": a.split_file,
        "unlabeled": a.unlabeled,
    });
    let ins = inputs(&[&a.input.input], &[&a.split_file, &a.unlabeled]);
    RunManifest::new("train", config, &ins, Some(cfg.train.seed))?.write(&a.out)?;
    Ok(())
}

pub fn eval_cmd(a: &EvalArgs) -> Result<()> {
    let params = TaggerParams::load(&a.model).with_context(|| format!("loading {}", a.model.display()))?;
    let (corpus, published) = load_corpus(&a.input.input)?;
    let file = match &a.split_file {
        Some(p) => Some(read_split_file(p)?),
        None => published,
    };
    let subset = a.subset.unwrap_or(if file.is_some() { Subset::Test } else { Subset::All });
    let data = match (subset, file) {
        (Subset::All, _) => corpus,
        (_, None) => return Err(UsageError("--subset needs --split-file or a release directory".into()).into()),
        (s, Some(f)) => {
            let split = apply_split_file(&corpus, &f)?;
            match s {
                Subset::Train => split.train,
                Subset::Valid => split.valid,
                _ => split.test,
            }
        }
    };
    let report = evaluate(&params, &data)?;
    println!("{report}");
    create_out(&a.out)?;
    write_json(&a.out.join("eval.json"), &report)?;
    let config = json!({
        "subset": format!("{subset:?}").to_lowercase(),
        "model": params.config(),
    });
    let ins = inputs(&[&a.input.input, &a.model], &[&a.split_file]);
    RunManifest::new("eval", config, &ins, Some(params.config().seed))?.write(&a.out)?;
    Ok(())
}

pub fn crossregion(a: &CrossregionArgs, mut cfg: RunConfig) -> Result<()> {
    cfg.apply(&a.flags);
    let (corpus, published) = load_corpus(&a.input.input)?;
    let split = resolve_split(&corpus, published, a.split_file.as_deref(), &cfg)?;
    let matrix = inter_regional(&split, &cfg.model, &cfg.train, a.jobs)?;
    println!("{matrix}");
    create_out(&a.out)?;
    write_json(&a.out.join("crossregion.json"), &matrix)?;
    write_json(&a.out.join("split.json"), &split.to_split_file())?;
    let config = json!({ "run": cfg, "split_file": a.split_file, "jobs": a.jobs });
    let ins = inputs(&[&a.input.input], &[&a.split_file]);
    RunManifest::new("crossregion", config, &ins, Some(cfg.train.seed))?.write(&a.out)?;
    Ok(())
}

pub fn export_embeddings(a: &ExportArgs) -> Result<()> {
    let params = TaggerParams::load(&a.model).with_context(|| format!("loading {}", a.model.display()))?;
    let (corpus, _) = load_corpus(&a.input.input)?;
    create_out(&a.out)?;
    let path = a.out.join("embeddings.tsv");
    let mut w = create_file(&path)?;
    write_embeddings_tsv(&params, &corpus, &mut w)?;
    w.flush()?;
    let ins = [a.input.input.as_path(), a.model.as_path()];
    RunManifest::new("export-embeddings", json!({ "model": params.config() }), &ins, None)?.write(&a.out)?;
    eprintln!("wrote {} rows to {}", corpus.sentence_count(), path.display());
    Ok(())
}
