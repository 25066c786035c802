//! Acceptance criteria 1–10. Every criterion prints one `[PASS]`/`[FAIL]`
//! line with its measured values; run with `--nocapture` to see them.
//!
//! Criterion 6 and the dataset half of criterion 7 need the public release on
//! disk (`HISTNERO_DIR`, or `data/histnero` at the workspace root) and are
//! skipped with a notice otherwise.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use histnero::analysis::{tfidf_scores, tfidf_top_k, TfIdfOptions};
use histnero::corpus::{
    apply_split_file, corpus_stats, decode_iob, encode_iob, load_histnero_dir, save_jsonl, split_dataset,
    tokens_from_strings, SplitSpec,
};
use histnero::metrics::{cohens_kappa, strict_f1};
use histnero::model::{ParamId, TaggerConfig, TaggerParams};
use histnero::synthetic::{coupled_regions_corpus, two_domain_corpus, TwoDomainSpec};
use histnero::training::{
    compute_losses, domain_accuracy, evaluate, fit_domain_probe, inter_regional, train, Example, Mode, ProbeConfig,
    TrainConfig, TrainData,
};
use histnero::{Corpus, Document, EntityLabel, EntitySpan, Region, Sentence, Tag, TagSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {criterion:>2} {name}: {detail}");
}

fn random_tag(rng: &mut ChaCha8Rng) -> Tag {
    // mostly O, as in real text
    if rng.gen_bool(0.5) {
        Tag::O
    } else {
        Tag::from_index(rng.gen_range(0..Tag::COUNT)).unwrap()
    }
}

fn random_example(rng: &mut ChaCha8Rng, vocab: usize, labeled: bool) -> Example {
    let n = rng.gen_range(1..=7);
    Example {
        ids: (0..n).map(|_| rng.gen_range(0..vocab)).collect(),
        tags: labeled.then(|| (0..n).map(|_| rng.gen_range(0..Tag::COUNT)).collect()),
        domain: rng.gen_range(0..Region::COUNT),
    }
}

fn random_batch(rng: &mut ChaCha8Rng, vocab: usize) -> Vec<Example> {
    let n = rng.gen_range(1..=4);
    let mut batch: Vec<Example> = (0..n)
        .map(|i| {
            let labeled = i == 0 || rng.gen_bool(0.7);
            random_example(rng, vocab, labeled)
        })
        .collect();
    batch.rotate_left(rng.gen_range(0..n));
    batch
}

fn random_params(rng: &mut ChaCha8Rng) -> TaggerParams {
    let config = TaggerConfig {
        vocab_size: rng.gen_range(16..64),
        embed_dim: rng.gen_range(2..6),
        hidden_dim: rng.gen_range(3..8),
        context_window: rng.gen_range(0..3),
        seed: rng.gen(),
        ..TaggerConfig::default()
    };
    let mut p = TaggerParams::init(&config).unwrap();
    // move off the initializer's scale so biases and large weights are exercised
    for t in p.tensors_mut() {
        for x in t.data_mut() {
            *x += rng.gen_range(-0.5..0.5);
        }
    }
    p
}

/// `max |a - b| / max |b|` over one tensor, 0 when both vanish.
fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[test]
fn criterion_01_mode_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst_fc, mut worst_d) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let params = random_params(&mut rng);
        let batch = random_batch(&mut rng, params.config().vocab_size);
        let lambda = rng.gen_range(0.0..2.0);
        let (_, g_grad) = compute_losses(&params, &batch, Mode::GradRev, lambda).unwrap();
        let (_, g_loss) = compute_losses(&params, &batch, Mode::LossRev, lambda).unwrap();
        for id in ParamId::ALL {
            let (a, b) = (g_loss[id.index()].data(), g_grad[id.index()].data());
            match id {
                ParamId::DomainWeight | ParamId::DomainBias => {
                    let expected: Vec<f64> = b.iter().map(|x| -lambda * x).collect();
                    worst_d = worst_d.max(rel_diff(a, &expected));
                }
                _ => worst_fc = worst_fc.max(rel_diff(a, b)),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst_fc <= 1e-12 && worst_d <= 1e-12 && secs < 10.0;
    report(
        1,
        "mode equivalence",
        pass,
        &format!("100 triples, max rel diff F/C {worst_fc:.2e}, D vs -λ·g {worst_d:.2e} (tol 1e-12), {secs:.2}s (limit 10s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_gradients_match_finite_differences() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for point in 0..20 {
        let params = random_params(&mut rng);
        let batch = random_batch(&mut rng, params.config().vocab_size);
        let mode = Mode::ALL[point % 3];
        let lambda = rng.gen_range(0.05..1.0);
        let (_, grads) = compute_losses(&params, &batch, mode, lambda).unwrap();
        for id in ParamId::ALL {
            // Gradient reversal only flips the sign on the path into F, so F
            // sees d(L_y - λ·L_d) while C and D see d(L_y + L_d).
            let objective = |p: &TaggerParams| {
                let (l, _) = compute_losses(p, &batch, Mode::Baseline, 0.0).unwrap();
                let (full, _) = compute_losses(p, &batch, Mode::LossRev, 1.0).unwrap();
                let ld = full.domain;
                match (mode, id.block()) {
                    (Mode::Baseline, _) => l.ner,
                    (Mode::LossRev, _) => l.ner - lambda * ld,
                    (Mode::GradRev, histnero::model::Block::Feature) => l.ner - lambda * ld,
                    (Mode::GradRev, _) => l.ner + ld,
                }
            };
            let n = params.get(id).data().len();
            for k in 0..n {
                let mut plus = params.clone();
                plus.get_mut(id).data_mut()[k] += h;
                let mut minus = params.clone();
                minus.get_mut(id).data_mut()[k] -= h;
                let numeric = (objective(&plus) - objective(&minus)) / (2.0 * h);
                let analytic = grads[id.index()].data()[k];
                let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
                worst = worst.max(rel);
                checked += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-4 && secs < 30.0;
    report(
        2,
        "autodiff vs central differences",
        pass,
        &format!("20 points, {checked} coordinates, max rel err {worst:.2e} (tol 1e-4, floor 1e-6), {secs:.2}s (limit 30s)"),
    );
    assert!(pass);
}

/// Entity chunks read straight off tag strings: a chunk starts at `B-X`, or
/// at `I-X` not preceded by `B-X`/`I-X`, and runs through following `I-X`.
fn oracle_chunks(tags: &[String]) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let t = &tags[i];
        if t == "O" {
            i += 1;
            continue;
        }
        let label = t[2..].to_string();
        let cont = format!("I-{label}");
        let mut j = i + 1;
        while j < tags.len() && tags[j] == cont {
            j += 1;
        }
        out.push((label, i, j - 1));
        i = j;
    }
    out
}

#[test]
fn criterion_03_strict_f1_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let sentences = rng.gen_range(1..=3);
        let mut gold_tags = Vec::new();
        let mut pred_tags = Vec::new();
        for _ in 0..sentences {
            let n = rng.gen_range(1..=12);
            let gold: Vec<Tag> = (0..n).map(|_| random_tag(&mut rng)).collect();
            // predictions are perturbed gold, so matches actually occur
            let pred: Vec<Tag> = gold.iter().map(|&t| if rng.gen_bool(0.25) { random_tag(&mut rng) } else { t }).collect();
            gold_tags.push(gold);
            pred_tags.push(pred);
        }
        let strs = |v: &Vec<Tag>| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        let to_set = |all: &Vec<Vec<Tag>>| -> BTreeSet<(usize, String, usize, usize)> {
            all.iter()
                .enumerate()
                .flat_map(|(s, t)| oracle_chunks(&strs(t)).into_iter().map(move |(l, a, b)| (s, l, a, b)))
                .collect()
        };
        let (g, p) = (to_set(&gold_tags), to_set(&pred_tags));
        let tp = g.intersection(&p).count();
        let (fp, fn_) = (p.len() - tp, g.len() - tp);

        let spans = |all: &Vec<Vec<Tag>>| all.iter().map(|t| decode_iob(&TagSequence(t.clone()))).collect::<Vec<_>>();
        let r = strict_f1(&spans(&gold_tags), &spans(&pred_tags)).unwrap();
        let o = &r.overall;
        let f1 = if tp == 0 { 0.0 } else { 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64 };
        if (o.tp, o.fp, o.fn_) != (tp, fp, fn_) || (o.f1 - f1).abs() > 1e-12 {
            mismatches += 1;
        }
        for label in EntityLabel::ALL {
            let only = |s: &BTreeSet<(usize, String, usize, usize)>| s.iter().filter(|c| c.1 == label.name()).cloned().collect::<BTreeSet<_>>();
            let (gl, pl) = (only(&g), only(&p));
            let tpl = gl.intersection(&pl).count();
            let got = &r.per_label[&label];
            if (got.tp, got.fp, got.fn_) != (tpl, pl.len() - tpl, gl.len() - tpl) {
                mismatches += 1;
            }
        }
    }
    report(3, "strict F1 oracle", mismatches == 0, &format!("1000 instances, {mismatches} mismatches"));
    assert_eq!(mismatches, 0);
}

fn random_spans(rng: &mut ChaCha8Rng, n: usize) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        if rng.gen_bool(0.4) {
            let len = rng.gen_range(1..=3).min(n - i);
            let label = EntityLabel::ALL[rng.gen_range(0..EntityLabel::ALL.len())];
            spans.push(EntitySpan::new(label, i, i + len - 1));
            i += len;
        } else {
            i += 1;
        }
    }
    spans
}

#[test]
fn criterion_04_iob_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut failures = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..=20);
        let spans = random_spans(&mut rng, n);
        let tags = encode_iob(&spans, n).unwrap();
        if decode_iob(&tags) != spans || !tags.is_valid_iob2() {
            failures += 1;
        }
    }
    let mut idem_failures = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..=20);
        let tags = TagSequence((0..n).map(|_| random_tag(&mut rng)).collect());
        let once = encode_iob(&decode_iob(&tags), n).unwrap();
        let twice = encode_iob(&decode_iob(&once), n).unwrap();
        if once != twice || (tags.is_valid_iob2() && once != tags) {
            idem_failures += 1;
        }
    }
    let pass = failures == 0 && idem_failures == 0;
    report(
        4,
        "IOB round trip",
        pass,
        &format!("decode∘encode: {failures}/1000 failures; encode∘decode idempotence: {idem_failures}/1000 failures"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_kappa() {
    let o = Tag::O;
    let p = Tag::B(EntityLabel::Person);
    // p_o = 3/4, marginals (1/2, 1/2) and (3/4, 1/4): p_e = 1/2, κ = 1/2
    let a = [TagSequence(vec![o, o, p, p])];
    let b = [TagSequence(vec![o, o, p, o])];
    let hand = cohens_kappa(&a, &b).unwrap();
    let identical = cohens_kappa(&a, &a).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut sum = 0.0;
    for _ in 0..100 {
        let draw = |rng: &mut ChaCha8Rng| TagSequence((0..10_000).map(|_| random_tag(rng)).collect());
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        sum += cohens_kappa(&[x], &[y]).unwrap();
    }
    let mean = sum / 100.0;
    let pass = hand == 0.5 && identical == 1.0 && mean.abs() <= 0.05;
    report(
        5,
        "Cohen's kappa",
        pass,
        &format!("hand example {hand} (want exactly 0.5), identical {identical}, independent mean {mean:+.4} over 100×10⁴ (tol ±0.05)"),
    );
    assert!(pass);
}

fn dataset_dir() -> Option<PathBuf> {
    let dir = std::env::var_os("HISTNERO_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/histnero"));
    dir.is_dir().then_some(dir)
}

#[test]
fn criterion_06_dataset_statistics() {
    let Some(dir) = dataset_dir() else {
        println!("[SKIP] criterion  6 dataset statistics: release not found (set HISTNERO_DIR or place it in data/histnero)");
        return;
    };
    let (corpus, split_file) = load_histnero_dir(&dir).unwrap();
    let stats = corpus_stats(&corpus);
    let split = apply_split_file(&corpus, &split_file).unwrap();
    let sizes = (split.train.sentence_count(), split.valid.sentence_count(), split.test.sentence_count());
    let tpe = format!("{:.2}", stats.total.tokens_per_entity);
    let pass = stats.sentences == 10_026
        && stats.tokens == 323_865
        && stats.total.entities == 9_601
        && stats.total.tokens == 17_015
        && tpe == "1.77"
        && sizes == (8_020, 1_003, 1_003);
    report(
        6,
        "dataset statistics",
        pass,
        &format!(
            "{} sentences, {} tokens, {} entities, {} entity tokens, {tpe} tokens/entity, split {}/{}/{}",
            stats.sentences, stats.tokens, stats.total.entities, stats.total.tokens, sizes.0, sizes.1, sizes.2
        ),
    );
    assert!(pass);
}

fn one_sentence_doc(id: &str, region: Region, words: &[&str]) -> Document {
    Document {
        id: id.into(),
        region,
        year: None,
        sentences: vec![Sentence::from_tags(tokens_from_strings(words), TagSequence::outside(words.len()), region).unwrap()],
    }
}

#[test]
fn criterion_07_tfidf() {
    // "abc" occurs 3 times in one of two regions: ln(1 + 3) · ln(2 / 1)
    let fixture = Corpus::new(vec![
        one_sentence_doc("a", Region::Bessarabia, &["abc", "abc", "abc", "shared"]),
        one_sentence_doc("b", Region::Wallachia, &["shared", "x"]),
    ])
    .unwrap();
    let scores = tfidf_scores(&fixture, &TfIdfOptions::default());
    let got = scores[&Region::Bessarabia]["abc"];
    let want = 4f64.ln() * 2f64.ln();
    let fixture_ok = (got - want).abs() <= 1e-9 && scores[&Region::Bessarabia]["shared"] == 0.0;
    let mut detail = format!("fixture score {got:.12} vs ln4·ln2 {want:.12} (tol 1e-9)");

    let mut dataset_ok = true;
    match dataset_dir() {
        Some(dir) => {
            let (corpus, _) = load_histnero_dir(&dir).unwrap();
            let top = tfidf_top_k(&corpus, 1, &TfIdfOptions::default()).unwrap();
            let first = top.iter().find(|r| r.region == Region::Bessarabia).map(|r| r.entries[0].term.clone());
            dataset_ok = first.as_deref() == Some("basarabia");
            detail.push_str(&format!("; Bessarabia top term {first:?}"));
        }
        None => detail.push_str("; dataset ranking skipped (release not found)"),
    }
    let pass = fixture_ok && dataset_ok;
    report(7, "TF-IDF", pass, &detail);
    assert!(pass);
}

fn merge(a: &Corpus, b: &Corpus) -> Corpus {
    Corpus::new(a.documents().iter().chain(b.documents()).cloned().collect()).unwrap()
}

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn criterion_08_directional_adaptation_effect() {
    let start = Instant::now();
    // the generator must still produce the shipped corpus
    let mut seed0 = Vec::new();
    save_jsonl(&two_domain_corpus(&TwoDomainSpec::default()), &mut seed0).unwrap();
    assert_eq!(seed0, fs::read(fixture_path("two_domain_seed0.jsonl")).unwrap(), "synthetic generator drifted from the fixture");

    let seeds = 5u64;
    let spec = TwoDomainSpec::default();
    let (mut base_f1, mut loss_f1, mut loss_d, mut probe_d) = (0.0, 0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let corpus = two_domain_corpus(&TwoDomainSpec { seed, ..spec });
        let split_spec = SplitSpec { seed, ..SplitSpec::default() };
        let src = split_dataset(&corpus.region(spec.source), &split_spec).unwrap();
        let tgt = split_dataset(&corpus.region(spec.target), &split_spec).unwrap();
        let valid_both = merge(&src.valid, &tgt.valid);
        let tagger = TaggerConfig {
            vocab_size: 1 << 12,
            embed_dim: 32,
            hidden_dim: 64,
            seed,
            ..TaggerConfig::default()
        };
        let data = TrainData {
            train: &src.train,
            valid: &src.valid,
            unlabeled: Some(&tgt.train),
        };
        let run = |mode| train(data, &tagger, &TrainConfig { mode, lambda: 0.1, seed, ..TrainConfig::default() }).unwrap();

        let base = run(Mode::Baseline);
        let b = evaluate(&base.best, &tgt.test).unwrap().overall.f1;
        let probe = fit_domain_probe(&base.best, &merge(&src.train, &tgt.train), &ProbeConfig { seed, ..ProbeConfig::default() }).unwrap();
        let pd = domain_accuracy(&probe, &valid_both).unwrap();

        let lr = run(Mode::LossRev);
        let l = evaluate(&lr.best, &tgt.test).unwrap().overall.f1;
        let ld = domain_accuracy(&lr.best, &valid_both).unwrap();
        println!("  seed {seed}: cross-domain F1 baseline {b:.4} loss_rev {l:.4}; D acc loss_rev {ld:.4}, baseline-feature probe {pd:.4}");
        base_f1 += b;
        loss_f1 += l;
        loss_d += ld;
        probe_d += pd;
    }
    let n = seeds as f64;
    let (base_f1, loss_f1, loss_d, probe_d) = (base_f1 / n, loss_f1 / n, loss_d / n, probe_d / n);
    let gain = loss_f1 - base_f1;
    let secs = start.elapsed().as_secs_f64();
    let pass = gain >= 0.03 && loss_d < 0.45 && probe_d > 0.9 && secs < 300.0;
    report(
        8,
        "directional adaptation effect",
        pass,
        &format!(
            "mean cross-domain F1 baseline {base_f1:.4}, loss_rev {loss_f1:.4}, gain {:+.2} pts (need ≥ +3); \
             D acc under loss_rev {loss_d:.4} (need < 0.45); baseline-feature D probe {probe_d:.4} (need > 0.9); {secs:.0}s (limit 300s)",
            gain * 100.0
        ),
    );
    assert!(pass);
}

fn histnero_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_histnero"))
        .args(args)
        .env("HISTNERO_LOG", "error")
        .output()
        .unwrap()
}

#[test]
fn criterion_09_determinism() {
    // library: two trainings with one seed serialize identically
    let corpus = coupled_regions_corpus(40, 30, 9);
    let split = split_dataset(&corpus, &SplitSpec { seed: 9, ..SplitSpec::default() }).unwrap();
    let tagger = TaggerConfig {
        vocab_size: 1024,
        embed_dim: 8,
        hidden_dim: 16,
        seed: 9,
        ..TaggerConfig::default()
    };
    let serialize = |mode| {
        let cfg = TrainConfig { mode, epochs: 3, seed: 9, ..TrainConfig::default() };
        let out = train(TrainData { train: &split.train, valid: &split.valid, unlabeled: None }, &tagger, &cfg).unwrap();
        let mut ckpt = Vec::new();
        out.best.save_json(&mut ckpt).unwrap();
        let eval = serde_json::to_vec(&evaluate(&out.best, &split.test).unwrap()).unwrap();
        (serde_json::to_vec(&out.history).unwrap(), eval, ckpt)
    };
    let mut lib_ok = true;
    for mode in Mode::ALL {
        lib_ok &= serialize(mode) == serialize(mode);
    }

    // CLI: train and eval twice into the same directories
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.jsonl");
    save_jsonl(&corpus, fs::File::create(&input).unwrap()).unwrap();
    let run_dir = dir.path().join("runs/a");
    let eval_dir = dir.path().join("eval");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let train_args = [
        "train", "--mode", "loss_rev", "--lambda", "0.1", "--seed", "7", "--input", &s(&input), "--out", &s(&run_dir),
        "--epochs", "3", "--vocab-size", "1024", "--embed-dim", "8", "--hidden-dim", "16",
    ];
    let model = s(&run_dir.join("model.json"));
    let split_file = s(&run_dir.join("split.json"));
    let eval_args = ["eval", "--input", &s(&input), "--model", &model, "--split-file", &split_file, "--out", &s(&eval_dir)];
    let outputs = ["history.json", "eval.json", "split.json", "model.json", "model_last.json"];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        assert!(histnero_bin(&train_args).status.success());
        assert!(histnero_bin(&eval_args).status.success());
        let mut files: Vec<Vec<u8>> = outputs.iter().map(|f| fs::read(run_dir.join(f)).unwrap()).collect();
        files.push(fs::read(eval_dir.join("eval.json")).unwrap());
        snapshots.push(files);
    }
    let cli_ok = snapshots[0] == snapshots[1];
    let pass = lib_ok && cli_ok;
    report(
        9,
        "determinism",
        pass,
        &format!("library history/eval/checkpoint JSON identical for all modes: {lib_ok}; CLI train+eval JSON byte-identical: {cli_ok}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_inter_regional_structure() {
    let start = Instant::now();
    let (b, m) = (Region::Bessarabia, Region::Moldavia);
    let mut passes = 0;
    for seed in 0..5u64 {
        let corpus = coupled_regions_corpus(300, 60, seed);
        let split = split_dataset(&corpus, &SplitSpec { seed, ..SplitSpec::default() }).unwrap();
        let tagger = TaggerConfig {
            vocab_size: 1 << 12,
            embed_dim: 32,
            hidden_dim: 64,
            seed,
            ..TaggerConfig::default()
        };
        let matrix = inter_regional(&split, &tagger, &TrainConfig { seed, ..TrainConfig::default() }, 0).unwrap();
        let coupled = matrix.get(b, m).min(matrix.get(m, b));
        let mut cross = f64::NEG_INFINITY;
        for i in Region::ALL {
            for j in Region::ALL {
                let is_pair = (i == b && j == m) || (i == m && j == b);
                if i != j && !is_pair {
                    cross = cross.max(matrix.get(i, j));
                }
            }
        }
        let ok = coupled > cross;
        passes += ok as usize;
        println!("  seed {seed}: coupled pair min {coupled:.4} vs best cross pair {cross:.4} -> {}", if ok { "ok" } else { "miss" });
    }
    let pass = passes >= 4;
    report(
        10,
        "inter-regional structure",
        pass,
        &format!("{passes}/5 seeds with the coupled pair above every cross pair (need ≥ 4), {:.0}s", start.elapsed().as_secs_f64()),
    );
    assert!(pass);
}
