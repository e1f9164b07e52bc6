use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;
use tempfile::TempDir;

fn ngfilter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ngfilter")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = ngfilter(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    read(p).lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

/// A 40-scene labelled corpus with rain and cicada detectors trained on it.
struct Trained {
    _dir: TempDir,
    corpus: PathBuf,
    rain_model: PathBuf,
    cicada_model: PathBuf,
}

fn trained() -> &'static Trained {
    static T: OnceLock<Trained> = OnceLock::new();
    T.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let p = |n: &str| dir.path().join(n);
        ok(&["synth", "--n", "40", "--seed", "21", "--out", s(&p("corpus"))]);
        let manifest = p("corpus/manifest.csv");
        for task in ["rain", "cicada"] {
            ok(&["featurize", s(&p("corpus")), "--labels", s(&manifest), "--task", task, "--out", s(&p(task))]);
            let csv = p(task).join("features.csv");
            ok(&["train", s(&csv), "--trees", "30", "--seed", "1", "--out", s(&p(&format!("{task}_model")))]);
        }
        Trained {
            corpus: p("corpus"),
            rain_model: p("rain_model/model.ngm"),
            cicada_model: p("cicada_model/model.ngm"),
            _dir: dir,
        }
    })
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["synth", "--n", "10", "--seed", "1", "--out", s(&a)]);
    ok(&["--jobs", "3", "synth", "--n", "10", "--seed", "1", "--out", s(&b)]);
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 11);
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn synth_rejects_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = ngfilter(&["synth", "--n", "0", "--out", s(&dir.path().join("c"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_rain_share() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    ok(&["synth", "--n", "100", "--seed", "4", "--rain", "0.3", "--out", s(&out)]);
    let rows = csv_rows(&out.join("manifest.csv"));
    assert_eq!(rows.len(), 100);
    assert_eq!(rows.iter().filter(|r| r[4] == "1").count(), 30);
}

#[test]
fn synth_writes_only_into_out() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "--n", "2", "--out", s(&dir.path().join("c"))]);
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries, vec![std::ffi::OsString::from("c")]);
}

#[test]
fn featurize_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["synth", "--n", "3", "--seed", "8", "--out", s(&corpus)]);
    ok(&["featurize", s(&corpus), "--out", s(&dir.path().join("f"))]);
    let text = read(&dir.path().join("f/features.csv"));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("segment,"));
    assert!(lines.iter().all(|l| l.split(',').count() == 164));
    assert!(lines[1].starts_with("scene_0000_0,"));

    ok(&["featurize", s(&corpus), "--highpass", "--format", "arff", "--out", s(&dir.path().join("h"))]);
    let arff = read(&dir.path().join("h/features.arff"));
    assert_eq!(arff.lines().filter(|l| l.to_ascii_lowercase().starts_with("@attribute")).count(), 143);
}

#[test]
fn featurize_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    ok(&["featurize", s(&empty), "--out", s(&dir.path().join("f"))]);
    let text = read(&dir.path().join("f/features.csv"));
    assert_eq!(text.lines().count(), 1);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 164);
}

#[test]
fn featurize_cfs_subset_needs_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = ngfilter(&["featurize", s(dir.path()), "--set", "CFSSubset", "--out", s(&dir.path().join("f"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("train"), "{}", stderr(&out));
}

#[test]
fn unreadable_file_is_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["synth", "--n", "2", "--out", s(&corpus)]);
    std::fs::write(corpus.join("broken.wav"), b"not a wav").unwrap();
    let out = ngfilter(&["featurize", s(&corpus), "--out", s(&dir.path().join("f"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.wav"));
    assert_eq!(read(&dir.path().join("f/features.csv")).lines().count(), 3);
}

#[test]
fn segment_cuts_long_recordings() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["synth", "--n", "1", "--out", s(&corpus)]);
    ok(&["segment", s(&corpus.join("scene_0000.wav")), "--out", s(&dir.path().join("s"))]);
    assert!(dir.path().join("s/scene_0000_0.wav").is_file());
    assert_eq!(read(&dir.path().join("s/segments.csv")).lines().count(), 2);
}

fn leak_csv(dir: &Path, n: usize) -> PathBuf {
    let mut text = String::from("segment,leak,noise,label\n");
    for i in 0..n {
        let label = i % 3 == 0;
        text.push_str(&format!("r{i},{},{},{}\n", label as u8, (i * 7919 % 101) as f64 / 101.0, label as u8));
    }
    let path = dir.join("leak.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn cv_leaked_label_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let csv = leak_csv(dir.path(), 40);
    for classifier in ["naive-bayes", "knn", "tree", "random-forest"] {
        let out = dir.path().join(classifier);
        ok(&["cv", s(&csv), "--classifier", classifier, "--trees", "10", "--out", s(&out)]);
        let report = csv_rows(&out.join("cv_report.csv"));
        let auc: f64 = report[0][report[0].len() - 2].parse().unwrap();
        assert_eq!(auc, 1.0, "{classifier}");
    }
}

#[test]
fn cv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let csv = leak_csv(dir.path(), 30);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["cv", s(&csv), "--seed", "42", "--trees", "20", "--out", s(&a)]);
    ok(&["--jobs", "2", "cv", s(&csv), "--seed", "42", "--trees", "20", "--out", s(&b)]);
    for f in ["cv_report.csv", "cv_predictions.csv", "roc.csv"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
}

#[test]
fn cv_sweep_k() {
    let dir = tempfile::tempdir().unwrap();
    let csv = leak_csv(dir.path(), 60);
    let out = dir.path().join("sweep");
    ok(&["cv", s(&csv), "--classifier", "knn", "--sweep-k", "--out", s(&out)]);
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 13);
    assert_eq!(rows.iter().filter(|r| r[3] == "true").count(), 1);
    let ks: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ks, ["1", "3", "5", "7", "9", "11", "13", "15", "17", "19", "21", "23", "25"]);

    let bad = ngfilter(&["cv", s(&csv), "--sweep-k", "--out", s(&out)]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn single_class_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one.csv");
    std::fs::write(&csv, "segment,x,label\na,1,1\nb,2,1\nc,3,1\n").unwrap();
    for cmd in ["train", "cv"] {
        let out = ngfilter(&[cmd, s(&csv), "--out", s(&dir.path().join(cmd))]);
        assert_eq!(out.status.code(), Some(1), "{cmd}");
        assert!(stderr(&out).contains("single class"));
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = leak_csv(dir.path(), 20);
    let out = dir.path().join("o");
    for args in [
        vec!["cv", s(&csv), "--classifier", "svm", "--out", s(&out)],
        vec!["train", s(&csv), "--set", "Nope", "--out", s(&out)],
        vec!["filter", s(dir.path()), "--out", s(&out)],
        vec!["filter", s(dir.path()), "--band", "900:300", "--out", s(&out)],
        vec!["bogus"],
    ] {
        assert_eq!(ngfilter(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(ngfilter(&["--help"]).status.code(), Some(0));
}

#[test]
fn train_cfs_subset_round_trip() {
    let t = trained();
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let manifest = t.corpus.join("manifest.csv");
    ok(&["featurize", s(&t.corpus), "--labels", s(&manifest), "--out", s(&p("all"))]);
    ok(&["train", s(&p("all/features.csv")), "--set", "CFSSubset", "--classifier", "nb", "--out", s(&p("m"))]);
    let selection = read(&p("m/selection.txt"));
    let k = selection.lines().count();
    assert!((1..163).contains(&k));
    ok(&["featurize", s(&t.corpus), "--set", "CFSSubset", "--selection", s(&p("m/selection.txt")), "--out", s(&p("sub"))]);
    let header = read(&p("sub/features.csv")).lines().next().unwrap().to_string();
    assert_eq!(header.split(',').skip(1).collect::<Vec<_>>(), selection.lines().collect::<Vec<_>>());
    ok(&["gate", s(&t.corpus), "--model", s(&p("m/model.ngm")), "--out", s(&p("g"))]);
}

#[test]
fn gate_threshold_above_one_keeps_everything() {
    let t = trained();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    ok(&["gate", s(&t.corpus), "--model", s(&t.rain_model), "--threshold", "1.01", "--out", s(&out)]);
    for i in 0..40 {
        let original = std::fs::read(t.corpus.join(format!("scene_{i:04}.wav"))).unwrap();
        let kept = std::fs::read(out.join(format!("scene_{i:04}_0.wav"))).unwrap();
        assert_eq!(original, kept);
    }
    assert!(csv_rows(&out.join("gate_report.csv")).iter().all(|r| r[2] == "kept"));
}

#[test]
fn gate_drops_rain() {
    let t = trained();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    ok(&["gate", s(&t.corpus), "--model", s(&t.rain_model), "--out", s(&out)]);
    let manifest = csv_rows(&t.corpus.join("manifest.csv"));
    let report = csv_rows(&out.join("gate_report.csv"));
    assert_eq!(report.len(), 40);
    let agree = manifest.iter().zip(&report).filter(|(m, r)| (m[4] == "1") == (r[2] == "dropped")).count();
    assert!(agree >= 36, "{agree}/40");
    let wavs = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some()).count();
    assert_eq!(wavs, report.iter().filter(|r| r[2] == "kept").count() + 1);
}

#[test]
fn model_feature_mismatch_names_missing() {
    let t = trained();
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("hp.ngm");
    std::fs::write(&model, read(&t.rain_model).replacen("highpass false", "highpass true", 1)).unwrap();
    for cmd in ["gate", "filter"] {
        let out = ngfilter(&[cmd, s(&t.corpus), "--model", s(&model), "--out", s(&dir.path().join(cmd))]);
        assert_eq!(out.status.code(), Some(1));
        let err = stderr(&out);
        assert!(err.contains("spectral_entropy") && err.contains("aci_0_500"), "{err}");
    }
}

fn chorus_center(components: &str) -> Option<f64> {
    let rest = components.split("chorus(").nth(1)?;
    rest.split("Hz").next()?.parse().ok()
}

#[test]
fn filter_finds_chorus_bands() {
    let t = trained();
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("chorus");
    ok(&["synth", "--n", "8", "--seed", "77", "--cicada", "1", "--rain", "0", "--out", s(&corpus)]);
    let out = dir.path().join("f");
    ok(&["filter", s(&corpus), "--model", s(&t.cicada_model), "--out", s(&out)]);
    let manifest = csv_rows(&corpus.join("manifest.csv"));
    let report = csv_rows(&out.join("filter_report.csv"));
    assert_eq!(report.len(), 8);
    for (m, r) in manifest.iter().zip(&report) {
        let center = chorus_center(&m[3]).unwrap();
        assert_eq!(r[2], "filtered", "{m:?}");
        let (lo, hi): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(lo - 300.0 <= center && center <= hi + 300.0, "center {center} band {lo}-{hi}");
        let (pre, post): (f64, f64) = (r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!(post < pre);
    }
}

#[test]
fn filter_fixed_band() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["synth", "--n", "2", "--out", s(&corpus)]);
    let out = dir.path().join("f");
    ok(&["filter", s(&corpus), "--band", "2000:3000", "--highpass", "--out", s(&out)]);
    let report = csv_rows(&out.join("filter_report.csv"));
    assert!(report.iter().all(|r| r[1].is_empty() && r[2] == "filtered" && r[3] == "2000" && r[4] == "3000"));
}

#[test]
fn gate_then_filter_conserves_segments() {
    let t = trained();
    let dir = tempfile::tempdir().unwrap();
    let (gated, filtered) = (dir.path().join("g"), dir.path().join("f"));
    ok(&["gate", s(&t.corpus), "--model", s(&t.rain_model), "--out", s(&gated)]);
    ok(&["filter", s(&gated), "--model", s(&t.cicada_model), "--mmse", "--out", s(&filtered)]);
    let kept = csv_rows(&gated.join("gate_report.csv")).iter().filter(|r| r[2] == "kept").count();
    assert_eq!(csv_rows(&filtered.join("filter_report.csv")).len(), kept);
    let wavs = std::fs::read_dir(&filtered)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "wav"))
        .count();
    assert_eq!(wavs, kept);
}
