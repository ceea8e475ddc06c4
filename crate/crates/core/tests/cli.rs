use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vo_lab::dataset::{read_problems, FoldAssignment};

fn vo_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vo-lab")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = vo_lab(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (raw, lab, ded, aug, bal) = (p(d, "raw.jsonl"), p(d, "lab.jsonl"), p(d, "ded.jsonl"), p(d, "aug.jsonl"), p(d, "bal.jsonl"));

    assert!(ok(&["dataset", "build", "--synthetic", "80", "--seed", "4", "--out", &raw]).contains("wrote 80"));
    assert!(ok(&["proxy-label", "--input", &raw, "--out", &lab, "--percentile", "95"]).starts_with("labelled "));
    ok(&["dataset", "dedup", "--input", &lab, "--out", &ded]);
    let records = read_problems(Path::new(&ded)).unwrap();
    assert!(records.len() > 40);

    ok(&["dataset", "augment", "--input", &ded, "--out", &aug]);
    assert_eq!(read_problems(Path::new(&aug)).unwrap().len(), 6 * records.len());
    ok(&["dataset", "balance", "--input", &ded, "--out", &bal, "--seed", "2"]);
    assert_eq!(read_problems(Path::new(&bal)).unwrap().len(), records.len());

    let folds = p(d, "folds.json");
    ok(&["dataset", "split", "--input", &ded, "--out", &folds, "--folds", "3"]);
    let a: FoldAssignment = serde_json::from_str(&fs::read_to_string(&folds).unwrap()).unwrap();
    assert_eq!(a.k, 3);

    for (paradigm, cols) in [("class", 1 + 81 + 1), ("reg-ord", 1 + 1 + 81 + 1), ("reg-var", 1 + 1 + 27 + 1)] {
        let csv = p(d, &format!("{paradigm}.csv"));
        ok(&["featurize", "--problems", &ded, "--out", &csv, "--paradigm", paradigm]);
        let text = fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().next().unwrap().split(',').count(), cols, "{paradigm}");
    }

    let h = ok(&["heuristic", "run", "--heuristic", "brown", "--problems", &raw]);
    assert_eq!(h.lines().count(), 81);

    let model = p(d, "model.json");
    ok(&["train", "--problems", &ded, "--out", &model, "--trials", "3", "--seed", "1"]);
    let eval = ok(&["evaluate", "--model", &model, "--test", &ded]);
    let row: serde_json::Value = serde_json::from_str(eval.lines().next().unwrap()).unwrap();
    assert_eq!(row["records"], records.len());

    let plot = p(d, "plot.csv");
    let cmp = ok(&["compare", "--test", &ded, "--model", &format!("knn={model}"), "--plot-data", &plot]);
    let names: Vec<&str> = cmp.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["knn", "brown", "gmods", "t1", "optimal"]);
    assert_eq!(fs::read_to_string(&plot).unwrap().lines().count(), 1 + 5 * records.len());

    let out = p(d, "exp");
    let table = ok(&["experiment", "run", "--problems", &ded, "--out", &out, "--folds", "3", "--trials", "2", "--mode", "balanced"]);
    assert!(table.lines().any(|l| l.starts_with("knn,")));
    for f in ["report.json", "report.csv", "choices.csv"] {
        assert!(Path::new(&out).join(f).exists(), "{f}");
    }
}

#[test]
fn parse_and_smtlib() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("sets.txt");
    fs::write(&text, "# one set per line\nx1^2 - x2; x3^3 - 1\n").unwrap();
    let t = text.display().to_string();
    assert_eq!(ok(&["parse", &t, "--nvars", "3"]).trim(), "x3^3 - 1; x1^2 - x2");

    let smt = dir.path().join("a.smt2");
    fs::write(&smt, "(declare-fun a () Real)(declare-fun b () Real)(assert (< (* a b) 1))").unwrap();
    assert_eq!(ok(&["parse", &smt.display().to_string(), "--smtlib"]).trim(), "2 x1*x2 - 1");
}

#[test]
fn smtlib_directory_build() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir_all(corpus.join("fam")).unwrap();
    fs::write(corpus.join("fam/p.smt2"), "(declare-fun a () Real)(assert (> a 0))").unwrap();
    fs::write(corpus.join("bad.smt2"), "(assert (> (sin a) 0))").unwrap();
    let out = p(dir.path(), "raw.jsonl");
    let log = ok(&["dataset", "build", "--smtlib-dir", &corpus.display().to_string(), "--out", &out]);
    assert!(log.contains("skipped"));
    assert!(log.contains("wrote 1 problems"));
    assert!(fs::read_to_string(&out).unwrap().contains("\"source\":\"fam\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(vo_lab(&[]).status.code(), Some(1));
    assert_eq!(vo_lab(&["dataset", "frobnicate"]).status.code(), Some(1));
    assert_eq!(vo_lab(&["train", "--trials", "many"]).status.code(), Some(1));
    assert_eq!(vo_lab(&["--help"]).status.code(), Some(0));
    // required option missing
    assert_eq!(vo_lab(&["dataset", "dedup"]).status.code(), Some(1));

    let missing = p(dir.path(), "nope.jsonl");
    assert_eq!(vo_lab(&["dataset", "dedup", "--input", &missing, "--out", &p(dir.path(), "o")]).status.code(), Some(2));
    let bad = p(dir.path(), "bad.jsonl");
    fs::write(&bad, "{not json}\n").unwrap();
    let o = vo_lab(&["dataset", "dedup", "--input", &bad, "--out", &p(dir.path(), "o")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.jsonl:1"));

    let sets = dir.path().join("s.txt");
    fs::write(&sets, "x1 + * 2\n").unwrap();
    assert_eq!(vo_lab(&["parse", &sets.display().to_string(), "--nvars", "1"]).status.code(), Some(2));

    let cfg = dir.path().join("c.conf");
    fs::write(&cfg, "no_such_key = 3\n").unwrap();
    let o = vo_lab(&["--config", &cfg.display().to_string(), "dataset", "dedup", "--input", &bad, "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let raw = p(d, "raw.jsonl");
    let cfg = d.join("run.conf");
    fs::write(&cfg, format!("# corpus\nsynthetic = 12\nseed = 3\nout = {raw}\n")).unwrap();
    let c = cfg.display().to_string();
    assert!(ok(&["--config", &c, "dataset", "build"]).contains("wrote 12"));
    assert!(ok(&["--config", &c, "dataset", "build", "--synthetic", "7"]).contains("wrote 7"));
    let other = p(d, "other.jsonl");
    ok(&["dataset", "build", "--config", &c, "--out", &other]);
    assert_eq!(fs::read_to_string(&other).unwrap(), {
        ok(&["--config", &c, "dataset", "build"]);
        fs::read_to_string(&raw).unwrap()
    });
}
