#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_hanzi-attr");

/// Runs the CLI with `dir` as working directory.
pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .env_remove("HANZI_ATTR_SCHEMA")
        .output()
        .expect("spawn hanzi-attr")
}

pub fn run_ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "hanzi-attr {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

pub const TRAIN_CONFIG: &str = "initial_lr=10\nlr_halving_interval=1000000\nbatch_size=50\niterations=60\n";

/// Synthetic dictionary → lexicon → samples → model → pages → boxes and
/// crops → predictions → recognition, evaluation, spotting and a split.
pub fn pipeline(dir: &Path, jobs: usize) {
    let jobs = jobs.to_string();
    let r = |args: &[&str]| {
        let mut v = vec!["--jobs", jobs.as_str()];
        v.extend_from_slice(args);
        run_ok(dir, &v);
    };
    fs::write(dir.join("train.cfg"), TRAIN_CONFIG).unwrap();
    r(&["synth", "dictionary", "-o", "dict.tsv"]);
    r(&["lexicon", "build", "--dict", "dict.tsv", "-o", "lexicon.txt"]);
    r(&[
        "synth",
        "samples",
        "--count",
        "30",
        "--per-class",
        "3",
        "--seed",
        "4",
        "-o",
        "samples",
    ]);
    r(&[
        "train",
        "--samples",
        "samples",
        "--dict",
        "dict.tsv",
        "--config",
        "train.cfg",
        "--trace",
        "trace.tsv",
        "-o",
        "model.bin",
    ]);
    r(&[
        "synth",
        "pages",
        "--count",
        "2",
        "--classes",
        "8",
        "--seed",
        "9",
        "-o",
        "pages",
    ]);
    for p in ["page_000", "page_001"] {
        let page = format!("pages/{p}.pgm");
        let boxes = format!("{p}.boxes.tsv");
        let lines = format!("{p}.lines.tsv");
        r(&[
            "segment", "--in", &page, "-o", &boxes, "--lines", &lines, "--crops", "crops",
        ]);
    }
    r(&[
        "predict",
        "--model",
        "model.bin",
        "--images",
        "crops",
        "--features-out",
        "features.tsv",
        "-o",
        "preds.txt",
    ]);
    r(&[
        "recognize",
        "--lexicon",
        "lexicon.txt",
        "--preds",
        "preds.txt",
        "--groups",
        "cj,zm",
        "--top",
        "3",
        "-o",
        "results.tsv",
    ]);
    r(&[
        "evaluate",
        "--preds",
        "preds.txt",
        "--lexicon",
        "lexicon.txt",
        "--truth",
        "pages/truth.tsv",
        "--features",
        "features.tsv",
        "-o",
        "report.tsv",
    ]);
    r(&[
        "spot",
        "--features",
        "features.tsv",
        "--labels",
        "pages/truth.tsv",
        "-o",
        "map.txt",
    ]);
    r(&[
        "split",
        "--labels",
        "pages/truth.tsv",
        "--threshold",
        "5",
        "--k",
        "1",
        "--seed",
        "2",
        "-o",
        "split.tsv",
    ]);
}

/// Every regular file under `dir`, sorted, as paths relative to `dir`.
pub fn files(dir: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, d: &Path, out: &mut Vec<PathBuf>) {
        for e in fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

/// Files whose contents differ between two pipeline directories.
pub fn differing_files(a: &Path, b: &Path) -> Vec<PathBuf> {
    let (fa, fb) = (files(a), files(b));
    if fa != fb {
        return fa.into_iter().chain(fb).collect();
    }
    fa.into_iter()
        .filter(|f| fs::read(a.join(f)).unwrap() != fs::read(b.join(f)).unwrap())
        .collect()
}
