use std::path::Path;
use std::process::{Command, Output};

fn kne(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kne"))
        .current_dir(dir)
        .env_remove("KNE_SEED")
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .unwrap()
}

/// Two 4-cliques bridged by one edge, plus a pendant path.
fn write_graph(dir: &Path) {
    let mut s = String::new();
    for c in 0..2 {
        for i in 0..4 {
            for j in i + 1..4 {
                s.push_str(&format!("n{} n{}\n", c * 4 + i, c * 4 + j));
            }
        }
    }
    s.push_str("n0 n4\nn7 n8\nn8 n9\n");
    std::fs::write(dir.join("g.edges"), s).unwrap();
    let labels: String = (0..10).map(|i| format!("n{i} {}\n", if i < 4 { "a" } else { "b" })).collect();
    std::fs::write(dir.join("g.labels"), labels).unwrap();
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn train_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    let args = ["train", "g.edges", "--dim", "2", "--seed", "7", "--num-walks", "5"];
    let a = kne(d, &[&args[..], &["-o", "a.txt"]].concat());
    let b = kne(d, &[&args[..], &["-o", "b.txt"]].concat());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(code(&b), 0);
    let ea = std::fs::read(d.join("a.txt")).unwrap();
    assert_eq!(ea, std::fs::read(d.join("b.txt")).unwrap());
    assert!(String::from_utf8_lossy(&ea).starts_with("10 2\n"));

    let manifest = std::fs::read_to_string(d.join("a.txt.manifest")).unwrap();
    for key in ["command=train", "seed=7", "train.dim=2", "kernel=gauss", "input.graph.sha256=", "seconds.train="] {
        assert!(manifest.contains(key), "manifest lacks {key}");
    }
    let r = kne(d, &["replay", "a.txt.manifest", "-o", "c.txt"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(ea, std::fs::read(d.join("c.txt")).unwrap());
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    let base = ["train", "g.edges", "--dim", "2", "--num-walks", "3"];
    kne(d, &[&base[..], &["--seed", "1", "-o", "a.txt"]].concat());
    let o = Command::new(env!("CARGO_BIN_EXE_kne"))
        .current_dir(d)
        .env("KNE_SEED", "1")
        .args([&base[..], &["--seed", "2", "-o", "b.txt"]].concat())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(d.join("a.txt")).unwrap(), std::fs::read(d.join("b.txt")).unwrap());
}

#[test]
fn walk_corpus_and_train_from_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    let w = kne(d, &["walk", "g.edges", "-o", "w.txt", "--num-walks", "2", "--walk-length", "5", "--seed", "3"]);
    assert_eq!(code(&w), 0);
    let corpus = std::fs::read_to_string(d.join("w.txt")).unwrap();
    assert_eq!(corpus.lines().count(), 20);
    assert!(corpus.lines().all(|l| l.split(' ').count() == 5));
    assert!(d.join("w.txt.manifest").exists());
    let t = kne(d, &["train", "--corpus", "w.txt", "--dim", "3", "-o", "e.txt"]);
    assert_eq!(code(&t), 0, "{}", String::from_utf8_lossy(&t.stderr));
    assert!(std::fs::read_to_string(d.join("e.txt")).unwrap().starts_with("10 3\n"));
}

#[test]
fn classify_and_linkpred_emit_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    assert_eq!(code(&kne(d, &["train", "g.edges", "--dim", "4", "--num-walks", "10", "-o", "e.txt"])), 0);
    let c = kne(d, &["eval-classify", "g.edges", "g.labels", "e.txt", "--ratios", "0.5,0.8", "--repeats", "3"]);
    assert_eq!(code(&c), 0, "{}", String::from_utf8_lossy(&c.stderr));
    let out = String::from_utf8(c.stdout).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "method\t0.5\t0.8");
    assert!(lines[1].starts_with("e\t"));

    let l = kne(d, &["eval-linkpred", "g.edges", "--dim", "4", "--num-walks", "5", "--fraction", "0.3", "-o", "lp.tsv"]);
    assert_eq!(code(&l), 0, "{}", String::from_utf8_lossy(&l.stderr));
    let tsv = std::fs::read_to_string(d.join("lp.tsv")).unwrap();
    assert!(tsv.starts_with("dataset\tkernel\tparam\tseed\tauc\ng\tgauss\t2\t0\t"));
    assert!(d.join("lp.tsv.manifest").exists());

    let s = kne(d, &["sweep", "g.edges", "g.labels", "--axis", "dim", "--values", "2,4", "--num-walks", "3", "--ratios", "0.5", "--repeats", "2"]);
    assert_eq!(code(&s), 0, "{}", String::from_utf8_lossy(&s.stderr));
    let out = String::from_utf8(s.stdout).unwrap();
    assert_eq!(out.lines().count(), 3);
    assert!(out.starts_with("dim\t0.5\n2\t"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    for args in [
        &["eval-linkpred", "g.edges", "--fraction", "0"][..],
        &["train", "g.edges", "-o", "x", "--sigma", "1", "--sigma2", "2"],
        &["train", "g.edges", "-o", "x", "--kernel", "sch", "--sigma2", "2"],
        &["train", "g.edges", "-o", "x", "--bogus"],
        &["train", "g.edges", "-o", "x", "--dim", "0"],
        &["eval-classify", "g.edges", "g.labels", "e.txt", "--ratios", "1.5"],
    ] {
        let o = kne(d, args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!d.join("x").exists());
    }
    let bad_seed = Command::new(env!("CARGO_BIN_EXE_kne"))
        .current_dir(d)
        .env("KNE_SEED", "abc")
        .args(["train", "g.edges", "-o", "x"])
        .output()
        .unwrap();
    assert_eq!(code(&bad_seed), 2);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    std::fs::write(d.join("bad.edges"), "a b\nc\n").unwrap();
    let o = kne(d, &["train", "bad.edges", "-o", "x"]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.edges:2"), "{err}");
    assert_eq!(err.lines().count(), 1);
    assert_eq!(code(&kne(d, &["train", "missing.edges", "-o", "x"])), 3);
    assert!(!d.join("x").exists());
}

#[test]
fn stale_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    assert_eq!(code(&kne(d, &["train", "g.edges", "--dim", "2", "--num-walks", "2", "-o", "a.txt"])), 0);
    std::fs::write(d.join("g.edges"), "n0 n1\n").unwrap();
    assert_eq!(code(&kne(d, &["replay", "a.txt.manifest"])), 3);
}
