use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qbind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbind"))
        .args(args)
        .output()
        .unwrap()
}

fn text(o: &Output) -> (String, String) {
    (
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, name: &str, n: usize, seed: u64) -> String {
    let path = dir.join(name);
    let o = qbind(&["generate", "--samples", &n.to_string(), "--seed", &seed.to_string(), "--path", p(&path)]);
    assert!(o.status.success(), "{:?}", text(&o));
    path.to_str().unwrap().to_string()
}

fn history_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn generate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a.csv", 40, 9);
    let b = generate(dir.path(), "b.csv", 40, 9);
    let c = generate(dir.path(), "c.csv", 40, 10);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn fifty_epochs_give_fifty_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.csv", 30, 1);
    let out = dir.path().join("run");
    let o = qbind(&["train", "--ansatz", "a4", "--encoding", "angle", "--epochs", "50", "--data", &data, "--out", p(&out)]);
    assert!(o.status.success(), "{:?}", text(&o));
    assert_eq!(history_rows(&out.join("history.csv")), 50);
    assert!(out.join("checkpoint.txt").exists());
    assert!(out.join("normalization.csv").exists());
    let (stdout, _) = text(&o);
    assert!(stdout.contains("parameters=37"), "{stdout}");
}

#[test]
fn divergence_exits_two_and_names_epoch() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.csv", 30, 1);
    let o = qbind(&["train", "--lr", "1e6", "--epochs", "300", "--data", &data, "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let (_, stderr) = text(&o);
    assert!(stderr.contains("epoch"), "{stderr}");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let o = qbind(&["train", "--data", p(&missing), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[training]\nepochz = 3\n").unwrap();
    let o = qbind(&["--config", p(&cfg), "train"]);
    assert_eq!(o.status.code(), Some(1));

    let o = qbind(&["train", "--test-fraction", "1.5", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));

    let o = qbind(&["inspect-circuit"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gradcheck_with_zero_tolerance_exits_three() {
    let o = qbind(&["gradcheck", "--seeds", "1", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let (stdout, _) = text(&o);
    assert!(stdout.contains("0/30"), "{stdout}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "d.csv", 30, 2);
    // relative paths resolve against the config file's directory
    fs::write(
        dir.path().join("run.toml"),
        "[common]\nout = \"from_file\"\n\n[data]\ntrain = \"d.csv\"\n\n[training]\nepochs = 7\n\n[train]\nansatz = \"a3\"\nencoding = \"amplitude\"\n",
    )
    .unwrap();
    let cfg = dir.path().join("run.toml");
    let o = qbind(&["--config", p(&cfg), "train"]);
    assert!(o.status.success(), "{:?}", text(&o));
    assert_eq!(history_rows(&dir.path().join("from_file/history.csv")), 7);
    assert!(text(&o).0.starts_with("sequential a3 amplitude"));

    let out = dir.path().join("from_flag");
    let o = qbind(&["--config", p(&cfg), "--out", p(&out), "train", "--epochs", "4"]);
    assert!(o.status.success(), "{:?}", text(&o));
    assert_eq!(history_rows(&out.join("history.csv")), 4);
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.csv", 40, 3);
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = qbind(&[
            "--workers", workers, "train", "--architecture", "parallel", "--ansatz", "a5",
            "--encoding", "amplitude", "--epochs", "5", "--data", &data, "--out", p(&out),
        ]);
        assert!(o.status.success(), "{:?}", text(&o));
        let h = fs::read_to_string(out.join("history.csv")).unwrap();
        // drop the timing column
        let rows: Vec<String> = h.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect();
        rows
    };
    assert_eq!(run("1", "w1"), run("4", "w4"));
}

#[test]
fn inspect_listing_matches_gate_count() {
    let o = qbind(&["inspect-circuit", "--ansatz", "a1", "--encoding", "amplitude"]);
    assert!(o.status.success());
    let (stdout, _) = text(&o);
    assert!(stdout.contains("# gates=17 two_qubit=8 params=24"), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| !l.starts_with('#')).count(), 17);
}

#[test]
fn construct_only_grid_skips_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = qbind(&["grid", "--construct-only", "--architectures", "ensemble", "--out", p(dir.path())]);
    assert!(o.status.success(), "{:?}", text(&o));
    let report = fs::read_to_string(dir.path().join("ensemble.csv")).unwrap();
    assert_eq!(report.lines().count(), 11);
    assert!(report.lines().skip(1).all(|l| l.ends_with(",constructed")));
    assert!(!dir.path().join("summary.csv").exists());
    assert!(!dir.path().join("sequential.csv").exists());
}

#[test]
fn grid_records_failed_variant_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.csv", 30, 1);
    let o = qbind(&[
        "grid", "--architectures", "sequential", "--ansatze", "a1,a4", "--encodings", "amplitude",
        "--lr", "1e6", "--data", &data, "--out", p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2), "{:?}", text(&o));
    let report = fs::read_to_string(dir.path().join("sequential.csv")).unwrap();
    assert_eq!(report.lines().count(), 3);
    assert!(report.lines().skip(1).all(|l| l.contains("failed: ")), "{report}");
}
