use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sdbc::cli::RunRecord;

const BIN: &str = env!("CARGO_BIN_EXE_sdbc");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sdbc(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("SDBC_LOG", "error").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_record(prefix: &Path) -> RunRecord {
    let json = std::fs::read_to_string(format!("{}.result.json", prefix.display())).unwrap();
    RunRecord::from_json(&json).unwrap()
}

fn read_trace(prefix: &Path) -> Vec<[f64; 3]> {
    let csv = std::fs::read_to_string(format!("{}.trace.csv", prefix.display())).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_sec,glb,gub"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

fn assert_monotone(rows: &[[f64; 3]]) {
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0], "t_sec not increasing: {w:?}");
        assert!(w[1][1] >= w[0][1], "glb decreased: {w:?}");
        assert!(w[1][2] <= w[0][2], "gub increased: {w:?}");
    }
}

#[test]
fn solve_t3_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t3");
    let o = sdbc(&["solve", fixture("t3.uai").to_str().unwrap(), "--raw-energy", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = read_record(&out);
    assert!(rec.exact);
    assert!((rec.gub - 1.0).abs() <= 1e-5 && (rec.glb - 1.0).abs() <= 1e-5);
    assert_eq!(rec.instance, "t3");
    let rows = read_trace(&out);
    assert!(!rows.is_empty());
    assert_monotone(&rows);
}

#[test]
fn zero_budget_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t3");
    let o = sdbc(&[
        "solve",
        fixture("t3.uai").to_str().unwrap(),
        "--raw-energy",
        "--budget-sec",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let rec = read_record(&out);
    assert!(rec.timed_out && !rec.exact);
    assert_eq!(rec.gub, f64::INFINITY);
    assert!(rec.incumbent.is_none());
}

#[test]
fn default_prefix_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.uai");
    std::fs::copy(fixture("t3.uai"), &model).unwrap();
    let o = sdbc(&["solve", model.to_str().unwrap(), "--raw-energy"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("m.result.json").exists());
    assert!(dir.path().join("m.trace.csv").exists());

    let missing = sdbc(&["solve", dir.path().join("nope.uai").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    std::fs::write(&model, "MARKOV\n3\n2 2 2\n1\n3 0 1 2\n8\n1 1 1 1 1 1 1 1\n").unwrap();
    let o = sdbc(&["solve", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
    let o = sdbc(&["solve", model.to_str().unwrap(), "--cut-caps", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2), "clap usage errors exit 2");
}

#[test]
fn gen_edge_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.uai");
    let b = dir.path().join("b.uai");
    let args = |p: &Path, kappa: &str| {
        sdbc(&["gen", "--n", "64", "--h", "10", "--kappa", kappa, "--omega", "0.2", "--seed", "1", "--out", p.to_str().unwrap()])
    };
    let o = args(&a, "63");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("edges 2016 "), "{}", stdout(&o));
    args(&b, "63");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let o = args(&a, "6.56");
    assert!(stdout(&o).starts_with("edges 210 "), "{}", stdout(&o));
    let text = std::fs::read_to_string(&a).unwrap();
    let m = sdbc::uai::read_uai(&text, sdbc::uai::TableMode::Potentials).unwrap();
    assert_eq!((m.num_nodes(), m.num_edges()), (64, 210));

    let bad = args(&a, "64");
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn cuts_never_lower_the_final_bound() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("dense.uai");
    let o = sdbc(&["gen", "--n", "8", "--h", "3", "--kappa", "7", "--omega", "0.1", "--seed", "4", "--out", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let run = |extra: &[&str], name: &str| {
        let out = dir.path().join(name);
        let mut args = vec!["solve", model.to_str().unwrap(), "--budget-sec", "120", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = sdbc(&args);
        assert!(matches!(o.status.code(), Some(0 | 2)));
        assert_monotone(&read_trace(&out));
        read_record(&out)
    };
    let with = run(&[], "cuts");
    let without = run(&["--no-cuts"], "nocuts");
    assert!(with.glb >= without.glb - 1e-6, "{} < {}", with.glb, without.glb);
    assert!(without.cuts.keys().all(|c| !c.is_cut()));
}

#[test]
fn verify_suites() {
    let o = sdbc(&["verify", "gradients", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("check  5 [PASS]"));
    let o = sdbc(&["verify", "speed"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid value"));
}

#[test]
fn log_level_from_env() {
    let o = Command::new(BIN)
        .args(["solve", fixture("t3.uai").to_str().unwrap(), "--raw-energy", "--out"])
        .arg(tempfile::tempdir().unwrap().path().join("t3"))
        .env("SDBC_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DEBUG"));
}
