use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paley-km"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_writes_a_valid_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--q", "5", "--format", "text"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("is_conference\ttrue"));
    let text = fs::read_to_string(dir.path().join("paley_5.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.trim().is_empty()).count(), 6);

    let o = run(dir.path(), &["gen", "--q", "5"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("paley_5.json")).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn gen_rejects_primes_that_are_three_mod_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--q", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("paley_7.json").exists());
}

#[test]
fn probability_outside_the_open_interval_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for p in ["1.5", "0", "1"] {
        let o = run(dir.path(), &["ks", "--q", "13", "--p", p]);
        assert_eq!(o.status.code(), Some(2), "p = {p}");
    }
}

#[test]
fn spectrum_output_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["spectrum", "--q", "101", "--p", "0.25", "--seed", "4", "--trials", "5", "--bins", "40"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    let stem = "spectrum_q101_p0.25_seed4_trials5";
    for ext in ["csv", "json"] {
        let name = format!("{stem}.{ext}");
        let first = fs::read(a.path().join(&name)).unwrap();
        assert_eq!(first, fs::read(b.path().join(&name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(a.path().join(format!("{stem}.csv"))).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("bin_left,bin_right,count,empirical_density,km_density"));
    assert_eq!(lines.count(), 42);
}

#[test]
fn spectrum_ks_threshold_controls_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["spectrum", "--q", "101", "--p", "0.25", "--trials", "3"];
    let strict = [&base[..], &["--ks-max", "0.000001"]].concat();
    assert_eq!(run(dir.path(), &strict).status.code(), Some(1));
    let loose = [&base[..], &["--ks-max", "1"]].concat();
    assert!(run(dir.path(), &loose).status.success());
}

#[test]
fn moments_report_the_limit_and_vanishing_odd_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["moments", "--q", "101", "--p", "0.2", "--trials", "20", "--k-max", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    // k = 2 limit is 1/p
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 5.0);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[2][2].parse::<f64>().unwrap(), 0.0);
    assert!(dir.path().join("moments_q101_p0.2_seed0_trials20.tsv").exists());
}

#[test]
fn verify_passes_on_small_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--k-max", "4", "--primes", "5,13,29,61"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    for line in text.lines().filter(|l| l.starts_with("counting\tk=3")) {
        assert!(line.contains("sum=0\t"), "{line}");
    }
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn triangles_print_known_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["triangles", "--n-max", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n\tk\tcatalan\tborel\n"));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("triangles.json")).unwrap()).unwrap();
    assert_eq!(json["limiting_coefficients"]["4"]["3"], 2);
    assert_eq!(json["limiting_coefficients"]["4"]["4"], -1);
}
