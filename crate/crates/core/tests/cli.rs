use std::fs;
use std::path::Path;
use std::process::Command;

use sphere_chaos::cli::CSV_HEADER;
use sphere_chaos::field::read_dump;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sphere-chaos"))
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = dir.join(name);
    let status = bin()
        .args(args)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "{args:?}");
    fs::read_to_string(out).unwrap()
}

fn value(csv: &str, ell: &str, statistic: &str) -> f64 {
    csv.lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|c| c[2] == ell && c[6] == statistic)
        .unwrap_or_else(|| panic!("no row {ell} {statistic}"))[7]
        .parse()
        .unwrap()
}

#[test]
fn constants_log_case() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to(dir.path(), "c.csv", &["constants", "--q", "4", "--d", "2"]);
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    assert!((value(&csv, "", "constant") - 0.151_982_2).abs() < 1e-6);
    assert_eq!(value(&csv, "", "log_power"), 1.0);
}

#[test]
fn moments_orthogonality_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to(dir.path(), "m.csv", &["moments", "--q", "2", "--d", "2", "--ell", "10"]);
    assert!((value(&csv, "10", "integral") - 1.0 / 21.0).abs() < 1e-9);
}

#[test]
fn clt_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["clt", "--q", "2", "--d", "2", "--ell", "32,64,128", "--reps", "2000", "--seed", "7"];
    let a = run_to(dir.path(), "a.csv", &args);
    let b = run_to(dir.path(), "b.csv", &args);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    let c = run_to(dir.path(), "c.csv", &threaded);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(a.lines().count() > 3 * 6);
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["defect", "--ell", "8,16", "--reps", "200", "--seed", "3"];
    let csv = run_to(dir.path(), "d.csv", &args);
    let mut j = args.to_vec();
    j.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&run_to(dir.path(), "d.json", &j)).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    assert_eq!(rows[0]["command"], "defect");
    assert_eq!(rows[0]["statistic"], "mean");
    assert_eq!(rows[0]["value"].as_f64().unwrap(), value(&csv, "8", "mean"));
}

#[test]
fn simulate_writes_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("f.bin");
    let csv = run_to(
        dir.path(),
        "s.csv",
        &["simulate", "--ell", "6", "--res", "12", "--seed", "4", "--dump", dump.to_str().unwrap()],
    );
    let f = read_dump(fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!((f.d, f.ell, f.values.len()), (2, 6, 288));
    assert_eq!(value(&csv, "6", "nodes"), 288.0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["moments", "--q", "x", "--ell", "3"]), 2);
    assert_eq!(code(&["moments", "--ell", "3"]), 2);
    assert_eq!(code(&["clt", "--q", "2", "--ell", "8,4"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["constants", "--q", "1", "--d", "2"]), 3);
    assert_eq!(code(&["clt", "--q", "2", "--d", "3", "--ell", "4", "--res", "90"]), 3);
    assert_eq!(
        code(&["constants", "--q", "2", "--output", "/nonexistent/dir/out.csv"]),
        4
    );
}
