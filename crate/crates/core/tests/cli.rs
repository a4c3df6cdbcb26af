use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qdiscord::io::{read_povm, read_state};
use qdiscord::ComplexMatrix;
use serde_json::Value;
use tempfile::TempDir;

fn qd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiscord"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn diag_state(dir: &Path, name: &str, d: &[f64]) -> PathBuf {
    let n = d.len();
    let re: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect())
        .collect();
    let im = vec![vec![0.0; n]; n];
    let v = serde_json::json!({ "dims": [n], "re": re, "im": im });
    write(dir, name, &v.to_string())
}

const CLASSICAL: &str = r#"{"dims":[2,2],
 "re":[[0.5,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0.5]],
 "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
const BELL: &str = r#"{"dims":[2,2],
 "re":[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],
 "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
const Z_POVM: &str = r#"{"dim":2,"elements":[
 {"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]},
 {"re":[[0,0],[0,1]],"im":[[0,0],[0,0]]}]}"#;

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn entropy_prints_fifteen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let mixed = diag_state(dir.path(), "mixed.json", &[0.5, 0.5]);
    let o = qd(&["entropy", p(&mixed), "--kind", "vn"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0.693147180559945");

    let d = diag_state(dir.path(), "d.json", &[0.75, 0.25]);
    let o = qd(&["entropy", p(&d), "--kind", "tsallis", "--q", "2"]);
    assert_eq!(stdout(&o).trim(), "0.375");

    let pure = diag_state(dir.path(), "pure.json", &[1.0, 0.0]);
    for args in [
        vec!["--kind", "vn"],
        vec!["--kind", "quadratic"],
        vec!["--kind", "renyi", "--q", "0.5"],
        vec!["--kind", "tsallis", "--q", "2.5"],
    ] {
        let mut full = vec!["entropy", p(&pure)];
        full.extend(args);
        assert_eq!(stdout(&qd(&full)).trim(), "0");
    }
}

#[test]
fn resolved_seed_is_printed() {
    let dir = TempDir::new().unwrap();
    let mixed = diag_state(dir.path(), "m.json", &[0.5, 0.5]);
    let o = qd(&["entropy", p(&mixed), "--kind", "vn", "--seed", "42"]);
    assert!(stderr(&o).contains("seed: 42"));
    let o = qd(&["entropy", p(&mixed), "--kind", "vn"]);
    assert!(stderr(&o).contains("seed: "));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad_trace = diag_state(dir.path(), "t.json", &[0.75, 0.35]);
    let o = qd(&["entropy", p(&bad_trace), "--kind", "vn"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unit_trace"));

    let negative = diag_state(dir.path(), "n.json", &[1.2, -0.2]);
    let o = qd(&["entropy", p(&negative), "--kind", "vn"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("positive_semidefinite"));

    let ragged = write(
        dir.path(),
        "r.json",
        r#"{"dims":[2],"re":[[1,0]],"im":[[0,0],[0,0]]}"#,
    );
    assert_eq!(
        qd(&["entropy", p(&ragged), "--kind", "vn"]).status.code(),
        Some(2)
    );

    let extra = write(
        dir.path(),
        "x.json",
        r#"{"dims":[1],"re":[[1]],"im":[[0]],"comment":"no"}"#,
    );
    assert_eq!(
        qd(&["entropy", p(&extra), "--kind", "vn"]).status.code(),
        Some(2)
    );

    let not_json = write(dir.path(), "bad.json", "{");
    assert_eq!(
        qd(&["entropy", p(&not_json), "--kind", "vn"]).status.code(),
        Some(2)
    );

    let ok = diag_state(dir.path(), "ok.json", &[0.5, 0.5]);
    assert_eq!(
        qd(&["entropy", p(&ok), "--kind", "renyi", "--q", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qd(&["entropy", p(&ok), "--kind", "tsallis"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qd(&["entropy", p(&ok), "--kind", "vn", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qd(&["check", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn failed_command_leaves_no_output_file() {
    let dir = TempDir::new().unwrap();
    let bad = diag_state(dir.path(), "bad.json", &[0.9, 0.2]);
    let out = dir.path().join("out.txt");
    let o = qd(&["entropy", p(&bad), "--kind", "vn", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn discord_examples() {
    let dir = TempDir::new().unwrap();
    let classical = write(dir.path(), "c.json", CLASSICAL);
    let bell = write(dir.path(), "b.json", BELL);
    let z = write(dir.path(), "z.json", Z_POVM);

    let o = qd(&["discord", p(&classical), p(&z), "--kind", "vn"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["discord"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["condition"]["label"], "Thm2.i");
    assert_eq!(v["condition"]["holds"], true);

    let o = qd(&["discord", p(&bell), p(&z), "--kind", "quadratic"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["mutual_information"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["holevo_measured"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["discord"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let three = diag_state(dir.path(), "three.json", &[0.5, 0.25, 0.25]);
    assert_eq!(
        qd(&["discord", p(&three), p(&z), "--kind", "vn"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        qd(&["discord", p(&bell), "--kind", "vn"]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_csv() {
    let dir = TempDir::new().unwrap();
    let classical = write(dir.path(), "c.json", CLASSICAL);
    let z = write(dir.path(), "z.json", Z_POVM);
    let o = qd(&[
        "sweep",
        p(&classical),
        p(&z),
        "--q-from",
        "0.5",
        "--q-to",
        "4",
        "--q-steps",
        "8",
    ]);
    let text = stdout(&o);
    let (q, d) = qdiscord::io::parse_sweep_csv(&text).unwrap();
    assert_eq!(q.len(), 8);
    assert_eq!(q[0], 0.5);
    assert!(d.iter().all(|x| x.abs() < 1e-12));

    let o = qd(&[
        "sweep",
        p(&classical),
        p(&z),
        "--q-from",
        "1.5",
        "--q-steps",
        "1",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("q,discord\n1.5,"));
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains('\r'));
    let (_, d) = qdiscord::io::parse_sweep_csv(&text).unwrap();
    assert!(d[0].abs() < 1e-12);

    let o = qd(&[
        "sweep",
        p(&classical),
        p(&z),
        "--q-from",
        "3",
        "--q-to",
        "1",
        "--q-steps",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_round_trip_and_determinism() {
    let dir = TempDir::new().unwrap();
    let s1 = dir.path().join("s1.json");
    let s2 = dir.path().join("s2.json");
    for s in [&s1, &s2] {
        let o = qd(&[
            "gen",
            "--what",
            "state",
            "--dims",
            "4",
            "--rank",
            "2",
            "--seed",
            "9",
            "--out",
            p(s),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("rank: 2"));
    }
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
    let rho = read_state(&s1).unwrap();
    assert_eq!(rho.rank(1e-9).unwrap(), 2);

    let povm_path = dir.path().join("p.json");
    let o = qd(&[
        "gen",
        "--what",
        "povm",
        "--dims",
        "2",
        "--outcomes",
        "3",
        "--seed",
        "9",
        "--out",
        p(&povm_path),
    ]);
    assert!(o.status.success());
    let povm = read_povm(&povm_path).unwrap();
    assert_eq!(povm.len(), 3);
    assert!(povm.is_rank1(1e-9).unwrap());
    let sum = povm
        .elements()
        .iter()
        .fold(ComplexMatrix::zeros(2, 2), |a, e| &a + e);
    assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);

    // generated files feed straight into the consumers, bit-exact
    let joint = dir.path().join("j.json");
    assert!(qd(&[
        "gen",
        "--what",
        "state",
        "--dims",
        "2,3",
        "--seed",
        "1",
        "--out",
        p(&joint)
    ])
    .status
    .success());
    let reread = qdiscord::io::state_to_string(&read_state(&joint).unwrap());
    assert_eq!(reread, fs::read_to_string(&joint).unwrap());
    let o = qd(&[
        "discord",
        p(&joint),
        p(&povm_path),
        "--kind",
        "tsallis",
        "--q",
        "1.5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let ch = dir.path().join("ch.json");
    let o = qd(&[
        "gen",
        "--what",
        "channel",
        "--dims",
        "3",
        "--d-out",
        "2",
        "--kraus",
        "2",
        "--seed",
        "4",
        "--out",
        p(&ch),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let chan = qdiscord::io::channel_from_str(&fs::read_to_string(&ch).unwrap()).unwrap();
    assert_eq!((chan.d_in(), chan.d_out()), (3, 2));
}

#[test]
fn check_suites() {
    let o = qd(&[
        "check",
        "--suite",
        "eq25,lemma4",
        "--trials",
        "40",
        "--seed",
        "2",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 6);
    for r in results {
        assert_eq!(r["trials"], 40);
        assert!(r["worst_gap"].is_number());
    }

    // a negative tolerance demands a margin no SSA instance meets, so exit 1
    let o = qd(&[
        "check",
        "--suite",
        "ssa",
        "--trials",
        "20",
        "--tolerance=-1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn search_none_found_and_determinism() {
    let o = qd(&[
        "search",
        "--kind",
        "quadratic",
        "--restarts",
        "3",
        "--steps",
        "200",
        "--seed",
        "1",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], "none_found");
    assert!(v["best_value"].as_f64().unwrap() >= -1e-9);
    assert_eq!(v["restarts"], 3);

    let args = [
        "search",
        "--kind",
        "tsallis",
        "--q",
        "2.5",
        "--restarts",
        "6",
        "--steps",
        "1000",
        "--seed",
        "11",
    ];
    let a = qd(&args);
    let b = qd(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let o = qd(&["search", "--kind", "tsallis", "--restarts", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qd(&[
        "search", "--kind", "tsallis", "--q", "2.5", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certificate_replays_through_discord_and_sweep() {
    let dir = TempDir::new().unwrap();
    let cert = dir.path().join("cert.json");
    let o = qd(&[
        "search",
        "--kind",
        "tsallis",
        "--q",
        "2.5",
        "--restarts",
        "20",
        "--steps",
        "1500",
        "--seed",
        "7",
        "--out",
        p(&cert),
    ]);
    assert!(o.status.success());
    let c: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let value = c["discord_value"]
        .as_f64()
        .expect("a certificate at this budget");
    assert!(value < -1e-6);
    assert!(c.get("wall_time").is_none());

    let o = qd(&[
        "discord",
        p(&cert),
        p(&cert),
        "--kind",
        "tsallis",
        "--q",
        "2.5",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["discord"].as_f64().unwrap() - value).abs() < 1e-10);
    assert_eq!(v["condition"]["holds"], false);

    let o = qd(&[
        "sweep",
        p(&cert),
        "--q-from",
        "1",
        "--q-to",
        "4",
        "--q-steps",
        "301",
    ]);
    let (q, d) = qdiscord::io::parse_sweep_csv(&stdout(&o)).unwrap();
    let negative: Vec<f64> = q
        .iter()
        .zip(&d)
        .filter(|(_, x)| **x < -1e-6)
        .map(|(q, _)| *q)
        .collect();
    assert!(!negative.is_empty());
    assert!(negative.iter().all(|q| *q > 2.0 && *q < 3.0));
}
