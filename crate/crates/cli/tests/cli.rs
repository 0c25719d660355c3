use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use avlcode::codec;
use avlcode::tree::{from_text, sample_uniform, to_text};
use avlcode::TreeClass;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avlcode")).args(args).output().expect("spawn avlcode")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn verify_small_includes_count_n5() {
    let o = run(&["verify", "--max-n", "5", "--trials", "2"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.lines().any(|l| l == "CHECK count_n5 PASS expected=6"), "{out}");
    assert!(out.lines().all(|l| l.starts_with("CHECK ") && l.contains(" PASS")));
}

#[test]
fn verify_reports_corrupt_container() {
    let dir = tempfile::tempdir().unwrap();
    let tree = sample_uniform(40, 11, TreeClass::Avl).unwrap();
    let mut bytes = codec::encode(&tree).unwrap().to_bytes();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x5a;
    bytes.truncate(bytes.len() - 3);
    let path = dir.path().join("bad.avlc");
    fs::write(&path, &bytes).unwrap();

    let o = run(&["verify", "--max-n", "4", "--trials", "1", "--in", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CHECK roundtrip FAIL"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failure: roundtrip"));
}

#[test]
fn verify_accepts_valid_container() {
    let dir = tempfile::tempdir().unwrap();
    let tree = sample_uniform(40, 11, TreeClass::Llavl).unwrap();
    let path = dir.path().join("ok.avlc");
    fs::write(&path, codec::encode(&tree).unwrap().to_bytes()).unwrap();
    let o = run(&["verify", "--max-n", "4", "--trials", "1", "--in", p(&path)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("file="));
}

#[test]
fn gen_is_deterministic_and_matches_library() {
    for class in ["avl", "llavl"] {
        let a = stdout(&run(&["gen", "--class", class, "--n", "64", "--seed", "9"]));
        let b = stdout(&run(&["gen", "--class", class, "--n", "64", "--seed", "9"]));
        assert_eq!(a, b);
        let tc = if class == "avl" { TreeClass::Avl } else { TreeClass::Llavl };
        assert_eq!(a.trim(), to_text(&sample_uniform(64, 9, tc).unwrap()));
    }
}

#[test]
fn encode_decode_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("t.txt");
    let avlc = dir.path().join("t.avlc");
    assert!(run(&["gen", "--n", "200", "--seed", "5", "--out", p(&txt)]).status.success());

    let o = run(&["encode", "--in", p(&txt), "--out", p(&avlc)]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let tree = from_text(fs::read_to_string(&txt).unwrap().trim(), TreeClass::Avl).unwrap();
    let enc = codec::encode(&tree).unwrap();
    assert_eq!(report["n"], 200);
    assert_eq!(report["header_bits"], enc.accounting.header_bits);
    assert_eq!(report["payload_bits"], enc.accounting.payload_bits);
    for key in ["bits_per_node", "predicted_bound"] {
        assert!(report[key].is_f64(), "{key}");
    }
    assert_eq!(fs::read(&avlc).unwrap(), enc.to_bytes());

    let back = stdout(&run(&["decode", "--in", p(&avlc)]));
    assert_eq!(back.trim(), to_text(&tree));
}

#[test]
fn single_node_has_empty_payload() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("one.txt");
    fs::write(&txt, "(..)").unwrap();
    let o = run(&["encode", "--in", p(&txt), "--out", p(&dir.path().join("one.avlc"))]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["payload_bits"], 0);
}

#[test]
fn bad_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("bad.txt");
    fs::write(&txt, "((..)").unwrap();
    assert_eq!(run(&["encode", "--in", p(&txt)]).status.code(), Some(3));
    assert_eq!(run(&["stats", "--in", p(&dir.path().join("missing.txt"))]).status.code(), Some(3));

    let garbage = dir.path().join("junk.avlc");
    fs::write(&garbage, b"AVLX\x01").unwrap();
    assert_eq!(run(&["decode", "--in", p(&garbage)]).status.code(), Some(3));

    // A left path of three nodes is not height-balanced.
    fs::write(&txt, "(((..).).)").unwrap();
    assert_eq!(run(&["encode", "--in", p(&txt)]).status.code(), Some(3));
}

#[test]
fn count_matches_known_prefix() {
    let out = stdout(&run(&["count", "--max-n", "7"]));
    let counts: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["1", "2", "1", "4", "6", "4", "17"]);
}

fn bracket_line(out: &str) -> &str {
    out.lines().find(|l| l.starts_with("# bracket=")).expect("bracket line")
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    let start = line.find(key).unwrap() + key.len();
    line[start..].split_whitespace().next().unwrap()
}

#[test]
fn alpha_avl_bracket_and_bound() {
    let o = run(&["alpha", "--class", "avl", "--h-max", "40"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("h,alpha_h,parity\n"));
    let line = bracket_line(&out);
    let b = field(line, "bracket=");
    let (lo, hi) = b.trim_matches(['[', ']']).split_once(',').unwrap();
    let (lo, hi): (f64, f64) = (lo.parse().unwrap(), hi.parse().unwrap());
    assert!(lo < 0.5220 && hi >= 0.5219, "{b}");
    assert!(field(line, "bits_per_node_lower_bound=").starts_with("0.938"));
    assert_eq!(field(line, "converged="), "true");
}

#[test]
fn alpha_llavl_bracket_and_bound() {
    let out = stdout(&run(&["alpha", "--class", "llavl"]));
    let line = bracket_line(&out);
    assert!(field(line, "bracket=").starts_with("[0.67418"));
    assert!(field(line, "bits_per_node_lower_bound=").starts_with("0.568"));
}

#[test]
fn alpha_unconverged_exits_2_with_partial_table() {
    let o = run(&["alpha", "--class", "llavl", "--h-max", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5);
    assert!(bracket_line(&out).contains("converged=false"));
}

#[test]
fn alpha_generic_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("fib.rec");
    // f = x1 x2 with seeds z and z^2
    fs::write(&spec, "c=2\n1 1 1\n0 1\n0 0 1\n").unwrap();
    let o = run(&["alpha", "--spec", p(&spec), "--h-max", "20", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["monotone"], true);
    assert_eq!(r["converged"], true);
    let rows = r["rows"].as_array().unwrap();
    assert!(!rows.is_empty());

    fs::write(&spec, "c=2\n").unwrap();
    assert_eq!(run(&["alpha", "--spec", p(&spec)]).status.code(), Some(3));
}

#[test]
fn bench_summary_line() {
    let out = stdout(&run(&["bench", "--n", "500", "--trials", "3", "--class", "llavl"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    let last = lines[3];
    for key in ["min=", "mean=", "max=", "round_trip=true"] {
        assert!(last.contains(key), "{last}");
    }
}
