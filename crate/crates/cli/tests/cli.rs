use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsion-atlas")).args(args).output().expect("spawn")
}

fn run_env(args: &[&str], key: &str, val: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsion-atlas")).args(args).env(key, val).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("torsion-atlas-{}-{}", name, std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn classify_a1_json() {
    let o = run(&["classify", "--type", "A1", "--isogeny", "sc", "--p", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["type"], "A1");
    assert_eq!(v["meta"]["p"], 3);
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["countsByRank"], serde_json::json!([1, 1]));
    assert_eq!(v["classes"][1]["normalizerQuotientOrder"], "2");
}

#[test]
fn classify_is_deterministic() {
    let args = ["classify", "--type", "F4", "--p", "3"];
    let a = run(&args);
    let b = run(&args);
    let c = run(&["--threads", "1", "classify", "--type", "F4", "--p", "3"]);
    assert!(a.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn csv_and_markdown() {
    let o = run(&["classify", "--type", "G2", "--p", "2", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("id,rank,representative,"));
    assert_eq!(text.lines().count(), 4);
    let o = run(&["classify", "--type", "G2", "--p", "2", "--format", "markdown"]);
    assert!(stdout(&o).contains("## Rank 2"));
}

#[test]
fn transfer_f4_default_q() {
    let o = run(&["transfer", "--type", "F4", "--p", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["q"], 7);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 13);
    for c in classes {
        let q: u64 = c["componentGroupOrder"].as_str().unwrap().parse().unwrap();
        let sum: u64 = c["records"].as_array().unwrap().iter().map(|r| r["orbitSize"].as_u64().unwrap()).sum();
        assert_eq!(sum, q);
    }
}

#[test]
fn report_lists_nontoral_classes() {
    let o = run(&["report", "--type", "F4", "--p", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("Tabulated non-toral classes"));
    assert!(text.contains("3^3"));
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("out").join("g2.json");
    let o = run(&["classify", "--type", "G2", "--p", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"weylOrder\": \"12\""));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["classify", "--type", "A1", "--p", "4"],
        vec!["classify", "--type", "H3", "--p", "2"],
        vec!["classify", "--type", "E8", "--p", "11"],
        vec!["transfer", "--type", "G2", "--p", "2", "--q", "7"],
        vec!["classify", "--type", "G2"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{:?}", args);
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn large_prime_with_max_rank() {
    let o = run(&["classify", "--type", "G2", "--p", "11", "--max-rank", "1", "--no-distributions"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["countsByRank"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_tables_and_oracle_pass() {
    let o = run(&["verify", "--suite", "tables"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["verify", "--suite", "oracle", "--max-rank", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_torsion_subset() {
    let o = run(&["verify", "--suite", "torsion", "--primes", "2,7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 14);
}

#[test]
fn corrupted_table_fails_verification() {
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    let dir = scratch("data");
    for f in ["char_classes.tsv", "inclusions.tsv", "nontoral.tsv", "totals.tsv"] {
        std::fs::copy(src.join(f), dir.join(f)).unwrap();
    }
    let path = dir.join("nontoral.tsv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines.iter().position(|l| l.starts_with("5\tF4\t2^5\t")).unwrap();
    let mut cols: Vec<String> = lines[i].split('\t').map(String::from).collect();
    cols[6] = "4".into();
    lines[i] = cols.join("\t");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = run_env(&["verify", "--suite", "tables"], "TORSION_ATLAS_DATA", &dir);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL") && l.contains("F4 2^5")));
}

#[test]
fn missing_table_directory_is_usage_error() {
    let o = run_env(&["verify", "--suite", "tables"], "TORSION_ATLAS_DATA", &PathBuf::from("/nonexistent/tables"));
    assert_eq!(o.status.code(), Some(2));
}
