use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistkit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("twistkit-cli-{}-{}", std::process::id(), name));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn verify_a8() {
    let o = run(&["verify", "--relation", "A8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified=true"));
    let o = run(&["--json", "verify", "--relation", "KO9", "--level", "homology"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"verified\":true"));
}

#[test]
fn invariants_b8_json() {
    let o = run(&["invariants", "--relation", "B8", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["h1_torsion"], serde_json::json!([2]));
    assert_eq!(v["euler"], 4);
}

#[test]
fn json_is_deterministic() {
    let a = run(&["--json", "invariants", "--relation", "A9"]);
    let b = run(&["--json", "invariants", "--relation", "A9"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"h1_torsion\":[3]"));
}

#[test]
fn broken_file_exits_one() {
    let p = temp_file("broken.fac", "surface genus 1 holes 8; al1\n");
    let o = run(&["verify", "--file", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verified=false"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&["verify", "--relation", "K3"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    let p = temp_file("garbage.fac", "surface genus 1 holes 8; al1 * *\n");
    assert_eq!(run(&["verify", "--file", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["cap", "--relation", "A9", "--hole", "12"]).status.code(), Some(2));
}

#[test]
fn replay_scripts() {
    for s in ["D_A8", "D_B8", "D_A9"] {
        let o = run(&["replay", "--script", s]);
        assert_eq!(o.status.code(), Some(0), "{}", s);
        assert!(stdout(&o).contains("certified: true"));
    }
}

#[test]
fn replay_detects_wrong_checkpoint() {
    let p = temp_file(
        "bad.script",
        "script BAD\nstart KO8\ntarget A8\nslide_right 1\ncheckpoint surface genus 1 holes 8; al1 * al2 * al3 * al4 * al5 * al6 * al7 * al8 * be * si3 * si4 * si5\n",
    );
    let o = run(&["replay", "--file", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cap_a9() {
    let o = run(&["cap", "--relation", "A9", "--hole", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("k=8 verified=true"));
    let o = run(&["cap", "--relation", "A9", "--hole", "1", "--level", "homology"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn search_not_found_exits_one() {
    let o = run(&["search", "--from", "KO8", "--to", "A8", "--budget", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fmt_is_idempotent() {
    let p = temp_file("fmt.fac", "surface   genus 1 holes 8 ;al4*al5 * [ al1 ](be)\n");
    let once = run(&["fmt", p.to_str().unwrap()]);
    assert_eq!(once.status.code(), Some(0));
    let q = temp_file("fmt2.fac", &stdout(&once));
    let twice = run(&["fmt", q.to_str().unwrap()]);
    assert_eq!(once.stdout, twice.stdout);
    assert_eq!(stdout(&once).trim(), "surface genus 1 holes 8; al4 * al5 * [al1](be)");
}

#[test]
fn validate_tables() {
    let o = run(&["validate-tables", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failed"));
}
