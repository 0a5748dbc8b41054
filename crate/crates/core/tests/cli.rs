use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("freeaut-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeaut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const TAU: &str =
    r#"{"format_version":1,"automorphism":{"variant":"uniform","d":2,"block":[[1,0],[1,1]]}}"#;
const TAU4: &str =
    r#"{"format_version":1,"automorphism":{"variant":"uniform","d":2,"block":[[1,0],[4,1]]}}"#;

#[test]
fn shear_certificate_verifies_and_tampering_is_caught() {
    let dir = scratch("shear");
    let cert = dir.join("shear.cert");
    let o = run(&[
        "shear",
        "--n",
        "3",
        "--m",
        "2",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("[ 0 -1  0  0]"));

    let o = run(&["verify", cert.to_str().unwrap(), "--window", "12"]);
    assert!(o.status.success(), "{}", stdout(&o));

    let text = fs::read_to_string(&cert).unwrap();
    let bad = dir.join("bad.cert");
    fs::write(&bad, text.replace(r#""order":3"#, r#""order":6"#)).unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED"));
}

#[test]
fn classify_tau_is_a_generator() {
    let dir = scratch("classify");
    let aut = dir.join("tau.aut");
    fs::write(&aut, TAU).unwrap();
    let o = run(&["classify", aut.to_str().unwrap()]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("congruence gcd: 1"));
    assert!(out.contains("normal generator: true"));
    assert!(out.contains("ladder rung: 1"));
}

#[test]
fn pipeline_chain_round_trips_through_verify() {
    let dir = scratch("pipeline");
    let aut = dir.join("tau4.aut");
    let chain = dir.join("tau4.chain.json");
    fs::write(&aut, TAU4).unwrap();
    let o = run(&[
        "pipeline",
        aut.to_str().unwrap(),
        "--out",
        chain.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("target reached"));

    let o = run(&["verify", chain.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));

    // corrupt one step: its certificate must be named in the report
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&chain).unwrap()).unwrap();
    let step = &mut v["steps"][0];
    let name = step["name"].as_str().unwrap().to_string();
    step["certificate"]["claim"] = serde_json::json!({"kind": "order", "order": 5});
    let bad = dir.join("bad.chain.json");
    fs::write(&bad, v.to_string()).unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(&name), "{}", stdout(&o));
}

#[test]
fn matrix_arguments_accept_both_formats() {
    let o = run(&["zaushko", "[[2,1],[1,1]]"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["factor", "--m", "3", "[[1,2],[0,1]]"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["wans", "[[1,2],[3,4]]"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["wans", "[[1,2,3]]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn centered_family_reports_a_witness() {
    let dir = scratch("centered");
    let file = dir.join("family.json");
    fs::write(
        &file,
        r#"{"format_version":1,"descriptors":[
            {"kind":"finite","primes":[2,3,7]},
            {"kind":"all_except","primes":[3]},
            {"kind":"union_with_prefix","primes":{"finite":[5],"excluded":[3]}}
        ]}"#,
    )
    .unwrap();
    let o = run(&["filters", "centered", file.to_str().unwrap()]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("centered: true"), "{out}");
    assert!(out.contains(r#""prime":2"#), "{out}");
}

#[test]
fn counterexample_rejects_bad_probe() {
    let o = run(&[
        "filters",
        "demo-counterexample",
        "--primes",
        "3,5",
        "--probe",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
