use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn m2s(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_m2s"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut si = child.stdin.take().unwrap();
        if let Some(data) = stdin {
            si.write_all(data).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn ok_json(args: &[&str], stdin: Option<&[u8]>) -> Value {
    let out = m2s(args, stdin);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn generate(args: &[&str]) -> Vec<u8> {
    let mut a = vec!["generate"];
    a.extend_from_slice(args);
    let out = m2s(&a, None);
    assert!(out.status.success());
    out.stdout
}

#[test]
fn csse_pipeline_brute() {
    let inst = generate(&["csse", "--n", "4"]);
    let v = ok_json(&["solve", "--method", "brute"], Some(&inst));
    assert_eq!(v["result"]["energy"], 8);
    let a = v["result"]["assignment"].as_str().unwrap();
    assert_eq!(a.len(), 4);
    assert_eq!(a.chars().filter(|&c| c == '1').count(), 2);
    for key in ["tool", "version", "seed", "instance_digest", "wall_time_s", "counters"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["counters"]["leaves_explored"], 16);
}

#[test]
fn generate_embeds_meta() {
    let v: Value = serde_json::from_slice(&generate(&[
        "column",
        "--f",
        "2",
        "--l",
        "2",
        "--sampled",
        "--seed",
        "9",
    ]))
    .unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["meta"]["family"], "column");
    assert_eq!(v["meta"]["f"], 2);
    assert_eq!(v["meta"]["l"], 2);
    assert_eq!(v["meta"]["seed"], 9);
    assert_eq!(v["meta"]["M"].as_array().unwrap().len(), 4);
}

#[test]
fn effective_matches_brute_on_seeded_random() {
    let inst = generate(&["random", "--n", "14", "--seed", "5"]);
    let b = ok_json(&["solve", "--method", "brute"], Some(&inst));
    for m in ["effective", "coloring", "avg-degree", "combined"] {
        let e = ok_json(&["solve", "--method", m, "--verify"], Some(&inst));
        assert_eq!(e["result"]["energy"], b["result"]["energy"], "{m}");
        assert_eq!(e["result"]["assignment"], b["result"]["assignment"], "{m}");
        assert_eq!(e["result"]["verified"], true);
        assert_eq!(e["instance_digest"], b["instance_digest"]);
    }
}

#[test]
fn count_minima_on_csse() {
    let inst = generate(&["csse", "--n", "4"]);
    let v = ok_json(&["count-minima", "--k", "1", "--list"], Some(&inst));
    assert_eq!(v["result"]["count"], 6);
    assert_eq!(v["result"]["minima"].as_array().unwrap().len(), 6);
}

#[test]
fn basins_csv_and_json() {
    let inst = generate(&["multicopy", "--copies", "2"]);
    let v = ok_json(&["basins", "--k", "1"], Some(&inst));
    assert_eq!(v["result"]["minima_count"], 36);
    let out = m2s(&["basins", "--k", "1", "--csv"], Some(&inst));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("basin,size\n"));
    assert_eq!(
        text.lines().count() as u64 - 1,
        v["result"]["basin_count"].as_u64().unwrap()
    );
}

#[test]
fn wcnf_input_reports_maxsat_value() {
    // Best is x1 false, x2 true: only the weight-1 clause is violated.
    let wcnf = b"p wcnf 2 3\n3 1 2 0\n2 -1 0\n1 -2 0\n";
    let v = ok_json(&["solve", "--method", "brute", "--verify"], Some(wcnf));
    assert_eq!(v["result"]["maxsat"]["total_weight"], 6);
    assert_eq!(v["result"]["maxsat"]["satisfied_weight"], 5);
    assert_eq!(v["result"]["energy"], 4);
}

#[test]
fn tset_and_z() {
    let path = tmp("regular.json");
    let out = m2s(
        &[
            "generate",
            "regular",
            "--n",
            "30",
            "--d",
            "4",
            "--seed",
            "1",
            "-o",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success());
    let p = path.to_str().unwrap();
    let t = ok_json(&["tset", "-i", p, "--seed", "2"], None);
    assert_eq!(t["result"]["set"]["success"], true);
    assert_eq!(t["result"]["set"]["checks"]["internal_degree"], true);
    let split = ok_json(&["tset", "-i", p, "--mode", "split"], None);
    assert!(split["result"]["set"]["t1"].is_array());
    let z = ok_json(&["z", "-i", p, "--tset-seed", "2"], None);
    assert_eq!(z["result"]["t"], t["result"]["set"]["t"]);
    let zt = ok_json(&["z", "-i", p, "--t", ""], None);
    assert_eq!(zt["result"]["z"], (1u64 << 30).to_string());
}

#[test]
fn probe_modes() {
    let v = ok_json(
        &[
            "probe",
            "--weights",
            "1,1,1,1",
            "--mode",
            "exact",
            "--h",
            "0",
            "--delta",
            "0",
        ],
        None,
    );
    assert_eq!(v["result"]["value_exact"], "3/8");
    let m = ok_json(
        &["probe", "--weights", "1 1 1 1", "--mode", "max", "--delta", "1"],
        None,
    );
    assert_eq!(m["result"]["value_exact"], "5/8");
    let wf = tmp("weights.txt");
    std::fs::write(&wf, "1\n2\n3\n").unwrap();
    let out = m2s(
        &[
            "probe",
            "--weights-file",
            wf.to_str().unwrap(),
            "--mode",
            "mc",
            "--samples",
            "1000",
            "--table-format",
            "csv",
        ],
        None,
    );
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("n,delta,h,estimate"));
    let s = ok_json(&["probe", "--mode", "scaling", "--n-list", "16,64"], None);
    assert_eq!(s["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn bench_counter_identities() {
    let v = ok_json(
        &[
            "bench",
            "--family",
            "multicopy",
            "--sizes",
            "8,12,16",
            "--methods",
            "brute,coloring",
        ],
        None,
    );
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let n = r["n"].as_u64().unwrap();
        let want = if r["method"] == "brute" {
            1u64 << n
        } else {
            1u64 << (3 * n / 4)
        };
        assert_eq!(r["leaves_explored"].as_u64().unwrap(), want, "{r}");
    }
    let e = ok_json(
        &[
            "bench",
            "--family",
            "edgeless",
            "--sizes",
            "10",
            "--methods",
            "effective",
        ],
        None,
    );
    let r = &e["result"]["rows"][0];
    assert_eq!(r["t_size"], 10);
    assert_eq!(r["outer_assignments"], 1);
    assert_eq!(r["leaves_explored"], 1);
    let empty = ok_json(&["bench", "--family", "random", "--sizes", ""], None);
    assert_eq!(empty["result"]["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn exit_codes() {
    assert_eq!(m2s(&["--help"], None).status.code(), Some(0));
    assert_eq!(m2s(&["--version"], None).status.code(), Some(0));
    assert_eq!(m2s(&["solve", "--no-such-flag"], None).status.code(), Some(1));
    assert_eq!(m2s(&["generate", "csse"], None).status.code(), Some(1));
    assert_eq!(m2s(&["solve", "--workers", "0"], Some(b"{}")).status.code(), Some(1));
    let missing = m2s(&["solve", "-i", "/definitely/not/here.json"], None);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    assert_eq!(m2s(&["solve"], Some(b"{ not json")).status.code(), Some(2));
    assert_eq!(m2s(&["solve"], Some(b"p wcnf 2 1\n1 1 x 0\n")).status.code(), Some(2));
    let big = generate(&["random", "--n", "70", "--density", "0.1"]);
    assert_eq!(m2s(&["solve"], Some(&big)).status.code(), Some(3));
    let huge = generate(&["random", "--n", "50", "--density", "0.0"]);
    assert_eq!(m2s(&["solve", "--method", "brute"], Some(&huge)).status.code(), Some(3));
}
