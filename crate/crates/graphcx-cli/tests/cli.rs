use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graphcx::{Family, FamilyTag, LabeledDiGraph};
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphcx")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Every file below `root`, by relative path.
fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["verify", "d2", "--family", "oriented", "--vmax", "3", "--emax", "4"])), 0);
    assert_eq!(code(&run(d, &["verify", "quasi-iso-phi", "--n", "0", "--loop", "0", "--smax", "1"])), 1);
    assert_eq!(code(&run(d, &["frobnicate"])), 2);
    assert_eq!(code(&run(d, &["gen", "--vmax", "0"])), 2);
    assert_eq!(code(&run(d, &["homology", "--family", "directed"])), 2);
    assert_eq!(code(&run(d, &["gen", "--vmax", "13"])), 3);
    assert_eq!(code(&run(d, &["gen", "--emax", "15"])), 3);
    assert_eq!(code(&run(d, &["gen", "--family", "ribbon", "--emax", "6"])), 3);
    assert_eq!(code(&run(d, &["phi", "missing.json"])), 2);
}

#[test]
fn verify_targets_pass_on_small_bounds() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cases: &[&[&str]] = &[
        &["verify", "d2", "--family", "hairy", "--vmax", "3", "--emax", "4"],
        &["verify", "d2", "--family", "ribbon", "--emax", "3"],
        &["verify", "rgc-d2", "--emax", "3"],
        &["verify", "chainmap-phi", "--vmax", "3", "--emax", "4"],
        &["verify", "chainmap-F", "--vmax", "4", "--emax", "6"],
        &["verify", "lemma-identities", "--vmax", "3", "--emax", "4"],
        &["verify", "quasi-iso-phi", "--n", "1", "--loop", "1", "--smax", "2", "--vmax", "12"],
        &["verify", "quasi-iso-p", "--n", "1", "--loop", "1", "--smax", "2", "--vmax", "12"],
    ];
    for args in cases {
        let out = run(d, args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let line: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        assert_eq!(line["passed"], true, "{args:?}");
        assert!(line["checked"].as_u64().unwrap() > 0, "{args:?}");
    }
}

#[test]
fn empty_slice_gets_a_header_only_file() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["gen", "--family", "hairy", "--n", "1", "--vmax", "1", "--emax", "2", "--smax", "3"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("graphcx-cache/hairy/1/1_0_3.basis.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
    let head: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!((head["v"].as_u64(), head["e"].as_u64(), head["s"].as_u64()), (Some(1), Some(0), Some(3)));
}

fn gen_and_diff(dir: &Path, cache: &str) {
    for cmd in ["gen", "diff"] {
        for family in ["hairy", "oriented", "sourced"] {
            let out = run(dir, &[cmd, "--family", family, "--vmax", "4", "--emax", "5", "--cache", cache]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    gen_and_diff(a.path(), "c");
    gen_and_diff(b.path(), "c");
    let (ta, tb) = (tree(&a.path().join("c")), tree(&b.path().join("c")));
    assert!(ta.keys().any(|p| p.to_string_lossy().ends_with(".mat")));
    assert_eq!(ta, tb);
    // a different thread count writes the same bytes
    let c = TempDir::new().unwrap();
    for cmd in ["gen", "diff"] {
        let out = run(c.path(), &[cmd, "--family", "hairy", "--vmax", "4", "--emax", "5", "--cache", "c", "--jobs", "1"]);
        assert_eq!(code(&out), 0);
    }
    for (p, bytes) in tree(&c.path().join("c")) {
        if p.starts_with("hairy") {
            assert_eq!(ta.get(&p), Some(&bytes), "{}", p.display());
        }
    }
}

#[test]
fn cache_survives_deletion() {
    let dir = TempDir::new().unwrap();
    gen_and_diff(dir.path(), "c");
    let first = tree(&dir.path().join("c"));
    // reruns on a warm cache change nothing
    gen_and_diff(dir.path(), "c");
    assert_eq!(tree(&dir.path().join("c")), first);
    fs::remove_dir_all(dir.path().join("c")).unwrap();
    gen_and_diff(dir.path(), "c");
    assert_eq!(tree(&dir.path().join("c")), first);
}

#[test]
fn corrupt_cache_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["gen", "--family", "hairy", "--vmax", "2", "--emax", "2", "--cache", "c"]);
    assert_eq!(code(&out), 0);
    let file = dir.path().join("c/hairy/1/2_2_1.basis.jsonl");
    let text = fs::read_to_string(&file).unwrap();
    fs::write(&file, text.replace("\"v\":2", "\"v\":3")).unwrap();
    let out = run(dir.path(), &["gen", "--family", "hairy", "--vmax", "2", "--emax", "2", "--cache", "c"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn phi_on_a_complete_graph_with_one_hair() {
    let dir = TempDir::new().unwrap();
    let g = LabeledDiGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], vec![0]);
    let path = dir.path().join("g.json");
    fs::write(&path, g.to_json()).unwrap();
    for n in 0..=1 {
        let out = run(dir.path(), &["phi", "g.json", "--n", &n.to_string()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let expected = graphcx::forest::phi(&g, &FamilyTag::new(Family::Hairy(1), n)).unwrap();
        let mut got = graphcx::Combo::new();
        for line in stdout(&out).lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let h: LabeledDiGraph = serde_json::from_value(v["graph"].clone()).unwrap();
            got.insert(h, v["coeff"].as_i64().unwrap());
        }
        assert!(!got.is_empty());
        assert_eq!(got, expected);
    }
    // a tadpole is not a hairy graph
    fs::write(&path, LabeledDiGraph::new(1, vec![(0, 0)], vec![0]).to_json()).unwrap();
    assert_eq!(code(&run(dir.path(), &["phi", "g.json"])), 2);
}

#[test]
fn fmap_of_the_smallest_trivalent_graph_is_zero() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("g.json"), LabeledDiGraph::new(2, vec![(0, 1), (0, 1)], vec![]).to_json()).unwrap();
    let out = run(dir.path(), &["fmap", "g.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "");
}

#[test]
fn homology_reports_balance() {
    let dir = TempDir::new().unwrap();
    for family in ["hairy", "oriented", "sourced", "ribbon"] {
        let out = run(dir.path(), &["homology", "--family", family, "--loop", "1", "--vmax", "6", "--emax", "4", "--exact"]);
        assert_eq!(code(&out), 0, "{family}: {}", String::from_utf8_lossy(&out.stderr));
        for line in stdout(&out).lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["euler_chain"], v["euler_homology"], "{family}");
        }
    }
    let out = run(dir.path(), &["homology", "--family", "hairy", "--loop", "1", "--smax", "1", "--degree-window", "-3:-3", "--out", "h.json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(fs::read_to_string(dir.path().join("h.json")).unwrap().trim()).unwrap();
    assert!(v["degrees"].as_array().unwrap().iter().all(|d| d["degree"] == -3));
}
