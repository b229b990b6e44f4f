use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spechc::graph::DuplicatePolicy;
use spechc::io::{parse_edge_list, parse_labels};
use spechc::tree::{balanced_tree, dasgupta_cost, HcTree};

fn spechc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spechc")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_TRIANGLES: &str = "0 1 1\n1 2 1\n2 0 1\n3 4 1\n4 5 1\n5 3 1\n2 3 0.1\n";

#[test]
fn tree_json_golden() {
    let t = balanced_tree(&[0, 1, 2, 3]).unwrap();
    assert_eq!(
        t.to_json(),
        r#"{"n_leaves":4,"nodes":[{"children":[1,4],"leaf":null,"parent":null},{"children":[2,3],"leaf":null,"parent":0},{"children":null,"leaf":0,"parent":1},{"children":null,"leaf":1,"parent":1},{"children":[5,6],"leaf":null,"parent":0},{"children":null,"leaf":2,"parent":4},{"children":null,"leaf":3,"parent":4}]}"#
    );
    assert_eq!(HcTree::from_json(&t.to_json()).unwrap(), t);
}

#[test]
fn cluster_writes_tree_and_cost() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, TWO_TRIANGLES).unwrap();
    let tree_path = dir.path().join("t.json");
    let report = stdout_json(&spechc(&[
        "cluster", "--input", path(&input), "--algo", "specwrsc", "--k", "2", "--emit-cost", "--output-tree",
        path(&tree_path),
    ]));
    assert_eq!(report["algo"], "spec_wrsc");
    assert_eq!(report["n"], 6);
    // each triangle 2 + 3 + 3, bridge 0.1 * 6
    assert_eq!(report["cost"].as_f64().unwrap(), 16.6);
    let t = HcTree::from_json(&fs::read_to_string(&tree_path).unwrap()).unwrap();
    let g = parse_edge_list(TWO_TRIANGLES, DuplicatePolicy::Reject).unwrap();
    assert_eq!(dasgupta_cost(&g, &t).unwrap(), 16.6);
}

#[test]
fn every_algorithm_and_sweep_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, TWO_TRIANGLES).unwrap();
    for args in [
        vec!["--algo", "caterpillar", "--eta", "2"],
        vec!["--algo", "caterpillar", "--eta-sweep"],
        vec!["--algo", "avglink"],
        vec!["--algo", "balanced", "--seed", "9"],
        vec!["--algo", "specwrsc", "--k-sweep", "3"],
        vec!["--algo", "specwrsc", "--gamma", "2"],
    ] {
        let mut full = vec!["cluster", "--input", path(&input), "--emit-cost"];
        full.extend(args.iter().copied());
        let report = stdout_json(&spechc(&full));
        assert!(report["cost"].as_f64().unwrap() >= 16.6, "{args:?}: {report}");
    }
    assert!(!spechc(&["cluster", "--input", path(&input), "--algo", "avglink", "--k-sweep", "3"]).status.success());
    assert!(!spechc(&["cluster", "--input", path(&input), "--eta", "2", "--eta-sweep"]).status.success());
}

#[test]
fn dump_buckets_lists_input_ids() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, "10 11 1\n11 12 1\n12 10 1\n13 14 1\n14 15 1\n15 13 1\n12 13 0.1\n").unwrap();
    let dump = dir.path().join("b.json");
    stdout_json(&spechc(&["cluster", "--input", path(&input), "--dump-buckets", path(&dump)]));
    let b: serde_json::Value = serde_json::from_str(&fs::read_to_string(&dump).unwrap()).unwrap();
    let mut ids: Vec<u64> = b["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["buckets"].as_array().unwrap().iter())
        .flat_map(|x| x["members"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()))
        .collect();
    ids.sort_unstable();
    assert_eq!(ids, (10..16).collect::<Vec<_>>());
}

#[test]
fn duplicates_need_the_merge_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, format!("{TWO_TRIANGLES}1 0 1\n")).unwrap();
    let out = spechc(&["cluster", "--input", path(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate edge"));
    let report = stdout_json(&spechc(&["cluster", "--input", path(&input), "--merge-duplicates"]));
    assert_eq!(report["m"], 7);
}

#[test]
fn spectrum_reports_gap() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, TWO_TRIANGLES).unwrap();
    let s = stdout_json(&spechc(&["spectrum", "--input", path(&input), "--k", "2"]));
    let ev: Vec<f64> = s["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(ev.len(), 3);
    assert!(ev[0].abs() < 1e-10);
    assert!((s["gap"].as_f64().unwrap() - ev[2] / ev[1]).abs() < 1e-12);
}

#[test]
fn generators_write_edges_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sbm.txt");
    let status = spechc(&["gen-sbm", "--k", "3", "--n-k", "10", "--p", "1", "--q", "0", "--seed", "4", "--output", path(&out)]);
    assert!(status.status.success());
    let g = parse_edge_list(&fs::read_to_string(&out).unwrap(), DuplicatePolicy::Reject).unwrap();
    assert_eq!((g.n(), g.m()), (30, 3 * 45));
    let labels = parse_labels(&fs::read_to_string(dir.path().join("sbm.txt.labels")).unwrap()).unwrap();
    assert_eq!(labels.len(), 30);
    assert!(labels.iter().all(|&(v, l)| l == v as usize / 10));

    let hs = dir.path().join("hsbm.txt");
    let lab = dir.path().join("hsbm.lab");
    let st = spechc(&["gen-hsbm", "--n-k", "8", "--p", "0.9", "--q-min", "0.01", "--output", path(&hs), "--labels", path(&lab)]);
    assert!(st.status.success());
    assert_eq!(parse_labels(&fs::read_to_string(&lab).unwrap()).unwrap().len(), 40);
}

#[test]
fn kernel_graph_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pts.csv");
    fs::write(&csv, "x,y,class\n0,0,a\n0,1,a\n5,5,b\n5,6,b\n").unwrap();
    let out = dir.path().join("k.txt");
    let st = spechc(&["kernel-graph", "--input", path(&csv), "--sigma", "1", "--label-column", "2", "--output", path(&out)]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let g = parse_edge_list(&fs::read_to_string(&out).unwrap(), DuplicatePolicy::Reject).unwrap();
    assert_eq!(g.n(), 4);
    let w01 = g.edges().iter().find(|e| (g.label(e.u), g.label(e.v)) == (0, 1)).unwrap().w;
    assert_eq!(w01, (-0.5f64).exp());
    let labels = parse_labels(&fs::read_to_string(dir.path().join("k.txt.labels")).unwrap()).unwrap();
    assert_eq!(labels, vec![(0, 0), (1, 0), (2, 1), (3, 1)]);
}

#[test]
fn bench_writes_outputs_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    fs::write(
        &cfg,
        r#"{"graphs": [{"name": "small", "kind": "sbm", "k": 2, "n_k": 15, "p": 0.6, "q": 0.05, "seed": 2}],
            "algorithms": ["spec_wrsc", "average_linkage"], "seeds": [0, 1], "threads": 2}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let st = spechc(&["bench", "--config", path(&cfg), "--out-dir", path(&out_dir)]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let csv = fs::read_to_string(out_dir.join("records.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "graph,n,m,algo,k,seed,cost,wall_time_s,depth,buckets,contracted_n");
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(fs::read_to_string(out_dir.join("records.jsonl")).unwrap().lines().count(), 4);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"][0]["normalized_cost"], 1.0);

    fs::write(
        &cfg,
        r#"{"graphs": [{"kind": "sbm", "k": 2, "n_k": 5, "p": 0, "q": 0}], "algorithms": ["spec_wrsc"], "seeds": [0]}"#,
    )
    .unwrap();
    assert_eq!(spechc(&["bench", "--config", path(&cfg), "--out-dir", path(&out_dir)]).status.code(), Some(1));
    fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(spechc(&["bench", "--config", path(&cfg), "--out-dir", path(&out_dir)]).status.code(), Some(2));
}

#[test]
fn verify_quick_passes() {
    let out = spechc(&["verify", "--quick"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
}
