use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use yapa::io::{parse_csv, read_graph, write_graph, ParsedCsv};
use yapa::{Dag, GeneratorKind, InitialCondition, Params, VertexId};

fn yapa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yapa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = yapa(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn csv(path: &Path) -> ParsedCsv {
    parse_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

fn cell(t: &ParsedCsv, row: usize, col: &str) -> String {
    t.rows[row][t.column(col).unwrap()].clone()
}

#[test]
fn generate_single_vertex_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["generate", "--alpha", "3", "--beta", "2", "--nodes", "1", "--out", out]);
    assert_eq!(fs::read_to_string(dir.path().join("graph.csv")).unwrap(), "source,target\n");
    let dag = read_graph(dir.path(), "graph").unwrap();
    assert_eq!(dag.n_vertices(), 1);
}

#[test]
fn generate_is_byte_identical_across_reruns() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        ok(&[
            "generate",
            "--alpha",
            "4",
            "--beta",
            "1.5",
            "--nodes",
            "3000",
            "--seed",
            "99",
            "--init-fanout",
            "10",
            "--out",
            d.path().to_str().unwrap(),
        ]);
    }
    for f in ["graph.csv", "graph.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
    let dag = read_graph(a.path(), "graph").unwrap();
    assert_eq!(dag.seed(), 99);
    assert_eq!(dag.init(), InitialCondition::fanout(10));
    assert!((2..=11).all(|v| dag.out_arcs(v).contains(&1)));
}

#[test]
fn fixpoint_reports_gamma() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["fixpoint", "--alpha", "4", "--beta", "2", "--out", dir.path().to_str().unwrap()]);
    let t = csv(&dir.path().join("fixpoint.csv"));
    assert_eq!(t.columns, ["alpha", "beta", "regime", "gamma", "y_star", "residual"]);
    let gamma: f64 = cell(&t, 0, "gamma").parse().unwrap();
    assert!((gamma - 0.4544).abs() < 1e-4);
    assert_eq!(cell(&t, 0, "regime"), "supercritical");
    assert_eq!(t.comment("schema_version"), Some("1"));
}

#[test]
fn surface_theory_column_is_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "surface", "--alpha", "3", "--beta", "2", "--nodes", "100000", "--runs", "2", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let t = csv(&dir.path().join("surface.csv"));
    assert_eq!(t.columns, ["N", "detached", "fraction", "theory_fraction"]);
    assert_eq!(t.rows.len(), 2);
    let theory: f64 = cell(&t, 0, "theory_fraction").parse().unwrap();
    assert!((theory - (-1.0f64).exp()).abs() < 1e-15);
    let frac: f64 = cell(&t, 1, "fraction").parse().unwrap();
    assert!((frac - 0.3679).abs() < 0.01);
}

fn write_chain(dir: &Path, n: usize) {
    let lists: Vec<Vec<VertexId>> = (1..=n)
        .map(|v| if v == 1 { vec![] } else { vec![v as VertexId - 1] })
        .collect();
    let dag = Dag::from_out_arcs(
        Params::new(3.0, 2.0).unwrap(),
        0,
        GeneratorKind::Reference,
        InitialCondition::None,
        &lists,
    )
    .unwrap();
    write_graph(&dag, dir, "chain").unwrap();
}

#[test]
fn degrees_and_paths_on_chain_input() {
    let dir = tempfile::tempdir().unwrap();
    write_chain(dir.path(), 5);
    let input = dir.path().join("chain.csv");
    let out = dir.path().join("out");
    let args = ["--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()];
    ok(&[&["degrees"][..], &args].concat());
    let h = csv(&out.join("degrees_histogram.csv"));
    assert_eq!(h.columns, ["degree", "count_in", "count_out"]);
    // in-degrees 1,1,1,1,0 and out-degrees 0,1,1,1,1
    assert_eq!(h.rows, [["0", "1", "1"], ["1", "4", "4"]]);
    let pmf = csv(&out.join("indegree_limit_pmf.csv"));
    assert_eq!(pmf.columns, ["k", "probability"]);

    ok(&[&["paths"][..], &args].concat());
    let p = csv(&out.join("paths.csv"));
    assert_eq!(
        p.columns,
        ["alpha", "beta", "run", "sum_hops", "mean_hops", "max_hops", "reachable", "unreachable"]
    );
    assert_eq!(cell(&p, 0, "sum_hops"), "10");
    assert_eq!(cell(&p, 0, "max_hops"), "4");
}

#[test]
fn component_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "component", "--alpha", "4", "--beta", "2", "--nodes", "2000", "--runs", "3", "--root",
        "11", "--init-fanout", "10", "--stride", "500", "--out", dir.path().to_str().unwrap(),
    ]);
    let tr = csv(&dir.path().join("component_root11_run000.csv"));
    assert_eq!(tr.columns, ["n", "gamma", "gamma_over_n", "weight_over_n"]);
    let ns: Vec<&str> = tr.rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ns, ["500", "1000", "1500", "2000"]);
    let s = csv(&dir.path().join("component_summary.csv"));
    assert_eq!(s.rows.len(), 3);
    assert_eq!(s.comment("init_fanout"), Some("10"));
}

#[test]
fn gw_output_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "gw", "--alpha", "4", "--beta", "2", "--runs", "500", "--generations", "20", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let t = csv(&dir.path().join("gw.csv"));
    assert_eq!(t.columns, ["generation", "mean_size", "alive_fraction"]);
    assert_eq!(t.rows.len(), 21);
    assert_eq!(cell(&t, 0, "alive_fraction"), "1");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"alpha": 2, "beta": 2, "out": "ignored"}"#).unwrap();
    let out = dir.path().join("o");
    ok(&[
        "fixpoint",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let t = csv(&out.join("fixpoint.csv"));
    assert_eq!(cell(&t, 0, "alpha"), "4");
    assert_eq!(cell(&t, 0, "beta"), "2");
}

#[test]
fn exit_codes() {
    assert_eq!(yapa(&["nonsense"]).status.code(), Some(1));
    assert_eq!(yapa(&["generate", "--beta", "2"]).status.code(), Some(1));
    assert_eq!(yapa(&["generate", "--alpha", "-1", "--beta", "2"]).status.code(), Some(1));
    assert_eq!(yapa(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = yapa(&[
        "generate",
        "--alpha",
        "3",
        "--beta",
        "2",
        "--nodes",
        "10",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sweep_writes_grid_outputs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "sweep", "--alphas", "2,6", "--betas", "2", "--nodes", "3000", "--runs", "4", "--stride",
        "1000", "--out", dir.path().to_str().unwrap(),
    ]);
    let paths = csv(&dir.path().join("sweep_paths.csv"));
    assert_eq!(paths.rows.len(), 2);
    assert_eq!(cell(&paths, 1, "outdegree_two_marker"), "1");
    assert_eq!(cell(&paths, 0, "outdegree_two_marker"), "0");
    let marker = csv(&dir.path().join("sweep_marker.csv"));
    assert_eq!(marker.rows, [["2", "6", "2", "1"]]);
    let comp = csv(&dir.path().join("sweep_component_alpha2_beta2_root1.csv"));
    assert_eq!(comp.columns, ["n", "mean_gamma", "std_gamma", "mean_gamma_over_n", "std_gamma_over_n"]);
    assert_eq!(comp.rows.len(), 3);
    assert_eq!(comp.comment("init_fanout"), Some("10"));
    let surv = csv(&dir.path().join("sweep_survival.csv"));
    assert_eq!(surv.rows.len(), 2);
    let runs = csv(&dir.path().join("sweep_paths_runs.csv"));
    assert_eq!(runs.rows.len(), 8);
}
