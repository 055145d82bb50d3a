//! End-to-end checks of the `sncut` binary: flag handling, config merging,
//! file wiring, and the JSON error contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sncut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sncut"))
        .args(args)
        .output()
        .expect("spawning the sncut binary")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed: status {:?}\nstderr: {}",
        out.status.code(),
        stderr_str(out)
    );
}

/// Failures must exit nonzero and leave exactly one JSON object line on
/// stderr; returns the parsed object.
fn assert_json_error(out: &Output, expected_kind: &str) -> serde_json::Value {
    assert!(!out.status.success(), "expected a failure exit");
    let err = stderr_str(out);
    let line = err
        .lines()
        .last()
        .unwrap_or_else(|| panic!("empty stderr, expected a JSON error line"));
    let v: serde_json::Value =
        serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr not JSON ({e}): {line}"));
    assert_eq!(
        v["error"].as_str(),
        Some(expected_kind),
        "unexpected error kind in {v}"
    );
    assert!(
        v["message"].as_str().is_some_and(|m| !m.is_empty()),
        "missing message in {v}"
    );
    v
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp path is utf-8")
}

/// Two words one unit apart in one dimension; with `sigma = 1` the single
/// kernel edge is exactly `exp(-1)`.
fn write_two_point_embeddings(dir: &Path) -> PathBuf {
    let p = dir.join("pair.emb");
    fs::write(&p, "left 0.0\nright 1.0\n").unwrap();
    p
}

/// Twelve words in three well-separated groups of four. Within-group
/// squared distances stay below 1; cross-group ones exceed 90.
fn write_grouped_embeddings(dir: &Path) -> PathBuf {
    let mut text = String::new();
    let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
    for (gi, prefix) in ["a", "b", "c"].iter().enumerate() {
        let (cx, cy) = centers[gi];
        for m in 0..4 {
            let dx = 0.1 * m as f64;
            let dy = 0.05 * (3 - m) as f64;
            text.push_str(&format!("{prefix}{m} {} {}\n", cx + dx, cy + dy));
        }
    }
    let p = dir.join("groups.emb");
    fs::write(&p, text).unwrap();
    p
}

fn write_grouped_thesaurus(dir: &Path) -> PathBuf {
    let mut text = String::new();
    for prefix in ["a", "b", "c"] {
        for m in 0..3 {
            text.push_str(&format!("{prefix}{m}\t{prefix}{}\tsyn\n", m + 1));
        }
    }
    text.push_str("a0\tb0\tant\n");
    text.push_str("a1\tb1\tant\n");
    text.push_str("a0\tc0\tant\n");
    text.push_str("b0\tc0\tant\n");
    let p = dir.join("groups.thes.tsv");
    fs::write(&p, text).unwrap();
    p
}

fn write_grouped_gold(dir: &Path) -> PathBuf {
    let mut text = String::new();
    for prefix in ["a", "b", "c"] {
        for m in 0..4 {
            text.push_str(&format!("{prefix}{m}\t{}\n", prefix.to_uppercase()));
        }
    }
    let p = dir.join("groups.gold.tsv");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn build_graph_writes_exact_kernel_edge_and_labels_sidecar() {
    let dir = TempDir::new().unwrap();
    let emb = write_two_point_embeddings(dir.path());
    let graph = dir.path().join("pair.el");
    let out = sncut(&[
        "build-graph",
        "--embeddings",
        path_str(&emb),
        "--sigma",
        "1.0",
        "--output",
        path_str(&graph),
    ]);
    assert_ok(&out, "build-graph");

    let expected_w = (-1.0f64).exp();
    let expected = format!("n 2\n0 1 {expected_w}\n");
    assert_eq!(fs::read_to_string(&graph).unwrap(), expected);
    let labels = fs::read_to_string(dir.path().join("pair.el.labels")).unwrap();
    assert_eq!(labels, "left\nright\n");

    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["vocab_size"], 2);
    assert_eq!(report["dim"], 1);
    assert_eq!(report["kernel_edges"], 1);
    assert_eq!(report["edges"], 1);
    assert_eq!(report["negative_edges"], 0);
}

#[test]
fn build_graph_requires_an_output_path() {
    let dir = TempDir::new().unwrap();
    let emb = write_two_point_embeddings(dir.path());
    let out = sncut(&["build-graph", "--embeddings", path_str(&emb)]);
    let v = assert_json_error(&out, "bad_parameter");
    assert!(v["message"].as_str().unwrap().contains("--output"));
}

#[test]
fn parameter_validation_precedes_input_io() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("does-not-exist.emb");
    let graph = dir.path().join("g.el");
    let out = sncut(&[
        "build-graph",
        "--embeddings",
        path_str(&missing),
        "--sigma=-1.0",
        "--output",
        path_str(&graph),
    ]);
    // The sigma complaint, not a file-not-found error, proves parameters
    // are checked before any input is opened.
    let v = assert_json_error(&out, "bad_parameter");
    assert!(v["message"].as_str().unwrap().contains("sigma"));
    assert!(!graph.exists());
}

#[test]
fn missing_graph_file_reports_io_error_as_json() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.el");
    let out = sncut(&["cluster", "--graph", path_str(&missing), "-k", "2"]);
    assert_json_error(&out, "io");
}

#[test]
fn cluster_requires_a_cluster_count() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.el");
    fs::write(&graph, "n 2\n0 1 1.0\n").unwrap();
    let out = sncut(&["cluster", "--graph", path_str(&graph)]);
    let v = assert_json_error(&out, "bad_parameter");
    assert!(v["message"].as_str().unwrap().contains("required"));
}

#[test]
fn jobs_zero_is_rejected() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.el");
    fs::write(&graph, "n 2\n0 1 1.0\n").unwrap();
    let out = sncut(&["--jobs", "0", "spectrum", "--graph", path_str(&graph)]);
    let v = assert_json_error(&out, "bad_parameter");
    assert!(v["message"].as_str().unwrap().contains("at least 1"));
}

#[test]
fn cluster_picks_up_labels_sidecar_and_reports_metrics() {
    let dir = TempDir::new().unwrap();
    let emb = write_grouped_embeddings(dir.path());
    let graph = dir.path().join("groups.el");
    let out = sncut(&[
        "build-graph",
        "--embeddings",
        path_str(&emb),
        "--sigma",
        "20.0",
        "--output",
        path_str(&graph),
    ]);
    assert_ok(&out, "build-graph");

    let part = dir.path().join("part.tsv");
    let report = dir.path().join("report.json");
    let out = sncut(&[
        "--seed",
        "7",
        "cluster",
        "--graph",
        path_str(&graph),
        "-k",
        "3",
        "--output",
        path_str(&part),
        "--report",
        path_str(&report),
    ]);
    assert_ok(&out, "cluster");

    // Partition rows carry the sidecar words, in node order.
    let sidecar: Vec<String> = fs::read_to_string(dir.path().join("groups.el.labels"))
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    let rows: Vec<String> = fs::read_to_string(&part)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(rows.len(), sidecar.len());
    for (row, word) in rows.iter().zip(&sidecar) {
        let (w, c) = row.split_once('\t').expect("label<TAB>cluster");
        assert_eq!(w, word);
        let c: usize = c.parse().unwrap();
        assert!(c < 3);
    }
    // The three planted groups are far apart, so each lands in one cluster.
    let cluster_of = |w: &str| {
        rows.iter()
            .find(|r| r.starts_with(&format!("{w}\t")))
            .and_then(|r| r.split('\t').nth(1))
            .unwrap()
            .to_string()
    };
    for prefix in ["a", "b", "c"] {
        let first = cluster_of(&format!("{prefix}0"));
        for m in 1..4 {
            assert_eq!(cluster_of(&format!("{prefix}{m}")), first);
        }
    }

    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let sncut_value = rep["sncut"].as_f64().unwrap();
    assert!(sncut_value.is_finite() && sncut_value >= -1e-12);
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let emb = write_two_point_embeddings(dir.path());
    let run = |extra: &[&str], name: &str| -> Vec<u8> {
        let graph = dir.path().join(name);
        let mut args = vec!["build-graph", "--embeddings", path_str(&emb)];
        args.extend_from_slice(extra);
        let graph_s = graph.to_str().unwrap().to_string();
        args.push("--output");
        args.push(&graph_s);
        let out = sncut(&args);
        assert_ok(&out, "build-graph");
        fs::read(&graph).unwrap()
    };

    let config = dir.path().join("run.conf");
    fs::write(&config, "# bandwidth for the pair fixture\nsigma = 2.0\n").unwrap();
    let config_s = path_str(&config).to_string();

    let by_flag = run(&["--sigma", "2.0"], "flag.el");
    let by_config = run(&["--config", &config_s], "config.el");
    assert_eq!(by_flag, by_config, "config value should match the flag");

    let overridden = run(&["--config", &config_s, "--sigma", "1.0"], "override.el");
    let narrow = run(&["--sigma", "1.0"], "narrow.el");
    assert_eq!(overridden, narrow, "flags must override the config");
    assert_ne!(overridden, by_config);
}

#[test]
fn config_supplies_the_cluster_count() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.el");
    let out = sncut(&[
        "--seed",
        "3",
        "synth",
        "--n",
        "24",
        "-k",
        "2",
        "--output",
        path_str(&graph),
    ]);
    assert_ok(&out, "synth");
    let config = dir.path().join("run.conf");
    fs::write(&config, "k = 2\n").unwrap();
    let part = dir.path().join("part.tsv");
    let out = sncut(&[
        "--config",
        path_str(&config),
        "cluster",
        "--graph",
        path_str(&graph),
        "--output",
        path_str(&part),
    ]);
    assert_ok(&out, "cluster with config k");
    let text = fs::read_to_string(&part).unwrap();
    assert_eq!(text.lines().count(), 24);
}

#[test]
fn malformed_config_line_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "sigma\n").unwrap();
    let graph = dir.path().join("g.el");
    fs::write(&graph, "n 2\n0 1 1.0\n").unwrap();
    let out = sncut(&[
        "--config",
        path_str(&config),
        "spectrum",
        "--graph",
        path_str(&graph),
    ]);
    let v = assert_json_error(&out, "parse");
    assert!(v["message"].as_str().unwrap().contains("key = value"));
}

#[test]
fn evaluate_joins_partition_rows_by_label() {
    let dir = TempDir::new().unwrap();
    let emb = write_grouped_embeddings(dir.path());
    let thes = write_grouped_thesaurus(dir.path());
    let gold = write_grouped_gold(dir.path());
    let graph = dir.path().join("groups.el");
    let out = sncut(&[
        "build-graph",
        "--embeddings",
        path_str(&emb),
        "--thesaurus",
        path_str(&thes),
        "--sigma",
        "20.0",
        "--output",
        path_str(&graph),
    ]);
    assert_ok(&out, "build-graph");
    let part = dir.path().join("part.tsv");
    let out = sncut(&[
        "--seed",
        "5",
        "cluster",
        "--graph",
        path_str(&graph),
        "-k",
        "3",
        "--output",
        path_str(&part),
    ]);
    assert_ok(&out, "cluster");

    let evaluate = |partition: &Path, name: &str| -> Vec<u8> {
        let result = dir.path().join(name);
        let out = sncut(&[
            "evaluate",
            "--graph",
            path_str(&graph),
            "--partition",
            path_str(partition),
            "--thesaurus",
            path_str(&thes),
            "--gold",
            path_str(&gold),
            "--output",
            path_str(&result),
        ]);
        assert_ok(&out, "evaluate");
        fs::read(&result).unwrap()
    };

    let in_order = evaluate(&part, "eval_a.json");

    // The same rows in reverse order must evaluate identically: the join
    // goes through labels, not line positions.
    let mut rows: Vec<String> = fs::read_to_string(&part)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    rows.reverse();
    let reversed = dir.path().join("part_rev.tsv");
    fs::write(&reversed, rows.join("\n") + "\n").unwrap();
    assert_eq!(evaluate(&reversed, "eval_b.json"), in_order);

    let rep: serde_json::Value = serde_json::from_slice(&in_order).unwrap();
    assert!(rep["sncut"].as_f64().unwrap().is_finite());
    assert!(rep["purity"].as_f64().unwrap() > 0.9);
    assert_eq!(rep["nne"].as_u64(), Some(0));

    // A row naming an unknown word breaks the join.
    let mut bad_rows: Vec<String> = fs::read_to_string(&part)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    bad_rows[0] = format!("zz{}", bad_rows[0]);
    let bad = dir.path().join("part_bad.tsv");
    fs::write(&bad, bad_rows.join("\n") + "\n").unwrap();
    let result = dir.path().join("eval_bad.json");
    let out = sncut(&[
        "evaluate",
        "--graph",
        path_str(&graph),
        "--partition",
        path_str(&bad),
        "--thesaurus",
        path_str(&thes),
        "--output",
        path_str(&result),
    ]);
    let v = assert_json_error(&out, "bad_parameter");
    assert!(v["message"].as_str().unwrap().contains("missing"));
}

#[test]
fn grid_search_emits_ranked_csv() {
    let dir = TempDir::new().unwrap();
    let emb = write_grouped_embeddings(dir.path());
    let thes = write_grouped_thesaurus(dir.path());
    let gold = write_grouped_gold(dir.path());
    let csv = dir.path().join("grid.csv");
    let out = sncut(&[
        "--seed",
        "2",
        "grid-search",
        "--embeddings",
        path_str(&emb),
        "--thesaurus",
        path_str(&thes),
        "--gold",
        path_str(&gold),
        "--sigma",
        "20,40",
        "-k",
        "2,3",
        "--output",
        path_str(&csv),
    ]);
    assert_ok(&out, "grid-search");

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("sigma,thresh,K,gamma,beta,beta_ant,error,purity,entropy,nne,ndc,sncut")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4, "2 sigmas x 2 cluster counts");
    let mut last_error = f64::NEG_INFINITY;
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 12, "row {row:?}");
        let error: f64 = fields[6].parse().unwrap();
        assert!(error >= last_error, "rows must be sorted by error");
        last_error = error;
        let purity: f64 = fields[7].parse().unwrap();
        assert!((0.0..=1.0).contains(&purity));
        let _nne: usize = fields[9].parse().unwrap();
        let _ndc: usize = fields[10].parse().unwrap();
    }
    // Separating the three far-apart groups at K = 3 leaves no thesaurus
    // violations, so the best row has error 0 at K = 3.
    let best: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(best[2], "3");
    assert_eq!(best[6].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn synth_writes_graph_truth_and_curve() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("planted.el");
    let curve = dir.path().join("curve.csv");
    let out = sncut(&[
        "--seed",
        "11",
        "synth",
        "--n",
        "30",
        "-k",
        "3",
        "--curve",
        "2,3,4",
        "--curve-out",
        path_str(&curve),
        "--output",
        path_str(&graph),
    ]);
    assert_ok(&out, "synth");

    let summary: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(summary["n"], 30);
    assert_eq!(summary["k"], 3);
    assert!(summary["edges"].as_u64().unwrap() > 0);

    let graph_text = fs::read_to_string(&graph).unwrap();
    assert!(graph_text.starts_with("n 30\n"));
    let truth = fs::read_to_string(dir.path().join("planted.el.truth.tsv")).unwrap();
    assert_eq!(truth.lines().count(), 30);
    let labels = fs::read_to_string(dir.path().join("planted.el.labels")).unwrap();
    assert_eq!(labels.lines().count(), 30);

    let curve_text = fs::read_to_string(&curve).unwrap();
    let lines: Vec<&str> = curve_text.lines().collect();
    assert_eq!(lines[0], "K,nne,ndc");
    assert_eq!(lines.len(), 4);
    for (row, k) in lines[1..].iter().zip([2usize, 3, 4]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), k);
    }
}

#[test]
fn synth_seed_changes_the_sample() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for seed in ["1", "2"] {
        let graph = dir.path().join(format!("g{seed}.el"));
        let out = sncut(&[
            "--seed",
            seed,
            "synth",
            "--n",
            "40",
            "-k",
            "2",
            "--output",
            path_str(&graph),
        ]);
        assert_ok(&out, "synth");
        outputs.push(fs::read(&graph).unwrap());
    }
    assert_ne!(outputs[0], outputs[1]);
}

#[test]
fn spectrum_lists_the_smallest_eigenvalues_in_order() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.el");
    let out = sncut(&[
        "--seed",
        "9",
        "synth",
        "--n",
        "20",
        "-k",
        "2",
        "--output",
        path_str(&graph),
    ]);
    assert_ok(&out, "synth");
    let csv = dir.path().join("spec.csv");
    let out = sncut(&[
        "spectrum",
        "--graph",
        path_str(&graph),
        "-k",
        "5",
        "--output",
        path_str(&csv),
    ]);
    assert_ok(&out, "spectrum");

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue"));
    let mut prev = f64::NEG_INFINITY;
    let mut count = 0;
    for (i, row) in lines.enumerate() {
        let (idx, val) = row.split_once(',').unwrap();
        assert_eq!(idx.parse::<usize>().unwrap(), i);
        let v: f64 = val.parse().unwrap();
        // The normalized operator's spectrum sits in [0, 2].
        assert!(v >= -1e-9 && v <= 2.0 + 1e-9, "eigenvalue {v} out of range");
        assert!(v >= prev, "eigenvalues must ascend");
        prev = v;
        count += 1;
    }
    assert_eq!(count, 5);
}
