//! Dataset preparation, static benchmark and report emission end to end.

use std::fs;

use shs_bench::dataset::{labels_file, GRAPH_FILE};
use shs_bench::report::{csv_text, json_text, markdown_text, parse_csv, read_report, REPORT_JSON_SCHEMA};
use shs_bench::{
    emit_report, load_dataset, prepare_dataset, run_static_benchmark, write_dataset, DatasetSpec, ExperimentConfig,
    Family, Method, PrepareOptions, ReportFormat, ReportRow, Scale, DEFAULT_NODE_CAP, MAJORITY,
};
use shs_core::gnn::TrainConfig;

fn options() -> PrepareOptions {
    PrepareOptions {
        node_cap: DEFAULT_NODE_CAP,
        force: false,
    }
}

fn small_bench() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(Scale::Desk, Family::Sf, 5);
    cfg.train = DatasetSpec::sf(200, 5);
    cfg.tests = vec![DatasetSpec::sf(200, 6), DatasetSpec::er(200, 7)];
    cfg.k_percents = vec![5.0, 10.0];
    cfg.model = TrainConfig {
        epochs: 15,
        hidden: 16,
        layers: 2,
        seed: 5,
        ..TrainConfig::default()
    };
    cfg
}

#[test]
fn prepared_dataset_round_trips_with_stable_hashes() {
    let spec = DatasetSpec::sf(300, 2);
    let data = prepare_dataset(&spec, &[5.0], options()).unwrap();
    assert_eq!(data.labels_for(5.0).unwrap().positives(), 15);

    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = write_dataset(&data, a.path()).unwrap();
    let again = prepare_dataset(&spec, &[5.0], options()).unwrap();
    let second = write_dataset(&again, b.path()).unwrap();
    assert_eq!(first.artifacts.len(), 4);
    assert_eq!(first.artifacts, second.artifacts);

    let loaded = load_dataset(a.path()).unwrap();
    assert_eq!(loaded.graph, data.graph);
    assert_eq!(loaded.bc, data.bc);
    assert_eq!(loaded.features.raw(), data.features.raw());
    assert_eq!(
        loaded.labels_for(5.0).unwrap().labels,
        data.labels_for(5.0).unwrap().labels
    );
}

#[test]
fn tampered_labels_are_rejected() {
    let data = prepare_dataset(&DatasetSpec::er(100, 3), &[10.0], options()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_dataset(&data, dir.path()).unwrap();
    let path = dir.path().join(labels_file(10.0));
    let text = fs::read_to_string(&path).unwrap();
    let flipped: String = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 1 {
                let (head, label) = line.rsplit_once(',').unwrap();
                format!("{head},{}\n", if label == "1" { "0" } else { "1" })
            } else {
                format!("{line}\n")
            }
        })
        .collect();
    fs::write(&path, flipped).unwrap();
    assert!(load_dataset(dir.path()).is_err());
}

#[test]
fn oversized_graph_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(GRAPH_FILE);
    fs::write(&path, "0 1\n1 2\n2 3\n").unwrap();
    let spec = DatasetSpec::EdgeList {
        id: "tiny".into(),
        path: path.clone(),
    };
    let capped = PrepareOptions {
        node_cap: 3,
        force: false,
    };
    assert!(prepare_dataset(&spec, &[50.0], capped).is_err());
    let forced = PrepareOptions { force: true, ..capped };
    let data = prepare_dataset(&spec, &[50.0], forced).unwrap();
    assert_eq!(data.graph.node_count(), 4);
    assert_eq!(data.labels_for(50.0).unwrap().positives(), 2);
}

#[test]
fn static_benchmark_rows_and_outputs() {
    let cfg = small_bench();
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_static_benchmark(&cfg, Some(dir.path())).unwrap();
    // Four methods plus the majority row per (dataset, k).
    assert_eq!(
        outcome.rows.len(),
        cfg.tests.len() * cfg.k_percents.len() * (cfg.methods.len() + 1)
    );
    assert_eq!(outcome.models.len(), 2);

    for row in &outcome.rows {
        assert!((0.0..=1.0).contains(&row.accuracy));
        if row.method == MAJORITY {
            // 200 nodes: 10 or 20 positives, all predicted negative.
            let expected = 1.0 - row.k_percent / 100.0;
            assert!((row.accuracy - expected).abs() < 1e-12);
            assert_eq!(row.recall, 0.0);
        }
        if row.method == Method::Brandes.name() {
            assert_eq!(row.accuracy, 1.0);
        }
        if row.method == Method::Graphshs.name() {
            assert!(row.speedup.is_some());
        }
    }

    for file in [
        "report.csv",
        "report.json",
        "report.md",
        "manifest.json",
        "graphshs_k5.ckpt",
        "loss_k10.csv",
    ] {
        assert!(dir.path().join(file).is_file(), "{file} missing");
    }
    let from_csv: Vec<ReportRow> = read_report(&dir.path().join("report.csv")).unwrap();
    let from_json: Vec<ReportRow> = read_report(&dir.path().join("report.json")).unwrap();
    assert_eq!(from_csv, outcome.rows);
    assert_eq!(from_json, outcome.rows);
    for sub in ["sf-200-s5", "sf-200-s6", "er-200-s7"] {
        assert!(dir.path().join("datasets").join(sub).join("manifest.json").is_file());
    }
}

fn sample_rows() -> Vec<ReportRow> {
    let cfg = ExperimentConfig {
        methods: vec![Method::Closeness, Method::Brandes],
        ..small_bench()
    };
    run_static_benchmark(&cfg, None).unwrap().rows
}

#[test]
fn report_formats() {
    let rows = sample_rows();

    let csv = csv_text(&rows).unwrap();
    let reparsed: Vec<ReportRow> = parse_csv(&csv).unwrap();
    assert_eq!(csv_text(&reparsed).unwrap(), csv);

    let json = json_text(&rows).unwrap();
    let reparsed: Vec<ReportRow> = serde_json::from_str(&json).unwrap();
    assert_eq!(json_text(&reparsed).unwrap(), json);

    let md = markdown_text(&rows);
    assert_eq!(md.lines().count(), rows.len() + 2);
    assert!(md.lines().all(|l| l.starts_with('|') && l.ends_with('|')));

    // Every JSON object carries exactly the keys the schema requires.
    let schema: serde_json::Value = serde_json::from_str(REPORT_JSON_SCHEMA).unwrap();
    let mut required: Vec<&str> = schema["items"]["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    required.sort_unstable();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for object in value.as_array().unwrap() {
        let mut keys: Vec<&str> = object.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, required);
    }

    let dir = tempfile::tempdir().unwrap();
    assert!(emit_report::<ReportRow>(&[], ReportFormat::Csv, &dir.path().join("x.csv")).is_err());
}
