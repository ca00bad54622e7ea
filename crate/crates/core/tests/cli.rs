use std::path::Path;
use std::process::{Command, Output};

use qcoherence::report::{LoadedState, StateFile};

fn qcoherence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoherence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let mut full = vec!["gen", name];
    full.extend_from_slice(args);
    let out = qcoherence(&full);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn gen_output_parses_back_exactly() {
    for args in [
        vec!["psi1"],
        vec!["psi2"],
        vec!["psi3"],
        vec!["mcs", "3"],
        vec!["mixed", "4"],
        vec!["haar", "3", "7"],
        vec!["ginibre", "4", "2", "5"],
    ] {
        let mut full = vec!["gen"];
        full.extend_from_slice(&args);
        let out = qcoherence(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let file = StateFile::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        let expected = qcoherence::report::canonical::named_state(
            args[0],
            &args[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        )
        .unwrap();
        for (row, erow) in file.matrix.iter().zip(&expected.matrix) {
            for (z, e) in row.iter().zip(erow) {
                assert!((z[0] - e[0]).abs() <= 1e-12 && (z[1] - e[1]).abs() <= 1e-12);
            }
        }
        file.to_state().unwrap();
    }
}

#[test]
fn gen_mcs2_is_plus_projector() {
    let out = qcoherence(&["gen", "mcs", "2"]);
    let file = StateFile::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(file.dims, vec![2]);
    match file.to_state().unwrap() {
        LoadedState::Single(rho) => {
            assert!(rho.matrix().iter().all(|z| (z.re - 0.5).abs() < 1e-15))
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_state_exits_2() {
    assert_eq!(qcoherence(&["gen", "psi9"]).status.code(), Some(2));
    assert_eq!(qcoherence(&["gen", "mcs"]).status.code(), Some(2));
}

#[test]
fn measure_canonical_states() {
    let dir = tempfile::tempdir().unwrap();
    let psi1 = gen_to(dir.path(), "psi1", &[]);
    let out = qcoherence(&["measure", &psi1, "--dims", "2", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["c_re"].as_f64().unwrap() - 2.0).abs() <= 1e-9);
    assert_eq!(v["units"], "bits");

    let psi3 = gen_to(dir.path(), "psi3", &[]);
    let v = json(&qcoherence(&["measure", &psi3, "--dims", "2", "2"]));
    let b = &v["bipartite"];
    assert!(b["discord"].as_f64().unwrap().abs() <= 1e-6);
    assert!(b["deficit"].as_f64().unwrap().abs() <= 1e-6);
    assert!((b["coherence_a"].as_f64().unwrap() - 1.0).abs() <= 1e-9);

    let psi2 = gen_to(dir.path(), "psi2", &[]);
    let v = json(&qcoherence(&["measure", &psi2]));
    let b = &v["bipartite"];
    assert!((b["discord"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!((b["deficit"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!(b["residual_thm2"].as_f64().unwrap().abs() <= 1e-6);
    assert_eq!(v["converged"], true);
}

#[test]
fn measure_single_system_with_basis_file() {
    let dir = tempfile::tempdir().unwrap();
    let plus = gen_to(dir.path(), "mcs", &["2"]);
    let basis = dir.path().join("pm.json");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(
        &basis,
        format!(r#"{{"vectors": [[[{s},0],[{s},0]], [[{s},0],[-{s},0]]]}}"#),
    )
    .unwrap();
    let v = json(&qcoherence(&["measure", &plus]));
    assert!((v["c_re"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert!(v.get("bipartite").is_none());
    let v = json(&qcoherence(&[
        "measure",
        &plus,
        "--basis-file",
        basis.to_str().unwrap(),
    ]));
    assert_eq!(v["basis"], "file");
    assert!(v["c_re"].as_f64().unwrap().abs() <= 1e-9);
}

#[test]
fn invalid_state_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"dims":[2],"matrix":[[[0.7,0],[0,0]],[[0,0],[0.4,0]]]}"#,
    )
    .unwrap();
    assert_eq!(
        qcoherence(&["measure", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        qcoherence(&["measure", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let psi2 = gen_to(dir.path(), "psi2", &[]);
    assert_eq!(
        qcoherence(&["measure", &psi2, "--dims", "3", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn flag_errors_exit_2() {
    assert_eq!(qcoherence(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        qcoherence(&["verify", "superadd", "--samples", "3", "--dims", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcoherence(&["verify", "uncertainty", "--samples", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcoherence(&["verify", "uncertainty", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_writes_rows_and_summary_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = qcoherence(&[
            "verify",
            "tradeoff1",
            "--samples",
            "200",
            "--dims",
            "2",
            "2",
            "--seed",
            "9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "sample_index");
    assert_eq!(&headers[1], "seed");
    assert_eq!(&headers[2], "residual");
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 200);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), k);
        assert_eq!(row[1].parse::<u64>().unwrap(), 9 + k as u64);
        assert!(row[2].parse::<f64>().unwrap().abs() <= 1e-8);
    }
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("a.csv.summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["check"], "tradeoff1");
    assert_eq!(summary["samples"], 200);
    assert_eq!(summary["violations"], 0);
}

#[test]
fn verify_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("u.json");
    let out = qcoherence(&[
        "verify",
        "uncertainty",
        "--samples",
        "20",
        "--dims",
        "3",
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 20);
    assert!(rows[0]["gap"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn violations_exit_4_and_thm2_always_exits_0() {
    assert_eq!(
        qcoherence(&["verify", "tradeoff3", "--samples", "5", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    // identity residuals are round-off, never all exactly zero, so a zero tolerance flags some
    let out = qcoherence(&["verify", "tradeoff1", "--samples", "50", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(4));
    let out = qcoherence(&["verify", "thm1-pure", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = qcoherence(&[
        "verify",
        "thm2",
        "--samples",
        "5",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("t.csv.summary.json")).unwrap(),
    )
    .unwrap();
    let dumped = summary["counterexamples"]
        .as_array()
        .map(|a| a.len())
        .unwrap_or(0);
    assert_eq!(dumped as u64, summary["violations"].as_u64().unwrap());
    for p in summary["counterexamples"].as_array().into_iter().flatten() {
        StateFile::load(Path::new(p.as_str().unwrap()))
            .unwrap()
            .to_state()
            .unwrap();
    }
}

#[test]
fn measure_flags_non_convergence() {
    use qcoherence::report::measure;
    use qcoherence::{sampler, BipartiteState, OptimizerConfig};
    let s = BipartiteState::new(sampler::ginibre_density(4, 4, 3).unwrap(), (2, 2)).unwrap();
    let cfg = OptimizerConfig {
        max_iters: 1,
        ..OptimizerConfig::default()
    };
    let record = measure(&LoadedState::Bipartite(s), None, None, &cfg).unwrap();
    assert!(!record.converged);
    assert!(record.bipartite.unwrap().thm2.discord.is_finite());
}
