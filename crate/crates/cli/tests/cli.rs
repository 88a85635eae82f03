use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn seqlocate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqlocate"))
        .args(args)
        .env_remove("SEQLOCATE_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_line(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).lines().next().unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn md_and_smd_on_c4() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = write(dir.path(), "c4.txt", "4 4\n0 1\n1 2\n2 3\n3 0\n");

    let md = seqlocate(&["md", "--in", &c4, "--exact-cap", "4"]);
    assert!(md.status.success());
    assert_eq!(json_line(&md)["md_exact"], 2);

    for mode in ["exact", "maxgain-worst", "maxgain-greedy"] {
        let out = seqlocate(&["smd", "--in", &c4, "--mode", mode]);
        assert!(out.status.success(), "{mode}");
        assert_eq!(json_line(&out)["steps"], 2, "{mode}");
    }
}

#[test]
fn game_transcript_lines() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = write(dir.path(), "c4.txt", "4 4\n0 1\n1 2\n2 3\n3 0\n");
    let out = seqlocate(&["game", "--in", &c4, "--target", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{\"step\":1,\"query\":0,\"answer\":2,\"candidates\":1}\n");
}

#[test]
fn gen_is_reproducible_and_reports_seed() {
    let a = seqlocate(&["gen", "--n", "40", "--p", "0.2", "--seed", "9"]);
    let b = seqlocate(&["gen", "--n", "40", "--p", "0.2", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("40 "));
    assert_eq!(String::from_utf8_lossy(&a.stderr).trim(), "seed: 9");

    let unseeded = seqlocate(&["gen", "--n", "10", "--p", "0.5"]);
    assert!(String::from_utf8_lossy(&unseeded.stderr).starts_with("seed: "));
}

#[test]
fn params_json() {
    let out = seqlocate(&["params", "--n", "5000", "--p", "0.02"]);
    assert!(out.status.success());
    let v = json_line(&out);
    assert_eq!(v["parameters"]["i"], 1);
    assert_eq!(v["parameters"]["c"], 2.0);
    assert!((v["bounds"]["smd_upper"].as_f64().unwrap() - 50.5).abs() < 0.1);
}

#[test]
fn matrix_commands() {
    let dir = tempfile::tempdir().unwrap();
    let identity = write(dir.path(), "id.txt", "3 3\n100\n010\n001\n");
    let qc = seqlocate(&["matrix", "qc", "--in", &identity, "--exact-cap", "3"]);
    assert_eq!(json_line(&qc)["qc_exact"], 2);
    let sqc = seqlocate(&["matrix", "sqc", "--in", &identity]);
    assert_eq!(json_line(&sqc)["steps"], 2);

    let threshold = seqlocate(&["matrix", "threshold", "--n", "1024", "--q", "0.5"]);
    assert_eq!(json_line(&threshold)["m_hat"], 20.0);

    let twins = write(dir.path(), "twins.txt", "2 3\n110\n001\n");
    let stats = seqlocate(&["matrix", "stats", "--in", &twins]);
    assert_eq!(json_line(&stats)["x_pairs"], 1);
    let undefined = seqlocate(&["matrix", "sqc", "--in", &twins]);
    assert_eq!(undefined.status.code(), Some(3));
}

#[test]
fn exit_codes_and_error_objects() {
    let dir = tempfile::tempdir().unwrap();
    let disconnected = write(dir.path(), "d.txt", "4 1\n0 1\n");
    let out = seqlocate(&["smd", "--in", &disconnected]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "disconnected");

    let bad = write(dir.path(), "bad.txt", "3 2\n0 1\n");
    let out = seqlocate(&["md", "--in", &bad]);
    assert_eq!(out.status.code(), Some(3));

    let missing = seqlocate(&["md", "--in", "/nonexistent/graph.txt"]);
    assert_eq!(missing.status.code(), Some(1));

    assert_eq!(seqlocate(&["params", "--n", "ten"]).status.code(), Some(2));
}

#[test]
fn sweep_output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "cfg.json",
        r#"{"kind":"MD_SMD_SWEEP","n_values":[40,60],"p_or_q":[0.3],"trials":3,"base_seed":5}"#,
    );
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let csv = dir.path().join(format!("out{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_seqlocate"))
            .args(["sweep", "--config", &config, "--out", csv.to_str().unwrap()])
            .env("SEQLOCATE_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            fs::read(&csv).unwrap(),
            fs::read(dir.path().join(format!("out{threads}.summary.csv"))).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(String::from_utf8_lossy(&outputs[0].0).lines().count(), 7);

    let bad = write(dir.path(), "bad.json", r#"{"kind":"MD_SMD_SWEEP"}"#);
    assert_eq!(seqlocate(&["sweep", "--config", &bad]).status.code(), Some(3));
}
