use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use maxcon::analysis::AnalysisReport;
use maxcon::experiment::{cmd_sweep, load_spec, RunSummary, SweepParameter, SweepValue};

fn maxcon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxcon")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = maxcon(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn sorted_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_outputs_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["run", "--spec", "fig6b", "--out", dir.to_str().unwrap(), "--replicas", "3"]);
    }
    let files = sorted_files(&a);
    assert_eq!(
        files,
        ["graph.txt", "report.json", "spec.toml", "summary.json", "trace_r000.csv", "trace_r001.csv", "trace_r002.csv"]
    );
    for f in &files {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs between reruns");
    }

    let summary: RunSummary = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!((summary.nodes, summary.replicas, summary.iterations), (75, 3, 1000));
    assert!((summary.gamma_linear.unwrap() - 5.623413251903491).abs() < 1e-12);
    let report: AnalysisReport = serde_json::from_str(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.step_constant, 12.0);
    assert_eq!(report.shift, report.theta0_proxy);

    let trace = fs::read_to_string(a.join("trace_r000.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iteration,node_id,state,estimate"));
    assert_eq!(lines.count(), 1001 * 75);

    // The saved spec reproduces the run.
    let c = tmp.path().join("c");
    ok(&["run", "--spec", a.join("spec.toml").to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(fs::read(a.join("trace_r002.csv")).unwrap(), fs::read(c.join("trace_r002.csv")).unwrap());
}

#[test]
fn seed_override_changes_noise_only() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["run", "--spec", "fig5", "--out", a.to_str().unwrap(), "--replicas", "1"]);
    ok(&["run", "--spec", "fig5", "--out", b.to_str().unwrap(), "--replicas", "1", "--seed", "77"]);
    assert_eq!(fs::read(a.join("graph.txt")).unwrap(), fs::read(b.join("graph.txt")).unwrap());
    assert_ne!(fs::read(a.join("trace_r000.csv")).unwrap(), fs::read(b.join("trace_r000.csv")).unwrap());
    let first = |dir: &Path| fs::read_to_string(dir.join("trace_r000.csv")).unwrap().lines().take(76).collect::<Vec<_>>().join("\n");
    assert_eq!(first(&a), first(&b), "initial states must not depend on the noise seed");
}

#[test]
fn custom_spec_with_edge_list() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("ring.txt"), "# five-node ring\n5\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let spec = r#"
name = "ring"
iterations = 50
replicas = 2
noise_seed = 1

[graph]
kind = "edge_list"
path = "ring.txt"

[measurements]
kind = "values"
values = [0.1, 0.7, 0.3, 0.2, 0.5]

[consensus]
algorithm = "nonlinear"
beta = 3.0
noise_variance = 0.1
step = "optimal"

[function]
family = "exponential"
gamma = 2.0
q = 1.0
"#;
    let path = tmp.path().join("ring.toml");
    fs::write(&path, spec).unwrap();
    let out = tmp.path().join("out");
    let stdout = ok(&["run", "--spec", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let summary: RunSummary = serde_json::from_str(&stdout).unwrap();
    assert_eq!((summary.nodes, summary.edges, summary.x_max), (5, 5, 0.7));

    let analysis = ok(&["analyze", "--spec", path.to_str().unwrap()]);
    let report: AnalysisReport = serde_json::from_str(&analysis).unwrap();
    assert_eq!(report.step_constant, report.a_star);
    assert_eq!(report.gamma_linear, 2.0);
}

#[test]
fn sweep_writes_long_and_summary_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let stdout = ok(&[
        "sweep", "--spec", "fig6a", "--out", out.to_str().unwrap(), "--replicas", "2", "--parameter", "T", "--values",
        "0,mean",
    ]);
    assert_eq!(stdout.lines().count(), 2);
    let long = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(long.starts_with("parameter,value,replica,iteration,estimate,error,spread\n"));
    assert_eq!(long.lines().count(), 1 + 2 * 2 * 1001);
    let summary = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    // Same numbers through the library.
    let mut spec = load_spec("fig6a").unwrap();
    spec.replicas = 2;
    let r = cmd_sweep(&spec, SweepParameter::T, &[SweepValue::Number(0.0), SweepValue::Mean], None).unwrap();
    assert_eq!(r.rows.len(), 2 * 2 * 1001);
    assert!(r.summary[1].median_settle_iteration.is_some());
    assert_eq!(r.summary[1].shift, Some(spec.resolve().unwrap().measurements.values().iter().map(|v| (7.0 * v).exp()).sum::<f64>() / 75.0));
}

#[test]
fn errors_exit_nonzero() {
    let out = maxcon(&["run", "--spec", "no-such-thing"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("neither a spec file nor a preset"));

    let out = maxcon(&["analyze", "--spec", "fig3-naive-divergence"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonlinear"));

    let out = maxcon(&["sweep", "--spec", "fig6a", "--parameter", "beta", "--values", "mean"]);
    assert!(!out.status.success());

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\niterations = 5\n").unwrap();
    let out = maxcon(&["run", "--spec", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("spec"));
}

#[test]
fn presets_listed() {
    let stdout = ok(&["presets"]);
    for name in ["fig3-naive-divergence", "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "noise-free", "min-consensus"] {
        assert!(stdout.contains(name));
    }
}
