use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tomolens"));
    c.env_remove("TOMOLENS_THREADS");
    c
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path) -> Output {
    bin().arg("run").arg(config).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ECS_TOMOGRAM: &str = r#"
scenario = "tomogram"
output_dir = "out"

[[states]]
family = "ecs"
alpha = 0.7071067811865476

[theta]
start = 0.0
stop = 3.141592653589793
count = 13
"#;

#[test]
fn tomogram_run_writes_csv_plot_data_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ecs.toml", ECS_TOMOGRAM);
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/tomogram_00_ecs_alpha_0.7071067811865476.csv")).unwrap();
    let header: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    let header = header.join("\n");
    assert!(header.contains("nats"));
    assert!(header.contains("variance 1/2"));
    assert!(header.contains("1/2 ln(pi e)"));
    let table: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(table[0].split(',').count(), 14);
    assert_eq!(table.len(), 1 + 2001);
    assert!(dir.path().join("out/tomogram_00_ecs_alpha_0.7071067811865476.dat").exists());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "tomogram");
    assert_eq!(manifest["config"], "ecs.toml");
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert_eq!(artifacts.len(), 2);
    for a in artifacts {
        assert_eq!(a["scenario"], "tomogram");
        assert!(dir.path().join("out").join(a["file"].as_str().unwrap()).exists());
    }
    assert_eq!(manifest["tolerances"]["normalization"], 1e-8);
    assert_eq!(manifest["tolerances"]["tail_mass"], 1e-10);
}

const SWEEP: &str = r#"
scenario = "variance_sweep"
output_dir = "out"

[[states]]
family = "ecs"
alpha = 1.0

[[states]]
family = "pair_coherent"
r = 1.0

[parameter]
start = 0.5
stop = 1.5
count = 5
"#;

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_bit_identical_across_thread_counts() {
    let mut snapshots = Vec::new();
    for threads in ["1", "3", ""] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "sweep.toml", SWEEP);
        let mut cmd = bin();
        if !threads.is_empty() {
            cmd.env("TOMOLENS_THREADS", threads);
        }
        let out = cmd.arg("run").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        snapshots.push(outputs(&dir.path().join("out")));
    }
    let names: Vec<&str> = snapshots[0].iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["manifest.json", "variance_sweep.csv", "variance_sweep_two_mode.csv"]);
    assert_eq!(snapshots[0], snapshots[1]);
    assert_eq!(snapshots[0], snapshots[2]);
}

#[test]
fn empty_range_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let body = SWEEP.replace("count = 5", "count = 0");
    let out = run(&write_config(dir.path(), "c.toml", &body));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("parameter.count"), "{}", stderr(&out));
    assert!(!dir.path().join("out").exists());

    let body = SWEEP.replace("stop = 1.5", "stop = 0.5");
    let out = run(&write_config(dir.path(), "d.toml", &body));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("parameter.stop"), "{}", stderr(&out));
}

#[test]
fn malformed_configs_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (ECS_TOMOGRAM.replace("output_dir", "output_directory"), "output_directory"),
        (ECS_TOMOGRAM.replace("\"ecs\"", "\"unicorn\""), "unicorn"),
        (ECS_TOMOGRAM.replace("\"tomogram\"", "\"hologram\""), "hologram"),
        (ECS_TOMOGRAM.replace("count = 13", "count = 13\nstep = 2"), "step"),
        (format!("{ECS_TOMOGRAM}\n[grid]\nx_min = -5.0\nx_max = 5.0\npoints = 400\n"), "grid.points"),
        (format!("{ECS_TOMOGRAM}\n[tolerances]\noracle = -1.0\n"), "tolerances.oracle"),
        (format!("{ECS_TOMOGRAM}\n[phi]\nvalues = [0.0]\n"), "phi"),
        (
            r#"scenario = "rfp"
output_dir = "out"
[[states]]
family = "ecs"
alpha = 1.0
"#
            .to_string(),
            "states",
        ),
        (
            r#"scenario = "decoherence_run"
output_dir = "out"
[[states]]
family = "pair_coherent"
r = 1.0
[times]
values = [0.0, 1.0]
"#
            .to_string(),
            "channel",
        ),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let out = run(&write_config(dir.path(), &format!("bad{i}.toml"), body));
        assert_eq!(out.status.code(), Some(1), "case {i}: {}", stderr(&out));
        assert!(stderr(&out).contains(field), "case {i}: {}", stderr(&out));
    }
    let out = run(&dir.path().join("missing.toml"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_guards_exit_2_naming_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let narrow = format!("{ECS_TOMOGRAM}\n[grid]\nx_min = -1.0\nx_max = 3.0\npoints = 401\n");
    let out = run(&write_config(dir.path(), "narrow.toml", &narrow));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("states[0] ecs(alpha=0.7071067811865476)"), "{err}");
    assert!(err.contains("grid too narrow"), "{err}");

    let cut = r#"
scenario = "entropy_sweep"
output_dir = "out"

[[states]]
family = "coherent"
alpha = 1.0
n_cut = 24

[parameter]
values = [0.5, 1.0, 2.0, 3.0]
"#;
    let out = run(&write_config(dir.path(), "cut.toml", cut));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("coherent(alpha=2) at parameter 2"), "{err}");
    assert!(err.contains("truncation overflow"), "{err}");
}

#[test]
fn thread_cap_must_be_a_positive_integer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ecs.toml", ECS_TOMOGRAM);
    for bad in ["0", "many", "-2"] {
        let out = bin().env("TOMOLENS_THREADS", bad).arg("run").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{bad}");
        assert!(stderr(&out).contains("TOMOLENS_THREADS"));
    }
}

#[test]
fn oracle_audit_reports_every_state_and_flags_tight_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
scenario = "oracle_audit"
output_dir = "out"

[[states]]
family = "yuen"
xi = 0.4

[[states]]
family = "caves_schumaker"
r = 0.5
"#;
    let out = run(&write_config(dir.path(), "oracle.toml", body));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/oracle_audit.csv")).unwrap();
    // k + l <= 4 gives 15 rows
    assert_eq!(csv.lines().filter(|l| l.starts_with("yuen")).count(), 15);
    assert!(csv.lines().filter(|l| l.starts_with("yuen")).all(|l| l.ends_with(",true")));
    let two = fs::read_to_string(dir.path().join("out/oracle_audit_two_mode.csv")).unwrap();
    assert_eq!(two.lines().filter(|l| l.starts_with("caves")).count(), 36);

    let strict = format!("{body}\n[tolerances]\noracle = 1e-30\n");
    let out = run(&write_config(dir.path(), "strict.toml", &strict));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("states[0] yuen(xi=0.4), (k, l) = "), "{}", stderr(&out));
    // the artifacts are still written for inspection
    assert!(dir.path().join("out/manifest.json").exists());
}

#[test]
fn audit_passes_on_the_default_battery() {
    let out = bin().arg("audit").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains(", 0 failed"));
    for check in ["normalization", "pi-shift", "entropic uncertainty", "heisenberg", "oracle equivalence",
        "block unitarity", "trace preservation"] {
        assert!(table.contains(check), "{check}");
    }
}

/// Every shipped example config runs cleanly.
#[test]
fn example_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    let mut entries: Vec<_> = fs::read_dir(&configs).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let dir = tempfile::tempdir().unwrap();
        let body = fs::read_to_string(&path).unwrap();
        let body: String = body
            .lines()
            .map(|l| if l.starts_with("output_dir") { "output_dir = \"out\"" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let out = run(&write_config(dir.path(), "c.toml", &body));
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), stderr(&out));
        assert!(dir.path().join("out/manifest.json").exists());
        seen += 1;
    }
    assert!(seen >= 8);
}
