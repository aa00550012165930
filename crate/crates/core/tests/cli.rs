use std::path::Path;
use std::process::{Command, Output};

fn turbulink(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turbulink"))
        .args(["--out-dir", dir.to_str().unwrap()])
        .args(args)
        .env_remove("TURBULINK_CONFIG")
        .output()
        .unwrap()
}

#[test]
fn validate_passes_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = turbulink(dir.path(), &["validate"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("validate.csv")).unwrap();
    assert!(csv.starts_with("check,value,reference,tolerance,pass\n"));
    assert!(!csv.contains(",false"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "--set",
        "channel.grid_order=16",
        "--set",
        "channel.trace_max_mode=6",
    ];
    for dir in [&a, &b] {
        let out = turbulink(dir.path(), &[&args[..], &["tmatrix"]].concat());
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    for name in ["tmatrix.csv", "traces.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[source]\nmax_mode = 5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_turbulink"))
        .args(["--out-dir", dir.path().to_str().unwrap(), "schmidt"])
        .env("TURBULINK_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("schmidt.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6, "{csv}");
}

#[test]
fn config_errors_exit_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.toml");
    std::fs::write(&cfg, "[link]\n\nwaist_m = \"wide\"\n").unwrap();
    let out = turbulink(dir.path(), &["--config", cfg.to_str().unwrap(), "beam"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.toml:3:"), "{err}");
}

#[test]
fn numerical_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = turbulink(
        dir.path(),
        &[
            "--set",
            "channel.fidelity=full-ipe",
            "--set",
            "channel.grid_order=4",
            "--set",
            "solver.steps=16",
            "--set",
            "solver.cutoff=1",
            "--set",
            "turbulence.cn2=1e-13",
            "--set",
            "channel.trace_max_mode=1",
            "--set",
            "channel.matrix_max_mode=1",
            "kernel",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(!dir.path().join("kernel.csv").exists());
}

#[test]
fn gnuplot_hints_describe_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = turbulink(dir.path(), &["--gnuplot-hints", "beam"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("# beam.csv: 1 z_m; 2 waist_m"), "{stdout}");
}
