//! End-to-end checks of the `cphase` binary: exit codes, CSV emission,
//! config validation. Physics accuracy is covered by the core crate; these
//! runs use a deliberately coarse step to stay fast.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cphase"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cphase-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const COARSE_CONFIG: &str = r#"
[system]
n = 3
omega_eg_ghz = 5.0
omega_fe_ghz = 7.5
delta1_ghz = 1.5
delta_targets_ghz = [1.51, 1.53]
g1_mhz = 150.0
m = 2
crosstalk_fraction = 0.01

[decoherence]
t_scale_us = 5.0
kappa_inv_us = 10.0

[solver]
dt_ps = 50.0

[truncation]
n_photon = 3

[sweep]
detuning_error_mhz = { min = -25.0, max = 25.0, steps = 3 }
t_scale_us = { min = 4.0, max = 8.0, steps = 2 }
kappa_inv_us = { min = 10.0, max = 10.0, steps = 1 }
"#;

fn write_config(dir: &PathBuf, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn design_prints_solution() {
    let dir = scratch_dir("design");
    let cfg = write_config(&dir, COARSE_CONFIG);
    let out = bin().args(["design", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let squeezed: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    assert!(squeezed.contains("chi/2pi 7.500000 MHz"), "got:\n{text}");
    assert!(squeezed.contains("gate time 66.6667 ns"), "got:\n{text}");
    assert!(squeezed.contains("g2/2pi 86.8903 MHz"), "got:\n{text}");
    assert!(text.contains("[design_solution]"));
    assert!(text.contains("g_targets_mhz"));
}

#[test]
fn run_writes_csv_and_reports_fidelity() {
    let dir = scratch_dir("run");
    let cfg = write_config(&dir, COARSE_CONFIG);
    let csv = dir.join("single.csv");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fidelity"));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("fidelity,leakage,trace_error,wall_ms\n"));
    assert_eq!(csv_text.lines().count(), 2);
}

#[test]
fn unknown_config_key_exits_1() {
    let dir = scratch_dir("badkey");
    let cfg = write_config(&dir, &COARSE_CONFIG.replace("g1_mhz", "g1_mzh"));
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g1_mzh"));
}

#[test]
fn missing_config_file_exits_1() {
    let out = bin()
        .args(["run", "--config", "/nonexistent/nope.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreachable_tolerance_exits_2() {
    let dir = scratch_dir("solverfail");
    let cfg = write_config(
        &dir,
        &COARSE_CONFIG.replace(
            "dt_ps = 50.0",
            "method = \"adaptive_rk\"\nrel_tol = 1e-300\nabs_tol = 1e-300",
        ),
    );
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_detuning_writes_sorted_csv() {
    let dir = scratch_dir("sweepdet");
    let cfg = write_config(&dir, COARSE_CONFIG);
    let csv = dir.join("det.csv");
    let out = bin()
        .args(["sweep-detuning", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&csv)
        .args(["--threads", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "detuning_error_mhz,fidelity,leakage,trace_error,wall_ms"
    );
    let firsts: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(firsts, vec![-25.0, 0.0, 25.0]);
}

#[test]
fn partial_sweep_failure_exits_3() {
    let dir = scratch_dir("sweepfail");
    // a zero decoherence time scale in the grid cannot be built
    let cfg = write_config(
        &dir,
        &COARSE_CONFIG.replace(
            "t_scale_us = { min = 4.0, max = 8.0, steps = 2 }",
            "t_scale_us = { min = 0.0, max = 8.0, steps = 2 }",
        ),
    );
    let csv = dir.join("dec.csv");
    let out = bin()
        .args(["sweep-decoherence", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // the good point still produced a row
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn validate_effective_reports() {
    let dir = scratch_dir("valeff");
    let cfg = write_config(&dir, &COARSE_CONFIG.replace("dt_ps = 50.0", "dt_ps = 10.0"));
    let out = bin()
        .args(["validate-effective", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("full-vs-effective fidelity"));
    assert!(text.contains("chi/2pi"));
}
