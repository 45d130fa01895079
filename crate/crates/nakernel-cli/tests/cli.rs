//! End-to-end tests of the command-line surface: reproducibility,
//! sidecar round-trips, error reporting, and the documented exit codes.

use nakernel_cli::{execute, Cli, CliError, CommandKind};
use std::path::Path;
use std::process::Command;

fn cli(command: CommandKind, config: Option<&Path>, seed: Option<u64>, out: &Path) -> Cli {
    Cli {
        command,
        config: config.map(|p| p.to_path_buf()),
        seed,
        workers: Some(1),
        out: out.to_path_buf(),
    }
}

fn small_dufresne_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("dufresne.toml");
    std::fs::write(
        &path,
        r#"
seed = 11
[dufresne]
mus = [1.0]
n_samples = 1500
steps_per_unit = 64
tail_tol = 0.001
ks_limit = 0.1
"#,
    )
    .unwrap();
    path
}

#[test]
fn same_seed_reproduces_the_payload_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_dufresne_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let first = execute(&cli(CommandKind::VerifyDufresne, Some(&config), None, &out_a)).unwrap();
    let second = execute(&cli(CommandKind::VerifyDufresne, Some(&config), None, &out_b)).unwrap();
    assert!(first.passed, "small dufresne run should pass");
    assert!(second.passed);
    let payload_a = std::fs::read(&first.csv_path).unwrap();
    let payload_b = std::fs::read(&second.csv_path).unwrap();
    assert_eq!(payload_a, payload_b);
    assert!(payload_a.starts_with(b"mu,shape,scale,n_samples,ks,ks_limit,pass\n"));
}

#[test]
fn sidecar_embedded_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_dufresne_config(dir.path());
    let out_a = dir.path().join("a");
    // Override the seed on the command line; the sidecar must embed the
    // effective seed so the reproduction needs no extra flags.
    let first = execute(&cli(
        CommandKind::VerifyDufresne,
        Some(&config),
        Some(99),
        &out_a,
    ))
    .unwrap();

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&first.json_path).unwrap()).unwrap();
    assert_eq!(sidecar["command"], "verify-dufresne");
    assert_eq!(sidecar["seed"], 99);
    assert_eq!(sidecar["payload_csv"], "verify-dufresne.csv");
    let embedded = sidecar["config"].as_str().unwrap();
    assert_eq!(
        sidecar["config_sha256"].as_str().unwrap(),
        nakernel_cli::record::sha256_hex(embedded)
    );

    let replay_config = dir.path().join("replay.toml");
    std::fs::write(&replay_config, embedded).unwrap();
    let out_b = dir.path().join("b");
    let second = execute(&cli(
        CommandKind::VerifyDufresne,
        Some(&replay_config),
        None,
        &out_b,
    ))
    .unwrap();
    assert_eq!(
        std::fs::read(&first.csv_path).unwrap(),
        std::fs::read(&second.csv_path).unwrap()
    );
}

#[test]
fn different_seeds_give_different_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_dufresne_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let first = execute(&cli(
        CommandKind::VerifyDufresne,
        Some(&config),
        Some(1),
        &out_a,
    ))
    .unwrap();
    let second = execute(&cli(
        CommandKind::VerifyDufresne,
        Some(&config),
        Some(2),
        &out_b,
    ))
    .unwrap();
    assert_ne!(
        std::fs::read(&first.csv_path).unwrap(),
        std::fs::read(&second.csv_path).unwrap()
    );
}

#[test]
fn zero_samples_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("zero.toml");
    std::fs::write(&config, "[dufresne]\nmus = [1.0]\nn_samples = 0\nsteps_per_unit = 64\ntail_tol = 0.001\nks_limit = 0.1\n").unwrap();
    let err = execute(&cli(
        CommandKind::VerifyDufresne,
        Some(&config),
        None,
        dir.path(),
    ))
    .unwrap_err();
    assert!(
        matches!(&err, CliError::Config(msg) if msg.contains("n_samples")),
        "{err}"
    );
}

#[test]
fn reflection_reports_uncovered_queries_as_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("reflect.toml");
    std::fs::write(
        &config,
        r#"
seed = 5
[reflection]
n_paths = 10000
n_steps = 400
horizon = 1.0
hit_queries = [[1.0, 0.5]]
hit_tolerance = 0.05
region_queries = [[1.0, -3.0, -1.5], [1.0, -1.5, 1.5]]
dominance_margin = 0.01
density_barrier = 1.2
density_points = []
tail_levels = [2.0]
"#,
    )
    .unwrap();
    let summary = execute(&cli(
        CommandKind::VerifyReflection,
        Some(&config),
        None,
        dir.path(),
    ))
    .unwrap();
    let payload = std::fs::read_to_string(&summary.csv_path).unwrap();
    let mut lines = payload.lines();
    assert_eq!(
        lines.next().unwrap(),
        "check,barrier,x,y,closed_form,estimate,stderr,margin,rule,pass,note"
    );
    let skipped: Vec<&str> = payload.lines().filter(|l| l.contains("skipped")).collect();
    assert_eq!(skipped.len(), 1, "payload: {payload}");
    assert!(
        skipped[0].contains("outside the four covered regions"),
        "{}",
        skipped[0]
    );
    // The band [-1.5, 1.5] spans both barriers: skipped, not failed.
    assert!(skipped[0].starts_with("sup_band_interval,1,-1.5,1.5"));
}

#[test]
fn abelian_kernel_matches_its_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("abelian.toml");
    // Explicit group with zero adjoint matrices: the kernel factorizes
    // and the command adds the closed-form check.
    std::fs::write(
        &config,
        r#"
seed = 3
[group]
alpha = [1.0, 1.0]
xi = [[0.0, 1.0], [1.0, 1.0]]
theta = [[1.0, 0.0]]
ads = [[[0.0, 0.0], [0.0, 0.0]]]
[kernel]
t = 0.5
n_eta = 16
n_steps = 32
half_width = 4.0
points_per_axis = 5
normalization_tolerance = 0.9
"#,
    )
    .unwrap();
    let summary = execute(&cli(CommandKind::Kernel, Some(&config), None, dir.path())).unwrap();
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary.json_path).unwrap()).unwrap();
    let checks = sidecar["checks"].as_array().unwrap();
    let closed = checks
        .iter()
        .find(|c| c["name"] == "abelian_closed_form")
        .expect("abelian check present");
    assert_eq!(closed["pass"], true, "sidecar: {sidecar}");
    let payload = std::fs::read_to_string(&summary.csv_path).unwrap();
    assert!(payload.starts_with("v_index,m_index,v,m,mean,stderr,mom_mean,mom_stderr\n"));
    // 5 v-points × 25 m-points plus the header.
    assert_eq!(payload.lines().count(), 1 + 5 * 25);
}

#[test]
fn poisson_rejects_drift_outside_the_chamber_naming_the_root() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(
        &config,
        "[group]\nalpha = [1.0, -0.5]\nh_o = [1.0, 1.0]\n",
    )
    .unwrap();
    let err = execute(&cli(CommandKind::Poisson, Some(&config), None, dir.path())).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("positive chamber"), "{msg}");
    assert!(msg.contains("xi[0]"), "{msg}");
}

#[test]
fn exponents_payload_matches_the_hand_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "[group]\nalpha = [1.5, 0.7]\n[exponents]\nrho = [1.0, 2.0]\nq_values = [2.0, 10.0]\n",
    )
    .unwrap();
    let summary = execute(&cli(CommandKind::Exponents, Some(&config), None, dir.path())).unwrap();
    assert!(summary.passed);
    let payload = std::fs::read_to_string(&summary.csv_path).unwrap();
    let lines: Vec<&str> = payload.lines().collect();
    assert_eq!(
        lines[0],
        "formula,region,q,alpha,rho,exponent,rho_zero"
    );
    // min over {α₁, α₂, (α₁+α₂)/2 ρ-weighted}: γ = 2·min(1.5, 0.7) = 1.4,
    // ρ₀ = Σλ(ρ) over {ξ₁, ξ₂, ξ₁+ξ₂} at ρ = (1, 2) is 1+2+3 = 6.
    assert_eq!(lines[1], "min_ratio,,,1.5;0.7,1;2,1.4,6");
    assert_eq!(lines[2], "region_sharp,v_large,,1.5;0.7,1;2,1.5,");
    assert_eq!(lines[3], "region_sharp,m_large,,1.5;0.7,1;2,0.7,");
    assert_eq!(lines[4], "region_sharp,both,,1.5;0.7,1;2,1.1,");
    // γ̃ = 2·min(1.5², 0.7², (2.2)²/2) = 2·0.49 = 0.98, divided by q
    // (0.49 lands just below the decimal in binary, hence the long form).
    assert_eq!(lines[5], "squared_ratio,,2,1.5;0.7,,0.48999999999999994,");
    assert_eq!(lines[6], "squared_ratio,,10,1.5;0.7,,0.09799999999999999,");
}

// ---------------------------------------------------------------------------
// Binary-level tests: exit codes and worker invariance.

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nakernel"));
    cmd.env_remove("NAKERNEL_WORKERS");
    cmd
}

#[test]
fn binary_exponents_exits_zero_and_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["exponents", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(dir.path().join("exponents.csv").is_file());
    assert!(dir.path().join("exponents.json").is_file());
}

#[test]
fn binary_reports_config_errors_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "no_such_key = 1\n").unwrap();
    let output = bin()
        .args(["exponents", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no_such_key"), "{stderr}");
}

#[test]
fn binary_rejects_invalid_workers_env() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .env("NAKERNEL_WORKERS", "many")
        .args(["exponents", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&output.stderr).contains("NAKERNEL_WORKERS"),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn worker_count_does_not_change_the_payload() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("points.toml");
    std::fs::write(
        &config,
        r#"
seed = 21
[budget]
horizon = 1.0
n_sigma = 8
n_eta = 4
n_steps = 16
[poisson]
direction_m = [0.0, 0.0]
direction_v = [1.0]
radii = []
slope_margin = 0.5
[[poisson.points]]
m = [0.4, -0.1]
v = [0.3]
"#,
    )
    .unwrap();
    let mut payloads = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}"));
        let output = bin()
            .args(["poisson", "--workers", workers, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "workers = {workers}");
        payloads.push(std::fs::read(out.join("poisson.csv")).unwrap());
    }
    assert_eq!(payloads[0], payloads[1]);
}
