//! End-to-end harness checks: sweep determinism, resume safety, the
//! truncated-inversion oracle for exact data, and CLI exit behavior.

use std::fs;
use std::process::Command;

use num_complex::Complex;
use phaseless_core::fields::fourier_transform;
use phaseless_core::recon::{plan_reconstruction, x_grid_over_ball, NodeKind};
use phaseless_harness::{fit_rate, run_sweep, ExperimentConfig};

fn base_config_json(amplitude: f64, energies: &str) -> String {
    format!(
        r#"{{
  "dim": 2,
  "potential": {{
    "profile": "smooth", "amplitude": {amplitude}, "radius": 1.0,
    "domain_radius": 1.0, "grid_extent": 1.12, "grid_points": 56
  }},
  "family": {{
    "mode": "iw-pair", "nu": 1.0, "q_profile": "smooth",
    "q_amplitude": 1.0, "q_radius": 1.0, "t1": [6.0, 0.0],
    "grid_extent": 2.2, "grid_points": 112
  }},
  "theorem": "t1",
  "n": 3, "tau": 1.0,
  "energies": [{energies}],
  "dataset": {{ "mode": "born-synthetic", "born_scale": 0.0 }},
  "quadrature": {{ "n_radial": 10, "n_angular": 20 }},
  "seed": 77,
  "fit_skip_first": 1
}}"#
    )
}

fn load_config(json: &str) -> ExperimentConfig {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, json).unwrap();
    ExperimentConfig::load(&path).unwrap()
}

#[test]
fn zero_potential_sweep_is_zero() {
    let config = load_config(&base_config_json(0.0, "16, 32, 64"));
    let dir = tempfile::tempdir().unwrap();
    let sweep = run_sweep(&config, dir.path(), None).unwrap();
    assert!(!sweep.partial);
    assert_eq!(sweep.rows.len(), 3);
    for row in &sweep.rows {
        assert!(
            row.sup_error <= 1e-10,
            "E = {}: sup_error = {} should vanish",
            row.energy,
            row.sup_error
        );
    }
}

#[test]
fn exact_data_sweep_matches_truncated_inversion_oracle() {
    // born-synthetic with C = 0 under T1: each row's sup_error must equal
    // the truncation error of inverting the numeric v_hat over the same
    // nodes, to 1e-8
    let config = load_config(&base_config_json(0.4, "16, 64, 256"));
    let dir = tempfile::tempdir().unwrap();
    let sweep = run_sweep(&config, dir.path(), None).unwrap();
    // the truncation error shrinks as the cutoff ball grows with E
    for w in sweep.rows.windows(2) {
        assert!(
            w[1].sup_error <= 1.10 * w[0].sup_error,
            "exact-data sweep must decay (within 10% jitter)"
        );
    }
    let built = config.build().unwrap();
    let quad = config.quad_spec(&built.recon);
    let x_points = x_grid_over_ball(2, 1.0, built.potential.field().grid().spacing());

    for (row, &energy) in sweep.rows.iter().zip(config.energies.iter()) {
        let plan = plan_reconstruction(&built.recon, built.family.kind(), energy, &quad).unwrap();
        let hat = fourier_transform(built.potential.field(), &plan.targets).unwrap();
        let mut oracle_sup: f64 = 0.0;
        for x in &x_points {
            let mut acc = Complex::new(0.0, 0.0);
            for node in &plan.nodes {
                let value = match &node.kind {
                    NodeKind::Outside { target } => hat.values[*target],
                    _ => unreachable!("iw-pair has no zero set"),
                };
                let phase = -(node.p[0] * x[0] + node.p[1] * x[1]);
                acc += Complex::from_polar(node.weight, phase) * value;
            }
            let truth = built.potential.evaluate(x);
            oracle_sup = oracle_sup.max((acc - truth).norm());
        }
        assert!(
            (row.sup_error - oracle_sup).abs() <= 1e-8,
            "E = {energy}: sweep {} vs oracle {oracle_sup}",
            row.sup_error
        );
    }
}

#[test]
fn sweep_outputs_are_byte_deterministic() {
    let config = load_config(&base_config_json(0.4, "16, 32, 64"));
    let mut artifacts = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let sweep = run_sweep(&config, dir.path(), None).unwrap();
        let fit = fit_rate(&sweep.fit_rows(), config.fit_skip_first).ok();
        let built = config.build().unwrap();
        phaseless_harness::emit_outputs(&config, &built.recon, &sweep, fit, dir.path()).unwrap();
        artifacts.push((
            fs::read(dir.path().join("sweep.csv")).unwrap(),
            fs::read(dir.path().join("manifest.json")).unwrap(),
            fs::read(dir.path().join("sweep.svg")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "CSV must be byte-identical");
    assert_eq!(artifacts[0].1, artifacts[1].1, "manifest must be byte-identical");
    assert_eq!(artifacts[0].2, artifacts[1].2, "SVG must be byte-identical");
}

#[test]
fn sweep_resumes_from_persisted_rows() {
    let config = load_config(&base_config_json(0.4, "16, 32, 64"));
    let dir = tempfile::tempdir().unwrap();
    let first = run_sweep(&config, dir.path(), None).unwrap();

    // forge row 1 with a sentinel value but a valid config hash: a resumed
    // sweep must trust and reuse it verbatim
    let row_path = dir.path().join("rows").join("row_1.json");
    let text = fs::read_to_string(&row_path).unwrap();
    let forged = text.replace(
        &format!("\"sup_error\": {}", first.rows[1].sup_error),
        "\"sup_error\": 12345.0",
    );
    assert_ne!(text, forged, "sentinel substitution must apply");
    fs::write(&row_path, forged).unwrap();
    let resumed = run_sweep(&config, dir.path(), None).unwrap();
    assert_eq!(resumed.rows[1].sup_error, 12345.0, "row 1 must be reused");
    assert_eq!(resumed.rows[0].sup_error, first.rows[0].sup_error);

    // a stale hash must be discarded and the row recomputed
    let stale = fs::read_to_string(&row_path)
        .unwrap()
        .replace("\"config_sha256\": \"", "\"config_sha256\": \"feed");
    fs::write(&row_path, stale).unwrap();
    let recomputed = run_sweep(&config, dir.path(), None).unwrap();
    assert_eq!(recomputed.rows[1].sup_error, first.rows[1].sup_error);

    // interrupted-run equivalence: a fresh directory seeded with only the
    // first row file finishes to the same CSV as the uninterrupted run
    let dir2 = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir2.path().join("rows")).unwrap();
    fs::copy(
        dir.path().join("rows").join("row_0.json"),
        dir2.path().join("rows").join("row_0.json"),
    )
    .unwrap();
    let completed = run_sweep(&config, dir2.path(), None).unwrap();
    assert_eq!(
        phaseless_harness::render_csv(&completed.rows),
        phaseless_harness::render_csv(&first.rows)
    );
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phaseless"))
}

#[test]
fn cli_exit_codes_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    fs::write(&config_path, base_config_json(0.4, "16, 32, 64")).unwrap();
    let out = dir.path().join("out");

    // sweep: success, artifacts exist
    let status = cli()
        .args(["sweep", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .arg("--threads")
        .arg("2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("sweep.csv").exists());
    assert!(out.join("manifest.json").exists());
    assert!(out.join("sweep.svg").exists());
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "header + one line per energy");
    assert!(csv.starts_with("E,sup_error,r_E,eps_E,nodes_outside,nodes_inside,born_gap_const"));

    // fit on the emitted CSV
    let output = cli()
        .args(["fit", "--input"])
        .arg(out.join("sweep.csv"))
        .args(["--skip-first", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let fit: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(fit["slope"].is_number());

    // budget prints positive constants
    let output = cli()
        .args(["budget", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(report["budget"]["c3"].as_f64().unwrap() > 0.0);
    assert!(report["budget"]["c12"].as_f64().unwrap() > 0.0);

    // config error -> exit 2
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"dim\": 2}").unwrap();
    let status = cli()
        .args(["sweep", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // missing config flag -> exit 2
    let status = cli().args(["sweep", "--out", "/tmp/x"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn cli_simulate_then_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    fs::write(&config_path, base_config_json(0.4, "16, 32")).unwrap();
    let out = dir.path().join("out");

    let status = cli()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("datasets").join("e0.bin").exists());
    assert!(out.join("datasets").join("e1.json").exists());

    let recon_out = dir.path().join("recon");
    let status = cli()
        .args(["reconstruct", "--config"])
        .arg(&config_path)
        .arg("--dataset")
        .arg(out.join("datasets"))
        .arg("--out")
        .arg(&recon_out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(recon_out.join("recon_e0.bin").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(recon_out.join("recon_e1.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["theorem"], "t1");
    assert!(manifest["sup_error"].as_f64().unwrap() < 1.0);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    fs::write(&config_path, base_config_json(0.4, "16, 32")).unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let status = cli()
            .args(["sweep", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        csvs.push(fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1], "results must not depend on thread count");
}

#[test]
fn manifest_round_trip_reproduces_config_hash() {
    let config = load_config(&base_config_json(0.4, "16, 32, 64"));
    let dir = tempfile::tempdir().unwrap();
    let sweep = run_sweep(&config, dir.path(), None).unwrap();
    let built = config.build().unwrap();
    let fit = fit_rate(&sweep.fit_rows(), config.fit_skip_first).ok();
    phaseless_harness::emit_outputs(&config, &built.recon, &sweep, fit, dir.path()).unwrap();

    let manifest: phaseless_harness::SweepManifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    // the embedded config re-hashes to the recorded identity
    assert_eq!(manifest.config.sha256(), manifest.config_sha256);
    assert_eq!(manifest.config_sha256, sweep.config_sha256);
    assert_eq!(manifest.rows.len(), 3);
    assert!(!manifest.partial);
    // the SVG reference slope equals -alpha from the recon config exactly
    let svg = fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    let start = svg.find("data-theory-slope=\"").unwrap() + "data-theory-slope=\"".len();
    let end = svg[start..].find('"').unwrap() + start;
    let slope: f64 = svg[start..end].parse().unwrap();
    assert!((slope + built.recon.alpha()).abs() <= 1e-12);
}

#[test]
fn shipped_configs_hold_their_rate_claims() {
    // the bundled T2/T3 synthetic configs must parse, run, decay, and fit a
    // slope no shallower than the theoretical -alpha + 0.15
    for name in ["t2_synthetic", "t3_lattice"] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../configs")
            .join(format!("{name}.json"));
        let config = ExperimentConfig::load(&path).unwrap();
        let built = config.build().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let sweep = run_sweep(&config, dir.path(), None).unwrap();
        assert!(!sweep.partial, "{name}: {:?}", sweep.failures);
        let fit = fit_rate(&sweep.fit_rows(), config.fit_skip_first).unwrap();
        let bound = -built.recon.alpha() + 0.15;
        assert!(
            fit.slope <= bound,
            "{name}: slope {:.4} above bound {bound:.4} (rows {:?})",
            fit.slope,
            sweep.fit_rows()
        );
        // regularized regions are genuinely exercised
        assert!(sweep.rows.iter().all(|r| r.nodes_inside > 0));
        assert!(sweep.rows.iter().all(|r| r.eps_e > 0.0 && r.eps_e < 1.0));
    }
    // the solver-mode config must at least parse and validate
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/t1_solver.json");
    ExperimentConfig::load(&path).unwrap().build().unwrap();
}
