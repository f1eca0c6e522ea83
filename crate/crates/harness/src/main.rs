use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use phaseless_core::forward::{generate_dataset, PhaselessDataset};
use phaseless_core::recon::{
    error_budget, plan_reconstruction, reconstruct, x_grid_over_ball, BudgetOptions,
};
use phaseless_harness::{
    emit_outputs, fit_rate, parse_csv, run_sweep, ExperimentConfig, HarnessError,
};

/// Numerical laboratory for phaseless inverse scattering at high energies.
#[derive(Parser)]
#[command(name = "phaseless", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores). Results are identical for any
    /// thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the phaseless datasets for every configured energy.
    Simulate,
    /// Reconstruct the potential from previously simulated datasets.
    Reconstruct {
        /// Directory holding `e<idx>.bin` / `e<idx>.json` dataset files.
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Full pipeline: simulate, reconstruct, fit the decay rate, emit
    /// CSV / manifest / SVG artifacts.
    Sweep,
    /// Fit a decay rate to an existing sweep.csv.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Rows excluded from the front of the window.
        #[arg(long, default_value_t = 1)]
        skip_first: usize,
    },
    /// Print the error-budget constants for a config.
    Budget {
        /// Empirical stand-in for the external data-error constants.
        #[arg(long)]
        calibration: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("PHASELESS_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn require_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Config("--config is required".into()))?;
    ExperimentConfig::load(path)
}

fn require_out(cli: &Cli) -> Result<PathBuf, HarnessError> {
    cli.out
        .clone()
        .ok_or_else(|| HarnessError::Config("--out is required".into()))
}

fn dispatch(cli: &Cli) -> Result<(), HarnessError> {
    match &cli.command {
        Command::Simulate => simulate(cli),
        Command::Reconstruct { dataset } => reconstruct_cmd(cli, dataset),
        Command::Sweep => sweep_cmd(cli),
        Command::Fit { input, skip_first } => fit_cmd(cli, input, *skip_first),
        Command::Budget { calibration } => budget_cmd(cli, *calibration),
    }
}

fn simulate(cli: &Cli) -> Result<(), HarnessError> {
    let config = require_config(cli)?;
    let out = require_out(cli)?;
    let built = config.build()?;
    let quad = config.quad_spec(&built.recon);
    let opts = config.generate_options(cli.seed);
    fs::create_dir_all(out.join("datasets"))?;

    let mut failures = 0usize;
    for (e_idx, &energy) in config.energies.iter().enumerate() {
        let step = || -> Result<(), HarnessError> {
            let plan = plan_reconstruction(&built.recon, built.family.kind(), energy, &quad)?;
            let dataset = generate_dataset(
                &built.potential,
                &built.family,
                &[energy],
                std::slice::from_ref(&plan.targets),
                &opts,
            )?;
            dataset.save(&out.join("datasets"), &format!("e{e_idx}"))?;
            println!(
                "E = {energy}: {} probes -> datasets/e{e_idx}.bin",
                plan.targets.len()
            );
            Ok(())
        };
        if let Err(err) = step() {
            log::error!("simulate failed at E = {energy}: {err}");
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(HarnessError::Partial {
            failed: failures,
            total: config.energies.len(),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct ReconManifest {
    format: String,
    theorem: String,
    n: usize,
    tau: f64,
    alpha: f64,
    energy: f64,
    r_e: f64,
    eps_e: Option<f64>,
    nodes_outside: usize,
    nodes_inside: usize,
    below_floor: usize,
    min_zeta_ratio: f64,
    clamped_targets: usize,
    sup_error: Option<f64>,
    dataset_sha256: String,
    x_points: usize,
}

fn reconstruct_cmd(cli: &Cli, dataset_dir: &Path) -> Result<(), HarnessError> {
    let config = require_config(cli)?;
    let out = require_out(cli)?;
    let built = config.build()?;
    let quad = config.quad_spec(&built.recon);
    let x_points = x_grid_over_ball(
        config.dim,
        config.potential.domain_radius,
        built.potential.field().grid().spacing(),
    );
    fs::create_dir_all(&out)?;

    for (e_idx, &energy) in config.energies.iter().enumerate() {
        let dataset = PhaselessDataset::<f64>::load(dataset_dir, &format!("e{e_idx}"))?;
        let potential = &built.potential;
        let result = reconstruct(
            &dataset,
            &built.family,
            &built.recon,
            energy,
            &quad,
            &x_points,
            Some(&|x: &[f64]| potential.evaluate(x)),
        )?;
        // binary payload: u values as little-endian (re, im) pairs
        let mut payload = Vec::with_capacity(16 * result.u_values.len());
        for v in &result.u_values {
            payload.extend_from_slice(&v.re.to_le_bytes());
            payload.extend_from_slice(&v.im.to_le_bytes());
        }
        fs::write(out.join(format!("recon_e{e_idx}.bin")), &payload)?;
        let manifest = ReconManifest {
            format: "phaseless-recon-v1".into(),
            theorem: config.theorem.label().into(),
            n: config.n,
            tau: config.tau,
            alpha: built.recon.alpha(),
            energy,
            r_e: result.radius,
            eps_e: result.epsilon,
            nodes_outside: result.diagnostics.nodes_outside,
            nodes_inside: result.diagnostics.nodes_inside,
            below_floor: result.diagnostics.below_floor,
            min_zeta_ratio: result.diagnostics.min_zeta_ratio,
            clamped_targets: result.diagnostics.clamped_targets,
            sup_error: result.sup_error,
            dataset_sha256: dataset.checksum(),
            x_points: x_points.len(),
        };
        fs::write(
            out.join(format!("recon_e{e_idx}.json")),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        println!(
            "E = {energy}: sup_error = {:.6e} -> recon_e{e_idx}.bin",
            result.sup_error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn sweep_cmd(cli: &Cli) -> Result<(), HarnessError> {
    let config = require_config(cli)?;
    let out = require_out(cli)?;
    let built = config.build()?;
    let sweep = run_sweep(&config, &out, cli.seed)?;
    let fit = match fit_rate(&sweep.fit_rows(), config.fit_skip_first) {
        Ok(f) => Some(f),
        Err(e) => {
            log::warn!("rate fit unavailable: {e}");
            None
        }
    };
    let artifacts = emit_outputs(&config, &built.recon, &sweep, fit, &out)?;
    for row in &sweep.rows {
        println!(
            "E = {}: sup_error = {:.6e}, r(E) = {:.4}, nodes {}/{}",
            row.energy, row.sup_error, row.r_e, row.nodes_outside, row.nodes_inside
        );
    }
    if let Some(f) = fit {
        println!(
            "fitted slope {:.6} (theory -alpha = {:.6}), r^2 = {:.4}",
            f.slope,
            -built.recon.alpha(),
            f.r_squared
        );
    }
    println!("artifacts: {}", artifacts.csv.display());
    if sweep.partial {
        return Err(HarnessError::Partial {
            failed: sweep.failures.len(),
            total: config.energies.len(),
        });
    }
    Ok(())
}

fn fit_cmd(cli: &Cli, input: &PathBuf, skip_first: usize) -> Result<(), HarnessError> {
    let rows = parse_csv(&fs::read_to_string(input)?)?;
    let fit = fit_rate(&rows, skip_first)?;
    let rendered = serde_json::to_string_pretty(&fit)?;
    println!("{rendered}");
    if let Some(out) = &cli.out {
        fs::create_dir_all(out)?;
        fs::write(out.join("fit.json"), rendered + "\n")?;
    }
    Ok(())
}

fn budget_cmd(cli: &Cli, calibration: Option<f64>) -> Result<(), HarnessError> {
    let config = require_config(cli)?;
    let built = config.build()?;
    let budget = error_budget(
        built.potential.budget(),
        &built.family,
        &built.recon,
        &BudgetOptions {
            calibration,
            ..Default::default()
        },
    )?;
    #[derive(Serialize)]
    struct BudgetReport {
        theorem: String,
        alpha: f64,
        c1: f64,
        beta: f64,
        budget: phaseless_core::recon::ErrorBudget<f64>,
    }
    let report = BudgetReport {
        theorem: config.theorem.label().into(),
        alpha: built.recon.alpha(),
        c1: built.family.base().c1,
        beta: built.family.base().beta,
        budget,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(out) = &cli.out {
        fs::create_dir_all(out)?;
        fs::write(
            out.join("budget.json"),
            serde_json::to_string_pretty(&report)? + "\n",
        )?;
    }
    Ok(())
}
