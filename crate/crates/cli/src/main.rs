//! `cphase` — design and simulate the single-step multi-target
//! controlled-phase gate on cavity-hosted microwave-photonic qubits.
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver failure,
//! 3 partial sweep failure.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cphase_core::design;
use cphase_core::experiments::{
    run_single, sweep_decoherence, sweep_detuning, validate_effective, write_csv, RunConfig,
    SweepOutcome, SweepRecord,
};
use cphase_core::Error;

#[derive(Parser)]
#[command(
    name = "cphase",
    version,
    about = "Simulator and design tool for an n-qubit controlled-phase gate on cavity qubits mediated by a flux qutrit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Path to the TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (overrides the config's `output.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Override the per-cavity photon truncation.
    #[arg(long)]
    trunc: Option<usize>,
    /// Override the fixed integrator step, picoseconds.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the gate design constraints and print the solution.
    Design(CommonArgs),
    /// Run one full lossy simulation of the configured system.
    Run(CommonArgs),
    /// Sweep fidelity over the decoherence-time grid.
    SweepDecoherence(CommonArgs),
    /// Sweep fidelity over a common detuning error.
    SweepDetuning(CommonArgs),
    /// Compare full and effective closed-system dynamics.
    ValidateEffective(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::InvalidParams(_) | Error::InvalidLabel(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    if let Some(n) = args.trunc {
        cfg = cfg.with_uniform_truncation(n)?;
    }
    if let Some(dt) = args.dt {
        cfg = cfg.with_dt_ps(dt)?;
    }
    if let Some(out) = &args.out {
        cfg.csv_path = Some(out.clone());
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Design(args) => {
            let cfg = load_config(&args)?;
            print_design(&cfg)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            let record = run_single(&cfg)?;
            println!(
                "fidelity     = {:.8}\nleakage      = {:.6e}\ntrace_error  = {:.3e}\nwall_ms      = {:.1}",
                record.fidelity, record.leakage, record.trace_error, record.wall_ms
            );
            if let Some(path) = &cfg.csv_path {
                write_csv(path, std::slice::from_ref(&record))?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepDecoherence(args) => {
            let cfg = load_config(&args)?;
            let outcome = sweep_decoherence(&cfg)?;
            finish_sweep(&cfg, outcome)
        }
        Command::SweepDetuning(args) => {
            let cfg = load_config(&args)?;
            let outcome = sweep_detuning(&cfg)?;
            finish_sweep(&cfg, outcome)
        }
        Command::ValidateEffective(args) => {
            let cfg = load_config(&args)?;
            let report = validate_effective(&cfg)?;
            println!(
                "full-vs-effective fidelity = {:.8}\nground-sector leakage      = {:.6e}\ngate time                  = {:.6} ns\nchi/2pi                    = {:.6} MHz\neta/2pi                    = {:.6} MHz",
                report.fidelity,
                report.ground_sector_leakage,
                report.t_gate * 1e9,
                report.chi / TAU / 1e6,
                report.eta / TAU / 1e6,
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn finish_sweep(cfg: &RunConfig, outcome: SweepOutcome) -> Result<ExitCode, Error> {
    print_records(&outcome.records);
    for failure in &outcome.failures {
        let coords: Vec<String> = failure
            .swept
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        eprintln!("point failed ({}): {}", coords.join(", "), failure.message);
    }
    if let Some(path) = &cfg.csv_path {
        if !outcome.records.is_empty() {
            write_csv(path, &outcome.records)?;
            println!("wrote {} ({} rows)", path.display(), outcome.records.len());
        }
    }
    if outcome.all_succeeded() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn print_records(records: &[SweepRecord]) {
    if records.is_empty() {
        return;
    }
    println!("{}", records[0].header().join(","));
    for r in records {
        let row: Vec<String> = r.row().iter().map(|v| format!("{v:.6e}")).collect();
        println!("{}", row.join(","));
    }
}

fn print_design(cfg: &RunConfig) -> Result<(), Error> {
    let inputs = &cfg.design_inputs;
    let sol = design::solve(inputs.g1, inputs.delta1, &inputs.exchange_gaps, inputs.m)?;
    let plan = design::derive_frequencies(
        cfg.params.omega_eg,
        cfg.params.omega_fe,
        inputs.delta1,
        &inputs.exchange_gaps,
    )?;
    let mhz = |w: f64| w / TAU / 1e6;
    let ghz = |w: f64| w / TAU / 1e9;

    println!("design inputs");
    println!("  qubits (n)            {}", cfg.params.n);
    println!("  g1/2pi                {:.4} MHz", mhz(inputs.g1));
    println!("  delta1/2pi            {:.4} GHz", ghz(inputs.delta1));
    for (i, gap) in inputs.exchange_gaps.iter().enumerate() {
        println!("  exchange gap {}        {:.4} MHz", i + 2, mhz(*gap));
    }
    println!("  m                     {}", inputs.m);
    println!(
        "  smallest valid m      {}",
        design::smallest_valid_m(cfg.params.n)
    );
    println!("solution");
    println!("  chi/2pi               {:.6} MHz", mhz(sol.chi));
    println!("  eta/2pi               {:.6} MHz", mhz(sol.eta));
    println!("  lambda1/2pi           {:.6} MHz", mhz(sol.lambda_1));
    println!("  gate time             {:.4} ns", sol.t_gate * 1e9);
    for (i, g) in sol.g_targets.iter().enumerate() {
        println!("  g{}/2pi                {:.4} MHz", i + 2, mhz(*g));
    }
    println!("frequencies");
    for (i, w) in plan.omega_c.iter().enumerate() {
        println!("  cavity {}              {:.4} GHz", i + 1, ghz(*w));
    }
    for (i, d) in plan.unwanted_detunings.iter().enumerate() {
        println!("  unwanted detuning {}   {:.4} GHz", i + 1, ghz(*d));
    }
    if let Some(kappa_inv_us) = inputs.kappa_inv_us {
        let q = design::quality_factors(&plan.omega_c, kappa_inv_us * 1e-6);
        for (i, qf) in q.iter().enumerate() {
            println!("  Q{}                    {:.4e}", i + 1, qf);
        }
    }
    let report = design::dispersive_report(&cfg.params);
    println!("dispersive ratios (advisory, want >= {:.0})", report.recommended_ratio);
    for (i, r) in report.detuning_over_g.iter().enumerate() {
        println!("  detuning{}/g{}          {:.2}", i + 1, i + 1, r);
    }
    for (i, r) in report.gap_over_lambda.iter().enumerate() {
        println!("  gap{}/lambda_max       {:.2}", i + 2, r);
    }

    // machine-readable block
    println!("\n[design_solution]");
    println!("chi_mhz = {:.12e}", mhz(sol.chi));
    println!("eta_mhz = {:.12e}", mhz(sol.eta));
    println!("lambda1_mhz = {:.12e}", mhz(sol.lambda_1));
    println!("t_gate_ns = {:.12e}", sol.t_gate * 1e9);
    let gs: Vec<String> = sol
        .g_targets
        .iter()
        .map(|g| format!("{:.12e}", mhz(*g)))
        .collect();
    println!("g_targets_mhz = [{}]", gs.join(", "));
    println!("m = {}", sol.m);
    Ok(())
}
