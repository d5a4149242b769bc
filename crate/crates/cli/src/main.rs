//! `ipsac`: plan trajectories, run figure sweeps and check the closed-form
//! precoder against a brute-force oracle.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::info;

use ipsac_core::channel::sensing_region;
use ipsac_core::experiment::{emit_plot, preset, write_csv, PRESETS};
use ipsac_core::precoder::{optimal_snr, oracle_snr};
use ipsac_core::{check_feasible, evaluate, load_config, plan_scheme, run_sweep, solve_unconstrained};
use ipsac_core::{ScenarioConfig, Scheme, Violation};

/// Grid size per dimension for the brute-force precoder oracle.
const ORACLE_GRID: usize = 2000;

#[derive(Debug, Parser)]
#[command(name = "ipsac", version, about = "UAV periodic sensing and communication planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan one scheme for a scenario, print its average rate and write the trajectory CSV.
    Solve {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// upper-bound, proposed, precoder-only or time-division.
        #[arg(long, value_name = "NAME", default_value = "proposed")]
        scheme: String,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Run a figure preset and write one CSV table and SVG chart per curve family.
    Sweep {
        #[arg(long, value_parser = PRESETS)]
        preset: String,
        /// Base scenario; the built-in defaults when omitted.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Compare the closed-form optimal SNR with a brute-force oracle under the defaults.
    Verify {
        #[arg(long, value_name = "N", default_value_t = 50)]
        samples: usize,
    },
}

fn read_config(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_config(&text).with_context(|| format!("in {}", path.display()))
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn solve(config: &Path, scheme: &str, out: &Path) -> anyhow::Result<()> {
    let Some(scheme) = Scheme::parse(scheme) else {
        bail!("unknown scheme '{scheme}' (expected upper-bound, proposed, precoder-only or time-division)");
    };
    let cfg = read_config(config)?;
    let plan = plan_scheme(scheme, &cfg)?;
    // The upper bound and the benchmarks relax the endpoint conditions by design.
    let relaxed_endpoints = scheme == Scheme::UpperBound || !plan.flags.is_empty();
    let violations: Vec<Violation> = check_feasible(&plan.trajectory)
        .into_iter()
        .filter(|v| {
            !(relaxed_endpoints && matches!(v, Violation::StartPosition { .. } | Violation::EndPosition { .. }))
        })
        .collect();
    for v in &violations {
        log::warn!("{v}");
    }
    let perf = evaluate(&plan.trajectory)?;
    ensure_dir(out)?;
    let path = out.join(format!("trajectory_{}.csv", scheme.as_str().to_ascii_lowercase()));
    std::fs::write(&path, plan.trajectory.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    println!("scheme: {scheme}");
    if matches!(scheme, Scheme::UpperBound | Scheme::Proposed) {
        let sol = solve_unconstrained(&cfg)?;
        println!("x_r_star_m: {:.6}", sol.x_r);
    }
    println!("avg_rate_bpshz: {:.9}", perf.avg_rate);
    for f in &plan.flags {
        println!("flag: {}", f.as_str());
    }
    println!("trajectory: {}", path.display());
    Ok(())
}

fn sweep(name: &str, config: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    let base = match config {
        Some(p) => read_config(p)?,
        None => ScenarioConfig::default(),
    };
    let subs = preset(name, &base).with_context(|| format!("unknown preset '{name}'"))?;
    ensure_dir(out)?;
    for sub in subs {
        info!("running {}", sub.label);
        let table = run_sweep(&sub.spec)?;
        let csv = out.join(format!("{}.csv", sub.label));
        let svg = out.join(format!("{}.svg", sub.label));
        write_csv(&table, &csv)?;
        emit_plot(&table, &svg)?;
        println!("{}", csv.display());
        println!("{}", svg.display());
    }
    Ok(())
}

fn verify(samples: usize) -> anyhow::Result<()> {
    if samples == 0 {
        bail!("--samples must be positive");
    }
    let cfg = ScenarioConfig::default();
    let (lo, hi) = sensing_region(&cfg).context("default scenario has no sensing region")?;
    let mut worst = 0.0f64;
    for i in 0..samples {
        // Stratified: the midpoint of each of `samples` equal cells.
        let x = lo + (hi - lo) * (i as f64 + 0.5) / samples as f64;
        let exact = optimal_snr(x, &cfg)?;
        let oracle = oracle_snr(x, &cfg, ORACLE_GRID)?;
        worst = worst.max((exact - oracle).abs() / exact);
    }
    println!("samples: {samples}");
    println!("max_relative_error: {worst:.3e}");
    Ok(())
}

/// Infeasibility anywhere in the error chain exits with 2, everything else with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<ipsac_core::Error>()) {
        Some(e) if e.is_infeasibility() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve { config, scheme, out } => solve(config, scheme, out),
        Command::Sweep { preset, config, out } => sweep(preset, config.as_deref(), out),
        Command::Verify { samples } => verify(*samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
