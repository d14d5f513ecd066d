use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use icc_harness::config::{CliOverrides, Mode, ScenarioConfig};
use icc_harness::output::{emit_csv, to_csv};
use icc_harness::scenario::{run_simulation, run_theory, run_validate, Execution};
use icc_harness::sweep::{run_sweep, Capacity};
use icc_harness::{HarnessError, Result};
use serde::Serialize;

/// Service capacity of LLM inference offloading: ICC against 5G MEC.
///
/// Every flag can also be set through an environment variable named
/// ICCSIM_<FLAG>, e.g. ICCSIM_SEED. Flags win over the environment, which
/// wins over the scenario file.
#[derive(Parser)]
#[command(name = "iccsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic satisfaction curves and service capacity.
    Theory(Args),
    /// Simulate one scenario.
    Sim(Args),
    /// Simulate every point of the scenario's [sweep] grid.
    Sweep(Args),
    /// Check the simulator against the closed forms with exponential stages.
    Validate(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (TOML).
    #[arg(long, env = "ICCSIM_CONFIG")]
    config: PathBuf,
    /// Master seed.
    #[arg(long, env = "ICCSIM_SEED")]
    seed: Option<u64>,
    /// CSV output path; standard output when absent.
    #[arg(long, env = "ICCSIM_OUT")]
    out: Option<PathBuf>,
    /// Target satisfaction probability for capacity.
    #[arg(long, env = "ICCSIM_ALPHA")]
    alpha: Option<f64>,
    /// Replications per scenario point.
    #[arg(long, env = "ICCSIM_REPLICATIONS")]
    replications: Option<u32>,
}

impl Args {
    fn load(&self, mode: Mode) -> Result<ScenarioConfig> {
        let cli = CliOverrides {
            seed: self.seed,
            alpha: self.alpha,
            replications: self.replications,
        };
        Ok(ScenarioConfig::load(&self.config, mode, cli)?)
    }
}

/// Writes the CSV to `--out` or stdout, and the summary to whichever of
/// stdout/stderr the CSV is not using.
fn deliver<T: Serialize>(args: &Args, rows: &[T], summary: &[String]) -> Result<()> {
    match &args.out {
        Some(path) => {
            emit_csv(rows, path)?;
            summary.iter().for_each(|l| println!("{l}"));
        }
        None => {
            let bytes = to_csv(rows)?;
            std::io::stdout().write_all(&bytes).map_err(|source| HarnessError::Write {
                path: "<stdout>".into(),
                source,
            })?;
            summary.iter().for_each(|l| eprintln!("{l}"));
        }
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |x| format!("{x:.4}"))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Theory(args) => {
            let cfg = args.load(Mode::Theory)?;
            let report = run_theory(&cfg)?;
            let summary: Vec<String> = report
                .capacities
                .iter()
                .map(|(arch, c)| format!("capacity {arch}: {c:.4} jobs/s (alpha {})", cfg.file.alpha))
                .collect();
            deliver(&args, &report.rows, &summary)
        }
        Command::Sim(args) => {
            let cfg = args.load(Mode::Simulation)?;
            let report = run_simulation(&cfg, Execution::Parallel)?;
            let m = &report.metrics;
            let summary = vec![format!(
                "{}: satisfaction {} +/- {} over {} replication(s), {} jobs",
                report.label.architecture,
                fmt_opt(m.satisfaction_rate()),
                fmt_opt(m.satisfaction_half_width()),
                m.replications.len(),
                m.pooled().resolved(),
            )];
            deliver(&args, &m.rows(&report.label), &summary)
        }
        Command::Sweep(args) => {
            let cfg = args.load(Mode::Simulation)?;
            let report = run_sweep(&cfg, Execution::Parallel)?;
            let summary: Vec<String> = report
                .architectures()
                .into_iter()
                .map(|arch| match report.capacity(arch) {
                    Capacity::Arrival { value, arrival_rate } => {
                        format!("capacity {arch}: {value} ({arrival_rate} jobs/s) at alpha {}", report.alpha)
                    }
                    Capacity::Gpus(k) => format!("{arch}: {k} GPU(s) reach alpha {}", report.alpha),
                    Capacity::None => format!("{arch}: no grid point reaches alpha {}", report.alpha),
                })
                .collect();
            deliver(&args, &report.rows(), &summary)
        }
        Command::Validate(args) => {
            let cfg = args.load(Mode::Validate)?;
            let report = run_validate(&cfg, Execution::Parallel)?;
            let summary: Vec<String> = report
                .rows
                .iter()
                .map(|r| {
                    format!(
                        "{} lambda {}: empirical {:.5} analytic {:.5} z {:+.2} rho {} n {}",
                        if r.within_3_sigma && r.rho_below_0_01 { "PASS" } else { "FAIL" },
                        r.lambda,
                        r.empirical,
                        r.analytic,
                        r.z_score,
                        fmt_opt(r.pearson_rho),
                        r.samples,
                    )
                })
                .collect();
            deliver(&args, &report.rows, &summary)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
