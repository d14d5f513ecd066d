//! Running one scenario in theory, simulation or validation mode.

use icc_core::analytic::{satisfaction, satisfaction_curve, service_capacity, ManagementPolicy, SystemRates};
use icc_core::compute::{Outcome, ServiceModel};
use icc_core::network::{simulate, NetworkConfig, Tally};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Architecture, Mode, ScenarioConfig, SweepAxis};
use crate::error::Result;
use crate::metrics::{pearson, PointLabel, RunMetrics};

/// How independent runs are scheduled. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

pub(crate) fn map_runs<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match exec {
        Execution::Parallel => items.into_par_iter().map(f).collect(),
        Execution::Serial => items.into_iter().map(f).collect(),
    }
}

/// Seed of replication `r`: the master seed plus `r`.
pub fn replication_seed(master: u64, r: u32) -> u64 {
    master.wrapping_add(r as u64)
}

pub(crate) fn run_replication(cfg: &ScenarioConfig, arch: Architecture, seed: u64, point: Option<(SweepAxis, f64)>) -> Result<Tally> {
    let net = cfg.network_at(arch, seed, point)?;
    Ok(simulate(&net)?.tally)
}

pub(crate) fn label(arch: Architecture, point: Option<(SweepAxis, f64)>, net: &NetworkConfig) -> PointLabel {
    PointLabel {
        architecture: arch,
        axis: point.map(|p| p.0),
        value: point.map(|p| p.1),
        arrival_rate: net.ue.aggregate_job_rate(),
        gpu_count: match net.compute.service {
            ServiceModel::LlmRoofline { gpu, .. } => Some(gpu.count),
            ServiceModel::ExponentialJob { .. } => None,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub architecture: Architecture,
    pub policy: ManagementPolicy,
    pub lambda: f64,
    /// Empty when `lambda` is outside the stable region.
    pub satisfaction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub rows: Vec<TheoryRow>,
    /// Analytic service capacity in jobs/s for each architecture.
    pub capacities: Vec<(Architecture, f64)>,
}

pub fn run_theory(cfg: &ScenarioConfig) -> Result<TheoryReport> {
    let f = &cfg.file;
    let mut rows = Vec::new();
    let mut capacities = Vec::new();
    for arch in cfg.theory_architectures() {
        let policy = cfg.preset(arch).policy;
        let budget = cfg.budget(arch)?;
        let curve = satisfaction_curve(policy, f.rates.mu1, f.rates.mu2, &budget, &f.theory.lambdas);
        for s in &curve.skipped {
            log::warn!("{arch}: lambda {} skipped: {}", s.lambda, s.reason);
        }
        let mut points = curve.points.iter().map(|&(l, p)| (l, Some(p))).collect::<Vec<_>>();
        points.extend(curve.skipped.iter().map(|s| (s.lambda, None)));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows.extend(points.into_iter().map(|(lambda, satisfaction)| TheoryRow {
            architecture: arch,
            policy,
            lambda,
            satisfaction,
        }));
        capacities.push((arch, service_capacity(policy, f.rates.mu1, f.rates.mu2, &budget, f.alpha)?));
    }
    Ok(TheoryReport { rows, capacities })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub label: PointLabel,
    pub metrics: RunMetrics,
}

pub fn run_simulation(cfg: &ScenarioConfig, exec: Execution) -> Result<SimulationReport> {
    let arch = cfg.file.architecture;
    let seeds: Vec<u64> = (0..cfg.file.replications).map(|r| replication_seed(cfg.file.seed, r)).collect();
    let tallies = map_runs(exec, seeds.clone(), |seed| run_replication(cfg, arch, seed, None));
    let replications = seeds.into_iter().zip(tallies).map(|(s, t)| t.map(|t| (s, t))).collect::<Result<_>>()?;
    Ok(SimulationReport {
        label: label(arch, None, &cfg.network(arch, cfg.file.seed)?),
        metrics: RunMetrics { replications },
    })
}

/// Empirical against analytic satisfaction at one arrival rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub architecture: Architecture,
    pub policy: ManagementPolicy,
    pub lambda: f64,
    /// Tagged post-warm-up jobs.
    pub samples: u64,
    pub empirical: f64,
    pub analytic: f64,
    /// Binomial standard error at the analytic probability.
    pub std_error: f64,
    pub z_score: f64,
    pub within_3_sigma: bool,
    /// Correlation of a job's air-interface and computing sojourns.
    pub pearson_rho: Option<f64>,
    pub rho_below_0_01: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.within_3_sigma && r.rho_below_0_01)
    }
}

/// Runs the tandem with exponential stages once per `validate.lambdas`
/// entry, seeded with the master seed, and compares tagged jobs with the
/// closed form of the architecture's policy.
pub fn run_validate(cfg: &ScenarioConfig, exec: Execution) -> Result<ValidationReport> {
    let arch = cfg.file.architecture;
    let policy = cfg.preset(arch).policy;
    let budget = cfg.budget(arch)?;
    let lambdas = cfg.file.validate.lambdas.clone();
    let rows = map_runs(exec, lambdas, |lambda| -> Result<ValidationRow> {
        let rates = SystemRates::new(lambda, cfg.uplink_rate(), cfg.compute_rate())?;
        let analytic = satisfaction(policy, &rates, &budget)?.probability;
        let net = cfg.validation_network(arch, lambda, cfg.file.seed)?;
        let run = simulate(&net)?;
        let n = run.tagged.len() as u64;
        let satisfied = run.tagged.iter().filter(|t| t.outcome == Outcome::Satisfied).count();
        let empirical = if n > 0 { satisfied as f64 / n as f64 } else { f64::NAN };
        let std_error = (analytic * (1.0 - analytic) / n as f64).sqrt();
        let z_score = (empirical - analytic) / std_error;
        let pairs: Vec<(f64, f64)> = run.tagged.iter().filter_map(|t| Some((t.air, t.comp?))).collect();
        let pearson_rho = pearson(&pairs);
        Ok(ValidationRow {
            architecture: arch,
            policy,
            lambda,
            samples: n,
            empirical,
            analytic,
            std_error,
            z_score,
            within_3_sigma: z_score.abs() <= 3.0,
            pearson_rho,
            rho_below_0_01: pearson_rho.is_some_and(|r| r.abs() < 0.01),
        })
    });
    Ok(ValidationReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

pub enum Report {
    Theory(TheoryReport),
    Simulation(SimulationReport),
    Validate(ValidationReport),
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report> {
    Ok(match cfg.mode {
        Mode::Theory => Report::Theory(run_theory(cfg)?),
        Mode::Simulation => Report::Simulation(run_simulation(cfg, Execution::Parallel)?),
        Mode::Validate => Report::Validate(run_validate(cfg, Execution::Parallel)?),
    })
}
