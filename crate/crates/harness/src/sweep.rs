//! Sweeps along one axis and empirical capacity extraction.

use crate::config::{Architecture, ConfigError, ScenarioConfig, SweepAxis};
use crate::error::Result;
use crate::metrics::{MetricsRow, PointLabel, RunMetrics};
use crate::scenario::{label, map_runs, replication_seed, run_replication, Execution};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: PointLabel,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub alpha: f64,
    /// Grouped by architecture, ascending axis value within a group.
    pub points: Vec<SweepPoint>,
}

/// What a sweep says about one architecture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    /// Largest arrival-axis value meeting alpha, with its aggregate rate.
    Arrival { value: f64, arrival_rate: f64 },
    /// Smallest GPU count meeting alpha.
    Gpus(u32),
    /// No grid point meets alpha.
    None,
}

impl SweepReport {
    pub fn rows(&self) -> Vec<MetricsRow> {
        self.points.iter().flat_map(|p| p.metrics.rows(&p.label)).collect()
    }

    pub fn architectures(&self) -> Vec<Architecture> {
        let mut out: Vec<Architecture> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.label.architecture) {
                out.push(p.label.architecture);
            }
        }
        out
    }

    /// `(axis value, pooled satisfaction)` of one architecture.
    pub fn curve(&self, arch: Architecture) -> Vec<(f64, Option<f64>)> {
        self.points
            .iter()
            .filter(|p| p.label.architecture == arch)
            .map(|p| (p.label.value.unwrap_or(f64::NAN), p.metrics.satisfaction_rate()))
            .collect()
    }

    pub fn capacity(&self, arch: Architecture) -> Capacity {
        let curve = self.curve(arch);
        match self.axis {
            SweepAxis::GpuCount => smallest_meeting(&curve, self.alpha).map_or(Capacity::None, |v| Capacity::Gpus(v as u32)),
            SweepAxis::UeCount | SweepAxis::JobRate => match largest_meeting(&curve, self.alpha) {
                Some(value) => {
                    let arrival_rate = self
                        .points
                        .iter()
                        .find(|p| p.label.architecture == arch && p.label.value == Some(value))
                        .map_or(f64::NAN, |p| p.label.arrival_rate);
                    Capacity::Arrival { value, arrival_rate }
                }
                None => Capacity::None,
            },
        }
    }
}

/// Largest grid value whose satisfaction is at least `alpha`. No
/// interpolation between grid points.
pub fn largest_meeting(curve: &[(f64, Option<f64>)], alpha: f64) -> Option<f64> {
    curve
        .iter()
        .filter(|(_, s)| s.is_some_and(|s| s >= alpha))
        .map(|&(v, _)| v)
        .max_by(f64::total_cmp)
}

/// Smallest grid value whose satisfaction is at least `alpha`.
pub fn smallest_meeting(curve: &[(f64, Option<f64>)], alpha: f64) -> Option<f64> {
    curve
        .iter()
        .filter(|(_, s)| s.is_some_and(|s| s >= alpha))
        .map(|&(v, _)| v)
        .min_by(f64::total_cmp)
}

/// Runs every `(architecture, grid value, replication)` triple as an
/// independent job. Each grid value reuses the same replication seeds.
pub fn run_sweep(cfg: &ScenarioConfig, exec: Execution) -> Result<SweepReport> {
    let sweep = cfg
        .file
        .sweep
        .clone()
        .ok_or_else(|| ConfigError::Invalid("the scenario has no [sweep] section".into()))?;
    let archs = cfg.sweep_architectures();
    let reps = cfg.file.replications;
    let mut jobs = Vec::new();
    for &arch in &archs {
        for &value in &sweep.values {
            for r in 0..reps {
                jobs.push((arch, value, replication_seed(cfg.file.seed, r)));
            }
        }
    }
    let tallies = map_runs(exec, jobs.clone(), |(arch, value, seed)| {
        run_replication(cfg, arch, seed, Some((sweep.axis, value)))
    });
    let mut tallies = jobs.into_iter().zip(tallies);
    let mut points = Vec::new();
    for &arch in &archs {
        for &value in &sweep.values {
            let point = Some((sweep.axis, value));
            let mut replications = Vec::with_capacity(reps as usize);
            for _ in 0..reps {
                let ((_, _, seed), tally) = tallies.next().expect("one result per job");
                replications.push((seed, tally?));
            }
            points.push(SweepPoint {
                label: label(arch, point, &cfg.network_at(arch, cfg.file.seed, point)?),
                metrics: RunMetrics { replications },
            });
        }
    }
    Ok(SweepReport {
        axis: sweep.axis,
        alpha: cfg.file.alpha,
        points,
    })
}
