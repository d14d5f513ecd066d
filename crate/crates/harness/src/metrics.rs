//! Per-run metrics, pooling across replications and the CSV row layout.

use icc_core::network::Tally;
use serde::{Deserialize, Serialize};

use crate::config::{Architecture, SweepAxis};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// Metrics of one scenario point over all of its replications.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// `(seed, tally)` for each replication, in replication order.
    pub replications: Vec<(u64, Tally)>,
}

impl RunMetrics {
    /// Counts and sums added over replications.
    pub fn pooled(&self) -> Tally {
        self.replications.iter().fold(Tally::default(), |mut acc, (_, t)| {
            acc.generated += t.generated;
            acc.satisfied += t.satisfied;
            acc.unsatisfied += t.unsatisfied;
            acc.dropped += t.dropped;
            acc.in_flight += t.in_flight;
            acc.sum_air += t.sum_air;
            acc.sum_comm += t.sum_comm;
            acc.sum_comp += t.sum_comp;
            acc.sum_e2e += t.sum_e2e;
            acc.sum_tokens_per_second += t.sum_tokens_per_second;
            acc
        })
    }

    /// Satisfied over resolved jobs, pooled over replications.
    pub fn satisfaction_rate(&self) -> Option<f64> {
        self.pooled().satisfaction_rate()
    }

    pub fn satisfaction_half_width(&self) -> Option<f64> {
        half_width(self.replications.iter().filter_map(|(_, t)| t.satisfaction_rate()))
    }

    pub fn tokens_per_second_half_width(&self) -> Option<f64> {
        half_width(self.replications.iter().filter_map(|(_, t)| t.mean_tokens_per_second()))
    }

    /// One row per replication followed by the pooled row.
    pub fn rows(&self, point: &PointLabel) -> Vec<MetricsRow> {
        let mut rows: Vec<MetricsRow> = self
            .replications
            .iter()
            .enumerate()
            .map(|(i, (seed, t))| MetricsRow::new(point, Some(i as u32), Some(*seed), 1, t, None, None))
            .collect();
        rows.push(MetricsRow::new(
            point,
            None,
            None,
            self.replications.len() as u32,
            &self.pooled(),
            self.satisfaction_half_width(),
            self.tokens_per_second_half_width(),
        ));
        rows
    }
}

/// Where a run sits in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PointLabel {
    pub architecture: Architecture,
    pub axis: Option<SweepAxis>,
    pub value: Option<f64>,
    pub arrival_rate: f64,
    pub gpu_count: Option<u32>,
}

/// One CSV line. Rows with an empty `replication` hold the pooled values
/// and the 95% half-widths across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub architecture: Architecture,
    pub axis: Option<SweepAxis>,
    pub value: Option<f64>,
    pub replication: Option<u32>,
    pub seed: Option<u64>,
    pub replications: u32,
    /// Aggregate job arrival rate, jobs/s.
    pub arrival_rate: f64,
    pub gpu_count: Option<u32>,
    pub jobs_generated: u64,
    /// Post-warm-up jobs with an outcome: satisfied + unsatisfied + dropped.
    pub jobs_total: u64,
    pub jobs_satisfied: u64,
    pub jobs_unsatisfied: u64,
    pub jobs_dropped: u64,
    pub jobs_in_flight: u64,
    pub satisfaction_rate: Option<f64>,
    pub satisfaction_half_width: Option<f64>,
    /// Seconds, UE to end of uplink.
    pub mean_air_latency: Option<f64>,
    /// Seconds, UE to compute queue (air plus wireline).
    pub mean_comm_latency: Option<f64>,
    /// Seconds, queueing plus service at the computing node.
    pub mean_comp_latency: Option<f64>,
    pub mean_e2e: Option<f64>,
    pub mean_tokens_per_second: Option<f64>,
    pub tokens_per_second_half_width: Option<f64>,
}

impl MetricsRow {
    fn new(
        point: &PointLabel,
        replication: Option<u32>,
        seed: Option<u64>,
        replications: u32,
        t: &Tally,
        satisfaction_half_width: Option<f64>,
        tokens_per_second_half_width: Option<f64>,
    ) -> Self {
        Self {
            architecture: point.architecture,
            axis: point.axis,
            value: point.value,
            replication,
            seed,
            replications,
            arrival_rate: point.arrival_rate,
            gpu_count: point.gpu_count,
            jobs_generated: t.generated,
            jobs_total: t.resolved(),
            jobs_satisfied: t.satisfied,
            jobs_unsatisfied: t.unsatisfied,
            jobs_dropped: t.dropped,
            jobs_in_flight: t.in_flight,
            satisfaction_rate: t.satisfaction_rate(),
            satisfaction_half_width,
            mean_air_latency: t.mean_air_latency(),
            mean_comm_latency: t.mean_comm_latency(),
            mean_comp_latency: t.mean_comp_latency(),
            mean_e2e: t.mean_e2e(),
            mean_tokens_per_second: t.mean_tokens_per_second(),
            tokens_per_second_half_width,
        }
    }

    pub fn is_pooled(&self) -> bool {
        self.replication.is_none()
    }
}

/// `1.96 * s / sqrt(n)` with the sample standard deviation; needs two values.
pub fn half_width(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.into_iter().collect();
    let n = v.len();
    if n < 2 {
        return None;
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some(Z95 * var.sqrt() / (n as f64).sqrt())
}

/// Sample Pearson correlation; `None` when either side is constant.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return None;
    }
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (mx / n, my / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tally(satisfied: u64, unsatisfied: u64, dropped: u64) -> Tally {
        Tally {
            generated: satisfied + unsatisfied + dropped,
            satisfied,
            unsatisfied,
            dropped,
            sum_e2e: 0.05 * (satisfied + unsatisfied) as f64,
            ..Tally::default()
        }
    }

    #[test]
    fn half_width_of_known_sample() {
        // s = 1 for {1, 2, 3}
        let hw = half_width([1.0, 2.0, 3.0]).unwrap();
        assert!((hw - 1.96 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(half_width([4.0]), None);
        assert_eq!(half_width([2.0, 2.0]), Some(0.0));
    }

    #[test]
    fn pearson_extremes() {
        let line: Vec<_> = (0..10).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert!((pearson(&line).unwrap() - 1.0).abs() < 1e-12);
        let anti: Vec<_> = (0..10).map(|i| (i as f64, -(i as f64))).collect();
        assert!((pearson(&anti).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[(1.0, 2.0), (1.0, 3.0)]), None);
    }

    #[test]
    fn pooled_rate_is_satisfied_over_total() {
        let m = RunMetrics {
            replications: vec![(1, tally(90, 5, 5)), (2, tally(80, 20, 0))],
        };
        let label = PointLabel {
            architecture: Architecture::IccRan,
            axis: None,
            value: None,
            arrival_rate: 10.0,
            gpu_count: None,
        };
        let rows = m.rows(&label);
        assert_eq!(rows.len(), 3);
        let pooled = rows.last().unwrap();
        assert!(pooled.is_pooled());
        assert_eq!(pooled.jobs_total, 200);
        assert_eq!(pooled.satisfaction_rate, Some(170.0 / 200.0));
        assert_eq!(pooled.replications, 2);
        assert!(pooled.satisfaction_half_width.unwrap() > 0.0);
        assert_eq!(rows[0].satisfaction_half_width, None);
        assert_eq!(rows[1].seed, Some(2));
    }

    #[test]
    fn zero_jobs_leave_rates_absent() {
        let m = RunMetrics {
            replications: vec![(1, Tally::default())],
        };
        assert_eq!(m.satisfaction_rate(), None);
        assert_eq!(m.satisfaction_half_width(), None);
    }
}
