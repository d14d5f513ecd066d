//! Replays a simulation trace against the scheduling rules.

use icc_core::network::TraceRecord;
use icc_core::radio::PriorityClass;

#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct TraceSummary {
    pub background_starts: usize,
    pub background_starts_with_jobs_waiting: usize,
    pub compute_starts: usize,
    pub out_of_order_starts: usize,
    pub enqueues: usize,
    pub drops: usize,
    pub prediction_mismatches: usize,
    pub drop_rule_violations: usize,
}

impl TraceSummary {
    pub fn clean(&self) -> bool {
        self.background_starts_with_jobs_waiting == 0
            && self.out_of_order_starts == 0
            && self.prediction_mismatches == 0
            && self.drop_rule_violations == 0
    }
}

fn order(key: f64, gen: f64, id: u64) -> impl Fn(&(f64, f64, u64)) -> bool {
    move |w: &(f64, f64, u64)| {
        w.0.total_cmp(&key)
            .then(w.1.total_cmp(&gen))
            .then(w.2.cmp(&id))
            .is_lt()
    }
}

/// Checks every record of `trace`. `service` is the deterministic service
/// time shared by all jobs; each drop-check prediction must equal, bit for
/// bit, server-free time plus one `service` per job ahead plus its own.
pub fn check(trace: &[TraceRecord], service: f64) -> TraceSummary {
    let mut s = TraceSummary::default();
    let mut waiting: Vec<(f64, f64, u64)> = Vec::new();
    let mut busy_until: Option<f64> = None;
    for record in trace {
        match *record {
            TraceRecord::UplinkStart {
                class: PriorityClass::Background,
                job_packets_waiting,
                ..
            } => {
                s.background_starts += 1;
                if job_packets_waiting > 0 {
                    s.background_starts_with_jobs_waiting += 1;
                }
            }
            TraceRecord::UplinkStart { .. } => {}
            TraceRecord::ComputeStart {
                time,
                id,
                key,
                min_waiting_key,
            } => {
                s.compute_starts += 1;
                if min_waiting_key.is_some_and(|m| key > m) {
                    s.out_of_order_starts += 1;
                }
                waiting.retain(|w| w.2 != id);
                busy_until = Some(time + service);
            }
            TraceRecord::ComputeDone { .. } => busy_until = None,
            TraceRecord::Enqueue {
                time,
                id,
                gen_time,
                key,
                predicted_completion,
                deadline,
                dropped,
            } => {
                s.enqueues += 1;
                let ahead = waiting.iter().filter(|w| order(key, gen_time, id)(w)).count();
                let work: f64 = (0..ahead).map(|_| service).sum();
                let expected = busy_until.map_or(time, |b| b.max(time)) + work + service;
                if expected != predicted_completion {
                    s.prediction_mismatches += 1;
                }
                if dropped {
                    s.drops += 1;
                }
                if dropped != (predicted_completion > deadline) {
                    s.drop_rule_violations += 1;
                }
                if !dropped {
                    waiting.push((key, gen_time, id));
                }
            }
        }
    }
    s
}
