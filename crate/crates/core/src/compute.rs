//! Computing node: one server, a FCFS or slack-priority queue, an optional
//! deadline drop check, and classification of finished jobs.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand_chacha::rand_core::RngCore;
use rand_distr::{Distribution, Exp};

use crate::analytic::ManagementPolicy;
use crate::error::{Error, Result};
use crate::workload::{inference_latency, GpuSpec, Job, JobId, LlmModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum QueueDiscipline {
    Fcfs,
    /// Ascending `gen_time + b_total - comm_latency_observed`.
    SlackPriority,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServiceModel {
    ExponentialJob { rate: f64 },
    LlmRoofline { model: LlmModel, gpu: GpuSpec },
}

impl ServiceModel {
    /// Known service time for roofline service, the mean for exponential.
    pub fn expected(&self, job: &Job) -> Result<f64> {
        match self {
            ServiceModel::ExponentialJob { rate } => {
                if *rate > 0.0 && rate.is_finite() {
                    Ok(1.0 / rate)
                } else {
                    Err(Error::NoServiceCapacity("compute"))
                }
            }
            ServiceModel::LlmRoofline { model, gpu } => inference_latency(job, model, gpu),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, ServiceModel::LlmRoofline { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DropPolicy {
    pub enabled: bool,
    /// Repeat the deadline check when a job reaches the head of the queue.
    pub reevaluate_on_dequeue: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatisfactionRule {
    pub policy: ManagementPolicy,
    pub b_comm: f64,
    pub b_comp: f64,
}

impl SatisfactionRule {
    pub fn joint() -> Self {
        Self {
            policy: ManagementPolicy::Joint,
            b_comm: 0.0,
            b_comp: 0.0,
        }
    }

    pub fn disjoint(b_comm: f64, b_comp: f64) -> Self {
        Self {
            policy: ManagementPolicy::Disjoint,
            b_comm,
            b_comp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Satisfied,
    Unsatisfied,
    Dropped,
}

/// Measured latency components of a job. `None` means not measured.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Latencies {
    pub air: Option<f64>,
    pub wireline: Option<f64>,
    pub comp: Option<f64>,
    pub dropped: bool,
}

/// Decides whether a finished job met its budgets.
pub fn classify(job: &Job, rule: &SatisfactionRule, lat: &Latencies) -> Result<Outcome> {
    if lat.dropped {
        return Ok(Outcome::Dropped);
    }
    let missing = |component| Error::MissingLatency { job: job.id, component };
    let air = lat.air.ok_or_else(|| missing("air"))?;
    let wireline = lat.wireline.ok_or_else(|| missing("wireline"))?;
    let comp = lat.comp.ok_or_else(|| missing("compute"))?;
    let comm = air + wireline;
    let within_total = comm + comp <= job.b_total;
    let ok = match rule.policy {
        ManagementPolicy::Joint => within_total,
        ManagementPolicy::Disjoint => within_total && comm <= rule.b_comm && comp <= rule.b_comp,
    };
    Ok(if ok { Outcome::Satisfied } else { Outcome::Unsatisfied })
}

#[derive(Debug, Clone, Copy)]
struct Waiting {
    key: f64,
    gen_time: f64,
    id: JobId,
    seq: u64,
    expected: f64,
    deadline: f64,
}

impl Waiting {
    /// `Less` means served earlier.
    fn service_order(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| self.gen_time.total_cmp(&other.gen_time))
            .then_with(|| self.id.cmp(&other.id))
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Waiting {
    fn eq(&self, other: &Self) -> bool {
        self.service_order(other) == Ordering::Equal
    }
}
impl Eq for Waiting {}
impl PartialOrd for Waiting {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Waiting {
    fn cmp(&self, other: &Self) -> Ordering {
        other.service_order(self)
    }
}

/// Jobs waiting for the server, ordered by the queue discipline.
#[derive(Debug, Clone)]
pub struct ComputeQueue {
    discipline: QueueDiscipline,
    heap: BinaryHeap<Waiting>,
    next_seq: u64,
}

impl ComputeQueue {
    pub fn new(discipline: QueueDiscipline) -> Self {
        Self {
            discipline,
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    pub fn discipline(&self) -> QueueDiscipline {
        self.discipline
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    fn entry(&self, job: &Job, now: f64, expected: f64) -> Result<Waiting> {
        let key = match self.discipline {
            QueueDiscipline::Fcfs => now,
            QueueDiscipline::SlackPriority => {
                let comm = job.comm_latency_observed().ok_or(Error::MissingLatency {
                    job: job.id,
                    component: "communication",
                })?;
                job.gen_time() + job.b_total - comm
            }
        };
        Ok(Waiting {
            key,
            gen_time: job.gen_time(),
            id: job.id,
            seq: self.next_seq,
            expected,
            deadline: job.deadline(),
        })
    }

    /// Sum of expected service times of waiting jobs that would be served
    /// before `entry`. Heap iteration order is a function of the operation
    /// history, so the sum is reproducible.
    fn work_ahead(&self, entry: &Waiting) -> f64 {
        self.heap
            .iter()
            .filter(|w| w.service_order(entry) == Ordering::Less)
            .map(|w| w.expected)
            .sum()
    }

    /// Priority key `job` would get if it joined the queue at `now`.
    pub fn key(&self, job: &Job, now: f64) -> Result<f64> {
        Ok(self.entry(job, now, 0.0)?.key)
    }

    /// Priority key of the job that would be served next.
    pub fn head_key(&self) -> Option<f64> {
        self.heap.peek().map(|w| w.key)
    }

    /// Keys of all waiting jobs, in arbitrary order.
    pub fn keys(&self) -> impl Iterator<Item = f64> + '_ {
        self.heap.iter().map(|w| w.key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct InService {
    id: JobId,
    start: f64,
    service: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnqueueOutcome {
    Queued { predicted_completion: f64 },
    Dropped { predicted_completion: f64 },
}

/// Result of trying to start service.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Started {
    /// `(job, key at dequeue, completion time)` of the job now in service.
    pub job: Option<(JobId, f64, f64)>,
    /// Jobs dropped by the re-evaluation check while looking for one to serve.
    pub dropped: Vec<JobId>,
}

/// Single-server computing node.
#[derive(Debug, Clone)]
pub struct ComputeNode {
    queue: ComputeQueue,
    service: ServiceModel,
    drop: DropPolicy,
    exp: Option<Exp<f64>>,
    in_service: Option<InService>,
    present: BTreeSet<JobId>,
}

impl ComputeNode {
    pub fn new(discipline: QueueDiscipline, service: ServiceModel, drop: DropPolicy) -> Self {
        let exp = match service {
            ServiceModel::ExponentialJob { rate } if rate > 0.0 => Exp::new(rate).ok(),
            _ => None,
        };
        Self {
            queue: ComputeQueue::new(discipline),
            service,
            drop,
            exp,
            in_service: None,
            present: BTreeSet::new(),
        }
    }

    pub fn queue(&self) -> &ComputeQueue {
        &self.queue
    }

    pub fn is_idle(&self) -> bool {
        self.in_service.is_none()
    }

    pub fn service_model(&self) -> &ServiceModel {
        &self.service
    }

    /// Time the server frees up, as the drop check sees it: the exact finish
    /// for deterministic service, one mean service time from now otherwise.
    fn server_free_at(&self, now: f64) -> Result<f64> {
        Ok(match (&self.in_service, &self.service) {
            (None, _) => now,
            (Some(s), ServiceModel::LlmRoofline { .. }) => (s.start + s.service).max(now),
            (Some(_), ServiceModel::ExponentialJob { rate }) => now + 1.0 / rate,
        })
    }

    /// Predicted completion if `job` joined the queue at `now`.
    pub fn predicted_completion(&self, job: &Job, now: f64) -> Result<f64> {
        let expected = self.service.expected(job)?;
        let entry = self.queue.entry(job, now, expected)?;
        Ok(self.server_free_at(now)? + self.queue.work_ahead(&entry) + expected)
    }

    /// Admits a delivered job, or drops it when the drop policy predicts it
    /// would finish after its deadline.
    pub fn enqueue(&mut self, job: &Job, now: f64) -> Result<EnqueueOutcome> {
        if job.comm_latency_observed().is_none() {
            return Err(Error::MissingLatency {
                job: job.id,
                component: "communication",
            });
        }
        if !self.present.insert(job.id) {
            return Err(Error::DuplicateEnqueue(job.id));
        }
        let expected = self.service.expected(job)?;
        let entry = self.queue.entry(job, now, expected)?;
        let predicted_completion = self.server_free_at(now)? + self.queue.work_ahead(&entry) + expected;
        if self.drop.enabled && predicted_completion > job.deadline() {
            self.present.remove(&job.id);
            return Ok(EnqueueOutcome::Dropped { predicted_completion });
        }
        self.queue.heap.push(entry);
        self.queue.next_seq += 1;
        Ok(EnqueueOutcome::Queued { predicted_completion })
    }

    /// Starts the head job if the server is idle. Non-preemptive.
    pub fn start_service<R: RngCore + ?Sized>(&mut self, now: f64, rng: &mut R) -> Result<Started> {
        let mut started = Started::default();
        if self.in_service.is_some() {
            return Ok(started);
        }
        while let Some(head) = self.queue.heap.pop() {
            if self.drop.enabled && self.drop.reevaluate_on_dequeue && now + head.expected > head.deadline {
                self.present.remove(&head.id);
                started.dropped.push(head.id);
                continue;
            }
            let service = match self.service {
                ServiceModel::LlmRoofline { .. } => head.expected,
                ServiceModel::ExponentialJob { .. } => {
                    self.exp.ok_or(Error::NoServiceCapacity("compute"))?.sample(rng)
                }
            };
            self.in_service = Some(InService {
                id: head.id,
                start: now,
                service,
            });
            started.job = Some((head.id, head.key, now + service));
            break;
        }
        Ok(started)
    }

    /// Releases the server; returns the job that was in service.
    pub fn finish(&mut self) -> Option<JobId> {
        let done = self.in_service.take()?;
        self.present.remove(&done.id);
        Some(done.id)
    }
}
