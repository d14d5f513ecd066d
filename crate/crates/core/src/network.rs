//! The offloading network as a discrete-event model: Poisson job arrivals,
//! background traffic, the uplink, the wireline hop and the computing node.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::compute::{classify, ComputeNode, EnqueueOutcome, Latencies, Outcome, QueueDiscipline, SatisfactionRule, ServiceModel, DropPolicy};
use crate::engine::{poisson_interarrival, run_until, Event, EventQueue, Model, RngStreams, RunStats, Stream};
use crate::error::{non_negative, Error, Result};
use crate::radio::{deliver_to_compute, packetize, Packet, PriorityClass, Transmission, UeConfig, Uplink, UplinkChannel, UplinkMode, WirelineLink};
use crate::workload::{Job, JobId};

/// Shape of every generated job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JobTemplate {
    pub n_input: u32,
    pub n_output: u32,
    pub b_total: f64,
    pub bytes_per_token: f64,
    pub max_packet_bits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeConfig {
    pub discipline: QueueDiscipline,
    pub service: ServiceModel,
    pub drop: DropPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub ue: UeConfig,
    pub uplink: UplinkChannel,
    pub background_packet_bits: u64,
    pub wireline: WirelineLink,
    pub compute: ComputeConfig,
    pub rule: SatisfactionRule,
    pub job: JobTemplate,
    /// No arrivals are generated after this time; the run stops here.
    pub horizon: f64,
    /// Jobs generated before this time are simulated but not counted.
    pub warmup: f64,
    /// Jobs generated in the last `cooldown` seconds before the horizon are
    /// simulated but not counted, so counted jobs have time to resolve.
    pub cooldown: f64,
    pub seed: u64,
    /// Keep per-job stage sojourns for every k-th counted job.
    pub tag_every: Option<u64>,
    /// Record scheduling decisions in [`RunOutcome::trace`].
    pub record_trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    JobArrival,
    BackgroundPacket,
    PacketUplinkDone,
    WirelineDelivery(JobId),
    ComputeStart,
    ComputeDone(JobId),
}

/// Counts and latency sums over counted (post-warm-up) jobs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tally {
    pub generated: u64,
    pub satisfied: u64,
    pub unsatisfied: u64,
    pub dropped: u64,
    pub in_flight: u64,
    pub sum_air: f64,
    pub sum_comm: f64,
    pub sum_comp: f64,
    pub sum_e2e: f64,
    pub sum_tokens_per_second: f64,
}

impl Tally {
    /// Jobs with a final outcome.
    pub fn resolved(&self) -> u64 {
        self.satisfied + self.unsatisfied + self.dropped
    }

    /// Jobs that finished service (dropped jobs excluded).
    pub fn completed(&self) -> u64 {
        self.satisfied + self.unsatisfied
    }

    /// Satisfied over resolved; dropped jobs count as unsatisfied.
    pub fn satisfaction_rate(&self) -> Option<f64> {
        let n = self.resolved();
        (n > 0).then(|| self.satisfied as f64 / n as f64)
    }

    fn completed_mean(&self, sum: f64) -> Option<f64> {
        let n = self.completed();
        (n > 0).then(|| sum / n as f64)
    }

    pub fn mean_air_latency(&self) -> Option<f64> {
        self.completed_mean(self.sum_air)
    }

    /// Generation to compute-queue arrival, wireline included.
    pub fn mean_comm_latency(&self) -> Option<f64> {
        self.completed_mean(self.sum_comm)
    }

    pub fn mean_comp_latency(&self) -> Option<f64> {
        self.completed_mean(self.sum_comp)
    }

    pub fn mean_e2e(&self) -> Option<f64> {
        self.completed_mean(self.sum_e2e)
    }

    pub fn mean_tokens_per_second(&self) -> Option<f64> {
        self.completed_mean(self.sum_tokens_per_second)
    }
}

/// Stage sojourns of one sampled job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedJob {
    pub id: JobId,
    pub air: f64,
    pub comm: f64,
    pub comp: Option<f64>,
    pub outcome: Outcome,
}

/// A scheduling decision, kept when tracing is on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceRecord {
    UplinkStart {
        time: f64,
        class: PriorityClass,
        job_packets_waiting: usize,
    },
    ComputeStart {
        time: f64,
        id: JobId,
        key: f64,
        /// Smallest key still waiting after this dequeue.
        min_waiting_key: Option<f64>,
    },
    Enqueue {
        time: f64,
        id: JobId,
        gen_time: f64,
        key: f64,
        predicted_completion: f64,
        deadline: f64,
        dropped: bool,
    },
    ComputeDone {
        time: f64,
        id: JobId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub tally: Tally,
    pub tagged: Vec<TaggedJob>,
    pub trace: Vec<TraceRecord>,
    pub stats: RunStats,
}

#[derive(Debug, Clone)]
struct JobState {
    job: Job,
    packets_left: usize,
    air_done: Option<f64>,
    delivered_at: Option<f64>,
    counted: bool,
    tagged: bool,
}

/// Simulation state for one run.
pub struct Network {
    cfg: NetworkConfig,
    jobs: BTreeMap<JobId, JobState>,
    uplink: Uplink,
    compute: ComputeNode,
    arrivals: ChaCha8Rng,
    background: ChaCha8Rng,
    uplink_rng: ChaCha8Rng,
    compute_rng: ChaCha8Rng,
    next_job: JobId,
    counted_jobs: u64,
    compute_start_pending: bool,
    tally: Tally,
    tagged: Vec<TaggedJob>,
    trace: Vec<TraceRecord>,
}

impl Network {
    pub fn new(cfg: NetworkConfig) -> Result<Self> {
        non_negative("horizon", cfg.horizon)?;
        non_negative("warmup", cfg.warmup)?;
        non_negative("cooldown", cfg.cooldown)?;
        non_negative("per-UE job rate", cfg.ue.per_ue_job_rate)?;
        non_negative("background rate", cfg.ue.background_rate)?;
        non_negative("wireline delay", cfg.wireline.delay)?;
        if cfg.tag_every == Some(0) {
            return Err(Error::OutOfRange {
                what: "tag_every",
                value: 0.0,
                expected: ">= 1",
            });
        }
        let streams = RngStreams::new(cfg.seed);
        Ok(Self {
            uplink: Uplink::new(cfg.uplink),
            compute: ComputeNode::new(cfg.compute.discipline, cfg.compute.service, cfg.compute.drop),
            arrivals: streams.stream(Stream::Arrivals),
            background: streams.stream(Stream::Background),
            uplink_rng: streams.stream(Stream::UplinkService),
            compute_rng: streams.stream(Stream::ComputeService),
            cfg,
            jobs: BTreeMap::new(),
            next_job: 0,
            counted_jobs: 0,
            compute_start_pending: false,
            tally: Tally::default(),
            tagged: Vec::new(),
            trace: Vec::new(),
        })
    }

    fn background_packet_rate(&self) -> f64 {
        if self.cfg.uplink.mode != UplinkMode::PacketShared || self.cfg.background_packet_bits == 0 {
            return 0.0;
        }
        self.cfg.ue.aggregate_background_rate() / self.cfg.background_packet_bits as f64
    }

    /// Schedules the first arrival of each traffic source.
    pub fn prime(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        let job_rate = self.cfg.ue.aggregate_job_rate();
        if job_rate > 0.0 {
            let dt = poisson_interarrival(&mut self.arrivals, job_rate)?;
            self.schedule_before_horizon(queue, dt, EventKind::JobArrival)?;
        }
        let bg_rate = self.background_packet_rate();
        if bg_rate > 0.0 {
            let dt = poisson_interarrival(&mut self.background, bg_rate)?;
            self.schedule_before_horizon(queue, dt, EventKind::BackgroundPacket)?;
        }
        Ok(())
    }

    fn schedule_before_horizon(&self, queue: &mut EventQueue<EventKind>, delay: f64, kind: EventKind) -> Result<()> {
        let at = queue.now() + delay;
        if at < self.cfg.horizon {
            queue.schedule(at, kind)?;
        }
        Ok(())
    }

    fn on_arrival(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        let now = queue.now();
        let t = &self.cfg.job;
        let id = self.next_job;
        self.next_job += 1;
        let job = Job::new(id, now, t.n_input, t.n_output, t.b_total)?;

        let counted = now >= self.cfg.warmup && now < self.cfg.horizon - self.cfg.cooldown;
        let mut tagged = false;
        if counted {
            self.tally.generated += 1;
            tagged = self.cfg.tag_every.is_some_and(|k| self.counted_jobs % k == 0);
            self.counted_jobs += 1;
        }

        let packets_left = match self.cfg.uplink.mode {
            UplinkMode::ExponentialJob => {
                self.uplink.push_job(id);
                1
            }
            UplinkMode::PacketShared => {
                let packets = packetize(&job, t.bytes_per_token, t.max_packet_bits, now)?;
                let n = packets.len();
                for p in packets {
                    self.uplink.push_packet(p);
                }
                n
            }
        };
        self.jobs.insert(
            id,
            JobState {
                job,
                packets_left,
                air_done: None,
                delivered_at: None,
                counted,
                tagged,
            },
        );

        let dt = poisson_interarrival(&mut self.arrivals, self.cfg.ue.aggregate_job_rate())?;
        self.schedule_before_horizon(queue, dt, EventKind::JobArrival)?;
        self.try_start_uplink(queue)
    }

    fn on_background(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        self.uplink.push_packet(Packet::background(self.cfg.background_packet_bits, queue.now()));
        let rate = self.background_packet_rate();
        let dt = poisson_interarrival(&mut self.background, rate)?;
        self.schedule_before_horizon(queue, dt, EventKind::BackgroundPacket)?;
        self.try_start_uplink(queue)
    }

    fn try_start_uplink(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        if !self.uplink.is_idle() {
            return Ok(());
        }
        let waiting_before = self.uplink.queued_job_packets();
        if let Some(service) = self.uplink.serve_next(&mut self.uplink_rng)? {
            if self.cfg.record_trace {
                if let Some(Transmission::Packet(p)) = self.uplink.current() {
                    let class = p.priority_class;
                    let job_packets_waiting = match class {
                        PriorityClass::Background => waiting_before,
                        PriorityClass::JobHigh => waiting_before.saturating_sub(1),
                    };
                    self.trace.push(TraceRecord::UplinkStart {
                        time: queue.now(),
                        class,
                        job_packets_waiting,
                    });
                }
            }
            queue.schedule_in(service, EventKind::PacketUplinkDone)?;
        }
        Ok(())
    }

    fn on_uplink_done(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        let finished_job = match self.uplink.complete() {
            Some(Transmission::Job(id)) => Some(id),
            Some(Transmission::Packet(p)) => match p.owner_job {
                Some(id) => {
                    let state = self.jobs.get_mut(&id).ok_or(Error::UnknownJob(id))?;
                    state.packets_left -= 1;
                    (state.packets_left == 0).then_some(id)
                }
                None => None,
            },
            None => None,
        };
        if let Some(id) = finished_job {
            let now = queue.now();
            let state = self.jobs.get_mut(&id).ok_or(Error::UnknownJob(id))?;
            state.air_done = Some(now);
            let at = deliver_to_compute(&mut state.job, &self.cfg.wireline, now)?;
            queue.schedule(at, EventKind::WirelineDelivery(id))?;
        }
        self.try_start_uplink(queue)
    }

    fn on_delivery(&mut self, id: JobId, queue: &mut EventQueue<EventKind>) -> Result<()> {
        let now = queue.now();
        let state = self.jobs.get_mut(&id).ok_or(Error::UnknownJob(id))?;
        if state.delivered_at.is_some() {
            return Err(Error::DoubleDelivery(id));
        }
        state.delivered_at = Some(now);
        let key = self.compute.queue().key(&state.job, now)?;
        let outcome = self.compute.enqueue(&state.job, now)?;
        let (predicted_completion, dropped) = match outcome {
            EnqueueOutcome::Queued { predicted_completion } => (predicted_completion, false),
            EnqueueOutcome::Dropped { predicted_completion } => (predicted_completion, true),
        };
        if self.cfg.record_trace {
            self.trace.push(TraceRecord::Enqueue {
                time: now,
                id,
                gen_time: state.job.gen_time(),
                key,
                predicted_completion,
                deadline: state.job.deadline(),
                dropped,
            });
        }
        if dropped {
            self.resolve(id, now, true)?;
        } else {
            self.request_compute_start(queue)?;
        }
        Ok(())
    }

    fn request_compute_start(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        if self.compute.is_idle() && !self.compute_start_pending && !self.compute.queue().is_empty() {
            self.compute_start_pending = true;
            queue.schedule_in(0.0, EventKind::ComputeStart)?;
        }
        Ok(())
    }

    fn on_compute_start(&mut self, queue: &mut EventQueue<EventKind>) -> Result<()> {
        self.compute_start_pending = false;
        let now = queue.now();
        let started = self.compute.start_service(now, &mut self.compute_rng)?;
        for id in started.dropped {
            self.resolve(id, now, true)?;
        }
        if let Some((id, key, done)) = started.job {
            if self.cfg.record_trace {
                let min_waiting_key = self.compute.queue().keys().min_by(f64::total_cmp);
                self.trace.push(TraceRecord::ComputeStart {
                    time: now,
                    id,
                    key,
                    min_waiting_key,
                });
            }
            queue.schedule(done, EventKind::ComputeDone(id))?;
        }
        Ok(())
    }

    fn on_compute_done(&mut self, id: JobId, queue: &mut EventQueue<EventKind>) -> Result<()> {
        let now = queue.now();
        match self.compute.finish() {
            Some(done) if done == id => {}
            _ => return Err(Error::UnknownJob(id)),
        }
        if self.cfg.record_trace {
            self.trace.push(TraceRecord::ComputeDone { time: now, id });
        }
        self.resolve(id, now, false)?;
        self.request_compute_start(queue)
    }

    fn resolve(&mut self, id: JobId, now: f64, dropped: bool) -> Result<()> {
        let state = self.jobs.remove(&id).ok_or(Error::UnknownJob(id))?;
        if !state.counted {
            return Ok(());
        }
        let job = &state.job;
        let air_done = state.air_done.ok_or(Error::MissingLatency { job: id, component: "air" })?;
        let air = air_done - job.gen_time();
        let comm = job.comm_latency_observed().ok_or(Error::MissingLatency {
            job: id,
            component: "communication",
        })?;
        let comp = (!dropped).then(|| now - state.delivered_at.unwrap_or(now));
        let lat = Latencies {
            air: Some(air),
            wireline: Some(self.cfg.wireline.delay),
            comp,
            dropped,
        };
        let outcome = classify(job, &self.cfg.rule, &lat)?;
        let t = &mut self.tally;
        match outcome {
            Outcome::Satisfied => t.satisfied += 1,
            Outcome::Unsatisfied => t.unsatisfied += 1,
            Outcome::Dropped => t.dropped += 1,
        }
        if let Some(comp) = comp {
            let e2e = now - job.gen_time();
            t.sum_air += air;
            t.sum_comm += comm;
            t.sum_comp += comp;
            t.sum_e2e += e2e;
            t.sum_tokens_per_second += job.total_tokens() as f64 / e2e;
        }
        if state.tagged {
            self.tagged.push(TaggedJob {
                id,
                air,
                comm,
                comp,
                outcome,
            });
        }
        Ok(())
    }

    /// Ends the run and returns the collected metrics.
    pub fn finish(mut self, stats: RunStats) -> RunOutcome {
        self.tally.in_flight = self.jobs.values().filter(|s| s.counted).count() as u64;
        RunOutcome {
            tally: self.tally,
            tagged: self.tagged,
            trace: self.trace,
            stats,
        }
    }
}

impl Model for Network {
    type Event = EventKind;

    fn handle(&mut self, event: Event<EventKind>, queue: &mut EventQueue<EventKind>) -> Result<()> {
        match event.kind {
            EventKind::JobArrival => self.on_arrival(queue),
            EventKind::BackgroundPacket => self.on_background(queue),
            EventKind::PacketUplinkDone => self.on_uplink_done(queue),
            EventKind::WirelineDelivery(id) => self.on_delivery(id, queue),
            EventKind::ComputeStart => self.on_compute_start(queue),
            EventKind::ComputeDone(id) => self.on_compute_done(id, queue),
        }
    }
}

/// Runs one replication of the network up to its horizon.
pub fn simulate(cfg: &NetworkConfig) -> Result<RunOutcome> {
    let mut world = Network::new(cfg.clone())?;
    let mut queue = EventQueue::new();
    world.prime(&mut queue)?;
    let stats = run_until(&mut world, &mut queue, cfg.horizon)?;
    Ok(world.finish(stats))
}
