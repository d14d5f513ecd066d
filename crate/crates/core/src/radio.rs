//! Uplink air interface and wireline transport.
//!
//! The uplink is a single non-preemptive server. In `ExponentialJob` mode a
//! whole job is one customer with an exponential service time. In
//! `PacketShared` mode prompts are cut into packets that share one aggregate
//! capacity with background traffic, served FIFO or with job packets ahead of
//! background packets.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand_chacha::rand_core::RngCore;
use rand_distr::{Distribution, Exp};

use crate::error::{non_negative, Error, Result};
use crate::workload::{Job, JobId};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UeConfig {
    pub ue_count: u32,
    /// Jobs per second per UE.
    pub per_ue_job_rate: f64,
    /// Background bits per second per UE.
    pub background_rate: f64,
}

impl UeConfig {
    pub fn aggregate_job_rate(&self) -> f64 {
        self.ue_count as f64 * self.per_ue_job_rate
    }

    pub fn aggregate_background_rate(&self) -> f64 {
        self.ue_count as f64 * self.background_rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorityClass {
    JobHigh,
    Background,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub owner_job: Option<JobId>,
    pub size_bits: u64,
    pub priority_class: PriorityClass,
    pub enqueue_time: f64,
}

impl Packet {
    pub fn background(size_bits: u64, enqueue_time: f64) -> Self {
        Self {
            owner_job: None,
            size_bits,
            priority_class: PriorityClass::Background,
            enqueue_time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum UplinkMode {
    ExponentialJob,
    PacketShared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum UplinkDiscipline {
    Fifo,
    JobPriority,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkChannel {
    pub mode: UplinkMode,
    /// Jobs per second, `ExponentialJob` mode only.
    pub exp_rate: f64,
    /// Bits per second, `PacketShared` mode only.
    pub capacity: f64,
    pub discipline: UplinkDiscipline,
}

impl UplinkChannel {
    pub fn exponential(exp_rate: f64) -> Self {
        Self {
            mode: UplinkMode::ExponentialJob,
            exp_rate,
            capacity: 0.0,
            discipline: UplinkDiscipline::Fifo,
        }
    }

    pub fn packet_shared(capacity: f64, discipline: UplinkDiscipline) -> Self {
        Self {
            mode: UplinkMode::PacketShared,
            exp_rate: 0.0,
            capacity,
            discipline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirelineLink {
    pub delay: f64,
}

/// Splits a job's prompt into packets of at most `max_packet_bits`.
pub fn packetize(job: &Job, bytes_per_token: f64, max_packet_bits: u64, now: f64) -> Result<Vec<Packet>> {
    if !(bytes_per_token > 0.0) || !bytes_per_token.is_finite() || max_packet_bits == 0 {
        return Err(Error::EmptyPayload(job.id));
    }
    let total = libm::ceil(job.n_input as f64 * bytes_per_token * 8.0) as u64;
    if total == 0 {
        return Err(Error::EmptyPayload(job.id));
    }
    let full = total / max_packet_bits;
    let rest = total % max_packet_bits;
    let sizes = core::iter::repeat(max_packet_bits)
        .take(full as usize)
        .chain((rest > 0).then_some(rest));
    Ok(sizes
        .map(|size_bits| Packet {
            owner_job: Some(job.id),
            size_bits,
            priority_class: PriorityClass::JobHigh,
            enqueue_time: now,
        })
        .collect())
}

/// What the uplink is currently transmitting.
#[derive(Debug, Clone, PartialEq)]
pub enum Transmission {
    Packet(Packet),
    Job(JobId),
}

/// Uplink server state.
#[derive(Debug, Clone)]
pub struct Uplink {
    channel: UplinkChannel,
    exp: Option<Exp<f64>>,
    /// Job packets; every packet when the discipline is FIFO.
    high: VecDeque<Packet>,
    background: VecDeque<Packet>,
    jobs: VecDeque<JobId>,
    job_packets: usize,
    busy: Option<Transmission>,
}

impl Uplink {
    pub fn new(channel: UplinkChannel) -> Self {
        let exp = match channel.mode {
            UplinkMode::ExponentialJob => Exp::new(channel.exp_rate).ok().filter(|_| channel.exp_rate > 0.0),
            UplinkMode::PacketShared => None,
        };
        Self {
            channel,
            exp,
            high: VecDeque::new(),
            background: VecDeque::new(),
            jobs: VecDeque::new(),
            job_packets: 0,
            busy: None,
        }
    }

    pub fn channel(&self) -> &UplinkChannel {
        &self.channel
    }

    pub fn is_idle(&self) -> bool {
        self.busy.is_none()
    }

    pub fn queued_job_packets(&self) -> usize {
        self.job_packets
    }

    pub fn queued(&self) -> usize {
        self.high.len() + self.background.len() + self.jobs.len()
    }

    /// Queues a whole job (`ExponentialJob` mode).
    pub fn push_job(&mut self, id: JobId) {
        self.jobs.push_back(id);
    }

    pub fn push_packet(&mut self, packet: Packet) {
        if packet.priority_class == PriorityClass::JobHigh {
            self.job_packets += 1;
        }
        match (self.channel.discipline, packet.priority_class) {
            (UplinkDiscipline::JobPriority, PriorityClass::Background) => self.background.push_back(packet),
            _ => self.high.push_back(packet),
        }
    }

    /// Starts the next transmission if the server is idle and work is queued.
    /// Returns the transmission's service time.
    pub fn serve_next<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<Option<f64>> {
        if self.busy.is_some() {
            return Ok(None);
        }
        match self.channel.mode {
            UplinkMode::ExponentialJob => {
                let Some(id) = self.jobs.pop_front() else {
                    return Ok(None);
                };
                let exp = self.exp.ok_or(Error::NoServiceCapacity("uplink"))?;
                self.busy = Some(Transmission::Job(id));
                Ok(Some(exp.sample(rng)))
            }
            UplinkMode::PacketShared => {
                let Some(packet) = self.high.pop_front().or_else(|| self.background.pop_front()) else {
                    return Ok(None);
                };
                if !(self.channel.capacity > 0.0) || !self.channel.capacity.is_finite() {
                    return Err(Error::NoServiceCapacity("uplink"));
                }
                if packet.priority_class == PriorityClass::JobHigh {
                    self.job_packets -= 1;
                }
                let service = packet.size_bits as f64 / self.channel.capacity;
                self.busy = Some(Transmission::Packet(packet));
                Ok(Some(service))
            }
        }
    }

    /// Ends the current transmission.
    pub fn complete(&mut self) -> Option<Transmission> {
        self.busy.take()
    }

    pub fn current(&self) -> Option<&Transmission> {
        self.busy.as_ref()
    }
}

/// Hands a fully received job to the wireline. Records the job's
/// generation-to-queue latency and returns the arrival time at the compute
/// node.
pub fn deliver_to_compute(job: &mut Job, link: &WirelineLink, last_packet_done: f64) -> Result<f64> {
    non_negative("wireline delay", link.delay)?;
    let delivery = last_packet_done + link.delay;
    job.observe_comm_latency(delivery - job.gen_time()).map_err(|_| Error::DoubleDelivery(job.id))?;
    Ok(delivery)
}
