//! Discrete-event kernel: a time-ordered event queue, the run loop and
//! seeded random streams.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{positive, Error, Result};

/// A scheduled event. Events are totally ordered by `(time, seq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Event<K> {
    pub time: f64,
    pub seq: u64,
    pub kind: K,
}

impl<K: PartialEq> Eq for Event<K> {}

impl<K: PartialEq> PartialOrd for Event<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: PartialEq> Ord for Event<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Pending events plus the simulation clock.
#[derive(Debug, Clone)]
pub struct EventQueue<K> {
    heap: BinaryHeap<Event<K>>,
    next_seq: u64,
    now: f64,
}

impl<K: PartialEq> Default for EventQueue<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: PartialEq> EventQueue<K> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            next_seq: 0,
            now: 0.0,
        }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Inserts an event at absolute `time`; returns its sequence number.
    pub fn schedule(&mut self, time: f64, kind: K) -> Result<u64> {
        if !(time >= self.now) {
            return Err(Error::ScheduledInPast {
                now: self.now,
                requested: time,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Event { time, seq, kind });
        Ok(seq)
    }

    /// Inserts an event `delay` seconds from now.
    pub fn schedule_in(&mut self, delay: f64, kind: K) -> Result<u64> {
        self.schedule(self.now + delay, kind)
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.time)
    }

    /// Removes the earliest event and advances the clock to it.
    pub fn pop(&mut self) -> Option<Event<K>> {
        let event = self.heap.pop()?;
        debug_assert!(event.time >= self.now);
        self.now = event.time;
        Some(event)
    }
}

/// A simulated world that reacts to its own events.
pub trait Model {
    type Event: PartialEq;

    fn handle(&mut self, event: Event<Self::Event>, queue: &mut EventQueue<Self::Event>) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunStats {
    pub events: u64,
    pub clock: f64,
}

/// Processes events in order until the queue empties or the next event lies
/// beyond `t_end`. Events after `t_end` stay queued.
pub fn run_until<M: Model>(model: &mut M, queue: &mut EventQueue<M::Event>, t_end: f64) -> Result<RunStats> {
    let mut stats = RunStats {
        events: 0,
        clock: queue.now(),
    };
    while let Some(t) = queue.peek_time() {
        if t > t_end {
            break;
        }
        let event = queue.pop().expect("peeked");
        model.handle(event, queue)?;
        stats.events += 1;
        stats.clock = queue.now();
    }
    Ok(stats)
}

/// Purpose of a random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Arrivals = 1,
    Background = 2,
    UplinkService = 3,
    ComputeService = 4,
}

/// Independent random substreams derived from one master seed.
///
/// Substream `s` is ChaCha8 keyed with `seed_from_u64(master_seed)` and with
/// its stream word set to `s as u64`. Changing how one substream is consumed
/// never perturbs another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStreams {
    pub master_seed: u64,
}

impl RngStreams {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, purpose: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(purpose as u64);
        rng
    }
}

/// One exponential inter-arrival time with mean `1 / rate`.
pub fn poisson_interarrival<R: rand_chacha::rand_core::RngCore + ?Sized>(stream: &mut R, rate: f64) -> Result<f64> {
    let rate = positive("rate", rate)?;
    let exp = Exp::new(rate).map_err(|_| Error::OutOfRange {
        what: "rate",
        value: rate,
        expected: "> 0",
    })?;
    Ok(exp.sample(stream))
}
