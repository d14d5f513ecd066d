use thiserror::Error;

/// Errors raised by the analytic model, the workload model and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("{what} out of range: {value} ({expected})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unstable system: arrival rate {lambda} >= service limit {limit}")]
    Unstable { lambda: f64, limit: f64 },

    #[error("target probability alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("event scheduled in the past: now={now}, requested={requested}")]
    ScheduledInPast { now: f64, requested: f64 },

    #[error("job {0} has no payload to packetize")]
    EmptyPayload(u64),

    #[error("job {0} delivered twice")]
    DoubleDelivery(u64),

    #[error("job {0} enqueued twice")]
    DuplicateEnqueue(u64),

    #[error("job {0}: communication latency already recorded")]
    LatencyAlreadySet(u64),

    #[error("job {job}: missing {component} latency")]
    MissingLatency { job: u64, component: &'static str },

    #[error("unknown job {0}")]
    UnknownJob(u64),

    #[error("no service capacity configured for {0}")]
    NoServiceCapacity(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}

pub(crate) fn positive(what: &'static str, value: f64) -> Result<f64> {
    finite(what, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            expected: "> 0",
        })
    }
}

pub(crate) fn non_negative(what: &'static str, value: f64) -> Result<f64> {
    finite(what, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            expected: ">= 0",
        })
    }
}
