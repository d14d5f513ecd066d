//! Service-capacity analysis of LLM inference offloading when communication
//! and computing latencies are managed jointly or separately.
//!
//! The crate is `no_std` (it needs `alloc`) and holds everything that is pure
//! computation:
//!
//! - [`analytic`]: closed-form satisfaction probabilities of the two-stage
//!   tandem queue and the service capacity they imply.
//! - [`workload`]: roofline latency of prefill and token generation.
//! - [`engine`]: the discrete-event kernel and seeded random streams.
//! - [`radio`]: packetization, the shared uplink and the wireline hop.
//! - [`compute`]: the computing node's queue, drop rule and job classification.
//! - [`network`]: all of the above wired into one simulated world.
//!
//! Configuration files, sweeps and CSV output live in the `icc-harness` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod compute;
pub mod engine;
mod error;
pub mod network;
mod quadrature;
pub mod radio;
pub mod workload;

pub use error::{Error, Result};
