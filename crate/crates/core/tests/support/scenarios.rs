#![allow(dead_code)]

use icc_core::compute::{DropPolicy, QueueDiscipline, SatisfactionRule, ServiceModel};
use icc_core::network::{ComputeConfig, JobTemplate, NetworkConfig};
use icc_core::radio::{UeConfig, UplinkChannel, UplinkDiscipline, WirelineLink};
use icc_core::workload::{GpuSpec, LlmModel};

pub const MU1: f64 = 900.0;
pub const MU2: f64 = 100.0;

fn template() -> JobTemplate {
    JobTemplate {
        n_input: 15,
        n_output: 15,
        b_total: 0.080,
        bytes_per_token: 4.0,
        max_packet_bits: 12_000,
    }
}

/// Exponential air and compute stages, FCFS, no drops, joint rule.
pub fn tandem(lambda: f64, horizon: f64, seed: u64, tag_every: Option<u64>) -> NetworkConfig {
    NetworkConfig {
        ue: UeConfig {
            ue_count: 1,
            per_ue_job_rate: lambda,
            background_rate: 0.0,
        },
        uplink: UplinkChannel::exponential(MU1),
        background_packet_bits: 0,
        wireline: WirelineLink { delay: 0.005 },
        compute: ComputeConfig {
            discipline: QueueDiscipline::Fcfs,
            service: ServiceModel::ExponentialJob { rate: MU2 },
            drop: DropPolicy::default(),
        },
        rule: SatisfactionRule::joint(),
        job: template(),
        horizon,
        warmup: 0.1 * horizon,
        cooldown: 0.0,
        seed,
        tag_every,
        record_trace: false,
    }
}

/// Packet-level uplink with background traffic and roofline compute.
pub fn packet_level(ue_count: u32, capacity: f64, icc: bool, gpus: u32, horizon: f64, seed: u64) -> NetworkConfig {
    let model = LlmModel::from_params(7_000_000_000, 2.0).unwrap();
    let gpu = GpuSpec::new(3.12e14, 2.039e12, gpus).unwrap();
    NetworkConfig {
        ue: UeConfig {
            ue_count,
            per_ue_job_rate: 1.0,
            background_rate: 5e5,
        },
        uplink: UplinkChannel::packet_shared(
            capacity,
            if icc { UplinkDiscipline::JobPriority } else { UplinkDiscipline::Fifo },
        ),
        background_packet_bits: 12_000,
        wireline: WirelineLink { delay: if icc { 0.005 } else { 0.020 } },
        compute: ComputeConfig {
            discipline: if icc { QueueDiscipline::SlackPriority } else { QueueDiscipline::Fcfs },
            service: ServiceModel::LlmRoofline { model, gpu },
            drop: DropPolicy {
                enabled: icc,
                reevaluate_on_dequeue: false,
            },
        },
        rule: if icc { SatisfactionRule::joint() } else { SatisfactionRule::disjoint(0.024, 0.056) },
        job: template(),
        horizon,
        warmup: 0.1 * horizon,
        cooldown: 0.0,
        seed,
        tag_every: None,
        record_trace: true,
    }
}
