//! Scenario files.
//!
//! A scenario is a TOML document. Every key is optional and unknown keys are
//! rejected. The `architecture` key picks one of three presets which fix the
//! wireline delay, satisfaction rule, queue discipline, drop policy and
//! uplink discipline; the `[overrides]` table can change any of them.

use std::path::{Path, PathBuf};

use icc_core::analytic::{BudgetSplit, ManagementPolicy};
use icc_core::compute::{DropPolicy, QueueDiscipline, SatisfactionRule, ServiceModel};
use icc_core::network::{ComputeConfig, JobTemplate, NetworkConfig};
use icc_core::radio::{UeConfig, UplinkChannel, UplinkDiscipline, UplinkMode, WirelineLink};
use serde::{Deserialize, Serialize};

use crate::hardware::Hardware;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("invalid configuration: {0}")]
    Model(#[from] icc_core::Error),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    IccRan,
    DisjointRan,
    DisjointMec,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::IccRan, Architecture::DisjointRan, Architecture::DisjointMec];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::IccRan => "icc-ran",
            Architecture::DisjointRan => "disjoint-ran",
            Architecture::DisjointMec => "disjoint-mec",
        }
    }

    pub fn preset(self) -> Preset {
        match self {
            Architecture::IccRan => Preset {
                t_wireline: 0.005,
                policy: ManagementPolicy::Joint,
                discipline: QueueDiscipline::SlackPriority,
                drop: DropPolicy {
                    enabled: true,
                    reevaluate_on_dequeue: false,
                },
                uplink_discipline: UplinkDiscipline::JobPriority,
            },
            Architecture::DisjointRan => Preset {
                t_wireline: 0.005,
                ..Self::DisjointMec.preset()
            },
            Architecture::DisjointMec => Preset {
                t_wireline: 0.020,
                policy: ManagementPolicy::Disjoint,
                discipline: QueueDiscipline::Fcfs,
                drop: DropPolicy::default(),
                uplink_discipline: UplinkDiscipline::Fifo,
            },
        }
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything an architecture decides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub t_wireline: f64,
    pub policy: ManagementPolicy,
    pub discipline: QueueDiscipline,
    pub drop: DropPolicy,
    pub uplink_discipline: UplinkDiscipline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Theory,
    Simulation,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Number of UEs at a fixed per-UE rate.
    UeCount,
    /// Per-UE job rate at a fixed UE count.
    JobRate,
    GpuCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ServiceKind {
    Roofline,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Rates {
    pub mu1: f64,
    pub mu2: f64,
}

impl Default for Rates {
    fn default() -> Self {
        Self { mu1: 900.0, mu2: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    pub b_total: f64,
    pub b_comm: f64,
    pub b_comp: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            b_total: 0.080,
            b_comm: 0.024,
            b_comp: 0.056,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub t_wireline: Option<f64>,
    pub policy: Option<ManagementPolicy>,
    pub discipline: Option<QueueDiscipline>,
    pub drop: Option<bool>,
    pub reevaluate_on_dequeue: Option<bool>,
    pub uplink_discipline: Option<UplinkDiscipline>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ue {
    pub count: u32,
    /// Jobs per second per UE.
    pub job_rate: f64,
    /// Background bits per second per UE.
    pub background_bps: f64,
}

impl Default for Ue {
    fn default() -> Self {
        Self {
            count: 60,
            job_rate: 1.0,
            background_bps: 5e5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobSection {
    pub n_input: u32,
    pub n_output: u32,
    pub bytes_per_token: f64,
    pub max_packet_bits: u64,
}

impl Default for JobSection {
    fn default() -> Self {
        Self {
            n_input: 15,
            n_output: 15,
            bytes_per_token: 4.0,
            max_packet_bits: 12_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Uplink {
    pub mode: UplinkMode,
    /// Aggregate bits per second shared by jobs and background traffic.
    pub capacity: f64,
    /// Jobs per second in exponential mode; defaults to `rates.mu1`.
    pub exp_rate: Option<f64>,
    pub background_packet_bits: u64,
}

impl Default for Uplink {
    fn default() -> Self {
        Self {
            mode: UplinkMode::PacketShared,
            capacity: 33e6,
            exp_rate: None,
            background_packet_bits: 12_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Compute {
    pub service: ServiceKind,
    /// Hardware file, relative to the scenario file.
    pub hardware: Option<PathBuf>,
    pub gpu: String,
    pub gpu_count: u32,
    pub model: String,
    /// Jobs per second in exponential mode; defaults to `rates.mu2`.
    pub exp_rate: Option<f64>,
}

impl Default for Compute {
    fn default() -> Self {
        Self {
            service: ServiceKind::Roofline,
            hardware: None,
            gpu: "a100".into(),
            gpu_count: 1,
            model: "llama-2-7b-fp16".into(),
            exp_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default)]
    pub architectures: Vec<Architecture>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theory {
    pub lambdas: Vec<f64>,
    pub architectures: Vec<Architecture>,
}

impl Default for Theory {
    fn default() -> Self {
        Self {
            lambdas: (0..20).map(|i| 5.0 * i as f64).collect(),
            architectures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Validate {
    pub lambdas: Vec<f64>,
    /// Post-warm-up tagged jobs wanted per arrival rate.
    pub samples: u64,
    /// Keep every n-th post-warm-up job, so that samples are nearly independent.
    pub tag_every: u64,
}

impl Default for Validate {
    fn default() -> Self {
        Self {
            lambdas: vec![30.0, 50.0, 70.0],
            samples: 200_000,
            tag_every: 50,
        }
    }
}

/// The scenario file as written.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub architecture: Architecture,
    pub seed: u64,
    pub replications: u32,
    pub alpha: f64,
    /// Simulated seconds per replication.
    pub horizon: f64,
    /// Seconds discarded at the start; defaults to 10% of the horizon.
    pub warmup: Option<f64>,
    /// Arrivals in this many final seconds are not counted; defaults to 5%
    /// of the horizon.
    pub cooldown: Option<f64>,
    pub rates: Rates,
    pub budget: Budget,
    pub overrides: Overrides,
    pub ue: Ue,
    pub job: JobSection,
    pub uplink: Uplink,
    pub compute: Compute,
    pub sweep: Option<Sweep>,
    pub theory: Theory,
    pub validate: Validate,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        Self {
            architecture: Architecture::IccRan,
            seed: 1,
            replications: 5,
            alpha: 0.95,
            horizon: 200.0,
            warmup: None,
            cooldown: None,
            rates: Rates::default(),
            budget: Budget::default(),
            overrides: Overrides::default(),
            ue: Ue::default(),
            job: JobSection::default(),
            uplink: Uplink::default(),
            compute: Compute::default(),
            sweep: None,
            theory: Theory::default(),
            validate: Validate::default(),
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }
}

/// Values given on the command line or through the environment. They win
/// over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CliOverrides {
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub replications: Option<u32>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub file: ScenarioFile,
    /// Loaded in simulation mode when the service is roofline.
    hardware: Option<(icc_core::workload::LlmModel, icc_core::workload::GpuSpec)>,
}

impl ScenarioConfig {
    pub fn load(path: &Path, mode: Mode, cli: CliOverrides) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_file(ScenarioFile::parse(&text, path)?, base, mode, cli)
    }

    /// Validates `file`. Relative hardware paths resolve against `base`.
    pub fn from_file(mut file: ScenarioFile, base: &Path, mode: Mode, cli: CliOverrides) -> Result<Self, ConfigError> {
        if let Some(seed) = cli.seed {
            file.seed = seed;
        }
        if let Some(alpha) = cli.alpha {
            file.alpha = alpha;
        }
        if let Some(r) = cli.replications {
            file.replications = r;
        }
        // theory and validation runs never touch the roofline model
        let roofline = mode == Mode::Simulation && file.compute.service == ServiceKind::Roofline;
        let hardware = match (roofline, &file.compute.hardware) {
            (false, _) => None,
            (true, None) => {
                return invalid("compute.hardware is required when compute.service = \"roofline\"")
            }
            (true, Some(p)) => {
                let hw = Hardware::load(&base.join(p))?;
                Some((hw.model(&file.compute.model)?, hw.gpu(&file.compute.gpu, file.compute.gpu_count)?))
            }
        };
        let cfg = Self { mode, file, hardware };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), ConfigError> {
        let f = &self.file;
        if f.replications == 0 {
            return invalid("replications must be at least 1");
        }
        if !(f.alpha > 0.0 && f.alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {}", f.alpha));
        }
        if !(f.horizon > 0.0 && f.horizon.is_finite()) {
            return invalid(format!("horizon must be positive, got {}", f.horizon));
        }
        let warmup = self.warmup();
        if !(warmup >= 0.0 && warmup < f.horizon) {
            return invalid(format!("warmup must lie in [0, horizon), got {warmup}"));
        }
        let cooldown = self.cooldown();
        if !(cooldown >= 0.0 && warmup + cooldown < f.horizon) {
            return invalid(format!("cooldown must be non-negative and leave time after warmup, got {cooldown}"));
        }
        if f.validate.tag_every == 0 || f.validate.samples == 0 {
            return invalid("validate.samples and validate.tag_every must be at least 1");
        }
        if let Some(s) = &f.sweep {
            if s.values.is_empty() {
                return invalid("sweep.values is empty");
            }
            if s.values.windows(2).any(|w| !(w[0] < w[1])) {
                return invalid("sweep.values must be strictly increasing");
            }
            let integral = matches!(s.axis, SweepAxis::UeCount | SweepAxis::GpuCount);
            for &v in &s.values {
                if !(v >= 0.0) || !v.is_finite() || (integral && (v.fract() != 0.0 || v > u32::MAX as f64)) {
                    return invalid(format!("sweep value {v} is not valid for axis {:?}", s.axis));
                }
                if s.axis == SweepAxis::GpuCount && v < 1.0 {
                    return invalid("gpu-count sweep values must be at least 1");
                }
            }
        }
        for arch in self.all_architectures() {
            self.budget(arch)?;
            if self.mode == Mode::Simulation {
                self.network(arch, f.seed)?;
            }
        }
        if self.mode == Mode::Validate {
            for &l in &f.validate.lambdas {
                if !(l > 0.0) {
                    return invalid(format!("validate.lambdas must be positive, got {l}"));
                }
            }
        }
        Ok(())
    }

    fn all_architectures(&self) -> Vec<Architecture> {
        let mut all = vec![self.file.architecture];
        all.extend(self.sweep_architectures());
        all.extend(self.theory_architectures());
        all.sort();
        all.dedup();
        all
    }

    pub fn sweep_architectures(&self) -> Vec<Architecture> {
        match &self.file.sweep {
            Some(s) if !s.architectures.is_empty() => s.architectures.clone(),
            _ => vec![self.file.architecture],
        }
    }

    pub fn theory_architectures(&self) -> Vec<Architecture> {
        if self.file.theory.architectures.is_empty() {
            vec![self.file.architecture]
        } else {
            self.file.theory.architectures.clone()
        }
    }

    pub fn warmup(&self) -> f64 {
        self.file.warmup.unwrap_or(0.1 * self.file.horizon)
    }

    pub fn cooldown(&self) -> f64 {
        self.file.cooldown.unwrap_or(0.05 * self.file.horizon)
    }

    /// The preset for `arch` with `[overrides]` applied.
    pub fn preset(&self, arch: Architecture) -> Preset {
        let o = &self.file.overrides;
        let mut p = arch.preset();
        p.t_wireline = o.t_wireline.unwrap_or(p.t_wireline);
        p.policy = o.policy.unwrap_or(p.policy);
        p.discipline = o.discipline.unwrap_or(p.discipline);
        p.drop.enabled = o.drop.unwrap_or(p.drop.enabled);
        p.drop.reevaluate_on_dequeue = o.reevaluate_on_dequeue.unwrap_or(p.drop.reevaluate_on_dequeue);
        p.uplink_discipline = o.uplink_discipline.unwrap_or(p.uplink_discipline);
        p
    }

    pub fn budget(&self, arch: Architecture) -> Result<BudgetSplit, ConfigError> {
        let b = &self.file.budget;
        Ok(BudgetSplit::new(b.b_total, b.b_comm, b.b_comp, self.preset(arch).t_wireline)?)
    }

    pub fn rule(&self, arch: Architecture) -> SatisfactionRule {
        match self.preset(arch).policy {
            ManagementPolicy::Joint => SatisfactionRule::joint(),
            ManagementPolicy::Disjoint => SatisfactionRule::disjoint(self.file.budget.b_comm, self.file.budget.b_comp),
        }
    }

    pub fn uplink_rate(&self) -> f64 {
        self.file.uplink.exp_rate.unwrap_or(self.file.rates.mu1)
    }

    pub fn compute_rate(&self) -> f64 {
        self.file.compute.exp_rate.unwrap_or(self.file.rates.mu2)
    }

    fn job_template(&self) -> JobTemplate {
        let j = &self.file.job;
        JobTemplate {
            n_input: j.n_input,
            n_output: j.n_output,
            b_total: self.file.budget.b_total,
            bytes_per_token: j.bytes_per_token,
            max_packet_bits: j.max_packet_bits,
        }
    }

    fn service(&self, gpu_count: Option<u32>) -> Result<ServiceModel, ConfigError> {
        Ok(match self.hardware {
            Some((model, gpu)) => ServiceModel::LlmRoofline {
                model,
                gpu: match gpu_count {
                    Some(k) => icc_core::workload::GpuSpec::new(gpu.comp_bw, gpu.mem_bw, k)?,
                    None => gpu,
                },
            },
            None => {
                let rate = self.compute_rate();
                if !(rate > 0.0 && rate.is_finite()) {
                    return invalid(format!("compute exp_rate must be positive, got {rate}"));
                }
                ServiceModel::ExponentialJob { rate }
            }
        })
    }

    /// The simulated world for one replication of `arch`.
    pub fn network(&self, arch: Architecture, seed: u64) -> Result<NetworkConfig, ConfigError> {
        self.network_at(arch, seed, None)
    }

    /// Like [`network`](Self::network) with one sweep axis set to `value`.
    pub fn network_at(&self, arch: Architecture, seed: u64, point: Option<(SweepAxis, f64)>) -> Result<NetworkConfig, ConfigError> {
        let f = &self.file;
        let p = self.preset(arch);
        let mut ue = UeConfig {
            ue_count: f.ue.count,
            per_ue_job_rate: f.ue.job_rate,
            background_rate: f.ue.background_bps,
        };
        let mut gpu_count = None;
        match point {
            Some((SweepAxis::UeCount, v)) => ue.ue_count = v as u32,
            Some((SweepAxis::JobRate, v)) => ue.per_ue_job_rate = v,
            Some((SweepAxis::GpuCount, v)) => gpu_count = Some(v as u32),
            None => {}
        }
        if !(ue.per_ue_job_rate >= 0.0) || !(ue.background_rate >= 0.0) {
            return invalid("ue.job_rate and ue.background_bps must be non-negative");
        }
        let uplink = match f.uplink.mode {
            UplinkMode::PacketShared => {
                if !(f.uplink.capacity > 0.0 && f.uplink.capacity.is_finite()) {
                    return invalid(format!("uplink.capacity must be positive, got {}", f.uplink.capacity));
                }
                if f.job.max_packet_bits == 0 || !(f.job.bytes_per_token > 0.0) {
                    return invalid("job.max_packet_bits and job.bytes_per_token must be positive");
                }
                if f.uplink.background_packet_bits == 0 && ue.background_rate > 0.0 {
                    return invalid("uplink.background_packet_bits must be positive with background traffic");
                }
                UplinkChannel::packet_shared(f.uplink.capacity, p.uplink_discipline)
            }
            UplinkMode::ExponentialJob => {
                let rate = self.uplink_rate();
                if !(rate > 0.0 && rate.is_finite()) {
                    return invalid(format!("uplink exp_rate must be positive, got {rate}"));
                }
                UplinkChannel::exponential(rate)
            }
        };
        if !(p.t_wireline >= 0.0) {
            return invalid("t_wireline must be non-negative");
        }
        let cfg = NetworkConfig {
            ue,
            uplink,
            background_packet_bits: f.uplink.background_packet_bits,
            wireline: WirelineLink { delay: p.t_wireline },
            compute: ComputeConfig {
                discipline: p.discipline,
                service: self.service(gpu_count)?,
                drop: p.drop,
            },
            rule: self.rule(arch),
            job: self.job_template(),
            horizon: f.horizon,
            warmup: self.warmup(),
            cooldown: self.cooldown(),
            seed,
            tag_every: None,
            record_trace: false,
        };
        icc_core::workload::Job::new(0, 0.0, cfg.job.n_input, cfg.job.n_output, cfg.job.b_total)?;
        Ok(cfg)
    }

    /// Exponential air and compute stages, FCFS, no drops, at aggregate
    /// rate `lambda`. The horizon is sized so that roughly
    /// `validate.samples` tagged jobs fall after the warm-up.
    pub fn validation_network(&self, arch: Architecture, lambda: f64, seed: u64) -> Result<NetworkConfig, ConfigError> {
        let v = &self.file.validate;
        let p = self.preset(arch);
        let measured = (v.samples as f64 + 1.0) * v.tag_every as f64 / lambda;
        // 10% warm-up, plus slack for Poisson fluctuation of the job count
        let horizon = measured / 0.9 * 1.02;
        Ok(NetworkConfig {
            ue: UeConfig {
                ue_count: 1,
                per_ue_job_rate: lambda,
                background_rate: 0.0,
            },
            uplink: UplinkChannel::exponential(self.uplink_rate()),
            background_packet_bits: 0,
            wireline: WirelineLink { delay: p.t_wireline },
            compute: ComputeConfig {
                discipline: QueueDiscipline::Fcfs,
                service: ServiceModel::ExponentialJob {
                    rate: self.compute_rate(),
                },
                drop: DropPolicy::default(),
            },
            rule: self.rule(arch),
            job: self.job_template(),
            horizon,
            warmup: 0.1 * horizon,
            cooldown: 0.0,
            seed,
            tag_every: Some(v.tag_every),
            record_trace: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_file() -> ScenarioFile {
        let mut f = ScenarioFile::default();
        f.compute.service = ServiceKind::Exponential;
        f.uplink.mode = UplinkMode::ExponentialJob;
        f
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ScenarioFile::parse("horizn = 10.0\n", Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("horizn"), "{err}");
        let err = ScenarioFile::parse("[ue]\ncount = 3\nrate = 1.0\n", Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("rate"), "{err}");
    }

    #[test]
    fn empty_file_takes_defaults() {
        assert_eq!(ScenarioFile::parse("", Path::new("x.toml")).unwrap(), ScenarioFile::default());
    }

    #[test]
    fn presets_are_total() {
        let icc = Architecture::IccRan.preset();
        assert_eq!(icc.t_wireline, 0.005);
        assert_eq!(icc.policy, ManagementPolicy::Joint);
        assert_eq!(icc.discipline, QueueDiscipline::SlackPriority);
        assert!(icc.drop.enabled);
        assert_eq!(icc.uplink_discipline, UplinkDiscipline::JobPriority);
        let ran = Architecture::DisjointRan.preset();
        let mec = Architecture::DisjointMec.preset();
        assert_eq!((ran.t_wireline, mec.t_wireline), (0.005, 0.020));
        for p in [ran, mec] {
            assert_eq!(p.policy, ManagementPolicy::Disjoint);
            assert_eq!(p.discipline, QueueDiscipline::Fcfs);
            assert!(!p.drop.enabled);
            assert_eq!(p.uplink_discipline, UplinkDiscipline::Fifo);
        }
    }

    #[test]
    fn overrides_apply() {
        let mut f = exp_file();
        f.overrides.t_wireline = Some(0.010);
        f.overrides.discipline = Some(QueueDiscipline::Fcfs);
        let cfg = ScenarioConfig::from_file(f, Path::new("."), Mode::Simulation, CliOverrides::default()).unwrap();
        let p = cfg.preset(Architecture::IccRan);
        assert_eq!(p.t_wireline, 0.010);
        assert_eq!(p.discipline, QueueDiscipline::Fcfs);
        assert!(p.drop.enabled);
        assert_eq!(cfg.network(Architecture::DisjointMec, 1).unwrap().wireline.delay, 0.010);
    }

    #[test]
    fn cli_values_win() {
        let cli = CliOverrides {
            seed: Some(9),
            alpha: Some(0.9),
            replications: Some(2),
        };
        let cfg = ScenarioConfig::from_file(exp_file(), Path::new("."), Mode::Theory, cli).unwrap();
        assert_eq!((cfg.file.seed, cfg.file.alpha, cfg.file.replications), (9, 0.9, 2));
    }

    #[test]
    fn bad_values_are_config_errors() {
        let load = |f: ScenarioFile| ScenarioConfig::from_file(f, Path::new("."), Mode::Simulation, CliOverrides::default());
        let mut f = exp_file();
        f.alpha = 1.0;
        assert!(load(f).is_err());
        let mut f = exp_file();
        f.replications = 0;
        assert!(load(f).is_err());
        let mut f = exp_file();
        f.sweep = Some(Sweep {
            axis: SweepAxis::UeCount,
            values: vec![10.0, 5.0],
            architectures: vec![],
        });
        assert!(load(f).is_err());
        let mut f = exp_file();
        f.sweep = Some(Sweep {
            axis: SweepAxis::GpuCount,
            values: vec![0.0, 1.0],
            architectures: vec![],
        });
        assert!(load(f).is_err());
        let mut f = exp_file();
        f.warmup = Some(500.0);
        assert!(load(f).is_err());
        // roofline without a hardware file
        assert!(load(ScenarioFile::default()).is_err());
    }

    #[test]
    fn validation_horizon_covers_samples() {
        let cfg = ScenarioConfig::from_file(exp_file(), Path::new("."), Mode::Validate, CliOverrides::default()).unwrap();
        let n = cfg.validation_network(Architecture::IccRan, 50.0, 1).unwrap();
        let expected_tagged = (n.horizon - n.warmup) * 50.0 / 50.0;
        assert!(expected_tagged > 200_000.0);
        assert_eq!(n.compute.discipline, QueueDiscipline::Fcfs);
        assert!(!n.compute.drop.enabled);
    }
}
