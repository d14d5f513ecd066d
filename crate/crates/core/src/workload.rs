//! Roofline latency model for single-job LLM inference.
//!
//! Each phase costs the larger of its compute time and the time to stream the
//! weights from GPU memory. Prefill touches all input tokens in one pass;
//! token generation repeats the per-token cost once per output token.
//! A node with `count` identical GPUs has `count` times the bandwidth of one.

use crate::error::{positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LlmModel {
    pub param_count: u64,
    pub bytes_per_param: f64,
    /// FLOPs per token.
    pub c_llm: f64,
    /// Model size in bytes.
    pub m_llm: f64,
}

impl LlmModel {
    /// Derives `c_llm = 2 * params` and `m_llm = params * bytes_per_param`.
    pub fn from_params(param_count: u64, bytes_per_param: f64) -> Result<Self> {
        if param_count == 0 {
            return Err(Error::OutOfRange {
                what: "param_count",
                value: 0.0,
                expected: "> 0",
            });
        }
        positive("bytes_per_param", bytes_per_param)?;
        let params = param_count as f64;
        Ok(Self {
            param_count,
            bytes_per_param,
            c_llm: 2.0 * params,
            m_llm: params * bytes_per_param,
        })
    }

    pub fn with_overrides(mut self, c_llm: Option<f64>, m_llm: Option<f64>) -> Result<Self> {
        if let Some(c) = c_llm {
            self.c_llm = positive("c_llm", c)?;
        }
        if let Some(m) = m_llm {
            self.m_llm = positive("m_llm", m)?;
        }
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        positive("c_llm", self.c_llm)?;
        positive("m_llm", self.m_llm)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GpuSpec {
    /// Peak compute in FLOP/s for one GPU.
    pub comp_bw: f64,
    /// Memory bandwidth in bytes/s for one GPU.
    pub mem_bw: f64,
    pub count: u32,
}

impl GpuSpec {
    pub fn new(comp_bw: f64, mem_bw: f64, count: u32) -> Result<Self> {
        let spec = Self { comp_bw, mem_bw, count };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_count(self, count: u32) -> Self {
        Self { count, ..self }
    }

    fn check(&self) -> Result<()> {
        positive("comp_bw", self.comp_bw)?;
        positive("mem_bw", self.mem_bw)?;
        if self.count == 0 {
            return Err(Error::OutOfRange {
                what: "gpu count",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(())
    }
}

/// Which side of the roofline a phase sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Compute,
    Memory,
}

/// Latency of a phase on a single GPU, plus the binding branch.
fn roofline(flops: f64, bytes: f64, gpu: &GpuSpec) -> (f64, Bound) {
    let compute = flops / gpu.comp_bw;
    let memory = bytes / gpu.mem_bw;
    if compute > memory {
        (compute, Bound::Compute)
    } else {
        (memory, Bound::Memory)
    }
}

fn prefill_single(model: &LlmModel, gpu: &GpuSpec, n_input: u32) -> f64 {
    roofline(n_input as f64 * model.c_llm, model.m_llm, gpu).0
}

fn per_token_single(model: &LlmModel, gpu: &GpuSpec) -> f64 {
    roofline(model.c_llm, model.m_llm, gpu).0
}

/// Binding branch of one generated token.
pub fn tokengen_bound(model: &LlmModel, gpu: &GpuSpec) -> Result<Bound> {
    model.check()?;
    gpu.check()?;
    Ok(roofline(model.c_llm, model.m_llm, gpu).1)
}

pub fn prefill_latency(model: &LlmModel, gpu: &GpuSpec, n_input: u32) -> Result<f64> {
    model.check()?;
    gpu.check()?;
    if n_input == 0 {
        return Err(Error::OutOfRange {
            what: "n_input",
            value: 0.0,
            expected: ">= 1",
        });
    }
    Ok(prefill_single(model, gpu, n_input) / gpu.count as f64)
}

pub fn tokengen_latency(model: &LlmModel, gpu: &GpuSpec, n_output: u32) -> Result<f64> {
    model.check()?;
    gpu.check()?;
    Ok(n_output as f64 * per_token_single(model, gpu) / gpu.count as f64)
}

/// Total compute latency of a job: prefill plus token generation.
///
/// Both phases are evaluated at single-GPU bandwidth and the sum is divided
/// by the GPU count, so `count = k` gives exactly one k-th of `count = 1`.
pub fn inference_latency(job: &Job, model: &LlmModel, gpu: &GpuSpec) -> Result<f64> {
    prefill_latency(model, gpu, job.n_input)?;
    let single = prefill_single(model, gpu, job.n_input) + job.n_output as f64 * per_token_single(model, gpu);
    Ok(single / gpu.count as f64)
}

pub type JobId = u64;

/// One offloaded inference request.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: JobId,
    gen_time: f64,
    pub n_input: u32,
    pub n_output: u32,
    pub b_total: f64,
    comm_latency_observed: Option<f64>,
}

impl Job {
    pub fn new(id: JobId, gen_time: f64, n_input: u32, n_output: u32, b_total: f64) -> Result<Self> {
        crate::error::non_negative("gen_time", gen_time)?;
        positive("b_total", b_total)?;
        if n_input == 0 {
            return Err(Error::OutOfRange {
                what: "n_input",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(Self {
            id,
            gen_time,
            n_input,
            n_output,
            b_total,
            comm_latency_observed: None,
        })
    }

    pub fn gen_time(&self) -> f64 {
        self.gen_time
    }

    /// Absolute time by which the job must complete.
    pub fn deadline(&self) -> f64 {
        self.gen_time + self.b_total
    }

    pub fn comm_latency_observed(&self) -> Option<f64> {
        self.comm_latency_observed
    }

    /// Records the generation-to-queue interval. May be set only once.
    pub fn observe_comm_latency(&mut self, latency: f64) -> Result<()> {
        if self.comm_latency_observed.is_some() {
            return Err(Error::LatencyAlreadySet(self.id));
        }
        self.comm_latency_observed = Some(crate::error::non_negative("comm latency", latency)?);
        Ok(())
    }

    pub fn total_tokens(&self) -> u32 {
        self.n_input + self.n_output
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // NVIDIA A100 80GB SXM datasheet: 312 TFLOPS FP16 tensor, 2039 GB/s.
    fn a100(count: u32) -> GpuSpec {
        GpuSpec::new(3.12e14, 2.039e12, count).unwrap()
    }

    fn llama7b() -> LlmModel {
        LlmModel::from_params(7_000_000_000, 2.0).unwrap()
    }

    fn job(n_input: u32, n_output: u32) -> Job {
        Job::new(1, 0.0, n_input, n_output, 0.08).unwrap()
    }

    #[test]
    fn model_defaults() {
        let m = llama7b();
        assert_eq!(m.c_llm, 1.4e10);
        assert_eq!(m.m_llm, 1.4e10);
        let o = m.with_overrides(Some(3.0), None).unwrap();
        assert_eq!(o.c_llm, 3.0);
        assert_eq!(o.m_llm, 1.4e10);
    }

    #[test]
    fn prefill_compute_bound() {
        let m = LlmModel {
            param_count: 1,
            bytes_per_param: 1.0,
            c_llm: 1.0,
            m_llm: 1e-12,
        };
        let g = GpuSpec::new(1.0, 1.0, 1).unwrap();
        assert_eq!(prefill_latency(&m, &g, 5).unwrap(), 5.0);
    }

    #[test]
    fn llama_on_a100() {
        let memory_term = 1.4e10 / 2.039e12;
        let p = prefill_latency(&llama7b(), &a100(1), 15).unwrap();
        assert_eq!(p, memory_term);
        assert!((p - 6.866e-3).abs() < 1e-6);
        assert!(15.0 * 1.4e10 / 3.12e14 < p);

        let p8 = prefill_latency(&llama7b(), &a100(8), 15).unwrap();
        assert!((p8 - 0.858e-3).abs() < 1e-6);

        let t = tokengen_latency(&llama7b(), &a100(1), 15).unwrap();
        assert!((t - 15.0 * memory_term).abs() < 1e-15);
        assert!((t - 0.103).abs() < 1e-3);

        let total = inference_latency(&job(15, 15), &llama7b(), &a100(1)).unwrap();
        assert!((total - 16.0 * memory_term).abs() < 1e-15);
        assert!((total - 0.110).abs() < 1e-3);

        let total8 = inference_latency(&job(15, 15), &llama7b(), &a100(8)).unwrap();
        assert!((total8 - 0.013_73).abs() < 1e-5);
    }

    #[test]
    fn tokengen_edges() {
        assert_eq!(tokengen_latency(&llama7b(), &a100(1), 0).unwrap(), 0.0);
        let one = tokengen_latency(&llama7b(), &a100(1), 1).unwrap();
        assert_eq!(one, 1.4e10 / 2.039e12);
        assert_eq!(tokengen_bound(&llama7b(), &a100(1)).unwrap(), Bound::Memory);
    }

    #[test]
    fn prefill_only_when_no_output() {
        let j = job(15, 0);
        assert_eq!(
            inference_latency(&j, &llama7b(), &a100(1)).unwrap(),
            prefill_latency(&llama7b(), &a100(1), 15).unwrap()
        );
    }

    #[test]
    fn doubling_gpus_halves_latency() {
        let j = job(15, 15);
        let one = inference_latency(&j, &llama7b(), &a100(1)).unwrap();
        let two = inference_latency(&j, &llama7b(), &a100(2)).unwrap();
        assert_eq!(two, one / 2.0);
    }

    #[test]
    fn zero_bandwidth_rejected() {
        let bad = GpuSpec {
            comp_bw: 0.0,
            mem_bw: 1.0,
            count: 1,
        };
        assert!(prefill_latency(&llama7b(), &bad, 15).is_err());
        assert!(tokengen_latency(&llama7b(), &bad, 15).is_err());
        assert!(GpuSpec::new(1.0, 0.0, 1).is_err());
        assert!(GpuSpec::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn comm_latency_set_once() {
        let mut j = job(15, 15);
        assert_eq!(j.comm_latency_observed(), None);
        j.observe_comm_latency(0.01).unwrap();
        assert_eq!(j.comm_latency_observed(), Some(0.01));
        assert_eq!(j.observe_comm_latency(0.02), Err(Error::LatencyAlreadySet(1)));
        assert_eq!(j.deadline(), 0.08);
    }
}
