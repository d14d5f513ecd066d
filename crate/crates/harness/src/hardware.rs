//! GPU and model specifications read from a TOML data file.

use std::collections::BTreeMap;
use std::path::Path;

use icc_core::workload::{GpuSpec, LlmModel};
use serde::Deserialize;

use crate::config::ConfigError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpuEntry {
    /// FLOP/s of one device.
    pub comp_bw: f64,
    /// Bytes/s of one device.
    pub mem_bw: f64,
    #[serde(default)]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub param_count: u64,
    pub bytes_per_param: f64,
    #[serde(default)]
    pub c_llm: Option<f64>,
    #[serde(default)]
    pub m_llm: Option<f64>,
    #[serde(default)]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hardware {
    pub gpu: BTreeMap<String, GpuEntry>,
    pub model: BTreeMap<String, ModelEntry>,
}

impl Hardware {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    pub fn gpu(&self, name: &str, count: u32) -> Result<GpuSpec, ConfigError> {
        let e = self
            .gpu
            .get(name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown gpu {name:?}")))?;
        Ok(GpuSpec::new(e.comp_bw, e.mem_bw, count)?)
    }

    pub fn model(&self, name: &str) -> Result<LlmModel, ConfigError> {
        let e = self
            .model
            .get(name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown model {name:?}")))?;
        Ok(LlmModel::from_params(e.param_count, e.bytes_per_param)?.with_overrides(e.c_llm, e.m_llm)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_parses() {
        let hw = Hardware::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/hardware.toml")).unwrap();
        let a100 = hw.gpu("a100", 8).unwrap();
        assert_eq!((a100.comp_bw, a100.mem_bw, a100.count), (3.12e14, 2.039e12, 8));
        let llama = hw.model("llama-2-7b-fp16").unwrap();
        assert_eq!((llama.c_llm, llama.m_llm), (1.4e10, 1.4e10));
        assert!(hw.gpu("gh200-nvl2", 2).is_ok());
    }

    #[test]
    fn lookups_fail_cleanly() {
        let hw: Hardware = toml::from_str("[gpu.x]\ncomp_bw = 1.0\nmem_bw = 0.0\n").unwrap();
        assert!(hw.gpu("y", 1).is_err());
        assert!(hw.gpu("x", 1).is_err());
        assert!(hw.model("m").is_err());
        assert!(toml::from_str::<Hardware>("[gpu.x]\ncomp_bw = 1.0\nmem_bw = 1.0\nflops = 2\n").is_err());
    }
}
