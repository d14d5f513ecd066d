use icc_core::workload::{inference_latency, prefill_latency, tokengen_bound, tokengen_latency, Bound, GpuSpec, Job, LlmModel};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = LlmModel> {
    (1e8f64..1e11, 1e8f64..1e11).prop_map(|(c, m)| {
        LlmModel::from_params(1_000_000, 2.0).unwrap().with_overrides(Some(c), Some(m)).unwrap()
    })
}

fn gpu() -> impl Strategy<Value = GpuSpec> {
    (1e12f64..1e16, 1e11f64..1e14, 1u32..64).prop_map(|(c, m, k)| GpuSpec::new(c, m, k).unwrap())
}

fn job(n_input: u32, n_output: u32) -> Job {
    Job::new(0, 0.0, n_input, n_output, 0.08).unwrap()
}

proptest! {
    #[test]
    fn linear_scaling_is_exact(m in model(), g in gpu(), n_in in 1u32..512, n_out in 0u32..512) {
        let j = job(n_in, n_out);
        let single = inference_latency(&j, &m, &g.with_count(1)).unwrap();
        prop_assert_eq!(inference_latency(&j, &m, &g).unwrap(), single / g.count as f64);
    }

    #[test]
    fn per_token_cost_follows_the_binding_branch(m in model(), g in gpu()) {
        let g = g.with_count(1);
        let per_token = tokengen_latency(&m, &g, 1).unwrap();
        let compute = m.c_llm / g.comp_bw;
        let memory = m.m_llm / g.mem_bw;
        match tokengen_bound(&m, &g).unwrap() {
            Bound::Compute => {
                prop_assert!(compute > memory);
                prop_assert_eq!(per_token, compute);
            }
            Bound::Memory => {
                prop_assert!(compute <= memory);
                prop_assert_eq!(per_token, memory);
            }
        }
    }

    #[test]
    fn monotone_in_hardware(m in model(), g in gpu(), n_in in 1u32..256, n_out in 0u32..256, f in 1.0f64..4.0) {
        let j = job(n_in, n_out);
        let base = inference_latency(&j, &m, &g).unwrap();
        let faster_comp = GpuSpec::new(g.comp_bw * f, g.mem_bw, g.count).unwrap();
        let faster_mem = GpuSpec::new(g.comp_bw, g.mem_bw * f, g.count).unwrap();
        prop_assert!(inference_latency(&j, &m, &faster_comp).unwrap() <= base);
        prop_assert!(inference_latency(&j, &m, &faster_mem).unwrap() <= base);
        prop_assert!(inference_latency(&j, &m, &g.with_count(g.count + 1)).unwrap() <= base);
    }

    #[test]
    fn monotone_in_workload(m in model(), g in gpu(), n_in in 1u32..256, n_out in 0u32..256, f in 1.0f64..4.0) {
        let base = inference_latency(&job(n_in, n_out), &m, &g).unwrap();
        prop_assert!(inference_latency(&job(n_in + 1, n_out), &m, &g).unwrap() >= base);
        prop_assert!(inference_latency(&job(n_in, n_out + 1), &m, &g).unwrap() >= base);
        let heavier_c = m.with_overrides(Some(m.c_llm * f), None).unwrap();
        let heavier_m = m.with_overrides(None, Some(m.m_llm * f)).unwrap();
        prop_assert!(inference_latency(&job(n_in, n_out), &heavier_c, &g).unwrap() >= base);
        prop_assert!(inference_latency(&job(n_in, n_out), &heavier_m, &g).unwrap() >= base);
    }

    #[test]
    fn total_is_prefill_plus_tokengen_on_one_gpu(m in model(), g in gpu(), n_in in 1u32..256, n_out in 0u32..256) {
        let g = g.with_count(1);
        let total = inference_latency(&job(n_in, n_out), &m, &g).unwrap();
        let parts = prefill_latency(&m, &g, n_in).unwrap() + tokengen_latency(&m, &g, n_out).unwrap();
        prop_assert_eq!(total, parts);
    }
}
