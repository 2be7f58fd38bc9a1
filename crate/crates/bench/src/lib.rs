//! Fixed inputs shared by the pipeline benchmarks.

use ebm_core::sampling::{case_rng, ModelSampler, OrderedSample};

/// A reproducible well-separated model with `n` Kelvin-Voigt units.
pub fn fixture(n: usize) -> OrderedSample {
    let sampler = ModelSampler { n_max: n, ..ModelSampler::default() };
    let mut case = 0;
    loop {
        let mut rng = case_rng(0xbe9c, case);
        if let Ok(s) = sampler.sample_ordered(&mut rng, Some(1.2), 1_000_000) {
            if s.model.n == n {
                return s;
            }
        }
        case += 1;
    }
}
