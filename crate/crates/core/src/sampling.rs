//! Seeded random models for property checks.

use crate::error::{Error, Result};
use crate::model::{EbmModel, Element};
use crate::relaxation::{compute_spectrum, RelaxationSpectrum};
use crate::spectrum::{build_prony, PronyPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSampler {
    pub n_max: usize,
    pub modulus: (f64, f64),
    pub viscosity: (f64, f64),
    pub radius: f64,
}

impl Default for ModelSampler {
    fn default() -> Self {
        ModelSampler { n_max: 5, modulus: (0.1, 10.0), viscosity: (0.1, 10.0), radius: 1.0 }
    }
}

impl ModelSampler {
    pub fn with_n_max(n_max: usize) -> Self {
        ModelSampler { n_max, ..Default::default() }
    }

    /// Moduli and viscosities drawn uniformly from their ranges, `n` uniform
    /// on `0..=n_max`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EbmModel {
        let n = rng.random_range(0..=self.n_max);
        self.sample_with_n(n, rng)
    }

    pub fn sample_with_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> EbmModel {
        let elements = (0..=n)
            .map(|_| {
                Element::new(
                    rng.random_range(self.modulus.0..=self.modulus.1),
                    rng.random_range(self.modulus.0..=self.modulus.1),
                    rng.random_range(self.viscosity.0..=self.viscosity.1),
                )
            })
            .collect();
        EbmModel::new(self.radius, elements)
    }

    /// Rejection sampling of a model whose shear rates all lie below its bulk
    /// rates, with `2n + 2` distinct rates and, when `min_gap_ratio` is set,
    /// adjacent rate ratios at least that large.
    pub fn sample_ordered<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        min_gap_ratio: Option<f64>,
        max_tries: usize,
    ) -> Result<OrderedSample> {
        for _ in 0..max_tries {
            let model = self.sample(rng);
            if let Some(s) = accept(model, min_gap_ratio) {
                return Ok(s);
            }
        }
        Err(Error::NoConvergence { what: "ordered model rejection sampling", iterations: max_tries })
    }
}

/// A sampled model with its spectrum and Prony pair.
#[derive(Debug, Clone)]
pub struct OrderedSample {
    pub model: EbmModel,
    pub spectrum: RelaxationSpectrum,
    pub prony: PronyPair,
}

fn accept(model: EbmModel, min_gap_ratio: Option<f64>) -> Option<OrderedSample> {
    let spectrum = compute_spectrum(&model).ok()?;
    if spectrum.shear.len() != model.n + 1 || spectrum.bulk.len() != model.n + 1 {
        return None;
    }
    let prony = build_prony(&model, &spectrum).ok()?;
    let d = prony.d;
    // strengths too small to bracket are out of scope for the sampler
    if prony.alpha.iter().zip(&prony.beta).any(|(a, b)| *a < 1e-8 * d * b) {
        return None;
    }
    if let Some(g) = min_gap_ratio {
        if prony.beta.windows(2).any(|w| w[1] / w[0] < g) {
            return None;
        }
    }
    Some(OrderedSample { model, spectrum, prony })
}

/// Deterministic per-case generator: case `i` of a run with seed `s` always
/// sees the same stream regardless of scheduling.
pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}
