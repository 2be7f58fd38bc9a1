//! Prony-form relaxation kernels and stress evaluation from a strain history.

use crate::error::{Error, Result};
use crate::io::csv_table;
use crate::model::{assemble, EbmModel, ModeKind};
use crate::numerics::{compensated_sum, jacobi_eigh, DenseMatrix};
use crate::tensor::{deviatoric, SymTensor3};
use serde::{Deserialize, Serialize};

/// Relative distance below which two decay rates are treated as one.
pub const MERGE_TOL: f64 = 1e-10;

/// One exponential term `weight * exp(-rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub rate: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSpectrum {
    pub shear: Vec<Mode>,
    pub bulk: Vec<Mode>,
    pub lambda0: f64,
    pub mu0: f64,
}

/// Scalar kernels at one instant. `g_v` and `g_s` multiply the volumetric and
/// deviatoric projectors in the relaxation tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValues {
    pub g00: f64,
    pub g00_bulk: f64,
    pub g_v: f64,
    pub g_s: f64,
}

fn modes_of(matrix: &DenseMatrix) -> Result<Vec<Mode>> {
    let eig = jacobi_eigh(matrix)?;
    let n = matrix.order();
    // ascending eigenvalues are descending rates
    let mut modes: Vec<Mode> = (0..n)
        .rev()
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            Mode { rate: -eig.eigenvalues[j], weight: v0 * v0 }
        })
        .collect();
    modes.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    let mut merged: Vec<Mode> = Vec::with_capacity(n);
    for m in modes {
        match merged.last_mut() {
            Some(last) if (m.rate - last.rate).abs() <= MERGE_TOL * m.rate.abs() => {
                let w = last.weight + m.weight;
                if w > 0.0 {
                    last.rate = (last.rate * last.weight + m.rate * m.weight) / w;
                }
                last.weight = w;
            }
            _ => merged.push(m),
        }
    }
    Ok(merged)
}

/// Decay rates and weights of the shear and bulk kernels from the
/// eigendecompositions of the symmetrized mode matrices.
pub fn compute_spectrum(m: &EbmModel) -> Result<RelaxationSpectrum> {
    let shear = modes_of(&assemble(m, ModeKind::Shear)?.matrix)?;
    let bulk = modes_of(&assemble(m, ModeKind::Bulk)?.matrix)?;
    let e0 = m.maxwell();
    Ok(RelaxationSpectrum { shear, bulk, lambda0: e0.lambda, mu0: e0.mu })
}

fn prony_sum(modes: &[Mode], t: f64) -> f64 {
    compensated_sum(modes.iter().map(|m| m.weight * (-m.rate * t).exp()))
}

impl RelaxationSpectrum {
    pub fn g00(&self, t: f64) -> f64 {
        prony_sum(&self.shear, t)
    }

    pub fn g00_bulk(&self, t: f64) -> f64 {
        prony_sum(&self.bulk, t)
    }

    /// `3λ0 + 2μ0`.
    pub fn bulk_scale(&self) -> f64 {
        3.0 * self.lambda0 + 2.0 * self.mu0
    }

    pub fn shear_scale(&self) -> f64 {
        2.0 * self.mu0
    }

    /// `g00'(0) = -Σ τ_j w_j`.
    pub fn g00_slope_at_zero(&self) -> f64 {
        -compensated_sum(self.shear.iter().map(|m| m.rate * m.weight))
    }

    pub fn g00_bulk_slope_at_zero(&self) -> f64 {
        -compensated_sum(self.bulk.iter().map(|m| m.rate * m.weight))
    }
}

pub fn eval_kernel(s: &RelaxationSpectrum, t: f64) -> Result<KernelValues> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let g00 = s.g00(t);
    let g00_bulk = s.g00_bulk(t);
    Ok(KernelValues { g00, g00_bulk, g_v: s.bulk_scale() * g00_bulk, g_s: s.shear_scale() * g00 })
}

/// Kernel table with columns `t, g00, g00_bulk, gV, gS`.
pub fn kernel_table_csv(s: &RelaxationSpectrum, times: &[f64]) -> Result<String> {
    let rows = times
        .iter()
        .map(|&t| eval_kernel(s, t).map(|k| vec![t, k.g00, k.g00_bulk, k.g_v, k.g_s]))
        .collect::<Result<Vec<_>>>()?;
    Ok(csv_table(&["t", "g00", "g00_bulk", "gV", "gS"], &rows))
}

/// Uniform grid check shared with the modal integrator.
pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::NonUniformGrid);
    }
    for (i, &t) in times.iter().enumerate() {
        if (t - (times[0] + i as f64 * h)).abs() > 1e-9 * h.max(t.abs()) {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok(h)
}

/// `∫_0^h e^{-β(h-u)} du` and `∫_0^h e^{-β(h-u)} u du` for the exact memory
/// update across one linear strain segment.
fn segment_weights(beta: f64, h: f64) -> (f64, f64) {
    let x = beta * h;
    let i0 = -(-x).exp_m1() / beta;
    let i1 = if x < 1e-3 {
        h * h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0)
    } else {
        (x + (-x).exp_m1()) / (beta * beta)
    };
    (i0, i1)
}

/// Stress along a strain history sampled on a uniform grid starting from zero
/// strain. Strain is taken piecewise linear between samples and the memory
/// integrals are advanced exactly on each segment.
pub fn stress_from_strain_history(
    s: &RelaxationSpectrum,
    times: &[f64],
    strain: &[SymTensor3],
) -> Result<Vec<SymTensor3>> {
    if times.len() != strain.len() {
        return Err(Error::InvalidArgument(format!(
            "{} time samples but {} strain samples",
            times.len(),
            strain.len()
        )));
    }
    if times.is_empty() {
        return Ok(Vec::new());
    }
    let h = uniform_step(times)?;
    if strain[0].max_abs_component() != 0.0 {
        return Err(Error::NonzeroInitialStrain);
    }

    let bulk_scale = s.bulk_scale();
    let shear_scale = s.shear_scale();
    let vol: Vec<f64> = strain.iter().map(|e| e.trace() / 3.0).collect();
    let dev: Vec<SymTensor3> = strain.iter().map(deviatoric).collect();

    let bulk_w: Vec<(f64, f64, f64)> = s
        .bulk
        .iter()
        .map(|m| {
            let (i0, i1) = segment_weights(m.rate, h);
            ((-m.rate * h).exp(), i0, i1)
        })
        .collect();
    let shear_w: Vec<(f64, f64, f64)> = s
        .shear
        .iter()
        .map(|m| {
            let (i0, i1) = segment_weights(m.rate, h);
            ((-m.rate * h).exp(), i0, i1)
        })
        .collect();

    let mut mem_v = vec![0.0; s.bulk.len()];
    let mut mem_d = vec![SymTensor3::ZERO; s.shear.len()];
    let mut out = Vec::with_capacity(times.len());
    out.push(SymTensor3::ZERO);
    for k in 1..times.len() {
        let (x0, x1) = (vol[k - 1], vol[k]);
        for (m, &(decay, i0, i1)) in mem_v.iter_mut().zip(&bulk_w) {
            *m = decay * *m + x0 * i0 + (x1 - x0) / h * i1;
        }
        let (d0, d1) = (dev[k - 1], dev[k]);
        let slope = (1.0 / h) * (d1 - d0);
        for (m, &(decay, i0, i1)) in mem_d.iter_mut().zip(&shear_w) {
            *m = decay * *m + i0 * d0 + i1 * slope;
        }

        let vol_mem = compensated_sum(s.bulk.iter().zip(&mem_v).map(|(md, m)| md.rate * md.weight * m));
        let mut dev_mem = SymTensor3::ZERO;
        for (md, m) in s.shear.iter().zip(&mem_d) {
            dev_mem += (md.rate * md.weight) * *m;
        }
        let v = bulk_scale * (vol[k] - vol_mem);
        let sigma = v * SymTensor3::IDENTITY + shear_scale * (dev[k] - dev_mem);
        out.push(sigma);
    }
    Ok(out)
}
