//! Named property suites driven by a seeded generator.
//!
//! Every property draws case `i` from [`case_rng`]`(seed, i)`, so a run is
//! reproducible regardless of thread scheduling. Cases run in parallel on
//! the current rayon pool.

use crate::ball::{boundary_residual, eval_f, solve_mode, verify_mode};
use crate::error::{Error, Result};
use crate::inversion::{invert_known_c, self_consistent_invert, ClusterData, InversionResult};
use crate::model::{assemble, assemble_unsymmetrized_shear, ModeKind};
use crate::numerics::{char_poly_of_matrix, expm, jacobi_eigh, poly_roots, DenseMatrix, Poly};
use crate::relaxation::{compute_spectrum, stress_from_strain_history};
use crate::sampling::{case_rng, ModelSampler, OrderedSample};
use crate::spectrum::{
    augmented_matrix, build_prony, char_poly_ell, cluster_roots, coefficient_scales, limit_roots, secular_roots,
};
use crate::tensor::{apply_iso, deviatoric, volumetric, IsoTensor4, SymTensor3};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Result of one property over all of its cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed value of the checked quantity.
    pub max_observed: f64,
    pub tolerance: f64,
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// One case: the observed quantity, or a description of what went wrong.
type CaseOutcome = std::result::Result<f64, String>;

struct Property {
    name: &'static str,
    description: &'static str,
    default_cases: usize,
    tolerance: f64,
    check: fn(&mut ChaCha8Rng, usize) -> CaseOutcome,
}

/// Names and one-line descriptions of every property.
pub fn property_names() -> Vec<(&'static str, &'static str)> {
    PROPERTIES.iter().map(|p| (p.name, p.description)).collect()
}

/// Runs `check` on `cases` seeded cases in parallel.
pub fn run_cases<F>(name: &'static str, seed: u64, cases: usize, tolerance: f64, check: F) -> PropertyOutcome
where
    F: Fn(&mut ChaCha8Rng, usize) -> CaseOutcome + Sync,
{
    let results: Vec<CaseOutcome> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            check(&mut rng, i)
        })
        .collect();
    let mut outcome =
        PropertyOutcome { name, cases, failures: 0, max_observed: 0.0, tolerance, first_failure: None };
    for (i, r) in results.into_iter().enumerate() {
        let failure = match r {
            Ok(v) if v <= tolerance => {
                outcome.max_observed = outcome.max_observed.max(v);
                None
            }
            Ok(v) => {
                outcome.max_observed = if v.is_nan() { f64::NAN } else { outcome.max_observed.max(v) };
                Some(format!("case {i}: observed {v:.3e} above tolerance {tolerance:.1e}"))
            }
            Err(msg) => Some(format!("case {i}: {msg}")),
        };
        if let Some(f) = failure {
            outcome.failures += 1;
            outcome.first_failure.get_or_insert(f);
        }
    }
    outcome
}

/// Runs one property by name; `cases` overrides its default case count.
pub fn run_property(name: &str, seed: u64, cases: Option<usize>) -> Result<PropertyOutcome> {
    let p = PROPERTIES
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown property '{name}'")))?;
    Ok(run_cases(p.name, seed, cases.unwrap_or(p.default_cases), p.tolerance, p.check))
}

/// Runs the selected properties (all when `only` is empty) in table order.
pub fn run_suite(only: &[String], seed: u64, cases: Option<usize>) -> Result<Vec<PropertyOutcome>> {
    for name in only {
        if !PROPERTIES.iter().any(|p| p.name == name) {
            return Err(Error::InvalidArgument(format!("unknown property '{name}'")));
        }
    }
    PROPERTIES
        .iter()
        .filter(|p| only.is_empty() || only.iter().any(|o| o == p.name))
        .map(|p| run_property(p.name, seed, cases))
        .collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Turns a failed boolean requirement into a case failure.
fn require(ok: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_tensor(rng: &mut ChaCha8Rng) -> SymTensor3 {
    SymTensor3(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-bound..bound);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

fn projectors(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let e = random_tensor(rng);
    let (v, d) = (volumetric(&e), deviatoric(&e));
    let split = (v + d - e).max_abs_component();
    let idem = (volumetric(&v) - v).max_abs_component().max((deviatoric(&d) - d).max_abs_component());
    let annihilate = volumetric(&d).max_abs_component().max(deviatoric(&v).max_abs_component());
    Ok(split.max(idem).max(annihilate))
}

fn iso_decomposition(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let c = IsoTensor4::new(rng.random_range(-3.0..10.0), rng.random_range(0.1..10.0));
    let e = random_tensor(rng);
    let direct = apply_iso(&c, &e);
    let split = c.bulk_eigenvalue() * volumetric(&e) + c.shear_eigenvalue() * deviatoric(&e);
    Ok((direct - split).max_abs_component() / direct.max_abs_component().max(1e-300))
}

fn eigh(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let n = rng.random_range(1..=8);
    let m = random_symmetric(rng, n, 5.0);
    let r = jacobi_eigh(&m).map_err(err)?;
    require(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]), || "eigenvalues not ascending".into())?;
    let recon = r.reconstruct().sub(&m).frobenius_norm() / m.frobenius_norm().max(1e-300);
    let v = &r.eigenvectors;
    let ortho = v.transpose().matmul(v).sub(&DenseMatrix::identity(n)).max_abs();
    Ok(recon.max(ortho))
}

fn expm_semigroup(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let n = rng.random_range(1..=6);
    let mut m = random_symmetric(rng, n, 3.0);
    let f = m.frobenius_norm();
    if f > 10.0 {
        m = m.scale(10.0 / f);
    }
    let (s, t) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
    let lhs = expm(&m, s + t);
    let rhs = expm(&m, s).matmul(&expm(&m, t));
    Ok(lhs.sub(&rhs).max_abs() / lhs.max_abs())
}

fn poly_round_trip(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let k = rng.random_range(1..=8);
    let mut roots: Vec<f64> = Vec::with_capacity(k);
    while roots.len() < k {
        let r = rng.random_range(-10.0..10.0);
        if roots.iter().all(|x: &f64| (x - r).abs() >= 0.1) {
            roots.push(r);
        }
    }
    let found = poly_roots(&Poly::from_real_roots(&roots)).map_err(err)?;
    let mut worst: f64 = 0.0;
    for r in &roots {
        let d = found.iter().map(|z| (z - Complex64::new(*r, 0.0)).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d / r.abs().max(1.0));
    }
    Ok(worst)
}

fn charpoly(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let n = rng.random_range(1..=8);
    let m = random_symmetric(rng, n, 3.0);
    let p = char_poly_of_matrix(&m);
    let ev = jacobi_eigh(&m).map_err(err)?.eigenvalues;
    Ok(ev.iter().map(|&x| p.eval(x).abs()).fold(0.0, f64::max) / p.norm1())
}

fn sampler() -> ModelSampler {
    ModelSampler::default()
}

fn mode_matrices(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let m = sampler().sample(rng);
    let mut worst: f64 = 0.0;
    for kind in [ModeKind::Shear, ModeKind::Bulk] {
        let a = assemble(&m, kind).map_err(err)?.matrix;
        require(a == a.transpose(), || format!("{kind:?} matrix not symmetric"))?;
        let ev = jacobi_eigh(&a).map_err(err)?.eigenvalues;
        require(ev.iter().all(|&x| x < 0.0), || format!("{kind:?} matrix not negative definite"))?;
    }
    let e0 = m.elements[0];
    let (ls, lb) = (assemble(&m, ModeKind::Shear).map_err(err)?.matrix, assemble(&m, ModeKind::Bulk).map_err(err)?.matrix);
    require(ls[(0, 0)] == -m.b() * (2.0 * e0.mu), || "shear corner".into())?;
    require(lb[(0, 0)] == -m.b() * e0.bulk_modulus3(), || "bulk corner".into())?;
    let l1 = assemble_unsymmetrized_shear(&m).map_err(err)?;
    for t in [0.1, 1.0, 5.0] {
        worst = worst.max(rel(expm(&l1, t)[(0, 0)], expm(&ls, t)[(0, 0)]));
    }
    Ok(worst)
}

fn kernel_oracle(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let m = sampler().sample(rng);
    let s = compute_spectrum(&m).map_err(err)?;
    let ls = assemble(&m, ModeKind::Shear).map_err(err)?.matrix;
    let lb = assemble(&m, ModeKind::Bulk).map_err(err)?.matrix;
    let mut worst: f64 = 0.0;
    for t in [0.0, 0.1, 1.0, 10.0] {
        worst = worst.max((s.g00(t) - expm(&ls, t)[(0, 0)]).abs());
        worst = worst.max((s.g00_bulk(t) - expm(&lb, t)[(0, 0)]).abs());
    }
    Ok(worst)
}

fn weights(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let m = sampler().sample(rng);
    let s = compute_spectrum(&m).map_err(err)?;
    require(s.shear.iter().chain(&s.bulk).all(|md| md.rate > 0.0), || "nonpositive rate".into())?;
    let ws: f64 = s.shear.iter().map(|md| md.weight).sum();
    let qs: f64 = s.bulk.iter().map(|md| md.weight).sum();
    let b = m.b();
    Ok((ws - 1.0)
        .abs()
        .max((qs - 1.0).abs())
        .max(rel(-s.g00_slope_at_zero(), 2.0 * b * s.mu0))
        .max(rel(-s.g00_bulk_slope_at_zero(), b * s.bulk_scale())))
}

fn complete_monotonicity(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let s = compute_spectrum(&sampler().sample(rng)).map_err(err)?;
    let g: Vec<f64> = (0..60).map(|i| s.g00(0.02 * i as f64)).collect();
    require(g.iter().all(|&x| x > 0.0), || "kernel not positive".into())?;
    for w in g.windows(3) {
        require(w[1] < w[0], || "first difference not negative".into())?;
        require(w[2] - 2.0 * w[1] + w[0] > 0.0, || "second difference not positive".into())?;
    }
    Ok(0.0)
}

/// Observed order is compared as `2 − order`, so the tolerance is 0.1.
fn stress_convergence(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let s = compute_spectrum(&sampler().sample(rng)).map_err(err)?;
    let omega = rng.random_range(0.5..3.0);
    let dir = SymTensor3::diag(1.0, -1.0, 0.0);
    let exact = |t: f64| {
        2.0 * s.mu0
            * s.shear
                .iter()
                .map(|md| {
                    let b = md.rate;
                    md.weight * omega * (b * (omega * t).cos() + omega * (omega * t).sin() - b * (-b * t).exp())
                        / (b * b + omega * omega)
                })
                .sum::<f64>()
    };
    let error = |steps: usize| -> std::result::Result<f64, String> {
        let t: Vec<f64> = (0..=steps).map(|i| 2.0 * i as f64 / steps as f64).collect();
        let e: Vec<SymTensor3> = t.iter().map(|&x| (omega * x).sin() * dir).collect();
        let out = stress_from_strain_history(&s, &t, &e).map_err(err)?;
        Ok(t.iter().zip(&out).map(|(&ti, sig)| (sig.0[0] - exact(ti)).abs()).fold(0.0, f64::max))
    };
    // resolve the fastest rate so the observed order is asymptotic
    let fastest = s.shear.iter().map(|md| md.rate).fold(omega, f64::max);
    let steps = (20.0 * fastest).ceil().max(100.0) as usize;
    let order = (error(steps)? / error(2 * steps)?).log2();
    Ok((2.0 - order).max(0.0))
}

fn random_moduli(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0))
}

fn boundary_roots(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let (l, m) = random_moduli(rng);
    let mut prev = 0.0;
    let mut worst: f64 = 0.0;
    for ell in 1..=50 {
        let mode = solve_mode(l, m, 1.0, ell).map_err(err)?;
        let lf = ell as f64;
        require(mode.r > (lf - 0.5) * PI && mode.r < lf * PI, || format!("r_{ell} = {} outside bracket", mode.r))?;
        require(mode.r > prev, || "roots not increasing".into())?;
        prev = mode.r;
        worst = worst.max(eval_f(l, m, mode.r).abs() / ((l + 2.0 * m) * mode.r * mode.r));
    }
    Ok(worst)
}

/// `max(2 − observed order, boundary residual · 1e9)`, tolerance 0.1.
fn eigenfunctions(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let (l, m) = random_moduli(rng);
    let ell = rng.random_range(1..=3);
    let mode = solve_mode(l, m, 1.0, ell).map_err(err)?;
    let a = verify_mode(&mode, l, m, 1e-2 / ell as f64);
    let b = verify_mode(&mode, l, m, 5e-3 / ell as f64);
    let orders = [
        (a.pde_a / b.pde_a).log2(),
        (a.pde_b / b.pde_b).log2(),
        (a.divergence / b.divergence).log2(),
        (a.helmholtz / b.helmholtz).log2(),
    ];
    let order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let boundary = (1..=10)
        .map(|k| solve_mode(l, m, 1.0, k).map(|md| boundary_residual(&md, l, m)))
        .collect::<Result<Vec<f64>>>()
        .map_err(err)?
        .into_iter()
        .fold(0.0, f64::max);
    require(boundary < 1e-10, || format!("boundary residual {boundary:.3e}"))?;
    Ok((2.0 - order).max(0.0))
}

const INTERLACING_ELLS: [usize; 3] = [1, 2, 5];

fn ordered(rng: &mut ChaCha8Rng, n_max: usize, gap: Option<f64>) -> std::result::Result<OrderedSample, String> {
    ModelSampler::with_n_max(n_max).sample_ordered(rng, gap, 1_000_000).map_err(err)
}

/// Interlacing, the root at zero and the extra-pair location; observed value
/// is the largest relative secular residual.
pub fn interlacing(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let o = ordered(rng, 4, None)?;
    let p = &o.prony;
    let len = p.len();
    let mut worst: f64 = 0.0;
    for ell in INTERLACING_ELLS {
        let mode = solve_mode(o.spectrum.lambda0, o.spectrum.mu0, o.model.radius, ell).map_err(err)?;
        let cl = cluster_roots(p, &mode).map_err(err)?;
        require(cl.real_roots.len() == len, || format!("{} real roots, expected {len}", cl.real_roots.len()))?;
        require(cl.real_roots[0].abs() <= 1e-10 * p.beta[0], || "a_1 is not zero".into())?;
        for j in 0..len - 1 {
            let a = cl.real_roots[j + 1];
            require(-p.beta[j + 1] < a && a < -p.beta[j], || format!("ell {ell}: root {a} escapes its gap"))?;
        }
        if cl.extras_are_complex() {
            let re = cl.extra_roots[0].re;
            require(-p.beta[len - 1] / 2.0 < re && re < -p.beta[0] / 2.0, || {
                format!("ell {ell}: extra pair real part {re} outside (-beta_max/2, -beta_min/2)")
            })?;
        } else {
            for z in cl.extra_roots {
                require(z.re > -p.beta[len - 1] && z.re < 0.0, || format!("ell {ell}: real extra root {z}"))?;
            }
        }
        for z in cl.all_roots() {
            let v = cl.poly.eval_complex(z).norm() / cl.poly.abs_eval(z.norm().max(p.beta[0]));
            require(v < 1e-12, || format!("ell {ell}: relative |P(z)| = {v:.3e} at {z}"))?;
        }
        for &a in &cl.real_roots {
            worst = worst.max(secular_backward_error(p, cl.c, a));
        }
    }
    Ok(worst)
}

/// Secular residual relative to the size of its terms plus the change a
/// relative perturbation of `a` would cause; small means `a` is a root of a
/// nearby problem even next to a pole.
fn secular_backward_error(p: &crate::spectrum::PronyPair, c: f64, a: f64) -> f64 {
    let (mut terms, mut slope) = (p.d + c * a * a, 2.0 * c * a.abs());
    for (x, b) in p.alpha.iter().zip(&p.beta) {
        let q = x / (a + b);
        terms += q.abs();
        slope += (q / (a + b)).abs();
    }
    p.secular(a, c).abs() / (terms + a.abs() * slope)
}

/// Coefficientwise agreement of `c · charpoly(A)` with the cluster
/// polynomial, relative to [`coefficient_scales`].
pub fn augmented_charpoly(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let o = ordered(rng, 4, None)?;
    let p = &o.prony;
    let mut worst: f64 = 0.0;
    for ell in INTERLACING_ELLS {
        let mode = solve_mode(o.spectrum.lambda0, o.spectrum.mu0, o.model.radius, ell).map_err(err)?;
        let c = mode.c();
        let cp = char_poly_of_matrix(&augmented_matrix(p, mode.k_b)).scale(c);
        let pl = char_poly_ell(p, c);
        let scales = coefficient_scales(p, c);
        for k in 0..=pl.degree() {
            worst = worst.max((cp.coeff(k) - pl.coeff(k)).abs() / scales.coeff(k));
        }
    }
    Ok(worst)
}

fn polynomial_difference(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let o = ordered(rng, 4, None)?;
    let p = &o.prony;
    let c1 = solve_mode(o.spectrum.lambda0, o.spectrum.mu0, 1.0, 1).map_err(err)?.c();
    let c2 = solve_mode(o.spectrum.lambda0, o.spectrum.mu0, 1.0, 2).map_err(err)?.c();
    let diff = char_poly_ell(p, c1).sub(&char_poly_ell(p, c2));
    let expect = crate::numerics::product_of_shifts(&p.beta).shift(2).scale(c1 - c2);
    let scales = coefficient_scales(p, c1);
    let mut worst: f64 = 0.0;
    for k in 0..diff.coeffs().len() {
        worst = worst.max((diff.coeff(k) - expect.coeff(k)).abs() / scales.coeff(k));
    }
    Ok(worst)
}

pub const LIMIT_ELLS: [usize; 3] = [10, 100, 1000];

/// Distance of the bounded cluster roots from the limit roots at each of
/// [`LIMIT_ELLS`], with the multipliers used.
pub fn limit_errors(o: &OrderedSample) -> Result<Vec<(f64, f64)>> {
    let lim = limit_roots(&o.prony)?;
    LIMIT_ELLS
        .iter()
        .map(|&ell| {
            let c = solve_mode(o.spectrum.lambda0, o.spectrum.mu0, o.model.radius, ell)?.c();
            let roots = secular_roots(&o.prony, c)?;
            let e = roots.iter().zip(&lim).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok((c, e))
        })
        .collect()
}

/// Largest deviation from 1 of consecutive ratios of `error/c`, as a factor:
/// `max(ρ, 1/ρ)`. Tolerance 2.
pub fn limit_convergence(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let o = ordered(rng, 4, None)?;
    let errs = limit_errors(&o).map_err(err)?;
    let mut worst: f64 = 1.0;
    for w in errs.windows(2) {
        let ((c1, e1), (c2, e2)) = (w[0], w[1]);
        require(e2 < e1, || format!("error did not decrease: {e1:.3e} -> {e2:.3e}"))?;
        let rho = (e1 / c1) / (e2 / c2);
        worst = worst.max(rho.max(1.0 / rho));
    }
    Ok(worst)
}

/// Largest relative deviation of every recovered quantity from the truth.
pub fn recovery_error(r: &InversionResult, o: &OrderedSample) -> f64 {
    let p = &o.prony;
    let s = &o.spectrum;
    let mut worst = rel(r.d, p.d).max(rel(r.mu0, s.mu0)).max(rel(r.lambda0, s.lambda0));
    for j in 0..p.len() {
        worst = worst.max(rel(r.beta[j], p.beta[j])).max(rel(r.alpha[j], p.alpha[j]));
    }
    for (x, y) in r.shear.iter().zip(&s.shear).chain(r.bulk.iter().zip(&s.bulk)) {
        worst = worst.max(rel(x.weight, y.weight)).max(rel(x.rate, y.rate));
    }
    worst
}

/// Forward clusters at `ℓ = 1, 2` of a well-separated model.
pub fn round_trip_case(rng: &mut ChaCha8Rng) -> std::result::Result<(OrderedSample, [ClusterData; 2]), String> {
    let o = ordered(rng, 3, Some(1.2))?;
    let mut data = Vec::with_capacity(2);
    for ell in [1, 2] {
        let mode = solve_mode(o.spectrum.lambda0, o.spectrum.mu0, o.model.radius, ell).map_err(err)?;
        data.push(ClusterData::from(&cluster_roots(&o.prony, &mode).map_err(err)?));
    }
    let [a, b]: [ClusterData; 2] = data.try_into().expect("two clusters");
    Ok((o, [a, b]))
}

/// Known-c round trip; observed is `max(recovery error / 1e-6, fit / 1e-9)`
/// so that the tolerance is 1.
pub fn round_trip_known_c(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let (o, [a, b]) = round_trip_case(rng)?;
    let r = invert_known_c(&a, &b).map_err(err)?;
    Ok((recovery_error(&r, &o) / 1e-6).max(r.fit_residual / 1e-9))
}

/// Self-consistent round trip; observed is
/// `max(recovery error / 1e-5, fit / 1e-7)`.
pub fn round_trip_self_consistent(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let (o, [a, b]) = round_trip_case(rng)?;
    let r = self_consistent_invert(&a.roots, &b.roots, 1, 2, o.model.radius).map_err(err)?;
    Ok((recovery_error(&r, &o) / 1e-5).max(r.fit_residual / 1e-7))
}

fn scale_equivariance(rng: &mut ChaCha8Rng, _: usize) -> CaseOutcome {
    let (o, [a, b]) = round_trip_case(rng)?;
    let s = rng.random_range(0.2..5.0);
    let scaled = o.model.scale_moduli(s);
    let sp = build_prony(&scaled, &compute_spectrum(&scaled).map_err(err)?).map_err(err)?;
    let mut data = Vec::with_capacity(2);
    for ell in [1, 2] {
        let mode = solve_mode(s * o.spectrum.lambda0, s * o.spectrum.mu0, o.model.radius, ell).map_err(err)?;
        data.push(ClusterData::from(&cluster_roots(&sp, &mode).map_err(err)?));
    }
    let r = invert_known_c(&a, &b).map_err(err)?;
    let rs = invert_known_c(&data[0], &data[1]).map_err(err)?;
    let mut worst = rel(rs.d, s * r.d);
    for j in 0..r.beta.len() {
        worst = worst.max(rel(rs.beta[j], s * r.beta[j])).max(rel(rs.alpha[j], s * s * r.alpha[j]));
    }
    for (x, y) in rs.shear.iter().zip(&r.shear).chain(rs.bulk.iter().zip(&r.bulk)) {
        worst = worst.max(rel(x.weight, y.weight));
    }
    Ok(worst)
}

const PROPERTIES: &[Property] = &[
    Property {
        name: "projectors",
        description: "volumetric + deviatoric = identity; idempotent and mutually annihilating",
        default_cases: 1000,
        tolerance: 1e-15,
        check: projectors,
    },
    Property {
        name: "iso_decomposition",
        description: "isotropic action equals its spectral split",
        default_cases: 1000,
        tolerance: 1e-14,
        check: iso_decomposition,
    },
    Property {
        name: "eigh",
        description: "Jacobi reconstruction and orthogonality",
        default_cases: 1000,
        tolerance: 1e-12,
        check: eigh,
    },
    Property {
        name: "expm_semigroup",
        description: "exp(M(s+t)) = exp(Ms) exp(Mt)",
        default_cases: 200,
        tolerance: 1e-10,
        check: expm_semigroup,
    },
    Property {
        name: "poly_roots",
        description: "roots of a polynomial built from separated real roots (error / max(1, |r|))",
        default_cases: 500,
        tolerance: 1e-9,
        check: poly_round_trip,
    },
    Property {
        name: "charpoly",
        description: "characteristic polynomial vanishes at the eigenvalues",
        default_cases: 300,
        tolerance: 1e-8,
        check: charpoly,
    },
    Property {
        name: "mode_matrices",
        description: "mode matrices symmetric, negative definite; similarity keeps the (1,1) exponential",
        default_cases: 1000,
        tolerance: 1e-10,
        check: mode_matrices,
    },
    Property {
        name: "kernel_oracle",
        description: "Prony kernels equal the (1,1) matrix exponential",
        default_cases: 1000,
        tolerance: 1e-10,
        check: kernel_oracle,
    },
    Property {
        name: "weights",
        description: "positive rates, unit weight sums and initial slopes",
        default_cases: 1000,
        tolerance: 1e-12,
        check: weights,
    },
    Property {
        name: "complete_monotonicity",
        description: "sampled kernel positive, decreasing and convex",
        default_cases: 200,
        tolerance: 0.0,
        check: complete_monotonicity,
    },
    Property {
        name: "stress_convergence",
        description: "hereditary stress converges at second order (2 - order)",
        default_cases: 50,
        tolerance: 0.1,
        check: stress_convergence,
    },
    Property {
        name: "boundary_roots",
        description: "traction roots bracketed, increasing and accurate for l = 1..50",
        default_cases: 100,
        tolerance: 1e-10,
        check: boundary_roots,
    },
    Property {
        name: "eigenfunctions",
        description: "finite-difference residuals second order (2 - order); boundary identity",
        default_cases: 20,
        tolerance: 0.1,
        check: eigenfunctions,
    },
    Property {
        name: "interlacing",
        description: "real cluster roots interlace the poles; relative secular residual",
        default_cases: 500,
        tolerance: 1e-12,
        check: interlacing,
    },
    Property {
        name: "augmented_charpoly",
        description: "c times charpoly of the augmented matrix equals the cluster polynomial",
        default_cases: 500,
        tolerance: 1e-9,
        check: augmented_charpoly,
    },
    Property {
        name: "polynomial_difference",
        description: "P(c1) - P(c2) = (c1 - c2) z^2 prod(z + beta)",
        default_cases: 200,
        tolerance: 1e-12,
        check: polynomial_difference,
    },
    Property {
        name: "limit_convergence",
        description: "bounded roots approach the limit roots in proportion to c (ratio factor)",
        default_cases: 100,
        tolerance: 2.0,
        check: limit_convergence,
    },
    Property {
        name: "round_trip_known_c",
        description: "inversion with known multipliers (error/1e-6, fit/1e-9)",
        default_cases: 200,
        tolerance: 1.0,
        check: round_trip_known_c,
    },
    Property {
        name: "round_trip_self_consistent",
        description: "inversion with unknown multipliers (error/1e-5, fit/1e-7)",
        default_cases: 200,
        tolerance: 1.0,
        check: round_trip_self_consistent,
    },
    Property {
        name: "scale_equivariance",
        description: "scaling the moduli commutes with inversion",
        default_cases: 50,
        tolerance: 1e-8,
        check: scale_equivariance,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names = property_names();
        for (i, (a, _)) in names.iter().enumerate() {
            assert!(names[i + 1..].iter().all(|(b, _)| a != b));
        }
    }

    #[test]
    fn unknown_property_is_an_error() {
        assert!(run_property("nope", 1, None).is_err());
        assert!(run_suite(&["nope".to_string()], 1, None).is_err());
    }

    #[test]
    fn small_runs_pass_and_repeat() {
        let a = run_suite(&[], 7, Some(3)).unwrap();
        let b = run_suite(&[], 7, Some(3)).unwrap();
        assert_eq!(a, b);
        for o in &a {
            assert!(o.passed(), "{o:?}");
        }
    }

    #[test]
    fn failures_are_counted() {
        let o = run_cases("t", 1, 4, 0.5, |_, i| if i == 2 { Err("boom".into()) } else { Ok(i as f64 / 10.0) });
        assert_eq!(o.failures, 1);
        assert_eq!(o.first_failure.as_deref(), Some("case 2: boom"));
        assert_eq!(o.max_observed, 0.3);
    }
}
