//! Recovery of the model from two clusters of eigenvalues.
//!
//! For clusters `ℓ1`, `ℓ2` with multipliers `c1 ≠ c2` the monic polynomials
//! `M1`, `M2` with the given roots satisfy
//! `c1 M1 − c2 M2 = (c1 − c2) z² Π(z+β_j)`, which yields the decay rates. The
//! strengths follow from `α_i = −c1 M1(−β_i) / Π_{j≠i}(β_j − β_i)`.

use crate::ball::solve_mode;
use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, poly_roots, Poly};
use crate::relaxation::Mode;
use crate::spectrum::ClusterSpectrum;
use crate::tensor::check_strong_convexity;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Roots of one cluster together with its multiplier or mode index.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterData {
    pub roots: Vec<Complex64>,
    pub c: Option<f64>,
    pub ell: Option<usize>,
}

impl From<&ClusterSpectrum> for ClusterData {
    fn from(s: &ClusterSpectrum) -> Self {
        ClusterData { roots: s.all_roots(), c: Some(s.c), ell: Some(s.ell) }
    }
}

impl ClusterData {
    pub fn known_c(roots: Vec<Complex64>, c: f64) -> Self {
        ClusterData { roots, c: Some(c), ell: None }
    }

    /// Number of Kelvin-Voigt units implied by the root count `2n + 4`.
    pub fn n(&self) -> Result<usize> {
        let k = self.roots.len();
        if k < 4 || k % 2 != 0 {
            return Err(Error::InvalidArgument(format!("a cluster has 2n+4 roots, got {k}")));
        }
        Ok((k - 4) / 2)
    }

    /// Root count, conjugate closure and the single root at zero.
    pub fn validate(&self) -> Result<usize> {
        let n = self.n()?;
        let scale = self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        if self.roots.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidArgument("cluster contains non-finite roots".into()));
        }
        for z in &self.roots {
            if z.im != 0.0 && !self.roots.iter().any(|w| (w - z.conj()).norm() <= 1e-12 * scale) {
                return Err(Error::InvalidArgument(format!("root {z} has no conjugate partner")));
            }
        }
        let zeros = self.roots.iter().filter(|z| z.norm() <= 1e-10 * scale).count();
        if zeros != 1 {
            return Err(Error::InvalidArgument(format!("expected exactly one root at zero, found {zeros}")));
        }
        Ok(n)
    }

    fn monic(&self) -> Poly {
        // the root at zero is exact by construction of the clusters
        let roots: Vec<Complex64> = self
            .roots
            .iter()
            .map(|&z| if z.norm() <= 1e-10 * self.scale() { Complex64::new(0.0, 0.0) } else { z })
            .collect();
        Poly::from_roots(&roots)
    }

    fn scale(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Π_k (z − ρ_k)` evaluated in product form at a real point.
    fn monic_at(&self, z: f64) -> f64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for r in &self.roots {
            acc *= Complex64::new(z, 0.0) - r;
        }
        acc.re
    }
}

/// Decay rates, strengths and `D` recovered from two clusters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PronyEstimate {
    pub d: f64,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Largest of the two lowest coefficients of `c1 M1 − c2 M2`, relative.
    pub low_coefficient_residual: f64,
    /// `‖c1 M1 − c2 M2 − (c1 − c2) z² Q‖ / ‖c1 M1‖` in coefficients.
    pub identity_residual: f64,
    pub min_gap_ratio: f64,
}

const LOW_COEFF_TOL: f64 = 1e-8;
const GAP_THRESHOLD: f64 = 1.05;

/// Known-multiplier recovery of `(D, α, β)`.
pub fn recover_prony(c1: &ClusterData, c2: &ClusterData) -> Result<PronyEstimate> {
    let (m1, m2) = (c1.c, c2.c);
    let (Some(m1), Some(m2)) = (m1, m2) else {
        return Err(Error::InvalidArgument("known-c recovery needs the multiplier of both clusters".into()));
    };
    recover_with(c1, c2, m1, m2)
}

fn recover_with(d1: &ClusterData, d2: &ClusterData, c1: f64, c2: f64) -> Result<PronyEstimate> {
    let n = d1.validate()?;
    if d2.validate()? != n {
        return Err(Error::InconsistentClusters(format!(
            "clusters have {} and {} roots",
            d1.roots.len(),
            d2.roots.len()
        )));
    }
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidArgument(format!("multipliers must be positive, got {c1} and {c2}")));
    }
    if c1 == c2 {
        return Err(Error::InconsistentClusters("both clusters have the same multiplier".into()));
    }
    let len = 2 * n + 2;
    let p1 = d1.monic().scale(c1);
    let p2 = d2.monic().scale(c2);
    let diff = p1.sub(&p2);

    let low_scale = p1.coeff(1).abs().max(p2.coeff(1).abs());
    let low = diff.coeff(0).abs().max(diff.coeff(1).abs()) / low_scale;
    if !(low <= LOW_COEFF_TOL) {
        return Err(Error::InconsistentClusters(format!(
            "low coefficients of c1 M1 - c2 M2 are {low:.3e} relative (tolerance {LOW_COEFF_TOL:e})"
        )));
    }
    let q = Poly::new(diff.coeffs()[2..].to_vec()).scale(1.0 / (c1 - c2));
    let identity = diff.sub(&q.shift(2).scale(c1 - c2));
    let identity_residual = identity.norm1() / p1.norm1();

    let roots = poly_roots(&q)?;
    let mut beta = Vec::with_capacity(len);
    for z in &roots {
        if z.im != 0.0 || !(z.re < 0.0) {
            return Err(Error::ComplexBeta(format!("root {z} of the pole polynomial")));
        }
        beta.push(-z.re);
    }
    beta.sort_by(f64::total_cmp);
    if beta.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::ComplexBeta("repeated decay rate".into()));
    }
    let min_gap_ratio = beta.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    if min_gap_ratio < GAP_THRESHOLD {
        return Err(Error::IllConditioned { ratio: min_gap_ratio, threshold: GAP_THRESHOLD });
    }

    // P_r = c1 M1 − c1 z² Q has degree 2n+2 and leading coefficient D
    let pr = p1.sub(&q.shift(2).scale(c1));
    let d = pr.coeff(len);

    let mut alpha = Vec::with_capacity(len);
    for i in 0..len {
        let mut denom = 1.0;
        for j in 0..len {
            if j != i {
                denom *= beta[j] - beta[i];
            }
        }
        let a = -c1 * d1.monic_at(-beta[i]) / denom;
        if !(a > 0.0) {
            return Err(Error::NonPositiveAlpha { index: i, alpha: a });
        }
        alpha.push(a);
    }
    Ok(PronyEstimate { d, beta, alpha, low_coefficient_residual: low, identity_residual, min_gap_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Diagnostics {
    pub mode: String,
    pub iterations: usize,
    pub multipliers: Vec<f64>,
    pub low_coefficient_residual: f64,
    pub identity_residual: f64,
    /// `|Σα/β − D| / D`.
    pub strength_identity_residual: f64,
    pub min_gap_ratio: f64,
    /// Self-consistent mode only: data ratio `c2/c1` against the model's.
    pub ratio_residual: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionResult {
    pub n: usize,
    pub d: f64,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub mu0: f64,
    pub lambda0: f64,
    /// `(τ_j, (v_0^j)²)`.
    pub shear: Vec<Mode>,
    /// `(κ_j, (q_0^j)²)`.
    pub bulk: Vec<Mode>,
    pub fit_residual: f64,
    pub diagnostics: Diagnostics,
}

impl InversionResult {
    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }
}

/// Moduli and modal weights from a Prony pair whose first `n+1` entries are
/// the shear block.
pub fn recover_moduli(d: f64, alpha: &[f64], beta: &[f64], n: usize) -> Result<InversionResult> {
    let len = 2 * n + 2;
    if alpha.len() != len || beta.len() != len {
        return Err(Error::InvalidArgument(format!(
            "n = {n} needs {len} strengths and rates, got {} and {}",
            alpha.len(),
            beta.len()
        )));
    }
    let ratio: Vec<f64> = alpha.iter().zip(beta).map(|(a, b)| a / b).collect();
    let shear_sum = compensated_sum(ratio[..=n].iter().copied());
    let bulk_sum = compensated_sum(ratio[n + 1..].iter().copied());
    let mu0 = 0.75 * shear_sum;
    let lambda0 = bulk_sum - 0.5 * shear_sum;
    let delta = (1e-12 * lambda0.abs().max(mu0.abs())).max(f64::MIN_POSITIVE);
    if !check_strong_convexity(lambda0, mu0, delta) {
        return Err(Error::NegativeModulus { lambda0, mu0 });
    }
    let bulk_scale = lambda0 + 2.0 / 3.0 * mu0;
    let shear = (0..=n).map(|j| Mode { rate: beta[j], weight: 0.75 / mu0 * ratio[j] }).collect();
    let bulk = (n + 1..len).map(|j| Mode { rate: beta[j], weight: ratio[j] / bulk_scale }).collect();
    let strength_identity_residual = (shear_sum + bulk_sum - d).abs() / d.abs();
    Ok(InversionResult {
        n,
        d,
        beta: beta.to_vec(),
        alpha: alpha.to_vec(),
        mu0,
        lambda0,
        shear,
        bulk,
        fit_residual: 0.0,
        diagnostics: Diagnostics { strength_identity_residual, ..Diagnostics::default() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub residual: f64,
    pub roots_checked: usize,
    pub warning: Option<String>,
}

/// Largest relative secular residual `|Σα/(a+β) − D − c a²| / D` over the
/// real roots of the clusters.
pub fn fit_residual(result: &InversionResult, clusters: &[ClusterData]) -> FitReport {
    let mut residual: f64 = 0.0;
    let mut checked = 0;
    let mut warnings = Vec::new();
    if clusters.is_empty() {
        warnings.push("no clusters to check".to_string());
    }
    for (k, cl) in clusters.iter().enumerate() {
        let Some(c) = cl.c else {
            warnings.push(format!("cluster {k} has no multiplier and was skipped"));
            continue;
        };
        for z in cl.roots.iter().filter(|z| z.im == 0.0) {
            let a = z.re;
            let s = compensated_sum(result.alpha.iter().zip(&result.beta).map(|(al, b)| al / (a + b)));
            residual = residual.max((s - result.d - c * a * a).abs() / result.d);
            checked += 1;
        }
    }
    FitReport { residual, roots_checked: checked, warning: (!warnings.is_empty()).then(|| warnings.join("; ")) }
}

/// Known-multiplier pipeline: Prony recovery, moduli and fit residual.
pub fn invert_known_c(c1: &ClusterData, c2: &ClusterData) -> Result<InversionResult> {
    let est = recover_prony(c1, c2)?;
    let n = c1.n()?;
    let mut result = recover_moduli(est.d, &est.alpha, &est.beta, n)?;
    fill_diagnostics(&mut result, &est, "known-c");
    result.diagnostics.multipliers = vec![c1.c.unwrap_or(f64::NAN), c2.c.unwrap_or(f64::NAN)];
    let fit = fit_residual(&result, &[c1.clone(), c2.clone()]);
    result.fit_residual = fit.residual;
    result.diagnostics.warnings.extend(fit.warning);
    Ok(result)
}

fn fill_diagnostics(result: &mut InversionResult, est: &PronyEstimate, mode: &str) {
    let diag = &mut result.diagnostics;
    diag.mode = mode.to_string();
    diag.low_coefficient_residual = est.low_coefficient_residual;
    diag.identity_residual = est.identity_residual;
    diag.min_gap_ratio = est.min_gap_ratio;
}

const MAX_FIXED_POINT: usize = 100;
const FIXED_POINT_TOL: f64 = 1e-12;
const RATIO_TOL: f64 = 1e-6;

/// Inversion when only the mode indices are known.
///
/// The ratio `c2/c1` follows from the vanishing low coefficients of
/// `c1 M1 − c2 M2`. The scale `c1` is the fixed point of
/// `c1 → R²/r_{ℓ1}(λ0(c1), μ0(c1))²`, iterated with damping ½.
pub fn self_consistent_invert(
    roots1: &[Complex64],
    roots2: &[Complex64],
    ell1: usize,
    ell2: usize,
    radius: f64,
) -> Result<InversionResult> {
    let guess = radius * radius / ((ell1 as f64 - 0.25) * PI).powi(2);
    self_consistent_invert_from(roots1, roots2, ell1, ell2, radius, guess)
}

/// [`self_consistent_invert`] with an explicit starting multiplier.
pub fn self_consistent_invert_from(
    roots1: &[Complex64],
    roots2: &[Complex64],
    ell1: usize,
    ell2: usize,
    radius: f64,
    initial_c1: f64,
) -> Result<InversionResult> {
    if ell1 == ell2 || ell1 == 0 || ell2 == 0 {
        return Err(Error::InvalidArgument(format!("mode indices must be distinct and positive, got {ell1}, {ell2}")));
    }
    let d1 = ClusterData { roots: roots1.to_vec(), c: None, ell: Some(ell1) };
    let d2 = ClusterData { roots: roots2.to_vec(), c: None, ell: Some(ell2) };
    let n = d1.validate()?;
    if d2.validate()? != n {
        return Err(Error::InconsistentClusters("clusters differ in size".into()));
    }
    let (m1, m2) = (d1.monic(), d2.monic());
    // least squares for ρ = c2/c1 on the z⁰ and z¹ coefficients of M1 − ρ M2
    let (a0, a1, b0, b1) = (m1.coeff(0), m1.coeff(1), m2.coeff(0), m2.coeff(1));
    let rho = (a0 * b0 + a1 * b1) / (b0 * b0 + b1 * b1);
    let consistency = ((a0 - rho * b0).powi(2) + (a1 - rho * b1).powi(2)).sqrt() / (a0 * a0 + a1 * a1).sqrt();
    if !(rho > 0.0) || rho == 1.0 {
        return Err(Error::RatioInconsistent(format!("multiplier ratio {rho} is not admissible")));
    }

    let inconsistent = |e: Error| Error::RatioInconsistent(format!("recovery failed: {e}"));
    let step = |c1: f64| -> Result<(PronyEstimate, InversionResult, f64)> {
        let est = recover_with(&d1, &d2, c1, rho * c1).map_err(inconsistent)?;
        let res = recover_moduli(est.d, &est.alpha, &est.beta, n).map_err(inconsistent)?;
        let c_next = solve_mode(res.lambda0, res.mu0, radius, ell1).map_err(inconsistent)?.c();
        Ok((est, res, c_next))
    };

    let mut c1 = initial_c1;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_FIXED_POINT {
        iterations += 1;
        let (_, _, c_model) = step(c1)?;
        let next = 0.5 * (c1 + c_model);
        let change = (next - c1).abs() / c1;
        c1 = next;
        if change < FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "self-consistent multiplier iteration", iterations });
    }

    let (est, mut result, _) = step(c1)?;
    let c2_model = solve_mode(result.lambda0, result.mu0, radius, ell2).map_err(inconsistent)?.c();
    let c1_model = solve_mode(result.lambda0, result.mu0, radius, ell1).map_err(inconsistent)?.c();
    let rho_model = c2_model / c1_model;
    let ratio_residual = (rho - rho_model).abs() / rho_model;
    if !(ratio_residual <= RATIO_TOL) {
        return Err(Error::RatioInconsistent(format!(
            "data ratio c2/c1 = {rho} but the recovered model gives {rho_model} (relative gap {ratio_residual:.3e})"
        )));
    }

    fill_diagnostics(&mut result, &est, "self-consistent");
    result.diagnostics.iterations = iterations;
    result.diagnostics.multipliers = vec![c1, rho * c1];
    result.diagnostics.ratio_residual = Some(ratio_residual);
    if consistency > LOW_COEFF_TOL {
        result.diagnostics.warnings.push(format!("ratio least-squares residual {consistency:.3e}"));
    }
    let fit = fit_residual(
        &result,
        &[ClusterData { c: Some(c1), ..d1 }, ClusterData { c: Some(rho * c1), ..d2 }],
    );
    result.fit_residual = fit.residual;
    result.diagnostics.warnings.extend(fit.warning);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::solve_mode;
    use crate::model::{EbmModel, Element};
    use crate::relaxation::compute_spectrum;
    use crate::sampling::{case_rng, ModelSampler, OrderedSample};
    use crate::spectrum::{build_prony, cluster_roots, PronyPair};

    fn reference() -> (EbmModel, PronyPair) {
        let m = EbmModel::new(1.0, vec![Element::new(2.0, 1.0, 1.0)]);
        let p = build_prony(&m, &compute_spectrum(&m).unwrap()).unwrap();
        (m, p)
    }

    fn clusters(p: &PronyPair, lambda0: f64, mu0: f64, radius: f64) -> (ClusterSpectrum, ClusterSpectrum) {
        let a = cluster_roots(p, &solve_mode(lambda0, mu0, radius, 1).unwrap()).unwrap();
        let b = cluster_roots(p, &solve_mode(lambda0, mu0, radius, 2).unwrap()).unwrap();
        (a, b)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_round_trip_known_c() {
        let (_, p) = reference();
        let (a, b) = clusters(&p, 2.0, 1.0, 1.0);
        let est = recover_prony(&(&a).into(), &(&b).into()).unwrap();
        assert!(rel(est.d, 4.0) < 1e-8);
        assert!(rel(est.beta[0], 2.0) < 1e-8 && rel(est.beta[1], 8.0) < 1e-8);
        assert!(rel(est.alpha[0], 8.0 / 3.0) < 1e-8 && rel(est.alpha[1], 64.0 / 3.0) < 1e-8);
        assert!(est.identity_residual < 1e-10);
    }

    #[test]
    fn reference_moduli() {
        let r = recover_moduli(4.0, &[8.0 / 3.0, 64.0 / 3.0], &[2.0, 8.0], 0).unwrap();
        assert!(rel(r.mu0, 1.0) < 1e-15 && rel(r.lambda0, 2.0) < 1e-15);
        assert!(rel(r.lambda0 + 2.0 * r.mu0, r.d) < 1e-10);
        assert!(rel(r.shear[0].weight, 1.0) < 1e-15 && rel(r.bulk[0].weight, 1.0) < 1e-15);
        assert_eq!(r.shear[0].rate, 2.0);
        assert_eq!(r.bulk[0].rate, 8.0);
    }

    #[test]
    fn negative_moduli_are_rejected() {
        assert!(matches!(
            recover_moduli(1.0, &[-1.0, 1.0], &[1.0, 2.0], 0),
            Err(Error::NegativeModulus { .. })
        ));
    }

    #[test]
    fn equal_multipliers_are_inconsistent() {
        let (_, p) = reference();
        let (a, _) = clusters(&p, 2.0, 1.0, 1.0);
        let d: ClusterData = (&a).into();
        assert!(matches!(recover_prony(&d, &d), Err(Error::InconsistentClusters(_))));
    }

    #[test]
    fn perturbed_root_trips_the_low_coefficient_check() {
        let (_, p) = reference();
        let (a, b) = clusters(&p, 2.0, 1.0, 1.0);
        let mut d1: ClusterData = (&a).into();
        d1.roots[1].re += 1e-3;
        assert!(matches!(recover_prony(&d1, &(&b).into()), Err(Error::InconsistentClusters(_))));

        // with the check out of the way the secular fit degrades visibly
        let est = recover_with(&(&a).into(), &(&b).into(), a.c, b.c).unwrap();
        let r = recover_moduli(est.d, &est.alpha, &est.beta, 0).unwrap();
        assert!(fit_residual(&r, &[d1]).residual > 1e-4);
    }

    #[test]
    fn fit_residual_examples() {
        let (_, p) = reference();
        let (a, b) = clusters(&p, 2.0, 1.0, 1.0);
        let data: Vec<ClusterData> = vec![(&a).into(), (&b).into()];
        let r = invert_known_c(&data[0], &data[1]).unwrap();
        assert!(r.fit_residual < 1e-9);

        let mut bumped = r.clone();
        for a in &mut bumped.alpha {
            *a *= 1.01;
        }
        let f = fit_residual(&bumped, &data).residual;
        assert!(f > 1e-3 && f < 1e-1, "{f}");

        let empty = fit_residual(&r, &[]);
        assert_eq!(empty.residual, 0.0);
        assert!(empty.warning.is_some());
    }

    #[test]
    fn malformed_clusters_are_rejected() {
        let odd = ClusterData::known_c(vec![Complex64::new(0.0, 0.0); 5], 0.1);
        assert!(odd.validate().is_err());
        let unpaired = ClusterData::known_c(
            vec![Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 1.0), Complex64::new(-2.0, 2.0)],
            0.1,
        );
        assert!(unpaired.validate().is_err());
        let no_zero = ClusterData::known_c(
            vec![Complex64::new(-0.5, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 1.0), Complex64::new(-2.0, -1.0)],
            0.1,
        );
        assert!(no_zero.validate().is_err());
    }

    #[test]
    fn reference_self_consistent_matches_known_c() {
        let (_, p) = reference();
        let (a, b) = clusters(&p, 2.0, 1.0, 1.0);
        let known = invert_known_c(&(&a).into(), &(&b).into()).unwrap();
        let sc = self_consistent_invert(&a.all_roots(), &b.all_roots(), 1, 2, 1.0).unwrap();
        assert!(rel(sc.d, known.d) < 1e-7 && rel(sc.mu0, known.mu0) < 1e-7 && rel(sc.lambda0, known.lambda0) < 1e-7);
        for (x, y) in sc.alpha.iter().zip(&known.alpha).chain(sc.beta.iter().zip(&known.beta)) {
            assert!(rel(*x, *y) < 1e-7);
        }
        assert!(sc.fit_residual < 1e-7);

        let far = self_consistent_invert_from(&a.all_roots(), &b.all_roots(), 1, 2, 1.0, 4.0 * a.c).unwrap();
        assert!(rel(far.diagnostics.multipliers[0], sc.diagnostics.multipliers[0]) < 1e-10);
        assert!(rel(far.mu0, sc.mu0) < 1e-10);
    }

    #[test]
    fn different_models_give_inconsistent_ratio() {
        let (_, p) = reference();
        let (a, _) = clusters(&p, 2.0, 1.0, 1.0);
        let other = EbmModel::new(1.0, vec![Element::new(1.0, 3.0, 0.5)]);
        let q = build_prony(&other, &compute_spectrum(&other).unwrap()).unwrap();
        let (_, b) = clusters(&q, 1.0, 3.0, 1.0);
        assert!(matches!(
            self_consistent_invert(&a.all_roots(), &b.all_roots(), 1, 2, 1.0),
            Err(Error::RatioInconsistent(_))
        ));
    }

    fn sample(case: usize, n_max: usize) -> OrderedSample {
        ModelSampler::with_n_max(n_max).sample_ordered(&mut case_rng(314, case), Some(1.2), 1_000_000).unwrap()
    }

    fn assert_matches(r: &InversionResult, o: &OrderedSample, tol: f64) {
        let p = &o.prony;
        assert!(rel(r.d, p.d) < tol);
        for j in 0..p.len() {
            assert!(rel(r.beta[j], p.beta[j]) < tol, "beta[{j}] {} vs {}", r.beta[j], p.beta[j]);
            assert!(rel(r.alpha[j], p.alpha[j]) < tol, "alpha[{j}] {} vs {}", r.alpha[j], p.alpha[j]);
        }
        assert!(rel(r.mu0, o.spectrum.mu0) < tol && rel(r.lambda0, o.spectrum.lambda0) < tol);
        for (x, y) in r.shear.iter().zip(&o.spectrum.shear).chain(r.bulk.iter().zip(&o.spectrum.bulk)) {
            assert!(rel(x.weight, y.weight) < tol && rel(x.rate, y.rate) < tol);
        }
    }

    #[test]
    fn random_round_trips() {
        for case in 0..30 {
            let o = sample(case, 3);
            let (a, b) = clusters(&o.prony, o.spectrum.lambda0, o.spectrum.mu0, 1.0);
            let known = invert_known_c(&(&a).into(), &(&b).into()).unwrap();
            assert_matches(&known, &o, 1e-6);
            assert!(known.fit_residual < 1e-9, "case {case}: {}", known.fit_residual);
            let sc = self_consistent_invert(&a.all_roots(), &b.all_roots(), 1, 2, 1.0).unwrap();
            assert_matches(&sc, &o, 1e-5);
            assert!(sc.fit_residual < 1e-7);
        }
    }

    #[test]
    fn scaling_the_moduli_commutes_with_inversion() {
        for case in 0..10 {
            let o = sample(case, 2);
            let s = 3.7;
            let scaled = o.model.scale_moduli(s);
            let sp = build_prony(&scaled, &compute_spectrum(&scaled).unwrap()).unwrap();
            let (a, b) = clusters(&o.prony, o.spectrum.lambda0, o.spectrum.mu0, 1.0);
            let (sa, sb) = clusters(&sp, s * o.spectrum.lambda0, s * o.spectrum.mu0, 1.0);
            let r = invert_known_c(&(&a).into(), &(&b).into()).unwrap();
            let rs = invert_known_c(&(&sa).into(), &(&sb).into()).unwrap();
            assert!(rel(rs.d, s * r.d) < 1e-8);
            for j in 0..r.beta.len() {
                assert!(rel(rs.beta[j], s * r.beta[j]) < 1e-8);
                // α = (moduli)·(rate)·(weight) picks up two factors of s
                assert!(rel(rs.alpha[j], s * s * r.alpha[j]) < 1e-8);
            }
            for (x, y) in rs.shear.iter().zip(&r.shear).chain(rs.bulk.iter().zip(&r.bulk)) {
                assert!(rel(x.weight, y.weight) < 1e-8);
            }
        }
    }
}
