//! Cluster eigenvalues of the ball: Prony pairs, the cluster polynomials and
//! their roots, the augmented first-order system and its time integration.

use crate::ball::RadialMode;
use crate::error::{Error, Result};
use crate::model::EbmModel;
use crate::numerics::{
    brent_root, compensated_sum, poly_roots, product_of_shifts, weighted_partial_products, DenseMatrix, Poly,
};
use crate::relaxation::{uniform_step, RelaxationSpectrum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Strengths `α` and decay rates `β` of the combined memory kernel.
///
/// The first `shear_count` entries come from the shear spectrum, the rest
/// from the bulk spectrum; `β` is strictly increasing across the whole list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PronyPair {
    pub d: f64,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub shear_count: usize,
}

impl PronyPair {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Number of Kelvin-Voigt units when the split is balanced.
    pub fn n(&self) -> Option<usize> {
        let len = self.len();
        (len >= 2 && len % 2 == 0 && self.shear_count * 2 == len).then(|| len / 2 - 1)
    }

    /// `Σ α_j/β_j`, equal to `D` for a pair built from a model.
    pub fn strength_sum(&self) -> f64 {
        compensated_sum(self.alpha.iter().zip(&self.beta).map(|(a, b)| a / b))
    }

    /// `Σ α_i/(z+β_i) − D − c z²`.
    pub fn secular(&self, z: f64, c: f64) -> f64 {
        compensated_sum(self.alpha.iter().zip(&self.beta).map(|(a, b)| a / (z + b))) - self.d - c * z * z
    }

    /// Largest rate of the shear block and smallest of the bulk block.
    pub fn split_rates(&self) -> (f64, f64) {
        (self.beta[self.shear_count - 1], self.beta[self.shear_count])
    }
}

/// Interleaves the shear and bulk spectra into one Prony pair.
pub fn build_prony(m: &EbmModel, s: &RelaxationSpectrum) -> Result<PronyPair> {
    let e0 = m.maxwell();
    let (lambda0, mu0) = (e0.lambda, e0.mu);
    let tau_max = s.shear.iter().map(|x| x.rate).fold(f64::NEG_INFINITY, f64::max);
    let kappa_min = s.bulk.iter().map(|x| x.rate).fold(f64::INFINITY, f64::min);
    if !(tau_max < kappa_min) {
        return Err(Error::OrderingViolation { tau: tau_max, kappa: kappa_min });
    }
    let mut beta = Vec::with_capacity(s.shear.len() + s.bulk.len());
    let mut alpha = Vec::with_capacity(beta.capacity());
    for md in &s.shear {
        beta.push(md.rate);
        alpha.push(4.0 / 3.0 * mu0 * md.rate * md.weight);
    }
    for md in &s.bulk {
        beta.push(md.rate);
        alpha.push((lambda0 + 2.0 / 3.0 * mu0) * md.rate * md.weight);
    }
    Ok(PronyPair { d: lambda0 + 2.0 * mu0, beta, alpha, shear_count: s.shear.len() })
}

/// `(D + c z²) Π(z+β_j) − Σ_i α_i Π_{j≠i}(z+β_j)`.
///
/// The constant term equals `Πβ (D − Σα/β)`. For a pair built from a model
/// it vanishes identically and is stored as exactly zero once it is below
/// `1e-12` of the coefficient norm; [`constant_defect`] reports the raw value.
pub fn char_poly_ell(p: &PronyPair, c: f64) -> Poly {
    let prod = product_of_shifts(&p.beta);
    let shifted = prod.shift(2).scale(c);
    let out = Poly::sum([&shifted, &prod.scale(p.d), &weighted_partial_products(&p.alpha, &p.beta).scale(-1.0)]);
    let mut coeffs = out.coeffs().to_vec();
    if coeffs[0].abs() < ZERO_CONSTANT * out.norm1() {
        coeffs[0] = 0.0;
    }
    Poly::new(coeffs)
}

const ZERO_CONSTANT: f64 = 1e-12;

/// Coefficients of `(D + c z²) Π(z+β_j) + Σ_i α_i Π_{j≠i}(z+β_j)`: every term
/// entering a coefficient of the cluster polynomial taken with positive
/// sign. This is the natural scale for coefficientwise comparisons, since
/// the cluster polynomial's constant term cancels to zero.
pub fn coefficient_scales(p: &PronyPair, c: f64) -> Poly {
    let prod = product_of_shifts(&p.beta);
    Poly::sum([&prod.shift(2).scale(c), &prod.scale(p.d), &weighted_partial_products(&p.alpha, &p.beta)])
}

/// `D Π(z+β_j) − Σ_i α_i Π_{j≠i}(z+β_j)`, the `c → 0` limit.
pub fn limit_poly(p: &PronyPair) -> Poly {
    char_poly_ell(p, 0.0).trimmed()
}

/// Unrounded constant term of the cluster polynomial relative to its
/// coefficient 1-norm.
pub fn constant_defect(p: &PronyPair) -> f64 {
    let prod = product_of_shifts(&p.beta);
    let raw = Poly::sum([&prod.scale(p.d), &weighted_partial_products(&p.alpha, &p.beta).scale(-1.0)]);
    raw.coeff(0).abs() / raw.norm1()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpectrum {
    pub ell: usize,
    pub c: f64,
    /// `0 = a_1 > a_2 > … > a_{2n+2}`, one root per gap between poles.
    pub real_roots: Vec<f64>,
    /// The remaining two roots, either a conjugate pair or two reals.
    pub extra_roots: [Complex64; 2],
    pub poly: Poly,
}

impl ClusterSpectrum {
    /// All `2n+4` roots.
    pub fn all_roots(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.real_roots.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        out.extend_from_slice(&self.extra_roots);
        out
    }

    pub fn extras_are_complex(&self) -> bool {
        self.extra_roots[0].im != 0.0
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(&ClusterRecord::from(self))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: ClusterRecord = serde_json::from_str(s)?;
        ClusterSpectrum::try_from(rec)
    }
}

/// On-disk form of a cluster.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClusterRecord {
    ell: usize,
    c: f64,
    real_roots: Vec<f64>,
    extra_roots: Vec<[f64; 2]>,
    poly: Vec<f64>,
}

impl From<&ClusterSpectrum> for ClusterRecord {
    fn from(s: &ClusterSpectrum) -> Self {
        ClusterRecord {
            ell: s.ell,
            c: s.c,
            real_roots: s.real_roots.clone(),
            extra_roots: s.extra_roots.iter().map(|z| [z.re, z.im]).collect(),
            poly: s.poly.coeffs().to_vec(),
        }
    }
}

impl TryFrom<ClusterRecord> for ClusterSpectrum {
    type Error = Error;

    fn try_from(r: ClusterRecord) -> Result<Self> {
        if r.extra_roots.len() != 2 {
            return Err(Error::InvalidArgument(format!("expected 2 extra roots, found {}", r.extra_roots.len())));
        }
        if r.poly.len() != r.real_roots.len() + 3 {
            return Err(Error::InvalidArgument(format!(
                "polynomial of degree {} does not match {} roots",
                r.poly.len().saturating_sub(1),
                r.real_roots.len() + 2
            )));
        }
        let e = |k: usize| Complex64::new(r.extra_roots[k][0], r.extra_roots[k][1]);
        Ok(ClusterSpectrum { ell: r.ell, c: r.c, real_roots: r.real_roots, extra_roots: [e(0), e(1)], poly: Poly::new(r.poly) })
    }
}

const DEGENERACY: f64 = 1e-12;
const BRACKET_SHRINK: f64 = 1e-9;
const SECULAR_TOL: f64 = 1e-15;
const CROSS_CHECK: f64 = 1e-8;

fn check_pair(p: &PronyPair) -> Result<()> {
    if p.beta.is_empty() || p.beta.len() != p.alpha.len() {
        return Err(Error::InvalidArgument("Prony pair needs matching, nonempty alpha and beta".into()));
    }
    if p.beta[0] <= 0.0 || p.beta.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::BracketFailure("decay rates must be positive and strictly increasing".into()));
    }
    for (index, (&alpha, &beta)) in p.alpha.iter().zip(&p.beta).enumerate() {
        if !(alpha >= DEGENERACY * p.d * beta) {
            return Err(Error::DegenerateStrengths { index, alpha });
        }
    }
    Ok(())
}

/// Real roots of the secular function: `0` followed by one root in each
/// interval `(−β_{j+1}, −β_j)`, in decreasing order.
pub fn secular_roots(p: &PronyPair, c: f64) -> Result<Vec<f64>> {
    check_pair(p)?;
    let mut roots = Vec::with_capacity(p.len());
    roots.push(0.0);
    for j in 0..p.len() - 1 {
        let gap = p.beta[j + 1] - p.beta[j];
        let lo = -p.beta[j + 1] + BRACKET_SHRINK * gap;
        let hi = -p.beta[j] - BRACKET_SHRINK * gap;
        let f = |z: f64| p.secular(z, c);
        let (flo, fhi) = (f(lo), f(hi));
        if !(flo > 0.0 && fhi < 0.0) {
            return Err(Error::BracketFailure(format!(
                "secular function has no sign change on ({lo}, {hi}): {flo:e}, {fhi:e}"
            )));
        }
        roots.push(brent_root(f, lo, hi, SECULAR_TOL)?);
    }
    Ok(roots)
}

/// Real roots of the limit polynomial by the same bracketing with `c = 0`.
pub fn limit_roots(p: &PronyPair) -> Result<Vec<f64>> {
    secular_roots(p, 0.0)
}

fn newton_polish(poly: &Poly, mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (v, d) = poly.eval_with_derivative(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        let next = z - step;
        if !(poly.eval_complex(next).norm() < v.norm()) {
            break;
        }
        z = next;
    }
    z
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Cluster eigenvalues of radial mode `mode`.
pub fn cluster_roots(p: &PronyPair, mode: &RadialMode) -> Result<ClusterSpectrum> {
    cluster_roots_with_c(p, mode.ell, mode.c())
}

/// Cluster eigenvalues for a given multiplier `c`, bypassing the mode solve.
pub fn cluster_roots_with_c(p: &PronyPair, ell: usize, c: f64) -> Result<ClusterSpectrum> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("cluster multiplier must be positive, got {c}")));
    }
    let real_roots = secular_roots(p, c)?;
    let poly = char_poly_ell(p, c);

    // divide out z, then the other real roots from the largest in magnitude
    let mut rest = Poly::new(poly.coeffs()[1..].to_vec());
    let mut order: Vec<f64> = real_roots[1..].to_vec();
    order.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    for &a in &order {
        rest = rest.deflate(a).0;
    }
    let q = rest.coeffs();
    let extra = quadratic_roots(q[2], q[1], q[0]);
    let mut extra_roots = [newton_polish(&poly, extra[0]), newton_polish(&poly, extra[1])];
    if extra[0].im != 0.0 {
        extra_roots[1] = extra_roots[0].conj();
        if extra_roots[0].im < 0.0 {
            extra_roots.swap(0, 1);
        }
    } else {
        extra_roots[0].im = 0.0;
        extra_roots[1].im = 0.0;
    }

    let all = poly_roots(&poly)?;
    let scale = p.beta[0];
    let mut checks: Vec<Complex64> = real_roots.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    checks.extend_from_slice(&extra_roots);
    for z in checks {
        let nearest = all.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
        if nearest > CROSS_CHECK * z.norm().max(scale) {
            return Err(Error::CrossCheckFailure(format!(
                "root {z} of the cluster polynomial is {nearest:e} away from the companion-matrix roots"
            )));
        }
    }
    Ok(ClusterSpectrum { ell, c, real_roots, extra_roots, poly })
}

/// First-order system matrix of order `N+2` acting on `(u, v, w_1..w_N)`:
/// `u' = v`, `v' = −D k u − Σ α_i w_i`, `w_j' = −k u − β_j w_j`.
pub fn augmented_matrix(p: &PronyPair, k: f64) -> DenseMatrix {
    let n = p.len();
    let mut a = DenseMatrix::zeros(n + 2);
    a[(0, 1)] = 1.0;
    a[(1, 0)] = -p.d * k;
    for j in 0..n {
        a[(1, 2 + j)] = -p.alpha[j];
        a[(2 + j, 0)] = -k;
        a[(2 + j, 2 + j)] = -p.beta[j];
    }
    a
}

/// Eigenvector of the augmented matrix for a real eigenvalue `z`.
pub fn real_eigenvector(p: &PronyPair, k: f64, z: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(p.len() + 2);
    v.push(1.0);
    v.push(z);
    v.extend(p.beta.iter().map(|b| -k / (z + b)));
    v
}

/// Left null vector of the augmented matrix: `y·U` is conserved by the flow.
pub fn conserved_functional(p: &PronyPair) -> Vec<f64> {
    let mut y = Vec::with_capacity(p.len() + 2);
    y.push(0.0);
    y.push(1.0);
    y.extend(p.alpha.iter().zip(&p.beta).map(|(a, b)| -a / b));
    y
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
    }
}

/// Largest admissible step for [`modal_simulate`].
pub fn max_step(p: &PronyPair, mode: &RadialMode) -> f64 {
    let beta_max = p.beta.iter().copied().fold(0.0, f64::max);
    0.1 / beta_max.max((p.d * mode.k_b).sqrt())
}

/// Classical fourth-order Runge-Kutta integration of `U' = A U`.
pub fn modal_simulate(p: &PronyPair, mode: &RadialMode, u0: &[f64], times: &[f64]) -> Result<Trajectory> {
    if u0.len() != p.len() + 2 {
        return Err(Error::InvalidArgument(format!("initial state needs {} entries, got {}", p.len() + 2, u0.len())));
    }
    if times.is_empty() {
        return Ok(Trajectory { times: Vec::new(), states: Vec::new() });
    }
    let h = uniform_step(times)?;
    let bound = max_step(p, mode);
    if h > bound {
        return Err(Error::StepTooLarge { step: h, bound });
    }
    let a = augmented_matrix(p, mode.k_b);
    let mut states = Vec::with_capacity(times.len());
    let mut x = u0.to_vec();
    states.push(x.clone());
    let axpy = |x: &[f64], s: f64, y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
    for _ in 1..times.len() {
        let k1 = a.matvec(&x);
        let k2 = a.matvec(&axpy(&x, 0.5 * h, &k1));
        let k3 = a.matvec(&axpy(&x, 0.5 * h, &k2));
        let k4 = a.matvec(&axpy(&x, h, &k3));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        states.push(x.clone());
    }
    Ok(Trajectory { times: times.to_vec(), states })
}
