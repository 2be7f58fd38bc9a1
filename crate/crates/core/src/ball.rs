//! Radial modes of a homogeneous traction-free ball.

use crate::error::{Error, Result};
use crate::io::format_f64;
use crate::numerics::brent_root;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Traction function `((λ0+2μ0)η² − 4μ0) sin η + 4μ0 η cos η`.
pub fn eval_f(lambda0: f64, mu0: f64, eta: f64) -> f64 {
    ((lambda0 + 2.0 * mu0) * eta * eta - 4.0 * mu0) * eta.sin() + 4.0 * mu0 * eta * eta.cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMode {
    pub ell: usize,
    pub r: f64,
    pub k_b: f64,
    pub lambda0: f64,
    pub mu0: f64,
    pub radius: f64,
}

impl RadialMode {
    /// Cluster multiplier `R²/r_ℓ² = 1/k_b`.
    pub fn c(&self) -> f64 {
        let s = self.radius / self.r;
        s * s
    }

    /// Same mode with its root moved to `r` (used for negative controls).
    pub fn with_root(&self, r: f64) -> RadialMode {
        RadialMode { r, k_b: (r / self.radius).powi(2), ..*self }
    }
}

const BRACKET_SHRINK: f64 = 1e-9;
/// Root tolerance; tighter than the Brent default so that `c_ℓ` carries
/// full precision into the cluster polynomials.
const ROOT_TOL: f64 = 1e-15;

/// `ℓ`-th positive root of the traction function.
///
/// The root lies in `((ℓ−½)π, ℓπ)` whenever `f((ℓ−½)π) > 0`, which holds for
/// every `ℓ ≥ 2` and for `ℓ = 1` unless `λ0` is close to `−⅔μ0`. In that case
/// the search falls back to `(0, π)`, where `f(η) ~ (λ0+⅔μ0)η³ > 0` near zero.
pub fn solve_mode(lambda0: f64, mu0: f64, radius: f64, ell: usize) -> Result<RadialMode> {
    if ell == 0 {
        return Err(Error::InvalidArgument("mode index must be at least 1".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
    }
    let f = |eta: f64| eval_f(lambda0, mu0, eta);
    let hi = ell as f64 * PI - BRACKET_SHRINK;
    let lo = (ell as f64 - 0.5) * PI + BRACKET_SHRINK;
    let r = if f(lo) * f(hi) < 0.0 {
        brent_root(f, lo, hi, ROOT_TOL)?
    } else if ell == 1 {
        let lo = PI * 1e-3;
        if !(f(lo) * f(hi) < 0.0) {
            return Err(Error::BracketFailure(format!(
                "traction function has no sign change on ({lo}, {hi}) for lambda0 = {lambda0}, mu0 = {mu0}"
            )));
        }
        brent_root(f, lo, hi, ROOT_TOL)?
    } else {
        return Err(Error::BracketFailure(format!(
            "traction function has no sign change on ({lo}, {hi}) for lambda0 = {lambda0}, mu0 = {mu0}"
        )));
    };
    Ok(RadialMode { ell, r, k_b: (r / radius).powi(2), lambda0, mu0, radius })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFields {
    pub u: [f64; 3],
    pub p: f64,
}

/// `(sin η − η cos η)/η³`, the radial factor of the displacement.
fn radial_factor(eta: f64, series: bool) -> f64 {
    if series {
        // Σ_{j≥1} (−1)^{j+1} 2j η^{2j−2} / (2j+1)!
        let e2 = eta * eta;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for j in 1..14 {
            let jf = j as f64;
            term *= -e2 * (jf + 1.0) / (jf * (2.0 * jf + 2.0) * (2.0 * jf + 3.0));
            sum += term;
        }
        sum
    } else {
        (eta.sin() - eta * eta.cos()) / (eta * eta * eta)
    }
}

fn bessel_j0(eta: f64) -> f64 {
    if eta.abs() < 1e-4 {
        1.0 - eta * eta / 6.0
    } else {
        eta.sin() / eta
    }
}

/// Displacement `u = −∇p/k_b` and pressure-like potential `p = sin η/η` with
/// `η = r_ℓ|x|/R`.
pub fn eval_mode_fields(mode: &RadialMode, x: [f64; 3]) -> Result<ModeFields> {
    let rad = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if rad > mode.radius * (1.0 + 1e-14) {
        return Err(Error::OutsideDomain { radius: rad, ball_radius: mode.radius });
    }
    let eta = mode.r * rad / mode.radius;
    let g = radial_factor(eta, rad < 1e-3 * mode.radius);
    Ok(ModeFields { u: [g * x[0], g * x[1], g * x[2]], p: bessel_j0(eta) })
}

/// Residuals of the mode identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeReport {
    pub h: f64,
    /// `Q_A u + (λ0+⅔μ0) k_b u`, relative to the second term.
    pub pde_a: f64,
    /// `Q_B u + (4/3) μ0 k_b u`, relative to the second term.
    pub pde_b: f64,
    /// `∇·u − p`, relative to `|p|`.
    pub divergence: f64,
    /// `Δp + k_b p`, relative to `k_b |p|`.
    pub helmholtz: f64,
    /// `|t1 + t2| / (|t1| + |t2|)` for the boundary traction terms.
    pub boundary: f64,
}

const SAMPLE_SEED: u64 = 0x5eed_ba11;
const SAMPLE_COUNT: usize = 16;

fn interior_samples(radius: f64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut out = Vec::with_capacity(SAMPLE_COUNT);
    while out.len() < SAMPLE_COUNT {
        let d = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n2: f64 = d.iter().map(|v| v * v).sum();
        if !(0.01..=1.0).contains(&n2) {
            continue;
        }
        let s = rng.random_range(0.15..0.85) * radius / n2.sqrt();
        out.push([s * d[0], s * d[1], s * d[2]]);
    }
    out
}

fn shifted(x: [f64; 3], offsets: &[(usize, f64)]) -> [f64; 3] {
    let mut y = x;
    for &(axis, d) in offsets {
        y[axis] += d;
    }
    y
}

/// Finite-difference and analytic checks of one mode.
///
/// The operator identities are checked with second-order central
/// differences of step `h` at a fixed set of interior points; the boundary
/// identity `(λ0+2μ0) y(R) + 4μ0 k_b⁻¹ R⁻¹ y'(R) = f(r_ℓ)/r_ℓ³` is evaluated
/// in closed form.
pub fn verify_mode(mode: &RadialMode, lambda0: f64, mu0: f64, h: f64) -> ModeReport {
    let field = |x: [f64; 3]| eval_mode_fields(mode, x).expect("sample points lie inside the ball");
    let k = mode.k_b;
    let mut report = ModeReport { h, pde_a: 0.0, pde_b: 0.0, divergence: 0.0, helmholtz: 0.0, boundary: 0.0 };

    for x in interior_samples(mode.radius) {
        let centre = field(x);
        // second derivatives d²u_i/dx_j dx_k
        let mut hess = [[[0.0; 3]; 3]; 3];
        let mut lap_p = 0.0;
        let mut div_u = 0.0;
        for j in 0..3 {
            let plus = field(shifted(x, &[(j, h)]));
            let minus = field(shifted(x, &[(j, -h)]));
            for i in 0..3 {
                hess[i][j][j] = (plus.u[i] - 2.0 * centre.u[i] + minus.u[i]) / (h * h);
            }
            lap_p += (plus.p - 2.0 * centre.p + minus.p) / (h * h);
            div_u += (plus.u[j] - minus.u[j]) / (2.0 * h);
            for kk in (j + 1)..3 {
                let pp = field(shifted(x, &[(j, h), (kk, h)]));
                let pm = field(shifted(x, &[(j, h), (kk, -h)]));
                let mp = field(shifted(x, &[(j, -h), (kk, h)]));
                let mm = field(shifted(x, &[(j, -h), (kk, -h)]));
                for i in 0..3 {
                    let v = (pp.u[i] - pm.u[i] - mp.u[i] + mm.u[i]) / (4.0 * h * h);
                    hess[i][j][kk] = v;
                    hess[i][kk][j] = v;
                }
            }
        }
        let grad_div: Vec<f64> = (0..3).map(|i| (0..3).map(|j| hess[j][i][j]).sum()).collect();
        let lap_u: Vec<f64> = (0..3).map(|i| (0..3).map(|j| hess[i][j][j]).sum()).collect();
        let unorm = centre.u.iter().map(|v| v * v).sum::<f64>().sqrt();

        let ca = (lambda0 + 2.0 * mu0 / 3.0) * k;
        let cb = 4.0 / 3.0 * mu0 * k;
        let mut ra = 0.0;
        let mut rb = 0.0;
        for i in 0..3 {
            let qa = (lambda0 + 2.0 * mu0 / 3.0) * grad_div[i];
            let qb = mu0 * lap_u[i] + mu0 / 3.0 * grad_div[i];
            ra += (qa + ca * centre.u[i]).powi(2);
            rb += (qb + cb * centre.u[i]).powi(2);
        }
        report.pde_a = report.pde_a.max(ra.sqrt() / (ca.abs() * unorm));
        report.pde_b = report.pde_b.max(rb.sqrt() / (cb * unorm));
        report.divergence = report.divergence.max((div_u - centre.p).abs() / centre.p.abs().max(1e-300));
        report.helmholtz = report.helmholtz.max((lap_p + k * centre.p).abs() / (k * centre.p.abs()).max(1e-300));
    }

    report.boundary = boundary_residual(mode, lambda0, mu0);
    report
}

/// Relative residual of the traction identity at `|x| = R`.
pub fn boundary_residual(mode: &RadialMode, lambda0: f64, mu0: f64) -> f64 {
    let r = mode.r;
    let y = r.sin() / r;
    let dy = (r * r.cos() - r.sin()) / (r * r) * (r / mode.radius);
    let t1 = (lambda0 + 2.0 * mu0) * y;
    let t2 = 4.0 * mu0 / (mode.k_b * mode.radius) * dy;
    (t1 + t2).abs() / (t1.abs() + t2.abs())
}

/// Mode table with columns `ell, r, k_b`.
pub fn modes_csv(modes: &[RadialMode]) -> String {
    let mut out = String::from("ell,r,k_b\n");
    for m in modes {
        out.push_str(&format!("{},{},{}\n", m.ell, format_f64(m.r), format_f64(m.k_b)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const R1: f64 = 2.743_707_269_992_269_4;
    const R2: f64 = 6.116_764_264_461_769;

    #[test]
    fn traction_function_examples() {
        assert_eq!(eval_f(2.0, 1.0, 0.0), 0.0);
        assert!((eval_f(2.0, 1.0, PI) + 4.0 * PI).abs() < 1e-12);
        assert!((eval_f(2.0, 1.0, PI / 2.0) - (PI * PI - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn reference_roots() {
        let m1 = solve_mode(2.0, 1.0, 1.0, 1).unwrap();
        assert!((m1.r - R1).abs() < 1e-12);
        assert!((m1.k_b - R1 * R1).abs() < 1e-11);
        let m2 = solve_mode(2.0, 1.0, 1.0, 2).unwrap();
        assert!((m2.r - R2).abs() < 1e-12);
        assert!(m2.r > 1.5 * PI && m2.r < 2.0 * PI);
    }

    #[test]
    fn radius_scales_k_only() {
        let m = solve_mode(2.0, 1.0, 3.0, 1).unwrap();
        assert!((m.r - R1).abs() < 1e-12);
        assert!((m.k_b - R1 * R1 / 9.0).abs() < 1e-12);
        assert!((m.c() * m.k_b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn high_index_root_stays_in_bracket() {
        let m = solve_mode(2.0, 1.0, 1.0, 10_000).unwrap();
        let target = 10_000.0 * PI;
        assert!((m.r - target).abs() < PI / 2.0);
        assert!(m.r < target);
    }

    #[test]
    fn roots_increase_and_stay_in_brackets() {
        let mut prev = 0.0;
        for ell in 1..=50 {
            let m = solve_mode(2.0, 1.0, 1.0, ell).unwrap();
            let l = ell as f64;
            assert!(m.r > (l - 0.5) * PI && m.r < l * PI);
            assert!(eval_f(2.0, 1.0, m.r).abs() < 1e-10 * 4.0 * m.r * m.r);
            assert!(m.r > prev);
            prev = m.r;
        }
    }

    #[test]
    fn nearly_incompressible_limit_of_negative_lambda_uses_wide_bracket() {
        // λ0 = −0.6 μ0 leaves f((1/2)π) < 0, so the root sits below π/2
        let m = solve_mode(-0.6, 1.0, 1.0, 1).unwrap();
        assert!(m.r > 0.0 && m.r < PI);
        assert!(eval_f(-0.6, 1.0, m.r).abs() < 1e-12);
        assert!(eval_f(-0.6, 1.0, PI / 2.0) < 0.0);
    }

    #[test]
    fn bisection_from_either_half_agrees() {
        let f = |e: f64| eval_f(2.0, 1.0, e);
        let m = solve_mode(2.0, 1.0, 1.0, 1).unwrap();
        let lower = brent_root(f, 0.5 * PI, m.r + 1e-3, 1e-15).unwrap();
        let upper = brent_root(f, m.r - 1e-3, PI, 1e-15).unwrap();
        assert!((lower - upper).abs() < 1e-12);
    }

    #[test]
    fn invalid_arguments() {
        assert!(solve_mode(2.0, 1.0, 1.0, 0).is_err());
        assert!(solve_mode(2.0, 1.0, -1.0, 1).is_err());
    }

    #[test]
    fn field_examples() {
        let m = solve_mode(2.0, 1.0, 1.0, 1).unwrap();
        let f0 = eval_mode_fields(&m, [0.0; 3]).unwrap();
        assert_eq!(f0.u, [0.0; 3]);
        assert_eq!(f0.p, 1.0);
        let fr = eval_mode_fields(&m, [0.0, 0.6, 0.8]).unwrap();
        assert!((fr.p - m.r.sin() / m.r).abs() < 1e-15);
        let x = [0.3, -0.2, 0.1];
        let fx = eval_mode_fields(&m, x).unwrap();
        let ratio = fx.u[0] / x[0];
        assert!((fx.u[1] / x[1] - ratio).abs() < 1e-15 && (fx.u[2] / x[2] - ratio).abs() < 1e-15);
        assert!(matches!(eval_mode_fields(&m, [1.0, 1.0, 0.0]), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn series_and_closed_form_agree_at_crossover() {
        for eta in [1e-3, 2.7e-3, 3.1e-2] {
            let a = radial_factor(eta, true);
            let b = radial_factor(eta, false);
            // the closed form loses about ε/η² to cancellation
            assert!((a - b).abs() < 4.0 * f64::EPSILON / (eta * eta), "{eta}: {a} vs {b}");
        }
        for eta in [0.5, 1.0, 2.0] {
            assert!((radial_factor(eta, true) - radial_factor(eta, false)).abs() < 1e-15);
        }
    }

    #[test]
    fn displacement_near_centre_is_linear() {
        let m = solve_mode(2.0, 1.0, 1.0, 3).unwrap();
        let x = [1e-5, 0.0, 0.0];
        let u = eval_mode_fields(&m, x).unwrap().u;
        assert!((u[0] / x[0] - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn operator_residuals_are_small_and_second_order() {
        let m = solve_mode(2.0, 1.0, 1.0, 1).unwrap();
        let fine = verify_mode(&m, 2.0, 1.0, 1e-3);
        assert!(fine.pde_a < 1e-4 && fine.pde_b < 1e-4, "{fine:?}");
        assert!(fine.divergence < 1e-4 && fine.helmholtz < 1e-4, "{fine:?}");
        let a = verify_mode(&m, 2.0, 1.0, 1e-2);
        let b = verify_mode(&m, 2.0, 1.0, 5e-3);
        for (x, y) in [(a.pde_a, b.pde_a), (a.pde_b, b.pde_b), (a.divergence, b.divergence), (a.helmholtz, b.helmholtz)] {
            assert!((x / y).log2() >= 1.9, "{x} -> {y}");
        }
    }

    #[test]
    fn boundary_identity_holds_for_first_ten_modes() {
        for ell in 1..=10 {
            let m = solve_mode(2.0, 1.0, 1.0, ell).unwrap();
            assert!(boundary_residual(&m, 2.0, 1.0) < 1e-10, "ell={ell}");
        }
    }

    #[test]
    fn perturbed_root_fails_boundary_identity() {
        let m = solve_mode(2.0, 1.0, 1.0, 1).unwrap();
        assert!(boundary_residual(&m.with_root(m.r + 0.1), 2.0, 1.0) > 1e-2);
    }

    #[test]
    fn modes_table() {
        let m = solve_mode(2.0, 1.0, 1.0, 1).unwrap();
        let csv = modes_csv(&[m]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "ell,r,k_b");
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[0], "1");
        assert!((cells[1].parse::<f64>().unwrap() - R1).abs() < 1e-12);
    }
}
