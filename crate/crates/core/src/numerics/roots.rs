//! All roots of a real polynomial.
//!
//! The companion matrix is balanced (Parlett-Reinsch, radix 2), its
//! eigenvalues are taken with the Francis double-shift QR iteration on the
//! Hessenberg form, and every root is then polished by Newton's method on the
//! original coefficients.

use super::Poly;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;

const MAX_QR_ITERATIONS: usize = 60;
const NEWTON_STEPS: usize = 30;

/// Roots with `|im| < REAL_SNAP * (1 + |re|)` are reported as real.
pub const REAL_SNAP: f64 = 1e-9;

/// Roots of `p`, sorted by descending real part (then descending imaginary
/// part). Exact zero roots are factored out before the eigenvalue step.
pub fn poly_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let lead = p.leading();
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    if p.degree() == 0 {
        return Err(Error::InvalidArgument("polynomial of degree 0 has no roots".into()));
    }
    if p.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("polynomial has non-finite coefficients".into()));
    }

    let zeros = p.coeffs().iter().take_while(|&&c| c == 0.0).count();
    let reduced = Poly::new(p.coeffs()[zeros..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];

    if reduced.degree() > 0 {
        let raw = companion_eigenvalues(&reduced)?;
        for z in raw {
            if z.im < 0.0 {
                continue;
            }
            let mut z = polish(&reduced, z);
            if z.im.abs() < REAL_SNAP * (1.0 + z.re.abs()) {
                z = polish(&reduced, Complex64::new(z.re, 0.0));
                z.im = 0.0;
                roots.push(z);
            } else {
                let z = Complex64::new(z.re, z.im.abs());
                roots.push(z);
                roots.push(z.conj());
            }
        }
        // A pair that snapped to the real axis contributes only one root;
        // recover the partner by deflation.
        while roots.len() < p.degree() {
            let known: Vec<f64> = roots[zeros..].iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
            let mut q = reduced.clone();
            for r in &known {
                q = q.deflate(*r).0;
            }
            let guess = -q.coeff(q.degree().saturating_sub(1)) / q.leading();
            let z = polish(&reduced, Complex64::new(guess, 0.0));
            roots.push(Complex64::new(z.re, 0.0));
        }
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal)));
    Ok(roots)
}

/// Newton iteration on `p` starting from `z`; keeps the best iterate seen.
fn polish(p: &Poly, z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut best = z0;
    let mut best_val = p.eval_complex(z0).norm();
    for _ in 0..NEWTON_STEPS {
        let (v, dv) = p.eval_with_derivative(z);
        if v.norm() == 0.0 || dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        z -= step;
        let val = p.eval_complex(z).norm();
        if val < best_val {
            best_val = val;
            best = z;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    if z0.im == 0.0 {
        best.im = 0.0;
    }
    best
}

fn companion_eigenvalues(p: &Poly) -> Result<Vec<Complex64>> {
    let m = p.degree();
    let lead = p.leading();
    // 1-based storage mirrors the classical formulation of the algorithms.
    let mut a = vec![vec![0.0; m + 1]; m + 1];
    for k in 1..=m {
        a[1][k] = -p.coeff(m - k) / lead;
    }
    for j in 2..=m {
        a[j][j - 1] = 1.0;
    }
    balance(&mut a, m);
    hessenberg_qr(&mut a, m)
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix (1-based, destroyed).
fn hessenberg_qr(a: &mut [Vec<f64>], n: usize) -> Result<Vec<Complex64>> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                y = a[nu - 1][nu - 1];
                w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nu - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::NoConvergence { what: "Hessenberg QR", iterations: its });
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nu {
                            a[i][i] -= x;
                        }
                        let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nu - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nu {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nu - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l as isize >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}
