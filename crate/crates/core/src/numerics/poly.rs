//! Real-coefficient polynomials in ascending-degree storage.
//!
//! Expansions that sum several products (sums of partial products, root
//! expansions) accumulate each coefficient with Neumaier's compensated
//! summation, since the low-order coefficients of the polynomials used here
//! are small differences of large terms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Coefficients in ascending degree. Stored as given; see [`Poly::trimmed`].
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `z + a`.
    pub fn linear_factor(a: f64) -> Self {
        Poly::new(vec![a, 1.0])
    }

    pub fn monomial(degree: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    /// Monic polynomial `Π (z - r)` over real roots.
    pub fn from_real_roots(roots: &[f64]) -> Self {
        let mut p = Poly::constant(1.0);
        for &r in roots {
            p = p.mul(&Poly::linear_factor(-r));
        }
        p
    }

    /// Monic polynomial with the given roots. Complex roots must come in
    /// conjugate pairs; each pair contributes one real quadratic factor and
    /// only roots with non-negative imaginary part are used to build it.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Poly::constant(1.0);
        for r in roots {
            if r.im == 0.0 {
                p = p.mul(&Poly::linear_factor(-r.re));
            } else if r.im > 0.0 {
                p = p.mul(&Poly::new(vec![r.norm_sqr(), -2.0 * r.re, 1.0]));
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Drops exactly-zero leading coefficients (keeps at least one).
    pub fn trimmed(&self) -> Poly {
        let mut c = self.coeffs.clone();
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        Poly::new(c)
    }

    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at a complex point (Horner).
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_k| |z|^k`, the natural scale for judging `|p(z)|`.
    pub fn abs_eval(&self, z: f64) -> f64 {
        let az = z.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * az + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| s * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut acc = vec![CompensatedSum::new(); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j].add(a * b);
            }
        }
        Poly::new(acc.iter().map(CompensatedSum::value).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        let mut c = vec![0.0; k];
        c.extend_from_slice(&self.coeffs);
        Poly::new(c)
    }

    /// Divides by `z - root` (synthetic division from the leading end) and
    /// returns the quotient together with the remainder.
    pub fn deflate(&self, root: f64) -> (Poly, f64) {
        let d = self.degree();
        if d == 0 {
            return (Poly::constant(0.0), self.coeffs[0]);
        }
        let mut q = vec![0.0; d];
        let mut carry = self.coeffs[d];
        for k in (0..d).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + root * carry;
        }
        (Poly::new(q), carry)
    }

    /// Sum of polynomials with per-coefficient compensated accumulation.
    pub fn sum<'a, I: IntoIterator<Item = &'a Poly>>(polys: I) -> Poly {
        let mut acc: Vec<CompensatedSum> = Vec::new();
        for p in polys {
            if acc.len() < p.coeffs.len() {
                acc.resize(p.coeffs.len(), CompensatedSum::new());
            }
            for (a, &c) in acc.iter_mut().zip(&p.coeffs) {
                a.add(c);
            }
        }
        if acc.is_empty() {
            return Poly::constant(0.0);
        }
        Poly::new(acc.iter().map(CompensatedSum::value).collect())
    }
}

/// `Π_j (z + β_j)`.
pub fn product_of_shifts(beta: &[f64]) -> Poly {
    beta.iter().fold(Poly::constant(1.0), |p, &b| p.mul(&Poly::linear_factor(b)))
}

/// `Σ_i w_i Π_{j≠i} (z + β_j)`, accumulated term by term.
pub fn weighted_partial_products(weights: &[f64], beta: &[f64]) -> Poly {
    assert_eq!(weights.len(), beta.len());
    let terms: Vec<Poly> = (0..beta.len())
        .map(|i| {
            let others: Vec<f64> = beta.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &b)| b).collect();
            product_of_shifts(&others).scale(weights[i])
        })
        .collect();
    Poly::sum(&terms)
}
