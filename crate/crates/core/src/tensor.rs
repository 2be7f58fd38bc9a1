//! Symmetric second-order tensors in three dimensions and the isotropic
//! fourth-order tensors acting on them.
//!
//! Only the six independent components of a symmetric tensor are stored, so
//! minor symmetry holds by construction. The Frobenius inner product counts
//! each off-diagonal component twice, matching the full `A:B = a_pq b_pq`
//! contraction.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Symmetric 3x3 tensor stored as `[e11, e22, e33, e12, e13, e23]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor3(pub [f64; 6]);

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3([0.0; 6]);
    pub const IDENTITY: SymTensor3 = SymTensor3([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);

    pub fn new(e11: f64, e22: f64, e33: f64, e12: f64, e13: f64, e23: f64) -> Self {
        SymTensor3([e11, e22, e33, e12, e13, e23])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        SymTensor3([a, b, c, 0.0, 0.0, 0.0])
    }

    /// Symmetric part of an arbitrary 3x3 matrix.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        SymTensor3([
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            0.5 * (m[1][2] + m[2][1]),
        ])
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let [a, b, c, d, e, f] = self.0;
        [[a, d, e], [d, b, f], [e, f, c]]
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// Frobenius contraction `A:B`.
    pub fn inner(&self, other: &SymTensor3) -> f64 {
        let (a, b) = (&self.0, &other.0);
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> SymTensor3 {
        SymTensor3(self.0.map(|x| s * x))
    }

    pub fn max_abs_component(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Add for SymTensor3 {
    type Output = SymTensor3;
    fn add(self, rhs: SymTensor3) -> SymTensor3 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        SymTensor3(out)
    }
}

impl AddAssign for SymTensor3 {
    fn add_assign(&mut self, rhs: SymTensor3) {
        *self = *self + rhs;
    }
}

impl Sub for SymTensor3 {
    type Output = SymTensor3;
    fn sub(self, rhs: SymTensor3) -> SymTensor3 {
        self + (-rhs)
    }
}

impl Neg for SymTensor3 {
    type Output = SymTensor3;
    fn neg(self) -> SymTensor3 {
        SymTensor3(self.0.map(|x| -x))
    }
}

impl Mul<SymTensor3> for f64 {
    type Output = SymTensor3;
    fn mul(self, rhs: SymTensor3) -> SymTensor3 {
        rhs.scale(self)
    }
}

/// Isotropic elasticity tensor `λ δ_pq δ_rs + μ (δ_pr δ_qs + δ_ps δ_qr)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoTensor4 {
    pub lambda: f64,
    pub mu: f64,
}

impl IsoTensor4 {
    pub fn new(lambda: f64, mu: f64) -> Self {
        IsoTensor4 { lambda, mu }
    }

    /// Eigenvalue on the volumetric subspace, `3λ + 2μ`.
    pub fn bulk_eigenvalue(&self) -> f64 {
        3.0 * self.lambda + 2.0 * self.mu
    }

    /// Eigenvalue on the deviatoric subspace, `2μ`.
    pub fn shear_eigenvalue(&self) -> f64 {
        2.0 * self.mu
    }
}

/// `λ tr(e) I + 2μ e`.
pub fn apply_iso(c: &IsoTensor4, e: &SymTensor3) -> SymTensor3 {
    let lt = c.lambda * e.trace();
    let mut out = e.scale(2.0 * c.mu);
    for x in &mut out.0[..3] {
        *x += lt;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Volumetric,
    Deviatoric,
}

pub fn project(e: &SymTensor3, part: Part) -> SymTensor3 {
    let vol = SymTensor3::IDENTITY.scale(e.trace() / 3.0);
    match part {
        Part::Volumetric => vol,
        Part::Deviatoric => *e - vol,
    }
}

pub fn volumetric(e: &SymTensor3) -> SymTensor3 {
    project(e, Part::Volumetric)
}

pub fn deviatoric(e: &SymTensor3) -> SymTensor3 {
    project(e, Part::Deviatoric)
}

/// True iff `μ ≥ δ` and `3λ + 2μ ≥ δ`.
pub fn check_strong_convexity(lambda: f64, mu: f64, delta: f64) -> bool {
    mu >= delta && 3.0 * lambda + 2.0 * mu >= delta
}
