//! Material definition of an extended Burgers model: one Maxwell unit in
//! series with `n` Kelvin-Voigt units, each with isotropic spring moduli and a
//! dashpot viscosity.

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::tensor::check_strong_convexity;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Spring moduli and dashpot viscosity of one rheological unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub lambda: f64,
    pub mu: f64,
    pub eta: f64,
}

impl Element {
    pub fn new(lambda: f64, mu: f64, eta: f64) -> Self {
        Element { lambda, mu, eta }
    }

    /// `3λ + 2μ`.
    pub fn bulk_modulus3(&self) -> f64 {
        3.0 * self.lambda + 2.0 * self.mu
    }
}

/// Homogeneous extended Burgers model filling a ball of radius `radius`.
/// Element 0 is the Maxwell unit, elements `1..=n` the Kelvin-Voigt units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbmModel {
    pub n: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Shear,
    Bulk,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ElementCount { expected: usize, found: usize },
    NonpositiveRadius(f64),
    NonFinite { index: usize },
    NonpositiveViscosity { index: usize, eta: f64 },
    StrongConvexity { index: usize, lambda: f64, mu: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ElementCount { expected, found } => {
                write!(f, "element count: expected n+1 = {expected}, found {found}")
            }
            Violation::NonpositiveRadius(r) => write!(f, "nonpositive radius R = {r}"),
            Violation::NonFinite { index } => write!(f, "non-finite parameter in element {index}"),
            Violation::NonpositiveViscosity { index, eta } => {
                write!(f, "nonpositive viscosity eta = {eta} in element {index}")
            }
            Violation::StrongConvexity { index, lambda, mu } => write!(
                f,
                "strong convexity fails in element {index}: mu = {mu}, 3 lambda + 2 mu = {}",
                3.0 * lambda + 2.0 * mu
            ),
        }
    }
}

impl EbmModel {
    pub fn new(radius: f64, elements: Vec<Element>) -> Self {
        EbmModel { n: elements.len().saturating_sub(1), radius, elements }
    }

    pub fn maxwell(&self) -> &Element {
        &self.elements[0]
    }

    /// `b = Σ_i 1/η_i`.
    pub fn b(&self) -> f64 {
        self.elements.iter().map(|e| 1.0 / e.eta).sum()
    }

    /// `λ0 + 2μ0`.
    pub fn longitudinal_modulus(&self) -> f64 {
        let e = self.maxwell();
        e.lambda + 2.0 * e.mu
    }

    /// Threshold used for the strong convexity check.
    pub fn convexity_delta(&self) -> f64 {
        let max = self.elements.iter().flat_map(|e| [e.lambda.abs(), e.mu.abs()]).fold(0.0, f64::max);
        (1e-12 * max).max(f64::MIN_POSITIVE)
    }

    /// Every violated invariant; empty when the model is admissible.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.elements.len() != self.n + 1 {
            out.push(Violation::ElementCount { expected: self.n + 1, found: self.elements.len() });
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            out.push(Violation::NonpositiveRadius(self.radius));
        }
        let delta = self.convexity_delta();
        for (index, e) in self.elements.iter().enumerate() {
            if !(e.lambda.is_finite() && e.mu.is_finite() && e.eta.is_finite()) {
                out.push(Violation::NonFinite { index });
                continue;
            }
            if !(e.eta > 0.0) {
                out.push(Violation::NonpositiveViscosity { index, eta: e.eta });
            }
            if !check_strong_convexity(e.lambda, e.mu, delta) {
                out.push(Violation::StrongConvexity { index, lambda: e.lambda, mu: e.mu });
            }
        }
        if self.elements.is_empty() {
            out.push(Violation::ElementCount { expected: self.n + 1, found: 0 });
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(v))
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }

    /// Same model with every Lamé modulus multiplied by `s`.
    pub fn scale_moduli(&self, s: f64) -> EbmModel {
        let elements = self.elements.iter().map(|e| Element::new(s * e.lambda, s * e.mu, e.eta)).collect();
        EbmModel { n: self.n, radius: self.radius, elements }
    }
}

/// Symmetrized mode matrix of order `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    pub kind: ModeKind,
    pub matrix: DenseMatrix,
}

/// Assembles the symmetric, negative definite shear or bulk mode matrix.
///
/// The diagonal carries `-b c_0` followed by `-c_i/η_i`, and the first
/// row and column carry `sqrt(c_0 c_i)/η_i`, where `c_i` is `2μ_i` for
/// shear and `3λ_i + 2μ_i` for bulk.
pub fn assemble(m: &EbmModel, kind: ModeKind) -> Result<ModeMatrix> {
    m.validate()?;
    let stiffness: Vec<f64> = m
        .elements
        .iter()
        .map(|e| match kind {
            ModeKind::Shear => 2.0 * e.mu,
            ModeKind::Bulk => e.bulk_modulus3(),
        })
        .collect();
    let order = m.n + 1;
    let mut a = DenseMatrix::zeros(order);
    a[(0, 0)] = -m.b() * stiffness[0];
    for i in 1..order {
        let eta_inv = 1.0 / m.elements[i].eta;
        let off = eta_inv * (stiffness[0] * stiffness[i]).sqrt();
        a[(0, i)] = off;
        a[(i, 0)] = off;
        a[(i, i)] = -eta_inv * stiffness[i];
    }
    Ok(ModeMatrix { kind, matrix: a })
}

/// The unsymmetrized deviatoric matrix whose similarity transform by
/// `diag(sqrt(2μ_i))` gives the symmetric shear matrix.
pub fn assemble_unsymmetrized_shear(m: &EbmModel) -> Result<DenseMatrix> {
    m.validate()?;
    let order = m.n + 1;
    let mu0 = m.elements[0].mu;
    let mut a = DenseMatrix::zeros(order);
    a[(0, 0)] = -2.0 * m.b() * mu0;
    for i in 1..order {
        let e = &m.elements[i];
        a[(0, i)] = 2.0 * e.mu / e.eta;
        a[(i, 0)] = 2.0 * mu0 / e.eta;
        a[(i, i)] = -2.0 * e.mu / e.eta;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{expm, jacobi_eigh};
    use crate::sampling::ModelSampler;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize) -> EbmModel {
        EbmModel::new(1.0, vec![Element::new(2.0, 1.0, 1.0); n + 1])
    }

    #[test]
    fn validate_examples() {
        assert!(uniform(1).validate().is_ok());

        let mut m = uniform(1);
        m.elements[1].eta = 0.0;
        let v = m.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("nonpositive viscosity"));

        let mut m = uniform(1);
        m.elements[0].lambda = -1.0;
        let v = m.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("strong convexity"));
    }

    #[test]
    fn validate_reports_every_violation() {
        let mut m = uniform(2);
        m.radius = -1.0;
        m.elements[0].eta = -2.0;
        m.elements[2].mu = 0.0;
        m.n = 3;
        let v = m.violations();
        assert_eq!(v.len(), 4, "{v:?}");
        assert!(matches!(m.validate(), Err(Error::InvalidModel(list)) if list.len() == 4));
    }

    #[test]
    fn single_maxwell_unit() {
        let m = uniform(0);
        assert_eq!(assemble(&m, ModeKind::Shear).unwrap().matrix, DenseMatrix::from_rows(&[[-2.0]]));
        assert_eq!(assemble(&m, ModeKind::Bulk).unwrap().matrix, DenseMatrix::from_rows(&[[-8.0]]));
        assert_eq!(assemble_unsymmetrized_shear(&m).unwrap(), DenseMatrix::from_rows(&[[-2.0]]));
    }

    #[test]
    fn one_kelvin_voigt_unit() {
        let m = uniform(1);
        assert_eq!(assemble(&m, ModeKind::Shear).unwrap().matrix, DenseMatrix::from_rows(&[[-4.0, 2.0], [2.0, -2.0]]));
        assert_eq!(assemble(&m, ModeKind::Bulk).unwrap().matrix, DenseMatrix::from_rows(&[[-16.0, 8.0], [8.0, -8.0]]));
        assert_eq!(assemble_unsymmetrized_shear(&m).unwrap(), DenseMatrix::from_rows(&[[-4.0, 2.0], [2.0, -2.0]]));
    }

    #[test]
    fn unequal_shear_moduli_similarity() {
        let m = EbmModel::new(1.0, vec![Element::new(2.0, 1.0, 1.0), Element::new(2.0, 4.0, 1.0)]);
        let l1 = assemble_unsymmetrized_shear(&m).unwrap();
        let ls = assemble(&m, ModeKind::Shear).unwrap().matrix;
        assert_eq!(l1, DenseMatrix::from_rows(&[[-4.0, 8.0], [2.0, -8.0]]));
        assert_eq!(ls, DenseMatrix::from_rows(&[[-4.0, 4.0], [4.0, -8.0]]));
        // reference (1,1) entries of the exponentials, 40-digit arithmetic
        for (t, g) in [(0.1, 0.718_071_439_109_959_07), (1.0, 0.157_029_540_144_924_85), (5.0, 3.481_673_314_832_697_4e-4)] {
            assert!((expm(&l1, t)[(0, 0)] - g).abs() < 1e-13 * g.max(1e-3));
            assert!((expm(&ls, t)[(0, 0)] - g).abs() < 1e-13 * g.max(1e-3));
        }
    }

    #[test]
    fn random_models_give_negative_definite_symmetric_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let sampler = ModelSampler::default();
        for _ in 0..1000 {
            let m = sampler.sample(&mut rng);
            for kind in [ModeKind::Shear, ModeKind::Bulk] {
                let a = assemble(&m, kind).unwrap().matrix;
                assert_eq!(a, a.transpose());
                assert!(jacobi_eigh(&a).unwrap().eigenvalues.iter().all(|&x| x < 0.0));
            }
            let e0 = m.elements[0];
            assert_eq!(assemble(&m, ModeKind::Shear).unwrap().matrix[(0, 0)], -m.b() * (2.0 * e0.mu));
            assert_eq!(assemble(&m, ModeKind::Bulk).unwrap().matrix[(0, 0)], -m.b() * e0.bulk_modulus3());

            let l1 = assemble_unsymmetrized_shear(&m).unwrap();
            let ls = assemble(&m, ModeKind::Shear).unwrap().matrix;
            for t in [0.1, 1.0, 5.0] {
                let (a, b) = (expm(&l1, t)[(0, 0)], expm(&ls, t)[(0, 0)]);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300), "t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let m = EbmModel::new(1.5, vec![Element::new(2.0, 1.0, 0.1), Element::new(0.3, 1.0 / 3.0, 7.0)]);
        let s = m.to_json();
        assert!(s.contains("\"R\""));
        assert_eq!(EbmModel::from_json(&s).unwrap(), m);
    }
}
