//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use super::DenseMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct EighResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector of `eigenvalues[j]`.
    pub eigenvectors: DenseMatrix,
}

impl EighResult {
    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j)
    }

    /// `V diag(λ) Vᵗ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let v = &self.eigenvectors;
        let d = DenseMatrix::from_diag(&self.eigenvalues);
        v.matmul(&d).matmul(&v.transpose())
    }
}

/// Diagonalizes a symmetric matrix with cyclic row-by-row Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-14 * ‖M‖_F`.
pub fn jacobi_eigh(m: &DenseMatrix) -> Result<EighResult> {
    let asym = m.asymmetry();
    if !(asym <= SYMMETRY_TOL) {
        return Err(Error::NonSymmetric { asymmetry: asym });
    }
    let n = m.order();
    let mut a = m.clone();
    // symmetrize exactly so rotations act on a truly symmetric matrix
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let target = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "Jacobi eigensolver", iterations: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = DenseMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(EighResult { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.order();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with a plane rotation, accumulating it into `v`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.order();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_matrix_gives_permutation() {
        let r = jacobi_eigh(&DenseMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.eigenvector(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(r.eigenvector(1), vec![0.0, 0.0, 1.0]);
        assert_eq!(r.eigenvector(2), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let r = jacobi_eigh(&DenseMatrix::from_rows(&[[-4.0, 2.0], [2.0, -2.0]])).unwrap();
        let s5 = 5.0_f64.sqrt();
        assert!((r.eigenvalues[0] - (-3.0 - s5)).abs() < 1e-14);
        assert!((r.eigenvalues[1] - (-3.0 + s5)).abs() < 1e-14);
    }

    #[test]
    fn identity_is_fixed() {
        let r = jacobi_eigh(&DenseMatrix::identity(5)).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0; 5]);
        assert_eq!(r.eigenvectors, DenseMatrix::identity(5));
    }

    #[test]
    fn rejects_nonsymmetric() {
        let m = DenseMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(jacobi_eigh(&m), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn random_reconstruction_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let mut m = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let x = rng.random_range(-10.0..10.0);
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            let r = jacobi_eigh(&m).unwrap();
            let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
            assert!(r.reconstruct().sub(&m).frobenius_norm() <= 1e-12 * scale);
            let vtv = r.eigenvectors.transpose().matmul(&r.eigenvectors);
            assert!(vtv.sub(&DenseMatrix::identity(n)).max_abs() <= 1e-12);
            assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
