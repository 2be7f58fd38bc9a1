use super::DenseMatrix;

const TAYLOR_TERMS: usize = 24;

/// `exp(t M)` by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled so that `‖tM/2^s‖_∞ ≤ 1/2`, where 24 terms leave a
/// truncation error far below rounding.
pub fn expm(m: &DenseMatrix, t: f64) -> DenseMatrix {
    let n = m.order();
    let a = m.scale(t);
    let norm = a.norm_inf();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let a = a.scale(0.5_f64.powi(squarings as i32));

    let mut result = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=TAYLOR_TERMS {
        term = term.matmul(&a).scale(1.0 / k as f64);
        result = result.add(&term);
        if term.max_abs() <= f64::EPSILON * 1e-3 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}
