use super::{DenseMatrix, Poly};

pub const MAX_ORDER: usize = 64;

/// Monic characteristic polynomial `det(zI - M)`.
///
/// `M` is balanced, reduced to upper Hessenberg form by stabilized
/// elementary similarities, and the polynomial follows from the Hessenberg
/// determinant recurrence. Unlike the Faddeev-LeVerrier recursion this stays
/// accurate when the spectrum spans several orders of magnitude. Matrices
/// already in Hessenberg form with small integer entries give exact
/// coefficients.
pub fn char_poly_of_matrix(m: &DenseMatrix) -> Poly {
    let n = m.order();
    assert!(n <= MAX_ORDER, "characteristic polynomial is limited to order {MAX_ORDER}");
    let h = hessenberg(&balanced(m));
    // p[k] = det(zI - H[..k, ..k])
    let mut p: Vec<Poly> = Vec::with_capacity(n + 1);
    p.push(Poly::constant(1.0));
    for k in 0..n {
        let mut next = p[k].shift(1).sub(&p[k].scale(h[(k, k)]));
        let mut sub = 1.0;
        for i in (0..k).rev() {
            sub *= h[(i + 1, i)];
            if sub == 0.0 {
                break;
            }
            next = next.sub(&p[i].scale(h[(i, k)] * sub));
        }
        p.push(next);
    }
    let mut coeffs = p.pop().expect("order + 1 polynomials").into_coeffs();
    coeffs.resize(n + 1, 0.0);
    Poly::new(coeffs)
}

/// Upper Hessenberg form by Gaussian elimination with row pivoting, each step
/// a similarity so the spectrum is kept.
fn hessenberg(m: &DenseMatrix) -> DenseMatrix {
    let n = m.order();
    let mut a = m.clone();
    for col in 0..n.saturating_sub(2) {
        let piv_row = col + 1;
        let (best, x) = (piv_row..n)
            .map(|i| (i, a[(i, col)]))
            .fold((piv_row, 0.0_f64), |acc, (i, v)| if v.abs() > acc.1.abs() { (i, v) } else { acc });
        if best != piv_row {
            for j in 0..n {
                let t = a[(best, j)];
                a[(best, j)] = a[(piv_row, j)];
                a[(piv_row, j)] = t;
            }
            for i in 0..n {
                let t = a[(i, best)];
                a[(i, best)] = a[(i, piv_row)];
                a[(i, piv_row)] = t;
            }
        }
        if x == 0.0 {
            continue;
        }
        for i in piv_row + 1..n {
            let y = a[(i, col)] / x;
            if y == 0.0 {
                continue;
            }
            for j in col..n {
                a[(i, j)] -= y * a[(piv_row, j)];
            }
            a[(i, col)] = 0.0;
            for r in 0..n {
                a[(r, piv_row)] += y * a[(r, i)];
            }
        }
    }
    a
}

/// Diagonal similarity by powers of two equalizing row and column norms.
/// Scaling by powers of two is exact, so the spectrum is untouched.
fn balanced(m: &DenseMatrix) -> DenseMatrix {
    let n = m.order();
    let mut a = m.clone();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in (0..n).filter(|&j| j != i) {
                c += a[(j, i)].abs();
                r += a[(i, j)].abs();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                f *= 2.0;
                c *= 4.0;
            }
            while c > r * 2.0 {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}
