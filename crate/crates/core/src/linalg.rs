//! Small dense linear algebra helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY2: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat2_apply(a: &Mat2, u: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * u[0] + a[0][1] * u[1],
        a[1][0] * u[0] + a[1][1] * u[1],
    ]
}

pub fn mat2_det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_trace(a: &Mat2) -> f64 {
    a[0][0] + a[1][1]
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Eigen-decomposition of a symmetric 2x2 matrix `[[p, q], [q, r]]`.
///
/// Returns `(lambda_max, lambda_min, unit eigenvector of lambda_max)`.
pub fn sym2_eigen(p: f64, q: f64, r: f64) -> (f64, f64, [f64; 2]) {
    let mean = 0.5 * (p + r);
    let half_diff = 0.5 * (p - r);
    let rad = half_diff.hypot(q);
    let hi = mean + rad;
    // the smaller root by Vieta to avoid cancellation when the spread is huge
    let det = p * r - q * q;
    let lo = if hi.abs() > 0.0 { det / hi } else { mean - rad };
    // eigenvector angle: tan(2 phi) = 2q / (p - r)
    let phi = 0.5 * (2.0 * q).atan2(p - r);
    (hi, lo, [phi.cos(), phi.sin()])
}

/// Singular values of a 2x2 matrix together with the top right-singular vector.
///
/// Returns `(sigma_max, sigma_min, v_max)`.
pub fn svd2(a: &Mat2) -> (f64, f64, [f64; 2]) {
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let q = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    let r = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let (hi, _, v) = sym2_eigen(p, q, r);
    let smax = hi.max(0.0).sqrt();
    let smin = if smax > 0.0 { mat2_det(a).abs() / smax } else { 0.0 };
    (smax, smin, v)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Pfaffian of a skew-symmetric matrix of even order, by pivoted congruence
/// elimination. Odd order returns zero.
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "pfaffian needs a square matrix");
    if n % 2 == 1 {
        return 0.0;
    }
    let mut m = a.clone();
    let mut pf = 1.0;
    let mut i = 0;
    while i < n {
        // pivot on the largest entry of row i beyond the diagonal
        let mut piv = i + 1;
        for j in i + 2..n {
            if m[(i, j)].abs() > m[(i, piv)].abs() {
                piv = j;
            }
        }
        if piv != i + 1 {
            m.swap_rows(i + 1, piv);
            m.swap_columns(i + 1, piv);
            pf = -pf;
        }
        let p = m[(i, i + 1)];
        if p == 0.0 {
            return 0.0;
        }
        pf *= p;
        for k in i + 2..n {
            let tau = m[(i, k)] / p;
            if tau != 0.0 {
                for r in 0..n {
                    let v = m[(r, i + 1)];
                    m[(r, k)] -= tau * v;
                }
                for c in 0..n {
                    let v = m[(i + 1, c)];
                    m[(k, c)] -= tau * v;
                }
            }
        }
        i += 2;
    }
    pf
}

/// Orthonormal basis of the orthogonal complement of the column span of `g`
/// inside R^dim, returned as columns.
pub fn orthogonal_complement(g: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for v in g {
        let mut w = v.clone();
        for b in &basis {
            let c = b.dot(&w);
            w.axpy(-c, b, 1.0);
        }
        let nw = w.norm();
        if nw > 1e-12 {
            basis.push(w / nw);
        }
    }
    let constraints = basis.len();
    for e in 0..dim {
        let mut w = DVector::zeros(dim);
        w[e] = 1.0;
        // two passes of Gram-Schmidt keep the basis orthonormal to rounding
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let nw = w.norm();
        if nw > 1e-8 {
            basis.push(w / nw);
        }
        if basis.len() == dim {
            break;
        }
    }
    let cols: Vec<DVector<f64>> = basis.into_iter().skip(constraints).collect();
    DMatrix::from_columns(&cols)
}
