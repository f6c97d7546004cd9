//! Lower bounds for products of alternating nonnegative shears.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistError};
use crate::linalg::{mat2_apply, mat2_mul, svd2, Mat2, IDENTITY2};

/// Top eigenvalue of `L(c) U(c)`, i.e. of `[[1, c], [c, 1 + c^2]]`.
pub fn comparison_eigenvalue(c1: f64) -> f64 {
    (2.0 + c1 * c1 + c1 * (c1 * c1 + 4.0).sqrt()) / 2.0
}

fn upper(t: f64) -> Mat2 {
    [[1.0, t], [0.0, 1.0]]
}

fn lower(t: f64) -> Mat2 {
    [[1.0, 0.0], [t, 1.0]]
}

/// Number of disjoint upper/lower pairs among the entries `>= c1`, once
/// consecutive big entries of the same kind are merged. Factor `j` is upper
/// for even `j` and lower for odd `j`.
pub fn alternating_pairs(t: &[f64], c1: f64) -> usize {
    let mut runs = 0usize;
    let mut last: Option<bool> = None;
    for (j, &v) in t.iter().enumerate() {
        if v >= c1 {
            let up = j % 2 == 0;
            if last != Some(up) {
                runs += 1;
                last = Some(up);
            }
        }
    }
    runs / 2
}

/// Outcome of comparing a shear product with its alternating lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearBound {
    pub holds: bool,
    pub norm: f64,
    pub bound: f64,
    pub lambda: f64,
    /// `floor(delta n / 2)`, the number of pairs the density guarantees.
    pub required_pairs: usize,
    /// Alternating pairs actually present.
    pub pairs: usize,
    /// Smallest ratio `(P u)_i / (S^K u)_i` over the probe vectors.
    pub min_entry_ratio: f64,
}

/// Checks `||U(t_0) L(t_1) U(t_2) ...|| >= lambda(c1)^K` together with the
/// entrywise comparison against `(U(c1) L(c1))^K` on the closed positive
/// quadrant. The entry list must be nonnegative, carry a fraction at least
/// `delta` of entries `>= c1`, and contain at least `floor(delta n / 2)`
/// alternating pairs.
pub fn shear_product_bound(t: &[f64], c1: f64, delta: f64) -> Result<ShearBound> {
    if let Some((index, &value)) = t.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(TwistError::NegativeShear { index, value });
    }
    if !(c1 > 0.0) || !(0.0..=1.0).contains(&delta) {
        return Err(TwistError::InvalidConfig(format!("need c1 > 0 and delta in [0, 1], got {c1}, {delta}")));
    }
    let n = t.len();
    let big = t.iter().filter(|&&v| v >= c1).count();
    if (big as f64) < delta * n as f64 {
        return Err(TwistError::NotAdmissible(format!(
            "{big} of {n} entries reach c1 = {c1}, fewer than delta = {delta}"
        )));
    }
    let required = ((delta * n as f64) / 2.0).floor() as usize;
    let pairs = alternating_pairs(t, c1);
    if pairs < required {
        return Err(TwistError::NotAdmissible(format!(
            "{pairs} alternating pairs among the large entries, {required} required"
        )));
    }
    let mut p = IDENTITY2;
    for (j, &v) in t.iter().enumerate() {
        p = mat2_mul(&p, &if j % 2 == 0 { upper(v) } else { lower(v) });
    }
    let (norm, _, _) = svd2(&p);
    let lambda = comparison_eigenvalue(c1);
    let bound = lambda.powi(required as i32);

    let pair = mat2_mul(&upper(c1), &lower(c1));
    let mut s = IDENTITY2;
    for _ in 0..required {
        s = mat2_mul(&s, &pair);
    }
    let mut min_ratio = f64::INFINITY;
    let mut entrywise = true;
    for i in 0..=32 {
        let a = std::f64::consts::FRAC_PI_2 * i as f64 / 32.0;
        let u = [a.cos(), a.sin()];
        let pu = mat2_apply(&p, u);
        let su = mat2_apply(&s, u);
        for c in 0..2 {
            if su[c] > 0.0 {
                let ratio = pu[c] / su[c];
                min_ratio = min_ratio.min(ratio);
                if ratio < 1.0 - 1e-12 {
                    entrywise = false;
                }
            }
        }
    }
    Ok(ShearBound {
        holds: entrywise && norm >= bound * (1.0 - 1e-12),
        norm,
        bound,
        lambda,
        required_pairs: required,
        pairs,
        min_entry_ratio: min_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_pair() {
        let b = shear_product_bound(&[1.0, 1.0], 1.0, 1.0).unwrap();
        let golden = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((b.lambda - golden).abs() < 1e-14);
        assert!((b.norm - golden).abs() < 1e-12);
        assert!(b.holds);
    }

    #[test]
    fn zero_entries_give_identity() {
        let b = shear_product_bound(&[0.0; 6], 0.5, 0.0).unwrap();
        assert_eq!(b.norm, 1.0);
        assert_eq!(b.bound, 1.0);
        assert!(b.holds);
    }

    #[test]
    fn rejects_negative_and_sparse() {
        assert!(matches!(shear_product_bound(&[1.0, -0.1], 1.0, 0.5), Err(TwistError::NegativeShear { index: 1, .. })));
        assert!(matches!(shear_product_bound(&[1.0, 0.0, 0.0, 0.0], 1.0, 0.5), Err(TwistError::NotAdmissible(_))));
        // dense but never alternating
        assert!(matches!(shear_product_bound(&[2.0, 0.0, 2.0, 0.0], 1.0, 0.5), Err(TwistError::NotAdmissible(_))));
    }

    #[test]
    fn pairs_merge_runs() {
        assert_eq!(alternating_pairs(&[1.0, 1.0, 1.0, 1.0], 1.0), 2);
        assert_eq!(alternating_pairs(&[1.0, 0.0, 1.0, 1.0], 1.0), 1);
        assert_eq!(alternating_pairs(&[0.0, 0.0], 1.0), 0);
    }
}
