//! Integer mapping classes of the torus, Floer rank sequences computed as
//! geometric intersection numbers, and the chain stretch-factor certificate.
//!
//! Generators act on `H_1(T^2)` by `T_1 = [[1, 1], [0, 1]]` and
//! `T_2 = [[1, 0], [-1, 1]]`. The twist about the sphere `S_1` corresponds
//! to the class `(1, 0)` and the twist about `S_2` to `(0, 1)`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistError};
use crate::linalg::{mat2_mul, mat2_trace, Mat2, IDENTITY2};

/// A determinant-one integer matrix modulo `+-I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MappingClass2 {
    entries: [[i64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    T1,
    T2,
}

impl Generator {
    fn matrix(self) -> [[i64; 2]; 2] {
        match self {
            Generator::T1 => [[1, 1], [0, 1]],
            Generator::T2 => [[1, 0], [-1, 1]],
        }
    }
}

fn mul_i(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> Result<[[i64; 2]; 2]> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let v = (a[i][0] as i128) * (b[0][j] as i128) + (a[i][1] as i128) * (b[1][j] as i128);
            out[i][j] = i64::try_from(v).map_err(|_| TwistError::InvalidConfig("mapping class entry overflows i64".into()))?;
        }
    }
    Ok(out)
}

/// Flips the global sign so the first nonzero of `(d, c, b, a)` is positive.
fn normalize_sign(m: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let key = [m[1][1], m[1][0], m[0][1], m[0][0]];
    match key.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]],
        _ => m,
    }
}

impl MappingClass2 {
    pub fn new(entries: [[i64; 2]; 2]) -> Result<Self> {
        let det = entries[0][0] as i128 * entries[1][1] as i128 - entries[0][1] as i128 * entries[1][0] as i128;
        if det != 1 {
            return Err(TwistError::InvalidConfig(format!("determinant {det}, expected 1")));
        }
        Ok(Self { entries: normalize_sign(entries) })
    }

    pub fn identity() -> Self {
        Self { entries: [[1, 0], [0, 1]] }
    }

    pub fn generator(g: Generator) -> Self {
        Self { entries: normalize_sign(g.matrix()) }
    }

    /// Product `g_1^{e_1} g_2^{e_2} ...` of generator powers.
    pub fn from_word(word: &[(Generator, i64)]) -> Result<Self> {
        let mut m = [[1i64, 0], [0, 1]];
        for &(g, e) in word {
            let base = match g {
                Generator::T1 => [[1, e], [0, 1]],
                Generator::T2 => [[1, 0], [-e, 1]],
            };
            m = mul_i(&m, &base)?;
        }
        Self::new(m)
    }

    /// Normalized representative.
    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    pub fn trace(&self) -> i64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(mul_i(&self.entries, &other.entries)?)
    }

    pub fn negated(&self) -> [[i64; 2]; 2] {
        let e = self.entries;
        [[-e[0][0], -e[0][1]], [-e[1][0], -e[1][1]]]
    }

    /// Exact `M^n (a, b)`.
    pub fn power_apply(&self, n: u32, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        let e = self.entries;
        let (mut x, mut y) = (a.clone(), b.clone());
        for _ in 0..n {
            let nx = &x * e[0][0] + &y * e[0][1];
            let ny = &x * e[1][0] + &y * e[1][1];
            x = nx;
            y = ny;
        }
        (x, y)
    }

    /// Exact `M^n` by repeated squaring.
    pub fn power(&self, n: u32) -> [[BigInt; 2]; 2] {
        let to_big = |m: [[i64; 2]; 2]| m.map(|r| r.map(BigInt::from));
        let mul = |a: &[[BigInt; 2]; 2], b: &[[BigInt; 2]; 2]| -> [[BigInt; 2]; 2] {
            std::array::from_fn(|i| std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]))
        };
        let mut result = to_big([[1, 0], [0, 1]]);
        let mut base = to_big(self.entries);
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = mul(&result, &base);
            }
            base = mul(&base, &base);
            k >>= 1;
        }
        result
    }
}

/// Matrix of the composite with exponents `(k, l)`: the product
/// `T_1^l T_2^k = [[1 - k l, l], [-k, 1]]` acting on column vectors, normalized.
pub fn composite_matrix(k: i64, l: i64) -> MappingClass2 {
    MappingClass2::from_word(&[(Generator::T1, l), (Generator::T2, k)]).expect("composite of generator powers")
}

/// `(|tr| + sqrt(tr^2 - 4)) / 2` kept exact as the pair `(|tr|, tr^2 - 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticStretch {
    pub abs_trace: u64,
    pub discriminant: u64,
}

impl QuadraticStretch {
    pub fn value(&self) -> f64 {
        (self.abs_trace as f64 + (self.discriminant as f64).sqrt()) / 2.0
    }

    pub fn log(&self) -> f64 {
        self.value().ln()
    }
}

impl std::fmt::Display for QuadraticStretch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}+sqrt({}))/2", self.abs_trace, self.discriminant)
    }
}

/// Trace trichotomy. `+-I` counts as periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Classification {
    Periodic,
    Reducible,
    Anosov { stretch: QuadraticStretch },
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Periodic => "Periodic",
            Classification::Reducible => "Reducible",
            Classification::Anosov { .. } => "Anosov",
        }
    }

    pub fn stretch_factor(&self) -> Option<f64> {
        match self {
            Classification::Anosov { stretch } => Some(stretch.value()),
            _ => None,
        }
    }
}

pub fn classify(m: &MappingClass2) -> Classification {
    let t = m.trace().unsigned_abs();
    let e = m.entries();
    match t {
        0 | 1 => Classification::Periodic,
        2 if e == [[1, 0], [0, 1]] || e == [[-1, 0], [0, -1]] => Classification::Periodic,
        2 => Classification::Reducible,
        _ => Classification::Anosov { stretch: QuadraticStretch { abs_trace: t, discriminant: t * t - 4 } },
    }
}

/// A homology class `(a, b)` of the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomClass {
    pub a: i64,
    pub b: i64,
}

impl HomClass {
    pub fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    /// A class represented by a simple closed curve; must be primitive.
    pub fn curve(a: i64, b: i64) -> Result<Self> {
        if a.gcd(&b) != 1 {
            return Err(TwistError::NotPrimitive(a.to_string(), b.to_string()));
        }
        Ok(Self { a, b })
    }
}

/// `|a d - b c|`.
pub fn intersection_number_torus(c1: &HomClass, c2: &HomClass) -> u128 {
    (c1.a as i128 * c2.b as i128 - c1.b as i128 * c2.a as i128).unsigned_abs()
}

/// `|a d - b c|` for big classes.
pub fn intersection_number_big(c1: (&BigInt, &BigInt), c2: (&BigInt, &BigInt)) -> BigInt {
    (c1.0 * c2.1 - c1.1 * c2.0).abs()
}

/// Natural logarithm of a positive big integer.
pub fn log_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("64-bit head").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `rank HF(S_1, tau^n S_2)` for `n = 1..=N`; `None` where the classes are isotopic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSequence {
    pub k: i64,
    pub l: i64,
    pub values: Vec<Option<BigInt>>,
    /// Smallest `log(rank(n)) / n` over the second half of the defined window.
    pub gamma_estimate: Option<f64>,
}

impl RankSequence {
    pub fn defined(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.values.iter().enumerate().filter_map(|(i, v)| v.as_ref().map(|v| (i + 1, v)))
    }

    /// `(n, log(rank(n)) / n)` over the defined entries.
    pub fn log_rates(&self) -> Vec<(usize, f64)> {
        self.defined().map(|(n, v)| (n, log_big(v) / n as f64)).collect()
    }
}

fn window_liminf(rates: &[(usize, f64)]) -> Option<f64> {
    if rates.is_empty() {
        return None;
    }
    let start = rates.len() / 2;
    Some(rates[start..].iter().map(|r| r.1).fold(f64::INFINITY, f64::min))
}

/// Intersection numbers `i((1, 0), M^n (0, 1))` with `M = composite_matrix(k, l)`.
pub fn hf_rank_sequence(k: i64, l: i64, n_max: usize) -> RankSequence {
    let m = composite_matrix(k, l);
    let e = m.entries();
    let gamma1 = (BigInt::one(), BigInt::zero());
    let (mut x, mut y) = (BigInt::zero(), BigInt::one());
    let mut values = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let nx = &x * e[0][0] + &y * e[0][1];
        let ny = &x * e[1][0] + &y * e[1][1];
        x = nx;
        y = ny;
        let isotopic = y.is_zero() && x.abs().is_one();
        values.push(if isotopic { None } else { Some(intersection_number_big((&gamma1.0, &gamma1.1), (&x, &y))) });
    }
    let mut seq = RankSequence { k, l, values, gamma_estimate: None };
    seq.gamma_estimate = window_liminf(&seq.log_rates());
    seq
}

/// `rank HF(S_j, tau_i^{2k} S_j)`, computed as `i(gamma, T^{2k} gamma)` for
/// a class `gamma` meeting the twist curve once. Holds for even `n`.
pub fn hf_rank_square_twist(k: u64) -> BigInt {
    let e = BigInt::from(2u64) * BigInt::from(k);
    // T_1^{2k} (0, 1) = (2k, 1)
    intersection_number_big((&BigInt::zero(), &BigInt::one()), (&e, &BigInt::one()))
}

/// Growth estimate of a rank sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// Smallest `log(rank) / n` over the second half of the window.
    pub window_liminf: f64,
    /// Least-squares slope of `log(rank(n))` over the second half of the window, floored at zero.
    pub extrapolated: f64,
    pub defined: usize,
}

impl GrowthEstimate {
    pub fn gamma(&self) -> f64 {
        self.extrapolated
    }
}

/// Growth rate of the ranks; needs at least five defined entries.
pub fn growth_rate(seq: &RankSequence) -> Result<GrowthEstimate> {
    let rates = seq.log_rates();
    if rates.len() < 5 {
        return Err(TwistError::TooFewEntries { defined: rates.len(), needed: 5 });
    }
    let half = &rates[rates.len() / 2..];
    let pts: Vec<(f64, f64)> = half.iter().map(|&(n, r)| (n as f64, r * n as f64)).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(GrowthEstimate {
        window_liminf: window_liminf(&rates).unwrap_or(0.0),
        extrapolated: slope.max(0.0),
        defined: rates.len(),
    })
}

/// True when `log(rank(n)) / n` sets no new maximum after `from` and its
/// last value is at most `log(2N) / N`, the rate of linear growth.
pub fn subexponential_beyond(seq: &RankSequence, from: usize) -> bool {
    let rates = seq.log_rates();
    let Some(&(n_last, last)) = rates.last() else {
        return false;
    };
    let head = rates.iter().filter(|r| r.0 <= from).map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let mut best = head;
    for &(n, r) in &rates {
        if n > from {
            if r > best + 1e-15 && best.is_finite() {
                return false;
            }
            best = best.max(r);
        }
    }
    last <= (2.0 * n_last as f64).ln() / n_last as f64
}

/// Exponents of an `A_m` chain of twists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub m: usize,
    pub exponents: Vec<i64>,
}

impl ChainConfig {
    pub fn new(exponents: Vec<i64>) -> Self {
        Self { m: exponents.len(), exponents }
    }

    /// Signs alternate along the chain and no exponent vanishes.
    pub fn penner_applicable(&self) -> bool {
        self.exponents.iter().all(|&k| k != 0) && self.exponents.windows(2).all(|w| (w[0] > 0) != (w[1] > 0))
    }
}

/// Thurston-type representation of a chain composite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCertificate {
    pub mu: f64,
    pub matrix: Mat2,
    pub trace: f64,
    pub stretch_factor: f64,
    pub pseudo_anosov: bool,
}

/// Twists about odd curves become `[[1, k sqrt(mu)], [0, 1]]`, twists about
/// even curves `[[1, 0], [-k sqrt(mu), 1]]`, with `mu` the top eigenvalue of
/// `N N^T` for the odd/even intersection matrix `N`. The product is taken in
/// chain order and its spectral radius returned.
pub fn chain_stretch_factor(cfg: &ChainConfig) -> Result<ChainCertificate> {
    if cfg.m < 2 || cfg.exponents.len() != cfg.m {
        return Err(TwistError::InvalidConfig(format!("chain needs m >= 2 exponents, got {:?}", cfg.exponents)));
    }
    if !cfg.penner_applicable() {
        return Err(TwistError::NonAlternating(format!("{:?}", cfg.exponents)));
    }
    let odd: Vec<usize> = (1..=cfg.m).filter(|i| i % 2 == 1).collect();
    let even: Vec<usize> = (1..=cfg.m).filter(|i| i % 2 == 0).collect();
    let n = DMatrix::from_fn(odd.len(), even.len(), |a, b| if odd[a].abs_diff(even[b]) == 1 { 1.0 } else { 0.0 });
    let nnt = &n * n.transpose();
    let mu = nnt.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max);
    let root = mu.sqrt();
    let mut mat = IDENTITY2;
    for (idx, &k) in cfg.exponents.iter().enumerate() {
        let s = k as f64 * root;
        let factor = if (idx + 1) % 2 == 1 { [[1.0, s], [0.0, 1.0]] } else { [[1.0, 0.0], [-s, 1.0]] };
        mat = mat2_mul(&mat, &factor);
    }
    let trace = mat2_trace(&mat);
    let t = trace.abs();
    let stretch_factor = if t > 2.0 { (t + (t * t - 4.0).sqrt()) / 2.0 } else { 1.0 };
    Ok(ChainCertificate { mu, matrix: mat, trace, stretch_factor, pseudo_anosov: t > 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_examples() {
        assert_eq!(composite_matrix(0, 0), MappingClass2::identity());
        assert_eq!(composite_matrix(3, 3).entries(), [[-8, 3], [-3, 1]]);
        let cat = MappingClass2::new(mul_i(&[[1, 1], [0, 1]], &[[1, 0], [1, 1]]).unwrap()).unwrap();
        assert_eq!(cat.entries(), [[2, 1], [1, 1]]);
    }

    #[test]
    fn classification_examples() {
        let cat = MappingClass2::new([[2, 1], [1, 1]]).unwrap();
        let c = classify(&cat);
        assert_eq!(c.name(), "Anosov");
        assert!((c.stretch_factor().unwrap() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert_eq!(classify(&composite_matrix(2, 2)), Classification::Reducible);
        assert_eq!(classify(&composite_matrix(1, 1)), Classification::Periodic);
        assert_eq!(classify(&MappingClass2::new([[-1, 0], [0, -1]]).unwrap()), Classification::Periodic);
    }

    #[test]
    fn sign_normalization_is_idempotent() {
        let m = MappingClass2::new([[-2, -1], [-1, -1]]).unwrap();
        assert_eq!(m.entries(), [[2, 1], [1, 1]]);
        assert_eq!(MappingClass2::new(m.entries()).unwrap(), m);
        assert!(MappingClass2::new([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn intersection_examples() {
        let i = |a, b, c, d| intersection_number_torus(&HomClass::new(a, b), &HomClass::new(c, d));
        assert_eq!(i(1, 0, 0, 1), 1);
        assert_eq!(i(1, 0, 1, 0), 0);
        assert_eq!(i(2, 3, 4, 5), 2);
        assert!(HomClass::curve(2, 4).is_err());
    }

    #[test]
    fn ranks_of_three_three() {
        let s = hf_rank_sequence(3, 3, 3);
        let v: Vec<i64> = s.values.iter().map(|v| v.as_ref().unwrap().to_i64().unwrap()).collect();
        assert_eq!(v, vec![1, 8, 55]);
    }

    #[test]
    fn isotopic_entries_are_flagged() {
        // (1, 1) has finite order, so some power sends (0, 1) to +-(1, 0)
        let s = hf_rank_sequence(1, 1, 12);
        assert!(s.values.iter().any(|v| v.is_none()));
    }

    #[test]
    fn big_log_matches_float() {
        let x = BigInt::from(3u64).pow(2000);
        assert!((log_big(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert!((log_big(&BigInt::from(55)) - 55f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn growth_of_constant_is_zero() {
        let seq = RankSequence { k: 0, l: 0, values: vec![Some(BigInt::one()); 10], gamma_estimate: None };
        let g = growth_rate(&seq).unwrap();
        assert_eq!(g.gamma(), 0.0);
        let short = RankSequence { values: vec![Some(BigInt::one()); 4], ..seq };
        assert!(growth_rate(&short).is_err());
    }

    #[test]
    fn square_twist_rank() {
        assert_eq!(hf_rank_square_twist(0), BigInt::zero());
        assert_eq!(hf_rank_square_twist(3), BigInt::from(6));
    }

    #[test]
    fn chain_examples() {
        let c = chain_stretch_factor(&ChainConfig::new(vec![1, -1])).unwrap();
        assert_eq!(c.mu, 1.0);
        assert!((c.stretch_factor - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let c = chain_stretch_factor(&ChainConfig::new(vec![1, -1, 1])).unwrap();
        assert!((c.mu - 2.0).abs() < 1e-12);
        assert!(c.pseudo_anosov && (c.trace - 6.0).abs() < 1e-12);
        assert!(matches!(chain_stretch_factor(&ChainConfig::new(vec![1, 1])), Err(TwistError::NonAlternating(_))));
    }
}
