//! Complex polynomials with counted, memoized evaluation.
//!
//! The unit of cost for the whole root finder is one polynomial evaluation
//! (PE). [`EvalCounter`] is the accumulator that every evaluation made on
//! behalf of the winding-number procedures goes through.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::ConvexRegion;

pub type Complex = num_complex::Complex64;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("polynomial has no coefficients")]
    Empty,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("polynomial has degree 0; root finding needs degree >= 1")]
    ConstantPolynomial,
    #[error("invalid polynomial JSON: {0}")]
    Json(String),
}

/// A polynomial `a_0 + a_1 z + ... + a_n z^n` with `a_n != 0`.
///
/// Coefficients are stored in ascending degree order. Trailing zero
/// coefficients are trimmed at construction.
#[derive(Debug, Clone)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
    fingerprint: u64,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

#[derive(Deserialize)]
struct PolynomialJson {
    coeffs: Vec<[f64; 2]>,
}

impl Polynomial {
    /// Builds a polynomial of degree at least one.
    pub fn new(coeffs: Vec<Complex>) -> Result<Self, PolyError> {
        let poly = Self::build(coeffs)?;
        if poly.degree() == 0 {
            return Err(PolyError::ConstantPolynomial);
        }
        Ok(poly)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// `lead * (z - r_1) ... (z - r_k)`.
    pub fn from_roots(lead: Complex, roots: &[Complex]) -> Result<Self, PolyError> {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    /// Parses `{"coeffs": [[re, im], ...]}` in ascending degree order.
    pub fn from_json(text: &str) -> Result<Self, PolyError> {
        let parsed: PolynomialJson =
            serde_json::from_str(text).map_err(|e| PolyError::Json(e.to_string()))?;
        Self::new(
            parsed
                .coeffs
                .into_iter()
                .map(|[re, im]| Complex::new(re, im))
                .collect(),
        )
    }

    fn build(mut coeffs: Vec<Complex>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(PolyError::NonFinite { index });
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        if coeffs.len() == 1 && coeffs[0] == Complex::new(0.0, 0.0) {
            return Err(PolyError::ConstantPolynomial);
        }
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        for c in &coeffs {
            c.re.to_bits().hash(&mut hasher);
            c.im.to_bits().hash(&mut hasher);
        }
        Ok(Self {
            coeffs,
            fingerprint: hasher.finish(),
        })
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex {
        self.coeffs[self.degree()]
    }

    /// Horner evaluation, uncounted.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficient `k` of the result is `(k + 1) a_{k+1}`.
    ///
    /// The derivative of a linear polynomial is a nonzero constant, which is
    /// the one place a degree-0 `Polynomial` exists.
    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::build(coeffs).expect("derivative of a degree >= 1 polynomial is nonzero")
    }

    /// Upper bound on `|f'|` over the region, hence a Lipschitz constant of
    /// `f` along any arc-length parameterized boundary of it.
    ///
    /// Uses `sum k |a_k| R^(k-1)` with `R` the largest corner modulus of the
    /// region's axis-aligned envelope.
    pub fn lipschitz_bound(&self, region: &ConvexRegion) -> f64 {
        let radius = region
            .envelope_corners()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * radius + k as f64 * c.norm())
    }
}

/// Counted evaluation with memoization keyed on the exact bit pattern of the
/// point (and on the polynomial, so `f` and `f'` share one counter).
#[derive(Debug, Clone, Default)]
pub struct EvalCounter {
    evaluations: u64,
    hits: u64,
    memoize: bool,
    cache: HashMap<(u64, u64, u64), Complex>,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self {
            memoize: true,
            ..Default::default()
        }
    }

    /// A counter that never caches: every call is a fresh evaluation.
    pub fn without_memo() -> Self {
        Self::default()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn eval(&mut self, f: &Polynomial, z: Complex) -> Complex {
        if !self.memoize {
            self.evaluations += 1;
            return f.eval(z);
        }
        let key = (f.fingerprint, z.re.to_bits(), z.im.to_bits());
        if let Some(&v) = self.cache.get(&key) {
            self.hits += 1;
            return v;
        }
        self.evaluations += 1;
        let v = f.eval(z);
        self.cache.insert(key, v);
        v
    }

    /// Join point for per-task counters: counts add, caches union.
    pub fn merge(&mut self, other: EvalCounter) {
        self.evaluations += other.evaluations;
        self.hits += other.hits;
        if self.memoize {
            self.cache.extend(other.cache);
        }
    }

    /// Fresh counter with the same caching policy.
    pub fn fork(&self) -> Self {
        Self {
            memoize: self.memoize,
            ..Default::default()
        }
    }
}
