//! Coefficient rings for symbols: Gaussian rationals, and truncated power
//! series in the family parameter `z` for holomorphic families.

use std::fmt::Debug;

use num::complex::Complex64;
use num::{One, Zero};

use crate::scalar::{abs1, order_scalar, to_c64, Order, Scalar};

/// Operations a symbol needs from its coefficients.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    fn zero_coeff() -> Self;
    fn vanishes(&self) -> bool;
    fn from_scalar(s: Scalar) -> Self;
    fn add_assign(&mut self, rhs: &Self);
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    /// The affine function `a + b z`; rings without `z` require `b = 0`.
    fn affine(a: Order, b: Order) -> Self;
    /// Numerical value at parameter `z` (ignored by rings without `z`).
    fn eval(&self, z: Complex64) -> Complex64;
    /// Cheap magnitude bound used for rounding budgets.
    fn magnitude(&self) -> f64;

    fn neg(&self) -> Self {
        self.scale(&crate::scalar::int(-1))
    }
}

impl Coeff for Scalar {
    fn zero_coeff() -> Self {
        Zero::zero()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_scalar(s: Scalar) -> Self {
        s
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
    fn affine(a: Order, b: Order) -> Self {
        debug_assert!(b.is_zero(), "z-dependent coefficient in a scalar ring");
        order_scalar(a)
    }
    fn eval(&self, _z: Complex64) -> Complex64 {
        to_c64(self)
    }
    fn magnitude(&self) -> f64 {
        abs1(self)
    }
}

/// Power series `sum_k c_k z^k`, exact below `prec` (the first dropped power).
///
/// Polynomials that are exact to all orders carry `prec = usize::MAX`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZJet {
    pub coeffs: Vec<Scalar>,
    pub prec: usize,
}

impl ZJet {
    pub fn exact(coeffs: Vec<Scalar>) -> Self {
        let mut j = ZJet {
            coeffs,
            prec: usize::MAX,
        };
        j.trim();
        j
    }

    pub fn truncated(coeffs: Vec<Scalar>, prec: usize) -> Self {
        let mut j = ZJet { coeffs, prec };
        j.trim();
        j
    }

    fn trim(&mut self) {
        if self.coeffs.len() > self.prec {
            self.coeffs.truncate(self.prec);
        }
        while self.coeffs.last().is_some_and(|c: &Scalar| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Coefficient of `z^k` (zero past the stored length).
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Zero::zero)
    }

    /// Re-expand around `z0`: coefficients of `t^k` in `f(z0 + t)`.
    pub fn shift(&self, z0: &Scalar) -> ZJet {
        let n = self.coeffs.len();
        let mut out = vec![Scalar::zero(); n];
        // Horner in t-polynomials.
        for c in self.coeffs.iter().rev() {
            // out <- out * (z0 + t) + c
            let mut next = vec![Scalar::zero(); n];
            for (k, o) in out.iter().enumerate() {
                if o.is_zero() {
                    continue;
                }
                next[k] += o * z0;
                if k + 1 < n {
                    next[k + 1] += o.clone();
                }
            }
            next[0] += c.clone();
            out = next;
        }
        // A truncated series carries no exact information away from its centre.
        let prec = if z0.is_zero() || self.prec == usize::MAX { self.prec } else { 0 };
        ZJet::truncated(out, prec)
    }
}

impl Coeff for ZJet {
    fn zero_coeff() -> Self {
        ZJet::exact(Vec::new())
    }
    fn vanishes(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_scalar(s: Scalar) -> Self {
        ZJet::exact(vec![s])
    }
    fn add_assign(&mut self, rhs: &Self) {
        self.prec = self.prec.min(rhs.prec);
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Scalar::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
    fn mul(&self, rhs: &Self) -> Self {
        let prec = self.prec.min(rhs.prec);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return ZJet::truncated(Vec::new(), prec);
        }
        let len = (self.coeffs.len() + rhs.coeffs.len() - 1).min(prec);
        let mut out = vec![Scalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j < len {
                    out[i + j] += a * b;
                }
            }
        }
        ZJet::truncated(out, prec)
    }
    fn scale(&self, s: &Scalar) -> Self {
        ZJet::truncated(self.coeffs.iter().map(|c| c * s).collect(), self.prec)
    }
    fn affine(a: Order, b: Order) -> Self {
        ZJet::exact(vec![order_scalar(a), order_scalar(b)])
    }
    fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + to_c64(c);
        }
        acc
    }
    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(abs1).sum()
    }
}

impl ZJet {
    pub fn one() -> Self {
        ZJet::exact(vec![Scalar::one()])
    }
}
