//! Classical symbols on `U x R^n` with exact coefficients.
//!
//! A symbol is a finite sum of terms
//!
//! ```text
//! c * x^e * prod_i prod_{k in W_i} psi^(k)(1 - x_i^2) * xi^b * |xi|^(s + zs z) * prod_{k in C} chi^(k)(|xi|)
//! ```
//!
//! An empty cut-off multiset `C` marks a plain polynomial in `xi` (then
//! `s = zs = 0`). Terms whose cut-off multiset holds only zeros are
//! homogeneous of degree `|b| + s` for `|xi| >= 1`; the remaining terms carry a
//! derivative of `chi` and are supported in the annulus `1/2 <= |xi| <= 1`.
//! Derivatives act on this representation in closed form, so Leibniz rules
//! and commutation of partial derivatives hold structurally.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{Signed, Zero};
use smallvec::SmallVec;

use crate::coeff::Coeff;
use crate::cutoff::{chi_product, window_product};
use crate::error::{Result, SymError};
use crate::scalar::{fmt_order, order_f64, Order, Scalar};
use crate::MAX_DIM;

/// Exponent tuple; entries past the dimension are zero.
pub type Exps = [u16; MAX_DIM];

/// Sorted multiset of derivative orders.
pub type Multiset = SmallVec<[u8; 4]>;

/// Structural part of one term; the coefficient lives in the symbol's map.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub x: Exps,
    pub window: [Multiset; MAX_DIM],
    pub xi: Exps,
    pub radial: Order,
    pub zshift: Order,
    pub cut: Multiset,
}

impl TermKey {
    /// `x^x * xi^xi * |xi|^radial * chi(|xi|)`, no window.
    pub fn cut(x: Exps, xi: Exps, radial: Order) -> Self {
        TermKey {
            x,
            window: Default::default(),
            xi,
            radial,
            zshift: Order::zero(),
            cut: SmallVec::from_slice(&[0]),
        }
    }

    /// Plain polynomial term `x^x * xi^xi`.
    pub fn poly(x: Exps, xi: Exps) -> Self {
        TermKey {
            x,
            window: Default::default(),
            xi,
            radial: Order::zero(),
            zshift: Order::zero(),
            cut: SmallVec::new(),
        }
    }

    /// Degree in `xi` at `z = 0` (meaningful for non-compact terms).
    pub fn degree(&self) -> Order {
        let b: u32 = self.xi.iter().map(|&e| e as u32).sum();
        Order::from_integer(b as i64) + self.radial
    }

    pub fn is_uncut(&self) -> bool {
        self.cut.is_empty()
    }

    /// Supported in the annulus `1/2 <= |xi| <= 1`.
    pub fn is_compact(&self) -> bool {
        self.cut.iter().any(|&k| k > 0)
    }

    pub fn is_windowed(&self, dim: usize) -> bool {
        self.window[..dim].iter().all(|w| !w.is_empty())
    }

    /// Product of two keys (exponents add, multisets merge).
    pub fn mul(&self, other: &TermKey) -> TermKey {
        let mut out = self.clone();
        for i in 0..MAX_DIM {
            out.x[i] += other.x[i];
            out.xi[i] += other.xi[i];
            out.window[i] = merge(&self.window[i], &other.window[i]);
        }
        out.radial += other.radial;
        out.zshift += other.zshift;
        out.cut = merge(&self.cut, &other.cut);
        out
    }

    /// Value of the key's function (without coefficient) at `(x, xi)` and `z`.
    pub fn eval(&self, x: &[f64], xi: &[f64], z: Complex64) -> Complex64 {
        let dim = x.len();
        let mut v = 1.0;
        for i in 0..dim {
            v *= x[i].powi(self.x[i] as i32) * window_product(x[i], &self.window[i]);
            v *= xi[i].powi(self.xi[i] as i32);
        }
        if v == 0.0 {
            return Complex64::zero();
        }
        if self.is_uncut() {
            return Complex64::new(v, 0.0);
        }
        let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
        let c = chi_product(r, &self.cut);
        if c == 0.0 {
            return Complex64::zero();
        }
        let mut out = Complex64::new(v * c * r.powf(order_f64(self.radial)), 0.0);
        if !self.zshift.is_zero() {
            out *= (z * order_f64(self.zshift) * r.ln()).exp();
        }
        out
    }
}

pub(crate) fn merge(a: &Multiset, b: &Multiset) -> Multiset {
    let mut out: Multiset = SmallVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out
}

/// Multisets obtained by raising one entry by one, with multiplicity.
fn bump_each(m: &Multiset) -> Vec<(Multiset, i64)> {
    let mut out: Vec<(Multiset, i64)> = Vec::new();
    let mut p = 0;
    while p < m.len() {
        let v = m[p];
        let mult = m[p..].iter().take_while(|&&w| w == v).count();
        let mut n = m.clone();
        n[p] += 1;
        n.sort_unstable();
        out.push((n, mult as i64));
        p += mult;
    }
    out
}

/// Classical symbol of order `order` with homogeneous components down to
/// `order - depth`, coefficients in the ring `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol<C: Coeff = Scalar> {
    dim: usize,
    order: Order,
    depth: u32,
    terms: BTreeMap<TermKey, C>,
}

/// Symbol with Gaussian-rational coefficients.
pub type ClassicalSymbol = Symbol<Scalar>;

pub fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(SymError::Dimension(dim))
    } else {
        Ok(())
    }
}

impl<C: Coeff> Symbol<C> {
    /// The zero symbol of the given order.
    pub fn zero(dim: usize, order: Order) -> Self {
        Symbol {
            dim,
            order,
            depth: 0,
            terms: BTreeMap::new(),
        }
    }

    /// A constant, as a polynomial symbol of order 0.
    pub fn constant(dim: usize, c: C) -> Self {
        let mut s = Symbol::zero(dim, Order::zero());
        s.push(TermKey::poly([0; MAX_DIM], [0; MAX_DIM]), c);
        s
    }

    /// The unit of the algebra.
    pub fn one(dim: usize) -> Self {
        Symbol::constant(dim, C::from_scalar(crate::scalar::int(1)))
    }

    /// Build and validate a symbol from explicit terms.
    pub fn from_terms(
        dim: usize,
        order: Order,
        depth: u32,
        terms: impl IntoIterator<Item = (TermKey, C)>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let mut s = Symbol {
            dim,
            order,
            depth,
            terms: BTreeMap::new(),
        };
        for (k, c) in terms {
            s.push(k, c);
        }
        s.validate()?;
        Ok(s)
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        for k in self.terms.keys() {
            for i in self.dim..MAX_DIM {
                if k.x[i] != 0 || k.xi[i] != 0 || !k.window[i].is_empty() {
                    return Err(SymError::DimensionMismatch(self.dim, i + 1));
                }
            }
            if k.is_uncut() && (!k.radial.is_zero() || !k.zshift.is_zero()) {
                return Err(SymError::UncutRadial);
            }
            if k.is_compact() {
                continue;
            }
            let j = self.order - k.degree();
            if !j.is_integer() || j.is_negative() || j > Order::from_integer(self.depth as i64) {
                return Err(SymError::DegreeOutOfRange {
                    degree: fmt_order(k.degree()),
                    order: fmt_order(self.order),
                    depth: self.depth,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every term carries a window factor on every axis.
    pub fn is_windowed(&self) -> bool {
        self.terms.keys().all(|k| k.is_windowed(self.dim))
    }

    pub fn require_windowed(&self) -> Result<()> {
        if self.is_windowed() {
            Ok(())
        } else {
            Err(SymError::NotWindowed)
        }
    }

    /// Add `c` to the coefficient of `key`, dropping zeros.
    pub(crate) fn push(&mut self, key: TermKey, c: C) {
        if c.vanishes() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().vanishes() {
                    e.remove();
                }
            }
        }
    }

    /// Re-declare the order as `order + k`, `k` a non-negative integer.
    pub fn with_order(mut self, order: Order) -> Result<Self> {
        let k = order - self.order;
        if !k.is_integer() || k.is_negative() {
            return Err(SymError::IncompatibleOrders(
                fmt_order(self.order),
                fmt_order(order),
            ));
        }
        self.depth += k.to_integer() as u32;
        self.order = order;
        Ok(self)
    }

    /// Sum; orders must differ by an integer.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(SymError::DimensionMismatch(self.dim, other.dim));
        }
        if other.terms.is_empty() {
            return Ok(self.clone());
        }
        if self.terms.is_empty() {
            return Ok(other.clone());
        }
        let diff = self.order - other.order;
        if !diff.is_integer() {
            return Err(SymError::IncompatibleOrders(
                fmt_order(self.order),
                fmt_order(other.order),
            ));
        }
        let order = self.order.max(other.order);
        let mut out = self.clone().with_order(order)?;
        let o = other.clone().with_order(order)?;
        out.depth = out.depth.max(o.depth);
        for (k, c) in o.terms {
            out.push(k, c);
        }
        Ok(out)
    }

    /// Sum of two symbols.
    ///
    /// # Panics
    ///
    /// If the orders do not differ by an integer or the dimensions differ.
    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("incompatible symbols in sum")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Symbol::zero(self.dim, self.order);
        out.depth = self.depth;
        for (k, c) in &self.terms {
            out.push(k.clone(), f(c));
        }
        out
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in product");
        let mut out = Symbol::zero(self.dim, self.order + other.order);
        out.depth = self.depth + other.depth;
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.push(ka.mul(kb), ca.mul(cb));
            }
        }
        out
    }

    /// Multiply by the window `prod_i psi(1 - x_i^2)`.
    pub fn windowed(&self) -> Self {
        let mut out = Symbol::zero(self.dim, self.order);
        out.depth = self.depth;
        for (k, c) in &self.terms {
            let mut k = k.clone();
            for w in k.window[..self.dim].iter_mut() {
                *w = merge(w, &SmallVec::from_slice(&[0]));
            }
            out.push(k, c.clone());
        }
        out
    }

    /// `d / dx_i`.
    pub fn partial_x(&self, i: usize) -> Self {
        assert!(i < self.dim);
        let mut out = Symbol::zero(self.dim, self.order);
        out.depth = self.depth;
        for (k, c) in &self.terms {
            let e = k.x[i];
            if e > 0 {
                let mut nk = k.clone();
                nk.x[i] -= 1;
                out.push(nk, c.scale(&crate::scalar::int(e as i64)));
            }
            for (w, mult) in bump_each(&k.window[i]) {
                let mut nk = k.clone();
                nk.window[i] = w;
                nk.x[i] += 1;
                out.push(nk, c.scale(&crate::scalar::int(-2 * mult)));
            }
        }
        out
    }

    /// `d / dxi_i`; lowers the order by one.
    pub fn partial_xi(&self, i: usize) -> Self {
        assert!(i < self.dim);
        let mut out = Symbol::zero(self.dim, self.order - 1);
        out.depth = self.depth;
        for (k, c) in &self.terms {
            let b = k.xi[i];
            if b > 0 {
                let mut nk = k.clone();
                nk.xi[i] -= 1;
                out.push(nk, c.scale(&crate::scalar::int(b as i64)));
            }
            if !k.radial.is_zero() || !k.zshift.is_zero() {
                let mut nk = k.clone();
                nk.xi[i] += 1;
                nk.radial -= 2;
                out.push(nk, c.mul(&C::affine(k.radial, k.zshift)));
            }
            for (cut, mult) in bump_each(&k.cut) {
                let mut nk = k.clone();
                nk.cut = cut;
                nk.xi[i] += 1;
                nk.radial -= 1;
                out.push(nk, c.scale(&crate::scalar::int(mult)));
            }
        }
        out
    }

    /// Partial derivative in coordinate `c` of `(x_1..x_n, xi_1..xi_n)`.
    pub fn partial(&self, c: usize) -> Self {
        if c < self.dim {
            self.partial_x(c)
        } else {
            self.partial_xi(c - self.dim)
        }
    }

    /// Numerical value at `(x, xi)` and family parameter `z`.
    pub fn eval_at(&self, x: &[f64], xi: &[f64], z: Complex64) -> Result<Complex64> {
        if x.len() != self.dim || xi.len() != self.dim {
            return Err(SymError::DimensionMismatch(self.dim, x.len().max(xi.len())));
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| c.eval(z) * k.eval(x, xi, z))
            .sum())
    }

    /// Numerical value at `(x, xi)`.
    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        self.eval_at(x, xi, Complex64::zero())
    }

    /// Keep only the terms that are homogeneous near infinity, each written
    /// with a single factor `chi`. Differs from `self` by a symbol supported
    /// in `|xi| <= 1`, so residues and homogeneous components are unchanged.
    pub fn asymptotic_part(&self) -> Self {
        let mut out = Symbol::zero(self.dim, self.order);
        out.depth = self.depth;
        for (k, c) in &self.terms {
            if k.is_compact() {
                continue;
            }
            let mut k = k.clone();
            k.cut = SmallVec::from_slice(&[0]);
            out.push(k, c.clone());
        }
        out
    }

    /// Drop non-compact terms of degree below `min_degree` and all compact terms.
    pub fn asymptotic_above(&self, min_degree: Order) -> Self {
        let mut out = self.asymptotic_part();
        out.terms.retain(|k, _| k.degree() >= min_degree);
        out
    }

    /// Homogeneous component of degree `order - j`, as a function on `|xi| > 0`.
    pub fn homogeneous_component(&self, j: u32) -> Homogeneous<C> {
        self.component_of_degree(self.order - j as i64)
    }

    pub fn component_of_degree(&self, degree: Order) -> Homogeneous<C> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k.is_compact() || k.degree() != degree {
                continue;
            }
            let mut k = k.clone();
            k.cut = SmallVec::new();
            let e: &mut C = terms.entry(k).or_insert_with(C::zero_coeff);
            e.add_assign(c);
        }
        terms.retain(|_, c: &mut C| !c.vanishes());
        Homogeneous {
            dim: self.dim,
            degree,
            terms,
        }
    }

    /// Sum of coefficient magnitudes (rounding budgets).
    pub fn magnitude(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).sum()
    }

    pub(crate) fn set_depth(&mut self, depth: u32) {
        self.depth = depth;
    }
}

/// A function on `U x (R^n \ 0)` homogeneous of one degree in `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogeneous<C: Coeff = Scalar> {
    pub dim: usize,
    pub degree: Order,
    /// Keys have an empty cut-off multiset.
    pub terms: BTreeMap<TermKey, C>,
}

impl<C: Coeff> Homogeneous<C> {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn as_symbol(&self) -> Symbol<C> {
        Symbol {
            dim: self.dim,
            order: self.degree,
            depth: 0,
            terms: self.terms.clone(),
        }
    }

    /// Partial derivative in coordinate `c` of `(x, xi)`.
    pub fn partial(&self, c: usize) -> Self {
        let d = self.as_symbol().partial(c);
        Homogeneous {
            dim: self.dim,
            degree: d.order,
            terms: d.terms,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Homogeneous {
            dim: self.dim,
            degree: self.degree,
            terms: self.as_symbol().scale(s).terms,
        }
    }

    /// Add another function of the same degree.
    pub fn accumulate(&mut self, other: &Self) {
        debug_assert!(other.is_zero() || other.degree == self.degree);
        let mut s = self.as_symbol();
        for (k, c) in &other.terms {
            s.push(k.clone(), c.clone());
        }
        self.terms = s.terms;
    }

    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        if xi.iter().all(|&t| t == 0.0) && self.degree < Order::zero() {
            return Err(SymError::Domain);
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut f = k.eval(x, xi, Complex64::zero()) * c.eval(Complex64::zero());
                if !k.radial.is_zero() {
                    let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
                    f *= r.powf(order_f64(k.radial));
                }
                f
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, q, rat};

    fn e(a: u16) -> Exps {
        [a, 0, 0]
    }

    fn sample() -> ClassicalSymbol {
        // x^2 xi |xi|^(-1/2) chi + 3 xi^0 |xi|^(-3/2) chi, windowed, order 1/2.
        let s = ClassicalSymbol::from_terms(
            1,
            q(1, 2),
            1,
            [
                (TermKey::cut(e(2), e(1), q(-1, 2)), rat(1, 2)),
                (TermKey::cut(e(0), e(0), q(-1, 2)), int(3)),
            ],
        )
        .unwrap();
        s.windowed()
    }

    #[test]
    fn validation_rejects_bad_degrees() {
        let r = ClassicalSymbol::from_terms(
            1,
            q(1, 2),
            0,
            [(TermKey::cut(e(0), e(0), q(-1, 2)), int(1))],
        );
        assert!(matches!(r, Err(SymError::DegreeOutOfRange { .. })));
        let mut k = TermKey::poly(e(0), e(1));
        k.radial = q(1, 1);
        assert!(ClassicalSymbol::from_terms(1, q(2, 1), 0, [(k, int(1))]).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = sample();
        let dx = s.partial_x(0);
        let dxi = s.partial_xi(0);
        let h = 1e-6;
        for &(x, xi) in &[(0.3, 0.8), (-0.5, 1.7), (0.1, -0.6), (0.9, 3.0)] {
            let fd = (s.evaluate(&[x + h], &[xi]).unwrap() - s.evaluate(&[x - h], &[xi]).unwrap())
                / (2.0 * h);
            assert!((fd - dx.evaluate(&[x], &[xi]).unwrap()).norm() < 1e-6);
            let fd = (s.evaluate(&[x], &[xi + h]).unwrap() - s.evaluate(&[x], &[xi - h]).unwrap())
                / (2.0 * h);
            assert!((fd - dxi.evaluate(&[x], &[xi]).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn mixed_partials_commute_structurally() {
        let s = sample();
        assert_eq!(s.partial_x(0).partial_xi(0), s.partial_xi(0).partial_x(0));
        assert_eq!(
            s.partial_xi(0).partial_xi(0).partial_x(0),
            s.partial_x(0).partial_xi(0).partial_xi(0)
        );
    }

    #[test]
    fn homogeneous_component_evaluates() {
        let s = sample();
        let h = s.homogeneous_component(0);
        let v = h.evaluate(&[0.0], &[4.0]).unwrap();
        assert_eq!(v, Complex64::zero());
        // At |xi| >= 1 the symbol equals the sum of its components.
        let c1 = s.homogeneous_component(1);
        for &(x, xi) in &[(0.2, 2.0), (-0.4, -1.5)] {
            let lhs = s.evaluate(&[x], &[xi]).unwrap();
            let rhs = h.evaluate(&[x], &[xi]).unwrap() + c1.evaluate(&[x], &[xi]).unwrap();
            assert!((lhs - rhs).norm() < 1e-14);
        }
        assert!(matches!(c1.evaluate(&[0.0], &[0.0]), Err(SymError::Domain)));
    }
}
