//! Symbol-valued differential forms on `T*U`.
//!
//! A form of degree `k` and order `m` is stored as a map from a bitmask over
//! the `2n` coordinates `(dx_1..dx_n, dxi_1..dxi_n)` to its coefficient; the
//! coefficient of `dx_I ^ dxi_J` has order `m - |J|`.

use std::collections::BTreeMap;

use num::complex::Complex64;

use crate::coeff::Coeff;
use crate::error::{Result, SymError};
use crate::quadrature::{monomial_moment, Integrator};
use crate::regint::{self, flux_density_exact, ExactDensity, Estimate};
use crate::scalar::{fmt_order, int, real, Order, Scalar};
use crate::star::{star, star_above};
use crate::symbol::{check_dim, ClassicalSymbol, Homogeneous, Symbol};

/// Bitmask of basis one-forms: bit `i < n` is `dx_{i+1}`, bit `n + j` is `dxi_{j+1}`.
pub type Basis = u8;

/// Differential form with symbol coefficients in the ring `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolForm<C: Coeff = Scalar> {
    dim: usize,
    degree: usize,
    order: Order,
    comps: BTreeMap<Basis, Symbol<C>>,
}

pub type ClassicalForm = SymbolForm<Scalar>;

/// Number of `dxi` factors in a basis element.
pub fn xi_count(mask: Basis, dim: usize) -> usize {
    (mask >> dim).count_ones() as usize
}

/// Canonical mask and sign for `dx_{dx[0]} ^ ... ^ dxi_{dxi[0]} ^ ...` (0-based
/// indices, in the given order). `None` if an index repeats.
pub fn basis_of(dim: usize, dx: &[usize], dxi: &[usize]) -> Option<(Basis, i64)> {
    let coords: Vec<usize> = dx.iter().copied().chain(dxi.iter().map(|j| j + dim)).collect();
    let mut mask: Basis = 0;
    for &c in &coords {
        if mask & (1 << c) != 0 {
            return None;
        }
        mask |= 1 << c;
    }
    let mut inversions = 0;
    for a in 0..coords.len() {
        for b in a + 1..coords.len() {
            if coords[a] > coords[b] {
                inversions += 1;
            }
        }
    }
    Some((mask, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Sign of `e_A ^ e_B` relative to `e_{A u B}` for disjoint masks.
fn wedge_sign(a: Basis, b: Basis) -> i64 {
    let mut inv = 0;
    for p in 0..8 {
        if a & (1 << p) != 0 {
            inv += (b & ((1u16 << p) - 1) as u8).count_ones();
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<C: Coeff> SymbolForm<C> {
    pub fn zero(dim: usize, degree: usize, order: Order) -> Self {
        SymbolForm {
            dim,
            degree,
            order,
            comps: BTreeMap::new(),
        }
    }

    /// The 0-form `sigma`.
    pub fn function(sigma: &Symbol<C>) -> Self {
        let mut f = SymbolForm::zero(sigma.dim(), 0, sigma.order());
        if !sigma.is_empty() {
            f.comps.insert(0, sigma.clone());
        }
        f
    }

    /// Build from `(dx, dxi, coefficient)` triples with 0-based indices in any order.
    pub fn from_components(
        dim: usize,
        degree: usize,
        order: Order,
        comps: impl IntoIterator<Item = (Vec<usize>, Vec<usize>, Symbol<C>)>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let mut f = SymbolForm::zero(dim, degree, order);
        for (dx, dxi, s) in comps {
            if dx.len() + dxi.len() != degree {
                return Err(SymError::FormDegree {
                    expected: degree,
                    got: dx.len() + dxi.len(),
                });
            }
            if dx.iter().chain(&dxi).any(|&i| i >= dim) {
                return Err(SymError::DimensionMismatch(dim, dx.iter().chain(&dxi).max().unwrap() + 1));
            }
            let (mask, sign) = basis_of(dim, &dx, &dxi)
                .ok_or_else(|| SymError::Parse("repeated index in basis form".into()))?;
            f.add_component(mask, &s.scale(&int(sign)))?;
        }
        Ok(f)
    }

    /// Add `s` to the coefficient of `mask`, re-declaring its order to `m - |J|`.
    pub fn add_component(&mut self, mask: Basis, s: &Symbol<C>) -> Result<()> {
        if s.dim() != self.dim {
            return Err(SymError::DimensionMismatch(self.dim, s.dim()));
        }
        if s.is_empty() {
            return Ok(());
        }
        let target = self.order - xi_count(mask, self.dim) as i64;
        let s = s.clone().with_order(target).map_err(|_| SymError::FormCoefficientOrder {
            expected: fmt_order(target),
            got: fmt_order(s.order()),
        })?;
        let next = match self.comps.get(&mask) {
            Some(old) => old.add(&s),
            None => s,
        };
        if next.is_empty() {
            self.comps.remove(&mask);
        } else {
            self.comps.insert(mask, next);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn components(&self) -> &BTreeMap<Basis, Symbol<C>> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn top_mask(&self) -> Basis {
        ((1u16 << (2 * self.dim)) - 1) as Basis
    }

    /// Coefficient of `dx_1 ^ .. ^ dx_n ^ dxi_1 ^ .. ^ dxi_n` (zero if absent).
    pub fn top_coefficient(&self) -> Symbol<C> {
        self.comps
            .get(&self.top_mask())
            .cloned()
            .unwrap_or_else(|| Symbol::zero(self.dim, self.order - self.dim as i64))
    }

    /// Coefficient of `dx_1 ^ .. ^ dx_n ^ dxi_{hat j}` (0-based `j`).
    pub fn hat_coefficient(&self, j: usize) -> Symbol<C> {
        let mask = self.top_mask() & !(1 << (self.dim + j));
        self.comps
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| Symbol::zero(self.dim, self.order - (self.dim as i64 - 1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = self.clone();
        for c in out.comps.values_mut() {
            *c = c.scale(s);
        }
        out
    }

    /// Sum of two forms of equal degree.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(SymError::FormDegree {
                expected: self.degree,
                got: other.degree,
            });
        }
        let order = if self.is_zero() {
            other.order
        } else if other.is_zero() {
            self.order
        } else {
            let d = self.order - other.order;
            if !d.is_integer() {
                return Err(SymError::IncompatibleOrders(fmt_order(self.order), fmt_order(other.order)));
            }
            self.order.max(other.order)
        };
        let mut out = SymbolForm::zero(self.dim, self.degree, order);
        for (m, c) in self.comps.iter().chain(&other.comps) {
            out.add_component(*m, c)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("incompatible forms in sum")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// Exterior derivative `d = sum_i dx_i d/dx_i + sum_j dxi_j d/dxi_j`.
    pub fn exterior_derivative(&self) -> Self {
        let mut out = SymbolForm::zero(self.dim, self.degree + 1, self.order);
        for (&mask, c) in &self.comps {
            for coord in 0..2 * self.dim {
                if mask & (1 << coord) != 0 {
                    continue;
                }
                let below = (mask & ((1u16 << coord) - 1) as u8).count_ones();
                let sign = if below % 2 == 0 { 1 } else { -1 };
                // dx_c ^ e_mask = sign * e_{mask | c}
                let dc = c.partial(coord).scale(&int(sign));
                out.add_component(mask | (1 << coord), &dc)
                    .expect("derivative orders follow the form order");
            }
        }
        out
    }

    /// `alpha ^_* beta`, coefficientwise star products truncated at `k`.
    pub fn wedge_star(&self, other: &Self, k: u32) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in wedge");
        let mut out = SymbolForm::zero(self.dim, self.degree + other.degree, self.order + other.order);
        if self.degree + other.degree > 2 * self.dim {
            return out;
        }
        for (&ma, a) in &self.comps {
            for (&mb, b) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let c = star(a, b, k).scale(&int(wedge_sign(ma, mb)));
                out.add_component(ma | mb, &c).expect("product orders add");
            }
        }
        out
    }

    /// `alpha ^_* beta` keeping, in each result component `J`, only the
    /// homogeneous terms of degree at least `floor(J)`.
    pub fn wedge_star_above(&self, other: &Self, k: u32, floor: impl Fn(Basis) -> Order) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in wedge");
        let mut out = SymbolForm::zero(self.dim, self.degree + other.degree, self.order + other.order);
        if self.degree + other.degree > 2 * self.dim {
            return out;
        }
        for (&ma, a) in &self.comps {
            for (&mb, b) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let c = star_above(a, b, k, floor(ma | mb)).scale(&int(wedge_sign(ma, mb)));
                out.add_component(ma | mb, &c).expect("product orders add");
            }
        }
        out
    }

    /// Pointwise wedge product.
    pub fn wedge(&self, other: &Self) -> Self {
        self.wedge_star(other, 0)
    }

    /// Apply `f` to every coefficient, keeping the structure.
    pub fn map_symbols(&self, f: impl Fn(&Symbol<C>) -> Symbol<C>) -> Self {
        let mut out = SymbolForm::zero(self.dim, self.degree, self.order);
        for (&m, c) in &self.comps {
            out.add_component(m, &f(c)).expect("map preserves orders");
        }
        out
    }

    /// The degree-`j` homogeneous piece: coefficient at `J` is the component
    /// of degree `m - |J| - j`.
    pub fn homogeneous_component(&self, j: u32) -> FormComponent<C> {
        let mut comps = BTreeMap::new();
        for (&mask, c) in &self.comps {
            let deg = self.order - xi_count(mask, self.dim) as i64 - j as i64;
            let h = c.component_of_degree(deg);
            if !h.is_zero() {
                comps.insert(mask, h);
            }
        }
        FormComponent {
            dim: self.dim,
            total_order: self.order - j as i64,
            comps,
        }
    }

    pub fn require_windowed(&self) -> Result<()> {
        for c in self.comps.values() {
            c.require_windowed()?;
        }
        Ok(())
    }
}

/// A form whose coefficients are homogeneous on `|xi| > 0`, of total order
/// `total_order` when each `dxi_j` counts as order 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FormComponent<C: Coeff = Scalar> {
    pub dim: usize,
    pub total_order: Order,
    pub comps: BTreeMap<Basis, Homogeneous<C>>,
}

impl<C: Coeff> FormComponent<C> {
    /// Exterior derivative on `|xi| > 0`.
    pub fn exterior_derivative(&self) -> Self {
        let mut comps: BTreeMap<Basis, Homogeneous<C>> = BTreeMap::new();
        for (&mask, h) in &self.comps {
            for coord in 0..2 * self.dim {
                if mask & (1 << coord) != 0 {
                    continue;
                }
                let below = (mask & ((1u16 << coord) - 1) as u8).count_ones();
                let sign = if below % 2 == 0 { 1 } else { -1 };
                let dh = h.partial(coord).scale(&int(sign));
                let e = comps.entry(mask | (1 << coord)).or_insert_with(|| Homogeneous {
                    dim: self.dim,
                    degree: dh.degree,
                    terms: BTreeMap::new(),
                });
                e.accumulate(&dh);
            }
        }
        comps.retain(|_, h| !h.is_zero());
        FormComponent {
            dim: self.dim,
            total_order: self.total_order,
            comps,
        }
    }

    /// Value of the `mask` coefficient at a point.
    pub fn evaluate(&self, mask: Basis, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        match self.comps.get(&mask) {
            Some(h) => h.evaluate(x, xi),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }
}

/// `res(omega)`: residue of the top coefficient, zero below top degree.
pub fn residue_form(w: &ClassicalForm, integ: &Integrator) -> Result<Estimate> {
    w.require_windowed()?;
    if w.degree() != 2 * w.dim() {
        return Ok(Estimate::default());
    }
    regint::residue(&w.top_coefficient(), integ)
}

/// Residue density of the top coefficient at `x`.
pub fn residue_form_density(w: &ClassicalForm, x: &[f64]) -> Result<Complex64> {
    if w.degree() != 2 * w.dim() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    regint::residue_density(&w.top_coefficient(), x)
}

/// Cut-off integral of the top coefficient (orientation `dx_1..dx_n dxi_1..dxi_n`).
pub fn cutoff_integral_form(w: &ClassicalForm, integ: &Integrator) -> Result<Estimate> {
    w.require_windowed()?;
    if w.degree() != 2 * w.dim() {
        return Ok(Estimate::default());
    }
    regint::cutoff_integral(&w.top_coefficient(), integ)
}

/// Exact channel of `int_{S*U} j^* beta` for a `(2n-1)`-form: only the
/// degree `1-n` parts of the `dx ^ dxi_{hat j}` coefficients contribute, with
/// sign `(-1)^(n+j-1)` (1-based `j`).
pub fn cosphere_integral_exact(beta: &ClassicalForm) -> Result<ExactDensity> {
    let n = beta.dim();
    if beta.degree() != 2 * n - 1 {
        return Err(SymError::FormDegree {
            expected: 2 * n - 1,
            got: beta.degree(),
        });
    }
    let mut acc: Option<ExactDensity> = None;
    for j in 0..n {
        let sign = if (n + j) % 2 == 0 { 1 } else { -1 };
        let d = flux_density_exact(&beta.hat_coefficient(j), j).scaled(&int(sign));
        acc = Some(match acc {
            None => d,
            Some(a) => a.plus(&d),
        });
    }
    Ok(acc.expect("n >= 1"))
}

/// The two sides of cut-off Stokes.
#[derive(Clone, Debug)]
pub struct StokesCheck {
    /// `fp int d beta`.
    pub defect: Estimate,
    /// Cosphere boundary term from sphere moments.
    pub boundary: Estimate,
    pub boundary_exact: ExactDensity,
}

impl StokesCheck {
    pub fn residual(&self) -> Complex64 {
        self.defect.value - self.boundary.value
    }

    pub fn budget(&self) -> f64 {
        self.defect.diff_budget(&self.boundary)
    }
}

pub fn stokes_boundary(beta: &ClassicalForm, integ: &Integrator) -> Result<StokesCheck> {
    beta.require_windowed()?;
    let exact = cosphere_integral_exact(beta)?;
    let boundary = exact.integrate(integ)?;
    let defect = cutoff_integral_form(&beta.exterior_derivative(), integ)?;
    Ok(StokesCheck {
        defect,
        boundary,
        boundary_exact: exact,
    })
}

/// Residue computed directly and through the Liouville contraction.
#[derive(Clone, Debug)]
pub struct IntrinsicCheck {
    pub direct: Estimate,
    pub intrinsic: Estimate,
    pub direct_exact: ExactDensity,
    pub intrinsic_exact: ExactDensity,
}

/// `iota_X` of the order-0 part of a top form, pulled back to `S*U`.
///
/// `iota_X (dx ^ dxi) = (-1)^n dx ^ sum_j (-1)^j xi_j dxi_{hat j}` (0-based `j`),
/// `j^* dxi_{hat j} = (-1)^j omega_j dS`, and `S*U` carries `(-1)^n dx ^ dS`,
/// so each term contributes `M(b + 2 e_j)` with the product of those signs.
pub fn intrinsic_residue_check(w: &ClassicalForm, integ: &Integrator) -> Result<IntrinsicCheck> {
    w.require_windowed()?;
    let n = w.dim();
    let direct_exact = if w.degree() == 2 * n {
        regint::residue_density_exact(&w.top_coefficient())
    } else {
        regint::residue_density_exact(&ClassicalSymbol::zero(n, Order::from_integer(0)))
    };
    let mut intrinsic_exact = regint::residue_density_exact(&ClassicalSymbol::zero(n, Order::from_integer(0)));
    if w.degree() == 2 * n {
        let top = w.top_coefficient();
        let target = Order::from_integer(-(n as i64));
        let parity = |k: usize| if k % 2 == 0 { 1i64 } else { -1 };
        for (k, c) in top.terms() {
            if k.is_compact() || k.degree() != target {
                continue;
            }
            for j in 0..n {
                let sign = parity(n) * parity(j) * parity(j) * parity(n);
                let mut b = k.xi;
                b[j] += 2;
                let m = monomial_moment(&b[..n]);
                intrinsic_exact.add_term(regint::XKey::of(k), c * real(m.coeff) * int(sign));
            }
        }
    }
    Ok(IntrinsicCheck {
        direct: direct_exact.integrate(integ)?,
        intrinsic: intrinsic_exact.integrate(integ)?,
        direct_exact,
        intrinsic_exact,
    })
}
