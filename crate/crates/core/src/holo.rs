//! Holomorphic families `sigma(z)` of Riesz type and Laurent germs of their
//! cut-off integrals.
//!
//! A family is stored as a symbol with coefficients in `ZJet` whose terms
//! carry `|xi|^(s + kappa z)`; `kappa = alpha'(0)` is the slope of the order
//! `alpha(z) = m + kappa z`. Each term of the cut-off integral contributes
//! the exact germ of `-1 / (a + n + kappa z)` from the tail `|xi| >= 1` and
//! an entire jet from the annulus, obtained by differentiating under the
//! integral sign.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{One, Zero};
use serde_json::{json, Value};
use smallvec::smallvec;

use crate::coeff::{Coeff, ZJet};
use crate::error::{Result, SymError};
use crate::forms::{ClassicalForm, SymbolForm};
use crate::quadrature::{monomial_moment, Integrator};
use crate::regint::{self, Estimate};
use crate::scalar::{fmt_order, order_f64, order_scalar, to_c64, Order, Scalar};
use crate::symbol::{ClassicalSymbol, Symbol};

/// `sigma(z) = H(z) * sum chi sigma_{m-j} |xi|^(kappa z)`, order `m + kappa z`.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloSymbolFamily {
    pub base: ClassicalSymbol,
    pub slope: Order,
    /// Polynomial prefactor `H`, `H(0) = 1`.
    pub prefactor: Vec<Scalar>,
    pub lifted: Symbol<ZJet>,
}

fn check_prefactor(h: &[Scalar]) -> Result<()> {
    match h.first() {
        Some(c) if c.is_one() => Ok(()),
        None => Ok(()),
        _ => Err(SymError::FamilyNormalisation),
    }
}

/// Lift a symbol coefficientwise; polynomial terms `P` become
/// `P + chi P (|xi|^(kappa z) - 1)` so the family is still exactly `sigma` at 0.
pub fn lift_symbol(sigma: &ClassicalSymbol, h: &ZJet, slope: Order) -> Symbol<ZJet> {
    let mut out: Symbol<ZJet> = Symbol::zero(sigma.dim(), sigma.order());
    out.set_depth(sigma.depth());
    for (k, c) in sigma.terms() {
        let hc = h.scale(c);
        if k.is_uncut() {
            out.push(k.clone(), hc.clone());
            let mut shifted = k.clone();
            shifted.cut = smallvec![0];
            let plain = shifted.clone();
            shifted.zshift = slope;
            out.push(shifted, hc.clone());
            out.push(plain, hc.neg());
        } else {
            let mut nk = k.clone();
            nk.zshift = slope;
            out.push(nk, hc);
        }
    }
    out
}

impl HoloSymbolFamily {
    /// Riesz family with `alpha(z) = m - z` and prefactor `H`.
    pub fn riesz(sigma: &ClassicalSymbol, prefactor: &[Scalar]) -> Result<Self> {
        Self::with_slope(sigma, prefactor, Order::from_integer(-1))
    }

    pub fn with_slope(sigma: &ClassicalSymbol, prefactor: &[Scalar], slope: Order) -> Result<Self> {
        check_prefactor(prefactor)?;
        if slope.is_zero() {
            return Err(SymError::ConstantFamily);
        }
        let h = if prefactor.is_empty() {
            ZJet::one()
        } else {
            ZJet::exact(prefactor.to_vec())
        };
        Ok(HoloSymbolFamily {
            base: sigma.clone(),
            slope,
            prefactor: prefactor.to_vec(),
            lifted: lift_symbol(sigma, &h, slope),
        })
    }

    /// `alpha(z)`.
    pub fn order_at(&self, z: Order) -> Order {
        self.base.order() + self.slope * z
    }

    /// The member `sigma(z)` at a rational `z`, exactly.
    pub fn at(&self, z: Order) -> ClassicalSymbol {
        specialize(&self.lifted, z)
    }

    pub fn evaluate(&self, x: &[f64], xi: &[f64], z: Complex64) -> Result<Complex64> {
        self.lifted.eval_at(x, xi, z)
    }

    /// Poles of the cut-off integral: `z` with `a + n + kappa z = 0` for some
    /// non-compact term of degree `a`.
    pub fn pole_set(&self) -> Vec<Order> {
        let n = self.base.dim() as i64;
        let mut v: Vec<Order> = self
            .lifted
            .terms()
            .keys()
            .filter(|k| !k.is_compact() && !k.is_uncut() && !k.zshift.is_zero())
            .map(|k| -(k.degree() + n) / k.zshift)
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Substitute a rational `z` into a family.
pub fn specialize(f: &Symbol<ZJet>, z: Order) -> ClassicalSymbol {
    let zs = order_scalar(z);
    let mut order = f.order();
    if let Some(k) = f.terms().keys().find(|k| !k.zshift.is_zero()) {
        order += k.zshift * z;
    }
    let mut out = ClassicalSymbol::zero(f.dim(), order);
    out.set_depth(f.depth());
    for (k, c) in f.terms() {
        let mut v = Scalar::zero();
        for coeff in c.coeffs.iter().rev() {
            v = v * zs.clone() + coeff.clone();
        }
        let mut nk = k.clone();
        nk.radial += k.zshift * z;
        nk.zshift = Order::zero();
        out.push(nk, v);
    }
    out
}

/// Lift every coefficient of a form.
pub fn lift_form(beta: &ClassicalForm, prefactor: &[Scalar], slope: Order) -> Result<SymbolForm<ZJet>> {
    check_prefactor(prefactor)?;
    if slope.is_zero() {
        return Err(SymError::ConstantFamily);
    }
    let h = if prefactor.is_empty() {
        ZJet::one()
    } else {
        ZJet::exact(prefactor.to_vec())
    };
    let mut out = SymbolForm::zero(beta.dim(), beta.degree(), beta.order());
    for (&m, c) in beta.components() {
        out.add_component(m, &lift_symbol(c, &h, slope))?;
    }
    Ok(out)
}

/// Truncated Laurent expansion at `z0`:
/// `sum_k principal[k] t^-(k+1) + sum_k jet[k] t^k`, `t = z - z0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentGerm {
    pub z0: Order,
    pub principal: Vec<Complex64>,
    pub jet: Vec<Complex64>,
    /// Error budget shared by all coefficients.
    pub error: f64,
    pub scale: f64,
}

impl LaurentGerm {
    pub fn zero(z0: Order, jet_len: usize) -> Self {
        LaurentGerm {
            z0,
            principal: Vec::new(),
            jet: vec![Complex64::zero(); jet_len],
            error: 0.0,
            scale: 0.0,
        }
    }

    /// Coefficient of `t^-1`.
    pub fn residue(&self) -> Complex64 {
        self.principal.first().copied().unwrap_or_default()
    }

    /// Coefficient of `t^0`.
    pub fn constant(&self) -> Complex64 {
        self.jet.first().copied().unwrap_or_default()
    }

    pub fn pole_order(&self) -> usize {
        self.principal.iter().rposition(|c| *c != Complex64::zero()).map_or(0, |p| p + 1)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.principal.iter().chain(&self.jet).map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn coeff(&self, k: i64) -> Complex64 {
        if k < 0 {
            self.principal.get((-k - 1) as usize).copied().unwrap_or_default()
        } else {
            self.jet.get(k as usize).copied().unwrap_or_default()
        }
    }

    pub fn add(&self, other: &LaurentGerm) -> LaurentGerm {
        let p = self.principal.len().max(other.principal.len());
        let q = self.jet.len().min(other.jet.len());
        LaurentGerm {
            z0: self.z0,
            principal: (0..p).map(|k| self.coeff(-(k as i64) - 1) + other.coeff(-(k as i64) - 1)).collect(),
            jet: (0..q).map(|k| self.coeff(k as i64) + other.coeff(k as i64)).collect(),
            error: self.error + other.error,
            scale: self.scale + other.scale,
        }
    }

    pub fn scale_by(&self, c: Complex64) -> LaurentGerm {
        LaurentGerm {
            z0: self.z0,
            principal: self.principal.iter().map(|v| v * c).collect(),
            jet: self.jet.iter().map(|v| v * c).collect(),
            error: self.error * c.norm(),
            scale: self.scale * c.norm(),
        }
    }

    /// Product, truncated to the shorter regular jet minus the pole orders.
    pub fn mul(&self, other: &LaurentGerm) -> LaurentGerm {
        let pa = self.principal.len() as i64;
        let pb = other.principal.len() as i64;
        let qa = self.jet.len() as i64;
        let qb = other.jet.len() as i64;
        // Coefficient t^k is exact while k < min(qa - pb, qb - pa).
        let q = (qa - pb).min(qb - pa).max(0);
        let p = pa + pb;
        let c = |k: i64| -> Complex64 {
            let mut acc = Complex64::zero();
            for i in -pa..qa {
                let j = k - i;
                if j >= -pb && j < qb {
                    acc += self.coeff(i) * other.coeff(j);
                }
            }
            acc
        };
        LaurentGerm {
            z0: self.z0,
            principal: (0..p).map(|k| c(-k - 1)).collect(),
            jet: (0..q).map(c).collect(),
            error: self.error * other.max_abs() + other.error * self.max_abs(),
            scale: self.scale * other.scale,
        }
    }

    pub fn to_json(&self) -> Value {
        let pair = |c: &Complex64| json!([c.re, c.im]);
        let principal: serde_json::Map<String, Value> = self
            .principal
            .iter()
            .enumerate()
            .map(|(k, c)| (format!("{}", -(k as i64) - 1), pair(c)))
            .collect();
        let jet: serde_json::Map<String, Value> =
            self.jet.iter().enumerate().map(|(k, c)| (k.to_string(), pair(c))).collect();
        json!({
            "z0": fmt_order(self.z0),
            "principal": principal,
            "jet": jet,
            "error": self.error,
        })
    }
}

/// Germ at `z0` of `z -> fp int sigma(z)` for a lifted family.
pub fn laurent_cutoff_integral(
    f: &Symbol<ZJet>,
    z0: Order,
    jet_len: usize,
    integ: &Integrator,
) -> Result<LaurentGerm> {
    f.require_windowed()?;
    let dim = f.dim();
    let z0s = order_scalar(z0);
    let mut acc = LaurentGerm::zero(z0, jet_len);
    let mut principal = Complex64::zero();
    let mut has_pole = false;
    let mut jet = vec![Complex64::zero(); jet_len];
    let mut est = Estimate::default();
    for (k, c) in f.terms() {
        if k.is_uncut() {
            continue;
        }
        let m = monomial_moment(&k.xi[..dim]).value();
        if m == 0.0 {
            continue;
        }
        let xr = integ.x_integral(k, dim)?;
        if xr.value == 0.0 && xr.error == 0.0 {
            continue;
        }
        let q0 = k.degree() + dim as i64 + k.zshift * z0;
        let zs = order_f64(k.zshift);
        // Germ G(t) of the radial part: g_pole t^-1 + sum g_k t^k.
        let mut g = vec![0.0; jet_len + 1];
        let mut g_err = vec![0.0; jet_len + 1];
        let mut g_pole = 0.0;
        for (i, gi) in g.iter_mut().enumerate() {
            if i > 0 && k.zshift.is_zero() {
                break;
            }
            let r = integ.radial_integral(&k.cut, q0 - 1, i as u32, 0.5, 1.0)?;
            *gi = r.value * zs.powi(i as i32);
            g_err[i] = r.error * zs.abs().powi(i as i32);
        }
        if !k.is_compact() {
            if k.zshift.is_zero() {
                if !q0.is_zero() {
                    g[0] -= 1.0 / order_f64(q0);
                }
            } else if q0.is_zero() {
                g_pole = -1.0 / zs;
            } else {
                let q0f = order_f64(q0);
                let ratio = -zs / q0f;
                for (i, gi) in g.iter_mut().enumerate() {
                    *gi -= ratio.powi(i as i32) / q0f;
                }
            }
        }
        // Coefficient jet at z0.
        let cj = c.shift(&z0s);
        let cc: Vec<Complex64> = (0..=jet_len).map(|i| to_c64(&cj.coeff(i))).collect();
        let w = m * xr.value;
        let werr = m.abs() * xr.error;
        if g_pole != 0.0 {
            has_pole = true;
            principal += cc[0] * g_pole * w;
            est.error += cc[0].norm() * g_pole.abs() * werr;
        }
        for (t, slot) in jet.iter_mut().enumerate() {
            let mut v = if g_pole != 0.0 { cc[t + 1] * g_pole } else { Complex64::zero() };
            let mut e = 0.0;
            for i in 0..=t {
                v += cc[t - i] * g[i];
                e += cc[t - i].norm() * g_err[i];
            }
            *slot += v * w;
            est.error += e * w.abs() + v.norm() * werr;
            est.scale += (v * w).norm();
        }
    }
    let est = est.finish();
    acc.principal = if has_pole { vec![principal] } else { Vec::new() };
    acc.jet = jet;
    acc.error = est.error;
    acc.scale = est.scale;
    Ok(acc)
}

/// Germ of the cut-off integral of a lifted form (its top coefficient).
pub fn laurent_cutoff_integral_form(
    w: &SymbolForm<ZJet>,
    z0: Order,
    jet_len: usize,
    integ: &Integrator,
) -> Result<LaurentGerm> {
    if w.degree() != 2 * w.dim() {
        return Ok(LaurentGerm::zero(z0, jet_len));
    }
    laurent_cutoff_integral(&w.top_coefficient(), z0, jet_len, integ)
}

/// Both sides of `Res_{z=0} fp int sigma(z) = -(1/alpha'(0)) res(sigma)`.
#[derive(Clone, Debug)]
pub struct ComplexResidueCheck {
    pub germ_residue: Complex64,
    pub predicted: Estimate,
    pub budget: f64,
}

impl ComplexResidueCheck {
    pub fn defect(&self) -> f64 {
        (self.germ_residue - self.predicted.value).norm()
    }
}

pub fn complex_residue_identity_defect(fam: &HoloSymbolFamily, integ: &Integrator) -> Result<ComplexResidueCheck> {
    let germ = laurent_cutoff_integral(&fam.lifted, Order::zero(), 1, integ)?;
    let res = regint::residue(&fam.base, integ)?;
    let c = Complex64::new(-1.0 / order_f64(fam.slope), 0.0);
    let mut predicted = Estimate::default();
    predicted.add_estimate(c, &res);
    Ok(ComplexResidueCheck {
        germ_residue: germ.residue(),
        budget: germ.error + predicted.error,
        predicted,
    })
}

/// Form version: the family is lifted coefficientwise.
pub fn complex_residue_identity_defect_form(
    beta: &ClassicalForm,
    prefactor: &[Scalar],
    integ: &Integrator,
) -> Result<ComplexResidueCheck> {
    let slope = Order::from_integer(-1);
    let lifted = lift_form(beta, prefactor, slope)?;
    let germ = laurent_cutoff_integral_form(&lifted, Order::zero(), 1, integ)?;
    let res = crate::forms::residue_form(beta, integ)?;
    let mut predicted = Estimate::default();
    predicted.add_estimate(Complex64::new(-1.0 / order_f64(slope), 0.0), &res);
    Ok(ComplexResidueCheck {
        germ_residue: germ.residue(),
        budget: germ.error + predicted.error,
        predicted,
    })
}

/// `fp_{z=0} fp int sigma(z)`: the constant Laurent coefficient.
pub fn regularized_integral(fam: &HoloSymbolFamily, integ: &Integrator) -> Result<LaurentGerm> {
    laurent_cutoff_integral(&fam.lifted, Order::zero(), 1, integ)
}

/// Germ at 0 of `z -> fp int d(beta(z))`; vanishes identically.
pub fn meromorphic_stokes_defect(
    beta: &ClassicalForm,
    prefactor: &[Scalar],
    jet_len: usize,
    integ: &Integrator,
) -> Result<LaurentGerm> {
    beta.require_windowed()?;
    let lifted = lift_form(beta, prefactor, Order::from_integer(-1))?;
    laurent_cutoff_integral_form(&lifted.exterior_derivative(), Order::zero(), jet_len, integ)
}

/// Summary of pole locations by degree, for reports.
pub fn pole_table(fam: &HoloSymbolFamily) -> BTreeMap<String, String> {
    fam.pole_set()
        .into_iter()
        .map(|z| (fmt_order(z), fmt_order(fam.order_at(z))))
        .collect()
}
