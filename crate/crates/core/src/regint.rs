//! Residue densities, finite-part (cut-off) integrals, their log
//! coefficients, integration by parts in `xi`, and translation defects.
//!
//! Every term of a symbol factorises into an x-part, a sphere monomial and a
//! radial profile, so each quantity is a sum of products of an exact sphere
//! moment, a one-dimensional window integral and (for the finite part) a
//! radial integral over the transition annulus.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::rational::BigRational;
use num::Zero;

use crate::coeff::Coeff;
use crate::cutoff::window_product;
use crate::error::{Result, SymError};
use crate::quadrature::{monomial_moment, pi_power, radial_quad, Integrator, QuadResult, QuadratureSpec};
use crate::scalar::{big_to_f64, order_f64, real, to_c64, Order, Scalar};
use crate::star::multi_indices;
use crate::symbol::{ClassicalSymbol, Exps, Multiset, Symbol, TermKey};
use crate::translate::{check_remainder, Translated};
use crate::MAX_DIM;

/// The x-dependence of a term: monomial times window factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct XKey {
    pub x: Exps,
    pub window: [Multiset; MAX_DIM],
}

impl XKey {
    pub fn of(k: &TermKey) -> Self {
        XKey {
            x: k.x,
            window: k.window.clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &t)| t.powi(self.x[i] as i32) * window_product(t, &self.window[i]))
            .product()
    }

    fn as_term(&self) -> TermKey {
        let mut k = TermKey::poly(self.x, [0; MAX_DIM]);
        k.window = self.window.clone();
        k
    }
}

/// A density in `x` known exactly: `pi^pi_power * sum_k c_k * X_k(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDensity {
    pub dim: usize,
    pub pi_power: u32,
    pub terms: BTreeMap<XKey, Scalar>,
}

impl ExactDensity {
    fn new(dim: usize) -> Self {
        ExactDensity {
            dim,
            pi_power: pi_power(dim),
            terms: BTreeMap::new(),
        }
    }

    /// Add `c` to the coefficient of `k`.
    pub fn add_term(&mut self, k: XKey, c: Scalar) {
        self.add(k, c)
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        let mut out = ExactDensity::new(self.dim);
        for (k, c) in &self.terms {
            out.add(k.clone(), c * s);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add(k.clone(), c.clone());
        }
        out
    }

    fn add(&mut self, k: XKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn pi(&self) -> f64 {
        std::f64::consts::PI.powi(self.pi_power as i32)
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| to_c64(c) * k.eval(x))
            .sum::<Complex64>()
            * self.pi()
    }

    /// Integral over the window box.
    pub fn integrate(&self, integ: &Integrator) -> Result<Estimate> {
        let mut est = Estimate::default();
        for (k, c) in &self.terms {
            let xr = integ.x_integral(&k.as_term(), self.dim)?;
            est.add_product(to_c64(c) * self.pi(), xr);
        }
        Ok(est.finish())
    }
}

/// A complex value together with its numerical error budget.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    /// Quadrature error plus a rounding allowance.
    pub error: f64,
    /// Sum of the magnitudes of all contributions.
    pub scale: f64,
}

impl Estimate {
    /// Accumulate `c * q` with `c` exact up to rounding.
    pub fn add_product(&mut self, c: Complex64, q: QuadResult) {
        self.value += c * q.value;
        self.error += c.norm() * q.error;
        self.scale += c.norm() * q.value.abs();
    }

    pub fn add_estimate(&mut self, c: Complex64, e: &Estimate) {
        self.value += c * e.value;
        self.error += c.norm() * e.error;
        self.scale += c.norm() * e.scale;
    }

    /// Add the rounding allowance.
    pub fn finish(mut self) -> Self {
        self.error += 256.0 * f64::EPSILON * self.scale;
        self
    }

    /// Budget for the difference of two estimates.
    pub fn diff_budget(&self, other: &Estimate) -> f64 {
        self.error + other.error
    }
}

/// Exact residue density: the degree `-n` component integrated over the sphere.
pub fn residue_density_exact(sigma: &ClassicalSymbol) -> ExactDensity {
    density_of_degree(sigma, Order::from_integer(-(sigma.dim() as i64)), None)
}

/// `sum_k c_k M(b_k + e_j)` over components of the given degree (or plain
/// moments when `omega` is `None`).
fn density_of_degree(sigma: &ClassicalSymbol, degree: Order, omega: Option<usize>) -> ExactDensity {
    let dim = sigma.dim();
    let mut d = ExactDensity::new(dim);
    for (k, c) in sigma.terms() {
        if k.is_compact() || k.degree() != degree {
            continue;
        }
        let mut b = k.xi;
        if let Some(j) = omega {
            b[j] += 1;
        }
        let m = monomial_moment(&b[..dim]);
        if m.coeff.is_zero() {
            continue;
        }
        d.add(XKey::of(k), c * real(m.coeff));
    }
    d
}

/// `res_x(sigma) = int_{|xi|=1} sigma_{-n}(x, xi) dS`.
pub fn residue_density(sigma: &ClassicalSymbol, x: &[f64]) -> Result<Complex64> {
    if x.len() != sigma.dim() {
        return Err(SymError::DimensionMismatch(sigma.dim(), x.len()));
    }
    Ok(residue_density_exact(sigma).evaluate(x))
}

/// `res(sigma) = int_U res_x(sigma) dx`; requires a windowed symbol.
pub fn residue(sigma: &ClassicalSymbol, integ: &Integrator) -> Result<Estimate> {
    sigma.require_windowed()?;
    residue_density_exact(sigma).integrate(integ)
}

/// Exact channel of the boundary flux
/// `int_U int_{S^{n-1}} sigma_{1-n}(x, omega) omega_j dS dx`.
pub fn flux_density_exact(sigma: &ClassicalSymbol, j: usize) -> ExactDensity {
    density_of_degree(sigma, Order::from_integer(1 - sigma.dim() as i64), Some(j))
}

/// Finite part at fixed `x`, with its log coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitePart {
    pub value: Estimate,
    /// Coefficient of `log R` in `int_{B(0,R)} sigma dxi`.
    pub log_coefficient: Complex64,
    /// Closed-form tail of the degree `m - i` component, keyed by `i`:
    /// `-rho^(m-i+n) / (m-i+n)` times its sphere integral.
    pub per_degree_boundary: BTreeMap<u32, Complex64>,
    /// Quadrature over the annulus and of compactly supported terms.
    pub compact_part: Estimate,
}

/// Radial profile of a term for the finite part with reference radius `rho`:
/// `fp int_0^infty chi-part * r^(q-1) dr` taken as the constant term of the
/// integral over `[0, rho R]`.
fn radial_part(integ: &Integrator, k: &TermKey, dim: usize, rho: f64) -> Result<QuadResult> {
    if k.is_uncut() {
        return Ok(QuadResult::default());
    }
    let q = k.degree() + dim as i64;
    let p = q - 1;
    if k.is_compact() {
        return integ.radial_integral(&k.cut, p, 0, 0.5, 1.0);
    }
    let s = rho.max(1.0);
    let inner = integ.radial_integral(&k.cut, p, 0, 0.5, s)?;
    let tail = if q.is_zero() {
        (rho / s).ln()
    } else {
        let qf = order_f64(q);
        -s.powf(qf) / qf
    };
    Ok(QuadResult {
        value: inner.value + tail,
        error: inner.error,
    })
}

fn term_moment(k: &TermKey, dim: usize) -> f64 {
    monomial_moment(&k.xi[..dim]).value()
}

/// Finite part of `int sigma(x, xi) dxi` at fixed `x`.
pub fn finite_part(sigma: &ClassicalSymbol, x: &[f64], integ: &Integrator, rho: f64) -> Result<FinitePart> {
    let dim = sigma.dim();
    if x.len() != dim {
        return Err(SymError::DimensionMismatch(dim, x.len()));
    }
    let mut est = Estimate::default();
    let mut compact = Estimate::default();
    let mut boundary: BTreeMap<u32, Complex64> = BTreeMap::new();
    let mut log = Complex64::zero();
    let s = rho.max(1.0);
    for (k, c) in sigma.terms() {
        let m = term_moment(k, dim);
        if m == 0.0 || k.is_uncut() {
            continue;
        }
        let w = to_c64(c) * m * XKey::of(k).eval(x);
        let r = radial_part(integ, k, dim, rho)?;
        est.add_product(w, r);
        let upper = if k.is_compact() { 1.0 } else { s };
        compact.add_product(w, integ.radial_integral(&k.cut, k.degree() + dim as i64 - 1, 0, 0.5, upper)?);
        let q = k.degree() + dim as i64;
        if !k.is_compact() && q.is_zero() {
            log += w;
        }
        if !k.is_compact() && !q.is_zero() {
            let i = (sigma.order() - k.degree()).to_integer() as u32;
            let qf = order_f64(q);
            *boundary.entry(i).or_default() += w * (-s.powf(qf) / qf);
        }
    }
    Ok(FinitePart {
        value: est.finish(),
        log_coefficient: log,
        per_degree_boundary: boundary,
        compact_part: compact.finish(),
    })
}

/// Coefficient of `log R`, read off the radial tails `r^(q-1)` with `q = 0`.
pub fn log_coefficient(sigma: &ClassicalSymbol, x: &[f64]) -> Result<Complex64> {
    if x.len() != sigma.dim() {
        return Err(SymError::DimensionMismatch(sigma.dim(), x.len()));
    }
    Ok(log_coefficient_exact(sigma).evaluate(x))
}

/// Exact channel of the log coefficient (the same map as the residue density).
pub fn log_coefficient_exact(sigma: &ClassicalSymbol) -> ExactDensity {
    let dim = sigma.dim();
    let mut d = ExactDensity::new(dim);
    for (k, c) in sigma.terms() {
        if k.is_uncut() || k.is_compact() || !(k.degree() + dim as i64).is_zero() {
            continue;
        }
        let m = monomial_moment(&k.xi[..dim]);
        d.add(XKey::of(k), c * real(m.coeff));
    }
    d
}

/// Cut-off integral `fp int_U int sigma dxi dx` with reference radius `rho`.
pub fn cutoff_integral_at(sigma: &ClassicalSymbol, integ: &Integrator, rho: f64) -> Result<Estimate> {
    sigma.require_windowed()?;
    let dim = sigma.dim();
    let mut est = Estimate::default();
    for (k, c) in sigma.terms() {
        if k.is_uncut() {
            continue;
        }
        let m = term_moment(k, dim);
        if m == 0.0 {
            continue;
        }
        let xr = integ.x_integral(k, dim)?;
        if xr.value == 0.0 && xr.error == 0.0 {
            continue;
        }
        let r = radial_part(integ, k, dim, rho)?;
        let c = to_c64(c) * m;
        est.value += c * xr.value * r.value;
        est.error += c.norm() * (xr.error * r.value.abs() + xr.value.abs() * r.error);
        est.scale += c.norm() * (xr.value * r.value).abs();
    }
    Ok(est.finish())
}

/// Cut-off integral with reference radius 1.
pub fn cutoff_integral(sigma: &ClassicalSymbol, integ: &Integrator) -> Result<Estimate> {
    cutoff_integral_at(sigma, integ, 1.0)
}

/// `fp int d_{xi_i} sigma` against the boundary flux of the degree `1-n` part.
#[derive(Clone, Debug)]
pub struct IbpCheck {
    pub lhs: Estimate,
    pub boundary: Estimate,
    pub boundary_exact: ExactDensity,
}

impl IbpCheck {
    pub fn defect(&self) -> Complex64 {
        self.lhs.value - self.boundary.value
    }

    pub fn budget(&self) -> f64 {
        self.lhs.diff_budget(&self.boundary)
    }
}

pub fn ibp_defect(sigma: &ClassicalSymbol, i: usize, integ: &Integrator) -> Result<IbpCheck> {
    if i >= sigma.dim() {
        return Err(SymError::DimensionMismatch(sigma.dim(), i + 1));
    }
    let lhs = cutoff_integral(&sigma.partial_xi(i), integ)?;
    let exact = flux_density_exact(sigma, i);
    let boundary = exact.integrate(integ)?;
    Ok(IbpCheck {
        lhs,
        boundary,
        boundary_exact: exact,
    })
}

/// Controls for the translated cut-off integral.
#[derive(Clone, Copy, Debug)]
pub struct TranslationControl {
    /// Target size of the neglected tail relative to `1 + scale`.
    pub remainder_tol: f64,
    /// Largest splitting radius tried.
    pub max_radius: f64,
    /// Extra expansion components allowed for the exterior before the
    /// splitting radius grows.
    pub extra_depth: u32,
}

impl Default for TranslationControl {
    fn default() -> Self {
        TranslationControl {
            remainder_tol: 1e-12,
            max_radius: 4096.0,
            extra_depth: 40,
        }
    }
}

/// `fp int sigma(x, xi + eta) dxi dx`, computed as a direct ball integral
/// of the exact translate inside `|xi| < R0` plus the finite part of the
/// homogeneous expansion outside.
pub fn translated_cutoff_integral(
    t: &Translated,
    integ: &Integrator,
    ctl: &TranslationControl,
) -> Result<(Estimate, f64)> {
    let sigma = &t.base;
    sigma.require_windowed()?;
    if t.is_identity() {
        return Ok((cutoff_integral(sigma, integ)?, 0.0));
    }
    check_remainder(t)?;
    let dim = sigma.dim();
    let remainder = |t: &Translated, r: f64| -> Result<f64> {
        let mut b = 0.0;
        for (k, c) in t.first_omitted.terms() {
            let q = order_f64(k.degree()) + dim as f64;
            let xr = integ.x_integral(&even_bound_key(k), dim)?;
            b += c.magnitude() * (xr.value.abs() + xr.error) * sphere_area(dim) * r.powf(q) / q.abs();
        }
        Ok(2.0 * b)
    };
    // Keep the ball small and deepen the exterior expansion instead: the
    // exterior finite part is exact, while a large ball would integrate
    // values of size R0^(m+n) that cancel against it.
    let scale_guess = sigma.magnitude().max(1.0);
    let mut r0 = 4.0 * (1.0 + t.eta_norm());
    let mut deep = t.clone();
    while remainder(&deep, r0)? > ctl.remainder_tol * scale_guess {
        if deep.depth < t.depth + ctl.extra_depth {
            deep = sigma.translate(&t.eta, deep.depth + 2)?;
        } else if r0 < ctl.max_radius {
            r0 *= 2.0;
        } else {
            break;
        }
    }
    let rem = remainder(&deep, r0)?;
    let t = &deep;

    let eta: Vec<f64> = t.eta.iter().map(big_to_f64).collect();
    let mut est = Estimate::default();
    // Ball part, grouped by x-part.
    let mut by_x: BTreeMap<XKey, Vec<(TermKey, Scalar)>> = BTreeMap::new();
    for (k, c) in sigma.terms() {
        by_x.entry(XKey::of(k)).or_default().push((k.clone(), c.clone()));
    }
    for (xk, group) in &by_x {
        let xr = integ.x_integral(&xk.as_term(), dim)?;
        if xr.value == 0.0 && xr.error == 0.0 {
            continue;
        }
        let f = |xi: &[f64]| -> Complex64 {
            let shifted: Vec<f64> = xi.iter().zip(&eta).map(|(a, e)| a + e).collect();
            let zero = vec![0.0; dim];
            group
                .iter()
                .map(|(k, c)| {
                    let mut k = k.clone();
                    k.x = [0; MAX_DIM];
                    k.window = Default::default();
                    to_c64(c) * k.eval(&zero, &shifted, Complex64::zero())
                })
                .sum()
        };
        let (re, im) = ball_integral(&f, dim, r0, &eta, &integ.spec)?;
        let ball = Estimate {
            value: Complex64::new(re.value, im.value),
            error: re.error + im.error,
            scale: re.value.abs() + im.value.abs(),
        };
        est.value += ball.value * xr.value;
        est.error += ball.error * xr.value.abs() + ball.value.norm() * xr.error;
        est.scale += ball.scale * xr.value.abs();
    }
    // Exterior finite part of the expansion.
    for (k, c) in t.expansion.terms() {
        let m = term_moment(k, dim);
        if m == 0.0 {
            continue;
        }
        let xr = integ.x_integral(k, dim)?;
        let q = k.degree() + dim as i64;
        let tail = if q.is_zero() {
            -r0.ln()
        } else {
            -r0.powf(order_f64(q)) / order_f64(q)
        };
        est.add_product(to_c64(c) * m * tail, xr);
    }
    let mut est = est.finish();
    est.error += rem;
    Ok((est, r0))
}

fn sphere_area(dim: usize) -> f64 {
    monomial_moment(&vec![0; dim]).value()
}

/// Key whose x-integral bounds `int |x-part|` up to the window.
fn even_bound_key(k: &TermKey) -> TermKey {
    let mut k = k.clone();
    for e in k.x.iter_mut() {
        if *e % 2 == 1 {
            *e -= 1;
        }
    }
    k
}

/// Radii where the integrand of the translated ball integral changes
/// character: the cut-off transition `|xi + eta| in [1/2, 1]` lies inside
/// `|xi| <= 1 + |eta|`, and beyond that a geometric grid suits power laws.
fn radial_breaks(eta_norm: f64, r0: f64) -> Vec<f64> {
    let r1 = 1.0 + eta_norm;
    let mut b = vec![0.0, 0.5 * r1, r1];
    let mut r = 2.0 * r1;
    while r < r0 {
        b.push(r);
        r *= 2.0;
    }
    b.push(r0);
    b.retain(|&t| t <= r0);
    b.dedup();
    b
}

/// Sum of adaptive integrals over consecutive break points.
fn quad_pieces<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<QuadResult> {
    let mut acc = QuadResult::default();
    for w in breaks.windows(2) {
        let r = radial_quad(&mut f, w[0], w[1], spec)?;
        acc.value += r.value;
        acc.error += r.error;
    }
    Ok(acc)
}

/// Integral of a complex function over the ball `|xi| < r0` in polar coordinates.
fn ball_integral<F: Fn(&[f64]) -> Complex64>(
    f: &F,
    dim: usize,
    r0: f64,
    eta: &[f64],
    spec: &QuadratureSpec,
) -> Result<(QuadResult, QuadResult)> {
    use std::f64::consts::PI;
    let eta_norm = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
    let radii = radial_breaks(eta_norm, r0);
    let part = |re: bool| -> Result<QuadResult> {
        let g = |v: Complex64| if re { v.re } else { v.im };
        match dim {
            1 => {
                let mut pts: Vec<f64> = radii.iter().flat_map(|&r| [r, -r]).collect();
                for d in [-1.0, -0.5, 0.5, 1.0] {
                    pts.push(d - eta[0]);
                }
                pts.retain(|t| t.abs() <= r0);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                quad_pieces(|t| g(f(&[t])), &pts, spec)
            }
            2 => nested_polar(
                &|r: f64, th: &[f64]| g(f(&[r * th[0].cos(), r * th[0].sin()])) * r,
                &[(0.0, 2.0 * PI)],
                &radii,
                spec,
            ),
            _ => nested_polar(
                &|r: f64, a: &[f64]| {
                    let (s, c) = a[0].sin_cos();
                    g(f(&[r * s * a[1].cos(), r * s * a[1].sin(), r * c])) * r * r * s
                },
                &[(0.0, PI), (0.0, 2.0 * PI)],
                &radii,
                spec,
            ),
        }
    };
    Ok((part(true)?, part(false)?))
}

fn nested_polar<G: Fn(f64, &[f64]) -> f64>(
    g: &G,
    ranges: &[(f64, f64)],
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let mut inner_err = 0.0f64;
    let mut failure = None;
    let r0 = *radii.last().expect("nonempty radii");
    let outer = quad_pieces(
        |r| match angular(g, r, ranges, &mut vec![0.0; ranges.len()], 0, spec) {
            Ok(q) => {
                inner_err = inner_err.max(q.error);
                q.value
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        radii,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QuadResult {
        value: outer.value,
        error: outer.error + r0 * inner_err,
    })
}

fn angular<G: Fn(f64, &[f64]) -> f64>(
    g: &G,
    r: f64,
    ranges: &[(f64, f64)],
    a: &mut Vec<f64>,
    level: usize,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let (lo, hi) = ranges[level];
    if level + 1 == ranges.len() {
        let mut b = a.clone();
        return radial_quad(
            |t| {
                b[level] = t;
                g(r, &b)
            },
            lo,
            hi,
            spec,
        );
    }
    let mut err = 0.0f64;
    let mut failure = None;
    let mut b = a.clone();
    let outer = radial_quad(
        |t| {
            b[level] = t;
            match angular(g, r, ranges, &mut b.clone(), level + 1, spec) {
                Ok(q) => {
                    err = err.max(q.error);
                    q.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QuadResult {
        value: outer.value,
        error: outer.error + (hi - lo) * err,
    })
}

/// `fp int sigma(x, xi + eta) - fp int sigma(x, xi)`, numerically.
#[derive(Clone, Debug)]
pub struct TranslationDefect {
    pub translated: Estimate,
    pub plain: Estimate,
    pub radius: f64,
}

impl TranslationDefect {
    pub fn value(&self) -> Complex64 {
        self.translated.value - self.plain.value
    }

    pub fn budget(&self) -> f64 {
        self.translated.diff_budget(&self.plain)
    }
}

pub fn translation_defect(
    sigma: &ClassicalSymbol,
    eta: &[BigRational],
    depth: u32,
    integ: &Integrator,
) -> Result<TranslationDefect> {
    let t = sigma.translate(eta, depth)?;
    let (translated, radius) = translated_cutoff_integral(&t, integ, &TranslationControl::default())?;
    let plain = cutoff_integral(sigma, integ)?;
    Ok(TranslationDefect {
        translated,
        plain,
        radius,
    })
}

/// Independent route to the translation defect:
/// `sum_{|alpha| >= 1} eta^alpha / alpha! fp int d_xi^alpha sigma`, where each
/// finite part of a derivative is an exact boundary flux.
pub fn translation_defect_taylor(sigma: &ClassicalSymbol, eta: &[BigRational]) -> Result<ExactDensity> {
    let dim = sigma.dim();
    if eta.len() != dim {
        return Err(SymError::DimensionMismatch(dim, eta.len()));
    }
    let mut out = ExactDensity::new(dim);
    let top = sigma.order() + dim as i64;
    if top < Order::from_integer(1) {
        return Ok(out);
    }
    let amax = top.floor().to_integer() as u32;
    let mut cache: BTreeMap<Vec<u32>, ClassicalSymbol> = BTreeMap::new();
    cache.insert(vec![0; dim], sigma.clone());
    for alpha in multi_indices(dim, amax) {
        let total: u32 = alpha.iter().sum();
        if total == 0 {
            continue;
        }
        let j = alpha.iter().position(|&a| a > 0).expect("nonzero index");
        let mut lower = alpha.clone();
        lower[j] -= 1;
        let base = derivative(&mut cache, &lower);
        let mut coeff = BigRational::from_integer(1.into());
        for i in 0..dim {
            coeff = coeff * eta[i].pow(alpha[i] as i32) / crate::scalar::factorial(alpha[i]);
        }
        if coeff.is_zero() {
            continue;
        }
        for (k, c) in flux_density_exact(&base, j).terms {
            out.add(k, c * real(coeff.clone()));
        }
    }
    Ok(out)
}

fn derivative(cache: &mut BTreeMap<Vec<u32>, ClassicalSymbol>, alpha: &[u32]) -> ClassicalSymbol {
    if let Some(s) = cache.get(alpha) {
        return s.clone();
    }
    let i = alpha.iter().position(|&a| a > 0).expect("nonzero index");
    let mut lower = alpha.to_vec();
    lower[i] -= 1;
    let s = derivative(cache, &lower).partial_xi(i);
    cache.insert(alpha.to_vec(), s.clone());
    s
}

impl<C: Coeff> Symbol<C> {
    /// True when no term has a degree `-n` homogeneous part.
    pub fn has_residue_degree(&self) -> bool {
        let target = Order::from_integer(-(self.dim() as i64));
        self.terms()
            .keys()
            .any(|k| !k.is_compact() && !k.is_uncut() && k.degree() == target)
    }
}
