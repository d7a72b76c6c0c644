//! Numerical integration: adaptive Gauss–Legendre on intervals, tensor
//! products over the window box `[-1, 1]^n`, and exact monomial moments
//! over the unit sphere.

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::Mutex;

use gauss_quad::GaussLegendre;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::cutoff::{chi_product, window_product};
use crate::error::{Result, SymError};
use crate::scalar::{big_to_f64, factorial, order_f64, Order};
use crate::symbol::{Multiset, TermKey};

/// Quadrature controls shared by every numerical channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Target absolute error, relative to `max(1, integral of |f|)`.
    pub tol: f64,
    /// Maximum number of panel bisections per integral.
    pub max_subdiv: usize,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tol: 1e-13,
            max_subdiv: 4000,
            nodes: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SymError::QuadratureSpec(format!("tol must be positive, got {}", self.tol)));
        }
        if self.nodes < 2 || self.nodes > 100 {
            return Err(SymError::QuadratureSpec(format!(
                "nodes must lie in 2..=100, got {}",
                self.nodes
            )));
        }
        if self.max_subdiv == 0 {
            return Err(SymError::QuadratureSpec("max_subdiv must be positive".into()));
        }
        Ok(())
    }
}

/// A quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    abs: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rule(nodes: usize) -> GaussLegendre {
    GaussLegendre::new(nodes).expect("node count validated")
}

fn panel<F: FnMut(f64) -> f64>(gl: &GaussLegendre, f: &mut F, a: f64, b: f64) -> Panel {
    let m = 0.5 * (a + b);
    let (mut whole, mut left, mut right, mut abs) = (0.0, 0.0, 0.0, 0.0);
    let h = 0.5 * (b - a);
    let hl = 0.5 * (m - a);
    for (&t, &w) in gl.nodes().zip(gl.weights()) {
        whole += w * f(m + h * t);
        let fl = f(0.5 * (a + m) + hl * t);
        let fr = f(0.5 * (m + b) + hl * t);
        left += w * fl;
        right += w * fr;
        abs += w * (fl.abs() + fr.abs());
    }
    whole *= h;
    let value = (left + right) * hl;
    abs *= hl;
    Panel {
        a,
        b,
        value,
        abs,
        error: (value - whole).abs(),
    }
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Each panel is compared against its two halves; the worst panel is bisected
/// until the summed error estimate meets `spec.tol * max(1, int |f|)`, or
/// every panel is at the rounding floor.
pub fn radial_quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if a == b {
        return Ok(QuadResult::default());
    }
    let gl = rule(spec.nodes);
    let mut heap = BinaryHeap::new();
    heap.push(panel(&gl, &mut f, a, b));
    let mut splits = 0;
    loop {
        let (value, abs, error): (f64, f64, f64) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |acc, p| (acc.0 + p.value, acc.1 + p.abs, acc.2 + p.error));
        let floor = 64.0 * f64::EPSILON * abs;
        if error <= spec.tol * abs.max(1.0) || error <= floor {
            return Ok(QuadResult {
                value,
                error: error.max(floor),
            });
        }
        if splits >= spec.max_subdiv {
            return Err(SymError::Quadrature {
                tol: spec.tol,
                err: error,
                max_subdiv: spec.max_subdiv,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        if worst.error <= 64.0 * f64::EPSILON * worst.abs {
            // Largest error is already rounding; nothing left to refine.
            heap.push(worst);
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |acc, p| (acc.0 + p.value, acc.1 + p.error));
            return Ok(QuadResult { value, error });
        }
        let m = 0.5 * (worst.a + worst.b);
        heap.push(panel(&gl, &mut f, worst.a, m));
        heap.push(panel(&gl, &mut f, m, worst.b));
        splits += 1;
    }
}

/// Iterated adaptive integral of `g` over `[-1, 1]^dim`.
pub fn window_integrate<G: Fn(&[f64]) -> f64>(g: G, dim: usize, spec: &QuadratureSpec) -> Result<QuadResult> {
    crate::symbol::check_dim(dim)?;
    let mut x = vec![0.0; dim];
    nested(&g, &mut x, 0, spec)
}

fn nested<G: Fn(&[f64]) -> f64>(g: &G, x: &mut Vec<f64>, axis: usize, spec: &QuadratureSpec) -> Result<QuadResult> {
    let dim = x.len();
    if axis + 1 == dim {
        let mut y = x.clone();
        return radial_quad(
            |t| {
                y[axis] = t;
                g(&y)
            },
            -1.0,
            1.0,
            spec,
        );
    }
    let mut inner_err = 0.0f64;
    let mut failure = None;
    let mut y = x.clone();
    let outer = radial_quad(
        |t| {
            y[axis] = t;
            match nested(g, &mut y, axis + 1, spec) {
                Ok(r) => {
                    inner_err = inner_err.max(r.error);
                    r.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        -1.0,
        1.0,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QuadResult {
        value: outer.value,
        error: outer.error + 2.0 * inner_err,
    })
}

/// `int_{S^{n-1}} omega^alpha dS = coeff * pi^pi_power`, exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereMoment {
    pub coeff: BigRational,
    pub pi_power: u32,
}

impl SphereMoment {
    pub fn value(&self) -> f64 {
        big_to_f64(&self.coeff) * std::f64::consts::PI.powi(self.pi_power as i32)
    }
}

/// Every moment in dimension `n` is a rational multiple of `pi^(n/2)` (floor).
pub fn pi_power(dim: usize) -> u32 {
    (dim / 2) as u32
}

/// `Gamma(k + 1/2) / sqrt(pi) = (2k)! / (4^k k!)`.
fn gamma_half(k: u32) -> BigRational {
    factorial(2 * k) / (BigRational::from_integer(BigInt::from(4).pow(k)) * factorial(k))
}

/// Exact sphere moment `2 prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2)`;
/// zero when any exponent is odd. For `n = 1` this is `f(1) + f(-1)`.
pub fn monomial_moment(alpha: &[u16]) -> SphereMoment {
    let n = alpha.len();
    let pi_power = pi_power(n);
    if alpha.iter().any(|a| a % 2 == 1) {
        return SphereMoment {
            coeff: BigRational::zero(),
            pi_power,
        };
    }
    let mut num = BigRational::from_integer(BigInt::from(2));
    for &a in alpha {
        num *= gamma_half((a / 2) as u32);
    }
    let half_sum: u32 = alpha.iter().map(|&a| (a / 2) as u32).sum();
    // Gamma(K + n/2)
    let den = if n % 2 == 0 {
        factorial(half_sum + n as u32 / 2 - 1)
    } else {
        gamma_half(half_sum + (n as u32 - 1) / 2)
    };
    SphereMoment {
        coeff: num / den,
        pi_power,
    }
}

/// Numerical sphere integral of `f` over `S^{n-1}`, `n <= 3`.
pub fn sphere_quad<F: Fn(&[f64]) -> f64>(f: F, dim: usize, spec: &QuadratureSpec) -> Result<QuadResult> {
    use std::f64::consts::PI;
    match dim {
        1 => Ok(QuadResult {
            value: f(&[1.0]) + f(&[-1.0]),
            error: 0.0,
        }),
        2 => radial_quad(|t| f(&[t.cos(), t.sin()]), 0.0, 2.0 * PI, spec),
        3 => {
            let mut err = 0.0f64;
            let mut failure = None;
            let outer = radial_quad(
                |th: f64| {
                    let (s, c) = th.sin_cos();
                    match radial_quad(|ph: f64| f(&[s * ph.cos(), s * ph.sin(), c]), 0.0, 2.0 * PI, spec) {
                        Ok(r) => {
                            err = err.max(r.error);
                            r.value * s
                        }
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    }
                },
                0.0,
                PI,
                spec,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(QuadResult {
                value: outer.value,
                error: outer.error + PI * err,
            })
        }
        d => Err(SymError::Dimension(d)),
    }
}

type RadialKey = (Multiset, Order, u32, u64, u64);

/// Memoised separable integrals used by the cut-off integral.
///
/// Values depend only on their keys, so caching never changes results.
pub struct Integrator {
    pub spec: QuadratureSpec,
    axis: Mutex<HashMap<(u16, Multiset), QuadResult>>,
    radial: Mutex<BTreeMap<RadialKey, QuadResult>>,
}

impl Integrator {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Integrator {
            spec,
            axis: Mutex::new(HashMap::new()),
            radial: Mutex::new(BTreeMap::new()),
        })
    }

    /// `int_{-1}^{1} x^e prod_{k in w} psi^(k)(1 - x^2) dx`.
    pub fn axis_integral(&self, e: u16, w: &Multiset) -> Result<QuadResult> {
        if e % 2 == 1 {
            return Ok(QuadResult::default());
        }
        if let Some(r) = self.axis.lock().unwrap().get(&(e, w.clone())) {
            return Ok(*r);
        }
        let r = radial_quad(|x| x.powi(e as i32) * window_product(x, w), 0.0, 1.0, &self.spec)?;
        let r = QuadResult {
            value: 2.0 * r.value,
            error: 2.0 * r.error,
        };
        self.axis.lock().unwrap().insert((e, w.clone()), r);
        Ok(r)
    }

    /// Integral of the x-part of `key` over `[-1, 1]^dim`.
    pub fn x_integral(&self, key: &TermKey, dim: usize) -> Result<QuadResult> {
        let mut vals = Vec::with_capacity(dim);
        for i in 0..dim {
            let r = self.axis_integral(key.x[i], &key.window[i])?;
            if r.value == 0.0 && r.error == 0.0 {
                return Ok(QuadResult::default());
            }
            vals.push(r);
        }
        let value: f64 = vals.iter().map(|r| r.value).product();
        let mut error = 0.0;
        for i in 0..dim {
            error += vals[i].error
                * vals
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != i)
                    .map(|(_, r)| r.value.abs())
                    .product::<f64>();
        }
        Ok(QuadResult { value, error })
    }

    /// `int_a^b prod_{k in cut} chi^(k)(r) r^p (log r)^j / j! dr`.
    pub fn radial_integral(&self, cut: &Multiset, p: Order, j: u32, a: f64, b: f64) -> Result<QuadResult> {
        let key = (cut.clone(), p, j, a.to_bits(), b.to_bits());
        if let Some(r) = self.radial.lock().unwrap().get(&key) {
            return Ok(*r);
        }
        let pf = order_f64(p);
        let jf = big_to_f64(&factorial(j));
        let r = radial_quad(
            |r| chi_product(r, cut) * r.powf(pf) * r.ln().powi(j as i32) / jf,
            a,
            b,
            &self.spec,
        )?;
        self.radial.lock().unwrap().insert(key, r);
        Ok(r)
    }
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::new(QuadratureSpec::default()).expect("default spec is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::big;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_integrals() {
        let s = QuadratureSpec::default();
        let r = radial_quad(|x| x.exp(), 0.0, 1.0, &s).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::E - 1.0, epsilon = 1e-14);
        let r = radial_quad(|x| 1.0 / x, 1.0, 2.0, &s).unwrap();
        assert_relative_eq!(r.value, 2f64.ln(), epsilon = 1e-14);
        let r = radial_quad(|x| x.sqrt(), 0.0, 1.0, &s).unwrap();
        assert_relative_eq!(r.value, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_spec() {
        let s = QuadratureSpec {
            nodes: 1,
            ..Default::default()
        };
        assert!(radial_quad(|x| x, 0.0, 1.0, &s).is_err());
        let s = QuadratureSpec {
            tol: 1e-300,
            max_subdiv: 3,
            nodes: 2,
        };
        assert!(matches!(
            radial_quad(|x: f64| x.abs().sqrt(), -1.0, 1.0, &s),
            Err(SymError::Quadrature { .. })
        ));
    }

    #[test]
    fn moments_match_known_values() {
        assert_eq!(monomial_moment(&[0]).coeff, big(2, 1));
        assert_eq!(monomial_moment(&[4]).coeff, big(2, 1));
        assert_eq!(monomial_moment(&[1]).coeff, BigRational::zero());
        // |S^1| = 2 pi, int cos^2 = pi
        assert_eq!(monomial_moment(&[0, 0]), SphereMoment { coeff: big(2, 1), pi_power: 1 });
        assert_eq!(monomial_moment(&[2, 0]).coeff, big(1, 1));
        // |S^2| = 4 pi, int z^2 = 4 pi / 3
        assert_eq!(monomial_moment(&[0, 0, 0]).coeff, big(4, 1));
        assert_eq!(monomial_moment(&[0, 0, 2]).coeff, big(4, 3));
    }

    #[test]
    fn moments_match_sphere_quadrature() {
        let s = QuadratureSpec::default();
        for alpha in [[2u16, 4, 0], [0, 2, 2], [4, 0, 2], [2, 2, 2], [6, 0, 0]] {
            let m = monomial_moment(&alpha);
            let r = sphere_quad(
                |w| w.iter().zip(&alpha).map(|(x, &a)| x.powi(a as i32)).product(),
                3,
                &s,
            )
            .unwrap();
            assert_relative_eq!(m.value(), r.value, epsilon = 1e-12);
        }
        for alpha in [[2u16, 4], [0, 6], [8, 2]] {
            let m = monomial_moment(&alpha);
            let r = sphere_quad(
                |w| w.iter().zip(&alpha).map(|(x, &a)| x.powi(a as i32)).product(),
                2,
                &s,
            )
            .unwrap();
            assert_relative_eq!(m.value(), r.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn moment_trace_identity() {
        // sum_i M(alpha + 2 e_i) = M(alpha), since |omega|^2 = 1.
        for alpha in [[0u16, 0, 0], [2, 0, 4], [2, 2, 2], [6, 0, 2]] {
            for n in 1..=3 {
                let a = &alpha[..n];
                let mut acc = BigRational::zero();
                for i in 0..n {
                    let mut b = a.to_vec();
                    b[i] += 2;
                    acc += monomial_moment(&b).coeff;
                }
                assert_eq!(acc, monomial_moment(a).coeff);
            }
        }
    }

    #[test]
    fn window_box_integral() {
        let s = QuadratureSpec {
            tol: 1e-11,
            ..Default::default()
        };
        let it = Integrator::new(s).unwrap();
        let w: Multiset = smallvec::smallvec![0];
        let a = it.axis_integral(2, &w).unwrap().value;
        let b = it.axis_integral(0, &w).unwrap().value;
        let r = window_integrate(
            |x| x[0] * x[0] * window_product(x[0], &w) * window_product(x[1], &w),
            2,
            &s,
        )
        .unwrap();
        assert_relative_eq!(r.value, a * b, epsilon = 1e-10);
    }
}
