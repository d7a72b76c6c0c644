//! Multilinear cochains on symbols and the cyclic operators acting on them.
//!
//! Evaluators take their arguments as a slice; operators wrap an inner
//! cochain and are themselves cochains, so `B`, `B0`, `b` compose freely.
//! Values carry the error budget of every quadrature they touch.

use std::fmt;

use num::complex::Complex64;
use num::Zero;

use crate::error::{Result, SymError};
use crate::forms::{cosphere_integral_exact, cutoff_integral_form, residue_form, xi_count, ClassicalForm};
use crate::quadrature::Integrator;
use crate::regint::{self, Estimate};
use crate::scalar::Order;
use crate::star::{star, star_above, theta, theta_above, truncation_depth_for};
use crate::symbol::ClassicalSymbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `res(a0 * da1 ^* ... ^* dak)`.
    Residue,
    /// Cosphere integral of the `(2n-1)`-form chain.
    Cosphere,
    /// Cut-off integral of the top-degree chain.
    Cutoff,
    /// `res(a0 * theta(a1, a2) * ... * theta(a_{2k-1}, a_2k))`.
    Phi,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Residue => "res",
            Flavor::Cosphere => "cosphere",
            Flavor::Cutoff => "cutoff",
            Flavor::Phi => "phi",
        })
    }
}

/// One evaluation, with everything needed to reproduce it.
#[derive(Clone, Debug)]
pub struct CochainEval {
    pub name: String,
    pub arity: usize,
    pub truncation: u32,
    pub value: Estimate,
}

pub trait Cochain: Sync {
    fn arity(&self) -> usize;
    fn name(&self) -> String;
    fn eval(&self, args: &[ClassicalSymbol]) -> Result<Estimate>;

    fn evaluate(&self, args: &[ClassicalSymbol]) -> Result<CochainEval> {
        Ok(CochainEval {
            name: self.name(),
            arity: self.arity(),
            truncation: self.truncation(),
            value: self.eval(args)?,
        })
    }

    fn truncation(&self) -> u32;
}

fn check_arity(expected: usize, args: &[ClassicalSymbol]) -> Result<()> {
    if args.len() != expected {
        return Err(SymError::Arity {
            expected,
            got: args.len(),
        });
    }
    Ok(())
}

fn total_order(args: &[ClassicalSymbol]) -> Order {
    args.iter().map(|a| a.order()).sum()
}

/// Star truncation at which the residue of a product chain of `args` is exact.
pub fn required_truncation(args: &[ClassicalSymbol]) -> u32 {
    match args.first() {
        Some(a) => truncation_depth_for(total_order(args), a.dim()),
        None => 0,
    }
}

/// `a0 * da1 ^* ... ^* dak`.
pub fn chain_form(args: &[ClassicalSymbol], k: u32) -> ClassicalForm {
    let mut w = ClassicalForm::function(&args[0]);
    for a in &args[1..] {
        w = w.wedge_star(&ClassicalForm::function(a).exterior_derivative(), k);
    }
    w
}

/// The homogeneous part of [`chain_form`] that can still reach degree
/// `-|J_xi|` in the final form: enough for residues and cosphere integrals.
pub fn chain_form_asymptotic(args: &[ClassicalSymbol], k: u32) -> ClassicalForm {
    let dim = args[0].dim();
    let mut rest: Order = total_order(&args[1..]);
    let floor0 = -rest;
    let mut w = ClassicalForm::function(&args[0].asymptotic_above(floor0));
    for a in &args[1..] {
        rest -= a.order();
        let r = rest;
        let floor = move |mask| -Order::from_integer(xi_count(mask, dim) as i64) - r;
        w = w.wedge_star_above(&ClassicalForm::function(a).exterior_derivative(), k, floor);
    }
    w
}

/// `a0 * theta(a1, a2) * ... * theta(a_{2k-1}, a_2k)`.
pub fn theta_chain(args: &[ClassicalSymbol], k: u32) -> ClassicalSymbol {
    let mut p = args[0].clone();
    for pair in args[1..].chunks(2) {
        p = star(&p, &theta(&pair[0], &pair[1], k), k);
    }
    p
}

/// Terms of [`theta_chain`] that can reach degree `-n`.
pub fn theta_chain_asymptotic(args: &[ClassicalSymbol], k: u32) -> ClassicalSymbol {
    let n = Order::from_integer(args[0].dim() as i64);
    let total = total_order(args);
    let mut rest = total - args[0].order();
    let mut p = args[0].asymptotic_above(-n - rest);
    for pair in args[1..].chunks(2) {
        let pair_order = pair[0].order() + pair[1].order();
        rest -= pair_order;
        let t = theta_above(&pair[0], &pair[1], k, -n - (total - pair_order));
        p = star_above(&p, &t, k, -n - rest);
    }
    p
}

/// The four basic cochains.
pub struct Evaluator<'a> {
    pub flavor: Flavor,
    pub arity: usize,
    pub truncation: u32,
    pub integ: &'a Integrator,
}

impl<'a> Evaluator<'a> {
    pub fn new(flavor: Flavor, arity: usize, truncation: u32, integ: &'a Integrator) -> Result<Self> {
        if arity == 0 || (flavor == Flavor::Phi && arity % 2 == 0) {
            return Err(SymError::Arity {
                expected: arity + 1,
                got: arity,
            });
        }
        Ok(Evaluator {
            flavor,
            arity,
            truncation,
            integ,
        })
    }
}

impl Cochain for Evaluator<'_> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn truncation(&self) -> u32 {
        self.truncation
    }

    fn name(&self) -> String {
        format!("{}_{}", self.flavor, self.arity - 1)
    }

    fn eval(&self, args: &[ClassicalSymbol]) -> Result<Estimate> {
        check_arity(self.arity, args)?;
        let n = args[0].dim();
        let k = self.arity - 1;
        if matches!(self.flavor, Flavor::Residue | Flavor::Phi) {
            let required = required_truncation(args);
            if self.truncation < required {
                return Err(SymError::InsufficientTruncation {
                    required,
                    got: self.truncation,
                });
            }
        }
        match self.flavor {
            Flavor::Residue => {
                if k != 2 * n {
                    return Ok(Estimate::default());
                }
                residue_form(&chain_form_asymptotic(args, self.truncation), self.integ)
            }
            Flavor::Cutoff => {
                if k != 2 * n {
                    return Ok(Estimate::default());
                }
                cutoff_integral_form(&chain_form(args, self.truncation), self.integ)
            }
            Flavor::Cosphere => {
                if k != 2 * n - 1 {
                    return Ok(Estimate::default());
                }
                let w = chain_form_asymptotic(args, self.truncation);
                w.require_windowed()?;
                cosphere_integral_exact(&w)?.integrate(self.integ)
            }
            Flavor::Phi => {
                let p = theta_chain_asymptotic(args, self.truncation);
                p.require_windowed()?;
                regint::residue(&p, self.integ)
            }
        }
    }
}

fn combine(terms: impl IntoIterator<Item = (f64, Estimate)>) -> Estimate {
    let mut acc = Estimate::default();
    for (s, e) in terms {
        acc.add_estimate(Complex64::new(s, 0.0), &e);
    }
    acc
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `B0 chi(a0..a_{m-1}) = chi(1, a0, ..) - (-1)^m chi(a0, .., 1)`.
pub struct B0<C>(pub C);

impl<C: Cochain> Cochain for B0<C> {
    fn arity(&self) -> usize {
        self.0.arity() - 1
    }

    fn truncation(&self) -> u32 {
        self.0.truncation()
    }

    fn name(&self) -> String {
        format!("B0({})", self.0.name())
    }

    fn eval(&self, args: &[ClassicalSymbol]) -> Result<Estimate> {
        let m = self.arity();
        check_arity(m, args)?;
        let one = ClassicalSymbol::one(args[0].dim());
        let mut lead = vec![one.clone()];
        lead.extend_from_slice(args);
        let mut trail = args.to_vec();
        trail.push(one);
        Ok(combine([(1.0, self.0.eval(&lead)?), (-sign(m), self.0.eval(&trail)?)]))
    }
}

/// Signed cyclic sum `A chi(a0..a_{m-1}) = sum_i (-1)^{(m-1) i} chi(a_i, .., a_{i-1})`.
pub struct Cyclic<C>(pub C);

impl<C: Cochain> Cochain for Cyclic<C> {
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn truncation(&self) -> u32 {
        self.0.truncation()
    }

    fn name(&self) -> String {
        format!("A({})", self.0.name())
    }

    fn eval(&self, args: &[ClassicalSymbol]) -> Result<Estimate> {
        let m = self.arity();
        check_arity(m, args)?;
        let mut terms = Vec::with_capacity(m);
        for i in 0..m {
            let rotated: Vec<ClassicalSymbol> = args[i..].iter().chain(&args[..i]).cloned().collect();
            terms.push((sign((m - 1) * i), self.0.eval(&rotated)?));
        }
        Ok(combine(terms))
    }
}

/// Connes' operator `B = A B0`.
pub fn operator_b<C: Cochain>(inner: C) -> Cyclic<B0<C>> {
    Cyclic(B0(inner))
}

/// Product used in the slots of a Hochschild coboundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Product {
    Star,
    Pointwise,
    /// Star in the two slots touching `a0`, pointwise elsewhere.
    Mixed,
}

/// `(b chi)(a0..a_m) = sum_{i<m} (-1)^i chi(.., a_i a_{i+1}, ..) + (-1)^m chi(a_m a0, ..)`.
pub struct Hochschild<C> {
    pub inner: C,
    pub product: Product,
}

impl<C: Cochain> Hochschild<C> {
    fn multiply(&self, a: &ClassicalSymbol, b: &ClassicalSymbol, star_slot: bool) -> ClassicalSymbol {
        match (self.product, star_slot) {
            (Product::Star, _) | (Product::Mixed, true) => star(a, b, self.inner.truncation()),
            _ => a.mul(b),
        }
    }
}

impl<C: Cochain> Cochain for Hochschild<C> {
    fn arity(&self) -> usize {
        self.inner.arity() + 1
    }

    fn truncation(&self) -> u32 {
        self.inner.truncation()
    }

    fn name(&self) -> String {
        let p = match self.product {
            Product::Star => "b*",
            Product::Pointwise => "b",
            Product::Mixed => "bbar",
        };
        format!("{p}({})", self.inner.name())
    }

    fn eval(&self, args: &[ClassicalSymbol]) -> Result<Estimate> {
        let total = self.arity();
        check_arity(total, args)?;
        let m = total - 1;
        let mut terms = Vec::with_capacity(total);
        for i in 0..m {
            let mut v: Vec<ClassicalSymbol> = args[..i].to_vec();
            v.push(self.multiply(&args[i], &args[i + 1], i == 0));
            v.extend_from_slice(&args[i + 2..]);
            terms.push((sign(i), self.inner.eval(&v)?));
        }
        let mut v = vec![self.multiply(&args[m], &args[0], true)];
        v.extend_from_slice(&args[1..m]);
        terms.push((sign(m), self.inner.eval(&v)?));
        Ok(combine(terms))
    }
}

/// Antisymmetrisation over all arguments but the first:
/// `sum_pi sgn(pi) chi(a0, a_pi(1), .., a_pi(k))`.
pub struct Antisym<C>(pub C);

fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn extend(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, f64)>) {
        if prefix.len() == k {
            let inversions = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), sign(inversions)));
            return;
        }
        for v in 0..k {
            if !prefix.contains(&v) {
                prefix.push(v);
                extend(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), k, &mut out);
    out
}

impl<C: Cochain> Cochain for Antisym<C> {
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn truncation(&self) -> u32 {
        self.0.truncation()
    }

    fn name(&self) -> String {
        format!("Alt({})", self.0.name())
    }

    fn eval(&self, args: &[ClassicalSymbol]) -> Result<Estimate> {
        check_arity(self.arity(), args)?;
        let mut terms = Vec::new();
        for (p, s) in permutations(args.len() - 1) {
            let mut v = vec![args[0].clone()];
            v.extend(p.iter().map(|&i| args[i + 1].clone()));
            terms.push((s, self.0.eval(&v)?));
        }
        Ok(combine(terms))
    }
}

/// Outcome of one trial of the theta comparison.
#[derive(Clone, Debug)]
pub struct RatioTrial {
    pub seed: u64,
    pub numerator: Estimate,
    pub denominator: Estimate,
    pub ratio: Option<Complex64>,
}

/// Candidate constants printed for the theta comparison at dimension `n`:
/// `(-i)^n / n!`, `(-1)^n / n!`, `i^n n!`.
pub fn theta_candidates(n: usize) -> [(String, Complex64); 3] {
    let fact: f64 = (1..=n).map(|v| v as f64).product();
    let mi = Complex64::new(0.0, -1.0).powu(n as u32);
    let pi = Complex64::new(0.0, 1.0).powu(n as u32);
    [
        ("(-i)^n/n!".to_string(), mi / fact),
        ("(-1)^n/n!".to_string(), Complex64::new(sign(n), 0.0) / fact),
        ("i^n n!".to_string(), pi * fact),
    ]
}

/// Relative spread `max |r - r_0| / |r_0|` of a ratio set.
pub fn relative_spread(ratios: &[Complex64]) -> f64 {
    match ratios.first() {
        None => 0.0,
        Some(r0) => ratios.iter().map(|r| (r - r0).norm()).fold(0.0, f64::max) / r0.norm(),
    }
}

/// Compare `chi^res_2n` with the antisymmetrised residue of the theta chain
/// on a tuple.
pub fn theta_ratio_trial(args: &[ClassicalSymbol], integ: &Integrator, seed: u64) -> Result<RatioTrial> {
    let n = args[0].dim();
    let k = required_truncation(args);
    let num = Evaluator::new(Flavor::Residue, 2 * n + 1, k, integ)?.eval(args)?;
    let den = Antisym(Evaluator::new(Flavor::Phi, 2 * n + 1, k, integ)?).eval(args)?;
    let significant = |e: &Estimate| e.value.norm() > 1e3 * e.error.max(f64::MIN_POSITIVE);
    let ratio = if significant(&den) && !num.value.is_zero() {
        Some(num.value / den.value)
    } else {
        None
    };
    Ok(RatioTrial {
        seed,
        numerator: num,
        denominator: den,
        ratio,
    })
}
