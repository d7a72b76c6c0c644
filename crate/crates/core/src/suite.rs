//! Named identity suites and their machine-readable reports.
//!
//! A suite turns a [`RunConfig`] into a list of [`Check`]s. The report
//! payload (config, checks, verdict) is deterministic for a given config and
//! is hashed with SHA-256; wall-clock timing is kept outside the payload.

use std::collections::BTreeMap;
use std::time::Instant;

use num::complex::Complex64;
use num::rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cochain::{
    operator_b, relative_spread, required_truncation, theta_candidates, theta_ratio_trial, Cochain, Evaluator, Flavor,
    Hochschild, Product, B0,
};
use crate::error::{Result, SymError};
use crate::forms::{residue_form, stokes_boundary};
use crate::holo::{complex_residue_identity_defect, complex_residue_identity_defect_form, meromorphic_stokes_defect, HoloSymbolFamily};
use crate::quadrature::{Integrator, QuadratureSpec};
use crate::random::{random_form_seeded, random_symbol_seeded, rng, SymbolShape};
use crate::regint::{
    cutoff_integral, cutoff_integral_at, finite_part, ibp_defect, log_coefficient, log_coefficient_exact, residue, residue_density,
    residue_density_exact, translation_defect, Estimate,
};
use crate::scalar::{fmt_order, q, rat, Order, Scalar};
use crate::star::{commutator, residue_truncation_depth, star};
use crate::symbol::ClassicalSymbol;

/// Absolute floor added to computed error budgets, for values that are
/// rounding-level zeros.
pub const BUDGET_FLOOR: f64 = 1e-12;

pub const SUITES: &[&str] = &[
    "stokes-res",
    "trace",
    "fp-log",
    "rescale",
    "cutoff-stokes",
    "ibp-translation",
    "complex-residue",
    "mero-stokes",
    "cochain",
    "b-star",
    "b0-cutoff",
    "bB-phi",
    "theta-ratio",
    "all",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Restrict suites to one base dimension; `None` runs each suite's
    /// default dimensions.
    pub dim: Option<usize>,
    /// Star truncation override; never below the residue threshold.
    pub truncation: Option<u32>,
    pub quadrature: QuadratureSpec,
    /// Per-suite tolerance overrides, keyed by suite name.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    /// Extra reference radius for the rescaling suite.
    pub lambda: Option<f64>,
    /// Trial count override.
    pub trials: Option<usize>,
    pub json_out: Option<String>,
    pub csv_out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: None,
            truncation: None,
            quadrature: QuadratureSpec {
                tol: 1e-12,
                ..Default::default()
            },
            tolerances: BTreeMap::new(),
            seed: 42,
            lambda: None,
            trials: None,
            json_out: None,
            csv_out: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub values: BTreeMap<String, f64>,
    /// The residual that is compared.
    pub residual: f64,
    /// Computed numerical error budget of the residual.
    pub budget: f64,
    /// Threshold actually applied.
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: String, residual: f64, budget: f64, tolerance: f64) -> Self {
        Check {
            name,
            values: BTreeMap::new(),
            residual,
            budget,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn with_c(self, key: &str, v: Complex64) -> Self {
        self.with(&format!("{key}.re"), v.re).with(&format!("{key}.im"), v.im)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    /// Free-form findings such as measured constants.
    pub notes: BTreeMap<String, String>,
    pub pass: bool,
    pub elapsed_ms: u128,
}

impl Report {
    /// Everything except timing.
    pub fn payload(&self) -> Value {
        json!({
            "suite": self.suite,
            "config": self.config,
            "checks": self.checks,
            "notes": self.notes,
            "pass": self.pass,
            "passed": self.checks.iter().filter(|c| c.pass).count(),
            "total": self.checks.len(),
        })
    }

    pub fn payload_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.payload()).expect("payload serialises");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "payload": self.payload(),
            "sha256": self.payload_hash(),
            "timing": {"elapsed_ms": self.elapsed_ms as u64},
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,residual,budget,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!("{},{:e},{:e},{:e},{}\n", c.name, c.residual, c.budget, c.tolerance, c.pass));
        }
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Deterministic per-case seed.
fn case_seed(base: u64, tag: &str, i: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ base.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (i as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    integ: Integrator,
    checks: Vec<Check>,
    notes: BTreeMap<String, String>,
}

impl Ctx<'_> {
    fn dims(&self, default: &[usize]) -> Vec<usize> {
        match self.cfg.dim {
            Some(d) => vec![d],
            None => default.to_vec(),
        }
    }

    fn trials(&self, default: usize) -> usize {
        self.cfg.trials.unwrap_or(default)
    }

    fn tol(&self, suite: &str, default: f64) -> f64 {
        self.cfg.tolerances.get(suite).copied().unwrap_or(default)
    }

    fn truncation(&self, required: u32) -> Result<u32> {
        match self.cfg.truncation {
            Some(k) if k < required => Err(SymError::InsufficientTruncation { required, got: k }),
            Some(k) => Ok(k),
            None => Ok(required),
        }
    }
}

const INTEGER_ORDERS: [(i64, i64); 4] = [(0, 1), (1, 1), (-1, 1), (2, 1)];
const FRACTIONAL_ORDERS: [(i64, i64); 4] = [(1, 2), (-1, 3), (2, 3), (-3, 2)];

fn integer_order(i: usize) -> Order {
    let (p, d) = INTEGER_ORDERS[i % INTEGER_ORDERS.len()];
    q(p, d)
}

fn fractional_order(i: usize) -> Order {
    let (p, d) = FRACTIONAL_ORDERS[i % FRACTIONAL_ORDERS.len()];
    q(p, d)
}

fn shape(dim: usize, order: Order, depth: u32) -> SymbolShape {
    SymbolShape {
        max_poly_degree: if dim > 1 { 1 } else { 2 },
        ..SymbolShape::new(dim, order, depth)
    }
}

/// Split `n` trials over `dims`, the first dimension taking the remainder.
fn per_dim(n: usize, dims: &[usize], weights: &[usize]) -> Vec<(usize, usize)> {
    let total: usize = weights.iter().take(dims.len()).sum();
    let mut out: Vec<(usize, usize)> = dims
        .iter()
        .zip(weights)
        .map(|(&d, &w)| (d, n * w / total.max(1)))
        .collect();
    let assigned: usize = out.iter().map(|p| p.1).sum();
    if let Some(first) = out.first_mut() {
        first.1 += n - assigned;
    }
    out
}

fn stokes_res(cx: &mut Ctx) -> Result<()> {
    let tol = cx.tol("stokes-res", 1e-8);
    let n = cx.trials(60);
    for (dim, count) in per_dim(n, &cx.dims(&[1, 2]), &[5, 1]) {
        for i in 0..count {
            let order = if i % 2 == 0 { integer_order(i / 2) } else { fractional_order(i / 2) };
            let seed = case_seed(cx.cfg.seed, "stokes-res", dim * 1000 + i);
            let beta = random_form_seeded(&shape(dim, order, 2), 2 * dim - 1, seed);
            let r = residue_form(&beta.exterior_derivative(), &cx.integ)?;
            let c = Check::new(format!("stokes-res/n{dim}/{i}"), r.value.norm(), r.error, tol * (1.0 + r.scale))
                .with("scale", r.scale);
            cx.checks.push(c);
        }
    }
    Ok(())
}

fn trace(cx: &mut Ctx) -> Result<()> {
    let cap = cx.tol("trace", 1e-8);
    let n = cx.trials(30);
    let pairs = [(q(0, 1), q(1, 1)), (q(1, 1), q(-1, 1)), (q(1, 2), q(1, 2)), (q(1, 1), q(1, 1)), (q(-1, 2), q(1, 2))];
    for (dim, count) in per_dim(n, &cx.dims(&[1, 2]), &[2, 1]) {
        for i in 0..count {
            let (m1, m2) = pairs[i % pairs.len()];
            let seed = case_seed(cx.cfg.seed, "trace", dim * 1000 + i);
            let a = random_symbol_seeded(&shape(dim, m1, 2), seed);
            let b = random_symbol_seeded(&shape(dim, m2, 2), seed ^ 1);
            let k = cx.truncation(residue_truncation_depth(m1, m2, dim))?;
            let r = residue(&commutator(&a, &b, k), &cx.integ)?;
            let prod = residue(&star(&a, &b, k), &cx.integ)?;
            let budget = r.error + BUDGET_FLOOR;
            let mut c = Check::new(format!("trace/n{dim}/{i}"), r.value.norm(), r.error, budget.min(cap))
                .with("K", k as f64)
                .with("res_product", prod.value.norm());
            c.pass &= budget <= cap;
            cx.checks.push(c);
        }
    }
    Ok(())
}

fn fp_log(cx: &mut Ctx) -> Result<()> {
    let n = cx.trials(20);
    for i in 0..n {
        let dim = cx.cfg.dim.unwrap_or(1 + i % 3);
        let order = if i % 4 == 3 { fractional_order(i) } else { q(-(dim as i64) + (i % 3) as i64, 1) };
        let seed = case_seed(cx.cfg.seed, "fp-log", i);
        let sigma = random_symbol_seeded(&shape(dim, order, 2), seed);
        let exact_equal = log_coefficient_exact(&sigma) == residue_density_exact(&sigma);
        let mut r = rng(seed);
        let mut worst = 0.0f64;
        let mut magnitude = 0.0f64;
        for _ in 0..20 {
            let x: Vec<f64> = (0..dim).map(|_| rand::Rng::gen_range(&mut r, -1.0..1.0)).collect();
            let a = finite_part(&sigma, &x, &cx.integ, 1.0)?.log_coefficient;
            let b = residue_density(&sigma, &x)?;
            worst = worst.max((a - b).norm()).max((log_coefficient(&sigma, &x)? - b).norm());
            magnitude = magnitude.max(b.norm());
        }
        let residual = if exact_equal { worst } else { f64::INFINITY };
        // The quadrature-free channels agree up to summation order.
        let c = Check::new(format!("fp-log/n{dim}/{i}"), residual, 0.0, 1e-14 * (1.0 + magnitude))
            .with("exact_channel_equal", exact_equal as u8 as f64)
            .with("max_density", magnitude);
        cx.checks.push(c);
    }
    Ok(())
}

fn rescale(cx: &mut Ctx) -> Result<()> {
    let mut lambdas = vec![0.5, 2.0];
    if let Some(l) = cx.cfg.lambda {
        lambdas.push(l);
    }
    let n = cx.trials(20);
    let mut nonzero = 0;
    for i in 0..n {
        let dim = cx.cfg.dim.unwrap_or(1 + (i / 2) % 2);
        let integer = i % 2 == 1;
        let order = if integer { q(1 - dim as i64, 1) + integer_order(i / 2) } else { fractional_order(i / 2) };
        let seed = case_seed(cx.cfg.seed, "rescale", i);
        let sigma = random_symbol_seeded(&shape(dim, order, 2), seed);
        let base = cutoff_integral(&sigma, &cx.integ)?;
        let res = residue(&sigma, &cx.integ)?;
        if res.value.norm() > 1e-6 {
            nonzero += 1;
        }
        for &l in &lambdas {
            let shifted = cutoff_integral_at(&sigma, &cx.integ, l)?;
            let expect = if integer { res.value * l.ln() } else { Complex64::new(0.0, 0.0) };
            let residual = (shifted.value - base.value - expect).norm();
            let (tol, kind) = if integer {
                (cx.tol("rescale", 1e-8), "int")
            } else {
                (cx.tol("rescale", 1e-10), "frac")
            };
            let c = Check::new(format!("rescale/{kind}/n{dim}/{i}/lambda={l}"), residual, shifted.diff_budget(&base), tol)
                .with_c("residue", res.value);
            cx.checks.push(c);
        }
    }
    let mut c = Check::new("rescale/nonzero-residues".into(), 0.0, 0.0, 0.0).with("count", nonzero as f64);
    c.pass = nonzero >= 1;
    cx.checks.push(c);
    Ok(())
}

fn cutoff_stokes(cx: &mut Ctx) -> Result<()> {
    let tol = cx.tol("cutoff-stokes", 1e-8);
    let n = cx.trials(20);
    let mut nonzero = 0;
    for integer in [false, true] {
        for i in 0..n {
            let dim = cx.cfg.dim.unwrap_or(if i % 4 == 3 { 2 } else { 1 });
            let order = if integer { integer_order(i) } else { fractional_order(i) };
            let seed = case_seed(cx.cfg.seed, if integer { "cutoff-stokes/int" } else { "cutoff-stokes/frac" }, i);
            let beta = random_form_seeded(&shape(dim, order, 2), 2 * dim - 1, seed);
            let s = stokes_boundary(&beta, &cx.integ)?;
            let (name, residual, budget) = if integer {
                if s.boundary.value.norm() > 1e-6 {
                    nonzero += 1;
                }
                ("int", s.residual().norm(), s.budget())
            } else {
                ("frac", s.defect.value.norm(), s.defect.error)
            };
            let c = Check::new(format!("cutoff-stokes/{name}/n{dim}/{i}"), residual, budget, tol)
                .with_c("defect", s.defect.value)
                .with_c("boundary", s.boundary.value);
            cx.checks.push(c);
        }
    }
    cx.notes.insert("cutoff-stokes.nonzero_boundaries".into(), format!("{nonzero}/{n}"));
    Ok(())
}

fn ibp_translation(cx: &mut Ctx) -> Result<()> {
    let n = cx.trials(10);
    let ibp_tol = cx.tol("ibp-translation", 1e-8);
    let tr_tol = cx.tol("ibp-translation", 1e-7);
    for i in 0..n {
        let dim = cx.cfg.dim.unwrap_or(if i % 5 == 4 { 2 } else { 1 });
        let order = fractional_order(i);
        let seed = case_seed(cx.cfg.seed, "ibp-translation", i);
        let sigma = random_symbol_seeded(&shape(dim, order, 2), seed);
        for j in 0..dim {
            let c = ibp_defect(&sigma, j, &cx.integ)?;
            cx.checks.push(
                Check::new(format!("ibp/n{dim}/{i}/xi{}", j + 1), c.lhs.value.norm(), c.lhs.error, ibp_tol)
                    .with_c("boundary", c.boundary.value),
            );
        }
        let eta = vec![BigRational::new(1.into(), 2.into()); dim];
        let t = translation_defect(&sigma, &eta, 6, &cx.integ)?;
        cx.checks.push(
            Check::new(format!("translation/n{dim}/{i}"), t.value().norm(), t.budget(), tr_tol)
                .with("radius", t.radius)
                .with_c("plain", t.plain.value),
        );
    }
    Ok(())
}

fn prefactor(i: usize) -> Vec<Scalar> {
    match i % 3 {
        0 => vec![],
        1 => vec![rat(1, 1), rat(1, 1)],
        _ => vec![rat(1, 1), rat(-2, 3), rat(1, 5)],
    }
}

fn complex_residue(cx: &mut Ctx) -> Result<()> {
    let tol = cx.tol("complex-residue", 1e-9);
    let n = cx.trials(20);
    for i in 0..n {
        let dim = cx.cfg.dim.unwrap_or(1 + i % 2);
        let order = if i % 3 == 2 { fractional_order(i) } else { q(1 - dim as i64 - (i % 2) as i64, 1) };
        let seed = case_seed(cx.cfg.seed, "complex-residue", i);
        let sigma = random_symbol_seeded(&shape(dim, order, 2), seed);
        let fam = HoloSymbolFamily::riesz(&sigma, &prefactor(i))?;
        let c = complex_residue_identity_defect(&fam, &cx.integ)?;
        cx.checks.push(
            Check::new(format!("complex-residue/symbol/n{dim}/{i}"), c.defect(), c.budget, tol)
                .with_c("residue", c.predicted.value),
        );
    }
    for i in 0..n.div_ceil(2) {
        let dim = cx.cfg.dim.unwrap_or(1 + i % 2);
        let seed = case_seed(cx.cfg.seed, "complex-residue/form", i);
        let w = random_form_seeded(&shape(dim, q(dim as i64 - 1, 1) - (i % 2) as i64, 1), 2 * dim, seed);
        let c = complex_residue_identity_defect_form(&w, &prefactor(i), &cx.integ)?;
        cx.checks.push(
            Check::new(format!("complex-residue/form/n{dim}/{i}"), c.defect(), c.budget, tol)
                .with_c("residue", c.predicted.value),
        );
    }
    Ok(())
}

fn mero_stokes(cx: &mut Ctx) -> Result<()> {
    let tol = cx.tol("mero-stokes", 1e-8);
    let n = cx.trials(20);
    let mut plain_nonzero = 0;
    for i in 0..n {
        let dim = cx.cfg.dim.unwrap_or(if i % 4 == 3 { 2 } else { 1 });
        let order = if i % 2 == 0 { integer_order(i / 2) } else { fractional_order(i / 2) };
        let seed = case_seed(cx.cfg.seed, "mero-stokes", i);
        let beta = random_form_seeded(&shape(dim, order, 2), 2 * dim - 1, seed);
        let g = meromorphic_stokes_defect(&beta, &prefactor(i), 3, &cx.integ)?;
        let plain = stokes_boundary(&beta, &cx.integ)?.defect.value;
        if plain.norm() > 1e-6 {
            plain_nonzero += 1;
        }
        let c = Check::new(format!("mero-stokes/n{dim}/{i}/{}", fmt_order(order)), g.max_abs(), g.error, tol)
            .with("pole_order", g.pole_order() as f64)
            .with_c("plain_defect", plain);
        cx.checks.push(c);
    }
    let mut c = Check::new("mero-stokes/includes-nonzero-plain-defect".into(), 0.0, 0.0, 0.0)
        .with("count", plain_nonzero as f64);
    c.pass = plain_nonzero > 0;
    cx.checks.push(c);
    Ok(())
}

/// One-dimensional arguments for the cochain suites; `ones` slots have
/// order 1, the rest order 0.
fn cochain_args(seed: u64, count: usize, ones: usize) -> Vec<ClassicalSymbol> {
    (0..count)
        .map(|i| {
            let order = if (i + seed as usize) % count < ones { q(1, 1) } else { q(0, 1) };
            let sh = SymbolShape {
                max_poly_degree: 1,
                ..SymbolShape::new(1, order, 1)
            };
            random_symbol_seeded(&sh, seed.wrapping_add(i as u64 * 7919))
        })
        .collect()
}

fn budget_check(name: String, e: &Estimate) -> Check {
    Check::new(name, e.value.norm(), e.error, e.error + BUDGET_FLOOR)
}

fn cochain_suite(cx: &mut Ctx, which: &str) -> Result<()> {
    let n = cx.trials(10);
    let integ = &cx.integ;
    let mut checks = Vec::new();
    let all = which == "cochain";
    for t in 0..n {
        let seed = case_seed(cx.cfg.seed, "cochain", t);
        if all || which == "b0-cutoff" {
            // Orders (0, 0) or (1, -1): integer total order, so psi can be nonzero.
            let mut a = cochain_args(seed, 2, t % 2);
            if t % 2 == 1 {
                let sh = SymbolShape {
                    max_poly_degree: 1,
                    ..SymbolShape::new(1, q(-1, 1), 1)
                };
                a = vec![a.iter().find(|s| s.order() == q(1, 1)).expect("one order-1 slot").clone(), random_symbol_seeded(&sh, seed ^ 3)];
            }
            let k = cx.cfg.truncation.unwrap_or(2);
            let lhs = B0(Evaluator::new(Flavor::Cutoff, 3, k, integ)?).eval(&a)?;
            let rhs = Evaluator::new(Flavor::Cosphere, 2, k, integ)?.eval(&a)?;
            let tol = cx.cfg.tolerances.get("b0-cutoff").copied().unwrap_or(1e-8);
            checks.push(
                Check::new(format!("b0-cutoff/{t}"), (lhs.value - rhs.value).norm(), lhs.diff_budget(&rhs), tol)
                    .with_c("psi", rhs.value),
            );
        }
        if all || which == "b-star" {
            let a = cochain_args(seed, 4, 1);
            let k = cx.truncation(required_truncation(&a))?;
            let b = Hochschild {
                inner: Evaluator::new(Flavor::Residue, 3, k, integ)?,
                product: Product::Star,
            };
            checks.push(budget_check(format!("b-star/res/{t}"), &b.eval(&a)?));
            let tau = Hochschild {
                inner: Evaluator::new(Flavor::Phi, 1, k, integ)?,
                product: Product::Star,
            };
            checks.push(budget_check(format!("b-star/trace/{t}"), &tau.eval(&a[..2])?));
        }
        if all {
            let a = cochain_args(seed, 3, 1);
            let k = cx.truncation(required_truncation(&a))?;
            let chi = Evaluator::new(Flavor::Residue, 3, k, integ)?;
            let v = chi.eval(&a)?;
            let rot = chi.eval(&[a[2].clone(), a[0].clone(), a[1].clone()])?;
            let mut cyc = v;
            cyc.add_estimate(Complex64::new(-1.0, 0.0), &rot);
            checks.push(budget_check(format!("res-cyclic/{t}"), &cyc).with_c("chi", v.value));
            let mut unit = a.clone();
            unit[0] = ClassicalSymbol::one(1);
            checks.push(budget_check(format!("res-unit/{t}"), &chi.eval(&unit)?));
            let bb = operator_b(Evaluator::new(Flavor::Residue, 3, k, integ)?);
            checks.push(budget_check(format!("res-B/{t}"), &bb.eval(&a[..2])?));
            let a4 = cochain_args(seed, 4, 2);
            let k4 = cx.truncation(required_truncation(&a4))?;
            let b2 = operator_b(operator_b(Evaluator::new(Flavor::Phi, 5, k4, integ)?));
            checks.push(budget_check(format!("B-squared/{t}"), &b2.eval(&a4[..3])?));
        }
        if all || which == "bB-phi" {
            let a = cochain_args(seed, 4, 2);
            let k = cx.truncation(required_truncation(&a))?;
            let bphi = Hochschild {
                inner: Evaluator::new(Flavor::Phi, 3, k, integ)?,
                product: Product::Pointwise,
            }
            .eval(&a)?;
            let big = operator_b(Evaluator::new(Flavor::Phi, 5, k, integ)?).eval(&a)?;
            let mut r = bphi;
            r.add_estimate(Complex64::new(0.5, 0.0), &big);
            checks.push(budget_check(format!("bB-phi/{t}"), &r).with_c("B_phi4", big.value));
            let bbar = Hochschild {
                inner: Evaluator::new(Flavor::Phi, 3, k, integ)?,
                product: Product::Mixed,
            }
            .eval(&a)?;
            checks.push(budget_check(format!("bbar-phi2/{t}"), &bbar));
        }
    }
    cx.checks.extend(checks);
    Ok(())
}

fn theta_ratio(cx: &mut Ctx) -> Result<()> {
    let n = cx.trials(12);
    let dim = cx.cfg.dim.unwrap_or(1);
    let mut ratios = Vec::new();
    let mut t = 0;
    // Draw until enough admissible trials, with a hard cap.
    while ratios.len() < n && t < 4 * n {
        let seed = case_seed(cx.cfg.seed, "theta-ratio", t);
        let args: Vec<ClassicalSymbol> = (0..2 * dim + 1)
            .map(|i| {
                let order = if i == t % (2 * dim + 1) { q(1, 1) } else { q(0, 1) };
                let sh = SymbolShape {
                    max_poly_degree: 1,
                    ..SymbolShape::new(dim, order, 1)
                };
                random_symbol_seeded(&sh, seed.wrapping_add(i as u64 * 7919))
            })
            .collect();
        let trial = theta_ratio_trial(&args, &cx.integ, seed)?;
        if let Some(r) = trial.ratio {
            ratios.push(r);
        }
        t += 1;
    }
    let spread = relative_spread(&ratios);
    let tol = cx.tol("theta-ratio", 1e-6);
    let mut c = Check::new(format!("theta-ratio/n{dim}"), spread, 0.0, tol).with("admissible", ratios.len() as f64);
    c.pass &= ratios.len() >= n.min(10);
    if let Some(r) = ratios.first() {
        c = c.with_c("ratio", *r);
        cx.notes.insert("theta-ratio.constant".into(), format!("{:.12} {:+.12}i", r.re, r.im));
        for (name, v) in theta_candidates(dim) {
            cx.notes.insert(format!("theta-ratio.distance[{name}]"), format!("{:.3e}", (r - v).norm()));
        }
    }
    cx.checks.push(c);
    Ok(())
}

/// Run a named suite.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Report> {
    if !SUITES.contains(&name) {
        return Err(SymError::UnknownSuite(name.to_string()));
    }
    cfg.quadrature.validate()?;
    if let Some(d) = cfg.dim {
        crate::symbol::check_dim(d)?;
    }
    let start = Instant::now();
    let mut cx = Ctx {
        cfg,
        integ: Integrator::new(cfg.quadrature)?,
        checks: Vec::new(),
        notes: BTreeMap::new(),
    };
    let run = |cx: &mut Ctx, s: &str| -> Result<()> {
        match s {
            "stokes-res" => stokes_res(cx),
            "trace" => trace(cx),
            "fp-log" => fp_log(cx),
            "rescale" => rescale(cx),
            "cutoff-stokes" => cutoff_stokes(cx),
            "ibp-translation" => ibp_translation(cx),
            "complex-residue" => complex_residue(cx),
            "mero-stokes" => mero_stokes(cx),
            "theta-ratio" => theta_ratio(cx),
            other => cochain_suite(cx, other),
        }
    };
    if name == "all" {
        for s in SUITES.iter().filter(|s| !matches!(**s, "all" | "b-star" | "b0-cutoff" | "bB-phi")) {
            run(&mut cx, s)?;
        }
    } else {
        run(&mut cx, name)?;
    }
    let pass = cx.checks.iter().all(|c| c.pass);
    Ok(Report {
        suite: name.to_string(),
        config: cfg.clone(),
        checks: cx.checks,
        notes: cx.notes,
        pass,
        elapsed_ms: start.elapsed().as_millis(),
    })
}
