//! Seeded generators for symbols and symbol-valued forms.
//!
//! All randomness flows from a `ChaCha8Rng`, so a seed reproduces the same
//! objects on every platform.

use num::complex::Complex;
use num::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::forms::{xi_count, Basis, ClassicalForm};
use crate::scalar::{big, Order, Scalar};
use crate::symbol::{ClassicalSymbol, Exps, TermKey};
use crate::MAX_DIM;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random symbol.
#[derive(Clone, Copy, Debug)]
pub struct SymbolShape {
    pub dim: usize,
    pub order: Order,
    pub depth: u32,
    /// Bound on x-monomial degree and angular monomial degree.
    pub max_poly_degree: u32,
    pub windowed: bool,
    /// Allow non-real coefficients.
    pub complex: bool,
}

impl SymbolShape {
    pub fn new(dim: usize, order: Order, depth: u32) -> Self {
        SymbolShape {
            dim,
            order,
            depth,
            max_poly_degree: 2,
            windowed: true,
            complex: true,
        }
    }
}

fn coefficient(r: &mut SeededRng, complex: bool) -> Scalar {
    let part = |r: &mut SeededRng| {
        let mut p = r.gen_range(-5i64..=5);
        if p == 0 {
            p = 1;
        }
        big(p, r.gen_range(1i64..=4))
    };
    let re = part(r);
    let im = if complex && r.gen_bool(0.25) {
        part(r)
    } else {
        Zero::zero()
    };
    Complex::new(re, im)
}

fn monomial(r: &mut SeededRng, dim: usize, degree: u32) -> Exps {
    let mut e = [0u16; MAX_DIM];
    for _ in 0..degree {
        e[r.gen_range(0..dim)] += 1;
    }
    e
}

/// Random classical symbol. The leading component is always present; each
/// lower component appears with probability 3/4.
pub fn random_symbol(r: &mut SeededRng, shape: &SymbolShape) -> ClassicalSymbol {
    let dim = shape.dim;
    let mut terms = Vec::new();
    for j in 0..=shape.depth {
        if j > 0 && !r.gen_bool(0.75) {
            continue;
        }
        let degree = shape.order - j as i64;
        let count = r.gen_range(1..=3);
        for _ in 0..count {
            let xdeg = r.gen_range(0..=shape.max_poly_degree);
            let x = monomial(r, dim, xdeg);
            let polynomial = degree.is_integer() && degree >= Order::zero() && r.gen_bool(0.3);
            let key = if polynomial {
                let xi = monomial(r, dim, degree.to_integer() as u32);
                TermKey::poly(x, xi)
            } else {
                let adeg = r.gen_range(0..=shape.max_poly_degree);
                let xi = monomial(r, dim, adeg);
                TermKey::cut(x, xi, degree - adeg as i64)
            };
            terms.push((key, coefficient(r, shape.complex)));
        }
    }
    let s = ClassicalSymbol::from_terms(dim, shape.order, shape.depth, terms)
        .expect("generated terms respect the declared order");
    if shape.windowed {
        s.windowed()
    } else {
        s
    }
}

pub fn random_symbol_seeded(shape: &SymbolShape, seed: u64) -> ClassicalSymbol {
    random_symbol(&mut rng(seed), shape)
}

/// Random `degree`-form of order `order`; each basis element is present
/// with probability 2/3 and at least one always is.
pub fn random_form(r: &mut SeededRng, shape: &SymbolShape, degree: usize) -> ClassicalForm {
    let dim = shape.dim;
    let masks: Vec<Basis> = (0u16..(1 << (2 * dim)))
        .map(|m| m as Basis)
        .filter(|m| m.count_ones() as usize == degree)
        .collect();
    let mut f = ClassicalForm::zero(dim, degree, shape.order);
    let forced = r.gen_range(0..masks.len());
    for (i, &mask) in masks.iter().enumerate() {
        if i != forced && !r.gen_bool(2.0 / 3.0) {
            continue;
        }
        let sub = SymbolShape {
            order: shape.order - xi_count(mask, dim) as i64,
            ..*shape
        };
        f.add_component(mask, &random_symbol(r, &sub))
            .expect("coefficient orders match the form order");
    }
    f
}

pub fn random_form_seeded(shape: &SymbolShape, degree: usize, seed: u64) -> ClassicalForm {
    random_form(&mut rng(seed), shape, degree)
}
