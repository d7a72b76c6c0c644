//! Truncated Moyal-type star product
//! `sigma * sigma' = sum_{|alpha| <= K} (-i)^|alpha| / alpha! d_xi^alpha sigma d_x^alpha sigma'`.

use std::collections::HashMap;

use num::rational::BigRational;

use crate::coeff::Coeff;
use crate::scalar::{factorial, minus_i_pow, real, Order};
use crate::symbol::Symbol;

/// Multi-indices of length `dim` with `|alpha| <= k`, graded
/// lexicographically.
pub fn multi_indices(dim: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=k {
        let mut cur = vec![0u32; dim];
        fill(&mut out, &mut cur, 0, total);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a;
        fill(out, cur, i + 1, left - a);
    }
}

/// Caches `d^alpha sigma` for one symbol and one variable group.
/// With a `floor`, derivatives keep only homogeneous terms of degree at
/// least `floor`.
struct Derivs<'a, C: Coeff> {
    base: &'a Symbol<C>,
    xi: bool,
    floor: Option<Order>,
    cache: HashMap<Vec<u32>, Symbol<C>>,
}

impl<'a, C: Coeff> Derivs<'a, C> {
    fn new(base: &'a Symbol<C>, xi: bool, floor: Option<Order>) -> Self {
        Derivs {
            base,
            xi,
            floor,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, alpha: &[u32]) -> Symbol<C> {
        if let Some(s) = self.cache.get(alpha) {
            return s.clone();
        }
        let s = match alpha.iter().position(|&a| a > 0) {
            None => self.base.clone(),
            Some(i) => {
                let mut lower = alpha.to_vec();
                lower[i] -= 1;
                let l = self.get(&lower);
                let d = if self.xi { l.partial_xi(i) } else { l.partial_x(i) };
                match self.floor {
                    Some(f) => d.asymptotic_above(f),
                    None => d,
                }
            }
        };
        self.cache.insert(alpha.to_vec(), s.clone());
        s
    }
}

/// `sigma *_K sigma'`, of order `m + m'` and depth `max(depth) + K`.
pub fn star<C: Coeff>(a: &Symbol<C>, b: &Symbol<C>, k: u32) -> Symbol<C> {
    star_impl(a, b, k, None)
}

fn star_impl<C: Coeff>(a: &Symbol<C>, b: &Symbol<C>, k: u32, floor: Option<Order>) -> Symbol<C> {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch in star product");
    let dim = a.dim();
    let order = a.order() + b.order();
    let mut da = Derivs::new(a, true, floor.map(|f| f - b.order()));
    let mut db = Derivs::new(b, false, floor.map(|f| f - a.order()));
    let mut out = Symbol::zero(dim, order);
    for alpha in multi_indices(dim, k) {
        let total: u32 = alpha.iter().sum();
        let fa = da.get(&alpha);
        if fa.is_empty() {
            continue;
        }
        let fb = db.get(&alpha);
        if fb.is_empty() {
            continue;
        }
        let mut denom = BigRational::from_integer(1.into());
        for &ai in &alpha {
            denom *= factorial(ai);
        }
        let c = minus_i_pow(total) * real(denom.recip());
        for (ka, ca) in fa.terms() {
            let cac = ca.scale(&c);
            for (kb, cb) in fb.terms() {
                if let Some(f) = floor {
                    if ka.degree() + kb.degree() < f {
                        continue;
                    }
                }
                out.push(ka.mul(kb), cac.mul(cb));
            }
        }
    }
    let depth = out.depth().max(a.depth() + b.depth() + k);
    out.set_depth(depth);
    out
}

/// Homogeneous terms of `sigma *_K sigma'` of degree at least `floor`, up to
/// symbols supported in `|xi| <= 1`. Enough for residues and cosphere
/// integrals at a known degree.
pub fn star_above<C: Coeff>(a: &Symbol<C>, b: &Symbol<C>, k: u32, floor: Order) -> Symbol<C> {
    let pa = a.asymptotic_above(floor - b.order());
    let pb = b.asymptotic_above(floor - a.order());
    let room = a.order() + b.order() - floor;
    if room < Order::from_integer(0) {
        return Symbol::zero(a.dim(), a.order() + b.order());
    }
    let kmax = k.min(room.floor().to_integer() as u32);
    let mut out = star_impl(&pa, &pb, kmax, Some(floor)).asymptotic_above(floor);
    out.set_depth(a.depth() + b.depth() + k);
    out
}

/// `theta` restricted like [`star_above`].
pub fn theta_above<C: Coeff>(a: &Symbol<C>, b: &Symbol<C>, k: u32, floor: Order) -> Symbol<C> {
    let prod = a.asymptotic_above(floor - b.order()).mul(&b.asymptotic_above(floor - a.order()));
    star_above(a, b, k, floor).sub(&prod.asymptotic_above(floor))
}

/// `[sigma, sigma']_* = sigma * sigma' - sigma' * sigma`.
pub fn commutator<C: Coeff>(a: &Symbol<C>, b: &Symbol<C>, k: u32) -> Symbol<C> {
    star(a, b, k).sub(&star(b, a, k))
}

/// `theta(a, b) = a *_K b - a b`: the star product without its zeroth term.
pub fn theta<C: Coeff>(a: &Symbol<C>, b: &Symbol<C>, k: u32) -> Symbol<C> {
    star(a, b, k).sub(&a.mul(b))
}

/// Smallest `K >= 0` with `total_order - K - 1 < -n`: every omitted star term
/// then has degree below `-n` and cannot reach the residue.
pub fn truncation_depth_for(total_order: Order, dim: usize) -> u32 {
    let bound = total_order - 1 + dim as i64;
    // need K > bound
    if bound < Order::from_integer(0) {
        0
    } else {
        (bound.floor().to_integer() + 1) as u32
    }
}

/// Truncation depth at which `res(sigma *_K sigma')` is exact.
pub fn residue_truncation_depth(m: Order, m2: Order, dim: usize) -> u32 {
    truncation_depth_for(m + m2, dim)
}
