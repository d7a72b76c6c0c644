//! Expansion of `sigma(x, xi + eta)` for a constant covector `eta` into
//! homogeneous components in `xi`, valid for `|xi| >= 1 + |eta|`.

use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{Result, SymError};
use crate::scalar::{binom, factorial, order_to_big, real, Scalar};
use crate::star::multi_indices;
use crate::symbol::{ClassicalSymbol, Symbol, TermKey};

/// `sigma(x, xi + eta)` with its asymptotic expansion to a fixed depth.
#[derive(Clone, Debug)]
pub struct Translated {
    pub base: ClassicalSymbol,
    pub eta: Vec<BigRational>,
    pub depth: u32,
    /// Homogeneous expansion through `depth` extra components.
    pub expansion: ClassicalSymbol,
    /// Components of drop `depth + 1`, used to size the remainder.
    pub first_omitted: ClassicalSymbol,
}

impl Translated {
    pub fn eta_norm(&self) -> f64 {
        self.eta
            .iter()
            .map(|e| crate::scalar::big_to_f64(e).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_identity(&self) -> bool {
        self.eta.iter().all(Zero::is_zero)
    }

    /// Exact value of `sigma(x, xi + eta)` at a point.
    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> Result<num::complex::Complex64> {
        let shifted: Vec<f64> = xi
            .iter()
            .zip(&self.eta)
            .map(|(a, e)| a + crate::scalar::big_to_f64(e))
            .collect();
        self.base.evaluate(x, &shifted)
    }
}

/// Translate `sigma` by the constant covector `eta`, expanding `depth`
/// components below each homogeneous term.
pub fn translate(sigma: &ClassicalSymbol, eta: &[BigRational], depth: u32) -> Result<Translated> {
    let dim = sigma.dim();
    if eta.len() != dim {
        return Err(SymError::DimensionMismatch(dim, eta.len()));
    }
    let mut expansion = ClassicalSymbol::zero(dim, sigma.order());
    expansion.set_depth(sigma.depth() + depth);
    let mut omitted = ClassicalSymbol::zero(dim, sigma.order());
    omitted.set_depth(sigma.depth() + depth + 1);
    let eta_sq: BigRational = eta.iter().map(|e| e * e).sum();
    for (key, c) in sigma.terms() {
        if key.is_compact() {
            continue;
        }
        for (drop, nk, nc) in expand_key(key, c, eta, &eta_sq, depth + 1, dim) {
            if drop <= depth {
                expansion.push(nk, nc);
            } else {
                omitted.push(nk, nc);
            }
        }
    }
    Ok(Translated {
        base: sigma.clone(),
        eta: eta.to_vec(),
        depth,
        expansion,
        first_omitted: omitted,
    })
}

/// Terms of `(xi + eta)^b |xi + eta|^s` with total drop `<= max_drop`.
fn expand_key(
    key: &TermKey,
    c: &Scalar,
    eta: &[BigRational],
    eta_sq: &BigRational,
    max_drop: u32,
    dim: usize,
) -> Vec<(u32, TermKey, Scalar)> {
    let mut out = Vec::new();
    let b: Vec<u32> = key.xi[..dim].iter().map(|&e| e as u32).collect();
    let half_s = order_to_big(key.radial) / BigRational::from_integer(2.into());
    let has_radial = !key.radial.is_zero();
    // Polynomial part: sum over beta <= b.
    for beta in multi_indices(dim, b.iter().sum()) {
        if beta.iter().zip(&b).any(|(x, y)| x > y) {
            continue;
        }
        let bdrop: u32 = beta.iter().sum();
        if bdrop > max_drop {
            continue;
        }
        let mut pc = BigRational::one();
        for i in 0..dim {
            pc *= binom(&BigRational::from_integer(b[i].into()), beta[i]) * eta[i].pow(beta[i] as i32);
        }
        if pc.is_zero() {
            continue;
        }
        let mut base = key.clone();
        for i in 0..dim {
            base.xi[i] -= beta[i] as u16;
        }
        let kmax = if has_radial { max_drop - bdrop } else { 0 };
        for k in 0..=kmax {
            let bk = binom(&half_s, k);
            if bk.is_zero() {
                continue;
            }
            // u^k = sum_{a + e = k} k!/(a! e!) (2 xi.eta)^a |eta|^(2e) |xi|^(-2k)
            for e in 0..=k {
                let a = k - e;
                let drop = bdrop + k + e;
                if drop > max_drop {
                    continue;
                }
                let ce = factorial(k) / (factorial(a) * factorial(e))
                    * eta_sq.pow(e as i32)
                    * BigRational::from_integer(2.into()).pow(a as i32);
                if ce.is_zero() {
                    continue;
                }
                for gamma in multi_indices(dim, a) {
                    if gamma.iter().sum::<u32>() != a {
                        continue;
                    }
                    let mut gc = factorial(a);
                    for i in 0..dim {
                        gc = gc / factorial(gamma[i]) * eta[i].pow(gamma[i] as i32);
                    }
                    if gc.is_zero() {
                        continue;
                    }
                    let mut nk = base.clone();
                    for i in 0..dim {
                        nk.xi[i] += gamma[i] as u16;
                    }
                    nk.radial = key.radial - 2 * k as i64;
                    let coeff = c * real(&pc * &bk * &ce * gc);
                    out.push((drop, nk, coeff));
                }
            }
        }
    }
    out
}

/// Make sure the omitted remainder is integrable at infinity.
pub fn check_remainder(t: &Translated) -> Result<()> {
    let required = crate::star::truncation_depth_for(t.base.order(), t.base.dim());
    if t.depth < required && !t.first_omitted.is_empty() {
        return Err(SymError::InsufficientTruncation {
            required,
            got: t.depth,
        });
    }
    Ok(())
}

impl Symbol<Scalar> {
    /// `sigma(x, xi + eta)` expanded `depth` components deep.
    pub fn translate(&self, eta: &[BigRational], depth: u32) -> Result<Translated> {
        translate(self, eta, depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{big, int, q};

    #[test]
    fn inverse_square_components() {
        // |xi + 1|^-2 chi: components at xi = 1 are (j+1)(-1)^j, at xi = -1 are j+1.
        let s = ClassicalSymbol::from_terms(1, q(-2, 1), 0, [(TermKey::cut([0; 3], [0; 3], q(-2, 1)), int(1))]).unwrap();
        let t = translate(&s, &[big(1, 1)], 6).unwrap();
        for j in 0..=6u32 {
            let h = t.expansion.homogeneous_component(j);
            let a = h.evaluate(&[0.0], &[1.0]).unwrap().re;
            let b = h.evaluate(&[0.0], &[-1.0]).unwrap().re;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - sign * (j as f64 + 1.0)).abs() < 1e-12, "j={j}: {a}");
            assert!((b - (j as f64 + 1.0)).abs() < 1e-12, "j={j}: {b}");
        }
    }

    #[test]
    fn expansion_converges_pointwise() {
        let s = ClassicalSymbol::from_terms(
            2,
            q(1, 2),
            0,
            [(TermKey::cut([0; 3], [1, 0, 0], q(-1, 2)), int(1))],
        )
        .unwrap();
        let t = translate(&s, &[big(1, 2), big(-1, 3)], 8).unwrap();
        let xi = [7.0, -5.0];
        let exact = t.evaluate(&[0.0, 0.0], &xi).unwrap();
        let approx = t.expansion.evaluate(&[0.0, 0.0], &xi).unwrap();
        assert!((exact - approx).norm() < 1e-9, "{exact} vs {approx}");
    }

    #[test]
    fn polynomials_translate_exactly() {
        // (xi + 2)^2 = xi^2 + 4 xi + 4
        let s = ClassicalSymbol::from_terms(1, q(2, 1), 0, [(TermKey::poly([0; 3], [2, 0, 0]), int(1))]).unwrap();
        let t = translate(&s, &[big(2, 1)], 2).unwrap();
        assert_eq!(t.expansion.len(), 3);
        assert!(t.first_omitted.is_empty());
    }
}
