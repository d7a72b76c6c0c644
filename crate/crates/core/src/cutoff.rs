//! The smooth step `psi`, the radial cut-off `chi(r) = psi(2r - 1)` and the
//! x-window `prod_i psi(1 - x_i^2)`, with derivatives of any order.
//!
//! `psi(t) = f(t) / (f(t) + f(1 - t))` with `f(t) = exp(-1/t)` for `t > 0`.
//! Derivatives come from truncated Taylor arithmetic at the evaluation point,
//! so they are exact up to rounding.

/// Taylor coefficients `psi^(k)(t) / k!` for `k = 0..=kmax`.
pub fn psi_taylor(t: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if t <= 0.0 {
        return out;
    }
    if t >= 1.0 {
        out[0] = 1.0;
        return out;
    }
    let a = exp_inv_taylor(t, 1.0, kmax);
    let b = exp_inv_taylor(1.0 - t, -1.0, kmax);
    let den: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    // Series division a / den.
    for k in 0..=kmax {
        let mut acc = a[k];
        for j in 1..=k {
            acc -= den[j] * out[k - j];
        }
        out[k] = acc / den[0];
    }
    out
}

/// Taylor coefficients of `h -> exp(-1 / (u + dir * h))` at `h = 0`, `u > 0`.
fn exp_inv_taylor(u: f64, dir: f64, kmax: usize) -> Vec<f64> {
    // g(h) = -1/(u + dir h) = -(1/u) sum_k (-dir h / u)^k
    let mut g = vec![0.0; kmax + 1];
    let mut p = -1.0 / u;
    for gk in g.iter_mut() {
        *gk = p;
        p *= -dir / u;
    }
    let mut e = vec![0.0; kmax + 1];
    e[0] = g[0].exp();
    for k in 1..=kmax {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * g[j] * e[k - j];
        }
        e[k] = acc / k as f64;
    }
    e
}

/// `psi^(k)(t)`.
pub fn psi_deriv(t: f64, k: usize) -> f64 {
    let c = psi_taylor(t, k);
    c[k] * factorial_f64(k)
}

/// `chi^(k)(r) = 2^k psi^(k)(2r - 1)`.
pub fn chi_deriv(r: f64, k: usize) -> f64 {
    2f64.powi(k as i32) * psi_deriv(2.0 * r - 1.0, k)
}

/// Window factor `psi^(k)(1 - x^2)` of one axis.
pub fn window_factor(x: f64, k: usize) -> f64 {
    psi_deriv(1.0 - x * x, k)
}

/// `prod_k chi^(k)(r)` over a multiset of derivative orders.
pub fn chi_product(r: f64, ks: &[u8]) -> f64 {
    if ks.is_empty() {
        return 1.0;
    }
    let kmax = *ks.iter().max().unwrap() as usize;
    let c = psi_taylor(2.0 * r - 1.0, kmax);
    ks.iter()
        .map(|&k| {
            let k = k as usize;
            c[k] * factorial_f64(k) * 2f64.powi(k as i32)
        })
        .product()
}

/// `prod_k psi^(k)(1 - x^2)` over a multiset of derivative orders.
pub fn window_product(x: f64, ks: &[u8]) -> f64 {
    if ks.is_empty() {
        return 1.0;
    }
    let kmax = *ks.iter().max().unwrap() as usize;
    let c = psi_taylor(1.0 - x * x, kmax);
    ks.iter()
        .map(|&k| c[k as usize] * factorial_f64(k as usize))
        .product()
}

fn factorial_f64(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}
