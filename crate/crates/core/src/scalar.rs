//! Exact scalars: rational orders and Gaussian-rational coefficients.

use num::bigint::BigInt;
use num::complex::{Complex, Complex64};
use num::rational::{BigRational, Ratio};
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SymError};

/// Small exact rational used for orders, degrees and radial powers.
pub type Order = Ratio<i64>;

/// Gaussian rational `a + b i` with `a, b` exact rationals.
pub type Scalar = Complex<BigRational>;

pub fn q(n: i64, d: i64) -> Order {
    Order::new(n, d)
}

pub fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn real(r: BigRational) -> Scalar {
    Complex::new(r, BigRational::zero())
}

pub fn int(n: i64) -> Scalar {
    real(BigRational::from_integer(BigInt::from(n)))
}

pub fn rat(n: i64, d: i64) -> Scalar {
    real(big(n, d))
}

pub fn order_to_big(o: Order) -> BigRational {
    BigRational::new(BigInt::from(*o.numer()), BigInt::from(*o.denom()))
}

pub fn order_scalar(o: Order) -> Scalar {
    real(order_to_big(o))
}

/// `(-i)^k`.
pub fn minus_i_pow(k: u32) -> Scalar {
    match k % 4 {
        0 => int(1),
        1 => Complex::new(BigRational::zero(), -BigRational::one()),
        2 => int(-1),
        _ => Complex::new(BigRational::zero(), BigRational::one()),
    }
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: fall back to a scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn to_c64(s: &Scalar) -> Complex64 {
    Complex64::new(big_to_f64(&s.re), big_to_f64(&s.im))
}

pub fn order_f64(o: Order) -> f64 {
    *o.numer() as f64 / *o.denom() as f64
}

pub fn is_integer(o: Order) -> bool {
    o.is_integer()
}

/// Exact `|s|_1 = |re| + |im|`, a cheap magnitude bound.
pub fn abs1(s: &Scalar) -> f64 {
    big_to_f64(&s.re.abs()) + big_to_f64(&s.im.abs())
}

pub fn parse_big(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || SymError::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn parse_order(s: &str) -> Result<Order> {
    let r = parse_big(s)?;
    let n = r.numer().to_i64();
    let d = r.denom().to_i64();
    match (n, d) {
        (Some(n), Some(d)) => Ok(Order::new(n, d)),
        _ => Err(SymError::Parse(format!("order out of range: `{s}`"))),
    }
}

pub fn fmt_big(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_order(o: Order) -> String {
    if o.is_integer() {
        o.numer().to_string()
    } else {
        format!("{}/{}", o.numer(), o.denom())
    }
}

/// JSON form of a coefficient: `"p/q"` when real, `["re", "im"]` otherwise.
pub fn scalar_to_json(s: &Scalar) -> serde_json::Value {
    if s.im.is_zero() {
        serde_json::Value::String(fmt_big(&s.re))
    } else {
        serde_json::json!([fmt_big(&s.re), fmt_big(&s.im)])
    }
}

pub fn scalar_from_json(v: &serde_json::Value) -> Result<Scalar> {
    match v {
        serde_json::Value::String(s) => Ok(real(parse_big(s)?)),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(int(i)),
            None => Err(SymError::Parse(format!("coefficient must be exact: {n}"))),
        },
        serde_json::Value::Array(a) if a.len() == 2 => {
            let part = |v: &serde_json::Value| match v {
                serde_json::Value::String(s) => parse_big(s),
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(|i| BigRational::from_integer(BigInt::from(i)))
                    .ok_or_else(|| SymError::Parse(format!("coefficient must be exact: {n}"))),
                other => Err(SymError::Parse(format!("bad coefficient part {other}"))),
            };
            Ok(Complex::new(part(&a[0])?, part(&a[1])?))
        }
        other => Err(SymError::Parse(format!("bad coefficient {other}"))),
    }
}

/// `n!` as a big rational.
pub fn factorial(n: u32) -> BigRational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

/// Generalised binomial coefficient `C(a, k)` for rational `a`.
pub fn binom(a: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc *= a - BigRational::from_integer(BigInt::from(j));
        acc /= BigRational::from_integer(BigInt::from(j + 1));
    }
    acc
}
