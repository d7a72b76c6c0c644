//! JSON encoding of symbols and forms.
//!
//! A term is `xcoeff(x) * angular(xi) * |xi|^radial_power * chi(|xi|)`, with
//! both polynomials given as maps from exponent tuples to exact coefficients.
//! Coefficients are `"p/q"` strings or `["re", "im"]` pairs. Two optional
//! per-term fields extend the schema to everything the calculus produces:
//! `"window"` lists, per axis, the derivative orders of the window factors
//! `psi^(k)(1 - x_i^2)`, and `"cutoff"` lists the derivative orders of the
//! radial cut-off factors (`[]` for a plain polynomial, default `[0]`).

use serde_json::{json, Map, Value};
use smallvec::SmallVec;

use crate::error::{Result, SymError};
use crate::forms::{basis_of, ClassicalForm};
use crate::scalar::{fmt_order, parse_order, scalar_from_json, scalar_to_json, Order, Scalar};
use crate::symbol::{ClassicalSymbol, Multiset, TermKey};
use crate::MAX_DIM;

fn err(path: &str, msg: impl std::fmt::Display) -> SymError {
    SymError::Parse(format!("{path}: {msg}"))
}

/// Parse `"[1,0]"`, `"(1,0)"` or `"1,0"`.
pub fn parse_monomial(s: &str, dim: usize) -> Result<[u16; MAX_DIM]> {
    let inner = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
    let mut out = [0u16; MAX_DIM];
    let parts: Vec<&str> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').collect()
    };
    if parts.len() != dim {
        return Err(SymError::Parse(format!("monomial {s:?} has {} exponents, expected {dim}", parts.len())));
    }
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| SymError::Parse(format!("bad exponent {p:?} in monomial {s:?}")))?;
    }
    Ok(out)
}

pub fn fmt_monomial(e: &[u16]) -> String {
    let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

fn as_obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|u| u as usize).ok_or_else(|| err(path, "expected a non-negative integer"))
}

fn order_from(v: &Value, path: &str) -> Result<Order> {
    match v {
        Value::String(s) => parse_order(s).map_err(|e| err(path, e)),
        Value::Number(n) => n.as_i64().map(Order::from_integer).ok_or_else(|| err(path, "order must be exact")),
        _ => Err(err(path, "expected a rational string")),
    }
}

fn poly_from(v: &Value, dim: usize, path: &str) -> Result<Vec<([u16; MAX_DIM], Scalar)>> {
    let obj = as_obj(v, path)?;
    let mut out = Vec::with_capacity(obj.len());
    for (k, c) in obj {
        let p = format!("{path}.{k}");
        out.push((parse_monomial(k, dim).map_err(|e| err(&p, e))?, scalar_from_json(c).map_err(|e| err(&p, e))?));
    }
    Ok(out)
}

fn multiset_from(v: &Value, path: &str) -> Result<Multiset> {
    let arr = v.as_array().ok_or_else(|| err(path, "expected a list of derivative orders"))?;
    let mut m: Multiset = SmallVec::new();
    for (i, e) in arr.iter().enumerate() {
        let k = e.as_u64().filter(|&k| k < 64).ok_or_else(|| err(&format!("{path}[{i}]"), "bad derivative order"))?;
        m.push(k as u8);
    }
    m.sort_unstable();
    Ok(m)
}

/// Parse a symbol from its JSON value.
pub fn symbol_from_value(v: &Value) -> Result<ClassicalSymbol> {
    symbol_at(v, "symbol")
}

fn symbol_at(v: &Value, path: &str) -> Result<ClassicalSymbol> {
    let obj = as_obj(v, path)?;
    let dim = as_usize(get(obj, "dim", path)?, &format!("{path}.dim"))?;
    if dim == 0 || dim > MAX_DIM {
        return Err(err(&format!("{path}.dim"), format!("dimension must be 1..={MAX_DIM}")));
    }
    let order = order_from(get(obj, "order", path)?, &format!("{path}.order"))?;
    let depth = as_usize(get(obj, "depth", path)?, &format!("{path}.depth"))? as u32;
    let windowed = match obj.get("windowed") {
        None => false,
        Some(b) => b.as_bool().ok_or_else(|| err(&format!("{path}.windowed"), "expected a boolean"))?,
    };
    let list = get(obj, "terms", path)?
        .as_array()
        .ok_or_else(|| err(&format!("{path}.terms"), "expected a list"))?;
    let mut terms = Vec::new();
    for (i, t) in list.iter().enumerate() {
        let tp = format!("{path}.terms[{i}]");
        let to = as_obj(t, &tp)?;
        let xc = poly_from(get(to, "xcoeff", &tp)?, dim, &format!("{tp}.xcoeff"))?;
        let ang = poly_from(get(to, "angular", &tp)?, dim, &format!("{tp}.angular"))?;
        let radial = match to.get("radial_power") {
            None => Order::from_integer(0),
            Some(r) => order_from(r, &format!("{tp}.radial_power"))?,
        };
        let cut = match to.get("cutoff") {
            None => SmallVec::from_slice(&[0]),
            Some(c) => multiset_from(c, &format!("{tp}.cutoff"))?,
        };
        let mut window: [Multiset; MAX_DIM] = Default::default();
        if let Some(w) = to.get("window") {
            let arr = w.as_array().filter(|a| a.len() == dim).ok_or_else(|| err(&format!("{tp}.window"), format!("expected {dim} lists")))?;
            for (a, wv) in arr.iter().enumerate() {
                window[a] = multiset_from(wv, &format!("{tp}.window[{a}]"))?;
            }
        }
        if windowed {
            for w in window[..dim].iter_mut() {
                w.push(0);
                w.sort_unstable();
            }
        }
        if cut.is_empty() && radial != Order::from_integer(0) {
            return Err(err(&tp, "a term without cut-off must have radial_power 0"));
        }
        for (xe, xcv) in &xc {
            for (ae, acv) in &ang {
                let key = TermKey {
                    x: *xe,
                    window: window.clone(),
                    xi: *ae,
                    radial,
                    zshift: Order::from_integer(0),
                    cut: cut.clone(),
                };
                terms.push((key, xcv * acv));
            }
        }
    }
    ClassicalSymbol::from_terms(dim, order, depth, terms).map_err(|e| err(path, e))
}

pub fn parse_symbol(text: &str) -> Result<ClassicalSymbol> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| SymError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    symbol_from_value(&v)
}

/// Encode a symbol; one JSON term per internal term.
pub fn symbol_to_value(s: &ClassicalSymbol) -> Value {
    let dim = s.dim();
    let simple_window = |k: &TermKey| k.window[..dim].iter().all(|w| w.as_slice() == [0]);
    let windowed = !s.terms().is_empty() && s.terms().keys().all(simple_window);
    let terms: Vec<Value> = s
        .terms()
        .iter()
        .map(|(k, c)| {
            let mut t = Map::new();
            t.insert("xcoeff".into(), json!({ fmt_monomial(&k.x[..dim]): "1" }));
            t.insert("angular".into(), json!({ fmt_monomial(&k.xi[..dim]): scalar_to_json(c) }));
            t.insert("radial_power".into(), Value::String(fmt_order(k.radial)));
            if k.cut.as_slice() != [0] {
                t.insert("cutoff".into(), json!(k.cut.to_vec()));
            }
            if !windowed && k.window[..dim].iter().any(|w| !w.is_empty()) {
                let w: Vec<Vec<u8>> = k.window[..dim].iter().map(|w| w.to_vec()).collect();
                t.insert("window".into(), json!(w));
            }
            Value::Object(t)
        })
        .collect();
    json!({
        "dim": dim,
        "order": fmt_order(s.order()),
        "depth": s.depth(),
        "windowed": windowed,
        "terms": terms,
    })
}

pub fn symbol_to_string(s: &ClassicalSymbol) -> String {
    serde_json::to_string_pretty(&symbol_to_value(s)).expect("values serialise")
}

/// Parse a form; `dx` and `dxi` list 1-based axes.
pub fn form_from_value(v: &Value) -> Result<ClassicalForm> {
    let path = "form";
    let obj = as_obj(v, path)?;
    let dim = as_usize(get(obj, "dim", path)?, "form.dim")?;
    if dim == 0 || dim > MAX_DIM {
        return Err(err("form.dim", format!("dimension must be 1..={MAX_DIM}")));
    }
    let degree = as_usize(get(obj, "degree", path)?, "form.degree")?;
    let order = order_from(get(obj, "order", path)?, "form.order")?;
    let list = get(obj, "coeffs", path)?.as_array().ok_or_else(|| err("form.coeffs", "expected a list"))?;
    let mut out = ClassicalForm::zero(dim, degree, order);
    for (i, c) in list.iter().enumerate() {
        let cp = format!("form.coeffs[{i}]");
        let co = as_obj(c, &cp)?;
        let axes = |key: &str| -> Result<Vec<usize>> {
            let p = format!("{cp}.{key}");
            let arr = get(co, key, &cp)?.as_array().ok_or_else(|| err(&p, "expected a list of axes"))?;
            arr.iter()
                .map(|a| match a.as_u64() {
                    Some(k) if k >= 1 && (k as usize) <= dim => Ok(k as usize - 1),
                    _ => Err(err(&p, format!("axes are 1..={dim}"))),
                })
                .collect()
        };
        let dx = axes("dx")?;
        let dxi = axes("dxi")?;
        if dx.len() + dxi.len() != degree {
            return Err(SymError::FormDegree {
                expected: degree,
                got: dx.len() + dxi.len(),
            });
        }
        let sym = symbol_at(get(co, "symbol", &cp)?, &format!("{cp}.symbol"))?;
        if sym.dim() != dim {
            return Err(err(&cp, "symbol dimension differs from the form"));
        }
        let (mask, sign) = basis_of(dim, &dx, &dxi).ok_or_else(|| err(&cp, "repeated axis"))?;
        let want = order - dxi.len() as i64;
        if sym.order() != want {
            return Err(SymError::FormCoefficientOrder {
                expected: fmt_order(want),
                got: fmt_order(sym.order()),
            });
        }
        let sym = if sign < 0 { sym.neg() } else { sym };
        out.add_component(mask, &sym)?;
    }
    Ok(out)
}

pub fn parse_form(text: &str) -> Result<ClassicalForm> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| SymError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    form_from_value(&v)
}

pub fn form_to_value(w: &ClassicalForm) -> Value {
    let n = w.dim();
    let coeffs: Vec<Value> = w
        .components()
        .iter()
        .map(|(&mask, s)| {
            let dx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
            let dxi: Vec<usize> = (0..n).filter(|j| mask & (1 << (n + j)) != 0).map(|j| j + 1).collect();
            json!({"dx": dx, "dxi": dxi, "symbol": symbol_to_value(s)})
        })
        .collect();
    json!({
        "dim": n,
        "degree": w.degree(),
        "order": fmt_order(w.order()),
        "coeffs": coeffs,
    })
}

pub fn form_to_string(w: &ClassicalForm) -> String {
    serde_json::to_string_pretty(&form_to_value(w)).expect("values serialise")
}
