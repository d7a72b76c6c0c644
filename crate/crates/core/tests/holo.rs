//! Laurent germs of cut-off integrals of holomorphic families.

use num::complex::Complex64;
use symcalc::cutoff::window_factor;
use symcalc::holo::*;
use symcalc::quadrature::{window_integrate, Integrator, QuadratureSpec};
use symcalc::random::{random_form_seeded, random_symbol_seeded, SymbolShape};
use symcalc::regint::cutoff_integral;
use symcalc::scalar::{int, q, rat};
use symcalc::{ClassicalSymbol, Order, TermKey};

fn integ() -> Integrator {
    Integrator::new(QuadratureSpec {
        tol: 1e-12,
        ..Default::default()
    })
    .unwrap()
}

fn inverse_abs() -> ClassicalSymbol {
    let mut k = TermKey::poly([0; 3], [0; 3]);
    k.cut = smallvec_zero();
    k.radial = q(-1, 1);
    ClassicalSymbol::from_terms(1, q(-1, 1), 0, [(k, int(1))]).unwrap()
}

fn smallvec_zero() -> symcalc::symbol::Multiset {
    std::iter::once(0u8).collect()
}

/// `fp int sigma(z)` at a real `z`, by specialising the family first.
fn direct(fam: &HoloSymbolFamily, z: Order, integ: &Integrator) -> Complex64 {
    cutoff_integral(&fam.at(z), integ).unwrap().value
}

#[test]
fn riesz_family_of_inverse_abs_has_simple_pole() {
    let integ = integ();
    let fam = HoloSymbolFamily::riesz(&inverse_abs().windowed(), &[]).unwrap();
    let g = laurent_cutoff_integral(&fam.lifted, q(0, 1), 3, &integ).unwrap();
    assert_eq!(g.pole_order(), 1);
    // Residue 2 int w(x) dx: the sphere S^0 has two points.
    let w = window_integrate(|x| window_factor(x[0], 0), 1, &QuadratureSpec::default()).unwrap().value;
    assert!((g.residue() - Complex64::new(2.0 * w, 0.0)).norm() < 1e-12, "{} {w}", g.residue());
    // The annulus part of chi r^{-1-z} is entire; its constant term is int chi / r.
    let c0 = cutoff_integral(&inverse_abs().windowed(), &integ).unwrap().value;
    assert!((g.constant() - c0).norm() < 1e-11);
    assert_eq!(fam.pole_set(), vec![q(0, 1)]);
}

#[test]
fn prefactor_shifts_constant_by_residue() {
    let integ = integ();
    for seed in 0..6u64 {
        let dim = 1 + (seed as usize % 2);
        let s = random_symbol_seeded(&SymbolShape::new(dim, int_order(-(dim as i64)), 2), 500 + seed);
        let plain = regularized_integral(&HoloSymbolFamily::riesz(&s, &[]).unwrap(), &integ).unwrap();
        let h = [int(1), int(1)];
        let shifted = regularized_integral(&HoloSymbolFamily::riesz(&s, &h).unwrap(), &integ).unwrap();
        let diff = shifted.constant() - plain.constant();
        assert!((diff - plain.residue()).norm() < 1e-10, "{diff} vs {}", plain.residue());
    }
}

fn int_order(v: i64) -> Order {
    Order::from_integer(v)
}

#[test]
fn germ_matches_symmetric_differences() {
    let integ = integ();
    // h and h/2 with Richardson extrapolation of the O(h^2) error.
    let h = q(1, 200);
    for (dim, seed) in [(1usize, 7u64), (2, 8)] {
        let s = random_symbol_seeded(&SymbolShape::new(dim, int_order(-(dim as i64)), 1), seed);
        let fam = HoloSymbolFamily::riesz(&s, &[int(1), rat(1, 2)]).unwrap();
        let g = laurent_cutoff_integral(&fam.lifted, q(0, 1), 2, &integ).unwrap();
        let est = |h: Order| {
            let fp = direct(&fam, h, &integ);
            let fm = direct(&fam, -h, &integ);
            let hf = *h.numer() as f64 / *h.denom() as f64;
            ((fp - fm) * hf / 2.0, (fp + fm) / 2.0)
        };
        let (r1, c1) = est(h);
        let (r2, c2) = est(h / 2);
        let res = (r2 * 4.0 - r1) / 3.0;
        let c0 = (c2 * 4.0 - c1) / 3.0;
        assert!((res - g.residue()).norm() < 1e-8, "{res} vs {}", g.residue());
        assert!((c0 - g.constant()).norm() < 1e-7, "{c0} vs {}", g.constant());
    }
    // Derivative at a regular point.
    let s = random_symbol_seeded(&SymbolShape::new(1, q(-1, 2), 1), 9);
    let fam = HoloSymbolFamily::riesz(&s, &[]).unwrap();
    let z0 = q(1, 3);
    let g = laurent_cutoff_integral(&fam.lifted, z0, 2, &integ).unwrap();
    assert_eq!(g.pole_order(), 0);
    let d = |h: Order| (direct(&fam, z0 + h, &integ) - direct(&fam, z0 - h, &integ)) / (2.0 * (*h.numer() as f64 / *h.denom() as f64));
    let h = q(1, 4000);
    let d1 = (d(h / 2) * 4.0 - d(h)) / 3.0;
    assert!((d1 - g.jet[1]).norm() < 1e-8 * g.jet[1].norm(), "{d1} vs {}", g.jet[1]);
    assert!((direct(&fam, z0, &integ) - g.constant()).norm() < 1e-11);
}

#[test]
fn complex_residue_identity_on_random_symbols() {
    let integ = integ();
    let mut nontrivial = 0;
    for seed in 0..24u64 {
        let dim = 1 + (seed as usize % 3);
        let order = if seed % 4 == 3 { q(1, 2) } else { int_order(1 - dim as i64 - (seed % 2) as i64) };
        let s = random_symbol_seeded(&SymbolShape::new(dim, order, 2), 900 + seed);
        let fam = HoloSymbolFamily::riesz(&s, &[int(1), int(-2), rat(1, 3)]).unwrap();
        let c = complex_residue_identity_defect(&fam, &integ).unwrap();
        assert!(c.defect() <= c.budget.max(1e-12), "seed {seed}: {} > {}", c.defect(), c.budget);
        if c.predicted.value.norm() > 1e-3 {
            nontrivial += 1;
        }
    }
    assert!(nontrivial >= 3);
}

#[test]
fn meromorphic_stokes_germ_vanishes() {
    let integ = integ();
    for (dim, order, seed) in [(1usize, q(0, 1), 1u64), (1, q(1, 2), 2), (2, q(-1, 1), 3), (1, q(1, 1), 4)] {
        let shape = SymbolShape::new(dim, order, 2);
        let beta = random_form_seeded(&shape, 2 * dim - 1, seed);
        let g = meromorphic_stokes_defect(&beta, &[int(1), int(1)], 3, &integ).unwrap();
        let tol = g.error.max(1e-12) + 1e-10 * g.scale;
        assert!(g.max_abs() <= tol, "{:?}", g);
    }
}

#[test]
fn rejects_bad_prefactor_and_slope() {
    let s = inverse_abs();
    assert!(HoloSymbolFamily::riesz(&s, &[int(2)]).is_err());
    assert!(HoloSymbolFamily::with_slope(&s, &[], q(0, 1)).is_err());
}

#[test]
fn specialisation_at_zero_is_identity() {
    for seed in 0..5u64 {
        let s = random_symbol_seeded(&SymbolShape::new(2, q(1, 1), 2), seed);
        let fam = HoloSymbolFamily::riesz(&s, &[int(1), int(5)]).unwrap();
        let at0 = fam.at(q(0, 1));
        let x = [0.3, -0.2];
        let xi = [1.7, 0.4];
        assert!((at0.evaluate(&x, &xi).unwrap() - s.evaluate(&x, &xi).unwrap()).norm() < 1e-12);
    }
}
