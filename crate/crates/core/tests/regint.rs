//! Cut-off integrals, residues and integration by parts checked against
//! direct numerical integration.

use num::complex::Complex64;
use symcalc::quadrature::{radial_quad, sphere_quad, window_integrate, Integrator, QuadratureSpec};
use symcalc::random::{random_symbol_seeded, SymbolShape};
use symcalc::regint::*;
use symcalc::scalar::{big, q, Order};
use symcalc::ClassicalSymbol;

fn spec() -> QuadratureSpec {
    QuadratureSpec {
        tol: 1e-12,
        ..Default::default()
    }
}

/// `int_{S^{n-1}} sigma_d(x, omega) dS` for every degree present, by quadrature.
fn sphere_components(sigma: &ClassicalSymbol, x: &[f64]) -> Vec<(Order, Complex64)> {
    let mut out = Vec::new();
    for j in 0..=sigma.depth() {
        let h = sigma.homogeneous_component(j);
        if h.is_zero() {
            continue;
        }
        let re = sphere_quad(|w| h.evaluate(x, w).unwrap().re, sigma.dim(), &spec()).unwrap();
        let im = sphere_quad(|w| h.evaluate(x, w).unwrap().im, sigma.dim(), &spec()).unwrap();
        out.push((h.degree, Complex64::new(re.value, im.value)));
    }
    out
}

/// `int_{|xi| < big_r} sigma(x, xi) dxi` by direct quadrature.
fn ball(sigma: &ClassicalSymbol, x: &[f64], big_r: f64) -> Complex64 {
    let s = spec();
    match sigma.dim() {
        1 => {
            let part = |re: bool| {
                radial_quad(
                    |t| {
                        let v = sigma.evaluate(x, &[t]).unwrap();
                        if re {
                            v.re
                        } else {
                            v.im
                        }
                    },
                    -big_r,
                    big_r,
                    &s,
                )
                .unwrap()
                .value
            };
            Complex64::new(part(true), part(false))
        }
        2 => {
            let part = |re: bool| {
                radial_quad(
                    |r| {
                        sphere_quad(
                            |w| {
                                let v = sigma.evaluate(x, &[r * w[0], r * w[1]]).unwrap();
                                if re {
                                    v.re
                                } else {
                                    v.im
                                }
                            },
                            2,
                            &s,
                        )
                        .unwrap()
                        .value
                            * r
                    },
                    0.0,
                    big_r,
                    &s,
                )
                .unwrap()
                .value
            };
            Complex64::new(part(true), part(false))
        }
        _ => unreachable!(),
    }
}

fn divergent(sigma: &ClassicalSymbol, x: &[f64], big_r: f64) -> Complex64 {
    let n = sigma.dim() as i64;
    sphere_components(sigma, x)
        .into_iter()
        .map(|(d, m)| {
            let qq = d + n;
            if qq == Order::from_integer(0) {
                m * big_r.ln()
            } else {
                let qf = *qq.numer() as f64 / *qq.denom() as f64;
                m * big_r.powf(qf) / qf
            }
        })
        .sum()
}

#[test]
fn residue_density_matches_sphere_quadrature() {
    for (dim, seed) in [(1, 1u64), (1, 2), (2, 3), (2, 4)] {
        let sigma = random_symbol_seeded(&SymbolShape::new(dim, q(1, 1), 3), seed);
        let x = vec![0.3; dim];
        let exact = residue_density(&sigma, &x).unwrap();
        let numeric = sphere_components(&sigma, &x)
            .into_iter()
            .find(|(d, _)| *d == Order::from_integer(-(dim as i64)))
            .map(|(_, v)| v)
            .unwrap_or_default();
        assert!((exact - numeric).norm() < 1e-11, "{exact} vs {numeric}");
    }
}

#[test]
fn finite_part_matches_ball_minus_divergences() {
    let integ = Integrator::new(spec()).unwrap();
    for (dim, order, seed) in [(1, q(1, 1), 10u64), (1, q(1, 2), 11), (2, q(0, 1), 12), (2, q(-1, 3), 13)] {
        let sigma = random_symbol_seeded(&SymbolShape::new(dim, order, 3), seed);
        let x = vec![-0.25; dim];
        let fp = finite_part(&sigma, &x, &integ, 1.0).unwrap();
        for big_r in [1.5, 3.0] {
            let oracle = ball(&sigma, &x, big_r) - divergent(&sigma, &x, big_r);
            let tol = 1e-9 * (1.0 + fp.value.scale);
            assert!((fp.value.value - oracle).norm() < tol, "dim {dim} R {big_r}: {} vs {oracle}", fp.value.value);
        }
    }
}

#[test]
fn cutoff_integral_matches_iterated_quadrature_in_one_dimension() {
    let integ = Integrator::new(spec()).unwrap();
    for seed in 20..23u64 {
        let sigma = random_symbol_seeded(&SymbolShape::new(1, q(0, 1), 2), seed);
        let fp = cutoff_integral(&sigma, &integ).unwrap();
        let s = QuadratureSpec { tol: 1e-11, ..spec() };
        let oracle_re = window_integrate(
            |x| (ball(&sigma, x, 2.0) - divergent(&sigma, x, 2.0)).re,
            1,
            &s,
        )
        .unwrap()
        .value;
        assert!((fp.value.re - oracle_re).abs() < 1e-8 * (1.0 + fp.scale));
    }
}

#[test]
fn reference_radius_shift_is_log_coefficient() {
    let integ = Integrator::new(spec()).unwrap();
    let sigma = random_symbol_seeded(&SymbolShape::new(1, q(1, 1), 3), 31);
    let res = residue(&sigma, &integ).unwrap();
    let base = cutoff_integral(&sigma, &integ).unwrap();
    for lambda in [0.5, 2.0, 3.0] {
        let shifted = cutoff_integral_at(&sigma, &integ, lambda).unwrap();
        let expect = res.value * lambda.ln();
        assert!((shifted.value - base.value - expect).norm() < 1e-9);
    }
}

#[test]
fn integration_by_parts_against_flux() {
    let integ = Integrator::new(spec()).unwrap();
    for (dim, order, seed) in [(1, q(0, 1), 40u64), (1, q(1, 2), 41), (2, q(-1, 1), 42), (2, q(1, 3), 43)] {
        let sigma = random_symbol_seeded(&SymbolShape::new(dim, order, 3), seed);
        for i in 0..dim {
            let c = ibp_defect(&sigma, i, &integ).unwrap();
            assert!(c.defect().norm() <= c.budget().max(1e-10), "{} > {}", c.defect(), c.budget());
            if !order.is_integer() {
                assert!(c.boundary_exact.is_zero());
            }
        }
    }
}

#[test]
fn log_coefficient_equals_residue_density() {
    for seed in 50..55u64 {
        let sigma = random_symbol_seeded(&SymbolShape::new(2, q(0, 1), 3), seed);
        assert_eq!(log_coefficient_exact(&sigma), residue_density_exact(&sigma));
    }
}

#[test]
fn translation_defect_two_routes() {
    let integ = Integrator::new(spec()).unwrap();
    let cases = [
        (1, q(0, 1), vec![big(1, 2)], 60u64),
        (1, q(0, 1), vec![big(1, 2)], 65),
        (1, q(0, 1), vec![big(-2, 3)], 66),
        (1, q(1, 1), vec![big(-1, 3)], 61),
        (1, q(1, 1), vec![big(1, 2)], 67),
        (2, q(0, 1), vec![big(1, 3), big(0, 1)], 68),
        (1, q(1, 2), vec![big(1, 2)], 62),
        (2, q(-1, 1), vec![big(1, 2), big(1, 4)], 63),
    ];
    let mut nontrivial = 0;
    for (dim, order, eta, seed) in cases {
        let sigma = random_symbol_seeded(&SymbolShape::new(dim, order, 2), seed);
        let numeric = translation_defect(&sigma, &eta, 8, &integ).unwrap();
        let taylor = translation_defect_taylor(&sigma, &eta).unwrap().integrate(&integ).unwrap();
        let diff = (numeric.value() - taylor.value).norm();
        assert!(diff < 1e-7 * (1.0 + numeric.translated.scale), "dim {dim}: {} vs {}", numeric.value(), taylor.value);
        if !order.is_integer() {
            assert!(numeric.value().norm() < 1e-7);
        }
        if taylor.value.norm() > 1e-3 {
            nontrivial += 1;
        }
    }
    assert!(nontrivial >= 2, "only {nontrivial} cases with a nonzero defect");
    let sigma = random_symbol_seeded(&SymbolShape::new(1, q(0, 1), 2), 64);
    let zero = translation_defect(&sigma, &[big(0, 1)], 4, &integ).unwrap();
    assert_eq!(zero.value(), Complex64::new(0.0, 0.0));
}

#[test]
fn sign_symbol_translation_defect() {
    // sigma = w(x) xi/|xi| chi: translating by eta adds 2 eta int w.
    use symcalc::{scalar::int, TermKey};
    let integ = Integrator::new(spec()).unwrap();
    let sigma = ClassicalSymbol::from_terms(1, q(0, 1), 0, [(TermKey::cut([0; 3], [1, 0, 0], q(-1, 1)), int(1))])
        .unwrap()
        .windowed();
    let w = integ.axis_integral(0, &smallvec_zero()).unwrap().value;
    let d = translation_defect(&sigma, &[big(1, 2)], 4, &integ).unwrap();
    assert!((d.value().re - w).abs() < 1e-9, "{} vs {w}", d.value());
    let t = translation_defect_taylor(&sigma, &[big(1, 2)]).unwrap().integrate(&integ).unwrap();
    assert!((t.value.re - w).abs() < 1e-12);
}

fn smallvec_zero() -> symcalc::symbol::Multiset {
    let mut m = symcalc::symbol::Multiset::new();
    m.push(0);
    m
}

#[test]
fn finite_part_channels_add_up() {
    let integ = Integrator::new(spec()).unwrap();
    for seed in 0..6u64 {
        let order = if seed % 2 == 0 { q(-1, 2) } else { q(1, 1) };
        let sigma = random_symbol_seeded(&SymbolShape::new(2, order, 2), 70 + seed);
        let x = [0.25, -0.5];
        let fp = finite_part(&sigma, &x, &integ, 1.0).unwrap();
        let sum = fp.compact_part.value + fp.per_degree_boundary.values().sum::<Complex64>();
        assert!((sum - fp.value.value).norm() < 1e-12 * (1.0 + fp.value.scale));
        for i in fp.per_degree_boundary.keys() {
            assert!(*i <= sigma.depth());
        }
    }
}
