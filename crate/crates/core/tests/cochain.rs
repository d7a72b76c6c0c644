//! Cyclic cochains on symbols: residue character, cut-off and cosphere
//! cochains, and the phi cocycle.

use symcalc::cochain::*;
use symcalc::forms::{cutoff_integral_form, ClassicalForm};
use symcalc::quadrature::{Integrator, QuadratureSpec};
use symcalc::random::{random_symbol_seeded, SymbolShape};
use symcalc::regint::Estimate;
use symcalc::scalar::q;
use symcalc::{ClassicalSymbol, Order};

fn integ() -> Integrator {
    Integrator::new(QuadratureSpec {
        tol: 1e-12,
        ..Default::default()
    })
    .unwrap()
}

fn args(orders: &[Order], seed: u64) -> Vec<ClassicalSymbol> {
    orders
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let shape = SymbolShape {
                max_poly_degree: 1,
                ..SymbolShape::new(1, m, 1)
            };
            random_symbol_seeded(&shape, seed * 31 + i as u64)
        })
        .collect()
}

fn zeros(k: usize) -> Vec<Order> {
    vec![q(0, 1); k]
}

/// Order 0 except for one order-1 slot; in one dimension d_xi kills every
/// degree-0 homogeneous function, so all-order-0 tuples have zero residues.
fn tilted(k: usize, slot: usize) -> Vec<Order> {
    let mut v = zeros(k);
    v[slot % k] = q(1, 1);
    v
}

/// Two order-1 slots: theta of two order-0 symbols loses two degrees in one
/// dimension, so phi_4 needs total order 2 to reach the residue.
fn tilted2(k: usize, slot: usize) -> Vec<Order> {
    let mut v = tilted(k, slot);
    v[(slot + 1 + slot / k) % k] = q(1, 1);
    v
}

fn within(e: &Estimate, floor: f64) -> bool {
    e.value.norm() <= e.error.max(floor)
}

#[test]
fn residue_cochain_vanishes_below_top_degree() {
    let integ = integ();
    let a = args(&zeros(2), 1);
    let chi = Evaluator::new(Flavor::Residue, 2, 1, &integ).unwrap();
    assert_eq!(chi.eval(&a).unwrap().value.norm(), 0.0);
}

#[test]
fn residue_character_properties() {
    let integ = integ();
    let mut nontrivial = 0;
    for seed in 0..10u64 {
        let a = args(&tilted(3, seed as usize), 100 + seed);
        let k = required_truncation(&a);
        let chi = Evaluator::new(Flavor::Residue, 3, k, &integ).unwrap();
        let v = chi.eval(&a).unwrap();
        if v.value.norm() > 1e-6 {
            nontrivial += 1;
        }
        // cyclicity
        let rot = vec![a[2].clone(), a[0].clone(), a[1].clone()];
        let w = chi.eval(&rot).unwrap();
        assert!((v.value - w.value).norm() <= v.diff_budget(&w).max(1e-12));
        // normalisation
        let mut unit = a.clone();
        unit[0] = ClassicalSymbol::one(1);
        assert!(within(&chi.eval(&unit).unwrap(), 1e-12));
        // b_* chi = 0
        let b = Hochschild {
            inner: Evaluator::new(Flavor::Residue, 3, k, &integ).unwrap(),
            product: Product::Star,
        };
        let four = args(&tilted(4, seed as usize), 200 + seed);
        assert!(within(&b.eval(&four).unwrap(), 1e-12));
        // B chi = 0
        let bb = operator_b(Evaluator::new(Flavor::Residue, 3, k, &integ).unwrap());
        assert!(within(&bb.eval(&a[..2]).unwrap(), 1e-12));
    }
    assert!(nontrivial >= 5, "{nontrivial}");
}

#[test]
fn b_squared_vanishes() {
    let integ = integ();
    let mut nontrivial = 0;
    for seed in 0..6u64 {
        let a = args(&tilted2(4, seed as usize), 300 + seed);
        let k = required_truncation(&a);
        let b1 = operator_b(Evaluator::new(Flavor::Phi, 5, k, &integ).unwrap());
        if b1.eval(&a).unwrap().value.norm() > 1e-6 {
            nontrivial += 1;
        }
        let bb = operator_b(operator_b(Evaluator::new(Flavor::Phi, 5, k, &integ).unwrap()));
        assert!(within(&bb.eval(&a[..3]).unwrap(), 1e-12));
    }
    assert!(nontrivial >= 2);
}

#[test]
fn b0_of_cutoff_is_cosphere() {
    let integ = integ();
    let mut nontrivial = 0;
    for seed in 0..10u64 {
        let orders = if seed % 3 == 2 { vec![q(1, 1), q(-1, 1)] } else { zeros(2) };
        let a = args(&orders, 400 + seed);
        for k in [1, 2] {
            let lhs = B0(Evaluator::new(Flavor::Cutoff, 3, k, &integ).unwrap()).eval(&a).unwrap();
            let rhs = Evaluator::new(Flavor::Cosphere, 2, k, &integ).unwrap().eval(&a).unwrap();
            assert!((lhs.value - rhs.value).norm() <= lhs.diff_budget(&rhs).max(1e-12), "{lhs:?} {rhs:?}");
            if rhs.value.norm() > 1e-6 {
                nontrivial += 1;
            }
        }
    }
    assert!(nontrivial >= 5, "{nontrivial}");
}

#[test]
fn b0_of_cutoff_vanishes_for_non_integer_total_order() {
    let integ = integ();
    for seed in 0..4u64 {
        let a = args(&[q(1, 2), q(0, 1)], 500 + seed);
        let v = B0(Evaluator::new(Flavor::Cutoff, 3, 2, &integ).unwrap()).eval(&a).unwrap();
        assert!(within(&v, 1e-12), "{v:?}");
    }
}

#[test]
fn cosphere_cochain_matches_stokes_channel() {
    let integ = integ();
    for seed in 0..5u64 {
        let a = args(&zeros(2), 600 + seed);
        let psi = Evaluator::new(Flavor::Cosphere, 2, 2, &integ).unwrap().eval(&a).unwrap();
        let w = chain_form(&a, 2).exterior_derivative();
        let fp = cutoff_integral_form(&w, &integ).unwrap();
        assert!((psi.value - fp.value).norm() <= psi.diff_budget(&fp).max(1e-12));
    }
}

#[test]
fn phi_relation_with_pointwise_coboundary() {
    let integ = integ();
    let mut nontrivial = 0;
    for seed in 0..10u64 {
        let a = args(&tilted2(4, seed as usize), 700 + seed);
        let k = required_truncation(&a);
        let b_phi2 = Hochschild {
            inner: Evaluator::new(Flavor::Phi, 3, k, &integ).unwrap(),
            product: Product::Pointwise,
        }
        .eval(&a)
        .unwrap();
        let big_b_phi4 = operator_b(Evaluator::new(Flavor::Phi, 5, k, &integ).unwrap()).eval(&a).unwrap();
        let r = b_phi2.value + big_b_phi4.value * 0.5;
        assert!(r.norm() <= b_phi2.error + 0.5 * big_b_phi4.error + 1e-12, "seed {seed}: {r}");
        if big_b_phi4.value.norm() > 1e-6 {
            nontrivial += 1;
        }
        let bbar = Hochschild {
            inner: Evaluator::new(Flavor::Phi, 3, k, &integ).unwrap(),
            product: Product::Mixed,
        }
        .eval(&a)
        .unwrap();
        assert!(within(&bbar, 1e-12), "{bbar:?}");
    }
    assert!(nontrivial >= 3, "{nontrivial}");
}

#[test]
fn phi_zero_is_residue_and_theta_of_constant_vanishes() {
    let integ = integ();
    let a = args(&[q(-1, 1)], 800);
    let phi0 = Evaluator::new(Flavor::Phi, 1, 0, &integ).unwrap().eval(&a).unwrap();
    let res = symcalc::regint::residue(&a[0], &integ).unwrap();
    assert_eq!(phi0.value, res.value);
    let mut b = args(&zeros(3), 801);
    b[2] = ClassicalSymbol::one(1);
    let k = required_truncation(&b);
    assert_eq!(Evaluator::new(Flavor::Phi, 3, k, &integ).unwrap().eval(&b).unwrap().value.norm(), 0.0);
}

#[test]
fn truncation_below_threshold_is_rejected() {
    let integ = integ();
    let a = args(&zeros(3), 900);
    assert!(Evaluator::new(Flavor::Residue, 3, 0, &integ).unwrap().eval(&a).is_err());
    assert!(Evaluator::new(Flavor::Residue, 3, 1, &integ).unwrap().eval(&a[..2]).is_err());
}

#[test]
fn theta_ratio_is_constant() {
    let integ = integ();
    let mut ratios = Vec::new();
    for seed in 0..16u64 {
        let a = args(&tilted(3, seed as usize), 1000 + seed);
        let t = theta_ratio_trial(&a, &integ, seed).unwrap();
        if let Some(r) = t.ratio {
            ratios.push(r);
        }
    }
    assert!(ratios.len() >= 10, "{}", ratios.len());
    let spread = relative_spread(&ratios);
    eprintln!("theta ratio {} spread {spread:e}", ratios[0]);
    assert!(spread <= 1e-6, "{ratios:?}");
}

#[test]
fn evaluations_are_reproducible() {
    let integ = integ();
    let a = args(&zeros(3), 1100);
    let chi = Evaluator::new(Flavor::Cutoff, 3, 2, &integ).unwrap();
    let v1 = chi.evaluate(&a).unwrap();
    let v2 = chi.evaluate(&a).unwrap();
    assert_eq!(v1.value.value.re.to_bits(), v2.value.value.re.to_bits());
    assert_eq!(v1.value.value.im.to_bits(), v2.value.value.im.to_bits());
    let fresh = integ_fresh();
    let v3 = Evaluator::new(Flavor::Cutoff, 3, 2, &fresh).unwrap().evaluate(&a).unwrap();
    assert_eq!(v1.value.value, v3.value.value);
    let _ = ClassicalForm::function(&a[0]);
}

fn integ_fresh() -> Integrator {
    integ()
}

#[test]
fn pruned_chains_keep_the_residue() {
    let integ = integ();
    for seed in 0..3u64 {
        let a = args(&tilted(3, seed as usize), 1200 + seed);
        let k = required_truncation(&a);
        let full = symcalc::forms::residue_form(&chain_form(&a, k), &integ).unwrap();
        let pruned = symcalc::forms::residue_form(&chain_form_asymptotic(&a, k), &integ).unwrap();
        assert!((full.value - pruned.value).norm() <= full.diff_budget(&pruned).max(1e-12));
        assert!(full.value.norm() > 1e-6);
        let a3 = args(&tilted2(3, seed as usize), 1300 + seed);
        let k3 = required_truncation(&a3);
        let full = symcalc::regint::residue(&theta_chain(&a3, k3), &integ).unwrap();
        let pruned = symcalc::regint::residue(&theta_chain_asymptotic(&a3, k3), &integ).unwrap();
        assert!((full.value - pruned.value).norm() <= full.diff_budget(&pruned).max(1e-12));
    }
}
