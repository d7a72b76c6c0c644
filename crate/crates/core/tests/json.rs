use proptest::prelude::*;
use symcalc::json::*;
use symcalc::random::{random_form_seeded, random_symbol_seeded, SymbolShape};
use symcalc::scalar::{q, rat};
use symcalc::SymError;

#[test]
fn minimal_symbol() {
    let s = parse_symbol(
        r#"{"dim": 1, "order": "-1", "depth": 0, "windowed": true,
            "terms": [{"xcoeff": {"[0]": "1"}, "angular": {"[0]": "1/3"}, "radial_power": "-1"}]}"#,
    )
    .unwrap();
    assert_eq!(s.order(), q(-1, 1));
    assert!(s.is_windowed());
    let (_, c) = s.terms().iter().next().unwrap();
    assert_eq!(*c, rat(1, 3));
    let back = parse_symbol(&symbol_to_string(&s)).unwrap();
    assert_eq!(back, s);
    assert!(symbol_to_string(&s).contains("\"1/3\""));
}

#[test]
fn polynomial_products_expand() {
    let s = parse_symbol(
        r#"{"dim": 2, "order": "1", "depth": 1,
            "terms": [{"xcoeff": {"(1,0)": "2", "0,1": "1"}, "angular": {"[1,0]": "1", "[0,1]": ["0", "1"]}, "radial_power": "0"}]}"#,
    )
    .unwrap();
    assert_eq!(s.terms().len(), 4);
    assert!(!s.is_windowed());
}

#[test]
fn schema_errors_are_reported_with_paths() {
    let e = parse_symbol(r#"{"dim": 1, "order": "0", "depth": 0, "terms": [{"angular": {"[0]": "1"}}]}"#).unwrap_err();
    assert!(e.to_string().contains("terms[0]"), "{e}");
    let e = parse_symbol("{\"dim\": 1,\n \"order\": }").unwrap_err();
    assert!(e.to_string().contains("line 2"), "{e}");
    let e = parse_symbol(r#"{"dim": 1, "order": "0", "depth": 0, "terms": [{"xcoeff": {"[0,1]": "1"}, "angular": {"[0]": "1"}}]}"#)
        .unwrap_err();
    assert!(matches!(e, SymError::Parse(_)));
    // degree 1 term in an order-0 symbol
    let e = parse_symbol(r#"{"dim": 1, "order": "0", "depth": 0, "terms": [{"xcoeff": {"[0]": "1"}, "angular": {"[1]": "1"}}]}"#);
    assert!(e.is_err());
    // a plain polynomial cannot carry a radial power
    let e = parse_symbol(
        r#"{"dim": 1, "order": "0", "depth": 0, "terms": [{"xcoeff": {"[0]": "1"}, "angular": {"[0]": "1"}, "radial_power": "-1", "cutoff": []}]}"#,
    );
    assert!(e.is_err());
}

#[test]
fn form_degree_and_order_are_checked() {
    let sym = r#"{"dim": 1, "order": "0", "depth": 0, "windowed": true, "terms": [{"xcoeff": {"[0]": "1"}, "angular": {"[0]": "1"}}]}"#;
    let ok = format!(r#"{{"dim": 1, "degree": 1, "order": "0", "coeffs": [{{"dx": [1], "dxi": [], "symbol": {sym}}}]}}"#);
    let w = parse_form(&ok).unwrap();
    assert_eq!(w.degree(), 1);
    let bad_degree = format!(r#"{{"dim": 1, "degree": 2, "order": "0", "coeffs": [{{"dx": [1], "dxi": [], "symbol": {sym}}}]}}"#);
    assert!(matches!(parse_form(&bad_degree), Err(SymError::FormDegree { .. })));
    let bad_order = format!(r#"{{"dim": 1, "degree": 1, "order": "0", "coeffs": [{{"dx": [], "dxi": [1], "symbol": {sym}}}]}}"#);
    assert!(matches!(parse_form(&bad_order), Err(SymError::FormCoefficientOrder { .. })));
}

#[test]
fn generator_output_validates() {
    for seed in 0..1000u64 {
        let dim = 1 + (seed % 3) as usize;
        let order = q((seed % 7) as i64 - 3, 1 + (seed % 2) as i64);
        let s = random_symbol_seeded(&SymbolShape::new(dim, order, 2), seed);
        assert_eq!(s.order(), order);
        s.validate().unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbols_round_trip(seed in 0u64..10_000, dim in 1usize..=3, num in -4i64..4, den in 1i64..4) {
        let s = random_symbol_seeded(&SymbolShape::new(dim, q(num, den), 2), seed);
        let text = symbol_to_string(&s);
        prop_assert_eq!(parse_symbol(&text).unwrap(), s.clone());
        // derivatives carry window and cut-off derivative factors
        let d = s.partial_x(0).partial_xi(dim - 1);
        prop_assert_eq!(parse_symbol(&symbol_to_string(&d)).unwrap(), d);
        prop_assert_eq!(symbol_to_string(&random_symbol_seeded(&SymbolShape::new(dim, q(num, den), 2), seed)), text);
    }

    #[test]
    fn forms_round_trip(seed in 0u64..10_000, dim in 1usize..=2, degree in 0usize..=4) {
        let degree = degree.min(2 * dim);
        let w = random_form_seeded(&SymbolShape::new(dim, q(1, 2), 1), degree, seed);
        prop_assert_eq!(parse_form(&form_to_string(&w)).unwrap(), w);
    }
}
