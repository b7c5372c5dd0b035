use moead_core::tuner::{changed_parameters, make_variants, parse_variants, variants_text, BASE_NAME};
use moead_core::AlgoConfig;

const GOLDEN: &str = include_str!("golden/variants.txt");

#[test]
fn variants_text_matches_golden() {
    assert_eq!(variants_text(&AlgoConfig::auto_moead()), GOLDEN);
}

#[test]
fn golden_parses_back_to_variants() {
    let base = AlgoConfig::auto_moead();
    let parsed = parse_variants(GOLDEN).unwrap();
    assert_eq!(parsed[0], (BASE_NAME.to_string(), base.clone()));
    assert_eq!(parsed[1..], make_variants(&base)[..]);
}

#[test]
fn each_variant_is_valid_and_differs() {
    let base = AlgoConfig::auto_moead();
    let variants = make_variants(&base);
    assert_eq!(variants.len(), 7);
    for (name, config) in &variants {
        let changed = changed_parameters(&base, config);
        assert!(!changed.is_empty(), "{name}");
        config.validate().unwrap();
    }
}
