use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splforge_core::dsl::{
    parse_configuration, parse_model, parse_model_full, serialize_configuration, serialize_model, webspl,
    DiagnosticCode, WEBSPL_FM,
};
use splforge_core::testing::{random_model, random_partial};

#[test]
fn webspl_round_trips() {
    let m = webspl();
    let text = serialize_model(&m);
    let again = parse_model(&text).unwrap();
    assert_eq!(again, m);
    assert_eq!(serialize_model(&again), text);
    assert_ne!(text, WEBSPL_FM, "canonical form drops comments");
}

#[test]
fn random_models_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd51_0001);
    for _ in 0..500 {
        let m = random_model(&mut rng, 20);
        let text = serialize_model(&m);
        let parsed = parse_model(&text).unwrap_or_else(|d| panic!("{text}\n{d:?}"));
        assert_eq!(parsed, m, "{text}");
        assert_eq!(serialize_model(&parsed), text);
    }
}

#[test]
fn configurations_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd51_0002);
    for _ in 0..200 {
        let m = random_model(&mut rng, 15);
        let c = random_partial(&mut rng, &m);
        let text = serialize_configuration(&c);
        assert_eq!(parse_configuration(&text, &m).unwrap(), c);
    }
}

fn codes(text: &str) -> Vec<DiagnosticCode> {
    let (_, diags) = parse_model_full(text, "t.fm");
    diags.into_iter().map(|d| d.code).collect()
}

#[test]
fn each_error_has_its_code() {
    assert_eq!(codes("model M\nfeature R {\n  optional feature A\n  optional feature A\n}\n"), [DiagnosticCode::DuplicateFeature]);
    assert_eq!(codes("model M\nfeature R\nrequires R Ghost\n"), [DiagnosticCode::UnknownFeature]);
    assert_eq!(codes("model M\nfeature R {\n  optional feature A\n}\nrequires A A\n"), [DiagnosticCode::SelfReference]);
    assert_eq!(codes("model M\nfeature R\nfeature S\n"), [DiagnosticCode::MultipleRoots]);
    assert_eq!(codes("model M\nfeature R {\n"), [DiagnosticCode::Syntax]);
}

#[test]
fn diagnostics_carry_positions() {
    let (model, diags) = parse_model_full("model M\nfeature R {\n  optional feature A\n  optional feature A\n}\n", "m.fm");
    assert!(model.is_none());
    assert_eq!(diags[0].span.line, 4);
    assert!(diags[0].to_string().starts_with("m.fm:4:"));
}

proptest! {
    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_model_full(&text, "fuzz.fm");
    }

    #[test]
    fn parser_never_panics_on_near_valid_input(
        noise in prop::collection::vec(prop::sample::select(vec![
            "model", "feature", "mandatory", "optional", "alt", "or", "group", "requires", "excludes",
            "module", "layer", "{", "}", ",", "=>", "\n", "A", "B", "\"m\"", "@v2", "XHTML", "#c\n",
        ]), 0..40)
    ) {
        let text = noise.join(" ");
        let _ = parse_model_full(&text, "fuzz.fm");
    }
}
