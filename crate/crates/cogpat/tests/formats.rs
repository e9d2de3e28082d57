use std::path::{Path, PathBuf};

use cogpat::formats::{
    self, emit, parse, parse_fixture, CofoFile, DdsFile, EvolveFile, Fixture, FormatError, MetagraphFile, PointsFile,
    RelalgFile, RuleSetFile, SubpatternFile,
};
use cogpat_core::dds::exact_dp;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn round_trip<T: Fixture>(name: &str) {
    let path = fixture(name);
    let text = formats::read_text(&path).unwrap();
    let (file, _) = parse_fixture::<T>(&text, &path).unwrap_or_else(|e| panic!("{e}"));
    assert_eq!(emit(&file), text, "{name} is not in canonical form");
}

#[test]
fn every_fixture_round_trips_byte_identically() {
    round_trip::<DdsFile>("gd1.json");
    round_trip::<DdsFile>("gd1-coin.json");
    round_trip::<MetagraphFile>("abc.json");
    round_trip::<MetagraphFile>("likes.json");
    round_trip::<RuleSetFile>("rules.json");
    round_trip::<EvolveFile>("evolve.json");
    round_trip::<PointsFile>("two-pairs.json");
    round_trip::<PointsFile>("line5.json");
    round_trip::<RelalgFile>("list-sum.json");
    round_trip::<RelalgFile>("coin-change.json");
    round_trip::<SubpatternFile>("maxmin.json");
    round_trip::<SubpatternFile>("union.json");
    round_trip::<SubpatternFile>("abab.json");
    round_trip::<SubpatternFile>("concat.json");
    round_trip::<CofoFile>("mirror.json");
}

#[test]
fn fixture_directory_is_fully_covered() {
    let n = std::fs::read_dir(fixture("")).unwrap().count();
    assert_eq!(n, 15, "new fixture files need a round-trip entry");
}

#[test]
fn gd1_fixture_solves_to_five() {
    let (_, p) = formats::load::<DdsFile>(&fixture("gd1.json")).unwrap();
    let vf = exact_dp(&p).unwrap();
    let s0 = &p.initial()[0];
    assert_eq!(vf.value(1, s0), Some(5.0));
    let (_, coin) = formats::load::<DdsFile>(&fixture("gd1-coin.json")).unwrap();
    let vf = exact_dp(&coin).unwrap();
    assert!((vf.value(1, "A").unwrap() - 5.0).abs() < 1e-12);
}

fn schema_field<T: Fixture>(text: &str) -> String {
    match parse_fixture::<T>(text, Path::new("t.json")) {
        Err(e @ FormatError::Schema { .. }) => {
            assert!(e.to_string().contains("t.json"), "{e}");
            e.field().unwrap().to_string()
        }
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("accepted invalid input"),
    }
}

#[test]
fn truncated_file_is_a_schema_error() {
    let text = formats::read_text(&fixture("gd1.json")).unwrap();
    let cut = &text[..text.find("\"table\"").unwrap()];
    let e = parse::<DdsFile>(cut, Path::new("cut.json")).unwrap_err();
    assert!(matches!(e, FormatError::Schema { .. }), "{e}");
}

#[test]
fn missing_field_is_named() {
    let f = schema_field::<DdsFile>(r#"{"stages": 1, "initial": ["A"]}"#);
    assert!(f == "." || f.is_empty() || f.contains("table"), "{f}");
    let e = parse::<DdsFile>(r#"{"stages": 1, "initial": ["A"]}"#, Path::new("x.json")).unwrap_err();
    assert!(e.to_string().contains("table"), "{e}");
}

#[test]
fn unknown_and_mistyped_fields_are_located() {
    let f = schema_field::<DdsFile>(
        r#"{"stages": 1, "initial": ["A"], "table": [{"stage": 1, "state": "A", "actions": [{"action": "a", "reward": "x"}]}]}"#,
    );
    assert_eq!(f, "table[0].actions[0].reward");
    let e = parse::<DdsFile>(
        r#"{"stages": 1, "initial": [], "table": [], "extra": 1}"#,
        Path::new("x.json"),
    )
    .unwrap_err();
    assert!(e.to_string().contains("extra"), "{e}");
}

#[test]
fn semantic_errors_carry_field_paths() {
    let bad_p = r#"{"stages": 2, "initial": ["A"], "table": [
        {"stage": 1, "state": "A", "actions": [{"action": "a", "reward": 1, "next": [{"state": "B", "p": 0.4}]}]},
        {"stage": 2, "state": "B", "actions": [{"action": "b", "reward": 1}]}]}"#;
    assert_eq!(schema_field::<DdsFile>(bad_p), "table[0].actions[0].next");
    let bad_stage = r#"{"stages": 1, "initial": ["A"], "table": [{"stage": 3, "state": "A", "actions": []}]}"#;
    assert_eq!(schema_field::<DdsFile>(bad_stage), "table[0].stage");
    assert_eq!(schema_field::<PointsFile>(r#"{"k": 9, "points": [[0.0], [1.0]]}"#), "k");
    assert_eq!(
        schema_field::<EvolveFile>(
            r#"{"length": 0, "population": 4, "variation": {"kind": "ga", "mutation": 0.1, "crossover": 0.5}}"#
        ),
        "length"
    );
}

#[test]
fn empty_document_is_rejected() {
    assert!(parse::<DdsFile>("", Path::new("e.json")).is_err());
    assert!(parse::<DdsFile>("{}", Path::new("e.json")).is_err());
}
