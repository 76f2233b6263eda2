mod common;

use adelic_zeta::field::{FieldFile, NumberFieldData};
use adelic_zeta::io::{load_grid, load_lattice, parse_complex, parse_lattice};
use adelic_zeta::{load_field, Error};
use common::fixture;
use std::path::Path;

fn gaussian_file() -> FieldFile {
    let text = std::fs::read_to_string(fixture("fields/q_i.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn invariant_of(f: &FieldFile) -> &'static str {
    match NumberFieldData::from_file_struct(f) {
        Err(Error::Invariant { invariant, .. }) => invariant,
        other => panic!("expected an invariant violation, got {other:?}"),
    }
}

#[test]
fn all_fixture_fields_validate() {
    for (name, n, h, w) in [("q", 1, 1, 2), ("q_i", 2, 1, 4), ("q_sqrt5", 2, 1, 2), ("q_sqrt2", 2, 1, 2), ("q_sqrt_m3", 2, 1, 6)] {
        let f = load_field(fixture(&format!("fields/{name}.json"))).unwrap();
        assert_eq!((f.degree, f.class_number().unwrap(), f.roots_of_unity), (n, h, w), "{name}");
    }
    let f = load_field(fixture("fields/q_sqrt5.json")).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((f.regulator_value().unwrap() - phi.ln()).abs() < 1e-14);
}

#[test]
fn broken_fields_are_rejected() {
    let mut f = gaussian_file();
    f.discriminant = 4;
    assert!(NumberFieldData::from_file_struct(&f).is_err());

    let mut f = gaussian_file();
    f.r1 = 1;
    assert!(NumberFieldData::from_file_struct(&f).is_err());

    let mut f = gaussian_file();
    f.discriminant = -8;
    assert!(!invariant_of(&f).is_empty());

    let mut f = gaussian_file();
    f.inv_different_embedding[0][0] = serde_json::from_str("\"0.5\"").unwrap();
    assert!(!invariant_of(&f).is_empty());

    let mut f = gaussian_file();
    f.class_reps = None;
    let data = NumberFieldData::from_file_struct(&f).unwrap();
    assert!(matches!(data.class_number(), Err(Error::MissingData(_))));
}

#[test]
fn malformed_json_is_a_parse_error() {
    assert!(matches!(NumberFieldData::from_json("{\"degree\": 1"), Err(Error::Parse(_))));
    assert!(matches!(NumberFieldData::from_json("{\"degree\": 1, \"bogus\": 2}"), Err(Error::Parse(_))));
    assert!(matches!(load_field("/nonexistent/field.json"), Err(Error::Io { .. })));
}

#[test]
fn lattice_files() {
    let l = load_lattice(fixture("lattices/o_sqrt5.json")).unwrap();
    assert_eq!((l.rank_over_field(), l.z_rank()), (1, 2));
    assert!(l.degree().abs() < 1e-12);
    let two = load_lattice(fixture("lattices/two_z.json")).unwrap();
    assert!((two.degree() + 2f64.ln()).abs() < 1e-15);
    assert!(parse_lattice(r#"{"field": "Q", "rank_over_field": 1, "generator": [["0"]]}"#, Path::new(".")).is_err());
    assert!(parse_lattice(r#"{"field": "Q", "rank_over_field": 2, "generator": [["1", "0"], ["1"]]}"#, Path::new(".")).is_err());
    assert!(parse_lattice(r#"{"field": "Q", "rank_over_field": 1, "generator": [["x"]]}"#, Path::new(".")).is_err());
}

#[test]
fn grids_and_complex_arguments() {
    let dir = std::env::temp_dir().join("adelic-zeta-grid-test");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("grid.json");
    std::fs::write(&p, "[[2, 0], [0.5, 3.25]]").unwrap();
    let g = load_grid(&p).unwrap();
    assert_eq!(g.len(), 2);
    assert_eq!((g[1].re, g[1].im), (0.5, 3.25));
    assert_eq!(parse_complex("2,0").unwrap().re, 2.0);
    assert_eq!(parse_complex("-0.5").unwrap().re, -0.5);
    assert!(parse_complex("a,b").is_err());
}
