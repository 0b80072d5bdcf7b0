//! CSV and manifest formats.

use echolab::io::{format_float, read_series, read_table, write_series, write_table, Table};
use echolab::manifest::{Manifest, RunRecord, MANIFEST_SCHEMA_VERSION};
use echolab::{ExperimentConfig, LabError};
use echolab_core::EchoSeries;
use proptest::prelude::*;

proptest! {
    #[test]
    fn floats_round_trip_exactly(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let back: f64 = format_float(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn series_round_trip(ms in prop::collection::vec(0.0f64..=1.0, 1..40), size in 1usize..1000) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let times: Vec<f64> = (0..ms.len()).map(|t| t as f64 * 0.25).collect();
        let se: Vec<f64> = ms.iter().map(|m| m * 1e-3).collect();
        let s = EchoSeries::new(times, ms, se, size).unwrap().with_meta("N", 64);
        write_series(&path, &s, &[("config.seed".into(), "3".into())]).unwrap();
        let back = read_series(&path).unwrap();
        prop_assert_eq!(&back.times, &s.times);
        prop_assert_eq!(&back.m, &s.m);
        prop_assert_eq!(&back.stderr, &s.stderr);
        prop_assert_eq!(back.ensemble_size, size);
        prop_assert_eq!(back.metadata.get("N").map(String::as_str), Some("64"));
    }
}

#[test]
fn header_lines_precede_the_column_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let mut t = Table::new(&["x", "y"]);
    t.meta.push(("a".into(), "1".into()));
    t.rows.push(vec![1.0, 2.5e-7]);
    write_table(&path, &t).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "# a=1\nx,y\n1,2.5e-7\n");
    assert_eq!(read_table(&path).unwrap(), t);
}

#[test]
fn malformed_and_missing_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "# k=v\nt,M\n0,1\n1,oops\n").unwrap();
    assert!(matches!(read_table(&path), Err(LabError::Format { .. })));
    std::fs::write(&path, "x,y\n0,1\n").unwrap();
    assert!(matches!(read_series(&path), Err(LabError::Format { .. })));
    assert!(matches!(
        read_table(&dir.path().join("absent.csv")),
        Err(LabError::MissingInput(_))
    ));
}

#[test]
fn manifest_is_versioned_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    let cfg = ExperimentConfig::from_toml_with(
        "name = \"m\"\nkind = \"kicked-echo\"\nseed = 9\n[sweep]\nn = [8]\nsigma = [1.0]\n",
        &[],
    )
    .unwrap();
    let mut m = Manifest::new(&cfg);
    let mut r = RunRecord::new("r1").param("N", 8);
    r.number("fit_rate", 0.5);
    r.number("undefined", f64::NAN);
    m.runs.push(r);
    m.write(&path).unwrap();
    let back = Manifest::read(&path).unwrap();
    assert_eq!(back.schema_version, MANIFEST_SCHEMA_VERSION);
    assert_eq!(back.seed, 9);
    assert_eq!(back.runs[0].result_f64("fit_rate"), Some(0.5));
    assert_eq!(back.runs[0].result_f64("undefined"), None);

    let text = std::fs::read_to_string(&path).unwrap();
    let bumped = text.replacen(
        &format!("\"schema_version\": {MANIFEST_SCHEMA_VERSION}"),
        "\"schema_version\": 999",
        1,
    );
    std::fs::write(&path, bumped).unwrap();
    assert!(Manifest::read(&path).is_err());
}
