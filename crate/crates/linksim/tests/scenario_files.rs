use std::path::PathBuf;

use fcwave::chain::{processing, Link, Processing};
use fcwave::scenario::{ChannelSpec, Scenario};
use fcwave::{load_scenario, SimError};

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn every_shipped_scenario_loads_and_builds() {
    let mut count = 0;
    for entry in std::fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let s = load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(path.file_stem().unwrap().to_str().unwrap(), s.id);
            Link::new(&s).unwrap();
            if let ChannelSpec::Tdl {
                profile: Some(p), ..
            } = &s.channel
            {
                assert!(p.exists(), "{}", p.display());
            }
            count += 1;
        }
    }
    assert!(count >= 5);
}

#[test]
fn config_5_uses_short_tx_transform() {
    let s = load_scenario(scenarios_dir().join("prb1_awgn_async_cfg5.json")).unwrap();
    let (tx, rx) = processing(&s);
    assert_eq!(tx, Processing::Discontinuous { l: 16 });
    assert_eq!(rx, Processing::Continuous { l: 128 });
    let link = Link::new(&s).unwrap();
    assert_eq!(link.tx.l(1024), 16);
    assert_eq!(link.rx.l(1024), 128);
}

#[test]
fn serialized_scenario_parses_back() {
    let s = load_scenario(scenarios_dir().join("prb4_tdlc300_async_cfg4.json")).unwrap();
    let back = Scenario::from_json(&s.to_json(), "mem".as_ref()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn missing_and_unknown_fields_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"id":"x","filtering":1,"channel":{"kind":"awgn"},"modulation":"qpsk",
            "snr_db":[1.0],"drops":1,"seed":0}"#,
    )
    .unwrap();
    let err = load_scenario(&path).unwrap_err();
    assert!(matches!(err, SimError::Parse { .. }));
    assert!(err.to_string().contains("band"), "{err}");

    std::fs::write(
        &path,
        r#"{"id":"x","band":"prb1","filtering":1,"channel":{"kind":"awgn"},"modulation":"qpsk",
            "snr_db":[1.0],"drops":1,"seed":0,"colour":"red"}"#,
    )
    .unwrap();
    assert!(load_scenario(&path)
        .unwrap_err()
        .to_string()
        .contains("colour"));
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_scenario("/nonexistent/scenario.json").unwrap_err();
    assert!(matches!(err, SimError::Io { .. }), "{err}");
}

#[test]
fn relative_profile_resolves_next_to_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.txt"), "0 0\n100 -3\n").unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"id":"s","band":"prb4","filtering":3,"channel":{"kind":"tdl","profile":"p.txt","rms_ds_ns":300},
            "modulation":"16qam","snr_db":[10],"drops":1,"seed":0}"#,
    )
    .unwrap();
    let s = load_scenario(&path).unwrap();
    match s.channel {
        ChannelSpec::Tdl {
            profile: Some(p), ..
        } => assert_eq!(p, dir.path().join("p.txt")),
        other => panic!("{other:?}"),
    }
}
