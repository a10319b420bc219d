use qrf_core::harness::{
    distribution_command, example_sn, run_suite, CheckId, ExampleConfig, StateSpec, SuiteConfig, SuiteReport,
    BUILTIN_NAMES, SCHEMA,
};
use qrf_core::representations::{RepKind, RepSpec};
use qrf_core::Error;

fn quick(group: &str) -> SuiteConfig {
    let mut c = SuiteConfig::new(group);
    c.samples = 4;
    c
}

#[test]
fn every_builtin_passes_every_check() {
    for name in BUILTIN_NAMES {
        let r = run_suite(&quick(name)).unwrap();
        assert!(r.pass, "{name}: {}", r.to_json());
        assert_eq!(r.schema, SCHEMA);
        let ids: Vec<&str> = r.verdicts.iter().map(|v| v.id.as_str()).collect();
        let expected: Vec<&str> = r.metadata.parameters["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap())
            .collect();
        assert_eq!(ids, expected);
        assert!(r.verdicts.iter().all(|v| !v.anchor.is_empty()));
    }
}

#[test]
fn d4_is_not_principal() {
    let mut c = quick("d4");
    c.checks = vec![CheckId::SixWay];
    let r = run_suite(&c).unwrap();
    let six = &r.verdicts[0].detail;
    assert_eq!(six["classification"], "non-principal");
    assert_eq!(six["expected_effect_norm"], 0.5);
    assert!((six["effect_norm_max"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((six["effect_norm_min"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn base_point_does_not_change_verdicts() {
    for base in 0..3 {
        let mut c = quick("s3");
        c.base_point = Some(base);
        let r = run_suite(&c).unwrap();
        assert!(r.pass);
        assert_eq!(r.metadata.parameters["base_point"], base);
    }
}

#[test]
fn permutation_system_rep_on_s4() {
    let mut c = quick("s4");
    c.system_rep = Some(RepSpec {
        group: None,
        kind: RepKind::Permutation,
        factor_dim: None,
        generator_matrices: None,
    });
    let r = run_suite(&c).unwrap();
    assert!(r.pass);
    assert!(r.verdict("tensor-factor").is_none());
    assert_eq!(r.metadata.parameters["system_dim"], 4);
}

#[test]
fn reports_round_trip_through_json() {
    let r = run_suite(&quick("z4")).unwrap();
    let back: SuiteReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back.verdicts, r.verdicts);
    assert_eq!(back.metadata, r.metadata);
    assert!(back.timing.is_empty());
    assert!(!r.timing.is_empty());
}

#[test]
fn seeds_change_numbers_not_verdicts() {
    let mut a = quick("s3");
    a.checks = vec![CheckId::Homomorphism];
    let mut b = a.clone();
    b.seed = 99;
    let (ra, rb) = (run_suite(&a).unwrap(), run_suite(&b).unwrap());
    assert!(ra.pass && rb.pass);
    assert_ne!(ra.metadata.spec_hash, rb.metadata.spec_hash);
    assert_eq!(run_suite(&a).unwrap().to_json(), ra.to_json());
}

#[test]
fn malformed_group_file_is_a_config_error() {
    let dir = tempfile_dir();
    let path = dir.join("broken.json");
    std::fs::write(&path, r#"{"symbols": 2, "generators": [[0, 2]]}"#).unwrap();
    let err = run_suite(&quick(path.to_str().unwrap())).unwrap_err();
    assert!(
        matches!(err, Error::Config { ref field, .. } if field == "group"),
        "{err}"
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn intransitive_group_file_is_rejected() {
    let dir = tempfile_dir();
    let path = dir.join("z2.json");
    std::fs::write(&path, r#"{"symbols": 3, "generators": [[1, 0, 2]]}"#).unwrap();
    let err = run_suite(&quick(path.to_str().unwrap())).unwrap_err();
    assert!(
        matches!(err, Error::Config { ref field, .. } if field == "group"),
        "{err}"
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn example_suite_at_n4() {
    let r = example_sn(&ExampleConfig {
        n: 4,
        samples: 2,
        ..Default::default()
    })
    .unwrap();
    assert!(r.pass, "{}", r.to_json());
    assert_eq!(r.verdict("stabiliser-order").unwrap().detail["stabiliser_order"], 6);
}

#[test]
fn distributions_over_both_spaces() {
    let r = distribution_command("s4", None, &StateSpec::Localized(0)).unwrap();
    assert_eq!(r.over_x.len(), 4);
    assert_eq!(r.over_g.len(), 24);
    let mass: f64 = r.over_g.iter().map(|p| p.probability).sum();
    assert!((mass - 1.0).abs() < 1e-12);
    let support = r.over_g.iter().filter(|p| p.probability > 1e-12).count();
    assert_eq!(support, 6);
    assert!(r
        .over_g
        .iter()
        .all(|p| p.probability < 1e-12 || (p.probability - 1.0 / 6.0).abs() < 1e-12));
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!(
        "qrf-it-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&d).unwrap();
    d
}
