use std::collections::BTreeSet;

use rlct::suite::{run_suite, SuiteConfig, SUITES};

#[test]
fn readme_lists_every_check_reference() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let mut refs = BTreeSet::new();
    for suite in SUITES {
        let mut cfg = SuiteConfig::new(*suite, 3);
        cfg.samples = 2;
        for c in run_suite(&cfg).unwrap() {
            refs.insert(c.reference);
        }
    }
    let missing: Vec<&String> = refs.iter().filter(|r| !readme.contains(r.as_str())).collect();
    assert!(missing.is_empty(), "missing from README: {missing:?}");
    assert!(refs.len() >= 19);
}
