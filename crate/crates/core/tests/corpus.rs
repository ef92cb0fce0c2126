mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use modcheck_core::litmus::{Expectation, LitmusTest};
use modcheck_core::verify::{verify_litmus, Conformance, VerifyOptions};

fn parse(text: &str) -> LitmusTest {
    modcheck_core::litmus::parse_litmus(text).unwrap()
}

#[test]
fn oracle_classics() {
    let sb = parse("test sb mcm SC expect forbidden\ni1: 0 W x 1\ni2: 0 R y 0\ni3: 1 W y 1\ni4: 1 R x 0\n");
    assert!(!sc_observable(&sb));
    assert!(tso_observable(&sb));

    let mp = parse("test mp mcm SC expect forbidden\ni1: 0 W x 1\ni2: 0 W y 1\ni3: 1 R y 1\ni4: 1 R x 0\n");
    assert!(!sc_observable(&mp));
    assert!(!tso_observable(&mp));

    let fenced = parse(
        "test f mcm TSO expect forbidden\ni1: 0 W x 1\ni2: 0 F.w.r\ni3: 0 R y 0\ni4: 1 W y 1\ni5: 1 F.rw.rw\ni6: 1 R x 0\n",
    );
    assert!(!tso_observable(&fenced));
    // A fence that does not order writes before reads leaves the buffer alone.
    let weak = parse(
        "test f mcm TSO expect permitted\ni1: 0 W x 1\ni2: 0 F.r.rw\ni3: 0 R y 0\ni4: 1 W y 1\ni5: 1 R x 0\n",
    );
    assert!(tso_observable(&weak));
}

#[test]
fn oracle_single_thread_reads_own_writes() {
    let t = parse("test t mcm TSO expect permitted\ni1: 0 W x 1\ni2: 0 R x 1\ni3: 0 W x 2\ni4: 0 R x 2\n");
    assert!(sc_observable(&t));
    assert!(tso_observable(&t));
    let stale = parse("test t mcm TSO expect forbidden\ni1: 0 W x 1\ni2: 0 W x 2\ni3: 0 R x 1\n");
    assert!(!sc_observable(&stale));
    assert!(!tso_observable(&stale));
}

#[test]
fn corpus_shape() {
    let sc = corpus("SC");
    let tso = corpus("TSO");
    assert!(sc.len() + tso.len() >= 30);
    let names: BTreeSet<&str> = sc.iter().chain(&tso).map(|(_, t)| t.name.as_str()).collect();
    for required in ["sb", "mp", "iriw", "corr", "coww", "cowr", "corw"] {
        assert!(names.contains(required), "{required} missing");
    }
    for (path, t) in sc.iter().chain(&tso) {
        assert!(t.instructions.len() <= 8, "{}", path.display());
        assert_eq!(path.file_stem().unwrap().to_str(), Some(t.name.as_str()));
        let mut seen: BTreeMap<(&str, i64), usize> = BTreeMap::new();
        for w in t.instructions.iter().filter(|i| i.is_write()) {
            *seen.entry((w.address.as_deref().unwrap(), w.data.unwrap())).or_default() += 1;
            assert_ne!(w.data, Some(0), "{}: writes of the initial value are ambiguous", t.name);
        }
        assert!(seen.values().all(|&n| n == 1), "{}: repeated write value", t.name);
    }
}

#[test]
fn corpus_expectations_match_oracle() {
    for mcm in ["SC", "TSO"] {
        for (path, t) in corpus(mcm) {
            assert_eq!(t.mcm.to_string(), mcm, "{}", path.display());
            let expected = if oracle_observable(&t) {
                Expectation::Permitted
            } else {
                Expectation::Forbidden
            };
            assert_eq!(t.expected, expected, "{}", path.display());
        }
    }
}

fn run_corpus(root: &str, mcm: &str) -> Vec<(String, bool, Conformance)> {
    let d = design(root);
    corpus(mcm)
        .into_iter()
        .map(|(_, t)| {
            let v = verify_litmus(&d, &t, &VerifyOptions::with_bound(11)).unwrap();
            (t.name.clone(), v.observability.is_observable(), v.conformance)
        })
        .collect()
}

#[test]
fn sc_corpus_on_sc_design() {
    for (name, observable, c) in run_corpus("simpleProc", "SC") {
        assert_ne!(c, Conformance::Violation, "{name}");
        let t = litmus(&format!("SC/{name}.test"));
        assert_eq!(observable, sc_observable(&t), "{name}");
    }
}

#[test]
fn tso_corpus_on_tso_design() {
    for (name, observable, c) in run_corpus("simpleProcTSO", "TSO") {
        assert_ne!(c, Conformance::Violation, "{name}");
        let t = litmus(&format!("TSO/{name}.test"));
        assert_eq!(observable, tso_observable(&t), "{name}");
    }
}

#[test]
fn store_buffering_separates_designs() {
    let sc: BTreeMap<String, bool> = run_corpus("simpleProc", "TSO")
        .into_iter()
        .map(|(n, o, _)| (n, o))
        .collect();
    let tso: BTreeMap<String, bool> = run_corpus("simpleProcTSO", "TSO")
        .into_iter()
        .map(|(n, o, _)| (n, o))
        .collect();
    let separated: Vec<&String> = tso.keys().filter(|n| tso[*n] && !sc[*n]).collect();
    assert!(separated.len() >= 3, "{separated:?}");
    // The SC design never shows more than the TSO design.
    assert!(sc.iter().all(|(n, &o)| !o || tso[n]));
}
