mod common;

use common::*;
use modcheck_core::formula::evaluate;
use modcheck_core::solver::{solve, Backend, SolveResult, SolverOptions};
use modcheck_core::verify::{interface_query, litmus_query, Query, VerifyOptions};

fn z3() -> Option<SolverOptions> {
    if !z3_available() {
        eprintln!("z3 not found; skipping external backend comparison");
        return None;
    }
    Some(SolverOptions {
        backend: Backend::External("z3 -in".into()),
        ..SolverOptions::default()
    })
}

fn compare(name: &str, q: &Query, ext: &SolverOptions) {
    let native = solve(&q.formula, &q.vars, &SolverOptions::default()).unwrap();
    let external = solve(&q.formula, &q.vars, ext).unwrap();
    assert_eq!(native.is_sat(), external.is_sat(), "{name}");
    for r in [native, external] {
        match r {
            SolveResult::Sat(m) => assert!(evaluate(&q.formula, &q.vars, &m), "{name}: model fails formula"),
            SolveResult::Unsat => {}
            SolveResult::Unknown(why) => panic!("{name}: {why}"),
        }
    }
}

#[test]
fn corpus_queries_agree() {
    let Some(ext) = z3() else { return };
    for (root, mcm) in [("simpleProc", "SC"), ("simpleProcTSO", "TSO")] {
        let d = design(root);
        for (_, t) in corpus(mcm) {
            let q = litmus_query(&d, &t, &VerifyOptions::with_bound(11)).unwrap();
            compare(&format!("{root}/{}", t.name), &q, &ext);
        }
    }
}

#[test]
fn interface_queries_agree() {
    let Some(ext) = z3() else { return };
    let cases: &[(&str, &[&str], &str, usize)] = &[
        ("cacheProc", &[], "l1hier_atomic.pair", 3),
        ("cacheProc", &["no_single_value"], "l1hier_atomic.pair", 3),
        ("cacheProc", &["no_writeback"], "l1hier_atomic.pair", 3),
        ("simpleProc", &[], "inorder_core.pair", 4),
        ("simpleProcTSO", &[], "sbcore_inorder.pair", 4),
        ("simpleProcTSO", &[], "sbcore_sbint.pair", 4),
    ];
    for &(root, mutants, pair_file, bound) in cases {
        let (d, iface, pair) = interface_case(root, mutants, pair_file);
        let q = interface_query(&d, &iface, &pair, &VerifyOptions::with_bound(bound)).unwrap();
        compare(&format!("{root} {mutants:?} {pair_file}"), &q, &ext);
    }
}
