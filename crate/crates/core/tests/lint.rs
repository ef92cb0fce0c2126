mod common;

use common::*;
use modcheck_core::elab::{build_tree, check_scopes, Design, Diagnostic};

fn lint_root(text: &str) -> Vec<Diagnostic> {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("cacheProc.mdef");
    std::fs::write(&root, text).unwrap();
    let d = Design::load(&root, &[fixtures().join("designs")]).unwrap();
    check_scopes(&build_tree(&d).unwrap())
}

#[test]
fn shipped_designs_are_clean() {
    for root in ["simpleProc", "simpleProcTSO", "cacheProc", "cacheProcAbs"] {
        let d = check_scopes(&build_tree(&design(root)).unwrap());
        assert!(d.is_empty(), "{root}: {d:?}");
    }
}

#[test]
fn seeded_scope_violations_are_all_reported() {
    let original = std::fs::read_to_string(fixtures().join("designs/cacheProc.mdef")).unwrap();
    assert!(lint_root(&original).is_empty());
    // (text to replace, replacement, axiom, expected message fragment)
    let seeds = [
        ("SameNode (i, MemReq) (t, Req)", "SameNode (i, EX) (t, Req)", "mapped_effects", "internal to `inOrderCore`"),
        ("SameNode (i, MemResp) (t, Resp)", "SameNode (i, MemResp) (t, Done)", "mapped_effects", "`Done` is not declared"),
        ("in \"mem\", Mapped i t.", "in \"mm\", Mapped i t.", "instr_has_tran", "not a direct submodule"),
        ("forall transaction \"t\" in \"mem\", exists", "forall microop \"t\" in \"mem\", exists", "tran_has_instr", "has operation type transaction"),
        ("\"c0;c1;c2;c3\", Mapped i t.", "\"c0;c1;c2;c3\", Mapped j t.", "tran_has_instr", "`j` is not a bound"),
        ("NodeExists (i, MemReq)", "NodeExists (k, MemReq)", "instr_has_tran", "`k` in (k, MemReq)"),
        ("forall transaction \"s\" in \"mem\", forall transaction \"t\" in \"mem\",", "forall transaction \"s\" in \"mem\", forall transaction \"i\" in \"mem\",", "one_tran_per_instr", "bound twice"),
        ("(ProgramOrder s t \\/", "(ProgramOrder i t \\/", "one_tran_per_instr", "relates microop and transaction"),
        ("\"instr_has_tran\":\n      forall microop \"i\" in \"c0;c1;c2;c3\",", "\"instr_has_tran\":\n      forall microop \"i\",", "instr_has_tran", "`cacheProc` has operation type none"),
        ("Axiom \"tran_has_instr\":", "Axiom \"param\": c = 1.\n    Axiom \"tran_has_instr\":", "param", "not a parameter of `cacheProc`"),
    ];
    for (from, to, axiom, fragment) in seeds {
        assert_eq!(original.matches(from).count(), 1, "{from}");
        let diags = lint_root(&original.replacen(from, to, 1));
        assert!(
            diags.iter().any(|d| d.axiom == axiom && d.message.contains(fragment)),
            "{to}: {diags:?}"
        );
    }
}
