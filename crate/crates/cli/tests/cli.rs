use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core")
}

fn design(root: &str) -> String {
    core_dir().join(format!("fixtures/designs/{root}.mdef")).display().to_string()
}

fn mutant(name: &str) -> String {
    core_dir().join("fixtures/mutants").join(name).display().to_string()
}

fn pairs(name: &str) -> String {
    core_dir().join("fixtures/pairs").join(name).display().to_string()
}

fn test_file(rel: &str) -> String {
    core_dir().join("tests/litmus").join(rel).display().to_string()
}

fn modcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcheck"))
        .args(args)
        .env_remove("MODCHECK_SOLVER")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_litmus_exit_codes() {
    let sc = design("simpleProc");
    let o = modcheck(&["check-litmus", "--design", &sc, &test_file("SC/sb.test")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("sb: Unobservable (expected forbidden) -> Pass"), "{}", stdout(&o));

    let o = modcheck(&["check-litmus", "--design", &sc, "-I", &mutant("no_po_fetch"), &test_file("SC/sb.test")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("-> Violation"), "{}", stdout(&o));

    let o = modcheck(&["check-litmus", &test_file("SC/sb.test")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--design"));

    let o = modcheck(&["check-litmus", "--design", &sc, "/nonexistent/sb.test"]);
    assert_eq!(code(&o), 2);
    let o = modcheck(&["check-litmus", "--design", "/nonexistent/x.mdef", &test_file("SC/sb.test")]);
    assert_eq!(code(&o), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.test");
    std::fs::write(&bad, "test bad mcm SC expect forbidden\ni1: 0 Q x 1\n").unwrap();
    let o = modcheck(&["check-litmus", "--design", &sc, bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solver_failures_exit_three() {
    let sc = design("simpleProc");
    let o = modcheck(&["check-litmus", "--design", &sc, "--solver", "/nonexistent/solver -in", &test_file("SC/sb.test")]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = modcheck(&[
        "check-litmus",
        "--design",
        &sc,
        "--no-symmetry",
        "--timeout",
        "0.2",
        &test_file("SC/iriw.test"),
    ]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stderr(&o).contains("inconclusive"), "{}", stderr(&o));
}

#[test]
fn solver_flag_overrides_environment() {
    let sc = design("simpleProc");
    let run = |flag: bool| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_modcheck"));
        c.args(["check-litmus", "--design", &sc]);
        if flag {
            c.args(["--solver", "native"]);
        }
        c.arg(test_file("SC/mp.test")).env("MODCHECK_SOLVER", "/nonexistent/solver");
        c.output().unwrap()
    };
    assert_eq!(code(&run(false)), 3);
    assert_eq!(code(&run(true)), 0);
}

#[test]
fn witness_and_formula_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let formula = dir.path().join("sb.sexpr");
    let args = [
        "check-litmus",
        "--design",
        &design("simpleProcTSO"),
        "--dot-out",
        out,
        "--dump-formula",
        formula.to_str().unwrap(),
        &test_file("TSO/sb.test"),
    ];
    let o = modcheck(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dot_path = dir.path().join("sb.observable.dot");
    assert!(stdout(&o).contains(&format!("witness: {}", dot_path.display())));
    let first = std::fs::read_to_string(&dot_path).unwrap();
    assert!(first.starts_with("digraph"));
    assert!(std::fs::read_to_string(&formula).unwrap().starts_with('('));

    modcheck(&args);
    assert_eq!(std::fs::read_to_string(&dot_path).unwrap(), first);
}

#[test]
fn check_interface_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cache = design("cacheProc");
    let o = modcheck(&["check-interface", "--design", &cache, "--dot-out", out, &pairs("l1hier_atomic.pair")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "mem vs AtomicMemory at bound 4: Refines");

    let o = modcheck(&[
        "check-interface",
        "--design",
        &cache,
        "-I",
        &mutant("no_single_value"),
        "--bound",
        "3",
        "--dot-out",
        out,
        &pairs("l1hier_atomic.pair"),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("at bound 3: Bug"));
    assert!(dir.path().join("mem_AtomicMemory.bug.dot").exists());

    let o = modcheck(&["check-interface", "--design", &cache, &pairs("unmapped.pair")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not mapped: Perform"));

    let o = modcheck(&["check-interface", "--design", &design("simpleProcTSO"), "--bound", "6", "--dot-out", out, &pairs("sbcore_inorder.pair")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn run_suite_reports() {
    let empty = tempfile::tempdir().unwrap();
    let sc = design("simpleProc");
    let o = modcheck(&["run-suite", "--design", &sc, empty.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("0 tests, 0 violations, 0 errors"));

    let dir = tempfile::tempdir().unwrap();
    for t in ["sb", "mp", "mp_ok"] {
        std::fs::copy(test_file(&format!("SC/{t}.test")), dir.path().join(format!("{t}.test"))).unwrap();
    }
    let report = dir.path().join("report.json");
    let o = modcheck(&[
        "run-suite",
        "--design",
        &sc,
        "-I",
        &mutant("no_po_fetch"),
        "--report",
        "json",
        report.to_str().unwrap(),
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("3 tests, "), "{text}");
    assert!(text.contains("VIOLATION: sb"), "{text}");
    assert!(!text.contains("VIOLATION: mp_ok"), "{text}");

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let tests = json["tests"].as_array().unwrap();
    let names: Vec<&str> = tests.iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["mp", "mp_ok", "sb"]);
    let sb = &tests[2];
    assert_eq!(sb["verdict"], "Observable");
    assert_eq!(sb["expected"], "forbidden");
    assert_eq!(sb["conformance"], "Violation");
    assert_eq!(tests[1]["conformance"], "Pass");

    let o = modcheck(&["run-suite", "--design", &sc, "--report", "xml", "r.xml", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn lint_exit_codes() {
    let o = modcheck(&["lint", "--design", &design("cacheProc")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).is_empty());

    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(design("cacheProc")).unwrap();
    let root = dir.path().join("cacheProc.mdef");
    std::fs::write(&root, text.replacen("(i, MemReq) (t, Req)", "(i, EX) (t, Req)", 1)).unwrap();
    let designs = core_dir().join("fixtures/designs");
    let o = modcheck(&["lint", "--design", root.to_str().unwrap(), "-I", designs.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("event `EX` is internal to `inOrderCore`"), "{}", stdout(&o));

    // Other commands refuse to run on a design that fails lint.
    let o = modcheck(&["check-litmus", "--design", root.to_str().unwrap(), "-I", designs.to_str().unwrap(), &test_file("SC/sb.test")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn emit_smt_matches_golden() {
    let o = modcheck(&["emit-smt", "--design", &design("simpleProc"), "--bound", "3", &test_file("SC/corr.test")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/corr_bound3.smt2");
    if std::env::var_os("MODCHECK_BLESS").is_some() {
        std::fs::write(&golden, &o.stdout).unwrap();
    }
    assert_eq!(stdout(&o), std::fs::read_to_string(&golden).unwrap());
    assert!(stdout(&o).contains("(check-sat)"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("q.smt2");
    let o = modcheck(&["emit-smt", "--design", &design("simpleProc"), "--bound", "3", "-o", file.to_str().unwrap(), &test_file("SC/corr.test")]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&file).unwrap(), std::fs::read_to_string(&golden).unwrap());

    let o = modcheck(&["emit-smt", &test_file("SC/corr.test")]);
    assert_eq!(code(&o), 2);
}
