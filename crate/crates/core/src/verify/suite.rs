//! Parallel litmus suite runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{verify_litmus, Conformance, Observability, VerifyError, VerifyOptions};
use crate::elab::Design;
use crate::graph::UhbGraph;
use crate::litmus::{parse_litmus, Expectation};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    #[serde(skip)]
    pub path: PathBuf,
    /// `Observable`, `Unobservable` or `Error`.
    pub verdict: String,
    pub expected: Option<Expectation>,
    pub conformance: Option<Conformance>,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub witness: Option<UhbGraph>,
    #[serde(skip)]
    pub solver_failure: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub tests: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn count(&self, c: Conformance) -> usize {
        self.tests.iter().filter(|t| t.conformance == Some(c)).count()
    }

    pub fn errors(&self) -> usize {
        self.tests.iter().filter(|t| t.error.is_some()).count()
    }

    pub fn violations(&self) -> Vec<&str> {
        self.tests
            .iter()
            .filter(|t| t.conformance == Some(Conformance::Violation))
            .map(|t| t.name.as_str())
            .collect()
    }
}

/// `.test` files under `dir`, recursively, in path order.
pub fn collect_tests(dir: &Path) -> Result<Vec<PathBuf>, VerifyError> {
    let io = |e: std::io::Error| VerifyError::Io {
        path: dir.display().to_string(),
        msg: e.to_string(),
    };
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(io)? {
            let p = entry.map_err(io)?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "test") {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn run_one(design: &Design, path: &Path, opts: &VerifyOptions) -> SuiteEntry {
    let start = Instant::now();
    let fallback = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let parsed = fs::read_to_string(path)
        .map_err(|e| VerifyError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
        .and_then(|t| parse_litmus(&t).map_err(VerifyError::from));
    let test = match parsed {
        Ok(t) => t,
        Err(e) => {
            return SuiteEntry {
                name: fallback,
                path: path.to_path_buf(),
                verdict: "Error".into(),
                expected: None,
                conformance: None,
                millis: start.elapsed().as_millis(),
                error: Some(e.to_string()),
                witness: None,
                solver_failure: false,
            }
        }
    };
    match verify_litmus(design, &test, opts) {
        Ok(v) => SuiteEntry {
            name: test.name,
            path: path.to_path_buf(),
            verdict: v.observability.to_string(),
            expected: Some(v.expected),
            conformance: Some(v.conformance),
            millis: start.elapsed().as_millis(),
            error: None,
            witness: match v.observability {
                Observability::Observable(g) => Some(g),
                Observability::Unobservable => None,
            },
            solver_failure: false,
        },
        Err(e) => SuiteEntry {
            name: test.name,
            path: path.to_path_buf(),
            verdict: "Error".into(),
            expected: Some(test.expected),
            conformance: None,
            millis: start.elapsed().as_millis(),
            solver_failure: e.is_solver_failure(),
            error: Some(e.to_string()),
            witness: None,
        },
    }
}

/// Verifies every test on up to `jobs` threads. Per-test failures are
/// recorded and the run continues.
pub fn run_suite(design: &Design, tests: &[PathBuf], opts: &VerifyOptions, jobs: usize) -> SuiteReport {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let tests = pool.install(|| tests.par_iter().map(|p| run_one(design, p, opts)).collect());
    SuiteReport { tests }
}
