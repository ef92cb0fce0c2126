//! Satisfiability of ground formulas whose strict-before atoms must admit
//! integer timestamps.

pub mod acyclic;
pub mod cdcl;
pub mod encode;
pub mod external;
pub mod smtlib;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{GroundFormula, Model, VarSpace};

pub use cdcl::{Limits, Lit, Outcome, Solver, Stats, Var};
pub use encode::Encoded;
pub use smtlib::to_smtlib;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("cannot start solver: {0}")]
    Spawn(String),
    #[error("solver i/o: {0}")]
    Io(String),
    #[error("cannot read solver output: {0}")]
    BadOutput(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Native,
    /// Command line of an SMT-LIB2 solver reading the script on stdin.
    External(String),
}

impl Backend {
    /// `native` or an external command line.
    pub fn parse(s: &str) -> Backend {
        if s.trim() == "native" {
            Backend::Native
        } else {
            Backend::External(s.trim().to_string())
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverOptions {
    pub backend: Backend,
    pub timeout: Option<Duration>,
    pub conflict_limit: Option<u64>,
}

/// Decides `f`; satisfying models are returned in full.
pub fn solve(f: &GroundFormula, vars: &VarSpace, opts: &SolverOptions) -> Result<SolveResult, SolverError> {
    match &opts.backend {
        Backend::Native => Ok(solve_native(f, vars, opts).0),
        Backend::External(cmd) => external::run(cmd, f, vars, opts.timeout),
    }
}

/// Native search, also reporting search statistics.
pub fn solve_native(f: &GroundFormula, vars: &VarSpace, opts: &SolverOptions) -> (SolveResult, Stats) {
    let start = Instant::now();
    let mut enc = Encoded::new(f, vars);
    let limits = Limits {
        deadline: opts.timeout.map(|t| start + t),
        max_conflicts: opts.conflict_limit,
    };
    let r = match enc.solver.solve(limits) {
        Outcome::Sat => SolveResult::Sat(enc.model()),
        Outcome::Unsat => SolveResult::Unsat,
        Outcome::Unknown(cdcl::Limit::Deadline) => SolveResult::Unknown("timeout".into()),
        Outcome::Unknown(cdcl::Limit::Conflicts) => SolveResult::Unknown("conflict limit reached".into()),
    };
    (r, enc.solver.stats)
}
