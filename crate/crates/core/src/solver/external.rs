//! Runs an SMT-LIB2 solver as a child process reading from stdin.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::smtlib::{model_from_values, parse_model_values, parse_sexprs, to_smtlib};
use super::{SolveResult, SolverError};
use crate::formula::{GroundFormula, VarSpace};

/// Runs `command` (program and arguments separated by whitespace) on the
/// script for `f`, killing it after `timeout`.
pub fn run(command: &str, f: &GroundFormula, vars: &VarSpace, timeout: Option<Duration>) -> Result<SolveResult, SolverError> {
    let mut parts = command.split_whitespace();
    let program = parts.next().ok_or_else(|| SolverError::Spawn("empty solver command".into()))?;
    let mut child = Command::new(program)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::Spawn(format!("{program}: {e}")))?;

    let script = to_smtlib(f, vars);
    let mut stdin = child.stdin.take().unwrap();
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(script.as_bytes());
    });
    let mut stdout = child.stdout.take().unwrap();
    let reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let mut stderr = child.stderr.take().unwrap();
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let start = Instant::now();
    let status = loop {
        if let Some(st) = child.try_wait().map_err(|e| SolverError::Io(e.to_string()))? {
            break Some(st);
        }
        if timeout.is_some_and(|t| start.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        thread::sleep(Duration::from_millis(5));
    };
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    if status.is_none() {
        return Ok(SolveResult::Unknown("timeout".into()));
    }
    interpret(&out, vars).map_err(|msg| {
        let detail = if err.trim().is_empty() { msg } else { format!("{msg}; stderr: {}", err.trim()) };
        SolverError::BadOutput(detail)
    })
}

/// Interprets a solver's stdout.
pub fn interpret(out: &str, vars: &VarSpace) -> Result<SolveResult, String> {
    let mut lines = out.trim_start().splitn(2, '\n');
    let first = lines.next().unwrap_or("").trim();
    match first {
        "unsat" => Ok(SolveResult::Unsat),
        "unknown" => Ok(SolveResult::Unknown("solver returned unknown".into())),
        "sat" => {
            let rest = lines.next().unwrap_or("");
            let exprs = parse_sexprs(rest)?;
            let model = exprs.first().ok_or("missing model")?;
            let values = parse_model_values(model);
            Ok(SolveResult::Sat(model_from_values(&values, vars)?))
        }
        other => Err(format!("unexpected solver output `{other}`")),
    }
}
