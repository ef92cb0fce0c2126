use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use modcheck_core::dsl::parse_pair_file;
use modcheck_core::elab::{build_tree, check_scopes, Design};
use modcheck_core::formula::to_sexpr;
use modcheck_core::graph::{to_dot, UhbGraph};
use modcheck_core::litmus::{parse_litmus, LitmusTest};
use modcheck_core::solver::{to_smtlib, Backend, SolverOptions};
use modcheck_core::verify::{
    interface_query, litmus_query, run_suite, suite::collect_tests, verify_interface, verify_litmus, Conformance,
    InterfacePair, InterfaceVerdict, VerifyError, VerifyOptions,
};

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;
const SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "modcheck", version, about = "Check modular ordering specifications against litmus tests and interfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a litmus test outcome is observable.
    CheckLitmus {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value_t = 11)]
        bound: usize,
        /// Directory for the witness graph.
        #[arg(long)]
        dot_out: Option<PathBuf>,
        /// Write the ground formula as s-expressions.
        #[arg(long)]
        dump_formula: Option<PathBuf>,
        test: PathBuf,
    },
    /// Check implementation-interface pairs up to a bound.
    CheckInterface {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Directory for counterexample graphs.
        #[arg(long, default_value = ".")]
        dot_out: PathBuf,
        #[arg(long)]
        dump_formula: Option<PathBuf>,
        pairs: PathBuf,
    },
    /// Check every `.test` file under a directory.
    RunSuite {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value_t = 11)]
        bound: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// `--report json <path>`
        #[arg(long, num_args = 2, value_names = ["FORMAT", "PATH"])]
        report: Option<Vec<String>>,
        #[arg(long)]
        dot_out: Option<PathBuf>,
        dir: PathBuf,
    },
    /// Parse the design and report scope and type errors.
    Lint {
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Write the SMT-LIB2 query for a litmus test without solving it.
    EmitSmt {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value_t = 11)]
        bound: usize,
        #[arg(long)]
        no_symmetry: bool,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        test: PathBuf,
    },
}

#[derive(Args)]
struct DesignArgs {
    /// Root module definition file.
    #[arg(long)]
    design: PathBuf,
    /// Extra directories searched for module files, before the design's own.
    #[arg(short = 'I', long = "include")]
    include: Vec<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// `native` or an SMT-LIB2 solver command reading stdin, e.g. "z3 -in".
    #[arg(long, env = "MODCHECK_SOLVER", default_value = "native")]
    solver: String,
    /// Per-query time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    no_symmetry: bool,
}

impl SolveArgs {
    fn options(&self, bound: usize) -> VerifyOptions {
        let mut o = VerifyOptions::with_bound(bound);
        o.solver = SolverOptions {
            backend: Backend::parse(&self.solver),
            timeout: self.timeout.map(Duration::from_secs_f64),
            conflict_limit: None,
        };
        o.symmetry_breaking = !self.no_symmetry;
        o
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                SOLVER
            } else {
                USAGE
            }
        }
    })
}

fn io_err(path: &Path, e: impl ToString) -> VerifyError {
    VerifyError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, VerifyError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), VerifyError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn load_design(d: &DesignArgs) -> Result<Design, VerifyError> {
    let design = Design::load(&d.design, &d.include)?;
    let tree = build_tree(&design)?;
    let diags = check_scopes(&tree);
    if let Some(first) = diags.first() {
        return Err(VerifyError::Interface(format!("design has {} scope error(s); first: {first}", diags.len())));
    }
    Ok(design)
}

fn load_test(path: &Path) -> Result<LitmusTest, VerifyError> {
    Ok(parse_litmus(&read(path)?)?)
}

fn write_dot(dir: &Path, stem: &str, verdict: &str, g: &UhbGraph) -> Result<PathBuf, VerifyError> {
    let path = dir.join(format!("{}.{verdict}.dot", stem.replace(['/', '.'], "_")));
    write(&path, &to_dot(g))?;
    Ok(path)
}

fn run(cmd: Command) -> Result<u8, VerifyError> {
    match cmd {
        Command::CheckLitmus {
            design,
            solve,
            bound,
            dot_out,
            dump_formula,
            test,
        } => {
            let design = load_design(&design)?;
            let test = load_test(&test)?;
            let opts = solve.options(bound);
            if let Some(path) = dump_formula {
                let q = litmus_query(&design, &test, &opts)?;
                write(&path, &to_sexpr(&q.formula, &q.vars))?;
            }
            let v = verify_litmus(&design, &test, &opts)?;
            println!(
                "{}: {} (expected {}) -> {} [{} ms]",
                v.test, v.observability, v.expected, v.conformance, v.millis
            );
            if let (Some(dir), Some(g)) = (dot_out, v.observability.witness()) {
                let p = write_dot(&dir, &v.test, "observable", g)?;
                println!("witness: {}", p.display());
            }
            Ok(if v.conformance == Conformance::Violation { FAILED } else { OK })
        }
        Command::CheckInterface {
            design: dargs,
            solve,
            bound,
            dot_out,
            dump_formula,
            pairs,
        } => {
            let mut design = load_design(&dargs)?;
            let decls = parse_pair_file(&read(&pairs)?).map_err(|e| io_err(&pairs, e))?;
            let search = Design::search_path(&dargs.design, &dargs.include);
            let opts = solve.options(bound);
            let mut code = OK;
            for decl in &decls {
                let pair = InterfacePair::from(decl);
                let iface: Arc<_> = design.load_interface(&pair.interface, &search)?;
                if let Some(path) = &dump_formula {
                    let q = interface_query(&design, &iface, &pair, &opts)?;
                    write(path, &to_sexpr(&q.formula, &q.vars))?;
                }
                let v = verify_interface(&design, &iface, &pair, &opts)?;
                println!("{} vs {} at bound {bound}: {v}", pair.implementation, pair.interface);
                if let InterfaceVerdict::Bug(g) = &v {
                    let stem = format!("{}.{}", pair.implementation, pair.interface);
                    let p = write_dot(&dot_out, &stem, "bug", g)?;
                    println!("counterexample: {}", p.display());
                    code = FAILED;
                }
            }
            Ok(code)
        }
        Command::RunSuite {
            design,
            solve,
            bound,
            jobs,
            report,
            dot_out,
            dir,
        } => {
            let report_path = match report.as_deref() {
                None => None,
                Some([fmt, path]) if fmt == "json" => Some(PathBuf::from(path)),
                Some(other) => {
                    return Err(VerifyError::Io {
                        path: other.join(" "),
                        msg: "only `--report json <path>` is supported".into(),
                    })
                }
            };
            let design = load_design(&design)?;
            let tests = collect_tests(&dir)?;
            let r = run_suite(&design, &tests, &solve.options(bound), jobs.max(1));
            println!("{:<24} {:<14} {:<10} {:<12} {:>8}", "test", "verdict", "expected", "conformance", "ms");
            for t in &r.tests {
                match &t.error {
                    None => println!(
                        "{:<24} {:<14} {:<10} {:<12} {:>8}",
                        t.name,
                        t.verdict,
                        t.expected.map(|e| e.to_string()).unwrap_or_default(),
                        t.conformance.map(|c| c.to_string()).unwrap_or_default(),
                        t.millis
                    ),
                    Some(e) => println!("{:<24} error: {e}", t.name),
                }
            }
            let violations = r.violations();
            println!(
                "{} tests, {} violations, {} errors",
                r.tests.len(),
                violations.len(),
                r.errors()
            );
            for v in &violations {
                println!("VIOLATION: {v}");
            }
            if let Some(dir) = dot_out {
                for t in &r.tests {
                    if let Some(g) = &t.witness {
                        write_dot(&dir, &t.name, &t.verdict.to_lowercase(), g)?;
                    }
                }
            }
            if let Some(path) = report_path {
                let json = serde_json::to_string_pretty(&r).map_err(|e| io_err(&path, e))?;
                write(&path, &json)?;
            }
            Ok(if !violations.is_empty() {
                FAILED
            } else if r.tests.iter().any(|t| t.solver_failure) {
                SOLVER
            } else if r.errors() > 0 {
                USAGE
            } else {
                OK
            })
        }
        Command::Lint { design } => {
            let d = Design::load(&design.design, &design.include)?;
            let tree = build_tree(&d)?;
            let diags = check_scopes(&tree);
            for diag in &diags {
                println!("{diag}");
            }
            Ok(if diags.is_empty() { OK } else { FAILED })
        }
        Command::EmitSmt {
            design,
            bound,
            no_symmetry,
            output,
            test,
        } => {
            let design = load_design(&design)?;
            let test = load_test(&test)?;
            let mut opts = VerifyOptions::with_bound(bound);
            opts.symmetry_breaking = !no_symmetry;
            let q = litmus_query(&design, &test, &opts)?;
            let smt = to_smtlib(&q.formula, &q.vars);
            match output {
                Some(p) => write(&p, &smt)?,
                None => print!("{smt}"),
            }
            Ok(OK)
        }
    }
}
