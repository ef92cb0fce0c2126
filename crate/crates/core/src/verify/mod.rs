//! Litmus and interface verification drivers.

pub mod suite;
pub mod symmetry;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::{ModuleDef, PairDecl};
use crate::elab::{
    assign_operations, build_tree, build_tree_at, Design, DesignError, ElabError, ElabOptions, InstId,
    InstanceTree, Mode,
};
use crate::formula::{
    ground_design, normalize, resolve_node_terms, GroundError, GroundFormula, Grounder, Literal, VarSpace,
};
use crate::graph::{extract_graph, Provenance, UhbGraph};
use crate::litmus::{Expectation, LitmusError, LitmusTest};
use crate::solver::{solve, SolveResult, SolverError, SolverOptions};

pub use suite::{run_suite, SuiteEntry, SuiteReport};
pub use symmetry::symmetry_breaking;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Litmus(#[from] LitmusError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("{0}")]
    Interface(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl VerifyError {
    /// Solver trouble rather than bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, VerifyError::Solver(_) | VerifyError::Inconclusive(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub bound: usize,
    pub solver: SolverOptions,
    pub symmetry_breaking: bool,
    pub interface_addresses: usize,
    pub interface_max_value: i64,
}

impl VerifyOptions {
    pub fn with_bound(bound: usize) -> Self {
        let e = ElabOptions::with_bound(bound);
        VerifyOptions {
            bound,
            solver: SolverOptions::default(),
            symmetry_breaking: true,
            interface_addresses: e.interface_addresses,
            interface_max_value: e.interface_max_value,
        }
    }

    fn elab(&self) -> ElabOptions {
        ElabOptions {
            bound: self.bound,
            interface_addresses: self.interface_addresses,
            interface_max_value: self.interface_max_value,
        }
    }
}

/// A grounded, normalized query with what is needed to read a witness
/// back out of a model.
#[derive(Debug, Clone)]
pub struct Query {
    pub tree: InstanceTree,
    pub vars: VarSpace,
    pub formula: GroundFormula,
    /// The grounded axioms before node-term resolution, for witnesses.
    pub grounded: GroundFormula,
}

impl Query {
    fn finish(tree: InstanceTree, vars: VarSpace, grounded: GroundFormula, extra: GroundFormula) -> Query {
        // Null operations do not execute.
        let idle: Vec<GroundFormula> = vars
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| vars.ops[n.op].symbolic)
            .map(|(i, n)| {
                GroundFormula::or(vec![
                    GroundFormula::not(GroundFormula::lit(Literal::NodeExists(i))),
                    GroundFormula::lit(Literal::NotNull(n.op)),
                ])
            })
            .collect();
        let formula = normalize(resolve_node_terms(GroundFormula::and(vec![
            grounded.clone(),
            extra,
            GroundFormula::and(idle),
        ])));
        Query {
            tree,
            vars,
            formula,
            grounded,
        }
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<SolveResult, VerifyError> {
        Ok(solve(&self.formula, &self.vars, opts)?)
    }

    /// `Some(witness)` when satisfiable; unknown results are errors.
    pub fn witness(&self, opts: &SolverOptions) -> Result<Option<UhbGraph>, VerifyError> {
        match self.solve(opts)? {
            SolveResult::Sat(m) => {
                let prov = Provenance::justify(&self.grounded, &self.vars, &m);
                Ok(Some(extract_graph(&m, &self.vars, &prov)))
            }
            SolveResult::Unsat => Ok(None),
            SolveResult::Unknown(why) => Err(VerifyError::Inconclusive(why)),
        }
    }
}

/// Grounds every axiom of `design` against the operations of `test`.
pub fn litmus_query(design: &Design, test: &LitmusTest, opts: &VerifyOptions) -> Result<Query, VerifyError> {
    let mut tree = build_tree(design)?;
    assign_operations(&mut tree, Mode::Litmus(test), &opts.elab())?;
    let mut g = Grounder::new(&tree);
    let grounded = ground_design(&mut g, 0)?;
    let vars = g.vars;
    let extra = if opts.symmetry_breaking {
        symmetry_breaking(&tree, &vars, 0, &[])
    } else {
        GroundFormula::TRUE
    };
    Ok(Query::finish(tree, vars, grounded, extra))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conformance {
    Pass,
    Violation,
    VacuousPass,
}

impl Conformance {
    pub fn judge(observable: bool, expected: Expectation) -> Conformance {
        match (observable, expected) {
            (true, Expectation::Forbidden) => Conformance::Violation,
            (false, Expectation::Permitted) => Conformance::VacuousPass,
            _ => Conformance::Pass,
        }
    }
}

impl fmt::Display for Conformance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conformance::Pass => "Pass",
            Conformance::Violation => "Violation",
            Conformance::VacuousPass => "VacuousPass",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observability {
    Observable(UhbGraph),
    Unobservable,
}

impl Observability {
    pub fn is_observable(&self) -> bool {
        matches!(self, Observability::Observable(_))
    }

    pub fn witness(&self) -> Option<&UhbGraph> {
        match self {
            Observability::Observable(g) => Some(g),
            Observability::Unobservable => None,
        }
    }
}

impl fmt::Display for Observability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_observable() { "Observable" } else { "Unobservable" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitmusVerdict {
    pub test: String,
    pub observability: Observability,
    pub expected: Expectation,
    pub conformance: Conformance,
    pub millis: u128,
}

pub fn verify_litmus(design: &Design, test: &LitmusTest, opts: &VerifyOptions) -> Result<LitmusVerdict, VerifyError> {
    let start = Instant::now();
    let q = litmus_query(design, test, opts)?;
    let observability = match q.witness(&opts.solver)? {
        Some(g) => Observability::Observable(g),
        None => Observability::Unobservable,
    };
    let conformance = Conformance::judge(observability.is_observable(), test.expected);
    Ok(LitmusVerdict {
        test: test.name.clone(),
        observability,
        expected: test.expected,
        conformance,
        millis: start.elapsed().as_millis(),
    })
}

/// An implementation instance, the interface it should refine, and how
/// interface events name implementation events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfacePair {
    /// Instance path in the design tree, absolute or below the root, or a
    /// module type name.
    pub implementation: String,
    pub interface: String,
    /// `(implementation event, interface event)`.
    pub mappings: Vec<(String, String)>,
}

impl From<&PairDecl> for InterfacePair {
    fn from(p: &PairDecl) -> Self {
        InterfacePair {
            implementation: p.implementation.clone(),
            interface: p.interface.clone(),
            mappings: p
                .mappings
                .iter()
                .map(|m| (m.implementation_event.clone(), m.interface_event.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterfaceVerdict {
    Refines,
    Bug(UhbGraph),
}

impl fmt::Display for InterfaceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterfaceVerdict::Refines => "Refines",
            InterfaceVerdict::Bug(_) => "Bug",
        })
    }
}

fn instantiate_implementation(design: &Design, path: &str) -> Result<InstanceTree, VerifyError> {
    let full = build_tree(design)?;
    let rooted = format!("{}/{path}", full.root().path);
    if let Some(inst) = full.by_path(path).or_else(|| full.by_path(&rooted)) {
        return Ok(build_tree_at(design, &inst.def.name, inst.params.clone(), &inst.path)?);
    }
    match design.get(path) {
        Some(def) => {
            let params = def.param_names.iter().map(|p| (p.clone(), 0)).collect();
            Ok(build_tree_at(design, path, params, path)?)
        }
        None => Err(ElabError::NoSuchInstance(path.to_string()).into()),
    }
}

fn check_pair(tree: &InstanceTree, iface: &ModuleDef, pair: &InterfacePair) -> Result<HashMap<String, String>, VerifyError> {
    let root = tree.root();
    let err = |m: String| Err(VerifyError::Interface(m));
    if !iface.is_interface {
        return err(format!("`{}` is not an interface", iface.name));
    }
    let Some(op_type) = &root.def.operation_type else {
        return err(format!(
            "implementation `{}` has operation type `none`, so there are no operations to share",
            root.path
        ));
    };
    if iface.operation_type.as_ref() != Some(op_type) {
        return err(format!(
            "interface `{}` quantifies over `{}` but `{}` has `{op_type}` operations",
            iface.name,
            iface.operation_type.as_deref().unwrap_or("none"),
            root.path
        ));
    }
    let mut rename = HashMap::new();
    for (imp, int) in &pair.mappings {
        if imp.contains('.') || imp.contains('/') {
            return err(format!("mapping `{imp}`: implementation events must belong to `{}` itself", root.path));
        }
        if root.def.event(imp).is_none() {
            return err(format!("`{}` has no event `{imp}`", root.path));
        }
        if iface.event(int).is_none() {
            return err(format!("interface `{}` has no event `{int}`", iface.name));
        }
        if rename.insert(int.clone(), imp.clone()).is_some() {
            return err(format!("interface event `{int}` is mapped twice"));
        }
    }
    let unmapped: BTreeSet<&str> = iface
        .event_decls
        .iter()
        .map(|e| e.name.as_str())
        .filter(|e| !rename.contains_key(*e))
        .collect();
    if !unmapped.is_empty() {
        return err(format!(
            "interface events not mapped: {}",
            unmapped.into_iter().collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(rename)
}

/// `implementation /\ ~interface` over all-symbolic operations.
pub fn interface_query(
    design: &Design,
    iface: &Arc<ModuleDef>,
    pair: &InterfacePair,
    opts: &VerifyOptions,
) -> Result<Query, VerifyError> {
    let mut tree = instantiate_implementation(design, &pair.implementation)?;
    let rename = check_pair(&tree, iface, pair)?;
    assign_operations(&mut tree, Mode::Interface, &opts.elab())?;
    let root: InstId = 0;
    let mut g = Grounder::new(&tree);
    let implementation = ground_design(&mut g, root)?;
    g.event_rename = Some(rename);
    let mut promised = Vec::new();
    for a in &iface.implementation_axioms {
        promised.push(g.ground(a, root)?);
    }
    g.event_rename = None;
    let vars = g.vars;
    let grounded = GroundFormula::and(vec![implementation, GroundFormula::not(GroundFormula::and(promised))]);
    let extra = if opts.symmetry_breaking {
        let axioms: Vec<_> = iface.implementation_axioms.iter().map(|a| (a, root)).collect();
        symmetry_breaking(&tree, &vars, root, &axioms)
    } else {
        GroundFormula::TRUE
    };
    Ok(Query::finish(tree, vars, grounded, extra))
}

/// The implementation alone with every operation live. When this is
/// unsatisfiable, interface checks at the same bound pass vacuously.
pub fn saturated_query(design: &Design, implementation: &str, opts: &VerifyOptions) -> Result<Query, VerifyError> {
    let mut tree = instantiate_implementation(design, implementation)?;
    assign_operations(&mut tree, Mode::Interface, &opts.elab())?;
    let mut g = Grounder::new(&tree);
    let grounded = ground_design(&mut g, 0)?;
    let vars = g.vars;
    let live = GroundFormula::and((0..vars.ops.len()).map(|op| GroundFormula::lit(Literal::NotNull(op))).collect());
    Ok(Query::finish(tree, vars, grounded, live))
}

pub fn verify_interface(
    design: &Design,
    iface: &Arc<ModuleDef>,
    pair: &InterfacePair,
    opts: &VerifyOptions,
) -> Result<InterfaceVerdict, VerifyError> {
    let q = interface_query(design, iface, pair, opts)?;
    Ok(match q.witness(&opts.solver)? {
        Some(g) => InterfaceVerdict::Bug(g),
        None => InterfaceVerdict::Refines,
    })
}
