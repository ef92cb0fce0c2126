//! Visibility and operation-type checks.
//!
//! Implementation axioms see only their own module's events and operations.
//! Connection axioms see their own events plus the *external* events of
//! direct children, and quantify over `this` or named children.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::dsl::{Axiom, Formula, ModuleDef, NodeRef, Predicate};

use super::tree::InstanceTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub module: String,
    pub axiom: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "module `{}`, axiom `{}`: {}", self.module, self.axiom, self.message)
    }
}

/// Checks every module type reachable in `tree` once.
pub fn check_scopes(tree: &InstanceTree) -> Vec<Diagnostic> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for inst in &tree.instances {
        if !seen.insert(inst.def.name.clone()) {
            continue;
        }
        let children: Vec<(&str, &ModuleDef)> = inst
            .children
            .iter()
            .map(|&c| (tree.instances[c].name.as_str(), &*tree.instances[c].def))
            .collect();
        out.extend(check_module(&inst.def, &children));
    }
    out
}

/// Checks one module type given its direct children `(instance, type)`.
pub fn check_module(def: &ModuleDef, children: &[(&str, &ModuleDef)]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for a in &def.implementation_axioms {
        Checker::new(def, children, a, false, &mut out).formula(&a.body);
    }
    for a in &def.connection_axioms {
        Checker::new(def, children, a, true, &mut out).formula(&a.body);
    }
    out
}

/// What a bound variable may range over: `None` for the module itself,
/// `Some(child)` for a submodule instance.
type Scope<'a> = Vec<Option<&'a ModuleDef>>;

struct Checker<'a, 'o> {
    def: &'a ModuleDef,
    children: &'a [(&'a str, &'a ModuleDef)],
    axiom: &'a Axiom,
    connection: bool,
    vars: HashMap<String, (Scope<'a>, String)>,
    out: &'o mut Vec<Diagnostic>,
}

impl<'a, 'o> Checker<'a, 'o> {
    fn new(
        def: &'a ModuleDef,
        children: &'a [(&'a str, &'a ModuleDef)],
        axiom: &'a Axiom,
        connection: bool,
        out: &'o mut Vec<Diagnostic>,
    ) -> Self {
        Checker {
            def,
            children,
            axiom,
            connection,
            vars: HashMap::new(),
            out,
        }
    }

    fn report(&mut self, message: String) {
        self.out.push(Diagnostic {
            module: self.def.name.clone(),
            axiom: self.axiom.name.clone(),
            message,
        });
    }

    fn formula(&mut self, f: &'a Formula) {
        match f {
            Formula::Const(_) => {}
            Formula::Quant(q) => {
                if self.vars.contains_key(&q.var) {
                    self.report(format!("variable `{}` is bound twice", q.var));
                }
                let names: Vec<String> = q.domain.clone().unwrap_or_else(|| vec!["this".into()]);
                let mut scope: Scope<'a> = Vec::new();
                for n in &names {
                    if n == "this" {
                        if self.def.operation_type.as_deref() != Some(q.op_type.as_str()) {
                            let own = self.def.operation_type.as_deref().unwrap_or("none");
                            self.report(format!(
                                "`{}` quantifies over {} but `{}` has operation type {own}",
                                q.var, q.op_type, self.def.name
                            ));
                        }
                        scope.push(None);
                    } else if !self.connection {
                        self.report(format!(
                            "implementation axioms cannot quantify over submodule `{n}`"
                        ));
                    } else if let Some(&(_, cdef)) = self.children.iter().find(|(c, _)| c == n) {
                        if cdef.operation_type.as_deref() != Some(q.op_type.as_str()) {
                            let theirs = cdef.operation_type.as_deref().unwrap_or("none");
                            self.report(format!(
                                "`{}` quantifies over {} but `{n}` has operation type {theirs}",
                                q.var, q.op_type
                            ));
                        }
                        scope.push(Some(cdef));
                    } else {
                        self.report(format!("`{n}` is not a direct submodule of `{}`", self.def.name));
                    }
                }
                let prev = self.vars.insert(q.var.clone(), (scope, q.op_type.clone()));
                self.formula(&q.body);
                match prev {
                    Some(p) => {
                        self.vars.insert(q.var.clone(), p);
                    }
                    None => {
                        self.vars.remove(&q.var);
                    }
                }
            }
            Formula::Not(a) => self.formula(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.formula(a);
                self.formula(b);
            }
            Formula::Pred(p, args) => {
                for a in args {
                    if !self.vars.contains_key(a) {
                        self.report(format!("`{a}` is not a bound operation variable"));
                    }
                }
                if *p == Predicate::ProgramOrder && args.len() == 2 {
                    let ty = |v: &String| self.vars.get(v).map(|(_, t)| t.clone());
                    if let (Some(a), Some(b)) = (ty(&args[0]), ty(&args[1])) {
                        if a != b {
                            self.report(format!("ProgramOrder relates {a} and {b} operations"));
                        }
                    }
                }
            }
            Formula::NodeExists(n) => self.node(n),
            Formula::EdgeExists(e) | Formula::AddEdge(e) => {
                self.node(&e.src);
                self.node(&e.dst);
            }
            Formula::SameNode(a, b) => {
                self.node(a);
                self.node(b);
            }
            Formula::ParamEq(name, _) => {
                if !self.def.param_names.contains(name) {
                    self.report(format!("`{name}` is not a parameter of `{}`", self.def.name));
                }
            }
        }
    }

    fn node(&mut self, n: &NodeRef) {
        let Some((scope, _)) = self.vars.get(&n.op).cloned() else {
            self.report(format!("`{}` in {n} is not a bound operation variable", n.op));
            return;
        };
        for s in scope {
            match s {
                None => {
                    if self.def.event(&n.event).is_none() {
                        self.report(format!("event `{}` is not declared in `{}`", n.event, self.def.name));
                    }
                }
                Some(cdef) => match cdef.event(&n.event) {
                    None => self.report(format!(
                        "event `{}` is not declared in `{}`",
                        n.event, cdef.name
                    )),
                    Some(e) if !e.external => self.report(format!(
                        "event `{}` is internal to `{}`",
                        n.event, cdef.name
                    )),
                    Some(_) => {}
                },
            }
        }
    }
}
