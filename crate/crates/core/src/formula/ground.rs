//! Quantifier elimination over the finite operation domains of an
//! elaborated tree.

use std::collections::HashMap;

use thiserror::Error;

use crate::dsl::{Axiom, EdgeTerm, Formula, NodeRef, Predicate, QuantKind};
use crate::elab::{InstId, InstanceTree, OpId};
use crate::litmus::InstrKind;

use super::{AttrConstraint, GroundFormula as G, Literal, NodeIdx, VarSpace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("axiom `{axiom}`: `{var}` is not bound")]
    Unbound { axiom: String, var: String },
    #[error("axiom `{axiom}`: `{name}` is not a submodule of `{scope}`")]
    UnknownDomain {
        axiom: String,
        name: String,
        scope: String,
    },
    #[error("axiom `{axiom}`: `{owner}` has no event `{event}`")]
    IllegalNode {
        axiom: String,
        owner: String,
        event: String,
    },
    #[error("axiom `{axiom}`: `{name}` is not a parameter of `{scope}`")]
    UnknownParam {
        axiom: String,
        name: String,
        scope: String,
    },
}

/// Grounds axioms against one tree, interning variables as it goes.
pub struct Grounder<'t> {
    pub tree: &'t InstanceTree,
    pub vars: VarSpace,
    /// Renames events before lookup; used when an interface's axioms are
    /// checked over an implementation's operations.
    pub event_rename: Option<HashMap<String, String>>,
}

impl<'t> Grounder<'t> {
    pub fn new(tree: &'t InstanceTree) -> Self {
        Grounder {
            tree,
            vars: VarSpace::for_tree(tree),
            event_rename: None,
        }
    }

    /// Grounds `axiom` with `scope` as the instance that owns it.
    pub fn ground(&mut self, axiom: &Axiom, scope: InstId) -> Result<G, GroundError> {
        let mut env = Vec::new();
        let mut cx = Cx {
            g: self,
            axiom: &axiom.name,
            scope,
        };
        cx.formula(&axiom.body, &mut env)
    }
}

struct Cx<'a, 'g, 't> {
    g: &'g mut Grounder<'t>,
    axiom: &'a str,
    scope: InstId,
}

impl<'a, 'g, 't> Cx<'a, 'g, 't> {
    fn lookup(&self, env: &[(&'a str, OpId)], var: &str) -> Result<OpId, GroundError> {
        env.iter()
            .rev()
            .find(|(v, _)| *v == var)
            .map(|&(_, o)| o)
            .ok_or_else(|| GroundError::Unbound {
                axiom: self.axiom.to_string(),
                var: var.to_string(),
            })
    }

    fn node(&mut self, env: &[(&'a str, OpId)], n: &NodeRef) -> Result<NodeIdx, GroundError> {
        let op = self.lookup(env, &n.op)?;
        let event = match &self.g.event_rename {
            Some(m) => m.get(&n.event).unwrap_or(&n.event),
            None => &n.event,
        };
        let owner = self.g.tree.owner(op);
        owner
            .event_index(event)
            .and_then(|idx| self.g.vars.node(op, idx))
            .ok_or_else(|| GroundError::IllegalNode {
                axiom: self.axiom.to_string(),
                owner: owner.path.clone(),
                event: event.clone(),
            })
    }

    fn edge(&mut self, env: &[(&'a str, OpId)], e: &EdgeTerm) -> Result<G, GroundError> {
        let src = self.node(env, &e.src)?;
        let dst = self.node(env, &e.dst)?;
        let label = self.g.vars.intern_label(&e.label);
        Ok(strict_edge(src, dst, label))
    }

    fn formula(&mut self, f: &'a Formula, env: &mut Vec<(&'a str, OpId)>) -> Result<G, GroundError> {
        Ok(match f {
            Formula::Const(b) => G::Const(*b),
            Formula::Quant(q) => {
                let tree = self.g.tree;
                let scope = &tree.instances[self.scope];
                let mut ops: Vec<OpId> = Vec::new();
                match &q.domain {
                    None => ops.extend(&scope.ops),
                    Some(names) => {
                        for n in names {
                            if n == "this" {
                                ops.extend(&scope.ops);
                            } else {
                                let child = tree.child(self.scope, n).ok_or_else(|| GroundError::UnknownDomain {
                                    axiom: self.axiom.to_string(),
                                    name: n.clone(),
                                    scope: scope.path.clone(),
                                })?;
                                ops.extend(&child.ops);
                            }
                        }
                    }
                }
                let mut parts = Vec::with_capacity(ops.len());
                for op in ops {
                    env.push((q.var.as_str(), op));
                    let body = self.formula(&q.body, env);
                    env.pop();
                    let body = body?;
                    let nn = not_null(tree, op);
                    match q.kind {
                        QuantKind::Forall => {
                            let part = G::implies(nn, body);
                            if part == G::FALSE {
                                return Ok(G::FALSE);
                            }
                            parts.push(part);
                        }
                        QuantKind::Exists => {
                            let part = G::and(vec![nn, body]);
                            if part == G::TRUE {
                                return Ok(G::TRUE);
                            }
                            parts.push(part);
                        }
                    }
                }
                match q.kind {
                    QuantKind::Forall => G::and(parts),
                    QuantKind::Exists => G::or(parts),
                }
            }
            Formula::Not(a) => G::not(self.formula(a, env)?),
            Formula::And(a, b) => {
                let a = self.formula(a, env)?;
                if a == G::FALSE {
                    return Ok(a);
                }
                G::and(vec![a, self.formula(b, env)?])
            }
            Formula::Or(a, b) => {
                let a = self.formula(a, env)?;
                if a == G::TRUE {
                    return Ok(a);
                }
                G::or(vec![a, self.formula(b, env)?])
            }
            Formula::Implies(a, b) => {
                let a = self.formula(a, env)?;
                if a == G::FALSE {
                    return Ok(G::TRUE);
                }
                G::implies(a, self.formula(b, env)?)
            }
            Formula::Iff(a, b) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                G::iff(a, b)
            }
            Formula::Pred(p, args) => {
                let ops = args
                    .iter()
                    .map(|a| self.lookup(env, a))
                    .collect::<Result<Vec<_>, _>>()?;
                predicate_ground(self.g.tree, &mut self.g.vars, *p, &ops)
            }
            Formula::NodeExists(n) => G::lit(Literal::NodeExists(self.node(env, n)?)),
            Formula::EdgeExists(e) | Formula::AddEdge(e) => self.edge(env, e)?,
            Formula::SameNode(a, b) => G::SameNode(self.node(env, a)?, self.node(env, b)?),
            Formula::ParamEq(name, v) => {
                let scope = &self.g.tree.instances[self.scope];
                match scope.params.get(name) {
                    Some(x) => G::Const(x == v),
                    None => {
                        return Err(GroundError::UnknownParam {
                            axiom: self.axiom.to_string(),
                            name: name.clone(),
                            scope: scope.path.clone(),
                        })
                    }
                }
            }
        })
    }
}

/// `NodeExists a /\ NodeExists b /\ StrictBefore a b`; a self edge is false.
pub fn strict_edge(src: NodeIdx, dst: NodeIdx, label: usize) -> G {
    if src == dst {
        return G::FALSE;
    }
    G::and(vec![
        G::lit(Literal::NodeExists(src)),
        G::lit(Literal::NodeExists(dst)),
        G::lit(Literal::StrictBefore { src, dst, label }),
    ])
}

fn not_null(tree: &InstanceTree, op: OpId) -> G {
    if tree.op(op).is_symbolic() {
        G::lit(Literal::NotNull(op))
    } else {
        G::TRUE
    }
}

fn kind_is(tree: &InstanceTree, op: OpId, k: InstrKind) -> G {
    if tree.owner(op).kind_domain.contains(&k) {
        G::lit(Literal::Attr(AttrConstraint::KindIs(op, k)))
    } else {
        G::FALSE
    }
}

/// Grounds one predicate application. Predicates over concrete operations
/// fold to constants; over symbolic ones they become attribute
/// constraints; `Mapped` becomes a free variable.
pub fn predicate_ground(tree: &InstanceTree, vars: &mut VarSpace, p: Predicate, args: &[OpId]) -> G {
    let op = |i: usize| tree.op(args[i]);
    match p {
        Predicate::IsAnyRead | Predicate::IsAnyWrite | Predicate::IsFence(_) => {
            let k = match p {
                Predicate::IsAnyRead => InstrKind::Read,
                Predicate::IsAnyWrite => InstrKind::Write,
                Predicate::IsFence(fl) => InstrKind::Fence(fl),
                _ => unreachable!(),
            };
            match &op(0).concrete {
                Some(i) => G::Const(i.kind == k),
                None => kind_is(tree, args[0], k),
            }
        }
        Predicate::IsAnyFence => match &op(0).concrete {
            Some(i) => G::Const(matches!(i.kind, InstrKind::Fence(_))),
            None => G::or(
                tree.owner(args[0])
                    .kind_domain
                    .iter()
                    .filter(|k| matches!(k, InstrKind::Fence(_)))
                    .map(|&k| kind_is(tree, args[0], k))
                    .collect(),
            ),
        },
        Predicate::SameAddress | Predicate::SameData => {
            let addr = p == Predicate::SameAddress;
            let value_index = |i: &crate::litmus::LitmusInstruction| -> Option<usize> {
                if addr {
                    i.address.as_deref().and_then(|a| tree.domains.address_index(a))
                } else {
                    i.data.and_then(|d| tree.domains.data_index(d))
                }
            };
            let is = |o: OpId, v: usize| {
                G::lit(Literal::Attr(if addr {
                    AttrConstraint::AddrIs(o, v)
                } else {
                    AttrConstraint::DataIs(o, v)
                }))
            };
            match (&op(0).concrete, &op(1).concrete) {
                (Some(a), Some(b)) => match (value_index(a), value_index(b)) {
                    (Some(x), Some(y)) => G::Const(x == y),
                    _ => G::FALSE,
                },
                (Some(c), None) => value_index(c).map_or(G::FALSE, |v| is(args[1], v)),
                (None, Some(c)) => value_index(c).map_or(G::FALSE, |v| is(args[0], v)),
                (None, None) => {
                    if args[0] == args[1] {
                        G::TRUE
                    } else {
                        let (a, b) = (args[0].min(args[1]), args[0].max(args[1]));
                        G::lit(Literal::Attr(if addr {
                            AttrConstraint::AddrEq(a, b)
                        } else {
                            AttrConstraint::DataEq(a, b)
                        }))
                    }
                }
            }
        }
        Predicate::ProgramOrder => {
            let (a, b) = (op(0), op(1));
            G::Const(a.owner == b.owner && a.index < b.index)
        }
        Predicate::DataFromInitialState => match &op(0).concrete {
            Some(i) => G::Const(i.reads_initial()),
            None => match tree.domains.data_index(0) {
                Some(zero) => G::and(vec![
                    kind_is(tree, args[0], InstrKind::Read),
                    G::lit(Literal::Attr(AttrConstraint::DataIs(args[0], zero))),
                ]),
                None => G::FALSE,
            },
        },
        Predicate::IsNotNull => not_null(tree, args[0]),
        Predicate::Mapped => G::lit(Literal::Pred(vars.intern_pred("Mapped", args.to_vec()))),
    }
}

/// Grounds a single axiom in a fresh variable space.
pub fn ground_axiom(tree: &InstanceTree, axiom: &Axiom, scope: InstId) -> Result<(G, VarSpace), GroundError> {
    let mut g = Grounder::new(tree);
    let f = g.ground(axiom, scope)?;
    Ok((f, g.vars))
}

/// Conjunction of every implementation and connection axiom of every
/// instance under `root`.
pub fn ground_design(g: &mut Grounder<'_>, root: InstId) -> Result<G, GroundError> {
    let tree = g.tree;
    let mut parts = Vec::new();
    for id in tree.subtree(root) {
        let def = tree.instances[id].def.clone();
        for a in def.implementation_axioms.iter().chain(&def.connection_axioms) {
            let f = g.ground(a, id)?;
            if f == G::FALSE {
                return Ok(G::FALSE);
            }
            parts.push(f);
        }
    }
    Ok(G::and(parts))
}
