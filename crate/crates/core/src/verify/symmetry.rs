//! Lex-leader constraints for instances whose symbolic operations are
//! interchangeable.
//!
//! An instance qualifies when every operation it owns is symbolic and no
//! axiom that can range over it compares positions with `ProgramOrder`,
//! except in the order-free form `ProgramOrder a b \/ ProgramOrder b a`.
//! Any satisfying assignment can then be permuted within the instance,
//! so we may require per-operation keys to be non-increasing.

use std::collections::{BTreeSet, HashMap};

use crate::dsl::{Axiom, Formula, Predicate};
use crate::elab::{InstId, InstanceTree, OpId};
use crate::formula::{GroundFormula as G, Literal, VarSpace};

fn is_order_free(f: &Formula) -> bool {
    match f {
        Formula::Or(a, b) => match (&**a, &**b) {
            (Formula::Pred(Predicate::ProgramOrder, x), Formula::Pred(Predicate::ProgramOrder, y)) => {
                x.len() == 2 && y.len() == 2 && x[0] == y[1] && x[1] == y[0]
            }
            _ => false,
        },
        _ => false,
    }
}

fn mark(
    tree: &InstanceTree,
    scope: InstId,
    f: &Formula,
    env: &mut Vec<(String, Vec<InstId>)>,
    out: &mut BTreeSet<InstId>,
) {
    if is_order_free(f) {
        return;
    }
    match f {
        Formula::Quant(q) => {
            let insts = match &q.domain {
                None => vec![scope],
                Some(names) => names
                    .iter()
                    .filter_map(|n| {
                        if n == "this" {
                            Some(scope)
                        } else {
                            tree.child(scope, n).map(|c| c.id)
                        }
                    })
                    .collect(),
            };
            env.push((q.var.clone(), insts));
            mark(tree, scope, &q.body, env, out);
            env.pop();
        }
        Formula::Not(a) => mark(tree, scope, a, env, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            mark(tree, scope, a, env, out);
            mark(tree, scope, b, env, out);
        }
        Formula::Pred(Predicate::ProgramOrder, args) => {
            for a in args {
                if let Some((_, insts)) = env.iter().rev().find(|(v, _)| v == a) {
                    out.extend(insts.iter().copied());
                }
            }
        }
        _ => {}
    }
}

/// Instances whose operations some axiom orders by position. `extra`
/// holds further `(axiom, scope)` pairs, such as interface axioms.
pub fn ordered_instances(tree: &InstanceTree, root: InstId, extra: &[(&Axiom, InstId)]) -> BTreeSet<InstId> {
    let mut out = BTreeSet::new();
    let mut env = Vec::new();
    for id in tree.subtree(root) {
        let def = &tree.instances[id].def;
        for a in def.implementation_axioms.iter().chain(&def.connection_axioms) {
            mark(tree, id, &a.body, &mut env, &mut out);
        }
    }
    for (a, scope) in extra {
        mark(tree, *scope, &a.body, &mut env, &mut out);
    }
    out
}

/// `a >=lex b` over boolean vectors.
fn lex_geq(a: &[G], b: &[G]) -> G {
    match (a.split_first(), b.split_first()) {
        (Some((x, xs)), Some((y, ys))) => G::or(vec![
            G::and(vec![x.clone(), G::not(y.clone())]),
            G::and(vec![G::or(vec![x.clone(), G::not(y.clone())]), lex_geq(xs, ys)]),
        ]),
        _ => G::TRUE,
    }
}

/// Symmetry-breaking constraints for the interchangeable instances under
/// `root`, or `True` when there are none.
pub fn symmetry_breaking(tree: &InstanceTree, vars: &VarSpace, root: InstId, extra: &[(&Axiom, InstId)]) -> G {
    let ordered = ordered_instances(tree, root, extra);
    let groups: Vec<InstId> = tree
        .subtree(root)
        .into_iter()
        .filter(|&id| {
            let ops = &tree.instances[id].ops;
            ops.len() > 1 && !ordered.contains(&id) && ops.iter().all(|&o| tree.op(o).is_symbolic())
        })
        .collect();
    // Position of each operation's group in processing order; `None` for
    // operations that are never permuted.
    let mut group_of: HashMap<OpId, usize> = HashMap::new();
    for (g, &id) in groups.iter().enumerate() {
        for &o in &tree.instances[id].ops {
            group_of.insert(o, g);
        }
    }

    let mut parts = Vec::new();
    for (g, &id) in groups.iter().enumerate() {
        let ops = &tree.instances[id].ops;
        // Predicate shapes `(name, args, position of the permuted op)` whose
        // other arguments are fixed or belong to earlier groups.
        let mut shapes: BTreeSet<(String, Vec<Option<OpId>>)> = BTreeSet::new();
        for (name, args) in &vars.preds {
            let mine: Vec<usize> = (0..args.len()).filter(|&i| group_of.get(&args[i]) == Some(&g)).collect();
            if mine.len() != 1 {
                continue;
            }
            let others_ok = args
                .iter()
                .enumerate()
                .all(|(i, a)| i == mine[0] || group_of.get(a).is_none_or(|&h| h < g));
            if others_ok {
                let shape = args
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| (i != mine[0]).then_some(a))
                    .collect();
                shapes.insert((name.clone(), shape));
            }
        }
        let key = |o: OpId| -> Vec<G> {
            let mut k = vec![G::lit(Literal::NotNull(o))];
            for (name, shape) in &shapes {
                let args: Vec<OpId> = shape.iter().map(|a| a.unwrap_or(o)).collect();
                k.push(match vars.pred(name, &args) {
                    Some(p) => G::lit(Literal::Pred(p)),
                    None => G::FALSE,
                });
            }
            k
        };
        for w in ops.windows(2) {
            parts.push(lex_geq(&key(w[0]), &key(w[1])));
        }
    }
    G::and(parts)
}
