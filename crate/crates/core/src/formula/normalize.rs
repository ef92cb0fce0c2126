//! Node-term resolution and negation normal form.

use std::collections::HashSet;

use super::{GroundFormula as G, Literal, NodeIdx};

/// `(ex a <=> ex b) /\ ~SB(a, b) /\ ~SB(b, a)`: both or neither exist, and
/// when both do their timestamps are equal.
pub fn same_node(a: NodeIdx, b: NodeIdx) -> G {
    if a == b {
        return G::TRUE;
    }
    let ex = |n| G::lit(Literal::NodeExists(n));
    let sb = |src, dst| G::lit(Literal::StrictBefore { src, dst, label: 0 });
    G::and(vec![
        G::iff(ex(a), ex(b)),
        G::not(sb(a, b)),
        G::not(sb(b, a)),
    ])
}

/// Replaces every `SameNode` with its lowering, under either polarity.
pub fn resolve_node_terms(f: G) -> G {
    match f {
        G::SameNode(a, b) => same_node(a, b),
        G::Not(a) => G::not(resolve_node_terms(*a)),
        G::And(xs) => G::and(xs.into_iter().map(resolve_node_terms).collect()),
        G::Or(xs) => G::or(xs.into_iter().map(resolve_node_terms).collect()),
        other => other,
    }
}

/// Pushes negations onto literals, folds constants, flattens nested
/// connectives and drops duplicate children. A connective holding both a
/// literal and its negation collapses to a constant.
pub fn normalize(f: G) -> G {
    nnf(f, true)
}

fn nnf(f: G, pos: bool) -> G {
    match f {
        G::Const(b) => G::Const(b == pos),
        G::Lit(_) | G::SameNode(..) => {
            if pos {
                f
            } else {
                G::Not(Box::new(f))
            }
        }
        G::Not(a) => nnf(*a, !pos),
        G::And(xs) | G::Or(xs) if xs.is_empty() => unreachable!("empty connective"),
        G::And(xs) => {
            let items = xs.into_iter().map(|x| nnf(x, pos)).collect();
            if pos {
                tidy(G::and(items), true)
            } else {
                tidy(G::or(items), false)
            }
        }
        G::Or(xs) => {
            let items = xs.into_iter().map(|x| nnf(x, pos)).collect();
            if pos {
                tidy(G::or(items), false)
            } else {
                tidy(G::and(items), true)
            }
        }
    }
}

fn tidy(f: G, conj: bool) -> G {
    let xs = match f {
        G::And(xs) if conj => xs,
        G::Or(xs) if !conj => xs,
        other => return other,
    };
    let mut seen = HashSet::new();
    let mut pos_lits = HashSet::new();
    let mut neg_lits = HashSet::new();
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        match &x {
            G::Lit(l) => {
                pos_lits.insert(*l);
            }
            G::Not(inner) => {
                if let G::Lit(l) = **inner {
                    neg_lits.insert(l);
                }
            }
            _ => {}
        }
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    if pos_lits.iter().any(|l| neg_lits.contains(l)) {
        return G::Const(!conj);
    }
    if conj {
        G::and(out)
    } else {
        G::or(out)
    }
}

/// True when `f` is in the form [`normalize`] produces.
pub fn is_nnf(f: &G) -> bool {
    match f {
        G::Const(_) | G::Lit(_) => true,
        G::Not(a) => matches!(**a, G::Lit(_)),
        G::And(xs) | G::Or(xs) => xs.iter().all(is_nnf),
        G::SameNode(..) => false,
    }
}
