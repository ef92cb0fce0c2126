//! S-expression dump of ground formulas for debugging.

use std::fmt::Write;

use crate::litmus::InstrKind;

use super::{AttrConstraint, GroundFormula as G, Literal, VarSpace};

fn kind_name(k: InstrKind) -> String {
    match k {
        InstrKind::Read => "R".into(),
        InstrKind::Write => "W".into(),
        InstrKind::Fence(fl) => format!("F.{fl}"),
    }
}

fn literal(out: &mut String, vars: &VarSpace, l: &Literal) {
    let op = |o: usize| vars.ops[o].label.as_str();
    let _ = match *l {
        Literal::NodeExists(n) => write!(out, "(exists {})", vars.node_name(n)),
        Literal::StrictBefore { src, dst, label } => {
            write!(out, "(before {} {}", vars.node_name(src), vars.node_name(dst))
                .and_then(|_| match vars.labels[label].as_str() {
                    "" => write!(out, ")"),
                    s => write!(out, " \"{s}\")"),
                })
        }
        Literal::Pred(p) => {
            let (name, args) = &vars.preds[p];
            let args: Vec<&str> = args.iter().map(|&a| op(a)).collect();
            write!(out, "({name} {})", args.join(" "))
        }
        Literal::NotNull(o) => write!(out, "(not-null {})", op(o)),
        Literal::Attr(a) => match a {
            AttrConstraint::KindIs(o, k) => write!(out, "(kind {} {})", op(o), kind_name(k)),
            AttrConstraint::AddrIs(o, v) => write!(out, "(addr {} {})", op(o), vars.domains.addresses[v]),
            AttrConstraint::AddrEq(a, b) => write!(out, "(addr= {} {})", op(a), op(b)),
            AttrConstraint::DataIs(o, v) => write!(out, "(data {} {})", op(o), vars.domains.data[v]),
            AttrConstraint::DataEq(a, b) => write!(out, "(data= {} {})", op(a), op(b)),
        },
    };
}

fn go(out: &mut String, vars: &VarSpace, f: &G, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        out.push('\n');
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match f {
        G::Const(b) => out.push_str(if *b { "true" } else { "false" }),
        G::Lit(l) => literal(out, vars, l),
        G::Not(a) => {
            out.push_str("(not ");
            go(out, vars, a, depth + 1);
            out.push(')');
        }
        G::And(xs) | G::Or(xs) => {
            out.push_str(if matches!(f, G::And(_)) { "(and" } else { "(or" });
            let flat = xs.iter().all(|x| matches!(x, G::Lit(_) | G::Const(_) | G::Not(_)));
            for x in xs {
                if flat {
                    out.push(' ');
                } else {
                    pad(out, depth + 1);
                }
                go(out, vars, x, depth + 1);
            }
            out.push(')');
        }
        G::SameNode(a, b) => {
            let _ = write!(out, "(same-node {} {})", vars.node_name(*a), vars.node_name(*b));
        }
    }
}

pub fn to_sexpr(f: &G, vars: &VarSpace) -> String {
    let mut out = String::new();
    go(&mut out, vars, f, 0);
    out.push('\n');
    out
}
