//! SMT-LIB2 (QF_LIA) output and model parsing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::formula::{AttrConstraint, GroundFormula as G, Literal, Model, VarSpace};

#[derive(Default)]
struct Used {
    nodes: BTreeSet<usize>,
    preds: BTreeSet<usize>,
    not_null: BTreeSet<usize>,
    kind: BTreeSet<usize>,
    addr: BTreeSet<usize>,
    data: BTreeSet<usize>,
}

fn collect(f: &G, vars: &VarSpace, u: &mut Used) {
    match f {
        G::Const(_) => {}
        G::Lit(l) => match *l {
            Literal::NodeExists(n) => {
                u.nodes.insert(n);
            }
            Literal::StrictBefore { src, dst, .. } => {
                u.nodes.insert(src);
                u.nodes.insert(dst);
            }
            Literal::Pred(p) => {
                u.preds.insert(p);
            }
            Literal::NotNull(o) => {
                if vars.ops[o].symbolic {
                    u.not_null.insert(o);
                }
            }
            Literal::Attr(a) => match a {
                AttrConstraint::KindIs(o, _) => {
                    u.kind.insert(o);
                }
                AttrConstraint::AddrIs(o, _) => {
                    u.addr.insert(o);
                }
                AttrConstraint::AddrEq(a, b) => {
                    u.addr.insert(a);
                    u.addr.insert(b);
                }
                AttrConstraint::DataIs(o, _) => {
                    u.data.insert(o);
                }
                AttrConstraint::DataEq(a, b) => {
                    u.data.insert(a);
                    u.data.insert(b);
                }
            },
        },
        G::Not(a) => collect(a, vars, u),
        G::And(xs) | G::Or(xs) => xs.iter().for_each(|x| collect(x, vars, u)),
        G::SameNode(a, b) => {
            u.nodes.insert(*a);
            u.nodes.insert(*b);
        }
    }
}

fn term(f: &G, vars: &VarSpace, out: &mut String) {
    match f {
        G::Const(b) => out.push_str(if *b { "true" } else { "false" }),
        G::Lit(l) => literal(l, vars, out),
        G::Not(a) => {
            out.push_str("(not ");
            term(a, vars, out);
            out.push(')');
        }
        G::And(xs) | G::Or(xs) => {
            out.push_str(if matches!(f, G::And(_)) { "(and" } else { "(or" });
            for x in xs {
                out.push(' ');
                term(x, vars, out);
            }
            out.push(')');
        }
        G::SameNode(a, b) => {
            let _ = write!(
                out,
                "(and (= ex_n{a} ex_n{b}) (=> ex_n{a} (= ts_n{a} ts_n{b})))"
            );
        }
    }
}

fn literal(l: &Literal, vars: &VarSpace, out: &mut String) {
    let _ = match *l {
        Literal::NodeExists(n) => write!(out, "ex_n{n}"),
        Literal::StrictBefore { src, dst, .. } => {
            write!(out, "(and ex_n{src} ex_n{dst} (< ts_n{src} ts_n{dst}))")
        }
        Literal::Pred(p) => write!(out, "p{p}"),
        Literal::NotNull(o) => {
            if vars.ops[o].symbolic {
                write!(out, "nn_o{o}")
            } else {
                write!(out, "true")
            }
        }
        Literal::Attr(a) => match a {
            AttrConstraint::KindIs(o, k) => match vars.ops[o].kinds.iter().position(|&x| x == k) {
                Some(i) => write!(out, "(= kind_o{o} {i})"),
                None => write!(out, "false"),
            },
            AttrConstraint::AddrIs(o, v) => write!(out, "(= addr_o{o} {v})"),
            AttrConstraint::AddrEq(a, b) => write!(out, "(= addr_o{a} addr_o{b})"),
            AttrConstraint::DataIs(o, v) => write!(out, "(= data_o{o} {v})"),
            AttrConstraint::DataEq(a, b) => write!(out, "(= data_o{a} data_o{b})"),
        },
    };
}

/// A complete script: declarations, domain bounds, the assertion,
/// `check-sat` and `get-model`.
pub fn to_smtlib(f: &G, vars: &VarSpace) -> String {
    let mut u = Used::default();
    collect(f, vars, &mut u);
    let mut s = String::from("(set-logic QF_LIA)\n(set-option :produce-models true)\n");
    for n in &u.nodes {
        let _ = writeln!(s, "; n{n} = {}", vars.node_name(*n));
        let _ = writeln!(s, "(declare-const ex_n{n} Bool)\n(declare-const ts_n{n} Int)");
    }
    for p in &u.preds {
        let _ = writeln!(s, "(declare-const p{p} Bool)");
    }
    for o in &u.not_null {
        let _ = writeln!(s, "(declare-const nn_o{o} Bool)");
    }
    let bounded = |s: &mut String, name: &str, set: &BTreeSet<usize>, size: &dyn Fn(usize) -> usize| {
        for &o in set {
            let _ = writeln!(s, "(declare-const {name}_o{o} Int)");
            let _ = writeln!(
                s,
                "(assert (and (<= 0 {name}_o{o}) (< {name}_o{o} {})))",
                size(o)
            );
        }
    };
    bounded(&mut s, "kind", &u.kind, &|o| vars.ops[o].kinds.len());
    bounded(&mut s, "addr", &u.addr, &|_| vars.domains.addresses.len());
    bounded(&mut s, "data", &u.data, &|_| vars.domains.data.len());
    s.push_str("(assert ");
    term(f, vars, &mut s);
    s.push_str(")\n(check-sat)\n(get-model)\n");
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

/// Parses a sequence of s-expressions; `;` comments are skipped.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, String> {
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().ok_or("unbalanced `)`")?;
                stack.last_mut().ok_or("unbalanced `)`")?.push(SExpr::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' | '|' => {
                let mut s = String::new();
                for c in chars.by_ref() {
                    if c == '"' || c == '|' {
                        break;
                    }
                    s.push(c);
                }
                stack.last_mut().unwrap().push(SExpr::Atom(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                stack.last_mut().unwrap().push(SExpr::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Bool(bool),
    Int(i64),
}

fn value(e: &SExpr) -> Option<Value> {
    match e {
        SExpr::Atom(a) => match a.as_str() {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            n => n.parse().ok().map(Value::Int),
        },
        SExpr::List(xs) => match xs.as_slice() {
            [SExpr::Atom(m), x] if m == "-" => match value(x)? {
                Value::Int(i) => Some(Value::Int(-i)),
                Value::Bool(_) => None,
            },
            _ => None,
        },
    }
}

/// Collects `(define-fun name () Sort value)` entries, with or without
/// a surrounding `model` keyword.
pub fn parse_model_values(e: &SExpr) -> BTreeMap<String, SExpr> {
    let mut out = BTreeMap::new();
    if let SExpr::List(xs) = e {
        for x in xs {
            if let SExpr::List(d) = x {
                if let [SExpr::Atom(kw), SExpr::Atom(name), _, _, v] = d.as_slice() {
                    if kw == "define-fun" {
                        out.insert(name.clone(), v.clone());
                    }
                }
            }
        }
    }
    out
}

/// Builds a [`Model`] from solver output values. Missing entries take
/// the same defaults as the native solver.
pub fn model_from_values(values: &BTreeMap<String, SExpr>, vars: &VarSpace) -> Result<Model, String> {
    let mut m = Model::empty(vars);
    for (name, v) in values {
        let val = value(v).ok_or_else(|| format!("cannot read value of `{name}`"))?;
        let (prefix, idx) = match name.rfind(|c: char| !c.is_ascii_digit()) {
            Some(i) if i + 1 < name.len() => (&name[..=i], &name[i + 1..]),
            _ => continue,
        };
        let Ok(i) = idx.parse::<usize>() else { continue };
        fn set<T>(v: &mut [T], i: usize, x: T, name: &str) -> Result<(), String> {
            let slot = v.get_mut(i).ok_or_else(|| format!("`{name}` out of range"))?;
            *slot = x;
            Ok(())
        }
        match (prefix, val) {
            ("ex_n", Value::Bool(b)) => set(&mut m.exists, i, b, name)?,
            ("ts_n", Value::Int(t)) => set(&mut m.ts, i, t, name)?,
            ("p", Value::Bool(b)) => set(&mut m.preds, i, b, name)?,
            ("nn_o", Value::Bool(b)) => set(&mut m.not_null, i, b, name)?,
            ("kind_o", Value::Int(k)) => set(&mut m.kind, i, k.max(0) as usize, name)?,
            ("addr_o", Value::Int(k)) => set(&mut m.addr, i, k.max(0) as usize, name)?,
            ("data_o", Value::Int(k)) => set(&mut m.data, i, k.max(0) as usize, name)?,
            _ => {}
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sexpr_roundtrip() {
        let e = parse_sexprs("(a (b -1) ; c\n |d e|)").unwrap();
        assert_eq!(
            e,
            vec![SExpr::List(vec![
                SExpr::Atom("a".into()),
                SExpr::List(vec![SExpr::Atom("b".into()), SExpr::Atom("-1".into())]),
                SExpr::Atom("d e".into()),
            ])]
        );
        assert!(parse_sexprs("(a").is_err());
        assert!(parse_sexprs("a)").is_err());
    }

    #[test]
    fn negative_values() {
        let e = parse_sexprs("((define-fun ts_n0 () Int (- 3)) (define-fun ex_n0 () Bool true))").unwrap();
        let vals = parse_model_values(&e[0]);
        assert_eq!(value(&vals["ts_n0"]), Some(Value::Int(-3)));
        assert_eq!(value(&vals["ex_n0"]), Some(Value::Bool(true)));
    }
}
