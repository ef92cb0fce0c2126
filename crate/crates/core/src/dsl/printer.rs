//! Pretty printer. Output reparses to a structurally equal tree.

use std::fmt::Write;

use super::ast::*;

// Binding strength, loosest first.
const PREC_QUANT: u8 = 0;
const PREC_IMPL: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Quant(_) => PREC_QUANT,
        Formula::Implies(..) | Formula::Iff(..) => PREC_IMPL,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Not(_) => PREC_NOT,
        _ => PREC_ATOM,
    }
}

fn node(out: &mut String, n: &NodeRef) {
    let _ = write!(out, "({}, {})", n.op, n.event);
}

fn edge(out: &mut String, e: &EdgeTerm) {
    out.push('(');
    node(out, &e.src);
    out.push_str(", ");
    node(out, &e.dst);
    let _ = write!(out, ", \"{}\")", e.label);
}

/// Writes `f` wrapped in parentheses when it binds looser than `min`.
fn child(out: &mut String, f: &Formula, min: u8) {
    // Quantifiers always get parentheses when nested below a connective.
    if prec(f) < min || (prec(f) == PREC_QUANT && min > PREC_QUANT) {
        out.push('(');
        formula_into(out, f);
        out.push(')');
    } else {
        formula_into(out, f);
    }
}

fn formula_into(out: &mut String, f: &Formula) {
    match f {
        Formula::Const(true) => out.push_str("True"),
        Formula::Const(false) => out.push_str("False"),
        Formula::Quant(q) => {
            let _ = write!(out, "{} {} \"{}\"", q.kind.keyword(), q.op_type, q.var);
            if let Some(d) = &q.domain {
                let _ = write!(out, " in \"{}\"", d.join(";"));
            }
            out.push_str(", ");
            formula_into(out, &q.body);
        }
        Formula::Not(a) => {
            out.push('~');
            child(out, a, PREC_NOT);
        }
        Formula::And(a, b) => {
            child(out, a, PREC_AND);
            out.push_str(" /\\ ");
            child(out, b, PREC_AND + 1);
        }
        Formula::Or(a, b) => {
            child(out, a, PREC_OR);
            out.push_str(" \\/ ");
            child(out, b, PREC_OR + 1);
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            child(out, a, PREC_IMPL + 1);
            out.push_str(if matches!(f, Formula::Implies(..)) {
                " => "
            } else {
                " <=> "
            });
            child(out, b, PREC_IMPL);
        }
        Formula::Pred(p, args) => {
            out.push_str(&p.name());
            for a in args {
                out.push(' ');
                out.push_str(a);
            }
        }
        Formula::NodeExists(n) => {
            out.push_str("NodeExists ");
            node(out, n);
        }
        Formula::EdgeExists(e) => {
            out.push_str("EdgeExists ");
            edge(out, e);
        }
        Formula::AddEdge(e) => {
            out.push_str("AddEdge ");
            edge(out, e);
        }
        Formula::SameNode(a, b) => {
            out.push_str("SameNode ");
            node(out, a);
            out.push(' ');
            node(out, b);
        }
        Formula::ParamEq(name, v) => {
            let _ = write!(out, "{name} = {v}");
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    formula_into(&mut out, f);
    out
}

fn axiom_into(out: &mut String, a: &Axiom, indent: &str) {
    let _ = writeln!(out, "{indent}Axiom \"{}\":", a.name);
    let _ = writeln!(out, "{indent}  {}.", print_formula(&a.body));
}

pub fn print_axiom_file(file: &AxiomFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ModuleID \"{}\".\n", file.module_type);
    for e in &file.events {
        let ext = if e.external { "External " } else { "" };
        let _ = writeln!(out, "DefineEvent {ext}{} \"{}\".", e.index, e.name);
    }
    for a in &file.axioms {
        out.push('\n');
        axiom_into(&mut out, a, "");
    }
    out
}

pub fn print_module_definition(def: &ModuleDef) -> String {
    let mut out = String::new();
    let head = if def.is_interface { "Interface" } else { "Module" };
    let _ = writeln!(out, "{head} {} ({}) {{", def.name, def.param_names.join(", "));
    let _ = writeln!(
        out,
        "  OperationType {}",
        def.operation_type.as_deref().unwrap_or("none")
    );
    out.push_str("  Properties {");
    for (k, v) in &def.properties {
        let _ = write!(out, " {k} {v}");
    }
    out.push_str(" }\n");
    if !def.is_interface {
        out.push_str("  Submodules {\n");
        for s in &def.submodules {
            let params: Vec<String> = s.params.iter().map(|(k, v)| format!("{k} : {v}")).collect();
            let _ = writeln!(out, "    {} {} ({})", s.module_type, s.name, params.join(", "));
        }
        out.push_str("  }\n  ConnectionAxioms {\n");
        for a in &def.connection_axioms {
            axiom_into(&mut out, a, "    ");
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
