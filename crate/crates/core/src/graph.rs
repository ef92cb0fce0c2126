//! Witness µhb graphs recovered from satisfying models, and DOT output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use crate::elab::OpId;
use crate::formula::{evaluate, GroundFormula as G, LabelIdx, Literal, Model, NodeIdx, VarSpace};

/// Edges and node fusions a formula asserts positively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub edges: BTreeSet<(NodeIdx, NodeIdx, LabelIdx)>,
    pub merges: BTreeSet<(NodeIdx, NodeIdx)>,
}

impl Provenance {
    /// Collects from a grounded formula before node terms are resolved.
    pub fn collect(f: &G) -> Self {
        fn go(f: &G, pos: bool, p: &mut Provenance) {
            match f {
                G::Const(_) => {}
                G::Lit(Literal::StrictBefore { src, dst, label }) => {
                    if pos {
                        p.edges.insert((*src, *dst, *label));
                    }
                }
                G::Lit(_) => {}
                G::Not(a) => go(a, !pos, p),
                G::And(xs) | G::Or(xs) => xs.iter().for_each(|x| go(x, pos, p)),
                G::SameNode(a, b) => {
                    if pos && a != b {
                        p.merges.insert((*a.min(b), *a.max(b)));
                    }
                }
            }
        }
        let mut p = Provenance::default();
        go(f, true, &mut p);
        p
    }

    /// The edges and fusions that make `f` true under `m`: every child of a
    /// true conjunction, the first true child of a disjunction, nothing
    /// below a negation. Premises that fail contribute nothing.
    pub fn justify(f: &G, vars: &VarSpace, m: &Model) -> Self {
        fn go(f: &G, vars: &VarSpace, m: &Model, p: &mut Provenance) {
            match f {
                G::Lit(Literal::StrictBefore { src, dst, label }) => {
                    if m.strictly_before(*src, *dst) {
                        p.edges.insert((*src, *dst, *label));
                    }
                }
                G::SameNode(a, b) => {
                    if a != b && m.exists[*a] && evaluate(f, vars, m) {
                        p.merges.insert((*a.min(b), *a.max(b)));
                    }
                }
                G::And(xs) => {
                    if evaluate(f, vars, m) {
                        xs.iter().for_each(|x| go(x, vars, m, p));
                    }
                }
                G::Or(xs) => {
                    if let Some(x) = xs.iter().find(|x| evaluate(x, vars, m)) {
                        go(x, vars, m, p);
                    }
                }
                G::Const(_) | G::Lit(_) | G::Not(_) => {}
            }
        }
        let mut p = Provenance::default();
        go(f, vars, m, &mut p);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub id: NodeIdx,
    pub name: String,
    pub op: OpId,
    pub op_label: String,
    pub event: String,
    pub event_index: u32,
    /// Dense rank among existing nodes.
    pub ts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Strict,
    Merged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub src: NodeIdx,
    pub dst: NodeIdx,
    pub label: String,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UhbGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub merge_classes: Vec<Vec<NodeIdx>>,
}

impl UhbGraph {
    pub fn node(&self, id: NodeIdx) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_by_name(&self, name: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn has_edge(&self, src: &str, dst: &str) -> bool {
        let (Some(a), Some(b)) = (self.node_by_name(src), self.node_by_name(dst)) else {
            return false;
        };
        self.edges
            .iter()
            .any(|e| e.kind == EdgeKind::Strict && e.src == a.id && e.dst == b.id)
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let n = parent[c];
        parent[c] = r;
        c = n;
    }
    r
}

/// Existing nodes with dense timestamps, the asserted strict edges that
/// hold, and merge classes of asserted fusions that hold.
pub fn extract_graph(model: &Model, vars: &VarSpace, prov: &Provenance) -> UhbGraph {
    let existing: Vec<NodeIdx> = (0..vars.nodes.len()).filter(|&n| model.exists[n]).collect();
    let distinct: BTreeSet<i64> = existing.iter().map(|&n| model.ts[n]).collect();
    let rank: BTreeMap<i64, usize> = distinct.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
    let nodes = existing
        .iter()
        .map(|&n| {
            let info = &vars.nodes[n];
            GraphNode {
                id: n,
                name: vars.node_name(n),
                op: info.op,
                op_label: vars.ops[info.op].label.clone(),
                event: info.event.clone(),
                event_index: info.event_index,
                ts: rank[&model.ts[n]],
            }
        })
        .collect();

    let mut edges: Vec<GraphEdge> = prov
        .edges
        .iter()
        .filter(|&&(s, d, _)| model.strictly_before(s, d))
        .map(|&(s, d, l)| GraphEdge {
            src: s,
            dst: d,
            label: vars.labels[l].clone(),
            kind: EdgeKind::Strict,
        })
        .collect();

    let mut parent: Vec<usize> = (0..vars.nodes.len()).collect();
    for &(a, b) in &prov.merges {
        if model.exists[a] && model.exists[b] && model.ts[a] == model.ts[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
            edges.push(GraphEdge {
                src: a,
                dst: b,
                label: String::new(),
                kind: EdgeKind::Merged,
            });
        }
    }
    let mut classes: BTreeMap<usize, Vec<NodeIdx>> = BTreeMap::new();
    for &n in &existing {
        classes.entry(find(&mut parent, n)).or_default().push(n);
    }
    UhbGraph {
        nodes,
        edges,
        merge_classes: classes.into_values().filter(|c| c.len() > 1).collect(),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT text with one column (cluster) per operation and one row per event
/// index. Merged nodes are drawn once, with a doubled border.
pub fn to_dot(g: &UhbGraph) -> String {
    let mut rep: BTreeMap<NodeIdx, NodeIdx> = BTreeMap::new();
    for class in &g.merge_classes {
        for &n in class {
            rep.insert(n, class[0]);
        }
    }
    let rep_of = |n: NodeIdx| rep.get(&n).copied().unwrap_or(n);
    let merged: BTreeSet<NodeIdx> = g.merge_classes.iter().map(|c| c[0]).collect();

    let mut columns: BTreeMap<OpId, Vec<&GraphNode>> = BTreeMap::new();
    for n in &g.nodes {
        if rep_of(n.id) == n.id {
            columns.entry(n.op).or_default().push(n);
        }
    }

    let mut out = String::from("digraph uhb {\n  newrank=true;\n  node [shape=circle, fontsize=10];\n");
    for (col, (op, ns)) in columns.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_op{op} {{");
        let _ = writeln!(out, "    label={};", quote(&ns[0].op_label));
        let mut ns = ns.clone();
        ns.sort_by_key(|n| (n.event_index, n.id));
        for n in ns {
            let names: Vec<String> = g
                .merge_classes
                .iter()
                .find(|c| c[0] == n.id)
                .map(|c| c.iter().filter_map(|&m| g.node(m)).map(|m| m.name.clone()).collect())
                .unwrap_or_else(|| vec![n.name.clone()]);
            let periph = if merged.contains(&n.id) { ", peripheries=2" } else { "" };
            let _ = writeln!(
                out,
                "    n{} [label={}, pos=\"{},{}!\"{periph}];",
                n.id,
                quote(&format!("{}\\nts={}", names.join(" = "), n.ts)),
                col * 2,
                -(n.event_index as i64) * 2,
            );
        }
        out.push_str("  }\n");
    }
    let mut rows: BTreeMap<u32, Vec<NodeIdx>> = BTreeMap::new();
    for ns in columns.values() {
        for n in ns {
            rows.entry(n.event_index).or_default().push(n.id);
        }
    }
    for ids in rows.values() {
        let list: Vec<String> = ids.iter().map(|i| format!("n{i}")).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", list.join("; "));
    }
    let mut drawn = BTreeSet::new();
    for e in &g.edges {
        if e.kind != EdgeKind::Strict {
            continue;
        }
        let (s, d) = (rep_of(e.src), rep_of(e.dst));
        if !drawn.insert((s, d, e.label.as_str())) {
            continue;
        }
        if e.label.is_empty() {
            let _ = writeln!(out, "  n{s} -> n{d};");
        } else {
            let _ = writeln!(out, "  n{s} -> n{d} [label={}];", quote(&e.label));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_is_valid_dot() {
        let dot = to_dot(&UhbGraph::default());
        assert!(dot.starts_with("digraph uhb {"));
        assert!(dot.trim_end().ends_with('}'));
        assert!(!dot.contains("->"));
    }
}
