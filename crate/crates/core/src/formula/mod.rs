//! Quantifier-free formulas over µhb node existence, strict-before atoms,
//! free predicate variables and symbolic operation attributes.

pub mod eval;
pub mod ground;
pub mod normalize;
pub mod sexpr;

use std::collections::HashMap;

use crate::elab::{AttrDomains, InstId, InstanceTree, OpId};
use crate::litmus::InstrKind;

pub use eval::{evaluate, Model};
pub use ground::{ground_axiom, ground_design, predicate_ground, GroundError, Grounder};
pub use normalize::{normalize, resolve_node_terms};
pub use sexpr::to_sexpr;

pub type NodeIdx = usize;
pub type PredIdx = usize;
pub type LabelIdx = usize;

/// A `(operation, event)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub op: OpId,
    pub event: String,
    pub event_index: u32,
    pub owner: InstId,
}

/// Constraints on symbolic operation attributes. Address and data values
/// are indices into the query's [`AttrDomains`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrConstraint {
    KindIs(OpId, InstrKind),
    AddrIs(OpId, usize),
    AddrEq(OpId, OpId),
    DataIs(OpId, usize),
    DataEq(OpId, OpId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    NodeExists(NodeIdx),
    /// Both nodes exist and `src` happens strictly before `dst`. The label
    /// is carried for graph output only.
    StrictBefore {
        src: NodeIdx,
        dst: NodeIdx,
        label: LabelIdx,
    },
    Pred(PredIdx),
    NotNull(OpId),
    Attr(AttrConstraint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundFormula {
    Const(bool),
    Lit(Literal),
    Not(Box<GroundFormula>),
    And(Vec<GroundFormula>),
    Or(Vec<GroundFormula>),
    /// Removed by [`resolve_node_terms`].
    SameNode(NodeIdx, NodeIdx),
}

impl GroundFormula {
    pub const TRUE: GroundFormula = GroundFormula::Const(true);
    pub const FALSE: GroundFormula = GroundFormula::Const(false);

    pub fn lit(l: Literal) -> Self {
        GroundFormula::Lit(l)
    }

    pub fn not(f: GroundFormula) -> Self {
        match f {
            GroundFormula::Const(b) => GroundFormula::Const(!b),
            GroundFormula::Not(inner) => *inner,
            other => GroundFormula::Not(Box::new(other)),
        }
    }

    /// Conjunction with constant folding and flattening.
    pub fn and(items: Vec<GroundFormula>) -> Self {
        let mut out = Vec::with_capacity(items.len());
        for f in items {
            match f {
                GroundFormula::Const(true) => {}
                GroundFormula::Const(false) => return GroundFormula::FALSE,
                GroundFormula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => GroundFormula::TRUE,
            1 => out.pop().unwrap(),
            _ => GroundFormula::And(out),
        }
    }

    /// Disjunction with constant folding and flattening.
    pub fn or(items: Vec<GroundFormula>) -> Self {
        let mut out = Vec::with_capacity(items.len());
        for f in items {
            match f {
                GroundFormula::Const(false) => {}
                GroundFormula::Const(true) => return GroundFormula::TRUE,
                GroundFormula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => GroundFormula::FALSE,
            1 => out.pop().unwrap(),
            _ => GroundFormula::Or(out),
        }
    }

    pub fn implies(a: GroundFormula, b: GroundFormula) -> Self {
        Self::or(vec![Self::not(a), b])
    }

    pub fn iff(a: GroundFormula, b: GroundFormula) -> Self {
        Self::and(vec![
            Self::or(vec![Self::not(a.clone()), b.clone()]),
            Self::or(vec![a, Self::not(b)]),
        ])
    }

    /// Calls `f` on every literal with its polarity (`true` = positive),
    /// treating the formula as negation normal form.
    pub fn for_each_literal(&self, f: &mut dyn FnMut(&Literal, bool)) {
        fn go(g: &GroundFormula, pos: bool, f: &mut dyn FnMut(&Literal, bool)) {
            match g {
                GroundFormula::Const(_) | GroundFormula::SameNode(..) => {}
                GroundFormula::Lit(l) => f(l, pos),
                GroundFormula::Not(a) => go(a, !pos, f),
                GroundFormula::And(xs) | GroundFormula::Or(xs) => {
                    for x in xs {
                        go(x, pos, f);
                    }
                }
            }
        }
        go(self, true, f);
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            GroundFormula::Not(a) => 1 + a.size(),
            GroundFormula::And(xs) | GroundFormula::Or(xs) => 1 + xs.iter().map(Self::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Per-operation facts the solver needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpInfo {
    pub label: String,
    pub owner: InstId,
    pub index: u32,
    pub symbolic: bool,
    /// Empty for concrete operations.
    pub kinds: Vec<InstrKind>,
}

/// Names and indexes every variable a query can mention.
#[derive(Debug, Clone, Default)]
pub struct VarSpace {
    pub nodes: Vec<NodeInfo>,
    node_index: HashMap<(OpId, u32), NodeIdx>,
    /// `(name, arguments)` per free predicate variable.
    pub preds: Vec<(String, Vec<OpId>)>,
    pred_index: HashMap<(String, Vec<OpId>), PredIdx>,
    pub labels: Vec<String>,
    label_index: HashMap<String, LabelIdx>,
    pub ops: Vec<OpInfo>,
    pub domains: AttrDomains,
}

impl VarSpace {
    /// Creates one node per legal `(operation, event)` pair, ordered by
    /// operation uid then event index.
    pub fn for_tree(tree: &InstanceTree) -> Self {
        let mut vs = VarSpace {
            domains: tree.domains.clone(),
            ..VarSpace::default()
        };
        vs.intern_label("");
        for op in &tree.ops {
            let owner = &tree.instances[op.owner];
            vs.ops.push(OpInfo {
                label: tree.op_label(op.uid),
                owner: op.owner,
                index: op.index,
                symbolic: op.is_symbolic(),
                kinds: if op.is_symbolic() {
                    owner.kind_domain.clone()
                } else {
                    Vec::new()
                },
            });
            let mut events = owner.def.event_decls.clone();
            events.sort_by_key(|e| e.index);
            for e in events {
                let idx = vs.nodes.len();
                vs.node_index.insert((op.uid, e.index), idx);
                vs.nodes.push(NodeInfo {
                    op: op.uid,
                    event: e.name.clone(),
                    event_index: e.index,
                    owner: op.owner,
                });
            }
        }
        vs
    }

    pub fn node(&self, op: OpId, event_index: u32) -> Option<NodeIdx> {
        self.node_index.get(&(op, event_index)).copied()
    }

    pub fn node_by_name(&self, op: OpId, event: &str) -> Option<NodeIdx> {
        self.nodes
            .iter()
            .position(|n| n.op == op && n.event == event)
    }

    pub fn intern_pred(&mut self, name: &str, args: Vec<OpId>) -> PredIdx {
        let key = (name.to_string(), args);
        if let Some(&i) = self.pred_index.get(&key) {
            return i;
        }
        let i = self.preds.len();
        self.preds.push(key.clone());
        self.pred_index.insert(key, i);
        i
    }

    pub fn pred(&self, name: &str, args: &[OpId]) -> Option<PredIdx> {
        self.pred_index.get(&(name.to_string(), args.to_vec())).copied()
    }

    pub fn intern_label(&mut self, label: &str) -> LabelIdx {
        if let Some(&i) = self.label_index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.label_index.insert(label.to_string(), i);
        i
    }

    pub fn node_name(&self, n: NodeIdx) -> String {
        let info = &self.nodes[n];
        format!("{}.{}", self.ops[info.op].label, info.event)
    }
}
