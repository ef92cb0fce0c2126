//! Direct evaluation of ground formulas under a full assignment.

use super::{AttrConstraint, GroundFormula, Literal, VarSpace};

/// A total assignment. Attribute entries are indices: `kind[op]` into the
/// operation's kind domain, `addr`/`data` into the query domains. Entries
/// for concrete operations are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub exists: Vec<bool>,
    pub ts: Vec<i64>,
    pub preds: Vec<bool>,
    pub not_null: Vec<bool>,
    pub kind: Vec<usize>,
    pub addr: Vec<usize>,
    pub data: Vec<usize>,
}

impl Model {
    /// All nodes absent, every predicate false, every operation null.
    pub fn empty(vars: &VarSpace) -> Self {
        Model {
            exists: vec![false; vars.nodes.len()],
            ts: vec![0; vars.nodes.len()],
            preds: vec![false; vars.preds.len()],
            not_null: vars.ops.iter().map(|o| !o.symbolic).collect(),
            kind: vec![0; vars.ops.len()],
            addr: vec![0; vars.ops.len()],
            data: vec![0; vars.ops.len()],
        }
    }

    pub fn strictly_before(&self, a: usize, b: usize) -> bool {
        self.exists[a] && self.exists[b] && self.ts[a] < self.ts[b]
    }

    pub fn literal(&self, vars: &VarSpace, l: &Literal) -> bool {
        match *l {
            Literal::NodeExists(n) => self.exists[n],
            Literal::StrictBefore { src, dst, .. } => self.strictly_before(src, dst),
            Literal::Pred(p) => self.preds[p],
            Literal::NotNull(o) => self.not_null[o],
            Literal::Attr(a) => match a {
                AttrConstraint::KindIs(o, k) => vars.ops[o].kinds.get(self.kind[o]) == Some(&k),
                AttrConstraint::AddrIs(o, v) => self.addr[o] == v,
                AttrConstraint::AddrEq(a, b) => self.addr[a] == self.addr[b],
                AttrConstraint::DataIs(o, v) => self.data[o] == v,
                AttrConstraint::DataEq(a, b) => self.data[a] == self.data[b],
            },
        }
    }
}

pub fn evaluate(f: &GroundFormula, vars: &VarSpace, m: &Model) -> bool {
    match f {
        GroundFormula::Const(b) => *b,
        GroundFormula::Lit(l) => m.literal(vars, l),
        GroundFormula::Not(a) => !evaluate(a, vars, m),
        GroundFormula::And(xs) => xs.iter().all(|x| evaluate(x, vars, m)),
        GroundFormula::Or(xs) => xs.iter().any(|x| evaluate(x, vars, m)),
        GroundFormula::SameNode(a, b) => {
            m.exists[*a] == m.exists[*b] && (!m.exists[*a] || m.ts[*a] == m.ts[*b])
        }
    }
}
