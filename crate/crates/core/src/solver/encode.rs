//! Translation of normalized ground formulas into clauses plus acyclicity
//! atoms for the native solver.

use std::collections::HashMap;

use crate::formula::{
    normalize::same_node, AttrConstraint, GroundFormula as G, Literal, Model, NodeIdx, VarSpace,
};
use crate::elab::OpId;

use super::cdcl::{Lit, Solver, Var};

#[derive(Debug, Default, Clone)]
struct OpVars {
    not_null: Option<Var>,
    kind: Option<Vec<Var>>,
    addr: Option<Vec<Var>>,
    data: Option<Vec<Var>>,
}

/// A solver loaded with one formula, plus the map back to its variables.
pub struct Encoded<'v> {
    pub solver: Solver,
    vars: &'v VarSpace,
    true_var: Option<Var>,
    /// Theory node per ground node.
    node: HashMap<NodeIdx, u32>,
    sb: HashMap<(NodeIdx, NodeIdx), Var>,
    preds: HashMap<usize, Var>,
    ops: Vec<OpVars>,
    eq: HashMap<AttrConstraint, Var>,
}

impl<'v> Encoded<'v> {
    /// Encodes `f`, which should already be normalized; any remaining
    /// node terms are lowered on the way.
    pub fn new(f: &G, vars: &'v VarSpace) -> Self {
        let mut e = Encoded {
            solver: Solver::new(),
            vars,
            true_var: None,
            node: HashMap::new(),
            sb: HashMap::new(),
            preds: HashMap::new(),
            ops: vec![OpVars::default(); vars.ops.len()],
            eq: HashMap::new(),
        };
        e.assert_top(f);
        e
    }

    fn assert_top(&mut self, f: &G) {
        match f {
            G::Const(true) => {}
            G::Const(false) => {
                self.solver.add_clause(&[]);
            }
            G::And(xs) => {
                for x in xs {
                    self.assert_top(x);
                }
            }
            G::Or(xs) => {
                let c: Vec<Lit> = xs.iter().map(|x| self.lit_for(x)).collect();
                self.solver.add_clause(&c);
            }
            G::SameNode(a, b) => self.assert_top(&crate::formula::normalize(same_node(*a, *b))),
            _ => {
                let l = self.lit_for(f);
                self.solver.add_clause(&[l]);
            }
        }
    }

    fn constant(&mut self, b: bool) -> Lit {
        let v = match self.true_var {
            Some(v) => v,
            None => {
                let v = self.solver.new_var();
                self.solver.add_clause(&[Lit::new(v, true)]);
                self.true_var = Some(v);
                v
            }
        };
        Lit::new(v, b)
    }

    /// A literal that implies `f`.
    fn lit_for(&mut self, f: &G) -> Lit {
        match f {
            G::Const(b) => self.constant(*b),
            G::Lit(l) => self.atom(l),
            G::Not(inner) => match &**inner {
                G::Lit(l) => !self.atom(l),
                other => {
                    let g = crate::formula::normalize(G::not(other.clone()));
                    self.lit_for(&g)
                }
            },
            G::And(xs) => {
                let t = self.solver.new_var();
                for x in xs {
                    let l = self.lit_for(x);
                    self.solver.add_clause(&[Lit::new(t, false), l]);
                }
                Lit::new(t, true)
            }
            G::Or(xs) => {
                let t = self.solver.new_var();
                let mut c = vec![Lit::new(t, false)];
                for x in xs {
                    c.push(self.lit_for(x));
                }
                self.solver.add_clause(&c);
                Lit::new(t, true)
            }
            G::SameNode(a, b) => {
                let g = crate::formula::normalize(same_node(*a, *b));
                self.lit_for(&g)
            }
        }
    }

    fn node_var(&mut self, n: NodeIdx) -> Var {
        if let Some(&t) = self.node.get(&n) {
            return self.solver.theory.ex_var(t);
        }
        let v = self.solver.new_var();
        let t = self.solver.theory.add_node(v);
        self.node.insert(n, t);
        v
    }

    fn one_hot(&mut self, n: usize) -> Vec<Var> {
        let vs: Vec<Var> = (0..n).map(|_| self.solver.new_var()).collect();
        let all: Vec<Lit> = vs.iter().map(|&v| Lit::new(v, true)).collect();
        self.solver.add_clause(&all);
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                self.solver.add_clause(&[Lit::new(vs[i], false), Lit::new(vs[j], false)]);
            }
        }
        vs
    }

    fn kind_vars(&mut self, o: OpId) -> Vec<Var> {
        if self.ops[o].kind.is_none() {
            let n = self.vars.ops[o].kinds.len();
            self.ops[o].kind = Some(self.one_hot(n));
        }
        self.ops[o].kind.clone().unwrap()
    }

    fn addr_vars(&mut self, o: OpId) -> Vec<Var> {
        if self.ops[o].addr.is_none() {
            let n = self.vars.domains.addresses.len();
            self.ops[o].addr = Some(self.one_hot(n));
        }
        self.ops[o].addr.clone().unwrap()
    }

    fn data_vars(&mut self, o: OpId) -> Vec<Var> {
        if self.ops[o].data.is_none() {
            let n = self.vars.domains.data.len();
            self.ops[o].data = Some(self.one_hot(n));
        }
        self.ops[o].data.clone().unwrap()
    }

    fn atom(&mut self, l: &Literal) -> Lit {
        match *l {
            Literal::NodeExists(n) => Lit::new(self.node_var(n), true),
            Literal::StrictBefore { src, dst, .. } => {
                if src == dst {
                    return self.constant(false);
                }
                if let Some(&v) = self.sb.get(&(src, dst)) {
                    return Lit::new(v, true);
                }
                let es = self.node_var(src);
                let ed = self.node_var(dst);
                let v = self.solver.new_var();
                let (ts, td) = (self.node[&src], self.node[&dst]);
                self.solver.theory.add_atom(v, ts, td);
                self.solver.add_clause(&[Lit::new(v, false), Lit::new(es, true)]);
                self.solver.add_clause(&[Lit::new(v, false), Lit::new(ed, true)]);
                self.sb.insert((src, dst), v);
                Lit::new(v, true)
            }
            Literal::Pred(p) => {
                let v = match self.preds.get(&p) {
                    Some(&v) => v,
                    None => {
                        let v = self.solver.new_var();
                        self.preds.insert(p, v);
                        v
                    }
                };
                Lit::new(v, true)
            }
            Literal::NotNull(o) => {
                if !self.vars.ops[o].symbolic {
                    return self.constant(true);
                }
                let v = match self.ops[o].not_null {
                    Some(v) => v,
                    None => {
                        let v = self.solver.new_var();
                        self.ops[o].not_null = Some(v);
                        v
                    }
                };
                Lit::new(v, true)
            }
            Literal::Attr(a) => self.attr(a),
        }
    }

    fn attr(&mut self, a: AttrConstraint) -> Lit {
        match a {
            AttrConstraint::KindIs(o, k) => match self.vars.ops[o].kinds.iter().position(|&x| x == k) {
                Some(i) => Lit::new(self.kind_vars(o)[i], true),
                None => self.constant(false),
            },
            AttrConstraint::AddrIs(o, v) => match self.addr_vars(o).get(v) {
                Some(&x) => Lit::new(x, true),
                None => self.constant(false),
            },
            AttrConstraint::DataIs(o, v) => match self.data_vars(o).get(v) {
                Some(&x) => Lit::new(x, true),
                None => self.constant(false),
            },
            AttrConstraint::AddrEq(x, y) | AttrConstraint::DataEq(x, y) => {
                if x == y {
                    return self.constant(true);
                }
                if let Some(&v) = self.eq.get(&a) {
                    return Lit::new(v, true);
                }
                let (xs, ys) = if matches!(a, AttrConstraint::AddrEq(..)) {
                    (self.addr_vars(x), self.addr_vars(y))
                } else {
                    (self.data_vars(x), self.data_vars(y))
                };
                let e = self.solver.new_var();
                for (&p, &q) in xs.iter().zip(&ys) {
                    self.solver
                        .add_clause(&[Lit::new(p, false), Lit::new(q, false), Lit::new(e, true)]);
                    self.solver
                        .add_clause(&[Lit::new(e, false), Lit::new(p, false), Lit::new(q, true)]);
                }
                self.eq.insert(a, e);
                Lit::new(e, true)
            }
        }
    }

    /// Reads the model out of a satisfied solver. Unmentioned nodes are
    /// absent, unmentioned predicates false and unmentioned symbolic
    /// operations null.
    pub fn model(&self) -> Model {
        let s = &self.solver;
        let mut m = Model::empty(self.vars);
        let ts = s.timestamps();
        for (&n, &t) in &self.node {
            m.exists[n] = s.value(s.theory.ex_var(t));
            m.ts[n] = ts[t as usize];
        }
        for (&p, &v) in &self.preds {
            m.preds[p] = s.value(v);
        }
        let pick = |vs: &Option<Vec<Var>>| vs.as_ref().and_then(|vs| vs.iter().position(|&v| s.value(v)));
        for (o, ov) in self.ops.iter().enumerate() {
            if let Some(v) = ov.not_null {
                m.not_null[o] = s.value(v);
            }
            m.kind[o] = pick(&ov.kind).unwrap_or(0);
            m.addr[o] = pick(&ov.addr).unwrap_or(0);
            m.data[o] = pick(&ov.data).unwrap_or(0);
        }
        m
    }
}
