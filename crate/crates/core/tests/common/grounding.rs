use std::collections::BTreeMap;

use modcheck_core::dsl::{
    parse_formula, print_formula, AccessSet, Axiom, EdgeTerm, FenceFlavor, Formula, NodeRef, Predicate, QuantKind,
    Quantifier,
};
use modcheck_core::elab::{assign_operations, build_tree, Design, ElabOptions, InstanceTree, Mode, OpId};
use modcheck_core::formula::{evaluate, normalize, resolve_node_terms, Grounder, Model, VarSpace};
use modcheck_core::litmus::{Expectation, InstrKind, LitmusInstruction, LitmusTest, Mcm};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn design() -> Design {
    let files: BTreeMap<String, String> = [
        (
            "P.mdef",
            "Module P () { OperationType none Properties { } Submodules { Core c0 (c : 0) Mem mem () } ConnectionAxioms { } }",
        ),
        (
            "Core.mdef",
            "Module Core (c) { OperationType microop Properties { IsCore yes } Submodules { } ConnectionAxioms { } }",
        ),
        ("Core.uax", "ModuleID \"Core\".\nDefineEvent External 0 \"E0\".\nDefineEvent External 1 \"E1\"."),
        (
            "Mem.mdef",
            "Module Mem () { OperationType transaction Properties { } Submodules { } ConnectionAxioms { } }",
        ),
        ("Mem.uax", "ModuleID \"Mem\".\nDefineEvent External 0 \"E0\".\nDefineEvent External 1 \"E1\"."),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    Design::from_provider("P", &files).unwrap()
}

fn random_test(rng: &mut StdRng) -> LitmusTest {
    let n = rng.gen_range(1..=2);
    let instructions = (0..n)
        .map(|i| {
            let kind = match rng.gen_range(0..3) {
                0 => InstrKind::Read,
                1 => InstrKind::Write,
                _ => InstrKind::Fence(*FenceFlavor::all().choose(rng).unwrap()),
            };
            let mem = !matches!(kind, InstrKind::Fence(_));
            LitmusInstruction {
                id: format!("i{i}"),
                core: 0,
                po_index: i,
                kind,
                address: mem.then(|| ["x", "y"][rng.gen_range(0..2)].to_string()),
                data: mem.then(|| rng.gen_range(0..3)),
            }
        })
        .collect();
    LitmusTest {
        name: "t".into(),
        mcm: Mcm::SC,
        expected: Expectation::Forbidden,
        instructions,
    }
}

struct Gen<'r> {
    rng: &'r mut StdRng,
    next: usize,
}

impl Gen<'_> {
    fn var(&mut self, bound: &[String]) -> String {
        bound.choose(self.rng).unwrap().clone()
    }

    fn node(&mut self, bound: &[String]) -> NodeRef {
        NodeRef {
            op: self.var(bound),
            event: ["E0", "E1"][self.rng.gen_range(0..2)].to_string(),
        }
    }

    fn edge(&mut self, bound: &[String]) -> EdgeTerm {
        EdgeTerm {
            src: self.node(bound),
            dst: self.node(bound),
            label: ["", "l"][self.rng.gen_range(0..2)].to_string(),
        }
    }

    fn quant(&mut self, bound: &mut Vec<String>, depth: u32) -> Formula {
        let var = format!("v{}", self.next);
        self.next += 1;
        let domain = match self.rng.gen_range(0..3) {
            0 => vec!["c0".to_string()],
            1 => vec!["mem".to_string()],
            _ => vec!["c0".to_string(), "mem".to_string()],
        };
        bound.push(var.clone());
        let body = self.formula(bound, depth + 1);
        bound.pop();
        Formula::Quant(Quantifier {
            kind: if self.rng.gen_bool(0.5) { QuantKind::Forall } else { QuantKind::Exists },
            op_type: "microop".into(),
            var,
            domain: Some(domain),
            body: Box::new(body),
        })
    }

    fn atom(&mut self, bound: &[String]) -> Formula {
        let preds = [
            Predicate::IsAnyRead,
            Predicate::IsAnyWrite,
            Predicate::IsAnyFence,
            Predicate::IsFence(FenceFlavor {
                pred: AccessSet::W,
                succ: AccessSet::R,
            }),
            Predicate::SameAddress,
            Predicate::SameData,
            Predicate::ProgramOrder,
            Predicate::DataFromInitialState,
            Predicate::IsNotNull,
            Predicate::Mapped,
        ];
        match self.rng.gen_range(0..10) {
            0..=5 => {
                let p = *preds.choose(self.rng).unwrap();
                let args = (0..p.arity()).map(|_| self.var(bound)).collect();
                Formula::Pred(p, args)
            }
            6 => Formula::NodeExists(self.node(bound)),
            7 => Formula::EdgeExists(self.edge(bound)),
            8 => Formula::AddEdge(self.edge(bound)),
            _ => Formula::SameNode(self.node(bound), self.node(bound)),
        }
    }

    fn formula(&mut self, bound: &mut Vec<String>, depth: u32) -> Formula {
        if depth >= 4 || self.rng.gen_bool(0.3) {
            return self.atom(bound);
        }
        let b = |f: Formula| Box::new(f);
        match self.rng.gen_range(0..7) {
            0 => Formula::Not(b(self.formula(bound, depth + 1))),
            1 => Formula::And(b(self.formula(bound, depth + 1)), b(self.formula(bound, depth + 1))),
            2 => Formula::Or(b(self.formula(bound, depth + 1)), b(self.formula(bound, depth + 1))),
            3 => Formula::Implies(b(self.formula(bound, depth + 1)), b(self.formula(bound, depth + 1))),
            4 => Formula::Iff(b(self.formula(bound, depth + 1)), b(self.formula(bound, depth + 1))),
            _ => self.quant(bound, depth),
        }
    }
}

fn random_model(rng: &mut StdRng, tree: &InstanceTree, vars: &VarSpace) -> Model {
    let mut m = Model::empty(vars);
    for n in 0..vars.nodes.len() {
        m.exists[n] = rng.gen_bool(0.7);
        m.ts[n] = rng.gen_range(0..4);
    }
    for p in m.preds.iter_mut() {
        *p = rng.gen_bool(0.5);
    }
    for o in 0..vars.ops.len() {
        if tree.op(o).is_symbolic() {
            m.not_null[o] = rng.gen_bool(0.7);
            m.kind[o] = rng.gen_range(0..vars.ops[o].kinds.len());
            m.addr[o] = rng.gen_range(0..vars.domains.addresses.len());
            m.data[o] = rng.gen_range(0..vars.domains.data.len());
        }
    }
    m
}

/// Evaluates the axiom itself, substituting operations for variables.
struct Direct<'a> {
    tree: &'a InstanceTree,
    vars: &'a VarSpace,
    m: &'a Model,
}

impl Direct<'_> {
    fn live(&self, o: OpId) -> bool {
        !self.tree.op(o).is_symbolic() || self.m.not_null[o]
    }

    fn kind(&self, o: OpId) -> InstrKind {
        match &self.tree.op(o).concrete {
            Some(i) => i.kind,
            None => self.vars.ops[o].kinds[self.m.kind[o]],
        }
    }

    fn address(&self, o: OpId) -> Option<String> {
        match &self.tree.op(o).concrete {
            Some(i) => i.address.clone(),
            None => Some(self.vars.domains.addresses[self.m.addr[o]].clone()),
        }
    }

    fn data(&self, o: OpId) -> Option<i64> {
        match &self.tree.op(o).concrete {
            Some(i) => i.data,
            None => Some(self.vars.domains.data[self.m.data[o]]),
        }
    }

    fn node(&self, env: &BTreeMap<String, OpId>, n: &NodeRef) -> usize {
        let o = env[&n.op];
        self.vars.node_by_name(o, &n.event).expect("legal node")
    }

    fn before(&self, a: usize, b: usize) -> bool {
        a != b && self.m.exists[a] && self.m.exists[b] && self.m.ts[a] < self.m.ts[b]
    }

    fn eval(&self, f: &Formula, env: &mut BTreeMap<String, OpId>) -> bool {
        match f {
            Formula::Const(b) => *b,
            Formula::Quant(q) => {
                let ops: Vec<OpId> = q
                    .domain
                    .as_ref()
                    .unwrap()
                    .iter()
                    .flat_map(|n| self.tree.child(0, n).unwrap().ops.clone())
                    .filter(|&o| self.live(o))
                    .collect();
                let mut results = ops.into_iter().map(|o| {
                    let saved = env.insert(q.var.clone(), o);
                    let r = self.eval(&q.body, env);
                    match saved {
                        Some(s) => env.insert(q.var.clone(), s),
                        None => env.remove(&q.var),
                    };
                    r
                });
                match q.kind {
                    QuantKind::Forall => results.all(|r| r),
                    QuantKind::Exists => results.any(|r| r),
                }
            }
            Formula::Not(a) => !self.eval(a, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Formula::Pred(p, args) => {
                let o: Vec<OpId> = args.iter().map(|a| env[a]).collect();
                match p {
                    Predicate::IsAnyRead => self.kind(o[0]) == InstrKind::Read,
                    Predicate::IsAnyWrite => self.kind(o[0]) == InstrKind::Write,
                    Predicate::IsAnyFence => matches!(self.kind(o[0]), InstrKind::Fence(_)),
                    Predicate::IsFence(fl) => self.kind(o[0]) == InstrKind::Fence(*fl),
                    Predicate::SameAddress => {
                        let (a, b) = (self.address(o[0]), self.address(o[1]));
                        a.is_some() && a == b
                    }
                    Predicate::SameData => {
                        let (a, b) = (self.data(o[0]), self.data(o[1]));
                        a.is_some() && a == b
                    }
                    Predicate::ProgramOrder => {
                        let (a, b) = (self.tree.op(o[0]), self.tree.op(o[1]));
                        a.owner == b.owner && a.index < b.index
                    }
                    Predicate::DataFromInitialState => {
                        self.kind(o[0]) == InstrKind::Read && self.data(o[0]) == Some(0)
                    }
                    Predicate::IsNotNull => self.live(o[0]),
                    Predicate::Mapped => self.vars.pred("Mapped", &o).is_some_and(|p| self.m.preds[p]),
                }
            }
            Formula::NodeExists(n) => self.m.exists[self.node(env, n)],
            Formula::EdgeExists(e) | Formula::AddEdge(e) => self.before(self.node(env, &e.src), self.node(env, &e.dst)),
            Formula::SameNode(a, b) => {
                let (a, b) = (self.node(env, a), self.node(env, b));
                a == b
                    || (self.m.exists[a] == self.m.exists[b] && (!self.m.exists[a] || self.m.ts[a] == self.m.ts[b]))
            }
            Formula::ParamEq(..) => unreachable!("not generated"),
        }
    }
}

pub struct Outcome {
    pub checked: usize,
    pub held: usize,
    pub mismatches: Vec<String>,
}

/// `cases` random axioms over trees of at most four operations, each
/// evaluated under 20 random models by the grounder, by the lowered
/// formula and by direct substitution.
pub fn run(seed: u64, cases: usize) -> Outcome {
    let d = design();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Outcome {
        checked: 0,
        held: 0,
        mismatches: Vec::new(),
    };
    for case in 0..cases {
        let mut tree = build_tree(&d).unwrap();
        let test = random_test(&mut rng);
        let bound = rng.gen_range(1..=2);
        let opts = ElabOptions::with_bound(bound);
        if case % 2 == 0 {
            assign_operations(&mut tree, Mode::Litmus(&test), &opts).unwrap();
        } else {
            assign_operations(&mut tree, Mode::Interface, &opts).unwrap();
        }
        assert!(tree.ops.len() <= 4);

        let mut g = Gen { rng: &mut rng, next: 0 };
        let body = g.quant(&mut Vec::new(), 0);
        if parse_formula(&print_formula(&body)).ok().as_ref() != Some(&body) {
            out.mismatches.push(format!("case {case}: round trip of {}", print_formula(&body)));
        }
        let axiom = Axiom {
            name: format!("a{case}"),
            body,
        };
        let mut grounder = Grounder::new(&tree);
        let ground = grounder.ground(&axiom, 0).unwrap();
        let vars = grounder.vars;
        let lowered = normalize(resolve_node_terms(ground.clone()));

        for _ in 0..20 {
            let m = random_model(&mut rng, &tree, &vars);
            let direct = Direct {
                tree: &tree,
                vars: &vars,
                m: &m,
            }
            .eval(&axiom.body, &mut BTreeMap::new());
            if evaluate(&ground, &vars, &m) != direct || evaluate(&lowered, &vars, &m) != direct {
                out.mismatches.push(format!("case {case}: {}", print_formula(&axiom.body)));
            }
            out.checked += 1;
            out.held += direct as usize;
        }
    }
    out
}
