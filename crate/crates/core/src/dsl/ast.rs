//! Abstract syntax for module definitions, implementation axiom files and
//! interface axiom files.

use std::collections::BTreeMap;
use std::fmt;

/// An event a module can observe or order. External events are visible to
/// the parent module's connection axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub index: u32,
    pub name: String,
    pub external: bool,
}

/// `(op, Event)` in source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub op: String,
    pub event: String,
}

impl NodeRef {
    pub fn new(op: impl Into<String>, event: impl Into<String>) -> Self {
        NodeRef {
            op: op.into(),
            event: event.into(),
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.op, self.event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTerm {
    pub src: NodeRef,
    pub dst: NodeRef,
    pub label: String,
}

/// The two sides of a RISC-V style `fence pred, succ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AccessSet {
    R,
    W,
    RW,
}

impl AccessSet {
    pub const ALL: [AccessSet; 3] = [AccessSet::RW, AccessSet::R, AccessSet::W];

    pub fn as_str(self) -> &'static str {
        match self {
            AccessSet::R => "r",
            AccessSet::W => "w",
            AccessSet::RW => "rw",
        }
    }

    /// Whether every access in `other` is in `self`.
    pub fn contains(self, other: AccessSet) -> bool {
        self == AccessSet::RW || self == other
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "r" => Some(AccessSet::R),
            "w" => Some(AccessSet::W),
            "rw" => Some(AccessSet::RW),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FenceFlavor {
    pub pred: AccessSet,
    pub succ: AccessSet,
}

impl FenceFlavor {
    pub const FULL: FenceFlavor = FenceFlavor {
        pred: AccessSet::RW,
        succ: AccessSet::RW,
    };

    /// Every `pred.succ` combination, full fence first.
    pub fn all() -> Vec<FenceFlavor> {
        let mut out = Vec::with_capacity(9);
        for pred in AccessSet::ALL {
            for succ in AccessSet::ALL {
                out.push(FenceFlavor { pred, succ });
            }
        }
        out
    }

    /// Parses `rw.rw`, `w.r`, ...
    pub fn parse(s: &str) -> Option<Self> {
        let (p, q) = s.split_once('.')?;
        Some(FenceFlavor {
            pred: AccessSet::parse(p)?,
            succ: AccessSet::parse(q)?,
        })
    }

    /// Name of the predicate testing for this flavor, e.g. `IsFence_w_r`.
    pub fn predicate_name(self) -> String {
        format!("IsFence_{}_{}", self.pred.as_str(), self.succ.as_str())
    }
}

impl fmt::Display for FenceFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.pred.as_str(), self.succ.as_str())
    }
}

/// The closed vocabulary of operation predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    IsAnyRead,
    IsAnyWrite,
    IsAnyFence,
    IsFence(FenceFlavor),
    SameAddress,
    SameData,
    ProgramOrder,
    DataFromInitialState,
    IsNotNull,
    Mapped,
}

impl Predicate {
    pub fn arity(self) -> usize {
        match self {
            Predicate::IsAnyRead
            | Predicate::IsAnyWrite
            | Predicate::IsAnyFence
            | Predicate::IsFence(_)
            | Predicate::DataFromInitialState
            | Predicate::IsNotNull => 1,
            Predicate::SameAddress
            | Predicate::SameData
            | Predicate::ProgramOrder
            | Predicate::Mapped => 2,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "IsAnyRead" => Predicate::IsAnyRead,
            "IsAnyWrite" => Predicate::IsAnyWrite,
            "IsAnyFence" => Predicate::IsAnyFence,
            "SameAddress" => Predicate::SameAddress,
            "SameData" => Predicate::SameData,
            "ProgramOrder" => Predicate::ProgramOrder,
            "DataFromInitialState" => Predicate::DataFromInitialState,
            "IsNotNull" => Predicate::IsNotNull,
            "Mapped" => Predicate::Mapped,
            other => {
                let rest = other.strip_prefix("IsFence_")?;
                let (p, s) = rest.split_once('_')?;
                return Some(Predicate::IsFence(FenceFlavor {
                    pred: AccessSet::parse(p)?,
                    succ: AccessSet::parse(s)?,
                }));
            }
        })
    }

    pub fn name(self) -> String {
        match self {
            Predicate::IsAnyRead => "IsAnyRead".into(),
            Predicate::IsAnyWrite => "IsAnyWrite".into(),
            Predicate::IsAnyFence => "IsAnyFence".into(),
            Predicate::IsFence(f) => f.predicate_name(),
            Predicate::SameAddress => "SameAddress".into(),
            Predicate::SameData => "SameData".into(),
            Predicate::ProgramOrder => "ProgramOrder".into(),
            Predicate::DataFromInitialState => "DataFromInitialState".into(),
            Predicate::IsNotNull => "IsNotNull".into(),
            Predicate::Mapped => "Mapped".into(),
        }
    }

    pub fn is_fence_test(self) -> bool {
        matches!(self, Predicate::IsAnyFence | Predicate::IsFence(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantKind {
    Forall,
    Exists,
}

impl QuantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            QuantKind::Forall => "forall",
            QuantKind::Exists => "exists",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantifier {
    pub kind: QuantKind,
    /// Operation type tag, e.g. `microop` or `transaction`.
    pub op_type: String,
    pub var: String,
    /// `in "c0;c1"`; `None` means the enclosing module's own operations.
    pub domain: Option<Vec<String>>,
    pub body: Box<Formula>,
}

/// Formula tree. List forms (`NodesExist`, `AddEdges`) are desugared into
/// conjunctions while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Quant(Quantifier),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Pred(Predicate, Vec<String>),
    NodeExists(NodeRef),
    EdgeExists(EdgeTerm),
    AddEdge(EdgeTerm),
    SameNode(NodeRef, NodeRef),
    /// Instance parameter comparison, `c = 0`.
    ParamEq(String, i64),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Const(true),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Visits every sub-formula, outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Quant(q) => q.body.walk(f),
            Formula::Not(a) => a.walk(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    /// Node references mentioned anywhere in the formula.
    pub fn node_refs(&self) -> Vec<&NodeRef> {
        let mut out = Vec::new();
        self.walk(&mut |g| match g {
            Formula::NodeExists(n) => out.push(n),
            Formula::EdgeExists(e) | Formula::AddEdge(e) => {
                out.push(&e.src);
                out.push(&e.dst);
            }
            Formula::SameNode(a, b) => {
                out.push(a);
                out.push(b);
            }
            _ => {}
        });
        out
    }

    pub fn mentions_fences(&self) -> bool {
        let mut found = false;
        self.walk(&mut |g| {
            if let Formula::Pred(p, _) = g {
                found |= p.is_fence_test();
            }
        });
        found
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub body: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmoduleInst {
    pub module_type: String,
    pub name: String,
    pub params: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropValue {
    Ident(String),
    Int(i64),
}

impl fmt::Display for PropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropValue::Ident(s) => f.write_str(s),
            PropValue::Int(i) => write!(f, "{i}"),
        }
    }
}

/// A module type. `event_decls` and `implementation_axioms` come from the
/// companion axiom file and are empty straight out of the definition parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDef {
    pub name: String,
    pub param_names: Vec<String>,
    /// `None` for the `none` operation type.
    pub operation_type: Option<String>,
    pub properties: BTreeMap<String, PropValue>,
    pub submodules: Vec<SubmoduleInst>,
    pub connection_axioms: Vec<Axiom>,
    pub implementation_axioms: Vec<Axiom>,
    pub event_decls: Vec<EventDecl>,
    pub is_interface: bool,
}

impl ModuleDef {
    pub fn is_core(&self) -> bool {
        matches!(self.properties.get("IsCore"), Some(PropValue::Ident(v)) if v == "yes")
    }

    pub fn event(&self, name: &str) -> Option<&EventDecl> {
        self.event_decls.iter().find(|e| e.name == name)
    }

    pub fn attach_axiom_file(&mut self, file: AxiomFile) {
        self.event_decls = file.events;
        self.implementation_axioms = file.axioms;
    }
}

/// Contents of an implementation (`.uax`) or interface (`.iface`) file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomFile {
    pub module_type: String,
    pub events: Vec<EventDecl>,
    pub axioms: Vec<Axiom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMapping {
    pub implementation_event: String,
    pub interface_event: String,
}

/// One implementation/interface pair from a pair file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDecl {
    /// Instance path of the implementation, e.g. `cacheProc/mem`.
    pub implementation: String,
    /// Interface module type.
    pub interface: String,
    pub mappings: Vec<EventMapping>,
}
