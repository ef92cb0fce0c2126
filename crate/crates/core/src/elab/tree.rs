//! Module instance trees and operation assignment.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dsl::{FenceFlavor, ModuleDef};
use crate::litmus::{InstrKind, LitmusInstruction, LitmusTest};

use super::design::Design;

pub type InstId = usize;
pub type OpId = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ElabError {
    #[error("unknown module type `{0}`")]
    UnknownModuleType(String),
    #[error("module type `{0}` instantiates itself")]
    Recursion(String),
    #[error("instance `{path}` of `{module}`: parameters {given:?} do not match declared {declared:?}")]
    ParamMismatch {
        path: String,
        module: String,
        given: Vec<String>,
        declared: Vec<String>,
    },
    #[error("test uses core {core} but the design has only {available} core instance(s)")]
    MissingCore { core: u32, available: usize },
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("no instance at path `{0}`")]
    NoSuchInstance(String),
}

#[derive(Debug, Clone)]
pub struct ModuleInstance {
    pub id: InstId,
    /// Slash-separated path from the root, e.g. `proc/c0`.
    pub path: String,
    /// Last path component.
    pub name: String,
    pub def: Arc<ModuleDef>,
    pub params: BTreeMap<String, i64>,
    pub parent: Option<InstId>,
    pub children: Vec<InstId>,
    pub ops: Vec<OpId>,
    /// Kinds a symbolic operation of this instance may take.
    pub kind_domain: Vec<InstrKind>,
}

impl ModuleInstance {
    pub fn event_index(&self, event: &str) -> Option<u32> {
        self.def.event(event).map(|e| e.index)
    }
}

/// A unit an instance quantifies over. Concrete operations come from the
/// litmus test; symbolic ones have free kind, address and data.
#[derive(Debug, Clone)]
pub struct Operation {
    pub uid: OpId,
    pub owner: InstId,
    pub op_type: String,
    /// Position among the owner's operations; doubles as program order.
    pub index: u32,
    pub concrete: Option<LitmusInstruction>,
}

impl Operation {
    pub fn is_symbolic(&self) -> bool {
        self.concrete.is_none()
    }
}

/// Finite domains for symbolic attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttrDomains {
    pub addresses: Vec<String>,
    pub data: Vec<i64>,
}

impl AttrDomains {
    pub fn address_index(&self, a: &str) -> Option<usize> {
        self.addresses.iter().position(|x| x == a)
    }

    pub fn data_index(&self, v: i64) -> Option<usize> {
        self.data.iter().position(|&x| x == v)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    Litmus(&'a LitmusTest),
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElabOptions {
    pub bound: usize,
    /// Number of addresses in interface mode.
    pub interface_addresses: usize,
    /// Largest data value in interface mode; values run from 0.
    pub interface_max_value: i64,
}

impl ElabOptions {
    pub fn with_bound(bound: usize) -> Self {
        ElabOptions {
            bound,
            interface_addresses: 2,
            interface_max_value: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceTree {
    pub instances: Vec<ModuleInstance>,
    pub ops: Vec<Operation>,
    pub domains: AttrDomains,
}

impl InstanceTree {
    pub fn root(&self) -> &ModuleInstance {
        &self.instances[0]
    }

    pub fn by_path(&self, path: &str) -> Option<&ModuleInstance> {
        self.instances.iter().find(|i| i.path == path)
    }

    pub fn child(&self, parent: InstId, name: &str) -> Option<&ModuleInstance> {
        self.instances[parent]
            .children
            .iter()
            .map(|&c| &self.instances[c])
            .find(|c| c.name == name)
    }

    pub fn op(&self, uid: OpId) -> &Operation {
        &self.ops[uid]
    }

    pub fn owner(&self, uid: OpId) -> &ModuleInstance {
        &self.instances[self.ops[uid].owner]
    }

    /// Core instances in litmus core order: by parameter `c` when every
    /// core has one, otherwise in declaration order.
    pub fn cores(&self) -> Vec<InstId> {
        let mut cores: Vec<InstId> = self
            .instances
            .iter()
            .filter(|i| i.def.is_core())
            .map(|i| i.id)
            .collect();
        if cores.iter().all(|&c| self.instances[c].params.contains_key("c")) {
            cores.sort_by_key(|&c| self.instances[c].params["c"]);
        }
        cores
    }

    /// Instances in the subtree rooted at `id`, preorder.
    pub fn subtree(&self, id: InstId) -> Vec<InstId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            out.push(i);
            stack.extend(self.instances[i].children.iter().rev());
        }
        out
    }

    /// Human-readable operation name used in graphs and dumps.
    pub fn op_label(&self, uid: OpId) -> String {
        let op = &self.ops[uid];
        match &op.concrete {
            Some(i) => i.id.clone(),
            None => format!("{}#{}", self.instances[op.owner].path, op.index),
        }
    }
}

/// Instantiates the design's root with every parameter bound to 0.
pub fn build_tree(design: &Design) -> Result<InstanceTree, ElabError> {
    let root = design.root_def().clone();
    let params = root.param_names.iter().map(|p| (p.clone(), 0)).collect();
    build_tree_at(design, &design.root, params, &root.name)
}

/// Instantiates `module` with `params` as the root of a fresh tree whose
/// root path is `path`.
pub fn build_tree_at(
    design: &Design,
    module: &str,
    params: BTreeMap<String, i64>,
    path: &str,
) -> Result<InstanceTree, ElabError> {
    let mut tree = InstanceTree {
        instances: Vec::new(),
        ops: Vec::new(),
        domains: AttrDomains::default(),
    };
    let name = path.rsplit('/').next().unwrap_or(path).to_string();
    let mut stack = Vec::new();
    instantiate(design, module, params, path.to_string(), name, None, &mut tree, &mut stack)?;
    Ok(tree)
}

#[allow(clippy::too_many_arguments)]
fn instantiate(
    design: &Design,
    module: &str,
    params: BTreeMap<String, i64>,
    path: String,
    name: String,
    parent: Option<InstId>,
    tree: &mut InstanceTree,
    stack: &mut Vec<String>,
) -> Result<InstId, ElabError> {
    let def = design
        .get(module)
        .ok_or_else(|| ElabError::UnknownModuleType(module.to_string()))?
        .clone();
    if stack.iter().any(|m| m == module) {
        return Err(ElabError::Recursion(module.to_string()));
    }
    let mut given: Vec<String> = params.keys().cloned().collect();
    let mut declared = def.param_names.clone();
    given.sort();
    declared.sort();
    if given != declared {
        return Err(ElabError::ParamMismatch {
            path,
            module: module.to_string(),
            given,
            declared,
        });
    }
    let id = tree.instances.len();
    tree.instances.push(ModuleInstance {
        id,
        path: path.clone(),
        name,
        def: def.clone(),
        params,
        parent,
        children: Vec::new(),
        ops: Vec::new(),
        kind_domain: Vec::new(),
    });
    stack.push(module.to_string());
    for s in &def.submodules {
        let child = instantiate(
            design,
            &s.module_type,
            s.params.clone(),
            format!("{path}/{}", s.name),
            s.name.clone(),
            Some(id),
            tree,
            stack,
        )?;
        tree.instances[id].children.push(child);
    }
    stack.pop();
    Ok(id)
}

/// Gives every instance its operations. Cores get their litmus
/// instructions exactly; every other instance with an operation type gets
/// `bound` symbolic operations.
pub fn assign_operations(tree: &mut InstanceTree, mode: Mode<'_>, opts: &ElabOptions) -> Result<(), ElabError> {
    if opts.bound == 0 {
        return Err(ElabError::ZeroBound);
    }
    tree.ops.clear();
    for inst in &mut tree.instances {
        inst.ops.clear();
    }

    let mut concrete: BTreeMap<InstId, Vec<LitmusInstruction>> = BTreeMap::new();
    match mode {
        Mode::Litmus(test) => {
            let cores = tree.cores();
            let used: std::collections::BTreeSet<u32> = test.instructions.iter().map(|i| i.core).collect();
            for core in used {
                let Some(&inst) = cores.get(core as usize) else {
                    return Err(ElabError::MissingCore {
                        core,
                        available: cores.len(),
                    });
                };
                concrete.insert(inst, test.core_instructions(core).cloned().collect());
            }
            for &c in &cores {
                concrete.entry(c).or_default();
            }
            let addrs = test.addresses();
            tree.domains.addresses = if addrs.is_empty() {
                vec!["_".to_string()]
            } else {
                addrs
            };
            let mut data: Vec<i64> = test.values().into_iter().collect();
            data.push(data.last().copied().unwrap_or(0) + 1);
            tree.domains.data = data;
        }
        Mode::Interface => {
            tree.domains.addresses = (0..opts.interface_addresses.max(1)).map(|i| format!("a{i}")).collect();
            tree.domains.data = (0..=opts.interface_max_value.max(0)).collect();
        }
    }

    let fence_aware: Vec<bool> = (0..tree.instances.len())
        .map(|id| {
            let inst = &tree.instances[id];
            inst.def.implementation_axioms.iter().any(|a| a.body.mentions_fences())
                || inst.parent.is_some_and(|p| {
                    tree.instances[p]
                        .def
                        .connection_axioms
                        .iter()
                        .any(|a| a.body.mentions_fences())
                })
        })
        .collect();

    for id in 0..tree.instances.len() {
        let Some(op_type) = tree.instances[id].def.operation_type.clone() else {
            continue;
        };
        let mut kinds = vec![InstrKind::Read, InstrKind::Write];
        if fence_aware[id] {
            kinds.extend(FenceFlavor::all().into_iter().map(InstrKind::Fence));
        }
        tree.instances[id].kind_domain = kinds;
        let fixed = concrete.remove(&id);
        let count = fixed.as_ref().map_or(opts.bound, Vec::len);
        for index in 0..count {
            let uid = tree.ops.len();
            tree.ops.push(Operation {
                uid,
                owner: id,
                op_type: op_type.clone(),
                index: index as u32,
                concrete: fixed.as_ref().map(|f| f[index].clone()),
            });
            tree.instances[id].ops.push(uid);
        }
    }
    Ok(())
}
