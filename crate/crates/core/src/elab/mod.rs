//! Builds module instance trees from a design, assigns operations and
//! checks axiom visibility.

pub mod design;
pub mod scope;
pub mod tree;

pub use design::{Design, DesignError, SearchPath, SourceProvider};
pub use scope::{check_module, check_scopes, Diagnostic};
pub use tree::{
    assign_operations, build_tree, build_tree_at, AttrDomains, ElabError, ElabOptions, InstId,
    InstanceTree, Mode, ModuleInstance, OpId, Operation,
};
