//! Modular microarchitectural ordering specifications: parsing, elaboration
//! into module instance trees, grounding to quantifier-free formulas, and an
//! acyclicity-aware satisfiability search that decides whether an execution
//! is observable.

pub mod dsl;
pub mod litmus;
pub mod elab;
pub mod formula;
pub mod solver;
pub mod graph;
pub mod verify;
