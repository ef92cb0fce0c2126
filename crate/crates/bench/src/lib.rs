//! Fixture loading shared by the benchmarks under `benches/`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use modcheck_core::dsl::{parse_pair_file, ModuleDef};
use modcheck_core::elab::Design;
use modcheck_core::litmus::{parse_litmus, LitmusTest};
use modcheck_core::verify::InterfacePair;

pub fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core")
}

pub fn design(root: &str, mutants: &[&str]) -> Design {
    let (path, includes) = paths(root, mutants);
    Design::load(&path, &includes).expect("fixture design")
}

fn paths(root: &str, mutants: &[&str]) -> (PathBuf, Vec<PathBuf>) {
    let path = core_dir().join(format!("fixtures/designs/{root}.mdef"));
    let includes = mutants.iter().map(|m| core_dir().join("fixtures/mutants").join(m)).collect();
    (path, includes)
}

pub fn litmus(rel: &str) -> LitmusTest {
    let text = std::fs::read_to_string(core_dir().join("tests/litmus").join(rel)).expect("litmus file");
    parse_litmus(&text).expect("litmus test")
}

pub fn interface(root: &str, mutants: &[&str], pair_file: &str) -> (Design, Arc<ModuleDef>, InterfacePair) {
    let mut d = design(root, mutants);
    let text = std::fs::read_to_string(core_dir().join("fixtures/pairs").join(pair_file)).expect("pair file");
    let pair = InterfacePair::from(&parse_pair_file(&text).expect("pairs")[0]);
    let (path, includes) = paths(root, mutants);
    let iface = d
        .load_interface(&pair.interface, &Design::search_path(&path, &includes))
        .expect("interface");
    (d, iface, pair)
}
