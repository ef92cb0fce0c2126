#![allow(dead_code)]

pub mod grounding;
pub mod theory;

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use modcheck_core::dsl::AccessSet;
use modcheck_core::elab::Design;
use modcheck_core::litmus::{parse_litmus, InstrKind, LitmusInstruction, LitmusTest, Mcm};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn litmus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/litmus")
}

pub fn design(root: &str) -> Design {
    design_with(root, &[])
}

/// Loads `<root>.mdef` with mutant directories shadowing the shipped files.
pub fn design_with(root: &str, mutants: &[&str]) -> Design {
    let includes: Vec<PathBuf> = mutants.iter().map(|m| fixtures().join("mutants").join(m)).collect();
    let path = fixtures().join("designs").join(format!("{root}.mdef"));
    Design::load(&path, &includes).unwrap_or_else(|e| panic!("{root}: {e}"))
}

pub fn litmus(rel: &str) -> LitmusTest {
    let path = litmus_dir().join(rel);
    parse_litmus(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn corpus(mcm: &str) -> Vec<(PathBuf, LitmusTest)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(litmus_dir().join(mcm))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "test"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let t = parse_litmus(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p, t)
        })
        .collect()
}

fn programs(test: &LitmusTest) -> Vec<Vec<&LitmusInstruction>> {
    (0..test.num_cores()).map(|c| test.core_instructions(c).collect()).collect()
}

/// Whether some sequentially consistent interleaving gives every read
/// its listed value.
pub fn sc_observable(test: &LitmusTest) -> bool {
    let progs = programs(test);
    let mut seen = HashSet::new();
    sc_search(&progs, &mut vec![0; progs.len()], &mut HashMap::new(), &mut seen)
}

fn sc_search(
    progs: &[Vec<&LitmusInstruction>],
    pc: &mut Vec<usize>,
    mem: &mut HashMap<String, i64>,
    seen: &mut HashSet<(Vec<usize>, Vec<(String, i64)>)>,
) -> bool {
    if pc.iter().zip(progs).all(|(&p, prog)| p == prog.len()) {
        return true;
    }
    let mut key: Vec<(String, i64)> = mem.iter().map(|(k, v)| (k.clone(), *v)).collect();
    key.sort();
    if !seen.insert((pc.clone(), key)) {
        return false;
    }
    for c in 0..progs.len() {
        let Some(&ins) = progs[c].get(pc[c]) else { continue };
        let addr = ins.address.clone().unwrap_or_default();
        let old = mem.get(&addr).copied();
        match ins.kind {
            InstrKind::Read => {
                if old.unwrap_or(0) != ins.data.unwrap() {
                    continue;
                }
            }
            InstrKind::Write => {
                mem.insert(addr.clone(), ins.data.unwrap());
            }
            InstrKind::Fence(_) => {}
        }
        pc[c] += 1;
        let found = sc_search(progs, pc, mem, seen);
        pc[c] -= 1;
        if ins.kind == InstrKind::Write {
            match old {
                Some(v) => mem.insert(addr, v),
                None => mem.remove(&addr),
            };
        }
        if found {
            return true;
        }
    }
    false
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct TsoState {
    pc: Vec<usize>,
    buffers: Vec<Vec<(String, i64)>>,
    mem: Vec<(String, i64)>,
}

impl TsoState {
    fn read_mem(&self, a: &str) -> i64 {
        self.mem.iter().find(|(k, _)| k == a).map_or(0, |(_, v)| *v)
    }

    fn write_mem(&mut self, a: String, v: i64) {
        match self.mem.iter_mut().find(|(k, _)| *k == a) {
            Some(slot) => slot.1 = v,
            None => {
                self.mem.push((a, v));
                self.mem.sort();
            }
        }
    }
}

/// Whether some execution of x86-style store-buffer machines gives every
/// read its listed value. Fences ordering earlier writes before later
/// reads wait for the local buffer to empty.
pub fn tso_observable(test: &LitmusTest) -> bool {
    let progs = programs(test);
    let start = TsoState {
        pc: vec![0; progs.len()],
        buffers: vec![Vec::new(); progs.len()],
        mem: Vec::new(),
    };
    let mut seen = HashSet::new();
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        if s.pc.iter().zip(&progs).all(|(&p, prog)| p == prog.len()) {
            return true;
        }
        for c in 0..progs.len() {
            if !s.buffers[c].is_empty() {
                let mut n = s.clone();
                let (a, v) = n.buffers[c].remove(0);
                n.write_mem(a, v);
                stack.push(n);
            }
            let Some(&ins) = progs[c].get(s.pc[c]) else { continue };
            let mut n = s.clone();
            n.pc[c] += 1;
            match ins.kind {
                InstrKind::Write => {
                    n.buffers[c].push((ins.address.clone().unwrap(), ins.data.unwrap()));
                }
                InstrKind::Read => {
                    let a = ins.address.as_deref().unwrap();
                    let v = s.buffers[c]
                        .iter()
                        .rev()
                        .find(|(k, _)| k == a)
                        .map_or_else(|| s.read_mem(a), |(_, v)| *v);
                    if v != ins.data.unwrap() {
                        continue;
                    }
                }
                InstrKind::Fence(f) => {
                    let drains = f.pred.contains(AccessSet::W) && f.succ.contains(AccessSet::R);
                    if drains && !s.buffers[c].is_empty() {
                        continue;
                    }
                }
            }
            stack.push(n);
        }
    }
    false
}

pub fn oracle_observable(test: &LitmusTest) -> bool {
    match test.mcm {
        Mcm::SC => sc_observable(test),
        Mcm::TSO => tso_observable(test),
        Mcm::RVWMO => panic!("no oracle for {}", test.mcm),
    }
}

/// A design, the interface named by the first pair in `pair_file`, and
/// the pair itself.
pub fn interface_case(
    root: &str,
    mutants: &[&str],
    pair_file: &str,
) -> (
    Design,
    std::sync::Arc<modcheck_core::dsl::ModuleDef>,
    modcheck_core::verify::InterfacePair,
) {
    let mut d = design_with(root, mutants);
    let text = std::fs::read_to_string(fixtures().join("pairs").join(pair_file)).unwrap();
    let decls = modcheck_core::dsl::parse_pair_file(&text).unwrap();
    let pair = modcheck_core::verify::InterfacePair::from(&decls[0]);
    let includes: Vec<PathBuf> = mutants.iter().map(|m| fixtures().join("mutants").join(m)).collect();
    let search = Design::search_path(&fixtures().join("designs").join(format!("{root}.mdef")), &includes);
    let iface = d.load_interface(&pair.interface, &search).unwrap();
    (d, iface, pair)
}

pub fn z3_available() -> bool {
    std::process::Command::new("z3")
        .arg("-version")
        .output()
        .is_ok_and(|o| o.status.success())
}
