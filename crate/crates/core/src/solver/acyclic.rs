//! Incremental acyclicity theory over strict and weak edges.
//!
//! Each atom `p(u, v)` stands for `ex_u /\ ex_v /\ ts_u < ts_v`. Once both
//! endpoints exist, a true atom contributes a strict edge `u -> v` and a
//! false atom a weak edge `v -> u` (`ts_v <= ts_u`). Integer timestamps
//! exist iff no cycle of active edges contains a strict edge.

use std::collections::VecDeque;

use super::cdcl::{Lit, Var};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Atom {
    var: Var,
    src: u32,
    dst: u32,
}

#[derive(Debug, Clone, Copy)]
struct Active {
    to: u32,
    atom: u32,
    strict: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Role {
    atom: Option<u32>,
    node: Option<u32>,
}

#[derive(Debug, Default)]
pub struct Acyclic {
    ex_var: Vec<Var>,
    atoms: Vec<Atom>,
    roles: Vec<Role>,
    incident: Vec<Vec<u32>>,
    out: Vec<Vec<Active>>,
    /// `(from, trail position)` per active edge, in activation order.
    stack: Vec<(u32, u32)>,
    /// Trail literals before this index have been processed.
    pub head: usize,
    mark: Vec<u32>,
    generation: u32,
    parent: Vec<(u32, u32, bool)>,
    queue: VecDeque<u32>,
}

/// Read-only view of the SAT solver's assignment.
pub struct AssignView<'a> {
    pub values: &'a [u8],
    pub trail_pos: &'a [u32],
    pub trail: &'a [Lit],
}

pub(crate) const TRUE: u8 = 1;
pub(crate) const FALSE: u8 = 0;

impl Acyclic {
    pub fn num_nodes(&self) -> usize {
        self.ex_var.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    fn role_mut(&mut self, v: Var) -> &mut Role {
        let i = v as usize;
        if self.roles.len() <= i {
            self.roles.resize(i + 1, Role::default());
        }
        &mut self.roles[i]
    }

    /// Registers a node with its existence variable. Nodes must be added
    /// with consecutive indices starting from 0.
    pub fn add_node(&mut self, ex: Var) -> u32 {
        let n = self.ex_var.len() as u32;
        self.ex_var.push(ex);
        self.incident.push(Vec::new());
        self.out.push(Vec::new());
        self.mark.extend([0, 0]);
        self.parent.extend([(NONE, NONE, false); 2]);
        self.role_mut(ex).node = Some(n);
        n
    }

    pub fn add_atom(&mut self, var: Var, src: u32, dst: u32) {
        let a = self.atoms.len() as u32;
        self.atoms.push(Atom { var, src, dst });
        self.incident[src as usize].push(a);
        self.incident[dst as usize].push(a);
        self.role_mut(var).atom = Some(a);
    }

    pub fn ex_var(&self, node: u32) -> Var {
        self.ex_var[node as usize]
    }

    /// Processes newly assigned trail literals. Returns a clause whose
    /// literals are all false when a forbidden cycle appears.
    pub fn process(&mut self, view: &AssignView<'_>) -> Option<Vec<Lit>> {
        while self.head < view.trail.len() {
            let pos = self.head as u32;
            let lit = view.trail[self.head];
            self.head += 1;
            let role = self.roles.get(lit.var() as usize).copied().unwrap_or_default();
            if let Some(a) = role.atom {
                if let Some(c) = self.try_activate(a, pos, view) {
                    return Some(c);
                }
            }
            if let Some(n) = role.node {
                if view.values[lit.var() as usize] == TRUE {
                    for i in 0..self.incident[n as usize].len() {
                        let a = self.incident[n as usize][i];
                        if let Some(c) = self.try_activate(a, pos, view) {
                            return Some(c);
                        }
                    }
                }
            }
        }
        None
    }

    /// Activates atom `a` if its last condition was assigned at `pos`.
    fn try_activate(&mut self, a: u32, pos: u32, view: &AssignView<'_>) -> Option<Vec<Lit>> {
        let atom = self.atoms[a as usize];
        let ex_s = self.ex_var[atom.src as usize] as usize;
        let ex_d = self.ex_var[atom.dst as usize] as usize;
        let av = atom.var as usize;
        if view.values[ex_s] != TRUE || view.values[ex_d] != TRUE || view.values[av] > TRUE {
            return None;
        }
        let last = view.trail_pos[ex_s].max(view.trail_pos[ex_d]).max(view.trail_pos[av]);
        if last != pos {
            return None;
        }
        let strict = view.values[av] == TRUE;
        let (from, to) = if strict {
            (atom.src, atom.dst)
        } else {
            (atom.dst, atom.src)
        };
        if let Some(path) = self.find_cycle(from, to, strict) {
            let mut clause = self.explain(a, strict);
            for (pa, ps) in path {
                clause.extend(self.explain(pa, ps));
            }
            clause.sort_unstable();
            clause.dedup();
            return Some(clause);
        }
        self.out[from as usize].push(Active { to, atom: a, strict });
        self.stack.push((from, pos));
        None
    }

    fn explain(&self, a: u32, strict: bool) -> Vec<Lit> {
        let atom = self.atoms[a as usize];
        if strict {
            vec![Lit::new(atom.var, false)]
        } else {
            vec![
                Lit::new(atom.var, true),
                Lit::new(self.ex_var[atom.src as usize], false),
                Lit::new(self.ex_var[atom.dst as usize], false),
            ]
        }
    }

    /// Looks for a path `to ->* from` that, together with the new edge,
    /// contains a strict edge. Returns the path's `(atom, strict)` list.
    fn find_cycle(&mut self, from: u32, to: u32, strict: bool) -> Option<Vec<(u32, bool)>> {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.generation = 1;
        }
        let gen = self.generation;
        let start = to * 2 + strict as u32;
        let goal = from * 2 + 1;
        self.queue.clear();
        self.queue.push_back(start);
        self.mark[start as usize] = gen;
        self.parent[start as usize] = (NONE, NONE, false);
        while let Some(s) = self.queue.pop_front() {
            if s == goal {
                let mut path = Vec::new();
                let mut cur = s;
                while cur != start {
                    let (prev, atom, st) = self.parent[cur as usize];
                    path.push((atom, st));
                    cur = prev;
                }
                return Some(path);
            }
            let node = s / 2;
            let flag = s & 1;
            for e in &self.out[node as usize] {
                let ns = e.to * 2 + (flag | e.strict as u32);
                if self.mark[ns as usize] != gen {
                    self.mark[ns as usize] = gen;
                    self.parent[ns as usize] = (s, e.atom, e.strict);
                    self.queue.push_back(ns);
                }
            }
        }
        None
    }

    /// Forgets everything activated at trail positions `>= trail_len`.
    pub fn backtrack(&mut self, trail_len: usize) {
        while let Some(&(from, pos)) = self.stack.last() {
            if (pos as usize) < trail_len {
                break;
            }
            self.stack.pop();
            self.out[from as usize].pop();
        }
        self.head = self.head.min(trail_len);
    }

    /// Dense timestamps from the condensation of the active edge graph.
    /// Only meaningful once every variable is assigned without conflict.
    pub fn timestamps(&self) -> Vec<i64> {
        let n = self.out.len();
        let adj: Vec<Vec<u32>> = self
            .out
            .iter()
            .map(|es| es.iter().map(|e| e.to).collect())
            .collect();
        let comp = tarjan(n, &adj);
        let count = comp.iter().map(|&c| c + 1).max().unwrap_or(0) as i64;
        comp.iter().map(|&c| count - 1 - c as i64).collect()
    }
}

/// Strongly connected components; components are numbered in reverse
/// topological order.
pub fn tarjan(n: usize, adj: &[Vec<u32>]) -> Vec<u32> {
    let mut index = vec![NONE; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NONE; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;
    let mut call: Vec<(u32, usize)> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != NONE {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, i)) = call.last() {
            let vu = v as usize;
            if i == 0 && index[vu] == NONE {
                index[vu] = next_index;
                low[vu] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[vu] = true;
            }
            if i < adj[vu].len() {
                call.last_mut().unwrap().1 += 1;
                let w = adj[vu][i];
                let wu = w as usize;
                if index[wu] == NONE {
                    call.push((w, 0));
                } else if on_stack[wu] {
                    low[vu] = low[vu].min(index[wu]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let pu = parent as usize;
                low[pu] = low[pu].min(low[vu]);
            }
            if low[vu] == index[vu] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    comp[w as usize] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_orders_components() {
        // 0 -> 1 <-> 2 -> 3
        let adj = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let c = tarjan(4, &adj);
        assert_eq!(c[1], c[2]);
        assert!(c[3] < c[1] && c[1] < c[0]);
    }
}
