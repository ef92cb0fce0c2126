//! Conflict-driven clause learning with the acyclicity theory checked after
//! every propagation fixpoint.

use std::time::Instant;

use super::acyclic::{Acyclic, AssignView, FALSE, TRUE};

pub type Var = u32;

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var << 1 | (!positive) as u32)
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl std::fmt::Debug for Lit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", if self.is_positive() { "" } else { "-" }, self.var())
    }
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity, ties broken by lower index.
#[derive(Default)]
struct VarHeap {
    heap: Vec<Var>,
    pos: Vec<u32>,
}

impl VarHeap {
    fn better(act: &[f64], a: Var, b: Var) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: Var) -> bool {
        self.pos[v as usize] != NO_REASON
    }

    fn grow(&mut self) {
        self.pos.push(NO_REASON);
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::better(act, v, self.heap[p]) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as u32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !Self::better(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i as u32;
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NO_REASON;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize] as usize, act);
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub theory_conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Sat,
    Unsat,
    Unknown(Limit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Deadline,
    Conflicts,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub max_conflicts: Option<u64>,
}

pub struct Solver {
    values: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail_pos: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    pub theory: Acyclic,
    pub stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

fn luby(mut x: u64) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            values: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail_pos: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            ok: true,
            theory: Acyclic::default(),
            stats: Stats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len() - self.learnts.len()
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.values.len() as Var;
        self.values.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.trail_pos.push(0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.activity.push(0.0);
        self.polarity.push(false);
        self.seen.push(false);
        self.heap.grow();
        self.heap.insert(v, &self.activity);
        v
    }

    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.values[l.var() as usize];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ (l.0 & 1) as u8
        }
    }

    /// Value of `v` after a `Sat` outcome; unassigned counts as false.
    pub fn value(&self, v: Var) -> bool {
        self.values[v as usize] == TRUE
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.values[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len() as u32;
        self.trail.push(l);
    }

    /// Adds a clause before or between solves; returns false once the
    /// clause set is known unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        let mut out = Vec::with_capacity(c.len());
        for (i, &l) in c.iter().enumerate() {
            if i + 1 < c.len() && c[i + 1] == !l {
                return true;
            }
            match self.lit_value(l) {
                TRUE => return true,
                FALSE => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], NO_REASON);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.attach(out, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].index()].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1].index()].push(Watch { cref, blocker: lits[0] });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.lit_value(first) == TRUE {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.lit_value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.index()].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = w;
                j += 1;
                if self.lit_value(first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
        }
        conflict
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var() as usize;
            self.values[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.is_positive();
            self.heap.insert(l.var(), &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
        self.theory.backtrack(lim);
    }

    fn bump_var(&mut self, v: Var) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis of a clause whose literals are all false and at
    /// least one of which is at the current level.
    fn analyze(&mut self, conflict: &[Lit]) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut idx = self.trail.len();
        let mut lits: Vec<Lit> = conflict.to_vec();
        let mut skip: Option<Lit> = None;
        let p = loop {
            for &q in &lits {
                if Some(q) == skip {
                    continue;
                }
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            let r = self.reason[p.var() as usize];
            debug_assert_ne!(r, NO_REASON);
            self.bump_clause(r);
            lits = self.clauses[r as usize].lits.clone();
            skip = Some(p);
        };
        learnt[0] = !p;

        // Drop literals implied by the rest of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                let r = self.reason[l.var() as usize];
                if r == NO_REASON {
                    return true;
                }
                self.clauses[r as usize].lits.iter().any(|&m| {
                    m.var() != l.var() && !self.seen[m.var() as usize] && self.level[m.var() as usize] > 0
                })
            })
            .collect();
        for &l in &learnt {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(l, k)| k.then_some(l))
            .collect();

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[best].var() as usize] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            bt = self.level[learnt[1].var() as usize];
        }
        (learnt, bt)
    }

    /// Handles a conflict; returns false when the formula is unsatisfiable.
    fn resolve_conflict(&mut self, conflict: Vec<Lit>) -> bool {
        self.stats.conflicts += 1;
        let max_level = conflict
            .iter()
            .map(|l| self.level[l.var() as usize])
            .max()
            .unwrap_or(0);
        if max_level == 0 {
            return false;
        }
        self.cancel_until(max_level);
        let (learnt, bt) = self.analyze(&conflict);
        self.cancel_until(bt);
        if learnt.len() == 1 {
            self.enqueue(learnt[0], NO_REASON);
        } else {
            let first = learnt[0];
            let cref = self.attach(learnt, true);
            self.bump_clause(cref);
            self.enqueue(first, cref);
        }
        self.var_inc /= 0.95;
        self.cla_inc /= 0.999;
        true
    }

    fn locked(&self, cref: u32) -> bool {
        let l = self.clauses[cref as usize].lits[0];
        self.reason[l.var() as usize] == cref && self.lit_value(l) == TRUE
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.clauses[c as usize].lits.len() > 2 && !self.locked(c))
            .collect();
        cands.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .partial_cmp(&self.clauses[b as usize].activity)
                .unwrap()
        });
        for &c in &cands[..cands.len() / 2] {
            let cl = &mut self.clauses[c as usize];
            cl.deleted = true;
            cl.lits = Vec::new();
        }
        let clauses = &self.clauses;
        self.learnts.retain(|&c| !clauses[c as usize].deleted);
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn theory_check(&mut self) -> Option<Vec<Lit>> {
        let view = AssignView {
            values: &self.values,
            trail_pos: &self.trail_pos,
            trail: &self.trail,
        };
        let c = self.theory.process(&view);
        if c.is_some() {
            self.stats.theory_conflicts += 1;
        }
        c
    }

    pub fn solve(&mut self, limits: Limits) -> Outcome {
        if !self.ok {
            return Outcome::Unsat;
        }
        let mut restart_round = 0u64;
        let mut max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        loop {
            let budget = luby(restart_round) * 100;
            let mut conflicts_here = 0u64;
            loop {
                let conflict = match self.propagate() {
                    Some(cref) => Some(self.clauses[cref as usize].lits.clone()),
                    None => self.theory_check(),
                };
                if let Some(c) = conflict {
                    conflicts_here += 1;
                    if !self.resolve_conflict(c) {
                        self.ok = false;
                        self.cancel_until(0);
                        return Outcome::Unsat;
                    }
                    if limits.max_conflicts.is_some_and(|m| self.stats.conflicts >= m) {
                        self.cancel_until(0);
                        return Outcome::Unknown(Limit::Conflicts);
                    }
                    if self.stats.conflicts.is_multiple_of(256)
                        && limits.deadline.is_some_and(|d| Instant::now() >= d)
                    {
                        self.cancel_until(0);
                        return Outcome::Unknown(Limit::Deadline);
                    }
                    continue;
                }
                if conflicts_here >= budget {
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                    break;
                }
                if self.learnts.len() as f64 >= max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    max_learnts *= 1.1;
                }
                let mut next = None;
                while let Some(v) = self.heap.pop(&self.activity) {
                    if self.values[v as usize] == UNDEF {
                        next = Some(v);
                        break;
                    }
                }
                let Some(v) = next else {
                    return Outcome::Sat;
                };
                self.stats.decisions += 1;
                if self.stats.decisions.is_multiple_of(1024) && limits.deadline.is_some_and(|d| Instant::now() >= d) {
                    self.cancel_until(0);
                    return Outcome::Unknown(Limit::Deadline);
                }
                self.trail_lim.push(self.trail.len());
                let lit = Lit::new(v, self.polarity[v as usize]);
                self.enqueue(lit, NO_REASON);
            }
            restart_round += 1;
        }
    }

    /// Timestamps of theory nodes in the current (satisfying) assignment.
    pub fn timestamps(&self) -> Vec<i64> {
        self.theory.timestamps()
    }
}
