use modcheck_core::solver::{Limits, Lit, Outcome, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `ts_u < ts_v`
    Strict(u32, u32),
    /// `ts_u <= ts_v`
    Weak(u32, u32),
}

fn holds(e: Edge, ts: &[i64]) -> bool {
    match e {
        Edge::Strict(u, v) => ts[u as usize] < ts[v as usize],
        Edge::Weak(u, v) => ts[u as usize] <= ts[v as usize],
    }
}

/// Searches timestamps in `0..5` directly.
pub fn brute_force(n: usize, edges: &[Edge]) -> bool {
    let mut ts = vec![0i64; n];
    loop {
        if edges.iter().all(|&e| holds(e, &ts)) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            ts[i] += 1;
            if ts[i] < 5 {
                break;
            }
            ts[i] = 0;
            i += 1;
        }
    }
}

/// Native answer, with timestamps when satisfiable. A strict edge is a
/// true atom `p(u, v)`; a weak edge `u -> v` is a false atom `p(v, u)`.
pub fn native(n: usize, edges: &[Edge]) -> Option<Vec<i64>> {
    let mut s = Solver::new();
    for _ in 0..n {
        let ex = s.new_var();
        s.theory.add_node(ex);
        s.add_clause(&[Lit::new(ex, true)]);
    }
    for &e in edges {
        let v = s.new_var();
        let (src, dst, value) = match e {
            Edge::Strict(u, w) => (u, w, true),
            Edge::Weak(u, w) => (w, u, false),
        };
        s.theory.add_atom(v, src, dst);
        s.add_clause(&[Lit::new(v, false), Lit::new(src, true)]);
        s.add_clause(&[Lit::new(v, false), Lit::new(dst, true)]);
        s.add_clause(&[Lit::new(v, value)]);
    }
    match s.solve(Limits::default()) {
        Outcome::Sat => Some(s.timestamps()),
        Outcome::Unsat => None,
        Outcome::Unknown(l) => panic!("no limit was set, got {l:?}"),
    }
}

/// Every graph on `n` nodes whose ordered pairs each carry no edge, a
/// strict edge or a weak edge, with at most `max_edges` edges.
pub fn for_each_graph(n: u32, max_edges: usize, f: &mut dyn FnMut(&[Edge])) {
    let pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    fn go(pairs: &[(u32, u32)], budget: usize, acc: &mut Vec<Edge>, f: &mut dyn FnMut(&[Edge])) {
        let Some((&(u, v), rest)) = pairs.split_first() else {
            f(acc);
            return;
        };
        go(rest, budget, acc, f);
        if budget > 0 {
            for e in [Edge::Strict(u, v), Edge::Weak(u, v)] {
                acc.push(e);
                go(rest, budget - 1, acc, f);
                acc.pop();
            }
        }
    }
    go(&pairs, max_edges, &mut Vec::new(), f);
}

/// Compares native and brute-force answers on one graph; native
/// timestamps must satisfy every edge.
pub fn agrees(n: usize, edges: &[Edge]) -> bool {
    let expected = brute_force(n, edges);
    match native(n, edges) {
        Some(ts) => expected && edges.iter().all(|&e| holds(e, &ts)),
        None => !expected,
    }
}

fn edge_bit(n: usize, e: Edge) -> u64 {
    let (u, v, kind) = match e {
        Edge::Strict(u, v) => (u, v, 0),
        Edge::Weak(u, v) => (u, v, 1),
    };
    1 << ((u as usize * n + v as usize) * 2 + kind)
}

/// The brute-force search tabulated: for every timestamp vector over
/// `0..5`, the set of edges it satisfies. A graph is satisfiable iff its
/// edge set lies inside one of them.
pub struct Table {
    n: usize,
    masks: Vec<u64>,
}

impl Table {
    pub fn new(n: usize) -> Table {
        assert!(n * n * 2 <= 64);
        let mut masks = std::collections::BTreeSet::new();
        let mut ts = vec![0i64; n];
        'outer: loop {
            let mut m = 0;
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    for e in [Edge::Strict(u, v), Edge::Weak(u, v)] {
                        if holds(e, &ts) {
                            m |= edge_bit(n, e);
                        }
                    }
                }
            }
            masks.insert(m);
            for t in ts.iter_mut() {
                *t += 1;
                if *t < 5 {
                    continue 'outer;
                }
                *t = 0;
            }
            break;
        }
        Table {
            n,
            masks: masks.into_iter().collect(),
        }
    }

    pub fn satisfiable(&self, edges: &[Edge]) -> bool {
        let g = edges.iter().fold(0, |m, &e| m | edge_bit(self.n, e));
        self.masks.iter().any(|&m| g & !m == 0)
    }

    pub fn agrees(&self, edges: &[Edge]) -> bool {
        let expected = self.satisfiable(edges);
        match native(self.n, edges) {
            Some(ts) => expected && edges.iter().all(|&e| holds(e, &ts)),
            None => !expected,
        }
    }
}
