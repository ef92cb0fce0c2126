use criterion::{criterion_group, criterion_main, Criterion};
use modcheck_core::solver::{Limits, Lit, Solver};

/// `n` nodes in a ring of strict edges with one choice atom per chord.
fn ring_with_chords(n: u32) -> Solver {
    let mut s = Solver::new();
    for _ in 0..n {
        let ex = s.new_var();
        s.theory.add_node(ex);
        s.add_clause(&[Lit::new(ex, true)]);
    }
    for i in 0..n - 1 {
        let v = s.new_var();
        s.theory.add_atom(v, i, i + 1);
        s.add_clause(&[Lit::new(v, true)]);
    }
    for i in 0..n {
        let j = (i + n / 2) % n;
        let fwd = s.new_var();
        let back = s.new_var();
        s.theory.add_atom(fwd, i, j);
        s.theory.add_atom(back, j, i);
        s.add_clause(&[Lit::new(fwd, true), Lit::new(back, true)]);
    }
    s
}

fn acyclic(c: &mut Criterion) {
    for n in [16, 64, 256] {
        c.bench_function(&format!("ring_chords_{n}"), |b| {
            b.iter(|| ring_with_chords(n).solve(Limits::default()))
        });
    }
}

criterion_group!(benches, acyclic);
criterion_main!(benches);
