//! Shared helpers for tests: small named digraphs, seeded random instances,
//! and exhaustive enumeration of labeled digraphs.

use crate::digraph::Digraph;
use crate::gen::{gen_random_digraph, GenFlags};

pub fn directed_cycle(q: usize) -> Digraph {
    Digraph::new(q, (0..q).map(|i| (i, (i + 1) % q))).unwrap()
}

pub fn random_digraph(n: usize, density: f64, seed: u64) -> Digraph {
    gen_random_digraph(n, density.clamp(0.0, 1.0), seed, GenFlags::default())
}

/// All 2^(n*n) labeled digraphs on `n` vertices, loops included.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let cells = n * n;
    (0u64..1 << cells).map(move |mask| {
        let arcs = (0..cells).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n));
        Digraph::new(n, arcs).unwrap()
    })
}

/// Reflexive path: loops everywhere and symmetric arcs between neighbours.
pub fn reflexive_path(n: usize) -> Digraph {
    let mut arcs: Vec<(usize, usize)> = (0..n).map(|v| (v, v)).collect();
    for v in 0..n.saturating_sub(1) {
        arcs.push((v, v + 1));
        arcs.push((v + 1, v));
    }
    Digraph::new(n, arcs).unwrap()
}
