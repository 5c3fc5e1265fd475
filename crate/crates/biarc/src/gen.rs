//! Seeded random digraph generation for corpus runs and benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::digraph::Digraph;

/// Special-family switches for the generator.
#[derive(Clone, Copy, Debug, Default)]
pub struct GenFlags {
    /// Force a loop on every vertex.
    pub reflexive: bool,
    /// Bipartite digraph: split the vertices in two halves and sample only
    /// arcs from the first half to the second.
    pub bigraph: bool,
    /// Emit the directed cycle on `q` vertices, ignoring `n` and `density`.
    pub cycle: Option<usize>,
}

/// Erdős–Rényi arc model: every ordered pair, loops included, becomes an arc
/// independently with probability `density`. Deterministic under `seed`.
pub fn gen_random_digraph(n: usize, density: f64, seed: u64, flags: GenFlags) -> Digraph {
    assert!(n >= 1, "need at least one vertex");
    assert!((0.0..=1.0).contains(&density), "density must lie in [0, 1]");
    if let Some(q) = flags.cycle {
        assert!(q >= 1);
        return Digraph::new(q, (0..q).map(|i| (i, (i + 1) % q))).expect("cycle arcs are valid");
    }
    assert!(!(flags.reflexive && flags.bigraph), "reflexive and bigraph conflict");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    if flags.bigraph {
        let split = n.div_ceil(2);
        for u in 0..split {
            for v in split..n {
                if rng.random_bool(density) {
                    arcs.push((u, v));
                }
            }
        }
    } else {
        for u in 0..n {
            for v in 0..n {
                if u == v && flags.reflexive {
                    arcs.push((u, v));
                } else if rng.random_bool(density) {
                    arcs.push((u, v));
                }
            }
        }
    }
    Digraph::new(n, arcs).expect("sampled arcs are valid")
}
