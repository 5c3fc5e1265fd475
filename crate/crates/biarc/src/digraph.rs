//! Digraph data model: dense integer vertices, loops allowed, plus the
//! balance and cycle-target labelings used by the k-min machinery.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::walk::{Step, Walk};
use crate::Error;

/// A digraph on vertices `0..n`. Arcs are ordered pairs; loops are allowed,
/// duplicate arcs are not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    arc_bits: Vec<u64>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut g = Digraph {
            n,
            arcs: Vec::new(),
            arc_bits: vec![0u64; (n * n).div_ceil(64).max(1)],
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
        };
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::Contract(format!(
                    "arc ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if g.has_arc(u, v) {
                return Err(Error::Contract(format!("duplicate arc ({u}, {v})")));
            }
            g.insert_arc(u, v);
        }
        g.arcs.sort_unstable();
        for adj in g.out.iter_mut().chain(g.inn.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(g)
    }

    fn insert_arc(&mut self, u: usize, v: usize) {
        let bit = u * self.n + v;
        self.arc_bits[bit / 64] |= 1 << (bit % 64);
        self.arcs.push((u, v));
        self.out[u].push(v);
        self.inn[v].push(u);
    }

    /// Parses an edge-list document: a header line `n m` followed by `m`
    /// lines `u v`. Errors name the offending 1-based line.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "empty document, expected header \"n m\"".into() })?;
        let mut it = header.split_whitespace();
        let parse_num = |tok: Option<&str>, line: usize, what: &str| -> Result<usize, Error> {
            tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?
                .parse::<usize>()
                .map_err(|_| Error::Parse { line, msg: format!("invalid {what}") })
        };
        let n = parse_num(it.next(), header_line, "vertex count")?;
        let m = parse_num(it.next(), header_line, "arc count")?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: header_line,
                msg: "trailing tokens after header".into(),
            });
        }

        let mut seen = HashSet::new();
        let mut arcs = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or_else(|| Error::Parse {
                line: header_line,
                msg: format!("expected {m} arc lines, found {}", arcs.len()),
            })?;
            let mut it = text.split_whitespace();
            let u = parse_num(it.next(), line, "source vertex")?;
            let v = parse_num(it.next(), line, "target vertex")?;
            if it.next().is_some() {
                return Err(Error::Parse { line, msg: "trailing tokens after arc".into() });
            }
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex out of range, expected 0..{n}"),
                });
            }
            if !seen.insert((u, v)) {
                return Err(Error::Parse { line, msg: format!("duplicate arc ({u}, {v})") });
            }
            arcs.push((u, v));
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse { line, msg: "unexpected content after arc list".into() });
        }
        Digraph::new(n, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in sorted order.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        let bit = u * self.n + v;
        self.arc_bits[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.arcs.len());
        for &(u, v) in &self.arcs {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Subdigraph induced by `verts`, relabeled densely. Returns the new
    /// digraph and the map from new labels back to the originals.
    pub fn induced(&self, verts: &[usize]) -> (Digraph, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]));
        let g = Digraph::new(verts.len(), arcs).expect("induced arcs are valid");
        (g, verts.to_vec())
    }

    /// Partition of the vertices by connectivity ignoring arc direction,
    /// ordered by smallest contained vertex.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut parts = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in self.out[v].iter().chain(self.inn[v].iter()) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            parts.push(members);
        }
        parts
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weak_components().len() <= 1
    }

    /// Searches for an unbalanced cycle. Returns `None` iff the digraph is
    /// balanced; otherwise a closed walk of positive net length `q`.
    ///
    /// Spanning-tree potentials over the underlying undirected graph, arcs
    /// weighted +1; any non-tree arc whose potential difference is not +1
    /// closes the returned walk.
    pub fn find_unbalanced_cycle(&self) -> Option<(Walk, i64)> {
        let mut pot = vec![i64::MIN; self.n];
        // parent[v] = (parent vertex, direction of the step parent -> v)
        let mut parent: Vec<Option<(usize, Step)>> = vec![None; self.n];
        let mut depth = vec![0usize; self.n];

        for root in 0..self.n {
            if pot[root] != i64::MIN {
                continue;
            }
            pot[root] = 0;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.out[v] {
                    if pot[w] == i64::MIN {
                        pot[w] = pot[v] + 1;
                        parent[w] = Some((v, Step::Forward));
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
                for &w in &self.inn[v] {
                    if pot[w] == i64::MIN {
                        pot[w] = pot[v] - 1;
                        parent[w] = Some((v, Step::Backward));
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }

        for &(u, v) in &self.arcs {
            let defect = pot[u] + 1 - pot[v];
            if defect == 0 {
                continue;
            }
            // Closed walk: v along the tree to u, then the arc u -> v.
            let mut walk = self.tree_walk(&parent, &depth, v, u);
            walk.push_step(Step::Forward, v);
            debug_assert_eq!(walk.net_length(), defect);
            let (walk, q) = if defect > 0 { (walk, defect) } else { (walk.reverse(), -defect) };
            return Some((walk, q));
        }
        None
    }

    /// Walk from `a` to `b` inside the BFS tree, through their lowest common
    /// ancestor.
    fn tree_walk(
        &self,
        parent: &[Option<(usize, Step)>],
        depth: &[usize],
        a: usize,
        b: usize,
    ) -> Walk {
        let mut up = Vec::new(); // steps from a upward
        let mut down = Vec::new(); // steps from b upward, replayed in reverse
        let (mut x, mut y) = (a, b);
        while depth[x] > depth[y] {
            let (p, d) = parent[x].unwrap();
            up.push((x, d));
            x = p;
        }
        while depth[y] > depth[x] {
            let (p, d) = parent[y].unwrap();
            down.push((y, d));
            y = p;
        }
        while x != y {
            let (px, dx) = parent[x].unwrap();
            up.push((x, dx));
            x = px;
            let (py, dy) = parent[y].unwrap();
            down.push((y, dy));
            y = py;
        }
        let mut walk = Walk::single(a);
        let mut cur = a;
        for &(child, dir) in &up {
            let (p, _) = parent[child].unwrap();
            walk.push_step(dir.flip(), p);
            cur = p;
        }
        debug_assert_eq!(cur, x);
        for &(child, dir) in down.iter().rev() {
            walk.push_step(dir, child);
        }
        walk
    }

    /// Labeling of the vertices by residues mod `k` with every arc stepping
    /// +1, if one exists. `k = 1` always succeeds.
    pub fn ck_labeling(&self, k: usize) -> Option<CkLabeling> {
        assert!(k >= 1, "modulus must be positive");
        let mut label = vec![usize::MAX; self.n];
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = 0;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.out[v] {
                    if label[w] == usize::MAX {
                        label[w] = (label[v] + 1) % k;
                        queue.push_back(w);
                    }
                }
                for &w in &self.inn[v] {
                    if label[w] == usize::MAX {
                        label[w] = (label[v] + k - 1) % k;
                        queue.push_back(w);
                    }
                }
            }
        }
        let lab = CkLabeling { k, label };
        lab.validate(self).then_some(lab)
    }
}

/// A homomorphism of the host digraph to the directed cycle on `k` vertices,
/// given as the residue of each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CkLabeling {
    pub k: usize,
    pub label: Vec<usize>,
}

impl CkLabeling {
    /// All-zero labeling; valid for every digraph since the target is a
    /// one-vertex loop.
    pub fn trivial(n: usize) -> Self {
        CkLabeling { k: 1, label: vec![0; n] }
    }

    pub fn validate(&self, h: &Digraph) -> bool {
        self.label.len() == h.n()
            && self.label.iter().all(|&l| l < self.k)
            && h.arcs()
                .iter()
                .all(|&(u, v)| self.label[v] == (self.label[u] + 1) % self.k)
    }

    /// Vertex classes `V_0..V_{k-1}`, each sorted.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut cls = vec![Vec::new(); self.k];
        for (v, &l) in self.label.iter().enumerate() {
            cls[l].push(v);
        }
        cls
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        Digraph::new(n, arcs.iter().copied()).unwrap()
    }

    fn directed_cycle(q: usize) -> Digraph {
        Digraph::new(q, (0..q).map(|i| (i, (i + 1) % q))).unwrap()
    }

    #[test]
    fn parse_basic() {
        let g = Digraph::parse("2 1\n0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.arcs(), &[(0, 1)]);
    }

    #[test]
    fn parse_loop_allowed() {
        let g = Digraph::parse("1 1\n0 0").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.arcs(), &[(0, 0)]);
    }

    #[test]
    fn parse_duplicate_arc_names_line() {
        let err = Digraph::parse("2 2\n0 1\n0 1").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_out_of_range_vertex() {
        let err = Digraph::parse("2 1\n0 5").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn weak_components_examples() {
        assert_eq!(g(3, &[(0, 1)]).weak_components(), vec![vec![0, 1], vec![2]]);
        assert_eq!(directed_cycle(3).weak_components(), vec![vec![0, 1, 2]]);
        assert_eq!(g(2, &[]).weak_components(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn unbalanced_cycle_on_c3() {
        let c3 = directed_cycle(3);
        let (walk, q) = c3.find_unbalanced_cycle().unwrap();
        assert_eq!(q, 3);
        assert_eq!(walk.net_length(), 3);
        assert!(walk.is_closed());
        walk.validate_in(&c3).unwrap();
    }

    #[test]
    fn single_arc_is_balanced() {
        assert!(g(2, &[(0, 1)]).find_unbalanced_cycle().is_none());
    }

    #[test]
    fn digon_unbalanced_with_q2() {
        let digon = g(2, &[(0, 1), (1, 0)]);
        let (walk, q) = digon.find_unbalanced_cycle().unwrap();
        assert_eq!(q, 2);
        assert_eq!(walk.net_length(), 2);
        walk.validate_in(&digon).unwrap();
    }

    #[test]
    fn ck_labeling_c3() {
        let c3 = directed_cycle(3);
        let lab = c3.ck_labeling(3).unwrap();
        assert!(lab.validate(&c3));
        // identity up to rotation; root 0 gets label 0
        assert_eq!(lab.label, vec![0, 1, 2]);
        // net length 3 is not divisible by 2
        assert!(c3.ck_labeling(2).is_none());
        let lab1 = c3.ck_labeling(1).unwrap();
        assert_eq!(lab1.label, vec![0, 0, 0]);
    }

    #[test]
    fn loops_force_k1() {
        let h = g(2, &[(0, 0), (0, 1)]);
        assert!(h.ck_labeling(1).is_some());
        assert!(h.ck_labeling(2).is_none());
    }

    /// Balance decision agrees with exhaustive closed-walk search up to
    /// length 2n on small random digraphs.
    #[test]
    fn balance_matches_exhaustive_closed_walk_search() {
        for seed in 0..60u64 {
            let h = crate::gen::gen_random_digraph(
                1 + (seed as usize % 6),
                0.1 + 0.1 * (seed % 8) as f64,
                seed,
                crate::gen::GenFlags::default(),
            );
            let claimed_balanced = h.find_unbalanced_cycle().is_none();
            assert_eq!(
                claimed_balanced,
                !exhaustive_has_unbalanced_closed_walk(&h),
                "disagreement on {h:?}"
            );
            if let Some((w, q)) = h.find_unbalanced_cycle() {
                assert!(q > 0);
                w.validate_in(&h).unwrap();
                assert!(w.is_closed());
                assert_eq!(w.net_length(), q);
            }
        }
    }

    /// Layered DP over (vertex, net) states: is there a closed walk of
    /// nonzero net length and length at most 2n?
    fn exhaustive_has_unbalanced_closed_walk(h: &Digraph) -> bool {
        let n = h.n();
        let bound = 2 * n;
        for start in 0..n {
            let offset = bound as i64;
            let mut reach = vec![vec![false; 2 * bound + 1]; n];
            reach[start][offset as usize] = true;
            for _ in 0..bound {
                let mut next = reach.clone();
                for v in 0..n {
                    for d in 0..2 * bound + 1 {
                        if !reach[v][d] {
                            continue;
                        }
                        for &w in h.out_neighbors(v) {
                            if d + 1 <= 2 * bound {
                                next[w][d + 1] = true;
                            }
                        }
                        for &w in h.in_neighbors(v) {
                            if d >= 1 {
                                next[w][d - 1] = true;
                            }
                        }
                    }
                }
                reach = next;
                for (d, &hit) in reach[start].iter().enumerate() {
                    if hit && d as i64 != offset {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// ck_labeling succeeds iff every simple cycle has net length divisible
    /// by k (exhaustive cycle enumeration, n <= 6).
    #[test]
    fn ck_labeling_matches_cycle_enumeration() {
        for seed in 100..140u64 {
            let h = crate::gen::gen_random_digraph(
                2 + (seed as usize % 5),
                0.15 + 0.1 * (seed % 6) as f64,
                seed,
                crate::gen::GenFlags::default(),
            );
            let nets = enumerate_cycle_nets(&h);
            for k in 1..=6usize {
                let ok = h.ck_labeling(k).is_some();
                let expected = nets.iter().all(|&q| q.rem_euclid(k as i64) == 0);
                assert_eq!(ok, expected, "k={k} on {h:?}, cycle nets {nets:?}");
            }
        }
    }

    fn enumerate_cycle_nets(h: &Digraph) -> Vec<i64> {
        // all simple closed walks in the underlying graph, canonicalized by
        // smallest start vertex
        let mut nets = Vec::new();
        let n = h.n();
        for &(u, v) in h.arcs() {
            if u == v {
                nets.push(1);
            }
        }
        for start in 0..n {
            let mut path = vec![start];
            let mut on_path = vec![false; n];
            on_path[start] = true;
            dfs_cycles(h, start, start, &mut path, &mut on_path, 0, &mut nets);
        }
        nets
    }

    fn dfs_cycles(
        h: &Digraph,
        start: usize,
        v: usize,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        net: i64,
        nets: &mut Vec<i64>,
    ) {
        let mut steps: Vec<(usize, i64)> = h
            .out_neighbors(v)
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| (w, 1i64))
            .chain(h.in_neighbors(v).iter().filter(|&&w| w != v).map(|&w| (w, -1i64)))
            .collect();
        steps.sort_unstable();
        for (w, d) in steps {
            if w == start && path.len() >= 2 {
                nets.push(net + d);
            } else if w > start && !on_path[w] {
                path.push(w);
                on_path[w] = true;
                dfs_cycles(h, start, w, path, on_path, net + d, nets);
                on_path[w] = false;
                path.pop();
            }
        }
    }
}
