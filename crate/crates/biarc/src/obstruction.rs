//! Circuit obstructions: cyclically chained pairs inside one strong
//! component of the pair digraph. An invertible pair is the two-pair case.

use serde::{Deserialize, Serialize};

use crate::pair::{PairDigraph, SccInfo};

/// Cyclically chained pairs `(x_0,x_1), (x_1,x_2), ..., (x_t,x_0)` that all
/// live in one strong component of the pair digraph. Any such set rules out
/// a min ordering: it would force `x_0 < x_1 < ... < x_0`.
///
/// The `component` id is informational; verification re-checks membership by
/// reachability instead of trusting it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub pairs: Vec<(usize, usize)>,
    pub component: usize,
}

/// Some pair whose reverse shares its strong component, in ascending pair
/// order; `None` when no invertible pair exists.
pub fn find_invertible_pair(p: &PairDigraph, s: &SccInfo) -> Option<(usize, usize)> {
    (0..p.pair_count())
        .find(|&id| s.comp[id] == s.comp[p.rev_index(id)])
        .map(|id| p.pair(id))
}

/// Searches every strong component for a circuit: the auxiliary digraph of a
/// component has an arc `x -> y` for each member pair `(x,y)`, and any of
/// its directed cycles chains into a circuit. Components are scanned in
/// ascending id order and the first cycle wins.
pub fn find_component_circuit(p: &PairDigraph, s: &SccInfo) -> Option<Circuit> {
    let n = p.host_n();
    for c in 0..s.comp_count {
        if s.members[c].len() < 2 {
            continue;
        }
        let mut adj = vec![Vec::new(); n];
        for &id in &s.members[c] {
            let (x, y) = p.pair(id);
            adj[x].push(y);
        }
        if let Some(cycle) = first_directed_cycle(&adj) {
            let pairs = cycle
                .iter()
                .enumerate()
                .map(|(i, &x)| (x, cycle[(i + 1) % cycle.len()]))
                .collect();
            return Some(Circuit { pairs, component: c });
        }
    }
    None
}

/// First directed cycle of the adjacency structure under DFS from ascending
/// roots with ascending neighbors, as a vertex sequence.
pub(crate) fn first_directed_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != Color::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = Color::Gray;
        while let Some(&mut (v, ref mut ei)) = stack.last_mut() {
            if let Some(&w) = adj[v].get(*ei) {
                *ei += 1;
                match color[w] {
                    Color::White => {
                        color[w] = Color::Gray;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    Color::Gray => {
                        // back edge v -> w closes the cycle w .. v
                        let mut cycle = vec![v];
                        let mut cur = v;
                        while cur != w {
                            cur = parent[cur];
                            cycle.push(cur);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Color::Black => {}
                }
            } else {
                color[v] = Color::Black;
                stack.pop();
            }
        }
    }
    None
}

/// Checks a circuit certificate from scratch: the pairs chain cyclically,
/// there are at least two of them, every pair is a vertex of the pair
/// digraph, and they are mutually reachable (membership in one strong
/// component is re-derived, not read off component ids).
pub fn verify_circuit(p: &PairDigraph, circuit: &Circuit) -> bool {
    let pairs = &circuit.pairs;
    if pairs.len() < 2 {
        return false;
    }
    for (i, &(_, b)) in pairs.iter().enumerate() {
        if b != pairs[(i + 1) % pairs.len()].0 {
            return false;
        }
    }
    let ids: Option<Vec<usize>> = pairs.iter().map(|&(x, y)| p.pair_index(x, y)).collect();
    let Some(ids) = ids else { return false };
    let fwd = p.reachable_from(ids[0]);
    let back = p.reaching(ids[0]);
    ids.iter().all(|&id| fwd[id] && back[id])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::pair::{build_pair_digraph, strong_components};
    use crate::testutil::directed_cycle;

    fn pair_scc(h: &Digraph) -> (PairDigraph, SccInfo) {
        let p = build_pair_digraph(h);
        let s = strong_components(&p);
        (p, s)
    }

    #[test]
    fn c3_has_no_invertible_pair_but_a_circuit() {
        let (p, s) = pair_scc(&directed_cycle(3));
        assert_eq!(find_invertible_pair(&p, &s), None);
        let c = find_component_circuit(&p, &s).unwrap();
        assert_eq!(c.pairs, vec![(0, 1), (1, 2), (2, 0)]);
        assert!(verify_circuit(&p, &c));
    }

    #[test]
    fn c6_invertible_pair_is_0_3() {
        let (p, s) = pair_scc(&directed_cycle(6));
        assert_eq!(find_invertible_pair(&p, &s), Some((0, 3)));
    }

    #[test]
    fn arcless_pair_digraph_has_neither() {
        let (p, s) = pair_scc(&Digraph::new(2, [(0, 1)]).unwrap());
        assert_eq!(find_invertible_pair(&p, &s), None);
        assert_eq!(find_component_circuit(&p, &s), None);
    }

    #[test]
    fn reflexive_clique_has_no_circuit() {
        let h = Digraph::new(2, [(0, 0), (1, 1), (0, 1), (1, 0)]).unwrap();
        let (p, s) = pair_scc(&h);
        assert_eq!(find_component_circuit(&p, &s), None);
    }

    #[test]
    fn verify_rejects_broken_chaining() {
        let (p, _) = pair_scc(&directed_cycle(3));
        let c = Circuit { pairs: vec![(0, 1), (2, 0), (1, 2)], component: 0 };
        assert!(!verify_circuit(&p, &c));
    }

    #[test]
    fn verify_rejects_pairs_from_two_components() {
        let (p, _) = pair_scc(&directed_cycle(3));
        // chains, but (1,0) lives in the skew-image component
        let c = Circuit { pairs: vec![(0, 1), (1, 0)], component: 0 };
        assert!(!verify_circuit(&p, &c));
    }

    #[test]
    fn invertible_pair_matches_two_cycle_search() {
        for seed in 0..60u64 {
            let h = crate::testutil::random_digraph(2 + (seed as usize % 5), 0.3, seed);
            let (p, s) = pair_scc(&h);
            let inv = find_invertible_pair(&p, &s);
            // a 2-cycle in some auxiliary digraph means both orientations of a
            // pair share a component
            let two_cycle = (0..s.comp_count).any(|c| {
                s.members[c].iter().any(|&id| {
                    let (x, y) = p.pair(id);
                    s.members[c].contains(&p.pair_index(y, x).unwrap())
                })
            });
            assert_eq!(inv.is_some(), two_cycle, "mismatch on {h:?}");
        }
    }
}
