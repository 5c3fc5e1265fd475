//! Conservative polymorphisms: the commutative binary kind built by peeling
//! ripe components of the pair digraph, and set polymorphisms derived from
//! min orderings.

use crate::digraph::Digraph;
use crate::obstruction::find_invertible_pair;
use crate::pair::{build_pair_digraph, dual_component, strong_components};
use crate::Error;

/// Total commutative conservative binary table over the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTable {
    n: usize,
    value: Vec<usize>,
}

impl BinaryTable {
    pub fn identity_diagonal(n: usize) -> Self {
        let mut value = vec![usize::MAX; n * n];
        for x in 0..n {
            value[x * n + x] = x;
        }
        BinaryTable { n, value }
    }

    /// The min function of a total order, as a table.
    pub fn min_table(order: &[usize]) -> Self {
        let n = order.len();
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut t = BinaryTable::identity_diagonal(n);
        for x in 0..n {
            for y in 0..n {
                t.value[x * n + y] = if pos[x] <= pos[y] { x } else { y };
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        self.value[x * self.n + y]
    }

    pub fn set_symmetric(&mut self, x: usize, y: usize, v: usize) {
        self.value[x * self.n + y] = v;
        self.value[y * self.n + x] = v;
    }

    pub fn is_total(&self) -> bool {
        self.value.iter().all(|&v| v != usize::MAX)
    }

    /// Entries for the unordered pairs `x < y`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        (0..self.n).flat_map(move |x| {
            (x + 1..self.n).map(move |y| ((x, y), self.get(x, y)))
        })
    }
}

/// Builds a commutative conservative polymorphism by repeatedly selecting a
/// ripe strong component of the pair digraph to map to its first coordinate
/// and deleting it together with its dual. Returns `None` exactly when an
/// invertible pair exists.
pub fn build_cc_polymorphism(h: &Digraph) -> Result<Option<BinaryTable>, Error> {
    let p = build_pair_digraph(h);
    let s = strong_components(&p);
    if find_invertible_pair(&p, &s).is_some() {
        return Ok(None);
    }

    let mut table = BinaryTable::identity_diagonal(h.n());
    let mut removed = vec![false; s.comp_count];
    let mut removed_as_dual = vec![false; s.comp_count];
    let mut remaining = s.comp_count;
    while remaining > 0 {
        let c = (0..s.comp_count)
            .find(|&c| !removed[c] && s.condensation[c].iter().all(|&d| removed[d]))
            .ok_or_else(|| Error::Internal("no ripe component in a nonempty digraph".into()))?;
        // a ripe selection must never feed into a component that was deleted
        // as somebody's dual; that would poison an earlier selection
        for &v in &s.members[c] {
            for &(w, _) in p.out_arcs(v) {
                let d = s.comp[w as usize];
                if d != c && removed_as_dual[d] {
                    return Err(Error::Internal(
                        "selected component reaches a dual-deleted component".into(),
                    ));
                }
            }
        }
        let dual = dual_component(&p, &s, c)?;
        for &v in &s.members[c] {
            let (x, y) = p.pair(v);
            table.set_symmetric(x, y, x);
        }
        removed[c] = true;
        removed[dual] = true;
        removed_as_dual[dual] = true;
        remaining -= 2;
    }

    if !table.is_total() || !verify_cc_polymorphism(h, &table) {
        return Err(Error::Internal(format!(
            "peeled table failed verification on digraph:\n{}",
            h.to_edge_list()
        )));
    }
    Ok(Some(table))
}

/// True iff the table is conservative and commutative and every pair of arcs
/// `xx'`, `yy'` maps to an arc `f(x,y) f(x',y')`.
pub fn verify_cc_polymorphism(h: &Digraph, t: &BinaryTable) -> bool {
    let n = h.n();
    if t.n != n || !t.is_total() {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            let v = t.get(x, y);
            if (v != x && v != y) || v != t.get(y, x) {
                return false;
            }
        }
    }
    let arcs = h.arcs();
    for &(x, xp) in arcs {
        for &(y, yp) in arcs {
            if !h.has_arc(t.get(x, y), t.get(xp, yp)) {
                return false;
            }
        }
    }
    true
}

/// Conservative table over the nonempty vertex subsets, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetTable {
    n: usize,
    value: Vec<usize>,
}

impl SetTable {
    pub fn new(n: usize, value: Vec<usize>) -> Result<Self, Error> {
        if n > 12 {
            return Err(Error::Contract(format!("set tables are capped at 12 vertices, got {n}")));
        }
        if value.len() != (1usize << n) - 1 {
            return Err(Error::Contract("set table must cover every nonempty subset".into()));
        }
        Ok(SetTable { n, value })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value on the nonempty subset encoded by `mask`.
    pub fn get(&self, mask: usize) -> usize {
        self.value[mask - 1]
    }
}

/// The set function of a min ordering: each subset maps to its minimum.
pub fn min_to_set_polymorphism(order: &[usize]) -> Result<SetTable, Error> {
    let n = order.len();
    if n > 12 {
        return Err(Error::Contract(format!("set tables are capped at 12 vertices, got {n}")));
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let value = (1usize..1 << n)
        .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).min_by_key(|&v| pos[v]).unwrap())
        .collect();
    SetTable::new(n, value)
}

/// True iff the table is conservative and, for every ordered pair of subsets
/// `(S, T)` where each element of `S` has an out-neighbour in `T` and each
/// element of `T` an in-neighbour in `S`, the arc `f(S) f(T)` is present.
pub fn verify_set_polymorphism(h: &Digraph, t: &SetTable) -> bool {
    let n = h.n();
    if t.n != n {
        return false;
    }
    let full = (1usize << n) - 1;
    for mask in 1..=full {
        if mask >> t.get(mask) & 1 == 0 {
            return false;
        }
    }
    let mut out_mask = vec![0usize; n];
    let mut in_mask = vec![0usize; n];
    for &(u, v) in h.arcs() {
        out_mask[u] |= 1 << v;
        in_mask[v] |= 1 << u;
    }
    for s_mask in 1..=full {
        for t_mask in 1..=full {
            let dominated = (0..n)
                .filter(|&v| s_mask >> v & 1 == 1)
                .all(|v| out_mask[v] & t_mask != 0)
                && (0..n)
                    .filter(|&v| t_mask >> v & 1 == 1)
                    .all(|v| in_mask[v] & s_mask != 0);
            if dominated && !h.has_arc(t.get(s_mask), t.get(t_mask)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{build_min_ordering, RecognitionResult};
    use crate::testutil::{all_digraphs, directed_cycle, random_digraph};

    #[test]
    fn digon_has_no_cc_polymorphism() {
        let digon = Digraph::new(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(build_cc_polymorphism(&digon).unwrap(), None);
    }

    #[test]
    fn single_arc_peels_to_first_component() {
        let h = Digraph::new(2, [(0, 1)]).unwrap();
        let t = build_cc_polymorphism(&h).unwrap().unwrap();
        assert_eq!(t.get(0, 1), 0);
        assert_eq!(t.get(1, 0), 0);
        assert!(verify_cc_polymorphism(&h, &t));
    }

    #[test]
    fn c3_has_cc_but_no_min_ordering() {
        let c3 = directed_cycle(3);
        let t = build_cc_polymorphism(&c3).unwrap().unwrap();
        assert!(verify_cc_polymorphism(&c3, &t));
        assert!(matches!(
            build_min_ordering(&c3).unwrap(),
            RecognitionResult::Obstruction(_)
        ));
    }

    #[test]
    fn verify_cc_examples() {
        let h = Digraph::new(2, [(0, 1)]).unwrap();
        assert!(verify_cc_polymorphism(&h, &BinaryTable::min_table(&[0, 1])));

        let mut bad = BinaryTable::identity_diagonal(2);
        bad.set_symmetric(0, 1, 0);
        bad.value[0 * 2 + 1] = 1; // breaks commutativity
        assert!(!verify_cc_polymorphism(&h, &bad));

        let mut non_conservative = BinaryTable::identity_diagonal(3);
        non_conservative.set_symmetric(0, 1, 2);
        non_conservative.set_symmetric(0, 2, 0);
        non_conservative.set_symmetric(1, 2, 1);
        assert!(!verify_cc_polymorphism(&Digraph::new(3, []).unwrap(), &non_conservative));
    }

    #[test]
    fn min_to_set_examples() {
        let t = min_to_set_polymorphism(&[0, 1, 2]).unwrap();
        assert_eq!(t.get(0b110), 1); // {1,2} -> 1
        for v in 0..3 {
            assert_eq!(t.get(1 << v), v);
        }
        let t = min_to_set_polymorphism(&[2, 0, 1]).unwrap();
        assert_eq!(t.get(0b111), 2);
    }

    #[test]
    fn set_polymorphism_of_min_ordering_verifies() {
        // every yes-instance's min table is a set polymorphism
        for h in all_digraphs(2) {
            if let RecognitionResult::MinOrdering(order) = build_min_ordering(&h).unwrap() {
                let t = min_to_set_polymorphism(&order).unwrap();
                assert!(verify_set_polymorphism(&h, &t), "failed on {h:?}");
            }
        }
    }

    #[test]
    fn set_polymorphism_rejects_non_conservative_table() {
        let h = Digraph::new(2, [(0, 1)]).unwrap();
        let t = SetTable::new(2, vec![0, 1, 0]).unwrap();
        assert!(verify_set_polymorphism(&h, &t));
        let bad = SetTable::new(2, vec![1, 1, 0]).unwrap(); // f({0}) = 1
        assert!(!verify_set_polymorphism(&h, &bad));
    }

    /// Every min-ordering instance also has a commutative conservative
    /// polymorphism: its min table.
    #[test]
    fn min_tables_are_cc_polymorphisms() {
        for seed in 600..660u64 {
            let h = random_digraph(1 + (seed as usize % 5), 0.3, seed);
            if let RecognitionResult::MinOrdering(order) = build_min_ordering(&h).unwrap() {
                assert!(verify_cc_polymorphism(&h, &BinaryTable::min_table(&order)));
            }
        }
    }

    #[test]
    fn peeling_matches_invertibility_on_random_instances() {
        for seed in 700..760u64 {
            let h = random_digraph(2 + (seed as usize % 5), 0.3, seed);
            let p = build_pair_digraph(&h);
            let s = strong_components(&p);
            let has_invertible = find_invertible_pair(&p, &s).is_some();
            let built = build_cc_polymorphism(&h).unwrap();
            assert_eq!(built.is_none(), has_invertible, "mismatch on {h:?}");
            if let Some(t) = built {
                assert!(verify_cc_polymorphism(&h, &t));
            }
        }
    }
}
