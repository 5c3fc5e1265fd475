//! Independent brute-force oracles for desk-scale cross-checking. Each
//! search works straight from the defining conditions over the raw arc set
//! and shares nothing with the main pipeline beyond the digraph type, so an
//! agreement between the two is meaningful evidence.
//!
//! Every search is deterministic and returns the lexicographically first
//! certificate. Instances beyond the size guards are refused, never
//! silently truncated.

use crate::digraph::Digraph;
use crate::poly::{BinaryTable, SetTable};
use crate::Error;

/// What to search for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleTarget {
    MinOrdering,
    KMinOrdering(usize),
    CcPolymorphism,
    SetPolymorphism,
}

/// A certificate found by exhaustive search.
#[derive(Clone, Debug)]
pub enum OracleCertificate {
    MinOrdering(Vec<usize>),
    KMinOrdering { k: usize, labels: Vec<usize>, orders: Vec<Vec<usize>> },
    CcPolymorphism(BinaryTable),
    SetPolymorphism(SetTable),
}

/// Runs the requested search, enforcing the size guards: min and k-min
/// orderings up to 8 vertices, commutative conservative tables up to 7, set
/// tables up to 4.
pub fn oracle_search(h: &Digraph, target: OracleTarget) -> Result<Option<OracleCertificate>, Error> {
    let guard = |bound: usize, what: &str| {
        if h.n() > bound {
            Err(Error::OracleRefused(format!(
                "{what} search is exhaustive and capped at {bound} vertices, got {}",
                h.n()
            )))
        } else {
            Ok(())
        }
    };
    match target {
        OracleTarget::MinOrdering => {
            guard(8, "min-ordering")?;
            Ok(search_min_ordering(h).map(OracleCertificate::MinOrdering))
        }
        OracleTarget::KMinOrdering(k) => {
            guard(8, "k-min-ordering")?;
            if k == 0 {
                return Err(Error::Contract("modulus must be positive".into()));
            }
            Ok(search_k_min_ordering(h, k)?
                .map(|(labels, orders)| OracleCertificate::KMinOrdering { k, labels, orders }))
        }
        OracleTarget::CcPolymorphism => {
            guard(7, "commutative conservative table")?;
            Ok(search_cc(h).map(OracleCertificate::CcPolymorphism))
        }
        OracleTarget::SetPolymorphism => {
            guard(4, "set polymorphism")?;
            Ok(search_set_polymorphism(h).map(OracleCertificate::SetPolymorphism))
        }
    }
}

/// Direct transcription of the min-ordering condition, used on full
/// assignments produced by the search below and in tests.
pub fn is_min_ordering(h: &Digraph, order: &[usize]) -> bool {
    let n = h.n();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    h.arcs().iter().all(|&(u, v)| {
        h.arcs().iter().all(|&(u2, v2)| {
            let mu = if pos[u] <= pos[u2] { u } else { u2 };
            let mv = if pos[v] <= pos[v2] { v } else { v2 };
            h.has_arc(mu, mv)
        })
    })
}

/// Backtracking over order prefixes. Placing a vertex fixes it as larger
/// than everything placed and smaller than everything unplaced, so a
/// constraint can be evaluated as soon as each of its two compared sides has
/// a placed endpoint.
fn search_min_ordering(h: &Digraph) -> Option<Vec<usize>> {
    let n = h.n();
    if n == 0 {
        return Some(Vec::new());
    }
    let arcs = h.arcs();
    // constraints over distinct arc pairs; same-arc pairs hold trivially
    let mut constraints = Vec::new();
    let mut triggers = vec![Vec::new(); n];
    for (i, &(u, v)) in arcs.iter().enumerate() {
        for &(u2, v2) in &arcs[i + 1..] {
            let id = constraints.len();
            constraints.push((u, v, u2, v2));
            for w in [u, v, u2, v2] {
                if !triggers[w].contains(&id) {
                    triggers[w].push(id);
                }
            }
        }
    }

    let mut pos = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    if place_next(h, &constraints, &triggers, &mut pos, &mut order) {
        Some(order)
    } else {
        None
    }
}

fn place_next(
    h: &Digraph,
    constraints: &[(usize, usize, usize, usize)],
    triggers: &[Vec<usize>],
    pos: &mut Vec<usize>,
    order: &mut Vec<usize>,
) -> bool {
    let n = pos.len();
    if order.len() == n {
        return true;
    }
    for w in 0..n {
        if pos[w] != usize::MAX {
            continue;
        }
        pos[w] = order.len();
        order.push(w);
        let ok = triggers[w].iter().all(|&cid| {
            let (u, v, u2, v2) = constraints[cid];
            // resolved side: the smaller endpoint once either is placed
            let mu = match (pos[u] != usize::MAX, pos[u2] != usize::MAX) {
                (true, true) => Some(if pos[u] <= pos[u2] { u } else { u2 }),
                (true, false) => Some(u),
                (false, true) => Some(u2),
                (false, false) => None,
            };
            let mv = match (pos[v] != usize::MAX, pos[v2] != usize::MAX) {
                (true, true) => Some(if pos[v] <= pos[v2] { v } else { v2 }),
                (true, false) => Some(v),
                (false, true) => Some(v2),
                (false, false) => None,
            };
            match (mu, mv) {
                (Some(a), Some(b)) => h.has_arc(a, b),
                _ => true,
            }
        });
        if ok && place_next(h, constraints, triggers, pos, order) {
            return true;
        }
        pos[w] = usize::MAX;
        order.pop();
    }
    false
}

/// Direct transcription of the k-min conditions.
fn is_k_min_ordering(h: &Digraph, k: usize, labels: &[usize], orders: &[Vec<usize>]) -> bool {
    let mut pos = vec![usize::MAX; h.n()];
    for order in orders {
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
    }
    for &(u, v) in h.arcs() {
        if labels[v] != (labels[u] + 1) % k {
            return false;
        }
    }
    h.arcs().iter().all(|&(u, v)| {
        h.arcs().iter().all(|&(w, z)| {
            labels[u] != labels[w] || !(pos[u] < pos[w] && pos[z] < pos[v]) || h.has_arc(u, z)
        })
    })
}

/// Enumerates the cycle labelings (one rotation per weak component) and all
/// per-class orderings, lexicographically first result wins.
fn search_k_min_ordering(
    h: &Digraph,
    k: usize,
) -> Result<Option<(Vec<usize>, Vec<Vec<usize>>)>, Error> {
    if k == 1 {
        return Ok(search_min_ordering(h).map(|order| (vec![0; h.n()], vec![order])));
    }
    let n = h.n();
    // base potential per weak component, or no homomorphism at all
    let mut base = vec![usize::MAX; n];
    let mut comp_of = vec![usize::MAX; n];
    let mut comps = 0usize;
    for root in 0..n {
        if base[root] != usize::MAX {
            continue;
        }
        let id = comps;
        comps += 1;
        base[root] = 0;
        comp_of[root] = id;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in h.out_neighbors(v) {
                if base[w] == usize::MAX {
                    base[w] = (base[v] + 1) % k;
                    comp_of[w] = id;
                    queue.push_back(w);
                }
            }
            for &w in h.in_neighbors(v) {
                if base[w] == usize::MAX {
                    base[w] = (base[v] + k - 1) % k;
                    comp_of[w] = id;
                    queue.push_back(w);
                }
            }
        }
    }
    if h.arcs().iter().any(|&(u, v)| base[v] != (base[u] + 1) % k) {
        return Ok(None);
    }
    let labelings = (k as u64).checked_pow(comps as u32).filter(|&c| c <= 262_144);
    let Some(labeling_count) = labelings else {
        return Err(Error::OracleRefused(format!(
            "k-min search over {comps} weak components at modulus {k} is too large"
        )));
    };

    let mut offsets = vec![0usize; comps];
    for _ in 0..labeling_count {
        let labels: Vec<usize> = (0..n).map(|v| (base[v] + offsets[comp_of[v]]) % k).collect();
        let mut classes = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            classes[l].push(v);
        }
        if let Some(orders) = search_class_orders(h, k, &labels, &classes) {
            return Ok(Some((labels, orders)));
        }
        // next offset vector, least significant component first
        let mut i = 0;
        while i < comps {
            offsets[i] += 1;
            if offsets[i] < k {
                break;
            }
            offsets[i] = 0;
            i += 1;
        }
    }
    Ok(None)
}

fn search_class_orders(
    h: &Digraph,
    k: usize,
    labels: &[usize],
    classes: &[Vec<usize>],
) -> Option<Vec<Vec<usize>>> {
    let mut orders: Vec<Vec<usize>> = classes.to_vec();
    loop {
        if is_k_min_ordering(h, k, labels, &orders) {
            return Some(orders.clone());
        }
        // advance the tuple of permutations lexicographically
        let mut i = 0;
        while i < orders.len() {
            if next_permutation(&mut orders[i]) {
                break;
            }
            orders[i] = classes[i].clone();
            i += 1;
        }
        if i == orders.len() {
            return None;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Searches for a commutative conservative polymorphism by backtracking over
/// the unordered pairs. The forcing rules come straight from the defining
/// condition: arcs `xx'`, `yy'` with `xy'` absent force `f(x,y) = x` to
/// propagate to `f(x',y') = x'`, and dually for in-arcs.
fn search_cc(h: &Digraph) -> Option<BinaryTable> {
    let n = h.n();
    let mut pair_id = vec![usize::MAX; n * n];
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            pair_id[x * n + y] = pairs.len();
            pair_id[y * n + x] = pairs.len();
            pairs.push((x, y));
        }
    }

    // implications (pair a = first coord) -> (pair b = first coord), bucketed
    // under the later pair in assignment order
    let mut buckets: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); pairs.len()];
    let mut push = |x: usize, y: usize, xp: usize, yp: usize| {
        let a = pair_id[x * n + y];
        let b = pair_id[xp * n + yp];
        buckets[a.max(b)].push((a, x, b, xp));
    };
    let arcs = h.arcs();
    for &(x, xp) in arcs {
        for &(y, yp) in arcs {
            if x != y && xp != yp && !h.has_arc(x, yp) {
                push(x, y, xp, yp);
            }
        }
    }
    for &(xp, x) in arcs {
        for &(yp, y) in arcs {
            if x != y && xp != yp && !h.has_arc(yp, x) {
                push(x, y, xp, yp);
            }
        }
    }

    let mut choice = vec![usize::MAX; pairs.len()];
    if assign_pair(0, &pairs, &buckets, &mut choice) {
        let mut table = BinaryTable::identity_diagonal(n);
        for (id, &(x, y)) in pairs.iter().enumerate() {
            table.set_symmetric(x, y, choice[id]);
        }
        Some(table)
    } else {
        None
    }
}

fn assign_pair(
    id: usize,
    pairs: &[(usize, usize)],
    buckets: &[Vec<(usize, usize, usize, usize)>],
    choice: &mut Vec<usize>,
) -> bool {
    if id == pairs.len() {
        return true;
    }
    let (x, y) = pairs[id];
    for value in [x, y] {
        choice[id] = value;
        let ok = buckets[id].iter().all(|&(a, va, b, vb)| {
            // premise f(pair a) = va forces f(pair b) = vb
            choice[a] != va || choice[b] == vb || choice[b] == usize::MAX
        });
        if ok && assign_pair(id + 1, pairs, buckets, choice) {
            return true;
        }
    }
    choice[id] = usize::MAX;
    false
}

/// Backtracking over the nonempty subsets in size order, pruning with the
/// domination condition against every previously assigned subset.
fn search_set_polymorphism(h: &Digraph) -> Option<SetTable> {
    let n = h.n();
    let full = (1usize << n) - 1;
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));

    let mut out_mask = vec![0usize; n];
    let mut in_mask = vec![0usize; n];
    for &(u, v) in h.arcs() {
        out_mask[u] |= 1 << v;
        in_mask[v] |= 1 << u;
    }
    let dominated = |s: usize, t: usize| {
        (0..n).filter(|&v| s >> v & 1 == 1).all(|v| out_mask[v] & t != 0)
            && (0..n).filter(|&v| t >> v & 1 == 1).all(|v| in_mask[v] & s != 0)
    };

    let mut value = vec![usize::MAX; full];
    fn go(
        h: &Digraph,
        masks: &[usize],
        at: usize,
        dominated: &dyn Fn(usize, usize) -> bool,
        value: &mut Vec<usize>,
    ) -> bool {
        let Some(&mask) = masks.get(at) else { return true };
        let n = h.n();
        for v in (0..n).filter(|&v| mask >> v & 1 == 1) {
            value[mask - 1] = v;
            let ok = masks[..at].iter().all(|&prev| {
                let (a, b) = (value[prev - 1], value[mask - 1]);
                (!dominated(prev, mask) || h.has_arc(a, b))
                    && (!dominated(mask, prev) || h.has_arc(b, a))
            }) && (!dominated(mask, mask) || h.has_arc(v, v));
            if ok && go(h, masks, at + 1, dominated, value) {
                return true;
            }
        }
        value[mask - 1] = usize::MAX;
        false
    }
    if go(h, &masks, 0, &dominated, &mut value) {
        Some(SetTable::new(n, value).expect("guarded size"))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{verify_cc_polymorphism, verify_set_polymorphism};
    use crate::testutil::{directed_cycle, random_digraph, reflexive_path};

    #[test]
    fn c3_oracle_verdicts() {
        let c3 = directed_cycle(3);
        assert!(matches!(oracle_search(&c3, OracleTarget::MinOrdering).unwrap(), None));
        match oracle_search(&c3, OracleTarget::CcPolymorphism).unwrap() {
            Some(OracleCertificate::CcPolymorphism(t)) => {
                assert!(verify_cc_polymorphism(&c3, &t))
            }
            other => panic!("expected a table, got {other:?}"),
        }
        assert!(matches!(oracle_search(&c3, OracleTarget::SetPolymorphism).unwrap(), None));
    }

    #[test]
    fn min_ordering_search_is_exhaustive_on_permutations() {
        // brute-force cross-check of the backtracking search itself
        for seed in 800..860u64 {
            let n = 1 + (seed as usize % 4);
            let h = random_digraph(n, 0.35, seed);
            let fast = search_min_ordering(&h);
            let slow = all_orders(n).into_iter().find(|o| is_min_ordering(&h, o));
            assert_eq!(fast, slow, "on {h:?}");
        }
    }

    fn all_orders(n: usize) -> Vec<Vec<usize>> {
        let mut orders = vec![];
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            orders.push(cur.clone());
            if !next_permutation(&mut cur) {
                return orders;
            }
        }
    }

    #[test]
    fn reflexive_path_has_min_ordering() {
        let h = reflexive_path(4);
        let order = search_min_ordering(&h).unwrap();
        assert!(is_min_ordering(&h, &order));
    }

    #[test]
    fn k_min_oracle_on_cycles() {
        for k in 2..=6usize {
            let ck = directed_cycle(k);
            let found = oracle_search(&ck, OracleTarget::KMinOrdering(k)).unwrap();
            assert!(found.is_some(), "C_{k} must have a {k}-min ordering");
            assert!(oracle_search(&ck, OracleTarget::MinOrdering).unwrap().is_none());
        }
        // C6 at k = 3: the labeling exists but every order fails
        assert!(oracle_search(&directed_cycle(6), OracleTarget::KMinOrdering(3))
            .unwrap()
            .is_none());
    }

    #[test]
    fn set_oracle_agrees_with_verifier() {
        for seed in 900..960u64 {
            let n = 1 + (seed as usize % 4);
            let h = random_digraph(n, 0.3, seed);
            if let Some(OracleCertificate::SetPolymorphism(t)) =
                oracle_search(&h, OracleTarget::SetPolymorphism).unwrap()
            {
                assert!(verify_set_polymorphism(&h, &t), "bad certificate on {h:?}");
            }
        }
    }

    #[test]
    fn size_guards_refuse() {
        let big = random_digraph(9, 0.2, 1);
        assert!(matches!(
            oracle_search(&big, OracleTarget::MinOrdering),
            Err(Error::OracleRefused(_))
        ));
        let big = random_digraph(5, 0.2, 2);
        assert!(matches!(
            oracle_search(&big, OracleTarget::SetPolymorphism),
            Err(Error::OracleRefused(_))
        ));
        let big = random_digraph(8, 0.2, 3);
        assert!(matches!(
            oracle_search(&big, OracleTarget::CcPolymorphism),
            Err(Error::OracleRefused(_))
        ));
    }

    #[test]
    fn cc_search_certificates_verify() {
        for seed in 1000..1080u64 {
            let n = 1 + (seed as usize % 6);
            let h = random_digraph(n, 0.3, seed);
            if let Some(OracleCertificate::CcPolymorphism(t)) =
                oracle_search(&h, OracleTarget::CcPolymorphism).unwrap()
            {
                assert!(verify_cc_polymorphism(&h, &t), "bad certificate on {h:?}");
            }
        }
    }
}
