//! The pair digraph: signed arcs over ordered vertex pairs, strong
//! components and their condensation, balance classification, and levels of
//! the balanced part.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::digraph::{CkLabeling, Digraph};
use crate::Error;

/// Digraph on ordered pairs of distinct host vertices. A positive arc
/// `(x,y) -> (x',y')` records `xx', yy'` arcs of the host with `xy'` absent;
/// a negative arc records `x'x, y'y` present with `y'x` absent. Parallel
/// arcs of opposite sign are kept as two arcs.
///
/// Restricting to a subset of the pairs (for the k-min machinery) keeps the
/// same host but a smaller active pair set.
#[derive(Clone, Debug)]
pub struct PairDigraph {
    n: usize,
    pairs: Vec<(usize, usize)>,
    index_of: Vec<u32>,
    out: Vec<Vec<(u32, i8)>>,
    inn: Vec<Vec<(u32, i8)>>,
    arc_count: usize,
}

const NO_PAIR: u32 = u32::MAX;

impl PairDigraph {
    fn with_pairs(n: usize, pairs: Vec<(usize, usize)>) -> Self {
        let mut index_of = vec![NO_PAIR; n * n];
        for (i, &(x, y)) in pairs.iter().enumerate() {
            index_of[x * n + y] = i as u32;
        }
        let len = pairs.len();
        PairDigraph {
            n,
            pairs,
            index_of,
            out: vec![Vec::new(); len],
            inn: vec![Vec::new(); len],
            arc_count: 0,
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, sign: i8) {
        self.out[from].push((to as u32, sign));
        self.inn[to].push((from as u32, sign));
        self.arc_count += 1;
    }

    pub fn host_n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, id: usize) -> (usize, usize) {
        self.pairs[id]
    }

    pub fn pair_index(&self, x: usize, y: usize) -> Option<usize> {
        if x >= self.n || y >= self.n {
            return None;
        }
        match self.index_of[x * self.n + y] {
            NO_PAIR => None,
            i => Some(i as usize),
        }
    }

    /// Index of the reversed pair; always present since the active pair set
    /// is closed under reversal.
    pub fn rev_index(&self, id: usize) -> usize {
        let (x, y) = self.pairs[id];
        self.pair_index(y, x).expect("pair set is closed under reversal")
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn out_arcs(&self, id: usize) -> &[(u32, i8)] {
        &self.out[id]
    }

    pub fn in_arcs(&self, id: usize) -> &[(u32, i8)] {
        &self.inn[id]
    }

    /// Pairs reachable from `start` by directed arcs.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.pairs.len()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.out[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        seen
    }

    /// Pairs that can reach `start`.
    pub fn reaching(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.pairs.len()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.inn[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        seen
    }

    /// Structural symmetry of the construction: an arc `(x,y) -> (x',y')` of
    /// sign `s` always coexists with the arc `(y',x') -> (y,x)` of sign `-s`.
    pub fn verify_skew(&self) -> bool {
        for (from, arcs) in self.out.iter().enumerate() {
            let (x, y) = self.pairs[from];
            for &(to, sign) in arcs {
                let (xp, yp) = self.pairs[to as usize];
                let (Some(a), Some(b)) = (self.pair_index(yp, xp), self.pair_index(y, x)) else {
                    return false;
                };
                if !self.out[a].contains(&(b as u32, -sign)) {
                    return false;
                }
            }
        }
        true
    }

    /// Debug dump: JSON array of `{"from":[x,y],"to":[u,v],"sign":±1}`.
    pub fn to_debug_json(&self) -> String {
        let mut items = Vec::new();
        for (from, arcs) in self.out.iter().enumerate() {
            let (x, y) = self.pairs[from];
            for &(to, sign) in arcs {
                let (u, v) = self.pairs[to as usize];
                let mut s = String::new();
                let _ = write!(s, r#"{{"from":[{x},{y}],"to":[{u},{v}],"sign":{sign}}}"#);
                items.push(s);
            }
        }
        format!("[{}]", items.join(","))
    }
}

/// Builds the pair digraph of `h` on all ordered pairs of distinct vertices.
pub fn build_pair_digraph(h: &Digraph) -> PairDigraph {
    let n = h.n();
    let mut pairs = Vec::with_capacity(n.saturating_mul(n.saturating_sub(1)));
    for x in 0..n {
        for y in 0..n {
            if x != y {
                pairs.push((x, y));
            }
        }
    }
    let mut p = PairDigraph::with_pairs(n, pairs);
    let arcs = h.arcs();
    // positive: (x,y) -> (x',y') with xx', yy' arcs and xy' absent
    for &(x, xp) in arcs {
        for &(y, yp) in arcs {
            if x != y && xp != yp && !h.has_arc(x, yp) {
                let from = p.pair_index(x, y).unwrap();
                let to = p.pair_index(xp, yp).unwrap();
                p.add_arc(from, to, 1);
            }
        }
    }
    // negative: (x,y) -> (x',y') with x'x, y'y arcs and y'x absent
    for &(xp, x) in arcs {
        for &(yp, y) in arcs {
            if x != y && xp != yp && !h.has_arc(yp, x) {
                let from = p.pair_index(x, y).unwrap();
                let to = p.pair_index(xp, yp).unwrap();
                p.add_arc(from, to, -1);
            }
        }
    }
    p
}

/// Subgraph induced by the pairs whose coordinates share a label class.
pub fn restrict_to_hk(p: &PairDigraph, lab: &CkLabeling) -> PairDigraph {
    let keep: Vec<(usize, usize)> = p
        .pairs
        .iter()
        .copied()
        .filter(|&(x, y)| lab.label[x] == lab.label[y])
        .collect();
    let mut r = PairDigraph::with_pairs(p.n, keep);
    for (from, arcs) in p.out.iter().enumerate() {
        let (x, y) = p.pairs[from];
        let Some(nf) = r.pair_index(x, y) else { continue };
        for &(to, sign) in arcs {
            let (u, v) = p.pairs[to as usize];
            if let Some(nt) = r.pair_index(u, v) {
                r.add_arc(nf, nt, sign);
            }
        }
    }
    r
}

/// Strong components, their condensation, balance flags, potentials on
/// balanced components, and levels of the balanced pairs.
#[derive(Clone, Debug)]
pub struct SccInfo {
    /// Pair id -> component id, in reverse topological condensation order
    /// (component 0 has no outgoing condensation edges).
    pub comp: Vec<usize>,
    pub comp_count: usize,
    /// Component id -> member pair ids, ascending.
    pub members: Vec<Vec<usize>>,
    /// Condensation successors per component id.
    pub condensation: Vec<BTreeSet<usize>>,
    /// Component id -> every closed directed walk inside has net value zero.
    pub balanced: Vec<bool>,
    /// Pair id -> potential, defined on pairs of balanced components.
    pub potential: Vec<Option<i64>>,
    /// Pair id -> level, defined on balanced pairs; each weak component of
    /// the balanced part is normalized to minimum level 0.
    pub level: Vec<Option<i64>>,
    /// Pair id -> weak component id of the balanced part.
    pub hstar_comp: Vec<Option<usize>>,
}

/// Tarjan's algorithm, iterative. Component ids come out in reverse
/// topological order of the condensation.
pub fn strong_components(p: &PairDigraph) -> SccInfo {
    let n = p.pair_count();
    let mut comp = vec![usize::MAX; n];
    let mut comp_count = 0usize;
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0u32;
    // (vertex, next out-arc position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != u32::MAX {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&(w, _)) = p.out[v].get(*ei) {
                *ei += 1;
                let w = w as usize;
                if index[w] == u32::MAX {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }

    let mut members = vec![Vec::new(); comp_count];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut condensation = vec![BTreeSet::new(); comp_count];
    for (v, arcs) in p.out.iter().enumerate() {
        for &(w, _) in arcs {
            let (a, b) = (comp[v], comp[w as usize]);
            if a != b {
                condensation[a].insert(b);
            }
        }
    }

    SccInfo {
        comp,
        comp_count,
        members,
        condensation,
        balanced: Vec::new(),
        potential: vec![None; n],
        level: vec![None; n],
        hstar_comp: vec![None; n],
    }
}

/// Fills the balance flags and, for balanced components, a potential
/// assignment consistent with the arc signs.
pub fn classify_balance(p: &PairDigraph, s: &mut SccInfo) {
    s.balanced = vec![true; s.comp_count];
    let mut pot = vec![None::<i64>; p.pair_count()];
    for c in 0..s.comp_count {
        let root = s.members[c][0];
        pot[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        let mut ok = true;
        while let Some(v) = queue.pop_front() {
            let base = pot[v].unwrap();
            for &(w, sign) in &p.out[v] {
                let w = w as usize;
                if s.comp[w] != c {
                    continue;
                }
                let expect = base + sign as i64;
                match pot[w] {
                    None => {
                        pot[w] = Some(expect);
                        queue.push_back(w);
                    }
                    Some(have) if have != expect => ok = false,
                    _ => {}
                }
            }
            for &(w, sign) in &p.inn[v] {
                let w = w as usize;
                if s.comp[w] != c {
                    continue;
                }
                let expect = base - sign as i64;
                match pot[w] {
                    None => {
                        pot[w] = Some(expect);
                        queue.push_back(w);
                    }
                    Some(have) if have != expect => ok = false,
                    _ => {}
                }
            }
        }
        s.balanced[c] = ok;
        if !ok {
            for &v in &s.members[c] {
                pot[v] = None;
            }
        }
    }
    s.potential = pot;
}

/// Assigns levels to the balanced pairs: along every arc of the balanced
/// part the level steps by the arc sign, and each weak component is shifted
/// so its minimum level is 0.
///
/// Parallel arcs of opposite sign between balanced pairs make the level
/// constraints unsatisfiable; when that happens an internal error reports
/// the first conflicting pair. The ordering builder avoids this by leveling
/// only the pairs still undecided after its first phase.
pub fn compute_levels(p: &PairDigraph, s: &mut SccInfo) -> Result<(), Error> {
    if s.balanced.len() != s.comp_count {
        return Err(Error::Contract("classify_balance must run before compute_levels".into()));
    }
    let alive: Vec<bool> = (0..p.pair_count()).map(|v| s.balanced[s.comp[v]]).collect();
    let (level, wc) = levels_over(p, &alive)?;
    s.level = level;
    s.hstar_comp = wc;
    Ok(())
}

/// Level assignment over the sub-digraph induced by `alive` pairs.
///
/// Parallel arcs of both signs between the same two pairs cannot step the
/// level by +1 and -1 at once; such a pair of arcs collapses to a
/// level-equality constraint, which keeps the coupled pairs in one
/// processing sweep where the source rules decide their orientation.
pub(crate) fn levels_over(
    p: &PairDigraph,
    alive: &[bool],
) -> Result<(Vec<Option<i64>>, Vec<Option<usize>>), Error> {
    let n = p.pair_count();
    let mut level = vec![None::<i64>; n];
    let mut wc = vec![None::<usize>; n];
    let mut wc_count = 0usize;

    // aggregated level deltas per alive pair: (neighbor, level difference)
    let mut deltas: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for v in 0..n {
        if !alive[v] {
            continue;
        }
        let mut by_target: std::collections::BTreeMap<usize, (bool, bool)> =
            std::collections::BTreeMap::new();
        for &(w, sign) in &p.out[v] {
            let w = w as usize;
            if alive[w] {
                let e = by_target.entry(w).or_default();
                if sign > 0 {
                    e.0 = true;
                } else {
                    e.1 = true;
                }
            }
        }
        for (w, (plus, minus)) in by_target {
            let delta = match (plus, minus) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => -1,
                (false, false) => unreachable!(),
            };
            deltas[v].push((w, delta));
            deltas[w].push((v, -delta));
        }
    }

    for start in 0..n {
        if !alive[start] || level[start].is_some() {
            continue;
        }
        let id = wc_count;
        wc_count += 1;
        level[start] = Some(0);
        wc[start] = Some(id);
        let mut min_level = 0i64;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let base = level[v].unwrap();
            for &(w, delta) in &deltas[v] {
                let expect = base + delta;
                match level[w] {
                    None => {
                        level[w] = Some(expect);
                        wc[w] = Some(id);
                        min_level = min_level.min(expect);
                        members.push(w);
                        queue.push_back(w);
                    }
                    Some(have) if have != expect => {
                        return Err(Error::Internal(format!(
                            "unsatisfiable level constraints at pair {:?}: {have} vs {expect}",
                            p.pair(w)
                        )))
                    }
                    _ => {}
                }
            }
        }
        for &v in &members {
            level[v] = Some(level[v].unwrap() - min_level);
        }
    }
    Ok((level, wc))
}

/// Component holding the reversed pairs of `c`. Errors when `c` contains an
/// invertible pair, i.e. is its own dual.
pub fn dual_component(p: &PairDigraph, s: &SccInfo, c: usize) -> Result<usize, Error> {
    let rep = *s.members[c]
        .first()
        .ok_or_else(|| Error::Contract(format!("component {c} out of range")))?;
    let dual = s.comp[p.rev_index(rep)];
    if dual == c {
        return Err(Error::Contract(format!(
            "component {c} contains an invertible pair; it has no distinct dual"
        )));
    }
    debug_assert!(s.members[c].iter().all(|&v| s.comp[p.rev_index(v)] == dual));
    Ok(dual)
}
