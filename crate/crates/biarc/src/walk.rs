//! Walks with explicit step directions, their net length and constriction,
//! congruence and avoidance, and common pre-images of constricted walks.
//!
//! Directions are stored explicitly rather than inferred from the arc set:
//! digons make direction ambiguous.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::Error;

/// Direction of a single walk step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Forward,
    Backward,
}

impl Step {
    pub fn flip(self) -> Step {
        match self {
            Step::Forward => Step::Backward,
            Step::Backward => Step::Forward,
        }
    }

    fn to_char(self) -> char {
        match self {
            Step::Forward => 'F',
            Step::Backward => 'B',
        }
    }

    fn from_char(c: char) -> Option<Step> {
        match c {
            'F' => Some(Step::Forward),
            'B' => Some(Step::Backward),
            _ => None,
        }
    }
}

/// A walk `v_0 .. v_m` together with the direction of each of its `m` steps.
/// A forward step at `i` traverses the arc `v_i -> v_{i+1}`, a backward step
/// the arc `v_{i+1} -> v_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    vertices: Vec<usize>,
    dirs: Vec<Step>,
}

impl Walk {
    pub fn new(vertices: Vec<usize>, dirs: Vec<Step>) -> Result<Self, Error> {
        if vertices.is_empty() {
            return Err(Error::Contract("a walk has at least one vertex".into()));
        }
        if dirs.len() + 1 != vertices.len() {
            return Err(Error::Contract(format!(
                "walk with {} vertices needs {} step directions, got {}",
                vertices.len(),
                vertices.len() - 1,
                dirs.len()
            )));
        }
        Ok(Walk { vertices, dirs })
    }

    pub fn single(v: usize) -> Self {
        Walk { vertices: vec![v], dirs: Vec::new() }
    }

    pub fn push_step(&mut self, dir: Step, next: usize) {
        self.dirs.push(dir);
        self.vertices.push(next);
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dirs(&self) -> &[Step] {
        &self.dirs
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    /// Checks every step against the host's arc set.
    pub fn validate_in(&self, h: &Digraph) -> Result<(), Error> {
        for (i, &dir) in self.dirs.iter().enumerate() {
            let (a, b) = (self.vertices[i], self.vertices[i + 1]);
            let ok = match dir {
                Step::Forward => a < h.n() && b < h.n() && h.has_arc(a, b),
                Step::Backward => a < h.n() && b < h.n() && h.has_arc(b, a),
            };
            if !ok {
                return Err(Error::Contract(format!(
                    "step {i} ({a} {dir:?} {b}) is not backed by an arc"
                )));
            }
        }
        Ok(())
    }

    /// Forward steps minus backward steps.
    pub fn net_length(&self) -> i64 {
        self.dirs
            .iter()
            .map(|d| match d {
                Step::Forward => 1i64,
                Step::Backward => -1i64,
            })
            .sum()
    }

    /// Net lengths of the prefixes with 1..=m steps.
    pub fn prefix_nets(&self) -> Vec<i64> {
        let mut acc = 0;
        self.dirs
            .iter()
            .map(|d| {
                acc += match d {
                    Step::Forward => 1,
                    Step::Backward => -1,
                };
                acc
            })
            .collect()
    }

    pub fn reverse(&self) -> Walk {
        Walk {
            vertices: self.vertices.iter().rev().copied().collect(),
            dirs: self.dirs.iter().rev().map(|d| d.flip()).collect(),
        }
    }

    /// Concatenation; the other walk must start where this one ends.
    pub fn concat(&self, other: &Walk) -> Result<Walk, Error> {
        if self.last() != other.first() {
            return Err(Error::Contract(format!(
                "cannot concatenate: walk ends at {} but next starts at {}",
                self.last(),
                other.first()
            )));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut dirs = self.dirs.clone();
        dirs.extend_from_slice(&other.dirs);
        Ok(Walk { vertices, dirs })
    }
}

/// Serialized form: `{"vertices": [...], "dirs": "FBF..."}`.
#[derive(Serialize, Deserialize)]
struct WalkRepr {
    vertices: Vec<usize>,
    dirs: String,
}

impl Serialize for Walk {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        WalkRepr {
            vertices: self.vertices.clone(),
            dirs: self.dirs.iter().map(|d| d.to_char()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Walk {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = WalkRepr::deserialize(de)?;
        let dirs = repr
            .dirs
            .chars()
            .map(Step::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| serde::de::Error::custom("dirs must be a string over {F, B}"))?;
        Walk::new(repr.vertices, dirs).map_err(serde::de::Error::custom)
    }
}

/// Which constriction bound to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstrictionSide {
    Below,
    Above,
    Both,
}

/// Tests whether every proper nonempty prefix of `w` keeps its net length
/// within the constriction bounds: at least 0 from below (strictly positive
/// when `strict`), at most the total net length from above (strictly below
/// it when `strict`).
///
/// Callers pass the reverse walk when the net length is negative.
pub fn is_constricted(w: &Walk, side: ConstrictionSide, strict: bool) -> Result<bool, Error> {
    let k = w.net_length();
    if k < 0 {
        return Err(Error::Contract(
            "constriction is defined on walks of non-negative net length; pass the reverse walk"
                .into(),
        ));
    }
    let nets = w.prefix_nets();
    let proper = &nets[..nets.len().saturating_sub(1)];
    let below = |v: i64| if strict { v > 0 } else { v >= 0 };
    let above = |v: i64| if strict { v < k } else { v <= k };
    let ok = match side {
        ConstrictionSide::Below => proper.iter().all(|&v| below(v)),
        ConstrictionSide::Above => proper.iter().all(|&v| above(v)),
        ConstrictionSide::Both => proper.iter().all(|&v| below(v) && above(v)),
    };
    Ok(ok)
}

/// Two walks are congruent when they follow the same pattern of forward and
/// backward steps.
pub fn is_congruent(p: &Walk, q: &Walk) -> bool {
    p.dirs == q.dirs
}

/// `p` avoids `q` when no step admits the faithful cross arc: for a forward
/// step `i` the arc `p_i -> q_{i+1}`, for a backward step the arc
/// `q_{i+1} -> p_i`.
pub fn avoids(h: &Digraph, p: &Walk, q: &Walk) -> Result<bool, Error> {
    if !is_congruent(p, q) {
        return Err(Error::Contract("avoidance is defined on congruent walks".into()));
    }
    for (i, &dir) in p.dirs.iter().enumerate() {
        let faithful = match dir {
            Step::Forward => h.has_arc(p.vertices[i], q.vertices[i + 1]),
            Step::Backward => h.has_arc(q.vertices[i + 1], p.vertices[i]),
        };
        if faithful {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A direction template together with monotone-ish index maps that replay it
/// inside each of the two source walks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageTemplate {
    pub steps: Vec<Step>,
    /// Position in the first walk's vertex sequence for each template index.
    pub map1: Vec<usize>,
    /// Same for the second walk.
    pub map2: Vec<usize>,
}

impl PreimageTemplate {
    pub fn replay1(&self, p1: &Walk) -> Walk {
        replay(p1, &self.map1, &self.steps)
    }

    pub fn replay2(&self, p2: &Walk) -> Walk {
        replay(p2, &self.map2, &self.steps)
    }
}

fn replay(w: &Walk, map: &[usize], steps: &[Step]) -> Walk {
    let vertices = map.iter().map(|&i| w.vertices()[i]).collect();
    Walk { vertices, dirs: steps.to_vec() }
}

/// Common pre-image of two constricted walks of equal net length `r >= 0`:
/// a template walk of net length `r`, itself constricted, that replays into
/// both inputs from first vertex to last.
///
/// Shortest-path search over pairs of positions with equal prefix height;
/// the template length is bounded by the product of the vertex counts, and
/// exceeding that bound is reported as an error.
pub fn common_preimage(p1: &Walk, p2: &Walk) -> Result<PreimageTemplate, Error> {
    let r = p1.net_length();
    if r != p2.net_length() {
        return Err(Error::Contract(format!(
            "common pre-image needs equal net lengths, got {r} and {}",
            p2.net_length()
        )));
    }
    if r < 0 {
        return Err(Error::Contract("common pre-image needs non-negative net length".into()));
    }
    if !is_constricted(p1, ConstrictionSide::Both, false)?
        || !is_constricted(p2, ConstrictionSide::Both, false)?
    {
        return Err(Error::Contract("common pre-image needs constricted inputs".into()));
    }

    let (m1, m2) = (p1.len(), p2.len());
    // height profile of each walk
    let h1: Vec<i64> = std::iter::once(0).chain(p1.prefix_nets()).collect();
    let h2: Vec<i64> = std::iter::once(0).chain(p2.prefix_nets()).collect();

    // step direction when moving between adjacent positions
    let eff = |w: &Walk, from: usize, to: usize| -> Step {
        if to == from + 1 {
            w.dirs()[from]
        } else {
            w.dirs()[to].flip()
        }
    };

    let start = (0usize, 0usize);
    let goal = (m1, m2);
    let mut prev: HashMap<(usize, usize), ((usize, usize), Step)> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([start]);
    let mut seen = vec![false; (m1 + 1) * (m2 + 1)];
    seen[0] = true;
    'bfs: while let Some((i, j)) = queue.pop_front() {
        for (ni, nj) in [
            (i + 1, j + 1),
            (i + 1, j.wrapping_sub(1)),
            (i.wrapping_sub(1), j + 1),
            (i.wrapping_sub(1), j.wrapping_sub(1)),
        ] {
            if ni > m1 || nj > m2 || seen[ni * (m2 + 1) + nj] || h1[ni] != h2[nj] {
                continue;
            }
            let d1 = eff(p1, i, ni);
            if d1 != eff(p2, j, nj) {
                continue;
            }
            seen[ni * (m2 + 1) + nj] = true;
            prev.insert((ni, nj), ((i, j), d1));
            if (ni, nj) == goal {
                break 'bfs;
            }
            queue.push_back((ni, nj));
        }
    }

    if start != goal && !prev.contains_key(&goal) {
        return Err(Error::Internal(
            "no common pre-image found for constricted walks of equal net length".into(),
        ));
    }

    let mut steps = Vec::new();
    let mut map1 = vec![m1];
    let mut map2 = vec![m2];
    let mut cur = goal;
    while cur != start {
        let (p, d) = prev[&cur];
        steps.push(d);
        map1.push(p.0);
        map2.push(p.1);
        cur = p;
    }
    steps.reverse();
    map1.reverse();
    map2.reverse();

    if steps.len() > p1.vertices().len() * p2.vertices().len() {
        return Err(Error::Internal(format!(
            "common pre-image of length {} exceeds the {} bound",
            steps.len(),
            p1.vertices().len() * p2.vertices().len()
        )));
    }
    Ok(PreimageTemplate { steps, map1, map2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(vertices: &[usize], dirs: &[Step]) -> Walk {
        Walk::new(vertices.to_vec(), dirs.to_vec()).unwrap()
    }

    fn dirs_only(dirs: &[Step]) -> Walk {
        // hosts vertices 0..len on an abstract walk; fine for direction-only ops
        let mut vs = vec![0usize];
        for (i, _) in dirs.iter().enumerate() {
            vs.push(i + 1);
        }
        Walk::new(vs, dirs.to_vec()).unwrap()
    }

    use Step::{Backward as B, Forward as F};

    #[test]
    fn net_length_examples() {
        assert_eq!(dirs_only(&[F, F, F]).net_length(), 3);
        assert_eq!(Walk::single(0).net_length(), 0);
        assert_eq!(dirs_only(&[F, B, F]).net_length(), 1);
    }

    #[test]
    fn constriction_examples() {
        let w = dirs_only(&[F, B, F]);
        assert!(is_constricted(&w, ConstrictionSide::Both, false).unwrap());
        let w = dirs_only(&[B, F, F]);
        assert!(!is_constricted(&w, ConstrictionSide::Below, false).unwrap());
        // prefixes reach 2 > k and the first prefix already equals k = 1
        let w = dirs_only(&[F, F, B]);
        assert!(!is_constricted(&w, ConstrictionSide::Above, true).unwrap());
    }

    #[test]
    fn constriction_rejects_negative_net() {
        let w = dirs_only(&[B]);
        assert!(matches!(
            is_constricted(&w, ConstrictionSide::Both, false),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn congruence_examples() {
        assert!(is_congruent(&dirs_only(&[F, B]), &dirs_only(&[F, B])));
        assert!(!is_congruent(&dirs_only(&[F]), &dirs_only(&[B])));
        assert!(!is_congruent(&dirs_only(&[F, F]), &dirs_only(&[F])));
    }

    #[test]
    fn avoids_on_directed_triangle() {
        let c3 = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        // p = 0->1, q = 1->2: the faithful arc would be 0->2, absent
        let p = walk(&[0, 1], &[F]);
        let q = walk(&[1, 2], &[F]);
        assert!(avoids(&c3, &p, &q).unwrap());
        // p = 0->1, q = 2->0: faithful arc 0->0 absent
        let q = walk(&[2, 0], &[F]);
        assert!(avoids(&c3, &p, &q).unwrap());
    }

    #[test]
    fn avoids_negative_case() {
        let h = Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = walk(&[0, 1], &[F]);
        let q = walk(&[1, 2], &[F]);
        assert!(!avoids(&h, &p, &q).unwrap());
    }

    #[test]
    fn avoids_requires_congruence() {
        let h = Digraph::new(2, [(0, 1)]).unwrap();
        let p = walk(&[0, 1], &[F]);
        let q = walk(&[1, 0], &[B]);
        assert!(matches!(avoids(&h, &p, &q), Err(Error::Contract(_))));
    }

    #[test]
    fn preimage_identical_inputs() {
        let p = walk(&[0, 1, 2], &[F, F]);
        let t = common_preimage(&p, &p).unwrap();
        assert_eq!(t.steps, vec![F, F]);
        assert_eq!(t.map1, vec![0, 1, 2]);
        assert_eq!(t.map2, vec![0, 1, 2]);
    }

    #[test]
    fn preimage_zigzag() {
        // p1 = a0 -> a1, p2 = b0 -> b1 <- b2 -> b3 over an arbitrary host
        let p1 = walk(&[0, 1], &[F]);
        let p2 = walk(&[2, 3, 2, 3], &[F, B, F]);
        let t = common_preimage(&p1, &p2).unwrap();
        assert_eq!(t.steps, vec![F, B, F]);
        assert_eq!(t.map1, vec![0, 1, 0, 1]); // replays as a0 a1 a0 a1
        assert_eq!(t.map2, vec![0, 1, 2, 3]);

        // symmetric version
        let t = common_preimage(&p2, &p1).unwrap();
        assert_eq!(t.steps, vec![F, B, F]);
        assert_eq!(t.map2, vec![0, 1, 0, 1]);
    }

    #[test]
    fn preimage_replay_is_valid_walk() {
        let h = Digraph::new(4, [(0, 1), (2, 1), (2, 3)]).unwrap();
        let p1 = walk(&[0, 1], &[F]);
        let p2 = walk(&[0, 1, 2, 3], &[F, B, F]);
        p1.validate_in(&h).unwrap();
        p2.validate_in(&h).unwrap();
        let t = common_preimage(&p1, &p2).unwrap();
        let r1 = t.replay1(&p1);
        let r2 = t.replay2(&p2);
        r1.validate_in(&h).unwrap();
        r2.validate_in(&h).unwrap();
        assert_eq!(r1.first(), p1.first());
        assert_eq!(r1.last(), p1.last());
        assert_eq!(r2.first(), p2.first());
        assert_eq!(r2.last(), p2.last());
        assert!(is_constricted(&r1, ConstrictionSide::Both, false).unwrap());
        assert_eq!(r1.net_length(), p1.net_length());
    }

    #[test]
    fn walk_json_round_trip() {
        let w = walk(&[0, 1, 0], &[F, B]);
        let js = serde_json::to_string(&w).unwrap();
        assert_eq!(js, r#"{"vertices":[0,1,0],"dirs":"FB"}"#);
        let back: Walk = serde_json::from_str(&js).unwrap();
        assert_eq!(back, w);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Random constricted walk of net length `r` with `extra` zigzag
        /// pairs, realized over a complete reflexive host so every step is
        /// backed by an arc.
        fn constricted_walk(r: i64, extra: usize, seed: u64) -> Walk {
            let mut heights = vec![0i64];
            let mut rng = seed;
            let mut next = || {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (rng >> 33) as usize
            };
            let mut remaining_up = r + extra as i64;
            let mut remaining_down = extra as i64;
            while remaining_up > 0 || remaining_down > 0 {
                let h = *heights.last().unwrap();
                let can_up = remaining_up > 0 && h < r;
                let can_down = remaining_down > 0 && h > 0 && remaining_up >= remaining_down;
                let up = if can_up && can_down { next() % 2 == 0 } else { can_up };
                if up {
                    heights.push(h + 1);
                    remaining_up -= 1;
                } else if can_down {
                    heights.push(h - 1);
                    remaining_down -= 1;
                } else {
                    // stuck at a bound; force the only legal move
                    heights.push(h + 1);
                    remaining_up -= 1;
                }
            }
            let dirs: Vec<Step> = heights
                .windows(2)
                .map(|w| if w[1] > w[0] { Step::Forward } else { Step::Backward })
                .collect();
            let n = 4;
            let mut vs = vec![next() % n];
            for _ in &dirs {
                vs.push(next() % n);
            }
            Walk::new(vs, dirs).unwrap()
        }

        proptest! {
            #[test]
            fn net_length_of_reverse_negates(dirs in proptest::collection::vec(prop_oneof![Just(F), Just(B)], 0..12)) {
                let w = dirs_only(&dirs);
                prop_assert_eq!(w.net_length() + w.reverse().net_length(), 0);
            }

            #[test]
            fn concat_adds_net_lengths(
                d1 in proptest::collection::vec(prop_oneof![Just(F), Just(B)], 0..8),
                d2 in proptest::collection::vec(prop_oneof![Just(F), Just(B)], 0..8),
            ) {
                let mut v1 = vec![7usize];
                v1.extend(d1.iter().enumerate().map(|(i, _)| i));
                let p = Walk::new(v1, d1.clone()).unwrap();
                let mut v2 = vec![p.last()];
                v2.extend(d2.iter().enumerate().map(|(i, _)| i + 100));
                let q = Walk::new(v2, d2.clone()).unwrap();
                let cat = p.concat(&q).unwrap();
                prop_assert_eq!(cat.net_length(), p.net_length() + q.net_length());
            }

            #[test]
            fn preimage_replays_into_both_inputs(r in 1i64..4, e1 in 0usize..3, e2 in 0usize..3, seed in 0u64..500) {
                let complete = Digraph::new(4, (0..4).flat_map(|u| (0..4).map(move |v| (u, v)))).unwrap();
                let p1 = constricted_walk(r, e1, seed);
                let p2 = constricted_walk(r, e2, seed.wrapping_add(1));
                p1.validate_in(&complete).unwrap();
                p2.validate_in(&complete).unwrap();
                let t = common_preimage(&p1, &p2).unwrap();
                prop_assert!(t.steps.len() <= p1.vertices().len() * p2.vertices().len());
                for (replayed, src) in [(t.replay1(&p1), &p1), (t.replay2(&p2), &p2)] {
                    replayed.validate_in(&complete).unwrap();
                    prop_assert_eq!(replayed.first(), src.first());
                    prop_assert_eq!(replayed.last(), src.last());
                    prop_assert_eq!(replayed.net_length(), r);
                    prop_assert!(is_constricted(&replayed, ConstrictionSide::Both, false).unwrap());
                }
            }
        }
    }
}
