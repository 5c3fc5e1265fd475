//! Geometric arc representations on an integer circle: two consistent
//! families of circular arcs per vertex, one around each run of poles, with
//! arc presence in the digraph equivalent to disjointness of the families.
//! Integer grid positions make every check exact.

use std::fmt::Write as _;

use crate::digraph::{CkLabeling, Digraph};
use crate::ordering::{verify_k_min_ordering, verify_min_ordering};
use crate::Error;

/// Closed circular arc on the grid circle, running clockwise from `ccw` to
/// `cw`, both endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircArc {
    pub ccw: usize,
    pub cw: usize,
}

impl CircArc {
    fn contains(&self, l: usize, pos: usize) -> bool {
        (pos + l - self.ccw) % l <= (self.cw + l - self.ccw) % l
    }

    fn intersects(&self, l: usize, other: &CircArc) -> bool {
        self.contains(l, other.ccw) || other.contains(l, self.ccw)
    }
}

/// A k-arc representation: `2k` poles in clockwise order
/// `N_0..N_{k-1}, S_0..S_{k-1}`, and for every vertex two arcs `I_v`, `J_v`.
/// Each `I_v` covers exactly one run of `k` consecutive poles ending at some
/// `N_a`, each `J_v` a run ending at some `S_b`, the families' clockwise
/// ends appear in the same cyclic vertex order, and `uv` is an arc of the
/// host exactly when `I_u` and `J_v` are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcRepresentation {
    pub k: usize,
    pub circumference: usize,
    pub n_poles: Vec<usize>,
    pub s_poles: Vec<usize>,
    pub i_arcs: Vec<CircArc>,
    pub j_arcs: Vec<CircArc>,
}

/// Builds the bi-arc representation of a verified min ordering.
///
/// Grid layout for rank `r(v)` counted from 1: the circle has circumference
/// `4(n+1)` with `N` at 0 and `S` at `2(n+1)`; `I_v` ends clockwise at
/// `2 r(v)` and extends counterclockwise to just past the clockwise end of
/// `J` of the last out-neighbour (just past `S` when there is none), and
/// `J_v` mirrors this on the other half.
pub fn build_arc_representation(
    h: &Digraph,
    order: &[usize],
) -> Result<ArcRepresentation, Error> {
    if !verify_min_ordering(h, order)? {
        return Err(Error::Contract("supplied ordering is not a min ordering".into()));
    }
    build_verified(h, &CkLabeling::trivial(h.n()), std::slice::from_ref(&order.to_vec()))
}

/// Builds the k-arc representation of a verified k-min ordering. The same
/// grid scheme is replicated per pole gap: the gap after `N_c` hosts the
/// clockwise ends of `I` for class `c`, the gap after `S_c` hosts the
/// clockwise ends of `J` for class `c+1`.
pub fn build_k_arc_representation(
    h: &Digraph,
    labeling: &CkLabeling,
    orders: &[Vec<usize>],
) -> Result<ArcRepresentation, Error> {
    if !verify_k_min_ordering(h, labeling, orders)? {
        return Err(Error::Contract("supplied orders are not a k-min ordering".into()));
    }
    build_verified(h, labeling, orders)
}

fn build_verified(
    h: &Digraph,
    labeling: &CkLabeling,
    orders: &[Vec<usize>],
) -> Result<ArcRepresentation, Error> {
    let n = h.n();
    let k = labeling.k;
    let gap = 2 * (n + 1);
    let l = 2 * k * gap;
    let n_poles: Vec<usize> = (0..k).map(|i| i * gap).collect();
    let s_poles: Vec<usize> = (0..k).map(|i| (k + i) * gap).collect();

    // rank within the own class, counted from 1
    let mut rank = vec![0usize; n];
    for order in orders {
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i + 1;
        }
    }
    let class = |v: usize| labeling.label[v];
    let cw_i = |v: usize| n_poles[class(v)] + 2 * rank[v];
    let cw_j = |v: usize| s_poles[(class(v) + k - 1) % k] + 2 * rank[v];

    let mut i_arcs = Vec::with_capacity(n);
    let mut j_arcs = Vec::with_capacity(n);
    for v in 0..n {
        let last_out = h.out_neighbors(v).iter().copied().max_by_key(|&w| rank[w]);
        let ccw_i = match last_out {
            Some(o) => cw_j(o) + 1,
            None => s_poles[class(v)] + 1,
        };
        let last_in = h.in_neighbors(v).iter().copied().max_by_key(|&w| rank[w]);
        let ccw_j = match last_in {
            Some(i) => cw_i(i) + 1,
            None => n_poles[(class(v) + k - 1) % k] + 1,
        };
        i_arcs.push(CircArc { ccw: ccw_i % l, cw: cw_i(v) });
        j_arcs.push(CircArc { ccw: ccw_j % l, cw: cw_j(v) });
    }

    let rep = ArcRepresentation { k, circumference: l, n_poles, s_poles, i_arcs, j_arcs };
    if !verify_arc_representation(h, &rep) {
        return Err(Error::Internal(format!(
            "constructed representation failed verification on digraph:\n{}",
            h.to_edge_list()
        )));
    }
    Ok(rep)
}

/// Checks pole containment, consistency of the two families' clockwise
/// orders, and the arc-iff-disjoint equivalence over all ordered vertex
/// pairs.
pub fn verify_arc_representation(h: &Digraph, rep: &ArcRepresentation) -> bool {
    let n = h.n();
    let (k, l) = (rep.k, rep.circumference);
    if k == 0
        || rep.n_poles.len() != k
        || rep.s_poles.len() != k
        || rep.i_arcs.len() != n
        || rep.j_arcs.len() != n
    {
        return false;
    }
    let ring: Vec<usize> = rep.n_poles.iter().chain(rep.s_poles.iter()).copied().collect();
    if ring.iter().any(|&p| p >= l) {
        return false;
    }
    // poles must sit in the stated clockwise order
    let base = ring[0];
    let unrolled: Vec<usize> = ring.iter().map(|&p| (p + l - base) % l).collect();
    if unrolled.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }

    // each I covers a run of k poles ending at an N pole, each J a run
    // ending at an S pole
    for v in 0..n {
        if !pole_run_ok(rep, l, &ring, &rep.i_arcs[v], true)
            || !pole_run_ok(rep, l, &ring, &rep.j_arcs[v], false)
        {
            return false;
        }
    }

    // consistent families: same cyclic order of clockwise ends
    if n > 0 {
        let by_cw = |arcs: &[CircArc]| {
            let mut vs: Vec<usize> = (0..n).collect();
            vs.sort_by_key(|&v| arcs[v].cw);
            vs
        };
        let i_seq = by_cw(&rep.i_arcs);
        let j_seq = by_cw(&rep.j_arcs);
        let mut ends: Vec<usize> = rep.i_arcs.iter().map(|a| a.cw).collect();
        ends.extend(rep.j_arcs.iter().map(|a| a.cw));
        ends.sort_unstable();
        if ends.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        let shift = j_seq.iter().position(|&v| v == i_seq[0]);
        let Some(shift) = shift else { return false };
        if (0..n).any(|t| i_seq[t] != j_seq[(shift + t) % n]) {
            return false;
        }
    }

    for u in 0..n {
        for v in 0..n {
            let disjoint = !rep.i_arcs[u].intersects(l, &rep.j_arcs[v]);
            if disjoint != h.has_arc(u, v) {
                return false;
            }
        }
    }
    true
}

fn pole_run_ok(
    rep: &ArcRepresentation,
    l: usize,
    ring: &[usize],
    arc: &CircArc,
    ends_at_north: bool,
) -> bool {
    let k = rep.k;
    let contained: Vec<usize> =
        (0..2 * k).filter(|&t| arc.contains(l, ring[t])).collect();
    if contained.len() != k {
        return false;
    }
    // contiguous on the pole ring
    let is_run = (0..2 * k).any(|start| {
        (0..k).all(|off| contained.contains(&((start + off) % (2 * k))))
    });
    if !is_run {
        return false;
    }
    // the clockwise-most contained pole: the unique contained t whose ring
    // successor is not contained
    let last = (0..2 * k).find(|&t| {
        contained.contains(&t) && !contained.contains(&((t + 1) % (2 * k)))
    });
    match last {
        Some(t) => {
            if ends_at_north {
                t < k
            } else {
                t >= k
            }
        }
        None => false,
    }
}

/// The vertex order generated by the clockwise ends of the `I` family; for a
/// one-pole-pair representation this is the min ordering it encodes.
pub fn order_from_representation(rep: &ArcRepresentation) -> Vec<usize> {
    let mut vs: Vec<usize> = (0..rep.i_arcs.len()).collect();
    vs.sort_by_key(|&v| rep.i_arcs[v].cw);
    vs
}

impl ArcRepresentation {
    /// Simple SVG rendering: poles as labeled ticks, each vertex as a pair
    /// of concentric arcs (`I` solid, `J` dashed).
    pub fn to_svg(&self) -> String {
        let n = self.i_arcs.len();
        let size = 420.0;
        let center = size / 2.0;
        let base_r = 60.0;
        let step = if n == 0 { 0.0 } else { (center - base_r - 30.0) / n as f64 };
        let angle = |pos: usize| {
            2.0 * std::f64::consts::PI * (pos as f64) / (self.circumference.max(1) as f64)
        };
        let point = |pos: usize, r: f64| {
            let a = angle(pos);
            (center + r * a.cos(), center + r * a.sin())
        };
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        );
        let _ = writeln!(
            svg,
            "  <circle cx=\"{center}\" cy=\"{center}\" r=\"{:.1}\" fill=\"none\" stroke=\"#ccc\"/>",
            center - 20.0
        );
        for (label, poles) in [("N", &self.n_poles), ("S", &self.s_poles)] {
            for (i, &pos) in poles.iter().enumerate() {
                let (x, y) = point(pos, center - 20.0);
                let _ = writeln!(svg, "  <circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"#000\"/>");
                let (tx, ty) = point(pos, center - 8.0);
                let _ = writeln!(
                    svg,
                    "  <text x=\"{tx:.1}\" y=\"{ty:.1}\" font-size=\"10\" text-anchor=\"middle\">{label}{i}</text>"
                );
            }
        }
        for v in 0..n {
            let r = base_r + v as f64 * step;
            for (arc, color, dash) in [
                (&self.i_arcs[v], "#1f77b4", ""),
                (&self.j_arcs[v], "#d62728", " stroke-dasharray=\"4 3\""),
            ] {
                let span = (arc.cw + self.circumference - arc.ccw) % self.circumference;
                let large = if span * 2 > self.circumference { 1 } else { 0 };
                let (x0, y0) = point(arc.ccw, r);
                let (x1, y1) = point(arc.cw, r);
                let _ = writeln!(
                    svg,
                    "  <path d=\"M {x0:.1} {y0:.1} A {r:.1} {r:.1} 0 {large} 1 {x1:.1} {y1:.1}\" fill=\"none\" stroke=\"{color}\"{dash}/>"
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}
