#![allow(dead_code)]

//! Shared oracles for the integration tests. Everything in here is
//! deliberately written against the raw definitions, independent of the
//! code paths it is used to check.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayforest::graph::{EdgeId, EdgeSet, MultiGraph};

/// Subset-by-subset acyclicity test via DFS, independent of the
/// union-find in the library.
pub fn oracle_is_acyclic(g: &MultiGraph, sub: &EdgeSet) -> bool {
    let edges: Vec<_> = g.edges().iter().filter(|e| sub.contains(&e.id)).collect();
    if edges.iter().any(|e| e.is_loop()) {
        return false;
    }
    // A graph is a forest iff every connected piece has |V| = |E| + 1.
    let mut seen_edges: BTreeSet<usize> = BTreeSet::new();
    let mut seen_vertices: BTreeSet<u32> = BTreeSet::new();
    for (start, e) in edges.iter().enumerate() {
        if seen_edges.contains(&start) {
            continue;
        }
        let mut stack = vec![e.u];
        let mut comp_vertices: BTreeSet<u32> = BTreeSet::new();
        let mut comp_edges: BTreeSet<usize> = BTreeSet::new();
        while let Some(v) = stack.pop() {
            if !comp_vertices.insert(v) {
                continue;
            }
            for (i, x) in edges.iter().enumerate() {
                if x.u == v || x.v == v {
                    comp_edges.insert(i);
                    stack.push(x.other_end(v));
                }
            }
        }
        if comp_edges.len() + 1 != comp_vertices.len() {
            return false;
        }
        seen_edges.extend(comp_edges);
        seen_vertices.extend(comp_vertices);
    }
    true
}

/// A nonempty edge set is a simple cycle iff every incident vertex has
/// degree exactly two within the set and the set is connected.
pub fn oracle_is_cycle(g: &MultiGraph, sub: &EdgeSet) -> bool {
    if sub.is_empty() {
        return false;
    }
    let edges: Vec<_> = g.edges().iter().filter(|e| sub.contains(&e.id)).collect();
    let mut verts: BTreeSet<u32> = BTreeSet::new();
    for e in &edges {
        verts.insert(e.u);
        verts.insert(e.v);
    }
    for &v in &verts {
        let deg: usize = edges
            .iter()
            .map(|e| (e.u == v) as usize + (e.v == v) as usize)
            .sum();
        if deg != 2 {
            return false;
        }
    }
    // Connectivity over the sub-edges.
    let mut stack = vec![*verts.iter().next().unwrap()];
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        for e in &edges {
            if e.u == v || e.v == v {
                stack.push(e.other_end(v));
            }
        }
    }
    seen == verts
}

/// All simple cycles by filtering every edge subset through
/// [`oracle_is_cycle`].
pub fn oracle_all_cycles(g: &MultiGraph) -> Vec<EdgeSet> {
    let ids = g.edge_ids();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << ids.len()) {
        let sub: EdgeSet = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, id)| id.clone())
            .collect();
        if oracle_is_cycle(g, &sub) {
            out.push(sub);
        }
    }
    out.sort();
    out
}

/// Outer/inner index family straight from the definitions, one subset
/// at a time: outer sets are subsets of `E − pins` inside a cycle
/// through the pins; inner sets are forests whose union with the pins
/// contains exactly one cycle, which must contain outer ∪ pins.
pub fn oracle_index_family(
    g: &MultiGraph,
    pins: &[EdgeId],
    outer_nonempty: bool,
) -> Vec<(EdgeSet, Vec<(EdgeSet, EdgeSet)>)> {
    let cycles = oracle_all_cycles(g);
    let pin_set: EdgeSet = pins.iter().cloned().collect();
    let rest: Vec<EdgeId> = g
        .edge_ids()
        .into_iter()
        .filter(|x| !pin_set.contains(x))
        .collect();
    let mut outers: Vec<EdgeSet> = Vec::new();
    for mask in 0u64..(1u64 << rest.len()) {
        let s: EdgeSet = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| x.clone())
            .collect();
        if outer_nonempty && s.is_empty() {
            continue;
        }
        let mut with_pins = s.clone();
        with_pins.extend(pin_set.iter().cloned());
        if cycles.iter().any(|c| with_pins.is_subset(c)) {
            outers.push(s);
        }
    }
    outers.sort();

    let mut out = Vec::new();
    for s in outers {
        let mut inner = Vec::new();
        for mask in 0u64..(1u64 << rest.len()) {
            let a: EdgeSet = rest
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect();
            if !oracle_is_acyclic(g, &a) {
                continue;
            }
            let mut with_pins = a.clone();
            with_pins.extend(pin_set.iter().cloned());
            let inside: Vec<&EdgeSet> = cycles.iter().filter(|c| c.is_subset(&with_pins)).collect();
            if inside.len() != 1 {
                continue;
            }
            let c = inside[0];
            let mut s_with_pins = s.clone();
            s_with_pins.extend(pin_set.iter().cloned());
            if s_with_pins.is_subset(c) {
                inner.push((a, c.clone()));
            }
        }
        inner.sort();
        out.push((s, inner));
    }
    out
}

/// Exhaustive K4-minor test: simplify (drop loops, merge parallels),
/// look for four mutually adjacent vertices, otherwise recurse over
/// one-edge deletions and contractions.
pub fn oracle_has_k4_minor(g: &MultiGraph) -> bool {
    let mut simple = MultiGraph::new(0);
    for v in g.vertices() {
        simple.add_vertex(v);
    }
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let key = (e.u.min(e.v), e.u.max(e.v));
        if seen.insert(key) {
            simple.add_edge(e.id.clone(), e.u, e.v).unwrap();
        }
    }
    let verts: Vec<u32> = simple.vertices().collect();
    if verts.len() < 4 || simple.n_edges() < 6 {
        return false;
    }
    let adjacent = |a: u32, b: u32| {
        simple
            .edges()
            .iter()
            .any(|e| (e.u == a && e.v == b) || (e.u == b && e.v == a))
    };
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            for k in (j + 1)..verts.len() {
                for l in (k + 1)..verts.len() {
                    let (a, b, c, d) = (verts[i], verts[j], verts[k], verts[l]);
                    if adjacent(a, b)
                        && adjacent(a, c)
                        && adjacent(a, d)
                        && adjacent(b, c)
                        && adjacent(b, d)
                        && adjacent(c, d)
                    {
                        return true;
                    }
                }
            }
        }
    }
    for id in simple.edge_ids() {
        if oracle_has_k4_minor(&simple.delete_edge(&id).unwrap()) {
            return true;
        }
        if oracle_has_k4_minor(&simple.contract_edge(&id).unwrap()) {
            return true;
        }
    }
    false
}

/// Number of spanning trees via the matrix-tree determinant (Bareiss
/// fraction-free elimination over exact integers). Loops are ignored.
pub fn oracle_matrix_tree_count(g: &MultiGraph) -> BigInt {
    let verts: Vec<u32> = g.vertices().collect();
    let n = verts.len();
    if n == 0 {
        return BigInt::zero();
    }
    if n == 1 {
        return BigInt::one();
    }
    let idx = |v: u32| verts.iter().position(|&x| x == v).unwrap();
    let mut lap = vec![vec![BigInt::zero(); n]; n];
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let (i, j) = (idx(e.u), idx(e.v));
        lap[i][i] += 1;
        lap[j][j] += 1;
        lap[i][j] -= 1;
        lap[j][i] -= 1;
    }
    // Delete the first row and column.
    let m = n - 1;
    let mut a: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| lap[i + 1][j + 1].clone()).collect())
        .collect();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..m {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..m).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in (k + 1)..m {
            for j in (k + 1)..m {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[m - 1][m - 1].clone() * sign;
    if det.is_negative() {
        -det
    } else {
        det
    }
}
