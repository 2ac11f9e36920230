//! Labeled multigraphs with the structural operations the certificate
//! machinery needs: deletion, contraction, two-sums, forest and cycle
//! enumeration, blocks.
//!
//! Vertices are anonymous integers; only edge names carry identity.
//! Loops and parallel edges are permitted everywhere. All operations are
//! pure: they return new graphs and never mutate their input.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Name of an edge, unique within one graph. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(Arc<str>);

impl EdgeId {
    pub fn new(name: &str) -> Self {
        EdgeId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeId({})", self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId::new(s)
    }
}

/// Sets of edges, ordered by name so serialization is canonical.
pub type EdgeSet = BTreeSet<EdgeId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: u32,
    pub v: u32,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other_end(&self, w: u32) -> u32 {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    UnknownEdge(String),
    DuplicateEdgeName(String),
    UnknownVertex(u32),
    LoopContraction(String),
    LoopEdge(String),
    LoopBasepoint(String),
    NameCollision(String),
    SameEdge(String),
    Disconnected,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownEdge(n) => write!(f, "unknown edge `{n}`"),
            GraphError::DuplicateEdgeName(n) => write!(f, "duplicate edge name `{n}`"),
            GraphError::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            GraphError::LoopContraction(n) => write!(f, "cannot contract loop `{n}`"),
            GraphError::LoopEdge(n) => write!(f, "edge `{n}` is a loop"),
            GraphError::LoopBasepoint(n) => write!(f, "two-sum basepoint `{n}` is a loop"),
            GraphError::NameCollision(n) => write!(f, "edge name `{n}` occurs on both sides"),
            GraphError::SameEdge(n) => write!(f, "edges must be distinct, got `{n}` twice"),
            GraphError::Disconnected => write!(f, "graph is disconnected"),
        }
    }
}

impl core::error::Error for GraphError {}

/// A finite multigraph. Vertex ids are arbitrary `u32`s (they stay
/// stable under deletion and contraction); edge ids are names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: BTreeSet<u32>,
    edges: Vec<Edge>,
}

impl MultiGraph {
    /// Graph with vertices `0..n` and no edges.
    pub fn new(n: u32) -> Self {
        MultiGraph {
            vertices: (0..n).collect(),
            edges: Vec::new(),
        }
    }

    pub fn from_parts(
        vertices: BTreeSet<u32>,
        edges: Vec<(EdgeId, u32, u32)>,
    ) -> Result<Self, GraphError> {
        let mut g = MultiGraph {
            vertices,
            edges: Vec::new(),
        };
        for (id, u, v) in edges {
            g.add_edge(id, u, v)?;
        }
        Ok(g)
    }

    /// The triangle on vertices 0,1,2 with the given edge names.
    pub fn triangle(a: &str, b: &str, c: &str) -> Self {
        let mut g = MultiGraph::new(3);
        g.add_edge(EdgeId::new(a), 0, 1).unwrap();
        g.add_edge(EdgeId::new(b), 1, 2).unwrap();
        g.add_edge(EdgeId::new(c), 0, 2).unwrap();
        g
    }

    /// Three mutually parallel edges (the dual of the triangle).
    pub fn parallel_triple(a: &str, b: &str, c: &str) -> Self {
        let mut g = MultiGraph::new(2);
        g.add_edge(EdgeId::new(a), 0, 1).unwrap();
        g.add_edge(EdgeId::new(b), 0, 1).unwrap();
        g.add_edge(EdgeId::new(c), 0, 1).unwrap();
        g
    }

    /// Complete graph on `n` vertices, edges named `e<u><v>`.
    pub fn complete(n: u32) -> Self {
        let mut g = MultiGraph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                let name = alloc::format!("e{u}{v}");
                g.add_edge(EdgeId::new(&name), u, v).unwrap();
            }
        }
        g
    }

    /// Complete bipartite graph on parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: u32, b: u32) -> Self {
        let mut g = MultiGraph::new(a + b);
        for u in 0..a {
            for v in a..(a + b) {
                let name = alloc::format!("e{u}{v}");
                g.add_edge(EdgeId::new(&name), u, v).unwrap();
            }
        }
        g
    }

    /// Cycle on `n ≥ 3` vertices, edges named `c0..c(n-1)`.
    pub fn cycle(n: u32) -> Self {
        let mut g = MultiGraph::new(n);
        for i in 0..n {
            let name = alloc::format!("c{i}");
            g.add_edge(EdgeId::new(&name), i, (i + 1) % n).unwrap();
        }
        g
    }

    pub fn add_vertex(&mut self, v: u32) {
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, id: EdgeId, u: u32, v: u32) -> Result<(), GraphError> {
        if self.edges.iter().any(|e| e.id == id) {
            return Err(GraphError::DuplicateEdgeName(String::from(id.as_str())));
        }
        if !self.vertices.contains(&u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.vertices.contains(&v) {
            return Err(GraphError::UnknownVertex(v));
        }
        self.edges.push(Edge { id, u, v });
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &EdgeId) -> Result<&Edge, GraphError> {
        self.edges
            .iter()
            .find(|e| &e.id == id)
            .ok_or_else(|| GraphError::UnknownEdge(String::from(id.as_str())))
    }

    pub fn has_edge(&self, id: &EdgeId) -> bool {
        self.edges.iter().any(|e| &e.id == id)
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    pub fn is_loop(&self, id: &EdgeId) -> Result<bool, GraphError> {
        Ok(self.edge(id)?.is_loop())
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == v) as usize + (e.v == v) as usize)
            .sum()
    }

    /// Removes edge `e`; vertices are untouched.
    pub fn delete_edge(&self, e: &EdgeId) -> Result<MultiGraph, GraphError> {
        self.edge(e)?;
        let mut g = self.clone();
        g.edges.retain(|x| &x.id != e);
        Ok(g)
    }

    /// Identifies the endpoints of `e` (keeping the smaller vertex id)
    /// and removes `e`. Loops cannot be contracted.
    pub fn contract_edge(&self, e: &EdgeId) -> Result<MultiGraph, GraphError> {
        let edge = self.edge(e)?;
        if edge.is_loop() {
            return Err(GraphError::LoopContraction(String::from(e.as_str())));
        }
        let keep = edge.u.min(edge.v);
        let gone = edge.u.max(edge.v);
        let mut g = self.clone();
        g.edges.retain(|x| &x.id != e);
        for x in g.edges.iter_mut() {
            if x.u == gone {
                x.u = keep;
            }
            if x.v == gone {
                x.v = keep;
            }
        }
        g.vertices.remove(&gone);
        Ok(g)
    }

    /// Renames edge `old` to `new`, failing on a name collision.
    pub fn rename_edge(&self, old: &EdgeId, new: &EdgeId) -> Result<MultiGraph, GraphError> {
        self.edge(old)?;
        if old != new && self.has_edge(new) {
            return Err(GraphError::DuplicateEdgeName(String::from(new.as_str())));
        }
        let mut g = self.clone();
        for x in g.edges.iter_mut() {
            if &x.id == old {
                x.id = new.clone();
            }
        }
        Ok(g)
    }

    /// Glues `self` and `other` along the common edge `g` and removes
    /// `g` from the result. The orientation is fixed deterministically:
    /// the smaller-id endpoint of `g` on each side are identified with
    /// each other. Forest polynomials do not depend on this choice.
    pub fn two_sum(&self, other: &MultiGraph, g: &EdgeId) -> Result<MultiGraph, GraphError> {
        let eh = self.edge(g)?.clone();
        let ek = other.edge(g)?.clone();
        if eh.is_loop() || ek.is_loop() {
            return Err(GraphError::LoopBasepoint(String::from(g.as_str())));
        }
        for e in other.edges.iter() {
            if e.id != *g && self.has_edge(&e.id) {
                return Err(GraphError::NameCollision(String::from(e.id.as_str())));
            }
        }
        let (hu, hv) = (eh.u.min(eh.v), eh.u.max(eh.v));
        let (ku, kv) = (ek.u.min(ek.v), ek.u.max(ek.v));

        let mut result = self.clone();
        result.edges.retain(|x| &x.id != g);

        // Remap the other side's vertices: glue endpoints map onto ours,
        // the rest get fresh ids above everything used so far.
        let mut next = self
            .vertices
            .iter()
            .copied()
            .max()
            .map_or(0, |m| m + 1)
            .max(other.vertices.iter().copied().max().map_or(0, |m| m + 1));
        let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
        remap.insert(ku, hu);
        remap.insert(kv, hv);
        for v in other.vertices.iter().copied() {
            remap.entry(v).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
        }
        for v in remap.values() {
            result.vertices.insert(*v);
        }
        for e in other.edges.iter() {
            if &e.id == g {
                continue;
            }
            result.edges.push(Edge {
                id: e.id.clone(),
                u: remap[&e.u],
                v: remap[&e.v],
            });
        }
        Ok(result)
    }

    /// Restriction to an edge subset (all vertices kept).
    pub fn restrict(&self, keep: &EdgeSet) -> MultiGraph {
        let mut g = self.clone();
        g.edges.retain(|e| keep.contains(&e.id));
        g
    }

    /// Subgraph spanned by an edge subset: only incident vertices kept.
    pub fn spanned_subgraph(&self, keep: &EdgeSet) -> MultiGraph {
        let mut g = self.restrict(keep);
        let used: BTreeSet<u32> = g.edges.iter().flat_map(|e| [e.u, e.v]).collect();
        g.vertices = used;
        g
    }

    /// Moves an existing edge onto new endpoints, adding them as
    /// vertices if needed. Internal surgery for recipe extraction.
    pub(crate) fn repoint_edge(&mut self, id: &EdgeId, u: u32, v: u32) {
        self.vertices.insert(u);
        self.vertices.insert(v);
        for e in self.edges.iter_mut() {
            if &e.id == id {
                e.u = u;
                e.v = v;
            }
        }
    }

    /// True when the edge set `sub` is acyclic. Loops are never acyclic.
    pub fn is_forest(&self, sub: &EdgeSet) -> bool {
        let mut uf = UnionFind::new(&self.vertices);
        for e in self.edges.iter().filter(|e| sub.contains(&e.id)) {
            if !uf.union(e.u, e.v) {
                return false;
            }
        }
        true
    }

    /// Whether `u` and `v` are connected using only edges in `sub`.
    pub fn connects(&self, sub: &EdgeSet, u: u32, v: u32) -> bool {
        let mut uf = UnionFind::new(&self.vertices);
        for e in self.edges.iter().filter(|e| sub.contains(&e.id)) {
            uf.union(e.u, e.v);
        }
        uf.find(u) == uf.find(v)
    }

    /// All acyclic edge subsets, the empty set included. Loops never
    /// appear in a forest. Exponential in the edge count; fine at the
    /// scales this crate targets (a few dozen edges at most).
    pub fn enumerate_forests(&self) -> Vec<EdgeSet> {
        let non_loops: Vec<&Edge> = self.edges.iter().filter(|e| !e.is_loop()).collect();
        let mut out = Vec::new();
        let mut current = EdgeSet::new();
        let mut uf = UnionFind::new(&self.vertices);
        fn rec(
            edges: &[&Edge],
            i: usize,
            current: &mut EdgeSet,
            uf: &mut UnionFind,
            out: &mut Vec<EdgeSet>,
        ) {
            if i == edges.len() {
                out.push(current.clone());
                return;
            }
            // skip edges[i]
            rec(edges, i + 1, current, uf, out);
            // take edges[i] if it stays acyclic
            let e = edges[i];
            if uf.find(e.u) != uf.find(e.v) {
                let snapshot = uf.clone();
                uf.union(e.u, e.v);
                current.insert(e.id.clone());
                rec(edges, i + 1, current, uf, out);
                current.remove(&e.id);
                *uf = snapshot;
            }
        }
        rec(&non_loops, 0, &mut current, &mut uf, &mut out);
        out.sort();
        out
    }

    /// Edge sets of all simple cycles: a loop is a cycle of size one, a
    /// parallel pair a cycle of size two. Exhaustive enumeration.
    pub fn enumerate_cycles(&self) -> Vec<EdgeSet> {
        let mut cycles: Vec<EdgeSet> = Vec::new();
        // Loops first.
        for e in self.edges.iter().filter(|e| e.is_loop()) {
            let mut s = EdgeSet::new();
            s.insert(e.id.clone());
            cycles.push(s);
        }
        // Walks anchored at their minimal vertex; the two traversal
        // directions of one cycle are deduplicated by insisting the
        // first edge index is smaller than the last.
        let verts: Vec<u32> = self.vertices.iter().copied().collect();
        for &anchor in &verts {
            let mut path_edges: Vec<usize> = Vec::new();
            let mut visited: BTreeSet<u32> = BTreeSet::new();
            visited.insert(anchor);
            self.cycle_walk(anchor, anchor, &mut path_edges, &mut visited, &mut cycles);
        }
        cycles.sort();
        cycles.dedup();
        cycles
    }

    fn cycle_walk(
        &self,
        anchor: u32,
        at: u32,
        path_edges: &mut Vec<usize>,
        visited: &mut BTreeSet<u32>,
        out: &mut Vec<EdgeSet>,
    ) {
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() || path_edges.contains(&i) {
                continue;
            }
            if e.u != at && e.v != at {
                continue;
            }
            let next = e.other_end(at);
            if next == anchor {
                if !path_edges.is_empty() && path_edges[0] < i {
                    let mut s: EdgeSet = path_edges
                        .iter()
                        .map(|&j| self.edges[j].id.clone())
                        .collect();
                    s.insert(e.id.clone());
                    out.push(s);
                }
                continue;
            }
            if visited.contains(&next) || next < anchor {
                continue;
            }
            path_edges.push(i);
            visited.insert(next);
            self.cycle_walk(anchor, next, path_edges, visited, out);
            visited.remove(&next);
            path_edges.pop();
        }
    }

    /// Connected components as vertex sets (isolated vertices included).
    pub fn components(&self) -> Vec<BTreeSet<u32>> {
        let mut uf = UnionFind::new(&self.vertices);
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        let mut groups: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for &v in &self.vertices {
            groups.entry(uf.find(v)).or_default().insert(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Blocks (2-connected components) as edge sets. Loops form their
    /// own singleton blocks; bridges are blocks of one edge.
    pub fn blocks(&self) -> Vec<EdgeSet> {
        let mut out: Vec<EdgeSet> = Vec::new();
        for e in self.edges.iter().filter(|e| e.is_loop()) {
            let mut s = EdgeSet::new();
            s.insert(e.id.clone());
            out.push(s);
        }
        // Iterative Hopcroft–Tarjan over non-loop edges.
        let idx: BTreeMap<u32, usize> = self
            .vertices
            .iter()
            .copied()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let n = idx.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (edge index, neighbour)
        for (ei, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            let (u, v) = (idx[&e.u], idx[&e.v]);
            adj[u].push((ei, v));
            adj[v].push((ei, u));
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut time = 0usize;
        let mut estack: Vec<usize> = Vec::new();

        for start in 0..n {
            if disc[start] != usize::MAX {
                continue;
            }
            // Frame: (vertex, adjacency cursor, parent edge index or MAX).
            let mut stack: Vec<(usize, usize, usize)> = vec![(start, 0, usize::MAX)];
            disc[start] = time;
            low[start] = time;
            time += 1;
            while let Some(frame) = stack.last_mut() {
                let (u, pedge) = (frame.0, frame.2);
                if frame.1 < adj[u].len() {
                    let (ei, w) = adj[u][frame.1];
                    frame.1 += 1;
                    if ei == pedge {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        estack.push(ei);
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, 0, ei));
                    } else if disc[w] < disc[u] {
                        // back edge
                        estack.push(ei);
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(parent_frame) = stack.last() {
                        let parent = parent_frame.0;
                        low[parent] = low[parent].min(low[u]);
                        if low[u] >= disc[parent] {
                            // Everything pushed since the tree edge into
                            // `u` forms one block; `pedge` delimits it.
                            let mut block = EdgeSet::new();
                            while let Some(top) = estack.pop() {
                                block.insert(self.edges[top].id.clone());
                                if top == pedge {
                                    break;
                                }
                            }
                            if !block.is_empty() {
                                out.push(block);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Cut vertices of the graph.
    pub fn cut_vertices(&self) -> BTreeSet<u32> {
        // A vertex is a cut vertex iff it belongs to at least two
        // non-loop blocks (or one block plus at least one loop is not
        // enough: loops never separate anything).
        let blocks = self.blocks();
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for b in &blocks {
            if b.len() == 1 {
                let id = b.iter().next().unwrap();
                if self.edge(id).map(|e| e.is_loop()).unwrap_or(false) {
                    continue;
                }
            }
            let mut verts = BTreeSet::new();
            for id in b {
                let e = self.edge(id).unwrap();
                verts.insert(e.u);
                verts.insert(e.v);
            }
            for v in verts {
                *count.entry(v).or_insert(0) += 1;
            }
        }
        count
            .into_iter()
            .filter(|&(_, c)| c >= 2)
            .map(|(v, _)| v)
            .collect()
    }

    /// Edge-name preserving isomorphism: a vertex bijection mapping each
    /// named edge onto the same-named edge of `other`.
    pub fn iso_by_edge_names(&self, other: &MultiGraph) -> bool {
        if self.n_vertices() != other.n_vertices() || self.n_edges() != other.n_edges() {
            return false;
        }
        if self.edge_set() != other.edge_set() {
            return false;
        }
        // Propagate the vertex mapping edge by edge, branching on the
        // two ways to orient each one.
        fn assign(map: &mut BTreeMap<u32, u32>, used: &mut BTreeSet<u32>, a: u32, b: u32) -> bool {
            match map.get(&a) {
                Some(&x) => x == b,
                None => {
                    if used.contains(&b) {
                        return false;
                    }
                    map.insert(a, b);
                    used.insert(b);
                    true
                }
            }
        }
        fn rec(
            g: &MultiGraph,
            h: &MultiGraph,
            i: usize,
            map: &mut BTreeMap<u32, u32>,
            used: &mut BTreeSet<u32>,
        ) -> bool {
            if i == g.edges.len() {
                return true;
            }
            let e = &g.edges[i];
            let f = h.edge(&e.id).unwrap();
            for (a1, b1, a2, b2) in [(e.u, f.u, e.v, f.v), (e.u, f.v, e.v, f.u)] {
                let snapshot_map = map.clone();
                let snapshot_used = used.clone();
                if assign(map, used, a1, b1) && assign(map, used, a2, b2) {
                    if rec(g, h, i + 1, map, used) {
                        return true;
                    }
                }
                *map = snapshot_map;
                *used = snapshot_used;
            }
            false
        }
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        rec(self, other, 0, &mut map, &mut used)
        // Unmatched (isolated) vertices can always be paired up since the
        // counts agree.
    }
}

/// Union-find over sparse u32 vertex ids: ids are compacted into a
/// dense slot table once, so finds and clones stay cheap.
#[derive(Clone)]
pub(crate) struct UnionFind {
    ids: Vec<u32>,
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(vertices: &BTreeSet<u32>) -> Self {
        let ids: Vec<u32> = vertices.iter().copied().collect();
        let parent = (0..ids.len() as u32).collect();
        UnionFind { ids, parent }
    }

    fn slot(&self, v: u32) -> u32 {
        self.ids
            .binary_search(&v)
            .expect("vertex belongs to the graph") as u32
    }

    fn find_slot(&mut self, mut s: u32) -> u32 {
        while self.parent[s as usize] != s {
            let up = self.parent[self.parent[s as usize] as usize];
            self.parent[s as usize] = up;
            s = up;
        }
        s
    }

    pub(crate) fn find(&mut self, v: u32) -> u32 {
        let s = self.slot(v);
        self.find_slot(s)
    }

    /// Returns false when `u` and `v` were already joined.
    pub(crate) fn union(&mut self, u: u32, v: u32) -> bool {
        let (ru, rv) = (self.find(u), self.find(v));
        if ru == rv {
            return false;
        }
        let (lo, hi) = (ru.min(rv), ru.max(rv));
        self.parent[hi as usize] = lo;
        true
    }
}
