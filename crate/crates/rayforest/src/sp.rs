//! Series-parallel recipes: build plans that reach a target multigraph
//! from a triangle or a parallel triple through series/parallel
//! extensions followed by deletions and contractions.
//!
//! `sp_decompose` recognizes series-parallel graphs (no block with a K4
//! minor) and produces such a recipe for them. 2-connected pieces come
//! out of reversing series/parallel reductions; everything else (loops,
//! bridges, cut vertices, disconnected pieces, isolated vertices) is
//! reached by first over-building a 2-connected scaffold with named
//! temporary edges and then deleting or contracting those at the end.
//! Replaying the recipe reproduces the input up to an isomorphism that
//! preserves every edge name.

use alloc::collections::BTreeSet;
use alloc::format;

use alloc::vec::Vec;

use crate::graph::{EdgeId, EdgeSet, GraphError, MultiGraph};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpBase {
    /// Triangle with the three given edge names.
    K3([EdgeId; 3]),
    /// Three mutually parallel edges.
    K3Star([EdgeId; 3]),
}

impl SpBase {
    pub fn build(&self) -> MultiGraph {
        match self {
            SpBase::K3([a, b, c]) => MultiGraph::triangle(a.as_str(), b.as_str(), c.as_str()),
            SpBase::K3Star([a, b, c]) => {
                MultiGraph::parallel_triple(a.as_str(), b.as_str(), c.as_str())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpStep {
    /// Replaces `edge` by the two-edge path `low`, `high`; `low` ends
    /// up at the smaller-id endpoint of `edge` (a two-sum with a
    /// triangle along `edge`).
    SeriesExtend {
        edge: EdgeId,
        low: EdgeId,
        high: EdgeId,
    },
    /// Adds `new` parallel to `edge` (a two-sum with a parallel triple
    /// along `edge`, keeping the old name on one strand).
    ParallelExtend {
        edge: EdgeId,
        new: EdgeId,
    },
    Delete(EdgeId),
    Contract(EdgeId),
}

impl SpStep {
    pub fn is_extension(&self) -> bool {
        matches!(
            self,
            SpStep::SeriesExtend { .. } | SpStep::ParallelExtend { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpRecipe {
    pub base: SpBase,
    pub steps: Vec<SpStep>,
}

/// Witness that a graph is not series-parallel: the edges of a block
/// whose series/parallel reduction got stuck (such a block has a K4
/// minor).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotSeriesParallel {
    pub block: EdgeSet,
}

impl core::fmt::Display for NotSeriesParallel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "not series-parallel: block {} has a K4 minor",
            crate::cert::fmt_set(&self.block)
        )
    }
}

impl core::error::Error for NotSeriesParallel {}

impl SpRecipe {
    /// Extension steps precede all deletions/contractions.
    pub fn is_well_ordered(&self) -> bool {
        let first_minor = self
            .steps
            .iter()
            .position(|s| !s.is_extension())
            .unwrap_or(self.steps.len());
        self.steps[first_minor..].iter().all(|s| !s.is_extension())
    }

    pub fn n_extensions(&self) -> usize {
        self.steps.iter().filter(|s| s.is_extension()).count()
    }

    /// Rebuilds the graph this recipe describes.
    pub fn replay(&self) -> Result<MultiGraph, GraphError> {
        let mut g = self.base.build();
        for step in &self.steps {
            g = apply_step(&g, step)?;
        }
        Ok(g)
    }
}

/// Applies one recipe step to a graph.
pub fn apply_step(g: &MultiGraph, step: &SpStep) -> Result<MultiGraph, GraphError> {
    match step {
        SpStep::SeriesExtend { edge, low, high } => {
            let mut tri = MultiGraph::new(3);
            tri.add_edge(edge.clone(), 0, 1)?;
            tri.add_edge(low.clone(), 0, 2)?;
            tri.add_edge(high.clone(), 1, 2)?;
            g.two_sum(&tri, edge)
        }
        SpStep::ParallelExtend { edge, new } => {
            let tmp = fresh_name(&g.edge_set(), &[new.clone()], "p");
            let mut par = MultiGraph::new(2);
            par.add_edge(edge.clone(), 0, 1)?;
            par.add_edge(tmp.clone(), 0, 1)?;
            par.add_edge(new.clone(), 0, 1)?;
            let summed = g.two_sum(&par, edge)?;
            summed.rename_edge(&tmp, edge)
        }
        SpStep::Delete(x) => g.delete_edge(x),
        SpStep::Contract(x) => g.contract_edge(x),
    }
}

/// A name with the given prefix that avoids `used` and `reserved`.
fn fresh_name(used: &EdgeSet, reserved: &[EdgeId], prefix: &str) -> EdgeId {
    let mut i = 0usize;
    loop {
        let candidate = EdgeId::new(&format!("_{prefix}{i}"));
        if !used.contains(&candidate) && !reserved.contains(&candidate) {
            return candidate;
        }
        i += 1;
    }
}

/// One recorded reduction, to be replayed backwards.
enum RevStep {
    /// Suppressed degree-2 vertex `w`: edges `(at_u, u)` and `(at_v, v)`
    /// merged into the fresh glue edge `glue = (u, v)`.
    Series {
        glue: EdgeId,
        at_u: EdgeId,
        u: u32,
        at_v: EdgeId,
        v: u32,
        w: u32,
    },
    /// Removed `removed`, parallel to `keep`.
    Parallel { keep: EdgeId, removed: EdgeId },
}

/// Reduces a connected, loopless, 2-connected graph with at least three
/// edges down to a triangle or parallel triple. Returns the reduction
/// trail and the terminal graph, or None if the reduction gets stuck
/// (K4 minor present).
fn reduce_block(
    g: &MultiGraph,
    name_pool: &mut u32,
    taken: &mut BTreeSet<EdgeId>,
) -> Option<(Vec<RevStep>, MultiGraph)> {
    let mut w = g.clone();
    let mut trail = Vec::new();
    loop {
        if is_triangle(&w) || is_parallel_triple(&w) {
            return Some((trail, w));
        }
        // Parallel reduction first: first pair in edge order.
        let mut done = false;
        'outer: for i in 0..w.edges().len() {
            for j in (i + 1)..w.edges().len() {
                let (a, b) = (&w.edges()[i], &w.edges()[j]);
                if (a.u.min(a.v), a.u.max(a.v)) == (b.u.min(b.v), b.u.max(b.v)) {
                    trail.push(RevStep::Parallel {
                        keep: a.id.clone(),
                        removed: b.id.clone(),
                    });
                    w = w.delete_edge(&b.id).expect("edge listed");
                    done = true;
                    break 'outer;
                }
            }
        }
        if done {
            continue;
        }
        // Series reduction: smallest degree-2 vertex.
        let mut candidate = None;
        for v in w.vertices() {
            if w.degree(v) == 2 {
                candidate = Some(v);
                break;
            }
        }
        let wv = candidate?;
        let incident: Vec<_> = w
            .edges()
            .iter()
            .filter(|e| e.u == wv || e.v == wv)
            .cloned()
            .collect();
        debug_assert_eq!(incident.len(), 2);
        let (ea, eb) = (&incident[0], &incident[1]);
        let u = ea.other_end(wv);
        let v = eb.other_end(wv);
        // In a 2-connected multigraph beyond three edges the two
        // neighbours are distinct (otherwise w would be a cut pair).
        debug_assert_ne!(u, v);
        let glue = loop {
            let c = EdgeId::new(&format!("_s{name_pool}"));
            *name_pool += 1;
            if !taken.contains(&c) && !w.has_edge(&c) {
                break c;
            }
        };
        taken.insert(glue.clone());
        trail.push(RevStep::Series {
            glue: glue.clone(),
            at_u: ea.id.clone(),
            u,
            at_v: eb.id.clone(),
            v,
            w: wv,
        });
        let mut next = w.delete_edge(&ea.id).expect("edge listed");
        next = next.delete_edge(&eb.id).expect("edge listed");
        next.add_edge(glue, u, v).expect("fresh name");
        // Drop the suppressed vertex.
        let mut reduced = MultiGraph::new(0);
        for x in next.vertices() {
            if x != wv {
                reduced.add_vertex(x);
            }
        }
        for e in next.edges() {
            reduced.add_edge(e.id.clone(), e.u, e.v).expect("copying");
        }
        w = reduced;
    }
}

fn is_triangle(g: &MultiGraph) -> bool {
    if g.n_edges() != 3 || g.n_vertices() != 3 {
        return false;
    }
    g.vertices().all(|v| g.degree(v) == 2) && g.edges().iter().all(|e| !e.is_loop())
}

fn is_parallel_triple(g: &MultiGraph) -> bool {
    if g.n_edges() != 3 || g.n_vertices() != 2 {
        return false;
    }
    g.edges().iter().all(|e| !e.is_loop())
}

/// Whether one block (given as a spanned subgraph) is series-parallel.
fn block_is_sp(block: &MultiGraph) -> bool {
    if block.n_edges() <= 2 {
        return true;
    }
    let mut pool = 0u32;
    let mut taken = BTreeSet::new();
    reduce_block(block, &mut pool, &mut taken).is_some()
}

/// Decides whether `g` is series-parallel and, if so, produces a recipe
/// that replays to it (edge names preserved; vertices up to bijection).
///
/// The vertexless graph is the one degenerate case that no recipe can
/// reach; it is mapped to the single-vertex recipe, the only point
/// where replay and input differ (their forest polynomials agree).
pub fn sp_decompose(g: &MultiGraph) -> Result<SpRecipe, NotSeriesParallel> {
    // Reject early on any non-series-parallel block.
    for block in g.blocks() {
        let sub = g.spanned_subgraph(&block);
        if !block_is_sp(&sub) {
            return Err(NotSeriesParallel { block });
        }
    }

    let mut taken: BTreeSet<EdgeId> = g.edge_ids().into_iter().collect();
    let mut w = g.clone();
    let mut deletes: Vec<EdgeId> = Vec::new();
    let mut contracts: Vec<EdgeId> = Vec::new();
    let mut next_vertex = w.vertices().max().map_or(0, |m| m + 1);
    let mut temp_counter = 0u32;
    let mut fresh_temp = |taken: &mut BTreeSet<EdgeId>, prefix: &str| -> EdgeId {
        loop {
            let c = EdgeId::new(&format!("_{prefix}{temp_counter}"));
            temp_counter += 1;
            if !taken.contains(&c) {
                taken.insert(c.clone());
                return c;
            }
        }
    };

    // Loops become 2-cycles against a fresh vertex; contracting the
    // partner temp edge at the end restores the loop.
    let loops: Vec<EdgeId> = w
        .edges()
        .iter()
        .filter(|e| e.is_loop())
        .map(|e| e.id.clone())
        .collect();
    for l in loops {
        let at = w.edge(&l).expect("listed").u;
        let z = next_vertex;
        next_vertex += 1;
        w.repoint_edge(&l, at, z);
        let t = fresh_temp(&mut taken, "l");
        w.add_vertex(z);
        w.add_edge(t.clone(), at, z).expect("fresh name");
        contracts.push(t);
    }

    // Temp bridges join the components; deleted at the end.
    loop {
        let comps = w.components();
        if comps.len() <= 1 {
            break;
        }
        let a = *comps[0].iter().next().expect("non-empty component");
        let b = *comps[1].iter().next().expect("non-empty component");
        let t = fresh_temp(&mut taken, "b");
        w.add_edge(t.clone(), a, b).expect("fresh name");
        deletes.push(t);
    }

    // Ears merge the blocks: for two blocks meeting at a cut vertex c,
    // pick a host edge (c,x) in one and a neighbour edge (c,y) in the
    // other, and add the chord (y,x). This is a parallel extension of
    // the host edge followed by a series split plus a two-sum, so it
    // keeps the graph series-parallel, and it reduces the block count.
    if w.n_edges() > 0 {
        loop {
            let blocks = w.blocks();
            if blocks.len() <= 1 {
                break;
            }
            let cuts = w.cut_vertices();
            let c = *cuts
                .iter()
                .next()
                .expect("multiple blocks share a cut vertex");
            let at_c: Vec<EdgeSet> = blocks
                .iter()
                .filter(|b| {
                    b.iter().any(|id| {
                        let e = w.edge(id).expect("listed");
                        e.u == c || e.v == c
                    })
                })
                .cloned()
                .collect();
            debug_assert!(at_c.len() >= 2);
            let host = at_c[0]
                .iter()
                .map(|id| w.edge(id).expect("listed"))
                .find(|e| e.u == c || e.v == c)
                .expect("block touches c");
            let other = at_c[1]
                .iter()
                .map(|id| w.edge(id).expect("listed"))
                .find(|e| e.u == c || e.v == c)
                .expect("block touches c");
            let x = host.other_end(c);
            let y = other.other_end(c);
            debug_assert_ne!(x, y);
            let t = fresh_temp(&mut taken, "e");
            w.add_edge(t.clone(), y, x).expect("fresh name");
            deletes.push(t);
        }
    }

    // W is now 2-connected (or tiny). Small shapes get literal recipes.
    let (base, ext_steps) = match w.n_edges() {
        0 => {
            // Single vertex (or the vertexless degenerate case).
            let t1 = fresh_temp(&mut taken, "k");
            let t2 = fresh_temp(&mut taken, "k");
            let t3 = fresh_temp(&mut taken, "k");
            contracts.push(t1.clone());
            contracts.push(t2.clone());
            deletes.push(t3.clone());
            (SpBase::K3([t1, t2, t3]), Vec::new())
        }
        1 => {
            let keep = w.edges()[0].id.clone();
            let t1 = fresh_temp(&mut taken, "k");
            let t2 = fresh_temp(&mut taken, "k");
            deletes.push(t1.clone());
            contracts.push(t2.clone());
            (SpBase::K3([keep, t1, t2]), Vec::new())
        }
        2 => {
            // A 2-connected two-edge graph is a parallel pair.
            let a = w.edges()[0].id.clone();
            let b = w.edges()[1].id.clone();
            let t = fresh_temp(&mut taken, "k");
            deletes.push(t.clone());
            (SpBase::K3Star([a, b, t]), Vec::new())
        }
        _ => {
            let mut pool = 0u32;
            let (trail, terminal) = reduce_block(&w, &mut pool, &mut taken)
                .expect("blocks verified series-parallel before scaffolding");
            forward_steps(trail, terminal)
        }
    };

    let mut steps = ext_steps;
    deletes.sort();
    contracts.sort();
    steps.extend(deletes.into_iter().map(SpStep::Delete));
    steps.extend(contracts.into_iter().map(SpStep::Contract));
    let recipe = SpRecipe { base, steps };

    let replayed = recipe.replay().expect("recipe replays");
    assert!(
        replayed.iso_by_edge_names(g) || g.n_vertices() == 0,
        "internal error: recipe replay does not reproduce the input\nrecipe {recipe:?}\nreplayed {replayed:?}\ninput {g:?}"
    );
    Ok(recipe)
}

/// Converts a reduction trail into forward extension steps, fixing the
/// attachment orientation of every series split by simulating the
/// replay next to the recorded reduction states.
fn forward_steps(trail: Vec<RevStep>, terminal: MultiGraph) -> (SpBase, Vec<SpStep>) {
    // Base and the initial replay↦reduction vertex correspondence.
    let names: Vec<EdgeId> = terminal.edge_ids();
    let base = if is_triangle(&terminal) {
        SpBase::K3([names[0].clone(), names[1].clone(), names[2].clone()])
    } else {
        SpBase::K3Star([names[0].clone(), names[1].clone(), names[2].clone()])
    };
    let mut replay = base.build();
    // phi: replay vertex -> reduction vertex.
    let mut phi: alloc::collections::BTreeMap<u32, u32> = Default::default();
    match &base {
        SpBase::K3(_) => {
            for rv in replay.vertices().collect::<Vec<_>>() {
                let names_at: BTreeSet<EdgeId> = replay
                    .edges()
                    .iter()
                    .filter(|e| e.u == rv || e.v == rv)
                    .map(|e| e.id.clone())
                    .collect();
                let tv = terminal
                    .vertices()
                    .find(|&t| {
                        let there: BTreeSet<EdgeId> = terminal
                            .edges()
                            .iter()
                            .filter(|e| e.u == t || e.v == t)
                            .map(|e| e.id.clone())
                            .collect();
                        there == names_at
                    })
                    .expect("triangles share the incidence pattern");
                phi.insert(rv, tv);
            }
        }
        SpBase::K3Star(_) => {
            // Both endpoints look alike; the choice extends to an
            // isomorphism either way.
            let rvs: Vec<u32> = replay.vertices().collect();
            let tvs: Vec<u32> = terminal.vertices().collect();
            phi.insert(rvs[0], tvs[0]);
            phi.insert(rvs[1], tvs[1]);
        }
    }

    let mut steps = Vec::new();
    for rev in trail.into_iter().rev() {
        match rev {
            RevStep::Parallel { keep, removed } => {
                let step = SpStep::ParallelExtend {
                    edge: keep,
                    new: removed,
                };
                replay = apply_step(&replay, &step).expect("replaying recorded step");
                steps.push(step);
            }
            RevStep::Series {
                glue,
                at_u,
                u,
                at_v,
                v,
                w,
            } => {
                let ge = replay.edge(&glue).expect("glue edge present").clone();
                let rmin = ge.u.min(ge.v);
                // `low` lands at the replay-side smaller endpoint.
                let (low, high) = if phi[&rmin] == u {
                    (at_u.clone(), at_v.clone())
                } else {
                    debug_assert_eq!(phi[&rmin], v);
                    (at_v.clone(), at_u.clone())
                };
                let before: BTreeSet<u32> = replay.vertices().collect();
                let step = SpStep::SeriesExtend {
                    edge: glue,
                    low,
                    high,
                };
                replay = apply_step(&replay, &step).expect("replaying recorded step");
                let fresh = replay
                    .vertices()
                    .find(|x| !before.contains(x))
                    .expect("series extension adds one vertex");
                phi.insert(fresh, w);
                steps.push(step);
            }
        }
    }
    (base, steps)
}

/// Seeded random recipe: a coin for the base, then up to `max_steps`
/// steps, extensions first, optionally followed by deletions and
/// contractions of random surviving edges (contractions never target
/// loops). Generated edge names are `x0`, `x1`, …
pub fn random_recipe(rng: &mut SplitMix64, max_steps: u32) -> SpRecipe {
    let base = if rng.below(2) == 0 {
        SpBase::K3([EdgeId::new("a"), EdgeId::new("b"), EdgeId::new("c")])
    } else {
        SpBase::K3Star([EdgeId::new("a"), EdgeId::new("b"), EdgeId::new("c")])
    };
    let total = rng.below(max_steps as u64 + 1) as u32;
    let n_minor = if total == 0 {
        0
    } else {
        rng.below(1 + total as u64 / 2) as u32
    };
    let n_ext = total - n_minor;

    let mut g = base.build();
    let mut steps = Vec::new();
    let mut fresh = 0u32;
    for _ in 0..n_ext {
        let ids = g.edge_ids();
        let target = ids[rng.below(ids.len() as u64) as usize].clone();
        let step = if rng.below(2) == 0 {
            let low = EdgeId::new(&format!("x{fresh}"));
            let high = EdgeId::new(&format!("x{}", fresh + 1));
            fresh += 2;
            SpStep::SeriesExtend {
                edge: target,
                low,
                high,
            }
        } else {
            let new = EdgeId::new(&format!("x{fresh}"));
            fresh += 1;
            SpStep::ParallelExtend { edge: target, new }
        };
        g = apply_step(&g, &step).expect("valid generated step");
        steps.push(step);
    }
    for _ in 0..n_minor {
        if g.n_edges() == 0 {
            break;
        }
        let ids = g.edge_ids();
        let target = ids[rng.below(ids.len() as u64) as usize].clone();
        let is_loop = g.edge(&target).expect("listed").is_loop();
        let step = if rng.below(2) == 0 || is_loop {
            SpStep::Delete(target)
        } else {
            SpStep::Contract(target)
        };
        g = apply_step(&g, &step).expect("valid generated step");
        steps.push(step);
    }
    SpRecipe { base, steps }
}
