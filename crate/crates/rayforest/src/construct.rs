//! Recursive construction of sum-of-squares certificates for
//! series-parallel graphs.
//!
//! The recipe builder ([`construct_from_recipe`]) replays a
//! series-parallel recipe and maintains, at every stage, a Δ
//! certificate for every admissible edge pair and a Φ certificate for
//! every edge (the [`CertPair`]). Extension steps are two-sums with a
//! triangle or a parallel triple, handled by three composition rules:
//!
//! * cross pairs (`e` and `f` on opposite sides of the glue edge `g`)
//!   multiply a Δ certificate of `{e,g}` with one of `{g,f}`, gluing
//!   cycles by symmetric difference and multiplying signs;
//! * same-side pairs keep the old outer sets that avoid `g` (their
//!   inner sets get padded with forests of the other factor) and join
//!   outer sets through `g` with the Q-sets of the other factor's Φ
//!   certificate;
//! * Φ certificates compose over two-sums by the same two families.
//!
//! Deletions and contractions restrict certificates the way coefficient
//! extraction acts on the Rayleigh difference.
//!
//! [`construct_all`] covers arbitrary series-parallel inputs by running
//! the recipe builder per block and extending block certificates to the
//! whole graph with the direct-sum rule (forest polynomials factor over
//! blocks); pairs split across blocks get the empty certificate, as
//! their Rayleigh difference vanishes.
//!
//! Every certificate produced at every stage is verified exactly before
//! construction continues; a verification failure aborts and reports
//! the discrepancy rather than patching it.
//!
//! In the same-side family split, "g completes a cycle" is tested
//! against the inner set together with the pinned edges (`{e}` or
//! `{e,f}` as appropriate), not the inner set alone. With two pinned
//! edges the two tests genuinely differ, and only the pinned version
//! makes the composed certificates verify.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cert::{verify_phi, CertBody, CertError, DeltaCert, PhiCert, Sign, VerifyOutcome};
use crate::graph::{EdgeId, EdgeSet, GraphError, MultiGraph};
use crate::poly::Polynomial;
use crate::rayleigh;
use crate::sp::{sp_decompose, NotSeriesParallel, SpBase, SpRecipe, SpStep};

#[derive(Clone, Debug)]
pub enum ConstructError {
    NotSeriesParallel(NotSeriesParallel),
    Graph(GraphError),
    Cert(CertError),
    /// A composed or restricted certificate failed exact verification.
    Verify {
        stage: String,
        outcome: VerifyOutcome,
    },
}

impl core::fmt::Display for ConstructError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConstructError::NotSeriesParallel(e) => write!(f, "{e}"),
            ConstructError::Graph(e) => write!(f, "{e}"),
            ConstructError::Cert(e) => write!(f, "{e}"),
            ConstructError::Verify { stage, outcome } => {
                write!(f, "verification failed at {stage}: {outcome}")
            }
        }
    }
}

impl core::error::Error for ConstructError {}

impl From<GraphError> for ConstructError {
    fn from(e: GraphError) -> Self {
        ConstructError::Graph(e)
    }
}

impl From<CertError> for ConstructError {
    fn from(e: CertError) -> Self {
        ConstructError::Cert(e)
    }
}

impl From<NotSeriesParallel> for ConstructError {
    fn from(e: NotSeriesParallel) -> Self {
        ConstructError::NotSeriesParallel(e)
    }
}

fn pair_key(a: &EdgeId, b: &EdgeId) -> (EdgeId, EdgeId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn sign_of(body: &CertBody, outer: &EdgeSet, cycle: &EdgeSet) -> Result<Sign, CertError> {
    body.signs
        .get(&(outer.clone(), cycle.clone()))
        .copied()
        .ok_or_else(|| CertError::MissingSign {
            outer: outer.clone(),
            cycle: cycle.clone(),
        })
}

/// Certificates for one graph: Δ for every admissible pair, Φ for every
/// non-loop edge. Maintained jointly because the same-side composition
/// consumes Φ certificates of both factors.
#[derive(Clone, Debug)]
pub struct CertPair {
    pub graph: MultiGraph,
    pub delta: BTreeMap<(EdgeId, EdgeId), DeltaCert>,
    pub phi: BTreeMap<EdgeId, PhiCert>,
}

impl CertPair {
    pub fn delta_cert(&self, e: &EdgeId, f: &EdgeId) -> Option<&DeltaCert> {
        self.delta.get(&pair_key(e, f))
    }

    pub fn phi_cert(&self, e: &EdgeId) -> Option<&PhiCert> {
        self.phi.get(e)
    }

    /// Verifies every certificate against the stored graph. The forest
    /// polynomial and cycle list are shared across the whole batch.
    fn verify_all(&self, stage: &str) -> Result<(), ConstructError> {
        let ctx = crate::cert::VerifyContext::new(&self.graph);
        for ((a, b), cert) in &self.delta {
            let outcome = ctx.verify_delta(a, b, cert);
            if !outcome.is_verified() {
                return Err(ConstructError::Verify {
                    stage: format!("{stage}, delta {{{a},{b}}}"),
                    outcome,
                });
            }
        }
        for (a, cert) in &self.phi {
            let outcome = ctx.verify_phi(a, cert);
            if !outcome.is_verified() {
                return Err(ConstructError::Verify {
                    stage: format!("{stage}, phi {{{a}}}"),
                    outcome,
                });
            }
        }
        Ok(())
    }
}

/// Hard-coded certificates for the two base graphs, verified on the
/// spot.
pub fn base_certs(base: &SpBase) -> Result<CertPair, ConstructError> {
    let graph = base.build();
    let mut delta = BTreeMap::new();
    let mut phi = BTreeMap::new();
    match base {
        SpBase::K3(names) => {
            let all: EdgeSet = names.iter().cloned().collect();
            let cycle = all.clone();
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let (a, b) = (&names[i], &names[j]);
                    let third = names.iter().find(|x| *x != a && *x != b).unwrap();
                    let mut cert = DeltaCert::new("", a.clone(), b.clone());
                    let a_set: EdgeSet = [third.clone()].into_iter().collect();
                    cert.body
                        .push(EdgeSet::new(), a_set.clone(), cycle.clone(), Sign::Plus)?;
                    cert.body
                        .push(a_set.clone(), a_set.clone(), cycle.clone(), Sign::Plus)?;
                    delta.insert(pair_key(a, b), cert);
                }
            }
            for a in names {
                let others: Vec<EdgeId> = names.iter().filter(|x| *x != a).cloned().collect();
                let b_set: EdgeSet = others.iter().cloned().collect();
                let mut cert = PhiCert::new("", a.clone());
                for q_mask in 1u8..4 {
                    let q: EdgeSet = others
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| q_mask >> i & 1 == 1)
                        .map(|(_, x)| x.clone())
                        .collect();
                    cert.body
                        .push(q, b_set.clone(), cycle.clone(), Sign::Plus)?;
                }
                phi.insert(a.clone(), cert);
            }
        }
        SpBase::K3Star(names) => {
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let (a, b) = (&names[i], &names[j]);
                    let cycle: EdgeSet = [a.clone(), b.clone()].into_iter().collect();
                    let mut cert = DeltaCert::new("", a.clone(), b.clone());
                    cert.body
                        .push(EdgeSet::new(), EdgeSet::new(), cycle, Sign::Plus)?;
                    delta.insert(pair_key(a, b), cert);
                }
            }
            for a in names {
                let mut cert = PhiCert::new("", a.clone());
                for x in names.iter().filter(|x| *x != a) {
                    let q: EdgeSet = [x.clone()].into_iter().collect();
                    let cycle: EdgeSet = [a.clone(), x.clone()].into_iter().collect();
                    cert.body.push(q.clone(), q.clone(), cycle, Sign::Plus)?;
                }
                phi.insert(a.clone(), cert);
            }
        }
    }
    let pair = CertPair { graph, delta, phi };
    pair.verify_all("base")?;
    Ok(pair)
}

/// Restricts a certificate body to index sets avoiding `g` (the
/// deletion rule). Outer sets whose list empties are kept only when
/// they remain valid outer sets of `after` (the deleted graph).
fn body_delete(
    body: &CertBody,
    g: &EdgeId,
    after: &MultiGraph,
    pins: &[EdgeId],
) -> Result<CertBody, CertError> {
    let cycles = after.enumerate_cycles();
    let mut out = CertBody::new();
    for (outer, list) in &body.entries {
        if outer.contains(g) {
            continue;
        }
        let kept: Vec<_> = list
            .iter()
            .filter(|(inner, _)| !inner.contains(g))
            .collect();
        if kept.is_empty() {
            let mut with_pins = outer.clone();
            with_pins.extend(pins.iter().cloned());
            if cycles.iter().any(|c| with_pins.is_subset(c)) {
                out.entries.entry(outer.clone()).or_default();
            }
            continue;
        }
        for (inner, cycle) in kept {
            let sign = sign_of(body, outer, cycle)?;
            out.push(outer.clone(), inner.clone(), cycle.clone(), sign)?;
        }
    }
    Ok(out)
}

/// The contraction rule: keep outer sets avoiding `g` and inner sets
/// containing it, drop `g` from the inner set, and shrink the cycle
/// when it ran through `g`. Signs are inherited; a sign conflict on the
/// shrunk cycles would mean the rule is unsound and is reported.
fn body_contract(
    body: &CertBody,
    g: &EdgeId,
    after: &MultiGraph,
    pins: &[EdgeId],
) -> Result<CertBody, CertError> {
    let cycles = after.enumerate_cycles();
    let mut out = CertBody::new();
    for (outer, list) in &body.entries {
        if outer.contains(g) {
            continue;
        }
        let kept: Vec<_> = list.iter().filter(|(inner, _)| inner.contains(g)).collect();
        if kept.is_empty() {
            let mut with_pins = outer.clone();
            with_pins.extend(pins.iter().cloned());
            if cycles.iter().any(|c| with_pins.is_subset(c)) {
                out.entries.entry(outer.clone()).or_default();
            }
            continue;
        }
        for (inner, cycle) in kept {
            let sign = sign_of(body, outer, cycle)?;
            let new_inner: EdgeSet = inner.iter().filter(|x| *x != g).cloned().collect();
            let new_cycle: EdgeSet = cycle.iter().filter(|x| *x != g).cloned().collect();
            out.push(outer.clone(), new_inner, new_cycle, sign)?;
        }
    }
    Ok(out)
}

/// Δ certificate for `G∖g` from one for `G` (`g` outside the pair).
/// `after` is the deleted graph.
pub fn cert_delete(
    cert: &DeltaCert,
    g: &EdgeId,
    after: &MultiGraph,
) -> Result<DeltaCert, ConstructError> {
    if g == &cert.e || g == &cert.f {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            g.as_str(),
        ))));
    }
    let body = body_delete(&cert.body, g, after, &[cert.e.clone(), cert.f.clone()])?;
    Ok(DeltaCert {
        graph: cert.graph.clone(),
        e: cert.e.clone(),
        f: cert.f.clone(),
        body,
    })
}

/// Δ certificate for `G/g` from one for `G`.
pub fn cert_contract(
    cert: &DeltaCert,
    g: &EdgeId,
    after: &MultiGraph,
) -> Result<DeltaCert, ConstructError> {
    if g == &cert.e || g == &cert.f {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            g.as_str(),
        ))));
    }
    let body = body_contract(&cert.body, g, after, &[cert.e.clone(), cert.f.clone()])?;
    Ok(DeltaCert {
        graph: cert.graph.clone(),
        e: cert.e.clone(),
        f: cert.f.clone(),
        body,
    })
}

/// Φ analogue of [`cert_delete`].
pub fn phi_cert_delete(
    cert: &PhiCert,
    g: &EdgeId,
    after: &MultiGraph,
) -> Result<PhiCert, ConstructError> {
    if g == &cert.e {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            g.as_str(),
        ))));
    }
    let body = body_delete(&cert.body, g, after, &[cert.e.clone()])?;
    Ok(PhiCert {
        graph: cert.graph.clone(),
        e: cert.e.clone(),
        body,
    })
}

/// Φ analogue of [`cert_contract`].
pub fn phi_cert_contract(
    cert: &PhiCert,
    g: &EdgeId,
    after: &MultiGraph,
) -> Result<PhiCert, ConstructError> {
    if g == &cert.e {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            g.as_str(),
        ))));
    }
    let body = body_contract(&cert.body, g, after, &[cert.e.clone()])?;
    Ok(PhiCert {
        graph: cert.graph.clone(),
        e: cert.e.clone(),
        body,
    })
}

/// Δ certificate of a one-point or disjoint union `H ⊕ K` from one of
/// `H`: outer sets unchanged, every inner set joined with every forest
/// of `K`.
pub fn cert_direct_sum(cert: &DeltaCert, k: &MultiGraph) -> Result<DeltaCert, ConstructError> {
    for e in k.edges() {
        if e.id == cert.e || e.id == cert.f {
            return Err(ConstructError::Graph(GraphError::NameCollision(
                String::from(e.id.as_str()),
            )));
        }
    }
    let forests = k.enumerate_forests();
    let mut body = CertBody::new();
    for (outer, list) in &cert.body.entries {
        if outer.iter().any(|x| k.has_edge(x)) {
            return Err(ConstructError::Graph(GraphError::NameCollision(
                String::from(outer.iter().next().unwrap().as_str()),
            )));
        }
        if list.is_empty() {
            body.entries.entry(outer.clone()).or_default();
            continue;
        }
        for (inner, cycle) in list {
            let sign = sign_of(&cert.body, outer, cycle)?;
            for forest in &forests {
                let mut joined = inner.clone();
                joined.extend(forest.iter().cloned());
                body.push(outer.clone(), joined, cycle.clone(), sign)?;
            }
        }
    }
    body.normalize();
    Ok(DeltaCert {
        graph: cert.graph.clone(),
        e: cert.e.clone(),
        f: cert.f.clone(),
        body,
    })
}

/// Φ analogue of [`cert_direct_sum`]: Q-sets unchanged, every B-set
/// joined with every forest of the other piece.
pub fn phi_cert_direct_sum(cert: &PhiCert, k: &MultiGraph) -> Result<PhiCert, ConstructError> {
    if k.has_edge(&cert.e) {
        return Err(ConstructError::Graph(GraphError::NameCollision(
            String::from(cert.e.as_str()),
        )));
    }
    let forests = k.enumerate_forests();
    let mut body = CertBody::new();
    for (outer, list) in &cert.body.entries {
        if outer.iter().any(|x| k.has_edge(x)) {
            return Err(ConstructError::Graph(GraphError::NameCollision(
                String::from(outer.iter().next().unwrap().as_str()),
            )));
        }
        if list.is_empty() {
            body.entries.entry(outer.clone()).or_default();
            continue;
        }
        for (inner, cycle) in list {
            let sign = sign_of(&cert.body, outer, cycle)?;
            for forest in &forests {
                let mut joined = inner.clone();
                joined.extend(forest.iter().cloned());
                body.push(outer.clone(), joined, cycle.clone(), sign)?;
            }
        }
    }
    body.normalize();
    Ok(PhiCert {
        graph: cert.graph.clone(),
        e: cert.e.clone(),
        body,
    })
}

/// Cross rule for `G = H ⊕_g K` with `e ∈ H−g`, `f ∈ K−g`: composes a
/// Δ certificate of `H{e,g}` with one of `K{g,f}`. Outer and inner sets
/// unite, cycles glue by symmetric difference through `g`, signs
/// multiply.
pub fn cert_cross_two_sum(
    ch: &DeltaCert,
    ck: &DeltaCert,
    g: &EdgeId,
) -> Result<DeltaCert, ConstructError> {
    let e = other_of(ch, g)?;
    let f = other_of(ck, g)?;
    let mut body = CertBody::new();
    for (s_h, list_h) in &ch.body.entries {
        for (s_k, list_k) in &ck.body.entries {
            let mut outer = s_h.clone();
            outer.extend(s_k.iter().cloned());
            if list_h.is_empty() || list_k.is_empty() {
                body.entries.entry(outer).or_default();
                continue;
            }
            for (a_h, c_h) in list_h {
                let sign_h = sign_of(&ch.body, s_h, c_h)?;
                for (a_k, c_k) in list_k {
                    let sign_k = sign_of(&ck.body, s_k, c_k)?;
                    let mut inner = a_h.clone();
                    inner.extend(a_k.iter().cloned());
                    let mut cycle: EdgeSet = c_h.iter().filter(|x| *x != g).cloned().collect();
                    cycle.extend(c_k.iter().filter(|x| *x != g).cloned());
                    body.push(outer.clone(), inner, cycle, sign_h.mul(sign_k))?;
                }
            }
        }
    }
    body.normalize();
    Ok(DeltaCert {
        graph: String::new(),
        e,
        f,
        body,
    })
}

fn other_of(cert: &DeltaCert, g: &EdgeId) -> Result<EdgeId, ConstructError> {
    if &cert.e == g {
        Ok(cert.f.clone())
    } else if &cert.f == g {
        Ok(cert.e.clone())
    } else {
        Err(ConstructError::Graph(GraphError::UnknownEdge(
            String::from(g.as_str()),
        )))
    }
}

/// Forest data of the second factor, prepared once per composition.
struct FactorForests {
    /// All forests of `K∖g`.
    all: Vec<EdgeSet>,
    /// Those connecting the glue endpoints, with their unique path.
    connecting: Vec<(EdgeSet, EdgeSet)>,
    /// Those avoiding a glue-endpoint connection (forests of `K/g`).
    split: Vec<EdgeSet>,
}

fn factor_forests(k: &MultiGraph, g: &EdgeId) -> Result<FactorForests, ConstructError> {
    let glue = k.edge(g)?.clone();
    let deleted = k.delete_edge(g)?;
    let all = deleted.enumerate_forests();
    let mut connecting = Vec::new();
    let mut split = Vec::new();
    for forest in &all {
        if deleted.connects(forest, glue.u, glue.v) {
            let path = forest_path(&deleted, forest, glue.u, glue.v);
            connecting.push((forest.clone(), path));
        } else {
            split.push(forest.clone());
        }
    }
    Ok(FactorForests {
        all,
        connecting,
        split,
    })
}

/// Unique path between two connected vertices of a forest.
fn forest_path(g: &MultiGraph, forest: &EdgeSet, from: u32, to: u32) -> EdgeSet {
    fn walk(
        g: &MultiGraph,
        forest: &EdgeSet,
        at: u32,
        to: u32,
        via: Option<&EdgeId>,
        path: &mut Vec<EdgeId>,
    ) -> bool {
        if at == to {
            return true;
        }
        for e in g.edges().iter().filter(|e| forest.contains(&e.id)) {
            if Some(&e.id) == via || (e.u != at && e.v != at) || e.is_loop() {
                continue;
            }
            path.push(e.id.clone());
            if walk(g, forest, e.other_end(at), to, Some(&e.id), path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    let ok = walk(g, forest, from, to, None, &mut path);
    debug_assert!(ok, "endpoints were checked to be connected");
    path.into_iter().collect()
}

/// The shared same-side composition over `G = H ⊕_g K`: rewrites the
/// body of an H-side certificate with pins `pins` (either `{e}` or
/// `{e,f}`), consuming a Φ certificate of `K` at `g`.
fn compose_same_side(
    h: &MultiGraph,
    body_h: &CertBody,
    pins: &[EdgeId],
    k: &MultiGraph,
    phi_k: &PhiCert,
    g: &EdgeId,
) -> Result<CertBody, ConstructError> {
    let glue_h = h.edge(g)?.clone();
    let forests = factor_forests(k, g)?;
    let h_cycles = h.enumerate_cycles();
    // An outer set avoiding g survives with an empty inner list only
    // while it still sits inside a cycle of the two-sum: either an
    // H-cycle avoiding g, or a g-cycle of H completed by a connecting
    // forest on the other side.
    let still_outer = |outer: &EdgeSet| -> bool {
        let mut with_pins = outer.clone();
        with_pins.extend(pins.iter().cloned());
        h_cycles.iter().any(|c| {
            with_pins.is_subset(c) && (!c.contains(g) || !forests.connecting.is_empty())
        })
    };
    let mut out = CertBody::new();

    for (outer_h, list_h) in &body_h.entries {
        if !outer_h.contains(g) {
            // Outer set stays; inner sets split into three families.
            let outer = outer_h.clone();
            if list_h.is_empty() {
                if still_outer(&outer) {
                    out.entries.entry(outer).or_default();
                }
                continue;
            }
            let mut placed_any = false;
            for (inner_h, cycle_h) in list_h {
                let sign = sign_of(body_h, outer_h, cycle_h)?;
                if cycle_h.contains(g) {
                    // Glue on the cycle: splice every connecting forest
                    // of the other side into cycle and inner set.
                    let base_inner: EdgeSet = inner_h.iter().filter(|x| *x != g).cloned().collect();
                    let base_cycle: EdgeSet = cycle_h.iter().filter(|x| *x != g).cloned().collect();
                    for (forest, path) in &forests.connecting {
                        let mut inner = base_inner.clone();
                        inner.extend(forest.iter().cloned());
                        let mut cycle = base_cycle.clone();
                        cycle.extend(path.iter().cloned());
                        out.push(outer.clone(), inner, cycle, sign)?;
                        placed_any = true;
                    }
                } else if inner_h.contains(g) {
                    // Absorbed into the family below under inner∖g.
                    continue;
                } else {
                    let mut with_pins = inner_h.clone();
                    with_pins.extend(pins.iter().cloned());
                    let choices: &[EdgeSet] = if h.connects(&with_pins, glue_h.u, glue_h.v) {
                        &forests.split
                    } else {
                        &forests.all
                    };
                    for forest in choices {
                        let mut inner = inner_h.clone();
                        inner.extend(forest.iter().cloned());
                        out.push(outer.clone(), inner, cycle_h.clone(), sign)?;
                        placed_any = true;
                    }
                }
            }
            if !placed_any && still_outer(&outer) {
                out.entries.entry(outer).or_default();
            }
        } else {
            // Outer set runs through the glue: join with the Q-sets of
            // the other factor.
            let reduced: EdgeSet = outer_h.iter().filter(|x| *x != g).cloned().collect();
            for (q_k, list_k) in &phi_k.body.entries {
                let mut outer = reduced.clone();
                outer.extend(q_k.iter().cloned());
                if list_h.is_empty() || list_k.is_empty() {
                    out.entries.entry(outer).or_default();
                    continue;
                }
                for (inner_h, cycle_h) in list_h {
                    let sign_h = sign_of(body_h, outer_h, cycle_h)?;
                    for (inner_k, cycle_k) in list_k {
                        let sign_k = sign_of(&phi_k.body, q_k, cycle_k)?;
                        let mut inner: EdgeSet =
                            inner_h.iter().filter(|x| *x != g).cloned().collect();
                        inner.extend(inner_k.iter().cloned());
                        let mut cycle: EdgeSet =
                            cycle_h.iter().filter(|x| *x != g).cloned().collect();
                        cycle.extend(cycle_k.iter().filter(|x| *x != g).cloned());
                        out.push(outer.clone(), inner, cycle, sign_h.mul(sign_k))?;
                    }
                }
            }
        }
    }
    out.normalize();
    Ok(out)
}

/// Same-side rule: Δ certificate for `{e,f} ⊆ H−g` over `G = H ⊕_g K`,
/// from the H-side Δ certificate and a Φ certificate of `K` at `g`.
pub fn cert_same_side_two_sum(
    h: &MultiGraph,
    ch: &DeltaCert,
    k: &MultiGraph,
    phi_k: &PhiCert,
    g: &EdgeId,
) -> Result<DeltaCert, ConstructError> {
    if &ch.e == g || &ch.f == g {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            g.as_str(),
        ))));
    }
    let body = compose_same_side(h, &ch.body, &[ch.e.clone(), ch.f.clone()], k, phi_k, g)?;
    Ok(DeltaCert {
        graph: String::new(),
        e: ch.e.clone(),
        f: ch.f.clone(),
        body,
    })
}

/// Φ certificate for `e ∈ H−g` over `G = H ⊕_g K`, from Φ certificates
/// of `H` at `e` and of `K` at `g`.
pub fn phi_cert_two_sum(
    h: &MultiGraph,
    ch: &PhiCert,
    k: &MultiGraph,
    phi_k: &PhiCert,
    g: &EdgeId,
) -> Result<PhiCert, ConstructError> {
    if &ch.e == g {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            g.as_str(),
        ))));
    }
    let body = compose_same_side(h, &ch.body, &[ch.e.clone()], k, phi_k, g)?;
    Ok(PhiCert {
        graph: String::new(),
        e: ch.e.clone(),
        body,
    })
}

impl CertPair {
    /// Applies one recipe step, composing or restricting every
    /// certificate and verifying the results before returning.
    pub fn apply_step(&self, step: &SpStep) -> Result<CertPair, ConstructError> {
        match step {
            SpStep::SeriesExtend { edge, low, high } => {
                let base = SpBase::K3([edge.clone(), low.clone(), high.clone()]);
                // Build the triangle with the same orientation the graph
                // replay uses: glue (0,1), low (0,2), high (1,2).
                let mut tri = MultiGraph::new(3);
                tri.add_edge(edge.clone(), 0, 1)?;
                tri.add_edge(low.clone(), 0, 2)?;
                tri.add_edge(high.clone(), 1, 2)?;
                let kcerts = base_certs(&base)?;
                self.extend(&tri, &kcerts, edge, None)
            }
            SpStep::ParallelExtend { edge, new } => {
                let tmp = temp_parallel_name(&self.graph, new);
                let base = SpBase::K3Star([edge.clone(), tmp.clone(), new.clone()]);
                let mut par = MultiGraph::new(2);
                par.add_edge(edge.clone(), 0, 1)?;
                par.add_edge(tmp.clone(), 0, 1)?;
                par.add_edge(new.clone(), 0, 1)?;
                let kcerts = base_certs(&base)?;
                self.extend(&par, &kcerts, edge, Some((tmp, edge.clone())))
            }
            SpStep::Delete(x) => self.minor_delete(x),
            SpStep::Contract(x) => self.minor_contract(x),
        }
    }

    fn extend(
        &self,
        kgraph: &MultiGraph,
        kcerts: &CertPair,
        g: &EdgeId,
        rename: Option<(EdgeId, EdgeId)>,
    ) -> Result<CertPair, ConstructError> {
        let mut new_graph = self.graph.two_sum(kgraph, g)?;
        let h_edges: Vec<EdgeId> = self
            .graph
            .edge_ids()
            .into_iter()
            .filter(|x| x != g)
            .collect();
        let k_edges: Vec<EdgeId> = kgraph.edge_ids().into_iter().filter(|x| x != g).collect();

        let phi_k_at_g = kcerts.phi_cert(g).ok_or_else(|| {
            ConstructError::Graph(GraphError::UnknownEdge(String::from(g.as_str())))
        })?;
        let phi_h_at_g = self.phi_cert(g).ok_or_else(|| {
            ConstructError::Graph(GraphError::UnknownEdge(String::from(g.as_str())))
        })?;

        let mut delta = BTreeMap::new();
        for (i, a) in h_edges.iter().enumerate() {
            for b in h_edges.iter().skip(i + 1) {
                let ch = self.delta_cert(a, b).expect("all pairs maintained");
                let cert = cert_same_side_two_sum(&self.graph, ch, kgraph, phi_k_at_g, g)?;
                delta.insert(pair_key(a, b), cert);
            }
        }
        for a in &h_edges {
            for b in &k_edges {
                let ch = self.delta_cert(a, g).expect("all pairs maintained");
                let ck = kcerts.delta_cert(g, b).expect("all pairs maintained");
                let cert = cert_cross_two_sum(ch, ck, g)?;
                delta.insert(pair_key(a, b), cert);
            }
        }
        for (i, a) in k_edges.iter().enumerate() {
            for b in k_edges.iter().skip(i + 1) {
                let ck = kcerts.delta_cert(a, b).expect("all pairs maintained");
                let cert = cert_same_side_two_sum(kgraph, ck, &self.graph, phi_h_at_g, g)?;
                delta.insert(pair_key(a, b), cert);
            }
        }

        let mut phi = BTreeMap::new();
        for a in &h_edges {
            let ch = self.phi_cert(a).expect("all edges maintained");
            let cert = phi_cert_two_sum(&self.graph, ch, kgraph, phi_k_at_g, g)?;
            phi.insert(a.clone(), cert);
        }
        for a in &k_edges {
            let ck = kcerts.phi_cert(a).expect("all edges maintained");
            let cert = phi_cert_two_sum(kgraph, ck, &self.graph, phi_h_at_g, g)?;
            phi.insert(a.clone(), cert);
        }

        if let Some((tmp, back)) = rename {
            new_graph = new_graph.rename_edge(&tmp, &back)?;
            delta = delta
                .into_iter()
                .map(|((a, b), cert)| {
                    let a2 = if a == tmp { back.clone() } else { a };
                    let b2 = if b == tmp { back.clone() } else { b };
                    let mut cert = cert;
                    if cert.e == tmp {
                        cert.e = back.clone();
                    }
                    if cert.f == tmp {
                        cert.f = back.clone();
                    }
                    cert.body = cert.body.rename(&tmp, &back);
                    (pair_key(&a2, &b2), cert)
                })
                .collect();
            phi = phi
                .into_iter()
                .map(|(a, cert)| {
                    let a2 = if a == tmp { back.clone() } else { a };
                    let mut cert = cert;
                    if cert.e == tmp {
                        cert.e = back.clone();
                    }
                    cert.body = cert.body.rename(&tmp, &back);
                    (a2, cert)
                })
                .collect();
        }

        let pair = CertPair {
            graph: new_graph,
            delta,
            phi,
        };
        pair.verify_all(&format!("two-sum along {g}"))?;
        Ok(pair)
    }

    fn minor_delete(&self, x: &EdgeId) -> Result<CertPair, ConstructError> {
        let new_graph = self.graph.delete_edge(x)?;
        let mut delta = BTreeMap::new();
        for ((a, b), cert) in &self.delta {
            if a == x || b == x {
                continue;
            }
            delta.insert((a.clone(), b.clone()), cert_delete(cert, x, &new_graph)?);
        }
        let mut phi = BTreeMap::new();
        for (a, cert) in &self.phi {
            if a == x {
                continue;
            }
            phi.insert(a.clone(), phi_cert_delete(cert, x, &new_graph)?);
        }
        let pair = CertPair {
            graph: new_graph,
            delta,
            phi,
        };
        pair.verify_all(&format!("delete {x}"))?;
        Ok(pair)
    }

    fn minor_contract(&self, x: &EdgeId) -> Result<CertPair, ConstructError> {
        let new_graph = self.graph.contract_edge(x)?;
        let loop_now =
            |id: &EdgeId| -> bool { new_graph.edge(id).map(|e| e.is_loop()).unwrap_or(true) };
        let mut delta = BTreeMap::new();
        for ((a, b), cert) in &self.delta {
            if a == x || b == x || loop_now(a) || loop_now(b) {
                continue;
            }
            delta.insert((a.clone(), b.clone()), cert_contract(cert, x, &new_graph)?);
        }
        let mut phi = BTreeMap::new();
        for (a, cert) in &self.phi {
            if a == x || loop_now(a) {
                continue;
            }
            phi.insert(a.clone(), phi_cert_contract(cert, x, &new_graph)?);
        }
        let pair = CertPair {
            graph: new_graph,
            delta,
            phi,
        };
        pair.verify_all(&format!("contract {x}"))?;
        Ok(pair)
    }
}

fn temp_parallel_name(g: &MultiGraph, reserved: &EdgeId) -> EdgeId {
    let mut i = 0usize;
    loop {
        let c = EdgeId::new(&format!("_r{i}"));
        if !g.has_edge(&c) && &c != reserved {
            return c;
        }
        i += 1;
    }
}

/// Builds the full certificate family for a series-parallel graph:
/// every block gets its own recipe recursion (pure extensions for
/// 2-connected blocks, tiny delete/contract recipes for bridges), and
/// block certificates extend to the whole graph through the direct-sum
/// rule, since forest polynomials factor over blocks. Every
/// intermediate certificate verifies, and so does the final assembly
/// against the input graph itself.
pub fn construct_all(g: &MultiGraph) -> Result<CertPair, ConstructError> {
    // Per-block certificate families.
    let mut block_certs: Vec<(EdgeSet, CertPair)> = Vec::new();
    for block in g.blocks() {
        let sub = g.spanned_subgraph(&block);
        if sub.edges().iter().all(|ed| ed.is_loop()) {
            continue; // a lone loop supports no certificates
        }
        let recipe = sp_decompose(&sub)?;
        let pair = construct_from_recipe(&recipe)?;
        block_certs.push((block, pair));
    }

    let block_of =
        |x: &EdgeId| -> Option<usize> { block_certs.iter().position(|(b, _)| b.contains(x)) };
    let rest_of = |b: &EdgeSet| -> MultiGraph {
        let keep: EdgeSet = g
            .edge_ids()
            .into_iter()
            .filter(|x| !b.contains(x))
            .collect();
        g.restrict(&keep)
    };

    let edges = non_loop_edge_ids(g);
    let mut delta = BTreeMap::new();
    for (i, a) in edges.iter().enumerate() {
        for b in edges.iter().skip(i + 1) {
            let ba = block_of(a).expect("non-loop edge lies in a block");
            let bb = block_of(b).expect("non-loop edge lies in a block");
            let cert = if ba == bb {
                let (block, pair) = &block_certs[ba];
                let inner = pair.delta_cert(a, b).expect("pair maintained per block");
                cert_direct_sum(inner, &rest_of(block))?
            } else {
                // No cycle meets both edges; the difference is zero and
                // the empty certificate says so.
                DeltaCert::new("", a.clone(), b.clone())
            };
            delta.insert(pair_key(a, b), cert);
        }
    }
    let mut phi = BTreeMap::new();
    for a in &edges {
        let ba = block_of(a).expect("non-loop edge lies in a block");
        let (block, pair) = &block_certs[ba];
        let inner = pair.phi_cert(a).expect("edge maintained per block");
        phi.insert(a.clone(), phi_cert_direct_sum(inner, &rest_of(block))?);
    }

    let assembled = CertPair {
        graph: g.clone(),
        delta,
        phi,
    };
    assembled.verify_all("block assembly")?;
    Ok(assembled)
}

fn non_loop_edge_ids(g: &MultiGraph) -> Vec<EdgeId> {
    g.edge_ids()
        .into_iter()
        .filter(|x| !g.edge(x).unwrap().is_loop())
        .collect()
}

/// Same as [`construct_all`], starting from an explicit recipe.
pub fn construct_from_recipe(recipe: &SpRecipe) -> Result<CertPair, ConstructError> {
    if !recipe.is_well_ordered() {
        return Err(ConstructError::Cert(CertError::Malformed(String::from(
            "recipe interleaves extensions with deletions/contractions",
        ))));
    }
    let mut pair = base_certs(&recipe.base)?;
    for step in &recipe.steps {
        pair = pair.apply_step(step)?;
    }
    Ok(pair)
}

/// Δ certificate for one pair of a series-parallel graph.
pub fn construct_delta(
    g: &MultiGraph,
    e: &EdgeId,
    f: &EdgeId,
) -> Result<DeltaCert, ConstructError> {
    if e == f {
        return Err(ConstructError::Graph(GraphError::SameEdge(String::from(
            e.as_str(),
        ))));
    }
    for x in [e, f] {
        if g.is_loop(x)? {
            return Err(ConstructError::Graph(GraphError::LoopEdge(String::from(
                x.as_str(),
            ))));
        }
    }
    let pair = construct_all(g)?;
    pair.delta_cert(e, f)
        .cloned()
        .ok_or_else(|| ConstructError::Graph(GraphError::UnknownEdge(String::from(e.as_str()))))
}

/// Φ certificate for one edge of a series-parallel graph.
pub fn construct_phi(g: &MultiGraph, e: &EdgeId) -> Result<PhiCert, ConstructError> {
    if g.is_loop(e)? {
        return Err(ConstructError::Graph(GraphError::LoopEdge(String::from(
            e.as_str(),
        ))));
    }
    let pair = construct_all(g)?;
    pair.phi_cert(e)
        .cloned()
        .ok_or_else(|| ConstructError::Graph(GraphError::UnknownEdge(String::from(e.as_str()))))
}

/// Splitting of a Φ certificate expansion by the degree of `y_f`, and
/// the cross-term comparison for the pair `(e, f)`:
///
/// the degree-1 coefficient beyond the Δ part should, conjecturally,
/// match `G^{ef}·G_{ef} − G_e^f·G_{ef}`. The report records the exact
/// residual; nothing asserts it is zero.
#[derive(Clone, Debug)]
pub struct CrossTermReport {
    /// `Σ_{Q: f∉Q} y^Q · (f-part of inner sum) · (f-free part)`.
    pub cross_terms: Polynomial,
    /// `G^{ef}·G_{ef} − G_e^f·G_{ef}`.
    pub reference: Polynomial,
    /// `cross_terms − reference`.
    pub residual: Polynomial,
}

impl CrossTermReport {
    pub fn residual_is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Computes the cross-term residual of a verified Φ certificate with
/// respect to a second edge `f`.
pub fn cross_term_residual(
    g: &MultiGraph,
    e: &EdgeId,
    f: &EdgeId,
    cphi: &PhiCert,
) -> Result<CrossTermReport, ConstructError> {
    let outcome = verify_phi(g, e, cphi);
    if !outcome.is_verified() {
        return Err(ConstructError::Verify {
            stage: format!("phi {{{e}}} input of cross-term split"),
            outcome,
        });
    }
    let mut cross = Polynomial::zero();
    for (q, list) in &cphi.body.entries {
        if q.contains(f) {
            continue;
        }
        let mut with_f = Polynomial::zero();
        let mut without_f = Polynomial::zero();
        for (b, d) in list {
            let sign = sign_of(&cphi.body, q, d)?;
            if b.contains(f) {
                let reduced: Vec<&EdgeId> = b.difference(q).filter(|x| *x != f).collect();
                with_f = with_f.add(&Polynomial::from_monomial(
                    crate::poly::Monomial::from_set(reduced.into_iter()),
                    sign.to_bigint(),
                ));
            } else {
                let reduced: Vec<&EdgeId> = b.difference(q).collect();
                without_f = without_f.add(&Polynomial::from_monomial(
                    crate::poly::Monomial::from_set(reduced.into_iter()),
                    sign.to_bigint(),
                ));
            }
        }
        cross = cross.add(
            &Polynomial::from_edge_set(q.iter())
                .mul(&with_f)
                .mul(&without_f),
        );
    }
    let fp = rayleigh::forest_poly(g);
    let reference = fp
        .eval_at_zero(e)
        .eval_at_zero(f)
        .mul(&fp.partial(e).partial(f))
        .sub(&fp.eval_at_zero(f).partial(e).mul(&fp.partial(e).partial(f)));
    let residual = cross.sub(&reference);
    Ok(CrossTermReport {
        cross_terms: cross,
        reference,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::{sign_search_delta, verify_delta, SearchOutcome, DEFAULT_SEARCH_BUDGET};
    use crate::poly::Polynomial as P;
    use crate::rng::SplitMix64;

    fn e(name: &str) -> EdgeId {
        EdgeId::new(name)
    }

    fn p(s: &str) -> Polynomial {
        P::parse(s).unwrap()
    }

    fn k3_base() -> SpBase {
        SpBase::K3([e("e"), e("f"), e("g")])
    }

    fn star_base() -> SpBase {
        SpBase::K3Star([e("e"), e("f"), e("g")])
    }

    #[test]
    fn base_certs_verify_and_expand() {
        let k3 = base_certs(&k3_base()).unwrap();
        let dc = k3.delta_cert(&e("e"), &e("f")).unwrap();
        assert_eq!(dc.expand().unwrap(), p("y_g + y_g^2"));
        let pc = k3.phi_cert(&e("e")).unwrap();
        assert_eq!(pc.expand().unwrap(), p("y_f*y_g^2 + y_g*y_f^2 + y_f*y_g"));

        let star = base_certs(&star_base()).unwrap();
        let pc = star.phi_cert(&e("e")).unwrap();
        assert_eq!(pc.expand().unwrap(), p("y_f + y_g"));
    }

    #[test]
    fn direct_sum_with_single_edge() {
        let k3 = base_certs(&k3_base()).unwrap();
        let dc = k3.delta_cert(&e("e"), &e("f")).unwrap();
        let mut extra = MultiGraph::new(2);
        extra.add_edge("h".into(), 0, 1).unwrap();
        let summed = cert_direct_sum(dc, &extra).unwrap();
        // (1 + y_h)² (y_g + y_g²)
        assert_eq!(
            summed.expand().unwrap(),
            p("y_g + y_g^2").mul(&p("1 + y_h").square())
        );
        // Joining with the empty graph changes nothing.
        let unchanged = cert_direct_sum(dc, &MultiGraph::new(0)).unwrap();
        assert_eq!(unchanged.expand().unwrap(), dc.expand().unwrap());
    }

    #[test]
    fn direct_sum_verifies_on_one_point_union() {
        // Triangle plus a pendant edge at vertex 0.
        let mut g = MultiGraph::triangle("e", "f", "g");
        g.add_vertex(3);
        g.add_edge("h".into(), 0, 3).unwrap();
        let k3 = base_certs(&k3_base()).unwrap();
        let dc = k3.delta_cert(&e("e"), &e("f")).unwrap();
        let mut extra = MultiGraph::new(2);
        extra.add_edge("h".into(), 0, 1).unwrap();
        let summed = cert_direct_sum(dc, &extra).unwrap();
        assert!(verify_delta(&g, &e("e"), &e("f"), &summed).is_verified());
    }

    #[test]
    fn direct_sum_rejects_name_collision() {
        let k3 = base_certs(&k3_base()).unwrap();
        let dc = k3.delta_cert(&e("e"), &e("f")).unwrap();
        let mut extra = MultiGraph::new(2);
        extra.add_edge("e".into(), 0, 1).unwrap();
        assert!(matches!(
            cert_direct_sum(dc, &extra),
            Err(ConstructError::Graph(GraphError::NameCollision(_)))
        ));
    }

    #[test]
    fn cross_two_sum_triangle_with_parallel_triple() {
        let h = MultiGraph::triangle("e", "g", "h");
        let k = MultiGraph::parallel_triple("g", "f", "k");
        let hc = base_certs(&SpBase::K3([e("e"), e("g"), e("h")])).unwrap();
        let kc = base_certs(&SpBase::K3Star([e("g"), e("f"), e("k")])).unwrap();
        let cross = cert_cross_two_sum(
            hc.delta_cert(&e("e"), &e("g")).unwrap(),
            kc.delta_cert(&e("g"), &e("f")).unwrap(),
            &e("g"),
        )
        .unwrap();
        assert_eq!(cross.expand().unwrap(), p("y_h + y_h^2"));
        let g = h.two_sum(&k, &e("g")).unwrap();
        assert!(verify_delta(&g, &e("e"), &e("f"), &cross).is_verified());
    }

    #[test]
    fn same_side_two_sum_doubled_triangle() {
        // K3{e,f,g} ⊕_g (K3)*{g,h,k}: Δ{e,f} of the triangle with a
        // doubled third side.
        let h = MultiGraph::triangle("e", "f", "g");
        let k = MultiGraph::parallel_triple("g", "h", "k");
        let hc = base_certs(&SpBase::K3([e("e"), e("f"), e("g")])).unwrap();
        let kc = base_certs(&SpBase::K3Star([e("g"), e("h"), e("k")])).unwrap();
        let cert = cert_same_side_two_sum(
            &h,
            hc.delta_cert(&e("e"), &e("f")).unwrap(),
            &k,
            kc.phi_cert(&e("g")).unwrap(),
            &e("g"),
        )
        .unwrap();
        let g = h.two_sum(&k, &e("g")).unwrap();
        assert!(verify_delta(&g, &e("e"), &e("f"), &cert).is_verified());
    }

    #[test]
    fn same_side_two_sum_subdivided_triangle() {
        let h = MultiGraph::triangle("e", "f", "g");
        let k = MultiGraph::triangle("g", "h", "k");
        let hc = base_certs(&SpBase::K3([e("e"), e("f"), e("g")])).unwrap();
        let kc = base_certs(&SpBase::K3([e("g"), e("h"), e("k")])).unwrap();
        let cert = cert_same_side_two_sum(
            &h,
            hc.delta_cert(&e("e"), &e("f")).unwrap(),
            &k,
            kc.phi_cert(&e("g")).unwrap(),
            &e("g"),
        )
        .unwrap();
        let g = h.two_sum(&k, &e("g")).unwrap();
        assert!(verify_delta(&g, &e("e"), &e("f"), &cert).is_verified());
    }

    #[test]
    fn phi_two_sum_verifies() {
        let h = MultiGraph::triangle("e", "g", "h");
        let k = MultiGraph::parallel_triple("g", "f", "k");
        let hc = base_certs(&SpBase::K3([e("e"), e("g"), e("h")])).unwrap();
        let kc = base_certs(&SpBase::K3Star([e("g"), e("f"), e("k")])).unwrap();
        let cert = phi_cert_two_sum(
            &h,
            hc.phi_cert(&e("e")).unwrap(),
            &k,
            kc.phi_cert(&e("g")).unwrap(),
            &e("g"),
        )
        .unwrap();
        let g = h.two_sum(&k, &e("g")).unwrap();
        assert!(verify_phi(&g, &e("e"), &cert).is_verified());
    }

    #[test]
    fn flipping_one_sign_of_a_two_cycle_group_breaks_verification() {
        // The doubled triangle has two cycles through {e,f}; the empty
        // outer set carries one sign per cycle, and flipping only one
        // of them changes the square.
        let h = MultiGraph::triangle("e", "f", "g");
        let k = MultiGraph::parallel_triple("g", "h", "k");
        let g = h.two_sum(&k, &e("g")).unwrap();
        let mut cert = construct_delta(&g, &e("e"), &e("f")).unwrap();
        assert!(verify_delta(&g, &e("e"), &e("f"), &cert).is_verified());
        let multi_key = cert
            .body
            .signs
            .keys()
            .find(|(outer, _)| {
                cert.body
                    .signs
                    .keys()
                    .filter(|(o, _)| o == outer)
                    .count()
                    > 1
            })
            .cloned()
            .expect("some outer set has two cycles");
        let old = cert.body.signs[&multi_key];
        cert.body.signs.insert(multi_key, old.mul(Sign::Minus));
        assert!(matches!(
            verify_delta(&g, &e("e"), &e("f"), &cert),
            crate::cert::VerifyOutcome::Mismatch(_)
        ));
    }

    #[test]
    fn phi_two_sum_with_single_edge_factor_is_deletion() {
        // Gluing along g with a lone edge removes g; the composed
        // certificate must match the deletion-restricted one.
        let h = MultiGraph::triangle("e", "g", "h");
        let hc = base_certs(&SpBase::K3([e("e"), e("g"), e("h")])).unwrap();
        let mut k = MultiGraph::new(2);
        k.add_edge("g".into(), 0, 1).unwrap();
        let kphi = PhiCert::new("", e("g")); // a bridge has no Q-sets
        let composed = phi_cert_two_sum(
            &h,
            hc.phi_cert(&e("e")).unwrap(),
            &k,
            &kphi,
            &e("g"),
        )
        .unwrap();
        let deleted = h.delete_edge(&e("g")).unwrap();
        assert!(verify_phi(&deleted, &e("e"), &composed).is_verified());
        let direct = phi_cert_delete(hc.phi_cert(&e("e")).unwrap(), &e("g"), &deleted).unwrap();
        assert_eq!(
            composed.expand().unwrap(),
            direct.expand().unwrap()
        );
    }

    #[test]
    fn four_cycle_certificates_via_recipe() {
        let g = MultiGraph::cycle(4);
        let pair = construct_all(&g).unwrap();
        assert_eq!(pair.delta.len(), 6);
        assert_eq!(pair.phi.len(), 4);
        // Opposite pair agrees with the search result.
        let (a, b) = (e("c0"), e("c2"));
        let constructed = pair.delta_cert(&a, &b).unwrap();
        let searched = sign_search_delta(&g, &a, &b, DEFAULT_SEARCH_BUDGET).unwrap();
        let searched = searched.found().expect("cycle is series-parallel");
        assert_eq!(constructed.expand().unwrap(), searched.expand().unwrap());
    }

    #[test]
    fn cert_delete_on_k3_gives_empty_cert() {
        let k3 = base_certs(&k3_base()).unwrap();
        let dc = k3.delta_cert(&e("e"), &e("f")).unwrap();
        let after = k3.graph.delete_edge(&e("g")).unwrap();
        let restricted = cert_delete(dc, &e("g"), &after).unwrap();
        assert!(restricted.expand().unwrap().is_zero());
        assert!(verify_delta(&after, &e("e"), &e("f"), &restricted).is_verified());
    }

    #[test]
    fn cert_minors_match_coefficient_extraction() {
        let g = MultiGraph::cycle(4);
        let pair = construct_all(&g).unwrap();
        let (a, b, x) = (e("c0"), e("c1"), e("c3"));
        let dc = pair.delta_cert(&a, &b).unwrap();
        let full = rayleigh::delta(&g, &a, &b).unwrap();

        let contracted_graph = g.contract_edge(&x).unwrap();
        let contracted = cert_contract(dc, &x, &contracted_graph).unwrap();
        assert!(verify_delta(&contracted_graph, &a, &b, &contracted).is_verified());
        assert_eq!(contracted.expand().unwrap(), full.coeff_extract(&x, 2),);

        let deleted_graph = g.delete_edge(&x).unwrap();
        let deleted = cert_delete(dc, &x, &deleted_graph).unwrap();
        assert!(verify_delta(&deleted_graph, &a, &b, &deleted).is_verified());
        assert_eq!(deleted.expand().unwrap(), full.coeff_extract(&x, 0));
    }

    #[test]
    fn cert_minor_rejects_pinned_edge() {
        let k3 = base_certs(&k3_base()).unwrap();
        let dc = k3.delta_cert(&e("e"), &e("f")).unwrap();
        let after = k3.graph.delete_edge(&e("e")).unwrap();
        assert!(cert_delete(dc, &e("e"), &after).is_err());
    }

    #[test]
    fn construct_delta_rejects_non_sp() {
        let g = MultiGraph::complete(4);
        let ids = g.edge_ids();
        assert!(matches!(
            construct_delta(&g, &ids[0], &ids[1]),
            Err(ConstructError::NotSeriesParallel(_))
        ));
    }

    #[test]
    fn construct_on_random_recipes() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..8 {
            let recipe = crate::sp::random_recipe(&mut rng, 4);
            let g = recipe.replay().unwrap();
            let pair = construct_all(&g).unwrap();
            // verify_all already ran; spot-check agreement with the
            // direct Rayleigh difference on one pair.
            if let Some(((a, b), cert)) = pair.delta.iter().next() {
                assert_eq!(
                    cert.expand().unwrap(),
                    rayleigh::delta(&pair.graph, a, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn search_and_construct_agree_on_four_cycle() {
        let g = MultiGraph::cycle(4);
        let ids = g.edge_ids();
        for (i, a) in ids.iter().enumerate() {
            for b in ids.iter().skip(i + 1) {
                let constructed = construct_delta(&g, a, b).unwrap();
                let searched = match sign_search_delta(&g, a, b, DEFAULT_SEARCH_BUDGET).unwrap() {
                    SearchOutcome::Found(c) => c,
                    other => panic!("search failed: {other:?}"),
                };
                assert_eq!(constructed.expand().unwrap(), searched.expand().unwrap());
            }
        }
    }

    #[test]
    fn cross_term_residual_on_k3() {
        let g = MultiGraph::triangle("e", "f", "g");
        let cphi = construct_phi(&g, &e("e")).unwrap();
        let report = cross_term_residual(&g, &e("e"), &e("f"), &cphi).unwrap();
        // Exploratory: the report is recorded, not asserted; but the
        // degree split itself must be consistent with the Φ expansion.
        let phi = rayleigh::phi(&g, &e("e")).unwrap();
        let deg0 = phi.coeff_extract(&e("f"), 0);
        let deg2 = phi.coeff_extract(&e("f"), 2);
        let deg1 = phi.coeff_extract(&e("f"), 1);
        let _ = (deg0, deg1, deg2);
        assert_eq!(report.residual, report.cross_terms.sub(&report.reference));
    }

    #[test]
    fn cross_term_degree_parts_are_minor_certs() {
        let g = MultiGraph::cycle(4);
        let (a, x) = (e("c0"), e("c2"));
        let cphi = construct_phi(&g, &a).unwrap();
        let deleted = g.delete_edge(&x).unwrap();
        let contracted = g.contract_edge(&x).unwrap();
        let del_cert = phi_cert_delete(&cphi, &x, &deleted).unwrap();
        assert!(verify_phi(&deleted, &a, &del_cert).is_verified());
        let con_cert = phi_cert_contract(&cphi, &x, &contracted).unwrap();
        assert!(verify_phi(&contracted, &a, &con_cert).is_verified());
    }

    #[test]
    fn constructed_certificates_have_zero_cross_term_residuals() {
        // Observed behaviour of the recursion's sign choices: on
        // series-parallel graphs the degree-1 cross terms of the
        // constructed squares match the minor product expression
        // exactly. Pinned on a seeded family.
        let mut rng = SplitMix64::new(31337);
        let mut checked = 0u32;
        for _ in 0..20 {
            let recipe = crate::sp::random_recipe(&mut rng, 4);
            let g = recipe.replay().unwrap();
            let pair = construct_all(&g).unwrap();
            for (a, cphi) in &pair.phi {
                for b in pair.graph.edge_ids() {
                    if &b == a || pair.graph.edge(&b).unwrap().is_loop() {
                        continue;
                    }
                    let report = cross_term_residual(&pair.graph, a, &b, cphi).unwrap();
                    assert!(
                        report.residual_is_zero(),
                        "nonzero residual on {:?} at ({a},{b})",
                        pair.graph
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 50, "family too small: {checked}");
    }

    #[test]
    fn cross_term_residual_vanishes_for_bridge_f() {
        // Triangle with a pendant bridge f: no cycle meets both e and
        // f, so the Δ part of the degree-1 coefficient is zero and the
        // cross terms must account for all of it.
        let mut g = MultiGraph::triangle("e", "x", "y");
        g.add_vertex(3);
        g.add_edge("f".into(), 2, 3).unwrap();
        assert!(rayleigh::delta(&g, &e("e"), &e("f")).unwrap().is_zero());
        let cphi = construct_phi(&g, &e("e")).unwrap();
        let report = cross_term_residual(&g, &e("e"), &e("f"), &cphi).unwrap();
        assert!(report.residual_is_zero());
    }
}
