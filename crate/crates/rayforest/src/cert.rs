//! Sum-of-squares certificates for Rayleigh differences.
//!
//! A Δ certificate for a pair `{e,f}` consists of outer index sets
//! (S-sets), and for each of those a list of inner sets (A-sets) paired
//! with a cycle, plus one sign per (S-set, cycle):
//!
//! * an S-set is a set `S ⊆ E−ef` such that `S ∪ {e,f}` lies inside
//!   some cycle of the graph;
//! * an A-set for `S` is a forest `A ⊆ E−ef` such that `A ∪ {e,f}`
//!   contains exactly one cycle `C`, and `S ∪ {e,f} ⊆ C`.
//!
//! The certificate asserts `Δ = Σ_S y^S (Σ_A c(S,C) y^{A−S})²`. The
//! same shape with `e` alone (Q-sets, required non-empty, and B-sets
//! whose unique cycle lives in `B ∪ {e}`) certifies
//! `ΦG{e} = Σ_Q y^Q (Σ_B d(Q,D) y^{B−Q})²`.
//!
//! Note the uniqueness convention: `A ∪ {e,f}` must contain exactly one
//! cycle overall, not merely one cycle sandwiched between `S ∪ {e,f}`
//! and `A ∪ {e,f}`. Under this reading `A ∪ {e}` and `A ∪ {f}` are
//! automatically forests, which is what the composition rules over
//! two-sums rely on.
//!
//! Signs are keyed by (outer set, cycle), so two inner sets sharing a
//! cycle necessarily share a sign; the data type cannot express
//! anything else.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::graph::{EdgeId, EdgeSet, MultiGraph};
use crate::poly::{Monomial, Polynomial};
use crate::rayleigh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_bigint(self) -> BigInt {
        match self {
            Sign::Plus => BigInt::one(),
            Sign::Minus => -BigInt::one(),
        }
    }
}

impl core::fmt::Display for Sign {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertError {
    SignConflict { outer: EdgeSet, cycle: EdgeSet },
    MissingSign { outer: EdgeSet, cycle: EdgeSet },
    Malformed(String),
}

impl core::fmt::Display for CertError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CertError::SignConflict { outer, cycle } => {
                write!(
                    f,
                    "conflicting signs for ({}, {})",
                    fmt_set(outer),
                    fmt_set(cycle)
                )
            }
            CertError::MissingSign { outer, cycle } => {
                write!(
                    f,
                    "missing sign for ({}, {})",
                    fmt_set(outer),
                    fmt_set(cycle)
                )
            }
            CertError::Malformed(msg) => write!(f, "malformed certificate: {msg}"),
        }
    }
}

impl core::error::Error for CertError {}

pub fn fmt_set(s: &EdgeSet) -> String {
    let mut out = String::from("{");
    for (i, e) in s.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(e.as_str());
    }
    out.push('}');
    out
}

/// The index data shared by Δ and Φ certificates: outer set → list of
/// (inner set, cycle), plus a sign per (outer set, cycle).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CertBody {
    pub entries: BTreeMap<EdgeSet, Vec<(EdgeSet, EdgeSet)>>,
    pub signs: BTreeMap<(EdgeSet, EdgeSet), Sign>,
}

impl CertBody {
    pub fn new() -> Self {
        CertBody::default()
    }

    pub fn n_inner_sets(&self) -> usize {
        self.entries.values().map(|v| v.len()).sum()
    }

    /// Adds one (outer, inner, cycle) triple. Fails if a different sign
    /// was already recorded for (outer, cycle).
    pub fn push(
        &mut self,
        outer: EdgeSet,
        inner: EdgeSet,
        cycle: EdgeSet,
        sign: Sign,
    ) -> Result<(), CertError> {
        let key = (outer.clone(), cycle.clone());
        if let Some(&existing) = self.signs.get(&key) {
            if existing != sign {
                return Err(CertError::SignConflict { outer, cycle });
            }
        } else {
            self.signs.insert(key, sign);
        }
        self.entries.entry(outer).or_default().push((inner, cycle));
        Ok(())
    }

    /// Sorts inner lists and drops duplicate (inner, cycle) pairs, so
    /// structurally equal certificates compare equal.
    pub fn normalize(&mut self) {
        for list in self.entries.values_mut() {
            list.sort();
            list.dedup();
        }
    }

    /// `Σ_outer y^outer (Σ_inner sign(outer,cycle) y^{inner−outer})²`.
    pub fn expand(&self) -> Result<Polynomial, CertError> {
        let mut total = Polynomial::zero();
        for (outer, list) in &self.entries {
            let mut inner_sum = Polynomial::zero();
            for (inner, cycle) in list {
                if !outer.is_subset(inner) {
                    return Err(CertError::Malformed(format!(
                        "outer set {} is not contained in inner set {}",
                        fmt_set(outer),
                        fmt_set(inner)
                    )));
                }
                let sign = self
                    .signs
                    .get(&(outer.clone(), cycle.clone()))
                    .copied()
                    .ok_or_else(|| CertError::MissingSign {
                        outer: outer.clone(),
                        cycle: cycle.clone(),
                    })?;
                let diff: Vec<&EdgeId> = inner.difference(outer).collect();
                inner_sum = inner_sum.add(&Polynomial::from_monomial(
                    Monomial::from_set(diff.into_iter()),
                    sign.to_bigint(),
                ));
            }
            total = total.add(&Polynomial::from_edge_set(outer.iter()).mul(&inner_sum.square()));
        }
        Ok(total)
    }

    /// Renames one edge everywhere in the index sets.
    pub fn rename(&self, old: &EdgeId, new: &EdgeId) -> CertBody {
        let map = |s: &EdgeSet| -> EdgeSet {
            s.iter()
                .map(|x| if x == old { new.clone() } else { x.clone() })
                .collect()
        };
        let mut out = CertBody::new();
        for (outer, list) in &self.entries {
            let no = map(outer);
            for (inner, cycle) in list {
                out.entries
                    .entry(no.clone())
                    .or_default()
                    .push((map(inner), map(cycle)));
            }
        }
        for ((outer, cycle), sign) in &self.signs {
            out.signs.insert((map(outer), map(cycle)), *sign);
        }
        out
    }

    /// True when the sign table covers exactly the (outer, cycle) pairs
    /// occurring in the entries.
    pub fn signs_consistent(&self) -> bool {
        let mut needed: BTreeSet<(EdgeSet, EdgeSet)> = BTreeSet::new();
        for (outer, list) in &self.entries {
            for (_, cycle) in list {
                needed.insert((outer.clone(), cycle.clone()));
            }
        }
        needed == self.signs.keys().cloned().collect()
    }
}

/// Certificate that `ΔG{e,f}` is a positive sum of monomials times
/// squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaCert {
    pub graph: String,
    pub e: EdgeId,
    pub f: EdgeId,
    pub body: CertBody,
}

impl DeltaCert {
    pub fn new(graph: &str, e: EdgeId, f: EdgeId) -> Self {
        DeltaCert {
            graph: String::from(graph),
            e,
            f,
            body: CertBody::new(),
        }
    }

    pub fn expand(&self) -> Result<Polynomial, CertError> {
        self.body.expand()
    }
}

/// Certificate that `ΦG{e}` is a positive sum of monomials times
/// squares. Outer sets (Q-sets) are non-empty by definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiCert {
    pub graph: String,
    pub e: EdgeId,
    pub body: CertBody,
}

impl PhiCert {
    pub fn new(graph: &str, e: EdgeId) -> Self {
        PhiCert {
            graph: String::from(graph),
            e,
            body: CertBody::new(),
        }
    }

    pub fn expand(&self) -> Result<Polynomial, CertError> {
        self.body.expand()
    }
}

/// All cycles of the list lying inside `sub`.
fn cycles_within(all_cycles: &[EdgeSet], sub: &EdgeSet) -> Vec<EdgeSet> {
    all_cycles
        .iter()
        .filter(|c| c.is_subset(sub))
        .cloned()
        .collect()
}

/// Enumerates the full index family for the given pin set (`{e,f}` for
/// Δ, `{e}` for Φ): outer sets mapped to their (inner, cycle) lists.
/// Outer sets with no inner sets are still listed. When `outer_nonempty`
/// is set, the empty outer set is excluded (the Φ convention).
fn enumerate_index(
    g: &MultiGraph,
    pins: &[EdgeId],
    outer_nonempty: bool,
) -> BTreeMap<EdgeSet, Vec<(EdgeSet, EdgeSet)>> {
    let all_cycles = g.enumerate_cycles();
    let pin_set: EdgeSet = pins.iter().cloned().collect();

    // Outer sets: subsets of C − pins for each cycle C through all pins.
    let mut outers: BTreeSet<EdgeSet> = BTreeSet::new();
    for c in all_cycles.iter().filter(|c| pin_set.is_subset(c)) {
        let free: Vec<EdgeId> = c.difference(&pin_set).cloned().collect();
        for mask in 0u64..(1u64 << free.len()) {
            let s: EdgeSet = free
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect();
            if outer_nonempty && s.is_empty() {
                continue;
            }
            outers.insert(s);
        }
    }

    let mut entries: BTreeMap<EdgeSet, Vec<(EdgeSet, EdgeSet)>> =
        outers.iter().map(|s| (s.clone(), Vec::new())).collect();

    // Inner sets: forests of E − pins whose union with the pins holds
    // exactly one cycle, going through all pins.
    let rest: EdgeSet = g
        .edge_ids()
        .into_iter()
        .filter(|x| !pin_set.contains(x))
        .collect();
    for forest in g.restrict(&rest).enumerate_forests() {
        let mut with_pins: EdgeSet = forest.clone();
        for p in pins {
            with_pins.insert(p.clone());
        }
        let inside = cycles_within(&all_cycles, &with_pins);
        if inside.len() != 1 {
            continue;
        }
        let cycle = inside.into_iter().next().unwrap();
        if !pin_set.is_subset(&cycle) {
            continue;
        }
        // Every admissible outer set below this cycle gains the pair.
        let free: Vec<EdgeId> = cycle.difference(&pin_set).cloned().collect();
        for mask in 0u64..(1u64 << free.len()) {
            let s: EdgeSet = free
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect();
            if outer_nonempty && s.is_empty() {
                continue;
            }
            entries
                .get_mut(&s)
                .expect("outer sets cover all cycle subsets")
                .push((forest.clone(), cycle.clone()));
        }
    }
    for list in entries.values_mut() {
        list.sort();
    }
    entries
}

/// The full Δ index family of `(g, e, f)`: every S-set mapped to its
/// (A-set, cycle) list.
pub fn delta_index(
    g: &MultiGraph,
    e: &EdgeId,
    f: &EdgeId,
) -> BTreeMap<EdgeSet, Vec<(EdgeSet, EdgeSet)>> {
    enumerate_index(g, &[e.clone(), f.clone()], false)
}

/// The full Φ index family of `(g, e)`: every Q-set mapped to its
/// (B-set, cycle) list. Q-sets are never empty.
pub fn phi_index(g: &MultiGraph, e: &EdgeId) -> BTreeMap<EdgeSet, Vec<(EdgeSet, EdgeSet)>> {
    enumerate_index(g, &[e.clone()], true)
}

/// The S-sets of `(g, e, f)`.
pub fn s_sets(g: &MultiGraph, e: &EdgeId, f: &EdgeId) -> Vec<EdgeSet> {
    delta_index(g, e, f).into_keys().collect()
}

/// The (A-set, cycle) pairs of one S-set; empty when `s` is not an
/// S-set at all.
pub fn a_sets(g: &MultiGraph, s: &EdgeSet, e: &EdgeId, f: &EdgeId) -> Vec<(EdgeSet, EdgeSet)> {
    delta_index(g, e, f).remove(s).unwrap_or_default()
}

/// The Q-sets of `(g, e)`; never contains the empty set.
pub fn q_sets(g: &MultiGraph, e: &EdgeId) -> Vec<EdgeSet> {
    phi_index(g, e).into_keys().collect()
}

/// The (B-set, cycle) pairs of one Q-set.
pub fn b_sets(g: &MultiGraph, q: &EdgeSet, e: &EdgeId) -> Vec<(EdgeSet, EdgeSet)> {
    phi_index(g, e).remove(q).unwrap_or_default()
}

/// Verdict of certificate verification. `Mismatch` carries the
/// difference between the certificate expansion and the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Verified,
    ContextMismatch(String),
    Invalid(String),
    Mismatch(Polynomial),
}

impl VerifyOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyOutcome::Verified)
    }
}

impl core::fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifyOutcome::Verified => f.write_str("verified"),
            VerifyOutcome::ContextMismatch(m) => write!(f, "context mismatch: {m}"),
            VerifyOutcome::Invalid(m) => write!(f, "invalid: {m}"),
            VerifyOutcome::Mismatch(d) => write!(f, "expansion mismatch, difference {d}"),
        }
    }
}

/// Structural check shared by both certificate kinds: each inner set is
/// a forest avoiding the pins whose union with the pins contains exactly
/// the stated cycle, that cycle contains outer ∪ pins, and the sign
/// table covers exactly the listed (outer, cycle) pairs.
fn check_structure(
    g: &MultiGraph,
    all_cycles: &[EdgeSet],
    pins: &[EdgeId],
    body: &CertBody,
    outer_nonempty: bool,
) -> Result<(), String> {
    let pin_set: EdgeSet = pins.iter().cloned().collect();
    let edges = g.edge_set();
    if !body.signs_consistent() {
        return Err(String::from(
            "sign table does not cover exactly the listed (outer set, cycle) pairs",
        ));
    }
    for (outer, list) in &body.entries {
        if outer_nonempty && outer.is_empty() {
            return Err(String::from("empty outer set is not allowed here"));
        }
        if !outer.is_subset(&edges) || outer.iter().any(|x| pin_set.contains(x)) {
            return Err(format!("outer set {} leaves E minus pins", fmt_set(outer)));
        }
        let mut outer_with_pins = outer.clone();
        outer_with_pins.extend(pin_set.iter().cloned());
        if !all_cycles.iter().any(|c| outer_with_pins.is_subset(c)) {
            return Err(format!(
                "outer set {} is not inside any cycle through the pins",
                fmt_set(outer)
            ));
        }
        for (inner, cycle) in list {
            if !inner.is_subset(&edges) || inner.iter().any(|x| pin_set.contains(x)) {
                return Err(format!("inner set {} leaves E minus pins", fmt_set(inner)));
            }
            if !outer.is_subset(inner) {
                return Err(format!(
                    "inner set {} does not contain its outer set {}",
                    fmt_set(inner),
                    fmt_set(outer)
                ));
            }
            if !g.is_forest(inner) {
                return Err(format!("inner set {} is not a forest", fmt_set(inner)));
            }
            let mut with_pins = inner.clone();
            with_pins.extend(pin_set.iter().cloned());
            let inside = cycles_within(all_cycles, &with_pins);
            if inside.len() != 1 || &inside[0] != cycle {
                return Err(format!(
                    "inner set {} does not determine the unique cycle {}",
                    fmt_set(inner),
                    fmt_set(cycle)
                ));
            }
            if !outer_with_pins.is_subset(cycle) {
                return Err(format!(
                    "cycle {} misses the outer set plus pins",
                    fmt_set(cycle)
                ));
            }
        }
    }
    Ok(())
}

/// Precomputed per-graph context shared across many verifications of
/// the same graph: its forest polynomial and cycle list.
pub struct VerifyContext {
    pub graph: MultiGraph,
    forest: Polynomial,
    cycles: Vec<EdgeSet>,
}

impl VerifyContext {
    pub fn new(g: &MultiGraph) -> Self {
        VerifyContext {
            graph: g.clone(),
            forest: rayleigh::forest_poly(g),
            cycles: g.enumerate_cycles(),
        }
    }

    pub fn verify_delta(&self, e: &EdgeId, f: &EdgeId, cert: &DeltaCert) -> VerifyOutcome {
        let pair_matches = (&cert.e == e && &cert.f == f) || (&cert.e == f && &cert.f == e);
        if !pair_matches {
            return VerifyOutcome::ContextMismatch(format!(
                "certificate is for {{{},{}}}, asked about {{{e},{f}}}",
                cert.e, cert.f
            ));
        }
        if !self.graph.has_edge(e) || !self.graph.has_edge(f) {
            return VerifyOutcome::ContextMismatch(String::from("edge pair not in graph"));
        }
        if e == f {
            return VerifyOutcome::ContextMismatch(String::from("edges must be distinct"));
        }
        for x in [e, f] {
            if self.graph.edge(x).map(|y| y.is_loop()).unwrap_or(true) {
                return VerifyOutcome::ContextMismatch(format!("edge `{x}` is a loop"));
            }
        }
        if let Err(msg) = check_structure(
            &self.graph,
            &self.cycles,
            &[e.clone(), f.clone()],
            &cert.body,
            false,
        ) {
            return VerifyOutcome::Invalid(msg);
        }
        let expansion = match cert.expand() {
            Ok(p) => p,
            Err(err) => return VerifyOutcome::Invalid(format!("{err}")),
        };
        let target = rayleigh::delta_via_extracts(&self.forest, e, f);
        let diff = expansion.sub(&target);
        if diff.is_zero() {
            VerifyOutcome::Verified
        } else {
            VerifyOutcome::Mismatch(diff)
        }
    }

    pub fn verify_phi(&self, e: &EdgeId, cert: &PhiCert) -> VerifyOutcome {
        if &cert.e != e {
            return VerifyOutcome::ContextMismatch(format!(
                "certificate is for {{{}}}, asked about {{{e}}}",
                cert.e
            ));
        }
        if self.graph.edge(e).map(|y| y.is_loop()).unwrap_or(true) {
            return VerifyOutcome::ContextMismatch(format!("edge `{e}` is missing or a loop"));
        }
        if let Err(msg) = check_structure(&self.graph, &self.cycles, &[e.clone()], &cert.body, true)
        {
            return VerifyOutcome::Invalid(msg);
        }
        let expansion = match cert.expand() {
            Ok(p) => p,
            Err(err) => return VerifyOutcome::Invalid(format!("{err}")),
        };
        let target = rayleigh::phi_of_poly(&self.forest, e);
        let diff = expansion.sub(&target);
        if diff.is_zero() {
            VerifyOutcome::Verified
        } else {
            VerifyOutcome::Mismatch(diff)
        }
    }
}

/// Verifies a Δ certificate: context, structural invariants, and exact
/// equality of the expansion with `ΔG{e,f}`.
pub fn verify_delta(g: &MultiGraph, e: &EdgeId, f: &EdgeId, cert: &DeltaCert) -> VerifyOutcome {
    VerifyContext::new(g).verify_delta(e, f, cert)
}

/// Verifies a Φ certificate against `ΦG{e}`.
pub fn verify_phi(g: &MultiGraph, e: &EdgeId, cert: &PhiCert) -> VerifyOutcome {
    VerifyContext::new(g).verify_phi(e, cert)
}

/// Outcome of an exhaustive sign search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<C> {
    /// First verifying certificate in canonical order.
    Found(C),
    /// The whole sign space was enumerated and nothing verifies.
    Exhausted,
    /// The node budget ran out before the space was covered.
    Budget,
}

impl<C> SearchOutcome<C> {
    pub fn found(&self) -> Option<&C> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Searches sign assignments for the Δ index family of `(g, e, f)`.
///
/// One sign variable exists per (S-set, cycle) pair; the canonically
/// first cycle of every S-set is pinned to +1, which loses nothing
/// because flipping all signs inside one S-set leaves the square
/// unchanged. Backtracking compares finalized coefficients early and
/// returns the first verifying assignment in deterministic order
/// (+1 tried before −1 at every variable).
pub fn sign_search_delta(
    g: &MultiGraph,
    e: &EdgeId,
    f: &EdgeId,
    budget: u64,
) -> Result<SearchOutcome<DeltaCert>, CertError> {
    let entries = enumerate_index(g, &[e.clone(), f.clone()], false);
    let target = rayleigh::delta(g, e, f).map_err(|err| CertError::Malformed(format!("{err}")))?;
    Ok(match sign_search_body(&entries, &target, budget)? {
        SearchOutcome::Found(body) => SearchOutcome::Found(DeltaCert {
            graph: String::new(),
            e: e.clone(),
            f: f.clone(),
            body,
        }),
        SearchOutcome::Exhausted => SearchOutcome::Exhausted,
        SearchOutcome::Budget => SearchOutcome::Budget,
    })
}

/// Sign search for the Φ index family of `(g, e)`.
pub fn sign_search_phi(
    g: &MultiGraph,
    e: &EdgeId,
    budget: u64,
) -> Result<SearchOutcome<PhiCert>, CertError> {
    let entries = enumerate_index(g, &[e.clone()], true);
    let target = rayleigh::phi(g, e).map_err(|err| CertError::Malformed(format!("{err}")))?;
    Ok(match sign_search_body(&entries, &target, budget)? {
        SearchOutcome::Found(body) => SearchOutcome::Found(PhiCert {
            graph: String::new(),
            e: e.clone(),
            body,
        }),
        SearchOutcome::Exhausted => SearchOutcome::Exhausted,
        SearchOutcome::Budget => SearchOutcome::Budget,
    })
}

struct SignVar {
    outer: EdgeSet,
    cycle: EdgeSet,
    pinned: bool,
}

struct SearchCtx<'a> {
    free: &'a [usize],
    vars: &'a [SignVar],
    pair_index: &'a [(usize, usize)],
    pair_poly: &'a [Polynomial],
    required: &'a Polynomial,
    live_after: &'a [BTreeSet<Monomial>],
    budget: u64,
    nodes: u64,
}

impl SearchCtx<'_> {
    fn decided(&self, var: usize, k: usize) -> bool {
        self.vars[var].pinned || self.free.iter().take(k).any(|&x| x == var)
    }

    /// Ok(Some(signs)) on success, Ok(None) when the subtree is
    /// exhausted, Err(()) when the budget runs out.
    fn descend(
        &mut self,
        k: usize,
        assignment: &mut Vec<Sign>,
        acc: &Polynomial,
    ) -> Result<Option<Vec<Sign>>, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        // Coefficients outside the still-live monomials are final.
        let diff = self.required.sub(acc);
        let live = &self.live_after[k];
        for (m, _) in diff.terms() {
            if !live.contains(m) {
                return Ok(None);
            }
        }
        if k == self.free.len() {
            return Ok(if diff.is_zero() {
                Some(assignment.clone())
            } else {
                None
            });
        }
        let var = self.free[k];
        for sign in [Sign::Plus, Sign::Minus] {
            assignment[var] = sign;
            // Add the pairs completed by deciding `var`.
            let mut next_acc = acc.clone();
            for (pi, (a, b)) in self.pair_index.iter().enumerate() {
                let other = if *a == var {
                    *b
                } else if *b == var {
                    *a
                } else {
                    continue;
                };
                if !self.decided(other, k) {
                    continue;
                }
                let product = assignment[var].mul(assignment[other]);
                next_acc = next_acc.add(&self.pair_poly[pi].mul_scalar(&product.to_bigint()));
            }
            if let Some(found) = self.descend(k + 1, assignment, &next_acc)? {
                return Ok(Some(found));
            }
        }
        assignment[var] = Sign::Plus;
        Ok(None)
    }
}

fn sign_search_body(
    entries: &BTreeMap<EdgeSet, Vec<(EdgeSet, EdgeSet)>>,
    target: &Polynomial,
    budget: u64,
) -> Result<SearchOutcome<CertBody>, CertError> {
    // One variable per (outer, cycle) group and its inner-sum polynomial.
    let mut vars: Vec<SignVar> = Vec::new();
    let mut inner_poly: Vec<Polynomial> = Vec::new();
    for (outer, list) in entries {
        let mut per_cycle: BTreeMap<EdgeSet, Polynomial> = BTreeMap::new();
        for (inner, cycle) in list {
            if !outer.is_subset(inner) {
                return Err(CertError::Malformed(format!(
                    "outer set {} not inside inner set {}",
                    fmt_set(outer),
                    fmt_set(inner)
                )));
            }
            let diff: Vec<&EdgeId> = inner.difference(outer).collect();
            let term =
                Polynomial::from_monomial(Monomial::from_set(diff.into_iter()), BigInt::one());
            per_cycle
                .entry(cycle.clone())
                .and_modify(|p| *p = p.add(&term))
                .or_insert(term);
        }
        for (i, (cycle, sum)) in per_cycle.into_iter().enumerate() {
            vars.push(SignVar {
                outer: outer.clone(),
                cycle,
                pinned: i == 0,
            });
            inner_poly.push(sum);
        }
    }

    // Expansion(c) = Σ_i y^S P_i²  +  Σ_{i<j, same S} 2 c_i c_j y^S P_iP_j.
    // The fixed part is sign-independent; the cross part must equal
    // `target − fixed`.
    let outer_monos: BTreeMap<EdgeSet, Polynomial> = entries
        .keys()
        .map(|s| (s.clone(), Polynomial::from_edge_set(s.iter())))
        .collect();
    let mut fixed = Polynomial::zero();
    for (i, v) in vars.iter().enumerate() {
        fixed = fixed.add(&outer_monos[&v.outer].mul(&inner_poly[i].square()));
    }
    let required_cross = target.sub(&fixed);

    let mut pair_index: Vec<(usize, usize)> = Vec::new();
    let mut pair_poly: Vec<Polynomial> = Vec::new();
    for i in 0..vars.len() {
        for j in (i + 1)..vars.len() {
            if vars[i].outer != vars[j].outer {
                continue;
            }
            let p = outer_monos[&vars[i].outer]
                .mul(&inner_poly[i].mul(&inner_poly[j]))
                .mul_scalar(&BigInt::from(2));
            if !p.is_zero() {
                pair_index.push((i, j));
                pair_poly.push(p);
            }
        }
    }

    let free: Vec<usize> = vars
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.pinned)
        .map(|(i, _)| i)
        .collect();

    // live_after[k]: monomials of pairs with an endpoint still
    // undecided once the first k free variables are fixed.
    let mut live_after: Vec<BTreeSet<Monomial>> = Vec::with_capacity(free.len() + 1);
    for k in 0..=free.len() {
        let mut live: BTreeSet<Monomial> = BTreeSet::new();
        for (pi, (a, b)) in pair_index.iter().enumerate() {
            let a_done = vars[*a].pinned || free.iter().take(k).any(|&x| x == *a);
            let b_done = vars[*b].pinned || free.iter().take(k).any(|&x| x == *b);
            if !(a_done && b_done) {
                for (m, _) in pair_poly[pi].terms() {
                    live.insert(m.clone());
                }
            }
        }
        live_after.push(live);
    }

    // Accumulator for pairs entirely inside the pinned set.
    let mut acc0 = Polynomial::zero();
    for (pi, (a, b)) in pair_index.iter().enumerate() {
        if vars[*a].pinned && vars[*b].pinned {
            acc0 = acc0.add(&pair_poly[pi]);
        }
    }

    let mut ctx = SearchCtx {
        free: &free,
        vars: &vars,
        pair_index: &pair_index,
        pair_poly: &pair_poly,
        required: &required_cross,
        live_after: &live_after,
        budget,
        nodes: 0,
    };
    let mut assignment: Vec<Sign> = vars.iter().map(|_| Sign::Plus).collect();

    match ctx.descend(0, &mut assignment, &acc0) {
        Err(()) => Ok(SearchOutcome::Budget),
        Ok(None) => Ok(SearchOutcome::Exhausted),
        Ok(Some(signs)) => {
            let mut body = CertBody::new();
            for (i, v) in vars.iter().enumerate() {
                for (inner, cycle) in &entries[&v.outer] {
                    if cycle == &v.cycle {
                        body.push(v.outer.clone(), inner.clone(), cycle.clone(), signs[i])?;
                    }
                }
            }
            body.normalize();
            Ok(SearchOutcome::Found(body))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial as P;

    fn e(name: &str) -> EdgeId {
        EdgeId::new(name)
    }

    fn set(names: &[&str]) -> EdgeSet {
        names.iter().map(|n| EdgeId::new(n)).collect()
    }

    fn p(s: &str) -> Polynomial {
        P::parse(s).unwrap()
    }

    fn k3() -> MultiGraph {
        MultiGraph::triangle("e", "f", "g")
    }

    fn k3_star() -> MultiGraph {
        MultiGraph::parallel_triple("e", "f", "g")
    }

    #[test]
    fn s_sets_of_k3() {
        let s = s_sets(&k3(), &e("e"), &e("f"));
        assert_eq!(s, alloc::vec![set(&[]), set(&["g"])]);
        let a_empty = a_sets(&k3(), &set(&[]), &e("e"), &e("f"));
        assert_eq!(a_empty, alloc::vec![(set(&["g"]), set(&["e", "f", "g"]))]);
        let a_g = a_sets(&k3(), &set(&["g"]), &e("e"), &e("f"));
        assert_eq!(a_g, alloc::vec![(set(&["g"]), set(&["e", "f", "g"]))]);
    }

    #[test]
    fn s_sets_of_star_exclude_extra_cycles() {
        let s = s_sets(&k3_star(), &e("e"), &e("f"));
        assert_eq!(s, alloc::vec![set(&[])]);
        // A = {g} is excluded: {e,f,g} holds three cycles.
        let a = a_sets(&k3_star(), &set(&[]), &e("e"), &e("f"));
        assert_eq!(a, alloc::vec![(set(&[]), set(&["e", "f"]))]);
    }

    #[test]
    fn s_sets_empty_across_blocks() {
        let mut g = MultiGraph::new(4);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("f".into(), 2, 3).unwrap();
        assert!(s_sets(&g, &e("e"), &e("f")).is_empty());
    }

    #[test]
    fn q_sets_of_k3_and_star() {
        let q = q_sets(&k3(), &e("e"));
        assert_eq!(q, alloc::vec![set(&["f"]), set(&["f", "g"]), set(&["g"])]);
        for qq in &q {
            let b = b_sets(&k3(), qq, &e("e"));
            assert_eq!(b.len(), 1);
            assert_eq!(b[0].0, set(&["f", "g"]));
        }
        let q = q_sets(&k3_star(), &e("e"));
        assert_eq!(q, alloc::vec![set(&["f"]), set(&["g"])]);
        assert_eq!(
            b_sets(&k3_star(), &set(&["f"]), &e("e")),
            alloc::vec![(set(&["f"]), set(&["e", "f"]))]
        );
    }

    #[test]
    fn q_sets_empty_for_bridge() {
        let mut g = MultiGraph::new(3);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("x".into(), 1, 2).unwrap();
        assert!(q_sets(&g, &e("e")).is_empty());
        assert!(rayleigh::phi(&g, &e("e")).unwrap().is_zero());
    }

    fn k3_delta_cert() -> DeltaCert {
        let mut cert = DeltaCert::new("k3", e("e"), e("f"));
        let cycle = set(&["e", "f", "g"]);
        cert.body
            .push(set(&[]), set(&["g"]), cycle.clone(), Sign::Plus)
            .unwrap();
        cert.body
            .push(set(&["g"]), set(&["g"]), cycle, Sign::Plus)
            .unwrap();
        cert
    }

    #[test]
    fn expand_k3_cert() {
        assert_eq!(k3_delta_cert().expand().unwrap(), p("y_g + y_g^2"));
        assert!(CertBody::new().expand().unwrap().is_zero());
    }

    #[test]
    fn flipping_whole_outer_group_preserves_expansion() {
        let mut cert = k3_delta_cert();
        let original = cert.expand().unwrap();
        // The S = {} group has one cycle: flipping its sign flips the
        // whole inner sum, and the square is unchanged.
        let key = (set(&[]), set(&["e", "f", "g"]));
        cert.body.signs.insert(key, Sign::Minus);
        assert_eq!(cert.expand().unwrap(), original);
    }

    #[test]
    fn verify_k3_cert() {
        let cert = k3_delta_cert();
        assert!(verify_delta(&k3(), &e("e"), &e("f"), &cert).is_verified());
        // Swapped pair is the same certificate context.
        assert!(verify_delta(&k3(), &e("f"), &e("e"), &cert).is_verified());
    }

    #[test]
    fn verify_rejects_missing_entry_with_difference() {
        let mut cert = k3_delta_cert();
        cert.body.entries.remove(&set(&["g"]));
        cert.body.signs.retain(|(s, _), _| !s.contains(&e("g")));
        match verify_delta(&k3(), &e("e"), &e("f"), &cert) {
            VerifyOutcome::Mismatch(diff) => assert_eq!(diff, p("-y_g")),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_context_mismatch() {
        let cert = k3_delta_cert();
        assert!(matches!(
            verify_delta(&k3(), &e("e"), &e("g"), &cert),
            VerifyOutcome::ContextMismatch(_)
        ));
    }

    #[test]
    fn verify_rejects_wrong_cycle_witness() {
        let g4 = MultiGraph::parallel_triple("e", "f", "g");
        let mut cert = DeltaCert::new("bad", e("e"), e("f"));
        // {g} ∪ {e,f} holds three cycles, so this entry is invalid.
        cert.body
            .push(set(&[]), set(&["g"]), set(&["e", "f"]), Sign::Plus)
            .unwrap();
        assert!(matches!(
            verify_delta(&g4, &e("e"), &e("f"), &cert),
            VerifyOutcome::Invalid(_)
        ));
    }

    #[test]
    fn search_finds_k3_and_star_certs() {
        let out = sign_search_delta(&k3(), &e("e"), &e("f"), DEFAULT_SEARCH_BUDGET).unwrap();
        let cert = out.found().expect("triangle is certifiable");
        assert!(verify_delta(&k3(), &e("e"), &e("f"), cert).is_verified());
        assert_eq!(cert.expand().unwrap(), p("y_g + y_g^2"));

        let out = sign_search_delta(&k3_star(), &e("e"), &e("f"), DEFAULT_SEARCH_BUDGET).unwrap();
        let cert = out.found().expect("parallel triple is certifiable");
        assert!(verify_delta(&k3_star(), &e("e"), &e("f"), cert).is_verified());
        assert_eq!(cert.body.n_inner_sets(), 1);
    }

    #[test]
    fn search_phi_matches_phi() {
        for g in [k3(), k3_star(), MultiGraph::cycle(4)] {
            for id in g.edge_ids() {
                let out = sign_search_phi(&g, &id, DEFAULT_SEARCH_BUDGET).unwrap();
                let cert = out.found().expect("series-parallel graphs are certifiable");
                assert!(verify_phi(&g, &id, cert).is_verified());
            }
        }
    }

    #[test]
    fn search_respects_budget() {
        let g = MultiGraph::complete(4);
        let ids = g.edge_ids();
        let out = sign_search_delta(&g, &ids[0], &ids[1], 1).unwrap();
        assert_eq!(out, SearchOutcome::Budget);
    }

    #[test]
    fn search_is_stable_under_monotone_renaming() {
        // Renaming that preserves the name order keeps the search order,
        // so the found certificates correspond entry by entry.
        let g = MultiGraph::triangle("a", "b", "c");
        let out = sign_search_delta(&g, &e("a"), &e("b"), DEFAULT_SEARCH_BUDGET).unwrap();
        let cert = out.found().unwrap();

        let g2 = MultiGraph::triangle("aa", "bb", "cc");
        let out2 = sign_search_delta(&g2, &e("aa"), &e("bb"), DEFAULT_SEARCH_BUDGET).unwrap();
        let cert2 = out2.found().unwrap();

        let renamed = cert
            .body
            .rename(&e("a"), &e("aa"))
            .rename(&e("b"), &e("bb"))
            .rename(&e("c"), &e("cc"));
        assert_eq!(&renamed, &cert2.body);
    }

    #[test]
    fn sign_conflict_is_rejected_by_construction() {
        let mut body = CertBody::new();
        body.push(set(&[]), set(&["g"]), set(&["e", "f", "g"]), Sign::Plus)
            .unwrap();
        let err = body
            .push(
                set(&[]),
                set(&["g", "h"]),
                set(&["e", "f", "g"]),
                Sign::Minus,
            )
            .unwrap_err();
        assert!(matches!(err, CertError::SignConflict { .. }));
    }
}
