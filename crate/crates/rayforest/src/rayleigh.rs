//! Forest and spanning-tree generating polynomials and the operators
//! built from them: the Rayleigh difference `Δ`, the same-side quantity
//! `Φ`, and the mixed term `Ψ`.
//!
//! Notation used throughout: for a polynomial `G` and edge `g`, `G_g`
//! is the partial derivative (forests of the contraction when `G` is a
//! forest polynomial) and `G^g` is the evaluation at `y_g = 0` (forests
//! of the deletion). All operators are computed from the forest
//! polynomial by coefficient extraction, never by re-enumerating the
//! minor, so a failing identity isolates the operator layer from the
//! enumeration layer.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::graph::{EdgeId, GraphError, MultiGraph};
use crate::poly::{Polynomial, RationalPoint};
use crate::rng::SplitMix64;

/// Generating polynomial of all spanning forests (acyclic edge sets).
/// Multilinear with constant term 1; loops never contribute.
pub fn forest_poly(g: &MultiGraph) -> Polynomial {
    let mut p = Polynomial::zero();
    for forest in g.enumerate_forests() {
        p = p.add(&Polynomial::from_edge_set(forest.iter()));
    }
    p
}

/// Generating polynomial of spanning trees; homogeneous of degree
/// `|V| − 1`. Errors on disconnected input.
pub fn tree_poly(g: &MultiGraph) -> Result<Polynomial, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let want = g.n_vertices().saturating_sub(1);
    let mut p = Polynomial::zero();
    for forest in g.enumerate_forests() {
        if forest.len() == want {
            p = p.add(&Polynomial::from_edge_set(forest.iter()));
        }
    }
    Ok(p)
}

/// Generating polynomial of the independent sets of the bond matroid of
/// a connected graph: edge sets whose complement still spans (stays
/// connected on all vertices).
pub fn bond_indep_poly(g: &MultiGraph) -> Result<Polynomial, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let ids = g.edge_ids();
    let mut p = Polynomial::zero();
    for mask in 0u64..(1u64 << ids.len()) {
        let rest: crate::graph::EdgeSet = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 0)
            .map(|(_, id)| id.clone())
            .collect();
        if g.restrict(&rest).is_connected() {
            p = p.add(&Polynomial::from_edge_set(
                ids.iter().filter(|id| !rest.contains(*id)),
            ));
        }
    }
    Ok(p)
}

/// Generating polynomial of the bases of the bond matroid of a
/// connected graph: complements of spanning trees.
pub fn bond_basis_poly(g: &MultiGraph) -> Result<Polynomial, GraphError> {
    let trees = tree_poly(g)?;
    let all: crate::graph::EdgeSet = g.edge_set();
    let mut p = Polynomial::zero();
    for (m, _) in trees.terms() {
        let complement = all
            .iter()
            .filter(|id| m.degree_of(id) == 0)
            .cloned()
            .collect::<Vec<_>>();
        p = p.add(&Polynomial::from_edge_set(complement.iter()));
    }
    Ok(p)
}

/// `∂p/∂y_e`.
pub fn partial(p: &Polynomial, e: &EdgeId) -> Polynomial {
    p.partial(e)
}

/// `p` at `y_e = 0`.
pub fn delete_var(p: &Polynomial, e: &EdgeId) -> Polynomial {
    p.eval_at_zero(e)
}

fn check_pair(g: &MultiGraph, e: &EdgeId, f: &EdgeId) -> Result<(), GraphError> {
    if e == f {
        return Err(GraphError::SameEdge(String::from(e.as_str())));
    }
    for x in [e, f] {
        if g.is_loop(x)? {
            return Err(GraphError::LoopEdge(String::from(x.as_str())));
        }
    }
    Ok(())
}

/// The Rayleigh difference `ΔG{e,f} = G_e·G_f − G·G_{ef}` of the forest
/// polynomial. Neither `y_e` nor `y_f` occurs in the result.
pub fn delta(g: &MultiGraph, e: &EdgeId, f: &EdgeId) -> Result<Polynomial, GraphError> {
    check_pair(g, e, f)?;
    Ok(delta_of_poly(&forest_poly(g), e, f))
}

/// `ΔZ{e,f}` for an arbitrary generating polynomial `Z` (used for the
/// spanning-tree comparison as well as forests).
pub fn delta_of_poly(z: &Polynomial, e: &EdgeId, f: &EdgeId) -> Polynomial {
    let ze = z.partial(e);
    let zf = z.partial(f);
    let zef = ze.partial(f);
    ze.mul_fast(&zf).sub(&z.mul_fast(&zef))
}

/// `ΔZ{e,f}` through the four extracted parts,
/// `Z_e^f·Z_f^e − Z^{ef}·Z_{ef}`: the same value on multilinear input
/// (asserted exhaustively by the identity suite), with factors only a
/// quarter the size. This is what batched certificate verification
/// uses.
pub(crate) fn delta_via_extracts(z: &Polynomial, e: &EdgeId, f: &EdgeId) -> Polynomial {
    let no_f = z.eval_at_zero(f);
    let no_e = z.eval_at_zero(e);
    no_f.partial(e)
        .mul_fast(&no_e.partial(f))
        .sub(&no_e.eval_at_zero(f).mul_fast(&z.partial(e).partial(f)))
}

/// `ΦG{e} = (G^e − G_e)·G_e`; `y_e` does not occur in the result.
pub fn phi(g: &MultiGraph, e: &EdgeId) -> Result<Polynomial, GraphError> {
    if g.is_loop(e)? {
        return Err(GraphError::LoopEdge(String::from(e.as_str())));
    }
    let fp = forest_poly(g);
    Ok(phi_of_poly(&fp, e))
}

pub fn phi_of_poly(fp: &Polynomial, e: &EdgeId) -> Polynomial {
    let del = fp.eval_at_zero(e);
    let con = fp.partial(e);
    del.sub(&con).mul_fast(&con)
}

/// `ΨG{e|f} = G_f^e·G_e^f + G^{ef}·G_{ef} − 2·G_e^f·G_{ef}`, the
/// coefficient of `y_f` in `ΦG{e}`.
pub fn psi(g: &MultiGraph, e: &EdgeId, f: &EdgeId) -> Result<Polynomial, GraphError> {
    check_pair(g, e, f)?;
    let fp = forest_poly(g);
    let g_f_del_e = fp.eval_at_zero(e).partial(f); // G_f^e
    let g_e_del_f = fp.eval_at_zero(f).partial(e); // G_e^f
    let g_del_ef = fp.eval_at_zero(e).eval_at_zero(f); // G^{ef}
    let g_con_ef = fp.partial(e).partial(f); // G_{ef}
    Ok(g_f_del_e
        .mul(&g_e_del_f)
        .add(&g_del_ef.mul(&g_con_ef))
        .sub(&g_e_del_f.mul(&g_con_ef).mul_scalar(&BigInt::from(2))))
}

/// One identity verdict: name, human-readable context, and the
/// difference polynomial when the two sides disagree.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub context: String,
    pub difference: Option<Polynomial>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.difference.is_none()
    }
}

#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds())
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }

    fn push(&mut self, name: &'static str, context: String, lhs: &Polynomial, rhs: &Polynomial) {
        let diff = lhs.sub(rhs);
        self.checks.push(IdentityCheck {
            name,
            context,
            difference: if diff.is_zero() { None } else { Some(diff) },
        });
    }
}

/// Exhaustively checks, on one graph, the identities relating deletion,
/// contraction and the operators:
///
/// * `G = G^g + y_g·G_g` for every non-loop `g`;
/// * `ΔG{e,f} = G_e^f·G_f^e − G^{ef}·G_{ef}`;
/// * the deletion limit `coeff_0(ΔG, g) = ΔG∖g{e,f}` and the
///   contraction limit `coeff_2(ΔG, g) = ΔG/g{e,f}`;
/// * `ΦG{e} = ΦG^f{e} + y_f·ΨG{e|f} + y_f²·ΦG_f{e}`;
/// * `ΨG{e|f} = ΔG{e,f} + 2(G^{ef}·G_{ef} − G_e^f·G_{ef})`.
pub fn check_identities(g: &MultiGraph) -> Result<IdentityReport, GraphError> {
    let mut report = IdentityReport::default();
    let fp = forest_poly(g);
    let ids = g.edge_ids();
    let non_loops: Vec<&EdgeId> = ids
        .iter()
        .filter(|x| !g.edge(x).unwrap().is_loop())
        .collect();

    for x in &non_loops {
        let rhs = fp
            .eval_at_zero(x)
            .add(&Polynomial::var(x).mul(&fp.partial(x)));
        report.push("decompose", format!("g={x}"), &fp, &rhs);
    }

    for (i, e) in non_loops.iter().enumerate() {
        for f in non_loops.iter().skip(i + 1) {
            let d = delta(g, e, f)?;
            let four_term = fp
                .eval_at_zero(f)
                .partial(e)
                .mul(&fp.eval_at_zero(e).partial(f))
                .sub(
                    &fp.eval_at_zero(e)
                        .eval_at_zero(f)
                        .mul(&fp.partial(e).partial(f)),
                );
            report.push("delta-four-term", format!("e={e} f={f}"), &d, &four_term);

            let ps = psi(g, e, f)?;
            let newid = d.add(
                &fp.eval_at_zero(e)
                    .eval_at_zero(f)
                    .mul(&fp.partial(e).partial(f))
                    .sub(&fp.eval_at_zero(f).partial(e).mul(&fp.partial(e).partial(f)))
                    .mul_scalar(&BigInt::from(2)),
            );
            report.push("psi-delta", format!("e={e} f={f}"), &ps, &newid);

            let phi_e = phi(g, e)?;
            let del_f = g.delete_edge(f)?;
            let con_f = g.contract_edge(f)?;
            // Via the polynomials so that e turning into a loop of the
            // contraction (Φ = 0 there) stays covered.
            let expansion = phi_of_poly(&forest_poly(&del_f), e)
                .add(&Polynomial::var(f).mul(&ps))
                .add(
                    &Polynomial::var(f)
                        .square()
                        .mul(&phi_of_poly(&forest_poly(&con_f), e)),
                );
            report.push("phi-minor", format!("e={e} f={f}"), &phi_e, &expansion);

            for x in &non_loops {
                if x == e || x == f {
                    continue;
                }
                let del = g.delete_edge(x)?;
                report.push(
                    "delta-deletion-limit",
                    format!("e={e} f={f} g={x}"),
                    &d.coeff_extract(x, 0),
                    &delta(&del, e, f)?,
                );
                let con = g.contract_edge(x)?;
                // The pair may become loops in the contraction; the
                // limit identity is only about non-loop pairs there.
                if !con.is_loop(e)? && !con.is_loop(f)? {
                    report.push(
                        "delta-contraction-limit",
                        format!("e={e} f={f} g={x}"),
                        &d.coeff_extract(x, 2),
                        &delta(&con, e, f)?,
                    );
                }
            }
        }
    }
    Ok(report)
}

/// Checks the factorization identities over an explicit two-sum
/// `G = H ⊕_g K`:
///
/// * cross pairs: `ΔG{e,f} = ΔH{e,g}·ΔK{g,f}` for `e ∈ H−g, f ∈ K−g`;
/// * same-side pairs: `(K_g)²·ΔH{e,f}` at `y_g := K^g/K_g − 1` equals
///   `ΔG{e,f}` for `e,f ∈ H−g` (denominator-cleared, degree bound 2);
/// * `(K_g)²·ΦH{e}` under the same substitution equals `ΦG{e}`.
pub fn check_two_sum_identities(
    h: &MultiGraph,
    k: &MultiGraph,
    g_edge: &EdgeId,
) -> Result<IdentityReport, GraphError> {
    let mut report = IdentityReport::default();
    let g = h.two_sum(k, g_edge)?;
    let kp = forest_poly(k);
    let k_del = kp.eval_at_zero(g_edge);
    let k_con = kp.partial(g_edge);
    let num = k_del.sub(&k_con); // K^g − K_g
    let den = k_con.clone(); // K_g

    let h_edges: Vec<EdgeId> = h
        .edge_ids()
        .into_iter()
        .filter(|x| x != g_edge && !h.edge(x).unwrap().is_loop())
        .collect();
    let k_edges: Vec<EdgeId> = k
        .edge_ids()
        .into_iter()
        .filter(|x| x != g_edge && !k.edge(x).unwrap().is_loop())
        .collect();

    for e in &h_edges {
        for f in &k_edges {
            let lhs = delta(&g, e, f)?;
            let rhs = delta(h, e, g_edge)?.mul(&delta(k, g_edge, f)?);
            report.push("two-sum-cross", format!("e={e} f={f}"), &lhs, &rhs);
        }
    }
    for (i, e) in h_edges.iter().enumerate() {
        for f in h_edges.iter().skip(i + 1) {
            let dh = delta(h, e, f)?;
            let lhs = dh
                .substitute_rational(g_edge, &num, &den, 2)
                .expect("delta has degree at most 2 in any variable");
            let rhs = delta(&g, e, f)?;
            report.push("two-sum-same-side", format!("e={e} f={f}"), &lhs, &rhs);
        }
    }
    for e in &h_edges {
        let ph = phi(h, e)?;
        let lhs = ph
            .substitute_rational(g_edge, &num, &den, 2)
            .expect("phi has degree at most 2 in any variable");
        let rhs = phi(&g, e)?;
        report.push("two-sum-phi", format!("e={e}"), &lhs, &rhs);
    }
    Ok(report)
}

/// One sampled evaluation of a Rayleigh difference.
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub point: RationalPoint,
    pub value: BigRational,
}

/// Result of sampling `ΔG{e,f}` at positive rational points: the exact
/// polynomial, its negative-coefficient count, the minimum sampled
/// value, and a counterexample certificate when a sample came out
/// negative.
#[derive(Clone, Debug)]
pub struct RayleighReport {
    pub graph: String,
    pub e: EdgeId,
    pub f: EdgeId,
    pub delta: Polynomial,
    pub negative_terms: usize,
    pub samples: Vec<SamplePoint>,
    pub min_value: BigRational,
    pub counterexample: Option<SamplePoint>,
}

impl RayleighReport {
    pub fn all_nonnegative(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Draws a positive rational with numerator and denominator uniform in
/// `1..=100`.
pub fn random_positive_rational(rng: &mut SplitMix64) -> BigRational {
    let num = BigInt::from(rng.range(1, 100));
    let den = BigInt::from(rng.range(1, 100));
    BigRational::new(num, den)
}

/// A seeded positive point over the given variables.
pub fn random_point<'a, I: IntoIterator<Item = &'a EdgeId>>(
    vars: I,
    rng: &mut SplitMix64,
) -> RationalPoint {
    let mut pt = RationalPoint::new();
    for e in vars {
        pt.assign(e, random_positive_rational(rng))
            .expect("generated values are positive");
    }
    pt
}

/// Evaluates `ΔG{e,f}` at `trials` seeded pseudo-random strictly
/// positive rational points plus the all-ones point. Any negative value
/// is reported as an exact counterexample.
pub fn sample_nonnegativity(
    g: &MultiGraph,
    e: &EdgeId,
    f: &EdgeId,
    trials: u32,
    seed: u64,
    graph_name: &str,
) -> Result<RayleighReport, GraphError> {
    let d = delta(g, e, f)?;
    let vars: Vec<EdgeId> = g
        .edge_ids()
        .into_iter()
        .filter(|x| x != e && x != f)
        .collect();
    let mut rng = SplitMix64::new(seed);
    let mut samples = Vec::new();
    let ones = RationalPoint::all_ones(vars.iter());
    samples.push(SamplePoint {
        value: d.evaluate(&ones).expect("all variables assigned"),
        point: ones,
    });
    for _ in 0..trials {
        let pt = random_point(vars.iter(), &mut rng);
        samples.push(SamplePoint {
            value: d.evaluate(&pt).expect("all variables assigned"),
            point: pt,
        });
    }
    let min_value = samples
        .iter()
        .map(|s| s.value.clone())
        .min()
        .expect("at least the all-ones sample");
    let counterexample = samples.iter().find(|s| s.value.is_negative()).cloned();
    Ok(RayleighReport {
        graph: String::from(graph_name),
        e: e.clone(),
        f: f.clone(),
        negative_terms: d.negative_term_count(),
        delta: d,
        samples,
        min_value,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial as P;
    use num_traits::Zero;

    fn e(name: &str) -> EdgeId {
        EdgeId::new(name)
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
    fn forest_poly_single_edge() {
        let mut g = MultiGraph::new(2);
        g.add_edge("e".into(), 0, 1).unwrap();
        assert_eq!(forest_poly(&g), p("1 + y_e"));
    }

    #[test]
    fn forest_poly_star_and_triangle() {
        assert_eq!(forest_poly(&k3_star()), p("1 + y_e + y_f + y_g"));
        assert_eq!(
            forest_poly(&k3()),
            p("1 + y_e + y_f + y_g + y_e*y_f + y_e*y_g + y_f*y_g")
        );
    }

    #[test]
    fn forest_poly_ignores_loops() {
        let mut g = MultiGraph::new(2);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("l".into(), 1, 1).unwrap();
        assert_eq!(forest_poly(&g), p("1 + y_e"));
    }

    #[test]
    fn tree_poly_small_cases() {
        assert_eq!(tree_poly(&k3()).unwrap(), p("y_e*y_f + y_e*y_g + y_f*y_g"));
        let mut g = MultiGraph::new(2);
        g.add_edge("e".into(), 0, 1).unwrap();
        assert_eq!(tree_poly(&g).unwrap(), p("y_e"));
    }

    #[test]
    fn tree_poly_k4_count_is_cayley() {
        let t = tree_poly(&MultiGraph::complete(4)).unwrap();
        let pt = RationalPoint::all_ones(t.vars().iter());
        assert_eq!(
            t.evaluate(&pt).unwrap(),
            BigRational::from_integer(16.into())
        );
    }

    #[test]
    fn tree_poly_rejects_disconnected() {
        let g = MultiGraph::new(2);
        assert!(matches!(tree_poly(&g), Err(GraphError::Disconnected)));
    }

    #[test]
    fn partial_and_delete_on_k3() {
        let fp = forest_poly(&k3());
        assert_eq!(partial(&fp, &e("e")), p("1 + y_f + y_g"));
        assert_eq!(delete_var(&fp, &e("e")), p("1 + y_f + y_g + y_f*y_g"));
        assert_eq!(partial(&fp, &e("zz")), P::zero());
    }

    #[test]
    fn forest_count_by_evaluation() {
        let fp = forest_poly(&k3());
        let ones = RationalPoint::all_ones(fp.vars().iter());
        assert_eq!(
            fp.evaluate(&ones).unwrap(),
            BigRational::from_integer(7.into())
        );
    }

    #[test]
    fn coeff_extract_is_contraction() {
        let fp = forest_poly(&k3());
        let contracted = forest_poly(&k3().contract_edge(&e("g")).unwrap());
        assert_eq!(fp.coeff_extract(&e("g"), 1), contracted);
    }

    #[test]
    fn delta_k3_and_star() {
        assert_eq!(delta(&k3(), &e("e"), &e("f")).unwrap(), p("y_g + y_g^2"));
        assert_eq!(delta(&k3_star(), &e("e"), &e("f")).unwrap(), p("1"));
    }

    #[test]
    fn delta_rejects_bad_pairs() {
        assert!(matches!(
            delta(&k3(), &e("e"), &e("e")),
            Err(GraphError::SameEdge(_))
        ));
        let mut g = MultiGraph::new(2);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("l".into(), 0, 0).unwrap();
        assert!(matches!(
            delta(&g, &e("e"), &e("l")),
            Err(GraphError::LoopEdge(_))
        ));
    }

    #[test]
    fn delta_across_components_is_zero() {
        let mut g = MultiGraph::new(4);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("f".into(), 2, 3).unwrap();
        assert!(delta(&g, &e("e"), &e("f")).unwrap().is_zero());
    }

    #[test]
    fn delta_has_no_ef_variables() {
        let g = MultiGraph::complete(4);
        let ids = g.edge_ids();
        let d = delta(&g, &ids[0], &ids[1]).unwrap();
        assert!(!d.vars().contains(&ids[0]));
        assert!(!d.vars().contains(&ids[1]));
    }

    #[test]
    fn phi_base_formulas() {
        assert_eq!(
            phi(&k3(), &e("e")).unwrap(),
            p("y_f*y_g^2 + y_g*y_f^2 + y_f*y_g")
        );
        assert_eq!(phi(&k3_star(), &e("e")).unwrap(), p("y_f + y_g"));
        let mut single = MultiGraph::new(2);
        single.add_edge("e".into(), 0, 1).unwrap();
        assert!(phi(&single, &e("e")).unwrap().is_zero());
    }

    #[test]
    fn psi_of_disjoint_edges_is_zero() {
        let mut g = MultiGraph::new(4);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("f".into(), 2, 3).unwrap();
        assert!(psi(&g, &e("e"), &e("f")).unwrap().is_zero());
    }

    #[test]
    fn identities_hold_on_k4() {
        let report = check_identities(&MultiGraph::complete(4)).unwrap();
        assert!(report.all_hold(), "{:?}", report.failures().next());
        assert!(!report.checks.is_empty());
    }

    #[test]
    fn two_sum_identities_on_base_pairs() {
        let combos: [(MultiGraph, MultiGraph); 4] = [
            (
                MultiGraph::triangle("e", "g", "h"),
                MultiGraph::triangle("g", "f", "k"),
            ),
            (
                MultiGraph::triangle("e", "g", "h"),
                MultiGraph::parallel_triple("g", "f", "k"),
            ),
            (
                MultiGraph::parallel_triple("e", "g", "h"),
                MultiGraph::triangle("g", "f", "k"),
            ),
            (
                MultiGraph::parallel_triple("e", "g", "h"),
                MultiGraph::parallel_triple("g", "f", "k"),
            ),
        ];
        for (h, k) in combos {
            let report = check_two_sum_identities(&h, &k, &e("g")).unwrap();
            assert!(report.all_hold(), "{:?}", report.failures().next());
        }
    }

    #[test]
    fn cross_two_sum_explicit_value() {
        // Triangle glued to a parallel triple: ΔG{e,f} = ΔH{e,g}·ΔK{g,f}.
        let h = MultiGraph::triangle("e", "g", "h");
        let k = MultiGraph::parallel_triple("g", "f", "k");
        let g = h.two_sum(&k, &e("g")).unwrap();
        assert_eq!(delta(&g, &e("e"), &e("f")).unwrap(), p("y_h + y_h^2"));
    }

    #[test]
    fn sampling_k3_is_nonnegative_and_deterministic() {
        let r1 = sample_nonnegativity(&k3(), &e("e"), &e("f"), 20, 7, "k3").unwrap();
        let r2 = sample_nonnegativity(&k3(), &e("e"), &e("f"), 20, 7, "k3").unwrap();
        assert!(r1.all_nonnegative());
        assert!(!r1.min_value.is_negative());
        assert_eq!(r1.samples.len(), 21);
        for (a, b) in r1.samples.iter().zip(r2.samples.iter()) {
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn bond_polys_of_k3() {
        // Bond matroid of the triangle: independent sets are the sets
        // whose removal keeps the triangle connected, i.e. at most one
        // edge; bases are single edges (complements of spanning trees).
        let ip = bond_indep_poly(&k3()).unwrap();
        assert_eq!(ip, p("1 + y_e + y_f + y_g"));
        let bp = bond_basis_poly(&k3()).unwrap();
        assert_eq!(bp, p("y_e + y_f + y_g"));
    }

    #[test]
    fn sampling_bridge_pair_is_identically_zero() {
        // f is a bridge: Δ vanishes identically.
        let mut g = MultiGraph::new(4);
        g.add_edge("e".into(), 0, 1).unwrap();
        g.add_edge("a".into(), 1, 2).unwrap();
        g.add_edge("b".into(), 0, 2).unwrap();
        g.add_edge("f".into(), 2, 3).unwrap();
        let r = sample_nonnegativity(&g, &e("e"), &e("f"), 5, 1, "t").unwrap();
        assert!(r.delta.is_zero());
        assert!(r.samples.iter().all(|s| s.value.is_zero()));
    }
}
