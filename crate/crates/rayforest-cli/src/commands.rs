//! Implementations behind the CLI subcommands. Each returns the full
//! report text; printing and exit codes live in `main`. All output is
//! deterministic for fixed inputs and seeds: maps iterate in key order
//! and every random draw is seeded.

use std::fmt::Write as _;
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::Signed;

use rayforest::cert::{
    sign_search_delta, sign_search_phi, verify_delta, verify_phi, SearchOutcome,
};
use rayforest::construct;
use rayforest::graph::{EdgeId, MultiGraph};
use rayforest::poly::{Polynomial, RationalPoint};
use rayforest::rayleigh::{
    self, bond_basis_poly, bond_indep_poly, delta_of_poly, forest_poly, random_point,
    sample_nonnegativity, tree_poly,
};
use rayforest::rng::SplitMix64;
use rayforest::sp::random_recipe;

use crate::formats::{self, CertDoc};
use crate::CliError;

pub fn load_graph(path: &str) -> Result<(MultiGraph, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read `{path}`: {e}")))?;
    let graph = formats::parse_graph(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let name = std::path::Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string());
    Ok((graph, name))
}

fn resolve_edge(g: &MultiGraph, name: &str) -> Result<EdgeId, CliError> {
    let id = EdgeId::new(name);
    if !g.has_edge(&id) {
        return Err(CliError::Usage(format!(
            "edge `{name}` is not in the graph"
        )));
    }
    Ok(id)
}

pub fn parse_edge_list(spec: &str) -> Vec<String> {
    spec.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// `poly`: forest polynomial, plus the spanning-tree polynomial when
/// asked for (which requires a connected graph).
pub fn cmd_poly(path: &str, trees: bool) -> Result<String, CliError> {
    let (g, name) = load_graph(path)?;
    let mut out = String::new();
    let _ = writeln!(out, "report poly");
    let _ = writeln!(out, "graph {name}");
    let _ = writeln!(out, "forest-polynomial {}", forest_poly(&g));
    if trees {
        let tp = tree_poly(&g).map_err(|e| CliError::Input(format!("{e}")))?;
        let _ = writeln!(out, "tree-polynomial {tp}");
    }
    Ok(out)
}

fn nonnegativity_section(out: &mut String, report: &rayleigh::RayleighReport) {
    let _ = writeln!(out, "samples {}", report.samples.len());
    let _ = writeln!(out, "min-value {}", report.min_value);
    let _ = writeln!(
        out,
        "nonnegative {}",
        if report.all_nonnegative() {
            "yes"
        } else {
            "NO"
        }
    );
    if let Some(counter) = &report.counterexample {
        let mut point = String::new();
        for (e, v) in counter.point.iter() {
            if !point.is_empty() {
                point.push(' ');
            }
            let _ = write!(point, "{e}={v}");
        }
        let _ = writeln!(out, "counterexample-point {point}");
        let _ = writeln!(out, "counterexample-value {}", counter.value);
    }
}

/// `delta`: the Rayleigh difference of one pair, its negative-term
/// count, and seeded sampling at positive points.
pub fn cmd_delta(path: &str, edges: &[String], seed: u64, trials: u32) -> Result<String, CliError> {
    let (g, name) = load_graph(path)?;
    if edges.len() != 2 {
        return Err(CliError::Usage("delta needs --edges e,f".into()));
    }
    if edges[0] == edges[1] {
        return Err(CliError::Usage("the two edges must be distinct".into()));
    }
    let e = resolve_edge(&g, &edges[0])?;
    let f = resolve_edge(&g, &edges[1])?;
    let report = sample_nonnegativity(&g, &e, &f, trials, seed, &name)
        .map_err(|err| CliError::Usage(format!("{err}")))?;
    let mut out = String::new();
    let _ = writeln!(out, "report delta");
    let _ = writeln!(out, "graph {name}");
    let _ = writeln!(out, "edges {e} {f}");
    let _ = writeln!(out, "polynomial {}", report.delta);
    let _ = writeln!(out, "negative-terms {}", report.negative_terms);
    let _ = writeln!(out, "seed {seed}");
    nonnegativity_section(&mut out, &report);
    Ok(out)
}

/// `phi`: the same-side operator of one edge, with sampling.
pub fn cmd_phi(path: &str, edges: &[String], seed: u64, trials: u32) -> Result<String, CliError> {
    let (g, name) = load_graph(path)?;
    if edges.len() != 1 {
        return Err(CliError::Usage("phi needs --edges e".into()));
    }
    let e = resolve_edge(&g, &edges[0])?;
    let phi = rayleigh::phi(&g, &e).map_err(|err| CliError::Usage(format!("{err}")))?;
    let mut out = String::new();
    let _ = writeln!(out, "report phi");
    let _ = writeln!(out, "graph {name}");
    let _ = writeln!(out, "edge {e}");
    let _ = writeln!(out, "polynomial {phi}");
    let _ = writeln!(out, "negative-terms {}", phi.negative_term_count());
    let vars: Vec<EdgeId> = phi.vars();
    let mut rng = SplitMix64::new(seed);
    let mut min: Option<BigRational> = None;
    let mut n_samples = 0u32;
    let ones = RationalPoint::all_ones(vars.iter());
    for pt in std::iter::once(ones).chain((0..trials).map(|_| random_point(vars.iter(), &mut rng)))
    {
        let v = phi.evaluate(&pt).expect("point covers all variables");
        min = Some(match min {
            None => v.clone(),
            Some(m) => m.min(v.clone()),
        });
        n_samples += 1;
    }
    let _ = writeln!(out, "seed {seed}");
    let _ = writeln!(out, "samples {n_samples}");
    if let Some(m) = &min {
        let _ = writeln!(out, "min-value {m}");
        let _ = writeln!(
            out,
            "nonnegative {}",
            if m.is_negative() { "NO" } else { "yes" }
        );
    }
    Ok(out)
}

/// Output of the `cert` family: document plus verdict line.
#[derive(Debug)]
pub struct CertOutput {
    pub document: String,
    pub verdict: String,
}

/// `cert construct`: build the certificate for one pair (two edge
/// names) or one edge (a single name) over the series-parallel
/// structure, verify it, and serialize it.
pub fn cmd_cert_construct(path: &str, edges: &[String]) -> Result<CertOutput, CliError> {
    let (g, name) = load_graph(path)?;
    match edges {
        [a, b] => {
            let e = resolve_edge(&g, a)?;
            let f = resolve_edge(&g, b)?;
            let mut cert = construct::construct_delta(&g, &e, &f).map_err(construct_err)?;
            cert.graph = name;
            let outcome = verify_delta(&g, &e, &f, &cert);
            if !outcome.is_verified() {
                return Err(CliError::Verification(format!("{outcome}")));
            }
            Ok(CertOutput {
                document: formats::write_delta_cert(&cert),
                verdict: "verdict verified".into(),
            })
        }
        [a] => {
            let e = resolve_edge(&g, a)?;
            let mut cert = construct::construct_phi(&g, &e).map_err(construct_err)?;
            cert.graph = name;
            let outcome = verify_phi(&g, &e, &cert);
            if !outcome.is_verified() {
                return Err(CliError::Verification(format!("{outcome}")));
            }
            Ok(CertOutput {
                document: formats::write_phi_cert(&cert),
                verdict: "verdict verified".into(),
            })
        }
        _ => Err(CliError::Usage(
            "cert construct needs --edges e,f (delta) or --edges e (phi)".into(),
        )),
    }
}

fn construct_err(e: construct::ConstructError) -> CliError {
    match e {
        construct::ConstructError::NotSeriesParallel(n) => CliError::Verification(format!("{n}")),
        construct::ConstructError::Verify { stage, outcome } => {
            CliError::Verification(format!("at {stage}: {outcome}"))
        }
        other => CliError::Usage(format!("{other}")),
    }
}

/// `cert search`: exhaustive sign search with a node budget.
pub fn cmd_cert_search(path: &str, edges: &[String], budget: u64) -> Result<CertOutput, CliError> {
    let (g, name) = load_graph(path)?;
    match edges {
        [a, b] => {
            let e = resolve_edge(&g, a)?;
            let f = resolve_edge(&g, b)?;
            let outcome = sign_search_delta(&g, &e, &f, budget)
                .map_err(|err| CliError::Usage(format!("{err}")))?;
            match outcome {
                SearchOutcome::Found(mut cert) => {
                    cert.graph = name;
                    let check = verify_delta(&g, &e, &f, &cert);
                    if !check.is_verified() {
                        return Err(CliError::Verification(format!("{check}")));
                    }
                    Ok(CertOutput {
                        document: formats::write_delta_cert(&cert),
                        verdict: "verdict verified".into(),
                    })
                }
                SearchOutcome::Exhausted => Err(CliError::Verification(
                    "sign space exhausted without a verifying certificate".into(),
                )),
                SearchOutcome::Budget => Err(CliError::Budget(format!(
                    "search budget {budget} exceeded before the sign space was covered"
                ))),
            }
        }
        [a] => {
            let e = resolve_edge(&g, a)?;
            let outcome =
                sign_search_phi(&g, &e, budget).map_err(|err| CliError::Usage(format!("{err}")))?;
            match outcome {
                SearchOutcome::Found(mut cert) => {
                    cert.graph = name;
                    let check = verify_phi(&g, &e, &cert);
                    if !check.is_verified() {
                        return Err(CliError::Verification(format!("{check}")));
                    }
                    Ok(CertOutput {
                        document: formats::write_phi_cert(&cert),
                        verdict: "verdict verified".into(),
                    })
                }
                SearchOutcome::Exhausted => Err(CliError::Verification(
                    "sign space exhausted without a verifying certificate".into(),
                )),
                SearchOutcome::Budget => Err(CliError::Budget(format!(
                    "search budget {budget} exceeded before the sign space was covered"
                ))),
            }
        }
        _ => Err(CliError::Usage(
            "cert search needs --edges e,f (delta) or --edges e (phi)".into(),
        )),
    }
}

/// `cert verify`: check a certificate document against a graph. The
/// verdict carries the difference polynomial on expansion mismatches.
pub fn cmd_cert_verify(graph_path: &str, cert_path: &str) -> Result<String, CliError> {
    let (g, _) = load_graph(graph_path)?;
    let text = std::fs::read_to_string(cert_path)
        .map_err(|e| CliError::Input(format!("cannot read `{cert_path}`: {e}")))?;
    let doc =
        formats::parse_cert(&text).map_err(|e| CliError::Input(format!("{cert_path}: {e}")))?;
    let outcome = match &doc {
        CertDoc::Delta(cert) => verify_delta(&g, &cert.e, &cert.f, cert),
        CertDoc::Phi(cert) => verify_phi(&g, &cert.e, cert),
    };
    if outcome.is_verified() {
        Ok("verdict verified\n".into())
    } else {
        Err(CliError::Verification(format!("{outcome}")))
    }
}

/// One survey task outcome.
struct SurveyTask {
    index: u32,
    edges: usize,
    pairs: usize,
    verified_pairs: usize,
    phi_edges: usize,
    verified_phi: usize,
    nonnegative: bool,
    failure: Option<String>,
    graph_dump: Option<String>,
}

/// `survey`: seeded random series-parallel recipes; construct and
/// verify every certificate and sample every Rayleigh difference.
/// Tasks run concurrently; the report is assembled in task order, so
/// output is byte-stable for a fixed seed. Any failing task dumps its
/// graph next to the report as `survey-fail-<index>.graph`.
pub fn cmd_survey(
    count: u32,
    seed: u64,
    max_steps: u32,
    trials: u32,
) -> Result<(String, bool), CliError> {
    if count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    // Pre-generate recipes sequentially so the seed fixes them all.
    let mut rng = SplitMix64::new(seed);
    let recipes: Vec<_> = (0..count)
        .map(|_| random_recipe(&mut rng, max_steps))
        .collect();

    let results: Mutex<Vec<Option<SurveyTask>>> = Mutex::new((0..count).map(|_| None).collect());
    let n_workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(count as usize)
        .max(1);

    std::thread::scope(|scope| {
        for worker in 0..n_workers {
            let recipes = &recipes;
            let results = &results;
            scope.spawn(move || {
                for index in (worker..count as usize).step_by(n_workers) {
                    let task = run_survey_task(index as u32, &recipes[index], seed, trials);
                    results.lock().unwrap()[index] = Some(task);
                }
            });
        }
    });

    let tasks: Vec<SurveyTask> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|t| t.expect("every task ran"))
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "report survey");
    let _ = writeln!(out, "count {count}");
    let _ = writeln!(out, "seed {seed}");
    let _ = writeln!(out, "max-steps {max_steps}");
    let _ = writeln!(out, "trials {trials}");
    let mut failures = 0u32;
    for task in &tasks {
        match &task.failure {
            None => {
                let _ = writeln!(
                    out,
                    "task {:03} edges={} pairs={} verified={} phi={} verified-phi={} nonnegative={}",
                    task.index,
                    task.edges,
                    task.pairs,
                    task.verified_pairs,
                    task.phi_edges,
                    task.verified_phi,
                    if task.nonnegative { "yes" } else { "NO" },
                );
            }
            Some(msg) => {
                failures += 1;
                let _ = writeln!(out, "task {:03} FAILED {msg}", task.index);
                if let Some(dump) = &task.graph_dump {
                    let file = format!("survey-fail-{:03}.graph", task.index);
                    if std::fs::write(&file, dump).is_ok() {
                        let _ = writeln!(out, "task {:03} graph-dumped {file}", task.index);
                    }
                }
            }
        }
    }
    let _ = writeln!(
        out,
        "summary tasks={count} passed={} failures={failures}",
        count - failures
    );
    Ok((out, failures == 0))
}

fn run_survey_task(index: u32, recipe: &rayforest::SpRecipe, seed: u64, trials: u32) -> SurveyTask {
    let graph = match recipe.replay() {
        Ok(g) => g,
        Err(e) => {
            return SurveyTask {
                index,
                edges: 0,
                pairs: 0,
                verified_pairs: 0,
                phi_edges: 0,
                verified_phi: 0,
                nonnegative: false,
                failure: Some(format!("replay failed: {e}")),
                graph_dump: None,
            }
        }
    };
    let dump = formats::write_graph(&graph);
    let mut task = SurveyTask {
        index,
        edges: graph.n_edges(),
        pairs: 0,
        verified_pairs: 0,
        phi_edges: 0,
        verified_phi: 0,
        nonnegative: true,
        failure: None,
        graph_dump: Some(dump),
    };
    let pair = match construct::construct_all(&graph) {
        Ok(p) => p,
        Err(e) => {
            task.failure = Some(format!("construction failed: {e}"));
            return task;
        }
    };
    task.pairs = pair.delta.len();
    task.phi_edges = pair.phi.len();
    for ((a, b), cert) in &pair.delta {
        if verify_delta(&pair.graph, a, b, cert).is_verified() {
            task.verified_pairs += 1;
        } else {
            task.failure = Some(format!("delta {{{a},{b}}} did not verify"));
        }
        match sample_nonnegativity(&pair.graph, a, b, trials, seed ^ u64::from(index), "survey") {
            Ok(report) if report.all_nonnegative() => {}
            Ok(_) => {
                task.nonnegative = false;
                task.failure = Some(format!("delta {{{a},{b}}} sampled negative"));
            }
            Err(e) => task.failure = Some(format!("sampling failed: {e}")),
        }
    }
    for (a, cert) in &pair.phi {
        if verify_phi(&pair.graph, a, cert).is_verified() {
            task.verified_phi += 1;
        } else {
            task.failure = Some(format!("phi {{{a}}} did not verify"));
        }
    }
    if task.failure.is_none() {
        task.graph_dump = None;
    }
    task
}

/// The fixed complete bipartite graph on 3+3 vertices.
pub fn k33() -> MultiGraph {
    MultiGraph::complete_bipartite(3, 3)
}

/// `k33`: reproduces the negative-terms computation on the bond
/// matroid of K3,3 (the smallest regular matroid that is neither
/// graphic-on-few-vertices territory nor decomposable further), for an
/// adjacent and a non-adjacent edge pair, and samples the independence
/// Rayleigh difference at positive points. The forest/tree version on
/// the graph itself is reported alongside for reference.
pub fn cmd_k33(seed: u64, trials: u32) -> Result<(String, bool), CliError> {
    let g = k33();
    let indep = bond_indep_poly(&g).expect("k33 is connected");
    let basis = bond_basis_poly(&g).expect("k33 is connected");
    let findep = forest_poly(&g);
    let ftrees = tree_poly(&g).expect("k33 is connected");

    let orbits = [
        ("adjacent", EdgeId::new("e03"), EdgeId::new("e04")),
        ("nonadjacent", EdgeId::new("e03"), EdgeId::new("e14")),
    ];

    let mut out = String::new();
    let _ = writeln!(out, "report k33");
    let _ = writeln!(out, "graph bond matroid of K3,3 (9 elements)");
    let _ = writeln!(out, "seed {seed}");
    let mut any_four = false;
    let mut all_nonnegative = true;
    for (label, e, f) in &orbits {
        let di = delta_of_poly(&indep, e, f);
        let db = delta_of_poly(&basis, e, f);
        let diff = di.sub(&db);
        let negs = diff.negative_term_count();
        if negs == 4 {
            any_four = true;
        }
        let _ = writeln!(out, "orbit {label} edges {e} {f}");
        let _ = writeln!(out, "orbit {label} negative-terms {negs}");
        let _ = writeln!(out, "orbit {label} difference-terms {}", diff.n_terms());

        // Sampled nonnegativity of the independence Rayleigh difference.
        let vars: Vec<EdgeId> = di.vars();
        let mut rng = SplitMix64::new(seed);
        let mut min: Option<BigRational> = None;
        let ones = RationalPoint::all_ones(vars.iter());
        for pt in
            std::iter::once(ones).chain((0..trials).map(|_| random_point(vars.iter(), &mut rng)))
        {
            let v = di.evaluate(&pt).expect("point covers all variables");
            min = Some(match min {
                None => v.clone(),
                Some(m) => m.min(v.clone()),
            });
        }
        let min = min.expect("at least one sample");
        if min.is_negative() {
            all_nonnegative = false;
        }
        let _ = writeln!(out, "orbit {label} delta-i-samples {}", trials + 1);
        let _ = writeln!(out, "orbit {label} delta-i-min {min}");

        // Reference numbers for the graph (forest/tree) reading.
        let graphic = forestish_negatives(&findep, &ftrees, e, f);
        let _ = writeln!(out, "orbit {label} graphic-negative-terms {graphic}");
    }
    let _ = writeln!(
        out,
        "four-negative-terms {}",
        if any_four { "yes" } else { "NO" }
    );
    let _ = writeln!(
        out,
        "delta-i-nonnegative {}",
        if all_nonnegative { "yes" } else { "NO" }
    );
    Ok((out, any_four && all_nonnegative))
}

fn forestish_negatives(fp: &Polynomial, tp: &Polynomial, e: &EdgeId, f: &EdgeId) -> usize {
    let di = delta_of_poly(fp, e, f);
    let db = delta_of_poly(tp, e, f);
    di.sub(&db).negative_term_count()
}
