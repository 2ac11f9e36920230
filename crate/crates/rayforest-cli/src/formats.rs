//! Text formats: the line-oriented graph format and the certificate
//! document format. Both round-trip losslessly.
//!
//! Graph files hold one statement per line: `vertices N` once, then
//! `edge <name> <u> <v>` with 0-based vertex indices; `#` starts a
//! comment.
//!
//! Certificate documents start with `delta-cert` or `phi-cert`,
//! followed by an optional `graph <name>` line, the pinned edges, and
//! per outer set a `sign` line per cycle plus one line per inner set:
//!
//! ```text
//! delta-cert
//! graph k3
//! edges e f
//! s {}
//! sign {e,f,g} +1
//! a {g} {e,f,g}
//! s {g}
//! sign {e,f,g} +1
//! a {g} {e,f,g}
//! end
//! ```

use std::collections::BTreeSet;

use rayforest::cert::fmt_set;
use rayforest::graph::{EdgeId, EdgeSet, MultiGraph};
use rayforest::{DeltaCert, PhiCert, Sign};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for FormatError {}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

/// Parses the line-oriented graph format.
pub fn parse_graph(input: &str) -> Result<MultiGraph, FormatError> {
    let mut graph: Option<MultiGraph> = None;
    let mut names: BTreeSet<String> = BTreeSet::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("vertices") => {
                if graph.is_some() {
                    return Err(err(line_no, "duplicate `vertices` line"));
                }
                let n: u32 = words
                    .next()
                    .ok_or_else(|| err(line_no, "missing vertex count"))?
                    .parse()
                    .map_err(|_| err(line_no, "vertex count is not a number"))?;
                if words.next().is_some() {
                    return Err(err(line_no, "trailing tokens after vertex count"));
                }
                graph = Some(MultiGraph::new(n));
            }
            Some("edge") => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| err(line_no, "`edge` before `vertices`"))?;
                let name = words
                    .next()
                    .ok_or_else(|| err(line_no, "missing edge name"))?;
                let u: u32 = words
                    .next()
                    .ok_or_else(|| err(line_no, "missing first endpoint"))?
                    .parse()
                    .map_err(|_| err(line_no, "first endpoint is not a number"))?;
                let v: u32 = words
                    .next()
                    .ok_or_else(|| err(line_no, "missing second endpoint"))?
                    .parse()
                    .map_err(|_| err(line_no, "second endpoint is not a number"))?;
                if words.next().is_some() {
                    return Err(err(line_no, "trailing tokens after edge"));
                }
                if !names.insert(name.to_string()) {
                    return Err(err(line_no, format!("duplicate edge name `{name}`")));
                }
                g.add_edge(EdgeId::new(name), u, v)
                    .map_err(|e| err(line_no, e.to_string()))?;
            }
            Some(other) => {
                return Err(err(line_no, format!("unknown statement `{other}`")));
            }
            None => unreachable!("blank lines were skipped"),
        }
    }
    graph.ok_or_else(|| err(input.lines().count().max(1), "missing `vertices` line"))
}

/// Writes a graph back into the line format. Vertex ids are compacted
/// to `0..n` in increasing order.
pub fn write_graph(g: &MultiGraph) -> String {
    let verts: Vec<u32> = g.vertices().collect();
    let index = |v: u32| verts.iter().position(|&x| x == v).unwrap();
    let mut out = format!("vertices {}\n", verts.len());
    for e in g.edges() {
        out.push_str(&format!("edge {} {} {}\n", e.id, index(e.u), index(e.v)));
    }
    out
}

fn write_set(s: &EdgeSet) -> String {
    fmt_set(s)
}

fn parse_set(token: &str, line: usize) -> Result<EdgeSet, FormatError> {
    let inner = token
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| err(line, format!("expected a set like {{a,b}}, got `{token}`")))?;
    let mut set = EdgeSet::new();
    if inner.is_empty() {
        return Ok(set);
    }
    for name in inner.split(',') {
        if name.is_empty() {
            return Err(err(line, "empty name inside set"));
        }
        if !set.insert(EdgeId::new(name)) {
            return Err(err(line, format!("repeated name `{name}` inside set")));
        }
    }
    Ok(set)
}

fn write_body(out: &mut String, body: &rayforest::cert::CertBody, outer_kw: &str, inner_kw: &str) {
    for (outer, list) in &body.entries {
        out.push_str(&format!("{outer_kw} {}\n", write_set(outer)));
        for ((o, cycle), sign) in body.signs.iter() {
            if o == outer {
                out.push_str(&format!("sign {} {sign}\n", write_set(cycle)));
            }
        }
        for (inner, cycle) in list {
            out.push_str(&format!(
                "{inner_kw} {} {}\n",
                write_set(inner),
                write_set(cycle)
            ));
        }
    }
}

pub fn write_delta_cert(cert: &DeltaCert) -> String {
    let mut out = String::from("delta-cert\n");
    if !cert.graph.is_empty() {
        out.push_str(&format!("graph {}\n", cert.graph));
    }
    out.push_str(&format!("edges {} {}\n", cert.e, cert.f));
    write_body(&mut out, &cert.body, "s", "a");
    out.push_str("end\n");
    out
}

pub fn write_phi_cert(cert: &PhiCert) -> String {
    let mut out = String::from("phi-cert\n");
    if !cert.graph.is_empty() {
        out.push_str(&format!("graph {}\n", cert.graph));
    }
    out.push_str(&format!("edge {}\n", cert.e));
    write_body(&mut out, &cert.body, "q", "b");
    out.push_str("end\n");
    out
}

/// A parsed certificate document of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertDoc {
    Delta(DeltaCert),
    Phi(PhiCert),
}

pub fn parse_cert(input: &str) -> Result<CertDoc, FormatError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first_no, first) = lines
        .next()
        .ok_or_else(|| err(1, "empty certificate document"))?;
    let is_delta = match first {
        "delta-cert" => true,
        "phi-cert" => false,
        other => {
            return Err(err(
                first_no,
                format!("expected `delta-cert` or `phi-cert`, got `{other}`"),
            ))
        }
    };

    let mut graph = String::new();
    let mut pins: Option<Vec<EdgeId>> = None;
    let mut body = rayforest::cert::CertBody::new();
    let mut current: Option<EdgeSet> = None;
    let mut saw_end = false;

    let (outer_kw, inner_kw, pins_kw, n_pins) = if is_delta {
        ("s", "a", "edges", 2)
    } else {
        ("q", "b", "edge", 1)
    };

    for (line_no, line) in lines {
        if saw_end {
            return Err(err(line_no, "content after `end`"));
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        if head == "graph" {
            if rest.len() != 1 {
                return Err(err(line_no, "graph line takes one name"));
            }
            graph = rest[0].to_string();
        } else if head == pins_kw {
            if rest.len() != n_pins {
                return Err(err(line_no, format!("`{pins_kw}` takes {n_pins} name(s)")));
            }
            pins = Some(rest.iter().map(|s| EdgeId::new(s)).collect());
        } else if head == outer_kw {
            if rest.len() != 1 {
                return Err(err(line_no, format!("`{outer_kw}` takes one set")));
            }
            let outer = parse_set(rest[0], line_no)?;
            body.entries.entry(outer.clone()).or_default();
            current = Some(outer);
        } else if head == "sign" {
            let outer = current
                .clone()
                .ok_or_else(|| err(line_no, "sign line outside an outer-set block"))?;
            if rest.len() != 2 {
                return Err(err(line_no, "sign line takes a cycle set and ±1"));
            }
            let cycle = parse_set(rest[0], line_no)?;
            let sign = match rest[1] {
                "+1" => Sign::Plus,
                "-1" => Sign::Minus,
                other => return Err(err(line_no, format!("bad sign `{other}`"))),
            };
            if body.signs.insert((outer, cycle), sign).is_some() {
                return Err(err(line_no, "duplicate sign line"));
            }
        } else if head == inner_kw {
            let outer = current
                .clone()
                .ok_or_else(|| err(line_no, "inner-set line outside an outer-set block"))?;
            if rest.len() != 2 {
                return Err(err(
                    line_no,
                    format!("`{inner_kw}` takes an inner set and a cycle set"),
                ));
            }
            let inner = parse_set(rest[0], line_no)?;
            let cycle = parse_set(rest[1], line_no)?;
            body.entries.entry(outer).or_default().push((inner, cycle));
        } else if head == "end" {
            saw_end = true;
        } else {
            return Err(err(line_no, format!("unknown statement `{head}`")));
        }
    }
    if !saw_end {
        return Err(err(input.lines().count().max(1), "missing `end`"));
    }
    let pins = pins.ok_or_else(|| err(1, format!("missing `{pins_kw}` line")))?;
    if !body.signs_consistent() {
        return Err(err(
            1,
            "sign lines do not cover exactly the listed (outer set, cycle) pairs",
        ));
    }
    Ok(if is_delta {
        CertDoc::Delta(DeltaCert {
            graph,
            e: pins[0].clone(),
            f: pins[1].clone(),
            body,
        })
    } else {
        CertDoc::Phi(PhiCert {
            graph,
            e: pins[0].clone(),
            body,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayforest::construct;
    use rayforest::rng::SplitMix64;
    use rayforest::sp::{random_recipe, SpBase};

    #[test]
    fn graph_round_trip() {
        let text = "# a triangle with a doubled side\nvertices 3\nedge e 0 1\nedge f 1 2\nedge g 0 2\nedge p 0 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.n_edges(), 4);
        let again = parse_graph(&write_graph(&g)).unwrap();
        assert!(again.iso_by_edge_names(&g));
    }

    #[test]
    fn graph_parser_rejects_bad_input() {
        assert_eq!(parse_graph("edge e 0 1\n").unwrap_err().line, 1);
        assert_eq!(parse_graph("vertices 2\nedge e 0 5\n").unwrap_err().line, 2);
        assert_eq!(
            parse_graph("vertices 2\nedge e 0 1\nedge e 0 1\n")
                .unwrap_err()
                .line,
            3
        );
        assert!(parse_graph("").is_err());
        assert!(parse_graph("vertices 2\nvertices 2\n").is_err());
    }

    #[test]
    fn empty_graph_parses() {
        let g = parse_graph("vertices 4\n").unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn cert_documents_round_trip() {
        let base = SpBase::K3([EdgeId::new("e"), EdgeId::new("f"), EdgeId::new("g")]);
        let pair = construct::base_certs(&base).unwrap();
        let dc = pair
            .delta_cert(&EdgeId::new("e"), &EdgeId::new("f"))
            .unwrap();
        let text = write_delta_cert(dc);
        match parse_cert(&text).unwrap() {
            CertDoc::Delta(parsed) => assert_eq!(&parsed, dc),
            _ => panic!("wrong kind"),
        }
        let pc = pair.phi_cert(&EdgeId::new("e")).unwrap();
        let text = write_phi_cert(pc);
        match parse_cert(&text).unwrap() {
            CertDoc::Phi(parsed) => assert_eq!(&parsed, pc),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn constructed_cert_serialization_is_idempotent() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..5 {
            let recipe = random_recipe(&mut rng, 4);
            let g = recipe.replay().unwrap();
            let pair = construct::construct_all(&g).unwrap();
            for cert in pair.delta.values() {
                let once = write_delta_cert(cert);
                let CertDoc::Delta(parsed) = parse_cert(&once).unwrap() else {
                    panic!("wrong kind");
                };
                assert_eq!(write_delta_cert(&parsed), once);
            }
        }
    }

    #[test]
    fn cert_parser_rejects_malformed_documents() {
        assert!(parse_cert("").is_err());
        assert!(parse_cert("delta-cert\nedges e f\n").is_err()); // no end
        assert!(parse_cert("delta-cert\nedges e\nend\n").is_err()); // arity
        assert!(parse_cert("phi-cert\nedge e\nsign {a} +1\nend\n").is_err()); // sign outside block
        assert!(
            parse_cert("delta-cert\nedges e f\ns {}\na {g} {e,f,g}\nend\n").is_err(),
            "missing sign line must be rejected"
        );
    }
}
