//! Text formats: edge lists, DIMACS graphs, two-part covering instances,
//! and the machine-readable result document.
//!
//! File ids are 1-based (DIMACS convention); everything internal is 0-based.
//! Parsers return structured errors with line numbers and never panic on
//! arbitrary input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::instance::BipartiteInstance;
use crate::solve::{SolveResult, SolveStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Dimacs,
    PdsText,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

/// A parsed graph plus the original vertex labels, indexed by internal id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

fn is_comment(line: &str) -> bool {
    matches!(line.chars().next(), Some('#') | Some('%') | Some('c'))
}

fn parse_id(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError::new(line, format!("bad vertex id {tok:?} (expected a non-negative integer)")))
}

/// Parses a graph in the given format. `PdsText` is a two-part instance
/// format, not a graph format, and is rejected here; use [`parse_pds`].
pub fn parse_graph(text: &str, format: GraphFormat) -> Result<ParsedGraph, ParseError> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Dimacs => parse_dimacs(text),
        GraphFormat::PdsText => Err(ParseError::new(
            0,
            "pds format describes a two-part instance, not a graph",
        )),
    }
}

/// One `u v` pair per line; `#` and `%` start comment lines. Vertices are
/// renumbered densely in order of first appearance; self-loops and duplicate
/// edges are dropped.
pub fn parse_edge_list(text: &str) -> Result<ParsedGraph, ParseError> {
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(ParseError::new(
                line_no,
                format!("expected two vertex ids, got {} tokens", toks.len()),
            ));
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&toks) {
            parse_id(tok, line_no)?;
            *slot = *ids.entry(tok).or_insert_with(|| {
                labels.push(tok.to_string());
                labels.len() - 1
            });
        }
        edges.push((pair[0], pair[1]));
    }
    let graph = Graph::from_edges(labels.len(), &edges);
    Ok(ParsedGraph { graph, labels })
}

/// DIMACS graph: a `p edge n m` header followed by `m` lines `e u v` with
/// 1-based ids; `c` lines are comments.
pub fn parse_dimacs(text: &str) -> Result<ParsedGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut graph = Graph::new(0);
    let mut edge_lines = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(ParseError::new(line_no, "duplicate problem line"));
                }
                if toks.len() != 4 || toks[1] != "edge" {
                    return Err(ParseError::new(line_no, "expected `p edge <n> <m>`"));
                }
                let n = parse_id(toks[2], line_no)?;
                let m = parse_id(toks[3], line_no)?;
                header = Some((n, m));
                graph = Graph::new(n);
            }
            "e" => {
                let (n, _) = header
                    .ok_or_else(|| ParseError::new(line_no, "edge before problem line"))?;
                if toks.len() != 3 {
                    return Err(ParseError::new(line_no, "expected `e <u> <v>`"));
                }
                let u = parse_id(toks[1], line_no)?;
                let v = parse_id(toks[2], line_no)?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(ParseError::new(
                        line_no,
                        format!("vertex id out of range 1..={n}"),
                    ));
                }
                graph.add_edge(u - 1, v - 1);
                edge_lines += 1;
            }
            other => {
                return Err(ParseError::new(line_no, format!("unknown record {other:?}")));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| ParseError::new(0, "missing problem line"))?;
    if edge_lines != m {
        return Err(ParseError::new(
            0,
            format!("header declares {m} edges but found {edge_lines}"),
        ));
    }
    let labels = (1..=n).map(|v| v.to_string()).collect();
    Ok(ParsedGraph { graph, labels })
}

/// Two-part instance: `p pds <|UB|> <|UD|> <m>` then `m` lines
/// `e <ub-index> <ud-index>` with 1-based indices. A UD node of degree 0 is
/// accepted here; the solver reports such instances as infeasible.
pub fn parse_pds(text: &str) -> Result<BipartiteInstance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(ParseError::new(line_no, "duplicate problem line"));
                }
                if toks.len() != 5 || toks[1] != "pds" {
                    return Err(ParseError::new(line_no, "expected `p pds <|UB|> <|UD|> <m>`"));
                }
                header = Some((
                    parse_id(toks[2], line_no)?,
                    parse_id(toks[3], line_no)?,
                    parse_id(toks[4], line_no)?,
                ));
            }
            "e" => {
                let (nb, nd, _) = header
                    .ok_or_else(|| ParseError::new(line_no, "edge before problem line"))?;
                if toks.len() != 3 {
                    return Err(ParseError::new(line_no, "expected `e <ub-index> <ud-index>`"));
                }
                let b = parse_id(toks[1], line_no)?;
                let d = parse_id(toks[2], line_no)?;
                if b == 0 || b > nb {
                    return Err(ParseError::new(line_no, format!("UB index out of range 1..={nb}")));
                }
                if d == 0 || d > nd {
                    return Err(ParseError::new(line_no, format!("UD index out of range 1..={nd}")));
                }
                edges.push((b - 1, d - 1));
            }
            other => {
                return Err(ParseError::new(line_no, format!("unknown record {other:?}")));
            }
        }
    }
    let (nb, nd, m) = header.ok_or_else(|| ParseError::new(0, "missing problem line"))?;
    if edges.len() != m {
        return Err(ParseError::new(
            0,
            format!("header declares {m} edges but found {}", edges.len()),
        ));
    }
    let ub_origins: Vec<usize> = (1..=nb).collect();
    let ud_origins: Vec<usize> = (1..=nd).collect();
    Ok(BipartiteInstance::from_parts(&ub_origins, &ud_origins, &edges))
}

/// Edge list with 1-based ids. Isolated vertices are not representable.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

/// Serializes an instance with positional 1-based indices (current sorted
/// node order of each part).
pub fn write_pds(h: &BipartiteInstance) -> String {
    let ub: Vec<_> = h.ub().iter().copied().collect();
    let ud: Vec<_> = h.ud().iter().copied().collect();
    let ud_pos: BTreeMap<_, _> = ud.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = format!("p pds {} {} {}\n", ub.len(), ud.len(), h.edge_count());
    for (bi, &b) in ub.iter().enumerate() {
        for w in h.neighbors(b) {
            let _ = writeln!(out, "e {} {}", bi + 1, ud_pos[w] + 1);
        }
    }
    out
}

/// The machine-readable result document. Serialized as TOML so the bench
/// harness and tests can consume results without scraping logs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solution: Option<Vec<String>>,
    pub s_num: u64,
    pub lp_calls: u64,
    pub multilp_calls: u64,
    pub multilp_tightened: u64,
    pub ldpb_fallbacks: u64,
    pub rule_fires: Vec<u64>,
    pub wall_time_seconds: f64,
}

impl ResultDoc {
    /// Builds the document, mapping solution ids through `label`.
    pub fn from_result(result: &SolveResult, label: impl Fn(usize) -> String) -> Self {
        ResultDoc {
            status: result.status,
            size: result.size(),
            solution: result
                .solution
                .as_ref()
                .map(|s| s.iter().map(|&v| label(v)).collect()),
            s_num: result.stats.s_num,
            lp_calls: result.stats.lp_calls,
            multilp_calls: result.stats.multilp_calls,
            multilp_tightened: result.stats.multilp_tightened,
            ldpb_fallbacks: result.stats.ldpb_fallbacks,
            rule_fires: result.stats.rule_fires.to_vec(),
            wall_time_seconds: result.stats.wall_time_seconds,
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("result document serializes")
    }
}

/// Renders a result document with identity labels (ids as decimal strings).
pub fn write_result(result: &SolveResult) -> String {
    ResultDoc::from_result(result, |v| v.to_string()).to_text()
}

/// Parses a result document produced by [`write_result`].
pub fn read_result(text: &str) -> Result<ResultDoc, ParseError> {
    toml::from_str(text).map_err(|e| ParseError::new(0, e.to_string()))
}
