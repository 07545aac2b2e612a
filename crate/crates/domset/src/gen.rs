//! Instance generators: random connected graphs, random two-part instances,
//! 3-CNF formulas, and the clause-cover construction that turns a formula
//! into a partitioned domination instance.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::instance::BipartiteInstance;
use crate::io::ParseError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("no connected simple graph with n={n}, m={m} exists")]
    InfeasibleParams { n: usize, m: usize },
}

/// Uniform-feeling connected G(n, m): a random spanning tree plus extra
/// edges sampled uniformly from the remaining non-edges. Deterministic for a
/// fixed seed.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    let max_m = n.saturating_mul(n.saturating_sub(1)) / 2;
    if n == 0 || m + 1 < n || m > max_m {
        return Err(GenError::InfeasibleParams { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut g = Graph::new(n);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        g.add_edge(order[i], order[j]);
    }
    let mut non_edges: Vec<(usize, usize)> = Vec::with_capacity(max_m - (n - 1));
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) {
                non_edges.push((u, v));
            }
        }
    }
    let extra = m - (n - 1);
    for k in 0..extra {
        let pick = rng.gen_range(k..non_edges.len());
        non_edges.swap(k, pick);
        let (u, v) = non_edges[k];
        g.add_edge(u, v);
    }
    Ok(g)
}

/// Random two-part instance: every UB-UD pair becomes an edge independently
/// with probability `density`. Degree-0 UD nodes are possible; callers that
/// need feasible instances filter or resample.
pub fn random_bipartite(nb: usize, nd: usize, density: f64, seed: u64) -> BipartiteInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for b in 0..nb {
        for d in 0..nd {
            if rng.gen_bool(density) {
                edges.push((b, d));
            }
        }
    }
    let ub: Vec<usize> = (1..=nb).collect();
    let ud: Vec<usize> = (1..=nd).collect();
    BipartiteInstance::from_parts(&ub, &ud, &edges)
}

/// Three UB nodes cyclically covering three UD nodes (a 6-cycle). The
/// smallest instance whose covering relaxation is fractional: LP optimum
/// 3/2, integral optimum 2.
pub fn six_cycle_instance() -> BipartiteInstance {
    BipartiteInstance::from_parts(
        &[1, 2, 3],
        &[1, 2, 3],
        &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)],
    )
}

/// Two disjoint copies of [`six_cycle_instance`]: LP optimum 3, integral
/// optimum 4.
pub fn double_six_cycle_instance() -> BipartiteInstance {
    let mut edges = vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)];
    let copy: Vec<_> = edges.iter().map(|&(b, d)| (b + 3, d + 3)).collect();
    edges.extend(copy);
    let labels: Vec<usize> = (1..=6).collect();
    BipartiteInstance::from_parts(&labels, &labels, &edges)
}

/// A 3-CNF formula: every clause has exactly three literal slots (repeats
/// allowed), variables are `1..=num_vars`, and a negative literal is the
/// negation of the variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

/// DIMACS-CNF subset: `p cnf <n> <m>` followed by one clause per line,
/// exactly three literals, terminated by 0. `c` lines are comments.
pub fn parse_cnf(text: &str) -> Result<CnfFormula, ParseError> {
    let err = |line, msg: String| ParseError { line, message: msg };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "p" {
            if header.is_some() {
                return Err(err(line_no, "duplicate problem line".into()));
            }
            if toks.len() != 4 || toks[1] != "cnf" {
                return Err(err(line_no, "expected `p cnf <n> <m>`".into()));
            }
            let n = toks[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad variable count {:?}", toks[2])))?;
            let m = toks[3]
                .parse()
                .map_err(|_| err(line_no, format!("bad clause count {:?}", toks[3])))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| err(line_no, "clause before problem line".into()))?;
        let lits: Vec<i32> = toks
            .iter()
            .map(|t| t.parse::<i32>().map_err(|_| err(line_no, format!("bad literal {t:?}"))))
            .collect::<Result<_, _>>()?;
        if lits.last() != Some(&0) {
            return Err(err(line_no, "clause line must end in 0".into()));
        }
        let body = &lits[..lits.len() - 1];
        if body.len() != 3 {
            return Err(err(
                line_no,
                format!("expected exactly 3 literals per clause, got {}", body.len()),
            ));
        }
        for &l in body {
            if l == 0 || l.unsigned_abs() as usize > n {
                return Err(err(line_no, format!("literal {l} out of range for {n} variables")));
            }
        }
        clauses.push([body[0], body[1], body[2]]);
    }
    let (n, m) = header.ok_or_else(|| err(0, "missing problem line".into()))?;
    if clauses.len() != m {
        return Err(err(0, format!("header declares {m} clauses but found {}", clauses.len())));
    }
    Ok(CnfFormula { num_vars: n, clauses })
}

pub fn write_cnf(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
    }
    out
}

/// Random 3-CNF over distinct variables per clause, random polarities.
pub fn random_cnf(num_vars: usize, num_clauses: usize, seed: u64) -> CnfFormula {
    assert!(num_vars >= 3, "need at least 3 variables for distinct-literal clauses");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let mut vars: Vec<usize> = (1..=num_vars).collect();
        vars.shuffle(&mut rng);
        let mut clause = [0i32; 3];
        for (slot, &v) in clause.iter_mut().zip(&vars[..3]) {
            *slot = if rng.gen_bool(0.5) { v as i32 } else { -(v as i32) };
        }
        clauses.push(clause);
    }
    CnfFormula { num_vars, clauses }
}

/// All eight sign patterns over three variables: unsatisfiable.
pub fn unsatisfiable_core() -> CnfFormula {
    let mut clauses = Vec::new();
    for bits in 0..8u8 {
        let lit = |i: usize| {
            let v = (i + 1) as i32;
            if bits & (1 << i) == 0 {
                v
            } else {
                -v
            }
        };
        clauses.push([lit(0), lit(1), lit(2)]);
    }
    CnfFormula { num_vars: 3, clauses }
}

/// A graph with its vertex set split into parts; `target` indexes the part
/// whose vertices must be dominated from outside.
#[derive(Clone, Debug)]
pub struct KPartInstance {
    pub graph: Graph,
    pub parts: Vec<Vec<VertexId>>,
    pub target: usize,
}

/// The clause-cover construction: one part `{x_i, ~x_i}` per variable, one
/// part holding all clause vertices, and an edge between a literal and every
/// clause containing it. A satisfying assignment corresponds exactly to a
/// target-part cover of size `num_vars`.
pub fn sat_to_pds(f: &CnfFormula) -> KPartInstance {
    let n = f.num_vars;
    let m = f.clauses.len();
    let mut g = Graph::new(2 * n + m);
    let lit_vertex = |lit: i32| -> usize {
        let var = lit.unsigned_abs() as usize - 1;
        if lit > 0 {
            2 * var
        } else {
            2 * var + 1
        }
    };
    for (j, clause) in f.clauses.iter().enumerate() {
        for &lit in clause {
            g.add_edge(lit_vertex(lit), 2 * n + j);
        }
    }
    let mut parts: Vec<Vec<usize>> = (0..n).map(|i| vec![2 * i, 2 * i + 1]).collect();
    parts.push((2 * n..2 * n + m).collect());
    KPartInstance { graph: g, parts, target: n }
}
