//! Combinatorial domains `Q` as linear systems over binary design variables,
//! with exhaustive enumerators for desk-scale instances.

use std::collections::VecDeque;

use itertools::Itertools;
use owa_milp::{Model, Sense, VarKind};

use crate::error::{OwaError, Result};

/// Default enumeration cap; override with the `OWA_ENUM_CAP` environment variable.
pub const DEFAULT_ENUM_CAP: usize = 10_000_000;

pub fn enumeration_cap() -> usize {
    std::env::var("OWA_ENUM_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_ENUM_CAP)
}

/// Undirected simple graph on vertices `1..=n_vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    coords: Option<Vec<(usize, usize)>>,
}

impl Graph {
    /// Edges may be given in either orientation; they are stored as `(u, v)`
    /// with `u < v`, in input order.
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut stored = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(OwaError::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if u == 0 || v > n_vertices {
                return Err(OwaError::InvalidGraph(format!("edge ({a},{b}) outside 1..={n_vertices}")));
            }
            if stored.contains(&(u, v)) {
                return Err(OwaError::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            stored.push((u, v));
        }
        Ok(Self { n_vertices, edges: stored, coords: None })
    }

    pub fn with_coords(mut self, coords: Vec<(usize, usize)>) -> Result<Self> {
        if coords.len() != self.n_vertices {
            return Err(OwaError::DimensionMismatch { expected: self.n_vertices, found: coords.len() });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (1..=n).tuple_combinations().collect();
        Self::new(n, &edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v, v + 1)).collect();
        Self::new(n, &edges).expect("path graph is simple")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[(usize, usize)]> {
        self.coords.as_deref()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key)
    }

    /// Neighbours of every vertex as `(neighbour, edge index)`, ascending by neighbour.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices + 1];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Drops vertex `r` and its edges; higher vertex ids shift down by one.
    pub fn remove_vertex(&self, r: usize) -> Result<Graph> {
        if r == 0 || r > self.n_vertices {
            return Err(OwaError::InvalidGraph(format!("no vertex {r}")));
        }
        let shift = |v: usize| if v > r { v - 1 } else { v };
        let edges: Vec<_> =
            self.edges.iter().filter(|&&(u, v)| u != r && v != r).map(|&(u, v)| (shift(u), shift(v))).collect();
        let mut g = Graph::new(self.n_vertices - 1, &edges)?;
        if let Some(coords) = &self.coords {
            let kept = coords.iter().enumerate().filter(|(i, _)| i + 1 != r).map(|(_, &c)| c).collect();
            g = g.with_coords(kept)?;
        }
        Ok(g)
    }
}

/// A variable of a domain row: design variable `X(e)` or auxiliary `Aux(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomVar {
    X(usize),
    Aux(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainRow {
    pub coeffs: Vec<(DomVar, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxVar {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    ExplicitCardinality {
        k: usize,
    },
    ShortestPath {
        graph: Graph,
        source: usize,
        sink: usize,
    },
    PerfectMatching {
        graph: Graph,
    },
    /// A finite list of binary vectors, described by its convex hull.
    ExplicitPoints {
        points: Vec<Vec<u8>>,
    },
}

/// Linear description of `Q` plus its enumerator.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub n_design: usize,
    pub x_names: Vec<String>,
    pub aux: Vec<AuxVar>,
    pub rows: Vec<DomainRow>,
    pub kind: DomainKind,
}

/// Column indices of a domain's variables inside a `Model`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainColumns {
    pub x: Vec<usize>,
    pub aux: Vec<usize>,
}

pub fn explicit_cardinality_domain(n: usize, k: usize) -> Result<DomainSpec> {
    if k > n {
        return Err(OwaError::InvalidArgument(format!("cardinality {k} exceeds {n} variables")));
    }
    if n == 0 {
        return Err(OwaError::InvalidArgument("domain needs at least one variable".into()));
    }
    let row = DomainRow {
        coeffs: (0..n).map(|e| (DomVar::X(e), 1.0)).collect(),
        sense: Sense::Eq,
        rhs: k as f64,
        tag: "card",
    };
    Ok(DomainSpec {
        n_design: n,
        x_names: (1..=n).map(|e| format!("x_{e}")).collect(),
        aux: Vec::new(),
        rows: vec![row],
        kind: DomainKind::ExplicitCardinality { k },
    })
}

/// Unit flow from `source` to `sink` over both orientations of every edge,
/// with `phi_uv + phi_vu <= x_uv`. Arc `e` is `u -> v` and arc `m + e` is
/// `v -> u` for edge `e = (u, v)`.
pub fn shortest_path_domain(graph: &Graph, source: usize, sink: usize) -> Result<DomainSpec> {
    let nv = graph.n_vertices();
    if source == sink {
        return Err(OwaError::InvalidArgument("source and sink coincide".into()));
    }
    if source == 0 || source > nv || sink == 0 || sink > nv {
        return Err(OwaError::InvalidArgument(format!("terminals ({source},{sink}) outside 1..={nv}")));
    }
    if graph.edges().is_empty() {
        return Err(OwaError::InvalidGraph("graph has no edges".into()));
    }
    let m = graph.edges().len();
    let mut aux = Vec::with_capacity(2 * m);
    for &(u, v) in graph.edges() {
        aux.push(AuxVar { name: format!("phi_{u}_{v}"), lower: 0.0, upper: 1.0 });
    }
    for &(u, v) in graph.edges() {
        aux.push(AuxVar { name: format!("phi_{v}_{u}"), lower: 0.0, upper: 1.0 });
    }
    let mut rows = Vec::new();
    for w in 1..=nv {
        let mut coeffs = Vec::new();
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if u == w {
                coeffs.push((DomVar::Aux(e), 1.0));
                coeffs.push((DomVar::Aux(m + e), -1.0));
            } else if v == w {
                coeffs.push((DomVar::Aux(m + e), 1.0));
                coeffs.push((DomVar::Aux(e), -1.0));
            }
        }
        let (rhs, tag) = if w == source {
            (1.0, "SPPb")
        } else if w == sink {
            (-1.0, "SPPc")
        } else {
            (0.0, "SPPd")
        };
        rows.push(DomainRow { coeffs, sense: Sense::Eq, rhs, tag });
    }
    for e in 0..m {
        rows.push(DomainRow {
            coeffs: vec![(DomVar::Aux(e), 1.0), (DomVar::Aux(m + e), 1.0), (DomVar::X(e), -1.0)],
            sense: Sense::Le,
            rhs: 0.0,
            tag: "SPPe",
        });
    }
    Ok(DomainSpec {
        n_design: m,
        x_names: graph.edges().iter().map(|(u, v)| format!("x_{u}_{v}")).collect(),
        aux,
        rows,
        kind: DomainKind::ShortestPath { graph: graph.clone(), source, sink },
    })
}

pub fn perfect_matching_domain(graph: &Graph) -> Result<DomainSpec> {
    let nv = graph.n_vertices();
    if nv % 2 == 1 {
        return Err(OwaError::OddVertexCount(nv));
    }
    if graph.edges().is_empty() {
        return Err(OwaError::InvalidGraph("graph has no edges".into()));
    }
    let rows = (1..=nv)
        .map(|w| DomainRow {
            coeffs: graph
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| u == w || v == w)
                .map(|(e, _)| (DomVar::X(e), 1.0))
                .collect(),
            sense: Sense::Eq,
            rhs: 1.0,
            tag: "PM1",
        })
        .collect();
    Ok(DomainSpec {
        n_design: graph.edges().len(),
        x_names: graph.edges().iter().map(|(u, v)| format!("x_{u}_{v}")).collect(),
        aux: Vec::new(),
        rows,
        kind: DomainKind::PerfectMatching { graph: graph.clone() },
    })
}

/// `Q` given as an explicit list of distinct binary vectors. Modeled as
/// `x = sum_k lambda_k v^k`, `sum_k lambda_k = 1`, `lambda >= 0`; a binary `x`
/// in that hull is necessarily one of the listed points.
pub fn explicit_points_domain(points: Vec<Vec<u8>>) -> Result<DomainSpec> {
    let n = points.first().map(Vec::len).ok_or_else(|| OwaError::InvalidArgument("no points".into()))?;
    if n == 0 {
        return Err(OwaError::InvalidArgument("points have no coordinates".into()));
    }
    for pt in &points {
        if pt.len() != n {
            return Err(OwaError::DimensionMismatch { expected: n, found: pt.len() });
        }
        if pt.iter().any(|&v| v > 1) {
            return Err(OwaError::InvalidArgument("points must be binary".into()));
        }
    }
    if points.iter().duplicates().next().is_some() {
        return Err(OwaError::InvalidArgument("duplicate point".into()));
    }
    let aux = (1..=points.len()).map(|k| AuxVar { name: format!("lam_{k}"), lower: 0.0, upper: 1.0 }).collect();
    let mut rows: Vec<DomainRow> = (0..n)
        .map(|e| {
            let mut coeffs = vec![(DomVar::X(e), 1.0)];
            coeffs.extend(points.iter().enumerate().filter(|(_, pt)| pt[e] == 1).map(|(k, _)| (DomVar::Aux(k), -1.0)));
            DomainRow { coeffs, sense: Sense::Eq, rhs: 0.0, tag: "hull_link" }
        })
        .collect();
    rows.push(DomainRow {
        coeffs: (0..points.len()).map(|k| (DomVar::Aux(k), 1.0)).collect(),
        sense: Sense::Eq,
        rhs: 1.0,
        tag: "hull_convex",
    });
    Ok(DomainSpec {
        n_design: n,
        x_names: (1..=n).map(|e| format!("x_{e}")).collect(),
        aux,
        rows,
        kind: DomainKind::ExplicitPoints { points },
    })
}

impl DomainSpec {
    pub fn label(&self) -> &'static str {
        match self.kind {
            DomainKind::ExplicitCardinality { .. } => "explicit-cardinality",
            DomainKind::ShortestPath { .. } => "shortest-path",
            DomainKind::PerfectMatching { .. } => "perfect-matching",
            DomainKind::ExplicitPoints { .. } => "explicit-points",
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match &self.kind {
            DomainKind::ShortestPath { graph, .. } | DomainKind::PerfectMatching { graph } => Some(graph),
            _ => None,
        }
    }

    /// Every feasible `x` exactly once, in a deterministic order, using the
    /// cap from [`enumeration_cap`].
    pub fn enumerate(&self) -> Result<Vec<Vec<u8>>> {
        self.enumerate_with_cap(enumeration_cap())
    }

    pub fn enumerate_with_cap(&self, cap: usize) -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::new();
        let mut push = |x: Vec<u8>| -> Result<()> {
            if out.len() >= cap {
                return Err(OwaError::TooLarge { cap });
            }
            out.push(x);
            Ok(())
        };
        match &self.kind {
            DomainKind::ExplicitCardinality { k } => {
                for combo in (0..self.n_design).combinations(*k) {
                    let mut x = vec![0u8; self.n_design];
                    for e in combo {
                        x[e] = 1;
                    }
                    push(x)?;
                }
            }
            DomainKind::ShortestPath { graph, source, sink } => {
                let adj = graph.adjacency();
                let mut visited = vec![false; graph.n_vertices() + 1];
                let mut x = vec![0u8; self.n_design];
                visited[*source] = true;
                simple_paths(&adj, *source, *sink, &mut visited, &mut x, &mut push)?;
            }
            DomainKind::PerfectMatching { graph } => {
                let adj = graph.adjacency();
                let mut matched = vec![false; graph.n_vertices() + 1];
                matched[0] = true;
                let mut x = vec![0u8; self.n_design];
                matchings(&adj, &mut matched, &mut x, &mut push)?;
            }
            DomainKind::ExplicitPoints { points } => {
                for pt in points {
                    push(pt.clone())?;
                }
            }
        }
        Ok(out)
    }

    /// An auxiliary assignment making `(x, aux)` satisfy every row, if one
    /// exists. Shortest-path completions route one unit of flow along the
    /// first path found by breadth-first search inside the support of `x`.
    pub fn aux_completion(&self, x: &[u8]) -> Option<Vec<f64>> {
        if x.len() != self.n_design || x.iter().any(|&v| v > 1) {
            return None;
        }
        let aux = match &self.kind {
            DomainKind::ExplicitCardinality { .. } | DomainKind::PerfectMatching { .. } => Vec::new(),
            DomainKind::ShortestPath { graph, source, sink } => {
                let m = graph.edges().len();
                let mut phi = vec![0.0; 2 * m];
                for (from, e) in bfs_path(graph, x, *source, *sink)? {
                    let forward = graph.edges()[e].0 == from;
                    phi[if forward { e } else { m + e }] = 1.0;
                }
                phi
            }
            DomainKind::ExplicitPoints { points } => {
                let k = points.iter().position(|pt| pt.as_slice() == x)?;
                let mut lam = vec![0.0; points.len()];
                lam[k] = 1.0;
                lam
            }
        };
        self.rows_hold(x, &aux, 1e-9).then_some(aux)
    }

    pub fn contains(&self, x: &[u8]) -> bool {
        self.aux_completion(x).is_some()
    }

    pub fn rows_hold(&self, x: &[u8], aux: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|row| {
            let lhs: f64 = row
                .coeffs
                .iter()
                .map(|&(var, a)| {
                    a * match var {
                        DomVar::X(e) => x[e] as f64,
                        DomVar::Aux(k) => aux[k],
                    }
                })
                .sum();
            row.sense.holds(lhs, row.rhs, tol)
        })
    }

    /// Adds the domain's columns and rows to `model`.
    pub fn add_to_model(&self, model: &mut Model) -> DomainColumns {
        let x: Vec<usize> =
            self.x_names.iter().map(|name| model.add_var(name.clone(), VarKind::Binary, 0.0, 1.0)).collect();
        let aux: Vec<usize> =
            self.aux.iter().map(|a| model.add_var(a.name.clone(), VarKind::Continuous, a.lower, a.upper)).collect();
        for row in &self.rows {
            let coeffs = row
                .coeffs
                .iter()
                .map(|&(var, a)| {
                    let col = match var {
                        DomVar::X(e) => x[e],
                        DomVar::Aux(k) => aux[k],
                    };
                    (col, a)
                })
                .collect();
            model.add_row(coeffs, row.sense, row.rhs, row.tag);
        }
        DomainColumns { x, aux }
    }

    /// For shortest-path domains, the vertex sequence carrying the flow.
    /// Edges selected in `x` but carrying no flow are not part of the answer.
    pub fn flow_path(&self, aux: &[f64]) -> Option<Vec<usize>> {
        let DomainKind::ShortestPath { graph, source, sink } = &self.kind else {
            return None;
        };
        let m = graph.edges().len();
        let mut path = vec![*source];
        let mut at = *source;
        let mut used = vec![false; m];
        while at != *sink {
            let step = graph.edges().iter().enumerate().find_map(|(e, &(u, v))| {
                if used[e] {
                    None
                } else if u == at && aux[e] > 0.5 {
                    Some((e, v))
                } else if v == at && aux[m + e] > 0.5 {
                    Some((e, u))
                } else {
                    None
                }
            });
            let (e, next) = step?;
            used[e] = true;
            path.push(next);
            at = next;
        }
        Some(path)
    }
}

fn simple_paths(
    adj: &[Vec<(usize, usize)>],
    at: usize,
    sink: usize,
    visited: &mut [bool],
    x: &mut [u8],
    push: &mut impl FnMut(Vec<u8>) -> Result<()>,
) -> Result<()> {
    if at == sink {
        return push(x.to_vec());
    }
    for &(next, e) in &adj[at] {
        if !visited[next] {
            visited[next] = true;
            x[e] = 1;
            simple_paths(adj, next, sink, visited, x, push)?;
            x[e] = 0;
            visited[next] = false;
        }
    }
    Ok(())
}

fn matchings(
    adj: &[Vec<(usize, usize)>],
    matched: &mut [bool],
    x: &mut [u8],
    push: &mut impl FnMut(Vec<u8>) -> Result<()>,
) -> Result<()> {
    let Some(u) = matched.iter().position(|&m| !m) else {
        return push(x.to_vec());
    };
    matched[u] = true;
    for &(v, e) in &adj[u] {
        if !matched[v] {
            matched[v] = true;
            x[e] = 1;
            matchings(adj, matched, x, push)?;
            x[e] = 0;
            matched[v] = false;
        }
    }
    matched[u] = false;
    Ok(())
}

/// Breadth-first search restricted to edges with `x_e = 1`; returns the path
/// as `(tail vertex, edge)` steps.
fn bfs_path(graph: &Graph, x: &[u8], source: usize, sink: usize) -> Option<Vec<(usize, usize)>> {
    let adj = graph.adjacency();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; graph.n_vertices() + 1];
    let mut seen = vec![false; graph.n_vertices() + 1];
    seen[source] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        if u == sink {
            break;
        }
        for &(v, e) in &adj[u] {
            if x[e] == 1 && !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, e));
                queue.push_back(v);
            }
        }
    }
    if !seen[sink] {
        return None;
    }
    let mut steps = Vec::new();
    let mut at = sink;
    while let Some((u, e)) = parent[at] {
        steps.push((u, e));
        at = u;
    }
    steps.reverse();
    Some(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn cardinality_enumeration() {
        let d = explicit_cardinality_domain(3, 2).unwrap();
        assert_eq!(d.enumerate().unwrap(), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(explicit_cardinality_domain(4, 0).unwrap().enumerate().unwrap(), vec![vec![0; 4]]);
        assert_eq!(explicit_cardinality_domain(5, 2).unwrap().enumerate().unwrap().len(), 10);
        assert!(explicit_cardinality_domain(2, 3).is_err());
    }

    #[test]
    fn triangle_paths() {
        let d = shortest_path_domain(&triangle(), 1, 3).unwrap();
        let paths = d.enumerate().unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths.contains(&vec![0, 1, 0]));
        assert!(paths.contains(&vec![1, 0, 1]));
        let single = shortest_path_domain(&Graph::new(2, &[(1, 2)]).unwrap(), 1, 2).unwrap();
        assert_eq!(single.enumerate().unwrap(), vec![vec![1]]);
    }

    #[test]
    fn disconnected_terminals_give_empty_domain() {
        let g = Graph::new(4, &[(1, 2), (3, 4)]).unwrap();
        let d = shortest_path_domain(&g, 1, 4).unwrap();
        assert!(d.enumerate().unwrap().is_empty());
        assert!(!d.contains(&[1, 1]));
    }

    #[test]
    fn matching_counts() {
        assert_eq!(perfect_matching_domain(&Graph::complete(4)).unwrap().enumerate().unwrap().len(), 3);
        assert_eq!(perfect_matching_domain(&Graph::complete(6)).unwrap().enumerate().unwrap().len(), 15);
        let path = perfect_matching_domain(&Graph::path(4)).unwrap();
        assert_eq!(path.enumerate().unwrap(), vec![vec![1, 0, 1]]);
        assert_eq!(perfect_matching_domain(&triangle()), Err(OwaError::OddVertexCount(3)));
    }

    #[test]
    fn cap_is_enforced() {
        let d = explicit_cardinality_domain(10, 5).unwrap();
        assert_eq!(d.enumerate_with_cap(10), Err(OwaError::TooLarge { cap: 10 }));
        assert_eq!(d.enumerate_with_cap(252).unwrap().len(), 252);
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, &[(1, 1)]).is_err());
        assert!(Graph::new(3, &[(1, 2), (2, 1)]).is_err());
        assert!(Graph::new(3, &[(1, 4)]).is_err());
        let g = Graph::new(3, &[(3, 1)]).unwrap();
        assert_eq!(g.edges(), &[(1, 3)]);
        let smaller = Graph::complete(4).remove_vertex(2).unwrap();
        assert_eq!(smaller.edges(), &[(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn flow_completion_and_path_extraction() {
        let d = shortest_path_domain(&triangle(), 1, 3).unwrap();
        // Superset of a path: the extra edge carries no flow.
        let aux = d.aux_completion(&[1, 1, 1]).unwrap();
        assert_eq!(d.flow_path(&aux).unwrap(), vec![1, 3]);
        let aux = d.aux_completion(&[1, 0, 1]).unwrap();
        assert_eq!(d.flow_path(&aux).unwrap(), vec![1, 2, 3]);
        assert!(d.aux_completion(&[1, 0, 0]).is_none());
    }

    #[test]
    fn explicit_points() {
        let d = explicit_points_domain(vec![vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(d.enumerate().unwrap().len(), 2);
        assert!(d.contains(&[0, 1, 1]));
        assert!(!d.contains(&[1, 1, 0]));
        assert!(explicit_points_domain(vec![vec![1], vec![1]]).is_err());
        assert!(explicit_points_domain(vec![vec![2]]).is_err());
    }
}
