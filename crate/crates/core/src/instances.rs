//! Grid benchmark generator and the plain-text instance format.
//!
//! ```text
//! owa-instance 1
//! name example1
//!
//! [graph]
//! vertices 0
//!
//! [costs]
//! objectives 3
//! variables 3
//! row 1 4 1
//! row 1 1 3
//! row 5 1 2
//!
//! [weights]
//! signed false
//! omega 1 2 4
//!
//! [domain]
//! kind cardinality
//! k 2
//!
//! [provenance]
//! source hand-written
//! ```
//!
//! `[graph]` lists `vertices N`, optional `coord v x y` lines and `edge u v`
//! lines (vertices are 1-based, edge order fixes the variable order).
//! `[domain]` is one of `kind shortest-path` with `source`/`sink`,
//! `kind perfect-matching`, `kind cardinality` with `k`, or `kind points`
//! with one `point b1 b2 ...` line per feasible vector. Numbers in `[costs]`
//! and `[weights]` are integers, decimals or fractions `a/b`. Blank lines
//! and lines starting with `#` are ignored.

use std::fmt::{self, Write as _};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    explicit_cardinality_domain, explicit_points_domain, perfect_matching_domain, shortest_path_domain, DomainKind,
    DomainSpec, Graph,
};
use crate::error::{OwaError, Result};
use crate::formulation::OwaInstance;
use crate::owa::{
    hurwicz_weights, om_as_owa, parse_rational, rat, to_f64, vaom_as_owa, CostMatrix, Rational, WeightVector,
};

pub const FORMAT_VERSION: u32 = 1;
pub const COST_RANGE: (i64, i64) = (1, 100);
pub const RNG_ID: &str = "chacha8-seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    ShortestPath,
    PerfectMatching,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::ShortestPath => "sp",
            ProblemKind::PerfectMatching => "pm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sp" | "shortest-path" => Ok(ProblemKind::ShortestPath),
            "pm" | "perfect-matching" => Ok(ProblemKind::PerfectMatching),
            _ => Err(OwaError::InvalidArgument(format!("unknown problem {s:?}, expected sp or pm"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub kind: ProblemKind,
    /// Square root of the vertex count.
    pub side: usize,
    pub p: usize,
    pub alpha: Rational,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(kind: ProblemKind, side: usize, p: usize, alpha: Rational, seed: u64) -> Result<Self> {
        let spec = Self { kind, side, p, alpha, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.side < 2 {
            return Err(OwaError::InvalidArgument(format!("grid side must be at least 2, got {}", self.side)));
        }
        if self.p < 2 {
            return Err(OwaError::InvalidArgument(format!("need at least 2 objectives, got {}", self.p)));
        }
        if self.alpha < rat(0) || self.alpha > rat(1) {
            return Err(OwaError::InvalidArgument(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        format!("{}-side{}-p{}-a{}-seed{}", self.kind, self.side, self.p, to_f64(&self.alpha), self.seed)
    }
}

/// The small benchmark corpus: 50 shortest-path and 30 perfect-matching
/// instances on the 3x3 grid, cycling `p` over {2, 3} and alpha over
/// {0.4, 0.6, 0.8}.
pub fn corpus() -> Vec<GridSpec> {
    let alphas = [Rational::new(2, 5), Rational::new(3, 5), Rational::new(4, 5)];
    let make = |kind, k: usize, seed: u64| GridSpec { kind, side: 3, p: [2, 3][k % 2], alpha: alphas[k % 3], seed };
    let sp = (0..50).map(|k| make(ProblemKind::ShortestPath, k, 1000 + k as u64));
    let pm = (0..30).map(|k| make(ProblemKind::PerfectMatching, k, 5000 + k as u64));
    sp.chain(pm).collect()
}

/// Undirected grid on `side * side` vertices, vertex `(x, y)` numbered
/// `(y - 1) * side + x`. Edges come from forward, up, down and down-diagonal
/// arcs, the diagonal limited to `x < side`, `y > 1`; edges are sorted.
pub fn grid_graph(side: usize) -> Result<Graph> {
    if side < 2 {
        return Err(OwaError::InvalidArgument(format!("grid side must be at least 2, got {side}")));
    }
    let id = |x: usize, y: usize| (y - 1) * side + x;
    let mut edges = Vec::new();
    for y in 1..=side {
        for x in 1..=side {
            if x < side {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y < side {
                edges.push((id(x, y), id(x, y + 1)));
            }
            if y > 1 {
                edges.push((id(x, y), id(x, y - 1)));
            }
            if x < side && y > 1 {
                edges.push((id(x, y), id(x + 1, y - 1)));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    edges.dedup();
    let coords = (1..=side).flat_map(|y| (1..=side).map(move |x| (x, y))).collect();
    Graph::new(side * side, &edges)?.with_coords(coords)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub name: String,
    pub instance: OwaInstance,
    pub provenance: Vec<(String, String)>,
}

pub fn generate_grid(spec: &GridSpec) -> Result<InstanceFile> {
    spec.validate()?;
    let mut graph = grid_graph(spec.side)?;
    let mut provenance = vec![
        ("generator".to_string(), "grid".to_string()),
        ("problem".into(), spec.kind.to_string()),
        ("side".into(), spec.side.to_string()),
        ("p".into(), spec.p.to_string()),
        ("alpha".into(), spec.alpha.to_string()),
        ("seed".into(), spec.seed.to_string()),
        ("rng".into(), RNG_ID.into()),
        ("costs".into(), format!("uniform integers {}..={}, objective-major", COST_RANGE.0, COST_RANGE.1)),
        ("arcs".into(), "undirected support of forward, up, down and diagonal arcs; diagonal needs x<side, y>1".into()),
    ];
    let domain = match spec.kind {
        ProblemKind::ShortestPath => shortest_path_domain(&graph, 1, graph.n_vertices())?,
        ProblemKind::PerfectMatching => {
            if graph.n_vertices() % 2 == 1 {
                provenance.push(("removed-vertex".into(), graph.n_vertices().to_string()));
                graph = graph.remove_vertex(graph.n_vertices())?;
            }
            perfect_matching_domain(&graph)?
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = graph.edges().len();
    let costs: Vec<Vec<Rational>> = (0..spec.p)
        .map(|_| (0..m).map(|_| rat(rng.gen_range(COST_RANGE.0..=COST_RANGE.1) as i128)).collect())
        .collect();
    let instance = OwaInstance::new(domain, CostMatrix::new(costs)?, hurwicz_weights(spec.alpha, spec.p)?)?;
    Ok(InstanceFile { name: spec.name(), instance, provenance })
}

pub fn builtin_names() -> &'static [&'static str] {
    &["example1", "example2", "example3"]
}

/// The three small worked examples: a cardinality domain with general
/// costs, the same domain as an ordered median, and a vector assignment
/// ordered median over three explicit assignments.
pub fn builtin(name: &str) -> Option<InstanceFile> {
    let hand = vec![("source".to_string(), "hand-written".to_string())];
    let inst = match name {
        "example1" => OwaInstance::new(
            explicit_cardinality_domain(3, 2).ok()?,
            CostMatrix::from_integers(&[vec![1, 4, 1], vec![1, 1, 3], vec![5, 1, 2]]).ok()?,
            WeightVector::from_integers(&[1, 2, 4]).ok()?,
        ),
        "example2" => OwaInstance::new(
            explicit_cardinality_domain(3, 2).ok()?,
            om_as_owa(&[rat(5), rat(1), rat(2)]).ok()?,
            WeightVector::from_integers(&[1, 2, 4]).ok()?,
        ),
        "example3" => {
            let d = [[0, 2, 6], [2, 0, 4], [8, 4, 0]].map(|r| r.map(rat).to_vec()).to_vec();
            let half = Rational::new(1, 2);
            let gamma = vec![vec![half, half], vec![half, half], vec![rat(1), rat(0)]];
            let costs = vaom_as_owa(&d, &gamma, &[rat(1); 3]).ok()?.costs;
            let points = vec![
                vec![1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0],
                vec![1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0],
                vec![0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0],
            ];
            OwaInstance::new(explicit_points_domain(points).ok()?, costs, WeightVector::from_integers(&[0, 1, 2]).ok()?)
        }
        _ => return None,
    };
    Some(InstanceFile { name: name.to_string(), instance: inst.ok()?, provenance: hand })
}

/// A built-in name or a path to an instance file.
pub fn load(spec: &str) -> Result<InstanceFile> {
    match builtin(spec) {
        Some(f) => Ok(f),
        None => read_instance_file(spec),
    }
}

pub fn read_instance_file(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| OwaError::Io(format!("{}: {e}", path.display())))?;
    read_instance(&text)
}

pub fn write_instance_file(file: &InstanceFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_instance(file))?;
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_instance(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let mut s = String::new();
    let _ = writeln!(s, "owa-instance {FORMAT_VERSION}");
    let _ = writeln!(s, "name {}", file.name);

    let _ = writeln!(s, "\n[graph]");
    match inst.domain.graph() {
        Some(g) => {
            let _ = writeln!(s, "vertices {}", g.n_vertices());
            if let Some(coords) = g.coords() {
                for (v, (x, y)) in coords.iter().enumerate() {
                    let _ = writeln!(s, "coord {} {x} {y}", v + 1);
                }
            }
            for (u, v) in g.edges() {
                let _ = writeln!(s, "edge {u} {v}");
            }
        }
        None => {
            let _ = writeln!(s, "vertices 0");
        }
    }

    let _ = writeln!(s, "\n[costs]");
    let _ = writeln!(s, "objectives {}", inst.p());
    let _ = writeln!(s, "variables {}", inst.n());
    for row in inst.costs.entries() {
        let _ = writeln!(s, "row {}", join(row));
    }

    let _ = writeln!(s, "\n[weights]");
    let _ = writeln!(s, "signed {}", inst.weights.signed_allowed);
    let _ = writeln!(s, "omega {}", join(&inst.weights.omega));

    let _ = writeln!(s, "\n[domain]");
    match &inst.domain.kind {
        DomainKind::ShortestPath { source, sink, .. } => {
            let _ = writeln!(s, "kind shortest-path\nsource {source}\nsink {sink}");
        }
        DomainKind::PerfectMatching { .. } => {
            let _ = writeln!(s, "kind perfect-matching");
        }
        DomainKind::ExplicitCardinality { k } => {
            let _ = writeln!(s, "kind cardinality\nk {k}");
        }
        DomainKind::ExplicitPoints { points } => {
            let _ = writeln!(s, "kind points");
            for pt in points {
                let _ = writeln!(s, "point {}", join(pt));
            }
        }
    }

    let _ = writeln!(s, "\n[provenance]");
    for (k, v) in &file.provenance {
        let _ = writeln!(s, "{k} {v}");
    }
    s
}

const SECTIONS: [&str; 5] = ["graph", "costs", "weights", "domain", "provenance"];

struct Line<'a> {
    no: usize,
    key: &'a str,
    rest: &'a str,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> OwaError {
        OwaError::Parse { line: self.no, message: message.into() }
    }

    fn fields(&self) -> Vec<&str> {
        self.rest.split_whitespace().collect()
    }

    fn usize(&self) -> Result<usize> {
        let f = self.fields();
        match f.as_slice() {
            [v] => v.parse().map_err(|_| self.err(format!("{}: expected a count, got {v:?}", self.key))),
            _ => Err(self.err(format!("{}: expected one value", self.key))),
        }
    }

    fn usizes(&self, n: usize) -> Result<Vec<usize>> {
        let f = self.fields();
        if f.len() != n {
            return Err(self.err(format!("{}: expected {n} values, got {}", self.key, f.len())));
        }
        f.iter().map(|v| v.parse().map_err(|_| self.err(format!("{}: bad integer {v:?}", self.key)))).collect()
    }

    fn rationals(&self) -> Result<Vec<Rational>> {
        self.fields().iter().map(|v| parse_rational(v).map_err(|e| self.err(e.to_string()))).collect()
    }
}

pub fn read_instance(text: &str) -> Result<InstanceFile> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count() + 1;

    let (no, header) = lines.next().ok_or(OwaError::Parse { line: 1, message: "empty file".into() })?;
    match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["owa-instance", v] if *v == FORMAT_VERSION.to_string() => {}
        ["owa-instance", v] => {
            return Err(OwaError::Parse { line: no, message: format!("unsupported format version {v}") });
        }
        _ => return Err(OwaError::Parse { line: no, message: "expected header `owa-instance 1`".into() }),
    }

    let mut name = None;
    let mut sections: Vec<(&str, usize, Vec<Line>)> = Vec::new();
    for (no, l) in lines {
        if let Some(sec) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if !SECTIONS.contains(&sec) {
                return Err(OwaError::Parse { line: no, message: format!("unknown section [{sec}]") });
            }
            if sections.iter().any(|(s, _, _)| *s == sec) {
                return Err(OwaError::Parse { line: no, message: format!("duplicate section [{sec}]") });
            }
            sections.push((sec, no, Vec::new()));
            continue;
        }
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let line = Line { no, key, rest: rest.trim() };
        match sections.last_mut() {
            Some((_, _, body)) => body.push(line),
            None if key == "name" => name = Some(line.rest.to_string()),
            None => return Err(line.err(format!("unexpected {key:?} before the first section"))),
        }
    }
    let section = |name: &str| -> Result<(usize, &[Line])> {
        sections
            .iter()
            .find(|(s, _, _)| *s == name)
            .map(|(_, no, body)| (*no, body.as_slice()))
            .ok_or(OwaError::Parse { line: last_line, message: format!("missing section [{name}]") })
    };
    for s in SECTIONS {
        section(s)?;
    }

    let graph = parse_graph(section("graph")?)?;
    let costs = parse_costs(section("costs")?)?;
    let weights = parse_weights(section("weights")?)?;
    let domain = parse_domain(section("domain")?, graph, costs.n())?;
    let (_, prov) = section("provenance")?;
    let provenance = prov.iter().map(|l| (l.key.to_string(), l.rest.to_string())).collect();

    let instance = OwaInstance::new(domain, costs, weights).map_err(|e| {
        let (no, _) = section("costs").expect("checked above");
        OwaError::Parse { line: no, message: e.to_string() }
    })?;
    Ok(InstanceFile { name: name.unwrap_or_default(), instance, provenance })
}

fn parse_graph((no, body): (usize, &[Line])) -> Result<Option<Graph>> {
    let mut vertices = None;
    let mut edges = Vec::new();
    let mut coords = Vec::new();
    for l in body {
        match l.key {
            "vertices" => vertices = Some(l.usize()?),
            "edge" => {
                let v = l.usizes(2)?;
                edges.push((v[0], v[1]));
            }
            "coord" => {
                let v = l.usizes(3)?;
                if v[0] != coords.len() + 1 {
                    return Err(l.err(format!("coord lines must run 1, 2, ...; got {}", v[0])));
                }
                coords.push((v[1], v[2]));
            }
            other => return Err(l.err(format!("unknown key {other:?} in [graph]"))),
        }
    }
    let n = vertices.ok_or(OwaError::Parse { line: no, message: "[graph] needs `vertices`".into() })?;
    if n == 0 {
        return Ok(None);
    }
    let wrap = |e: OwaError| OwaError::Parse { line: no, message: e.to_string() };
    let mut g = Graph::new(n, &edges).map_err(wrap)?;
    if !coords.is_empty() {
        g = g.with_coords(coords).map_err(wrap)?;
    }
    Ok(Some(g))
}

fn parse_costs((no, body): (usize, &[Line])) -> Result<CostMatrix> {
    let (mut p, mut n, mut rows) = (None, None, Vec::new());
    for l in body {
        match l.key {
            "objectives" => p = Some(l.usize()?),
            "variables" => n = Some(l.usize()?),
            "row" => {
                let r = l.rationals()?;
                if let Some(n) = n {
                    if r.len() != n {
                        return Err(l.err(format!("row has {} entries, expected {n}", r.len())));
                    }
                }
                rows.push(r);
            }
            other => return Err(l.err(format!("unknown key {other:?} in [costs]"))),
        }
    }
    let err = |m: String| OwaError::Parse { line: no, message: m };
    let p = p.ok_or_else(|| err("[costs] needs `objectives`".into()))?;
    n.ok_or_else(|| err("[costs] needs `variables`".into()))?;
    if rows.len() != p {
        return Err(err(format!("expected {p} cost rows, found {}", rows.len())));
    }
    CostMatrix::new(rows).map_err(|e| err(e.to_string()))
}

fn parse_weights((no, body): (usize, &[Line])) -> Result<WeightVector> {
    let (mut signed, mut omega) = (false, None);
    for l in body {
        match l.key {
            "signed" => {
                signed = match l.rest {
                    "true" => true,
                    "false" => false,
                    v => return Err(l.err(format!("signed: expected true or false, got {v:?}"))),
                }
            }
            "omega" => omega = Some(l.rationals()?),
            other => return Err(l.err(format!("unknown key {other:?} in [weights]"))),
        }
    }
    let omega = omega.ok_or(OwaError::Parse { line: no, message: "[weights] needs `omega`".into() })?;
    if signed {
        Ok(WeightVector::signed(omega))
    } else {
        WeightVector::new(omega).map_err(|e| OwaError::Parse { line: no, message: e.to_string() })
    }
}

fn parse_domain((no, body): (usize, &[Line]), graph: Option<Graph>, n: usize) -> Result<DomainSpec> {
    let mut kind = None;
    let (mut source, mut sink, mut k) = (None, None, None);
    let mut points = Vec::new();
    for l in body {
        match l.key {
            "kind" => kind = Some(l.rest),
            "source" => source = Some(l.usize()?),
            "sink" => sink = Some(l.usize()?),
            "k" => k = Some(l.usize()?),
            "point" => {
                let bits: Vec<u8> = l
                    .fields()
                    .iter()
                    .map(|b| match *b {
                        "0" => Ok(0),
                        "1" => Ok(1),
                        _ => Err(l.err(format!("point entries must be 0 or 1, got {b:?}"))),
                    })
                    .collect::<Result<_>>()?;
                points.push(bits);
            }
            other => return Err(l.err(format!("unknown key {other:?} in [domain]"))),
        }
    }
    let err = |m: String| OwaError::Parse { line: no, message: m };
    let need_graph = || graph.clone().ok_or_else(|| err("this domain needs a [graph] with vertices".into()));
    let dom = match kind {
        Some("shortest-path") => {
            let g = need_graph()?;
            let s = source.ok_or_else(|| err("shortest-path needs `source`".into()))?;
            let t = sink.ok_or_else(|| err("shortest-path needs `sink`".into()))?;
            shortest_path_domain(&g, s, t)
        }
        Some("perfect-matching") => perfect_matching_domain(&need_graph()?),
        Some("cardinality") => explicit_cardinality_domain(n, k.ok_or_else(|| err("cardinality needs `k`".into()))?),
        Some("points") => explicit_points_domain(points),
        Some(other) => return Err(err(format!("unknown domain kind {other:?}"))),
        None => return Err(err("[domain] needs `kind`".into())),
    };
    let dom = dom.map_err(|e| err(e.to_string()))?;
    if dom.n_design != n {
        return Err(err(format!("domain has {} variables, costs have {n}", dom.n_design)));
    }
    Ok(dom)
}
