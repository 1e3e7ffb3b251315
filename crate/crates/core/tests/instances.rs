mod common;

use std::collections::VecDeque;

use owa::cuts::CutFamily;
use owa::formulation::FormulationVariant;
use owa::instances::{
    builtin, builtin_names, corpus, generate_grid, read_instance, read_instance_file, write_instance,
    write_instance_file, GridSpec, ProblemKind, COST_RANGE,
};
use owa::oracle::brute_force_optimum;
use owa::owa::{rat, Rational};
use owa::solve::{build_model, SolveConfig};
use owa::{Graph, OwaError};
use owa_milp::write_mps;

fn specs() -> Vec<GridSpec> {
    let mut out = Vec::new();
    for (k, side) in [2usize, 3].into_iter().cycle().take(20).enumerate() {
        let kind = if k % 2 == 0 { ProblemKind::ShortestPath } else { ProblemKind::PerfectMatching };
        let alpha = Rational::new([1, 2, 3][k % 3], 5);
        out.push(GridSpec::new(kind, side, 2 + k % 3, alpha, 40 + k as u64).unwrap());
    }
    out
}

fn connected(g: &Graph, from: usize, to: usize) -> bool {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n_vertices() + 1];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        for &(w, _) in &adj[u] {
            if !std::mem::replace(&mut seen[w], true) {
                queue.push_back(w);
            }
        }
    }
    seen[to]
}

#[test]
fn write_read_is_identity() {
    let mut files: Vec<_> = specs().iter().map(|s| generate_grid(s).unwrap()).collect();
    files.extend(builtin_names().iter().map(|n| builtin(n).unwrap()));
    for f in files {
        let text = write_instance(&f);
        let back = read_instance(&text).unwrap();
        assert_eq!(back, f, "{}", f.name);
        assert_eq!(write_instance(&back), text);
    }
}

#[test]
fn reload_gives_identical_mps() {
    let dir = tempfile::tempdir().unwrap();
    for spec in specs().iter().take(6) {
        let f = generate_grid(spec).unwrap();
        let path = dir.path().join(format!("{}.owa", f.name));
        write_instance_file(&f, &path).unwrap();
        let back = read_instance_file(&path).unwrap();
        let variant = FormulationVariant::parse("Fzy").unwrap();
        let cuts = [CutFamily::ValidOrdering, CutFamily::Owa2Eq];
        let a = build_model(&f.instance, variant, &cuts, &SolveConfig::default()).unwrap();
        let b = build_model(&back.instance, variant, &cuts, &SolveConfig::default()).unwrap();
        assert_eq!(write_mps(&a.model), write_mps(&b.model), "{}", f.name);
    }
}

#[test]
fn fixture_file_matches_the_builtin() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/example1.owa");
    let f = read_instance_file(path).unwrap();
    assert_eq!(f.name, "example1-file");
    assert_eq!(f.instance, builtin("example1").unwrap().instance);
    assert_eq!(brute_force_optimum(&f.instance).unwrap().value, rat(23));
}

#[test]
fn truncated_file_names_the_missing_section() {
    let text = write_instance(&builtin("example1").unwrap());
    let cut = &text[..text.find("[domain]").unwrap()];
    match read_instance(cut) {
        Err(OwaError::Parse { message, .. }) => assert!(message.contains("missing section [domain]"), "{message}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bad_number_reports_its_line() {
    let text = write_instance(&builtin("example1").unwrap()).replace("row 1 1 3", "row 1 x 3");
    let line = text.lines().position(|l| l == "row 1 x 3").unwrap() + 1;
    match read_instance(&text) {
        Err(OwaError::Parse { line: l, .. }) => assert_eq!(l, line),
        other => panic!("{other:?}"),
    }
    let missing = read_instance_file("/nonexistent/instance.owa").unwrap_err();
    assert!(missing.to_string().contains("/nonexistent/instance.owa"));
}

#[test]
fn generation_is_deterministic_and_in_range() {
    for spec in corpus() {
        let a = generate_grid(&spec).unwrap();
        assert_eq!(a, generate_grid(&spec).unwrap(), "{}", a.name);
        let c = &a.instance.costs;
        let (lo, hi) = (rat(COST_RANGE.0 as i128), rat(COST_RANGE.1 as i128));
        assert!(c.entries().iter().flatten().all(|v| *v >= lo && *v <= hi));
        let g = a.instance.domain.graph().unwrap();
        match spec.kind {
            ProblemKind::ShortestPath => assert!(connected(g, 1, g.n_vertices())),
            ProblemKind::PerfectMatching => assert_eq!(g.n_vertices() % 2, 0),
        }
        assert_eq!(a.instance.p(), spec.p);
    }
    let s = GridSpec::new(ProblemKind::ShortestPath, 3, 2, Rational::new(2, 5), 1).unwrap();
    let t = GridSpec { seed: 2, ..s.clone() };
    assert_ne!(generate_grid(&s).unwrap().instance.costs, generate_grid(&t).unwrap().instance.costs);
}

#[test]
fn corpus_shape() {
    let c = corpus();
    assert_eq!(c.iter().filter(|s| s.kind == ProblemKind::ShortestPath).count(), 50);
    assert_eq!(c.iter().filter(|s| s.kind == ProblemKind::PerfectMatching).count(), 30);
    assert!(c.iter().all(|s| s.side == 3));
}
