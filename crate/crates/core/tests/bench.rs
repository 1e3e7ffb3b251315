use owa::bench::{aggregate, run_bench, to_csv, BenchConfig, BenchRun, Worst, CSV_HEADER};
use owa::formulation::FormulationVariant;
use owa::instances::ProblemKind;
use owa::owa::Rational;
use owa_milp::SolveStatus;

fn run(status: SolveStatus, seconds: f64, nodes: usize, gap_lr: Option<f64>, gap: Option<f64>) -> BenchRun {
    BenchRun { status, seconds, nodes, gap_lr, gap, error: None }
}

#[test]
fn csv_matches_golden_file() {
    let rows = vec![
        aggregate(
            ProblemKind::ShortestPath,
            9,
            3,
            Rational::new(2, 5),
            "Fz",
            &[run(SolveStatus::Optimal, 0.5, 2, Some(10.0), None), run(SolveStatus::Optimal, 2.0, 4, Some(15.0), None)],
            600.0,
        ),
        aggregate(
            ProblemKind::PerfectMatching,
            8,
            2,
            Rational::new(3, 5),
            "FzyR2",
            &[run(SolveStatus::Optimal, 2.0, 5, None, None), run(SolveStatus::TimeLimit, 10.0, 10, None, Some(40.0))],
            10.0,
        ),
        aggregate(
            ProblemKind::ShortestPath,
            16,
            4,
            Rational::new(4, 5),
            "Fgs'",
            &[BenchRun {
                status: SolveStatus::TimeLimit,
                seconds: 10.0,
                nodes: 0,
                gap_lr: None,
                gap: None,
                error: Some("no incumbent".into()),
            }],
            10.0,
        ),
    ];
    assert_eq!(rows[2].worst, Worst::Unknown);
    let golden = include_str!("data/bench_golden.csv");
    assert_eq!(to_csv(&rows), golden);
    assert_eq!(golden.lines().next(), Some(CSV_HEADER));
}

fn small(variants: Vec<FormulationVariant>) -> BenchConfig {
    BenchConfig {
        problems: vec![ProblemKind::ShortestPath, ProblemKind::PerfectMatching],
        sides: vec![2],
        ps: vec![2, 3],
        alphas: vec![Rational::new(2, 5), Rational::new(4, 5)],
        seeds: 2,
        base_seed: 11,
        variants,
        time_limit: 30.0,
        threads: Some(2),
        ..Default::default()
    }
}

#[test]
fn rows_come_back_in_matrix_order() {
    let variants = vec![FormulationVariant::parse("Fz").unwrap(), FormulationVariant::parse("Fs").unwrap()];
    let rows = run_bench(&small(variants), &|e| panic!("{e}")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2 * 2);
    let keys: Vec<_> = rows.iter().map(|r| (r.problem.as_str(), r.p, r.alpha, r.variant.clone())).collect();
    let mut want = Vec::new();
    for problem in ["sp", "pm"] {
        for p in [2, 3] {
            for alpha in [Rational::new(2, 5), Rational::new(4, 5)] {
                for v in ["Fz", "Fs"] {
                    want.push((problem, p, alpha, v.to_string()));
                }
            }
        }
    }
    assert_eq!(keys, want);
    assert!(rows.iter().all(|r| r.solved == 2 && r.vertices == 4));
}

#[test]
fn serial_and_parallel_agree_on_everything_but_time() {
    let strip = |rows: Vec<owa::bench::BenchRow>| -> Vec<_> {
        rows.into_iter()
            .map(|r| (r.variant, r.solved, r.mean_nodes, r.mean_gap_lr.map(|g| (g * 1e6).round())))
            .collect()
    };
    let variants = vec![FormulationVariant::parse("FzR3").unwrap()];
    let mut serial = small(variants.clone());
    serial.threads = Some(1);
    let a = strip(run_bench(&serial, &|e| panic!("{e}")).unwrap());
    let b = strip(run_bench(&small(variants), &|e| panic!("{e}")).unwrap());
    assert_eq!(a, b);
}

#[test]
fn every_catalog_variant_gets_a_row() {
    let cfg = BenchConfig {
        sides: vec![2],
        ps: vec![2],
        alphas: vec![Rational::new(3, 5)],
        seeds: 1,
        variants: FormulationVariant::catalog(),
        time_limit: 30.0,
        ..Default::default()
    };
    let rows = run_bench(&cfg, &|e| panic!("{e}")).unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.solved == 1));
}

#[test]
fn zero_seeds_is_an_error() {
    let cfg = BenchConfig { seeds: 0, ..Default::default() };
    assert!(run_bench(&cfg, &|_| {}).is_err());
}
