mod common;

use common::{example, random_instance};
use owa::cuts::{apply_cut, canonical_positions, compute_bounds, BoundMethod, CutFamily};
use owa::domain::explicit_cardinality_domain;
use owa::formulation::{build, FormulationVariant, OwaInstance};
use owa::oracle::{
    brute_force_optimum, rows_tagged, table_consistent, tightness_scan, verify_formulation, verify_model,
};
use owa::owa::{rat, CostMatrix, WeightVector};
use owa::solve::SolveConfig;
use owa_milp::SolveOptions;

fn v(name: &str) -> FormulationVariant {
    FormulationVariant::parse(name).unwrap()
}

#[test]
fn example_one_with_the_weakest_reformulation() {
    let verdict = verify_formulation(&example("example1"), v("FsR3"), &[], &SolveConfig::default()).unwrap();
    assert!(verdict.pass, "{:?}", verdict.reason);
    assert_eq!(verdict.oracle_value, rat(23));
}

#[test]
fn every_variant_passes_on_the_small_examples() {
    for name in ["example1", "example2", "example3"] {
        let inst = example(name);
        for variant in FormulationVariant::catalog() {
            let verdict = verify_formulation(&inst, variant, &[], &SolveConfig::default()).unwrap();
            assert!(verdict.pass, "{name} {variant}: {:?}", verdict.reason);
            let cuts = CutFamily::default_set(variant);
            let verdict = verify_formulation(&inst, variant, &cuts, &SolveConfig::default()).unwrap();
            assert!(verdict.pass, "{name} {variant} with cuts: {:?}", verdict.reason);
        }
    }
}

#[test]
fn dropping_the_assignment_rows_is_caught() {
    let inst = example("example1");
    let mut built = build(v("Fz"), &inst, None).unwrap();
    let before = built.model.rows.len();
    built.model.rows.retain(|r| r.tag != "owab");
    assert_eq!(before - built.model.rows.len(), 3);
    let verdict = verify_model(&inst, &built, &SolveOptions::default()).unwrap();
    assert!(!verdict.pass);
    assert!(verdict.solver_objective.unwrap() < 23.0 - 1e-6);
}

#[test]
fn random_instances_agree_with_enumeration() {
    for seed in 0..10 {
        let inst = random_instance(900 + seed, 6, 3, 4, false);
        for name in ["Fz", "FzyR2", "Fs", "Fgs'"] {
            let verdict = verify_formulation(&inst, v(name), &[], &SolveConfig::default()).unwrap();
            assert!(verdict.pass, "seed {seed} {name}: {:?}", verdict.reason);
        }
    }
}

/// Two items, choose one; the first choice ties both objectives.
fn tied() -> OwaInstance {
    OwaInstance::new(
        explicit_cardinality_domain(2, 1).unwrap(),
        CostMatrix::from_integers(&[vec![1, 1], vec![1, 0]]).unwrap(),
        WeightVector::from_integers(&[1, 1]).unwrap(),
    )
    .unwrap()
}

#[test]
fn ordering_rows_are_tight_only_at_ties() {
    let inst = tied();
    let built = build(v("Fz"), &inst, None).unwrap();
    let scan = tightness_scan(&inst, &built, rows_tagged("owae")).unwrap();
    assert_eq!((scan.lifts, scan.tight), (2, 1));
}

#[test]
fn linking_row_of_the_last_objective_is_always_tight() {
    let inst = example("example1");
    let built = build(v("Fz0"), &inst, None).unwrap();
    let p = inst.p();
    let select = |b: &owa::BuiltModel, x: &[u8]| -> Vec<usize> {
        let pi = canonical_positions(&inst, x).unwrap();
        let last = (0..p).find(|&i| pi[i] == p - 1).unwrap();
        let zc = b.z.as_ref().unwrap()[last][p - 1].unwrap();
        let rows = b
            .rows_with_tag("owad0")
            .filter(|&r| b.model.rows[r].coeffs.iter().any(|&(c, a)| c == zc && a > 0.0))
            .collect::<Vec<_>>();
        assert_eq!(rows.len(), 1);
        rows
    };
    let scan = tightness_scan(&inst, &built, select).unwrap();
    assert_eq!(scan.fraction(), 1.0);
}

#[test]
fn slack_bounds_are_never_tight() {
    let inst = example("example1");
    let mut bounds = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
    bounds.l.iter_mut().for_each(|l| *l -= 100.0);
    let built = apply_cut(&build(v("Fz"), &inst, None).unwrap(), CutFamily::CotaiInfLo, &bounds).unwrap();
    let scan = tightness_scan(&inst, &built, rows_tagged("cotai_inf_lo")).unwrap();
    assert_eq!(scan.fraction(), 0.0);
    assert_eq!(scan.never_tight().len(), 3);

    let exact = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
    let built = apply_cut(&build(v("Fz"), &inst, None).unwrap(), CutFamily::CotaiInfLo, &exact).unwrap();
    let scan = tightness_scan(&inst, &built, rows_tagged("cotai_inf_lo")).unwrap();
    assert!(scan.never_tight().is_empty(), "each l_i is attained somewhere");
}

#[test]
fn tables_are_consistent() {
    for name in ["example1", "example2", "example3"] {
        let inst = example(name);
        let o = brute_force_optimum(&inst).unwrap();
        assert!(table_consistent(&inst, &o).unwrap());
        assert!(o.optimal_rows().all(|r| r.value == o.value));
        assert!(o.rows.iter().all(|r| r.value >= o.value));
    }
    let inst = example("example1");
    let mut o = brute_force_optimum(&inst).unwrap();
    o.rows[0].value += rat(1);
    assert!(!table_consistent(&inst, &o).unwrap());
}
