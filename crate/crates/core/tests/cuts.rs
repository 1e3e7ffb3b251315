mod common;

use common::{example, random_instance};
use owa::cuts::{
    apply_cut, apply_fixings, build_with_cuts, canonical_positions, compute_bounds, elimination_tests, BoundMethod,
    BoundTable, CutFamily, SubsetMode,
};
use owa::domain::explicit_points_domain;
use owa::formulation::{build, canonical_lift, domain_membership, Family, Flavor, FormulationVariant, OwaInstance};
use owa::oracle::{brute_force_optimum, rows_tagged, tightness_scan};
use owa::owa::{rat, to_f64, CostMatrix, WeightVector};
use owa::solve::{root_relaxation, solve, solve_built, SolveConfig};
use owa_milp::{SolveOptions, SolveStatus};

fn v(name: &str) -> FormulationVariant {
    FormulationVariant::parse(name).unwrap()
}

#[test]
fn cut_rows_on_example_one() {
    let inst = example("example1");
    let out =
        solve(&inst, v("FzR2"), &[CutFamily::CotaiInfLo, CutFamily::CotaiInfUp], &SolveConfig::default()).unwrap();
    assert_eq!(out.value, Some(rat(23)));
    assert_eq!(out.x.as_deref(), Some(&[1, 0, 1][..]));

    let with = solve(&inst, v("FzyR2"), &[CutFamily::Owa2Eq], &SolveConfig::default()).unwrap();
    assert_eq!(with.value, Some(rat(23)));
    let lp_without = root_relaxation(&build(v("FzyR2"), &inst, None).unwrap()).unwrap();
    let lp_with =
        root_relaxation(&build_with_cuts(v("FzyR2"), &inst, None, &[CutFamily::Owa2Eq], None).unwrap()).unwrap();
    assert!(lp_with >= lp_without - 1e-9, "{lp_with} < {lp_without}");
}

#[test]
fn every_family_keeps_the_optimum() {
    let inst = example("example1");
    let bounds = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
    for variant in [v("Fz"), v("Fzy"), v("Fs"), v("FzyR2")] {
        for family in CutFamily::default_set(variant) {
            let built = apply_cut(&build(variant, &inst, None).unwrap(), family, &bounds).unwrap();
            let lift = canonical_lift(&built, &inst, &[1, 0, 1]).unwrap();
            assert!(domain_membership(&built, &lift).unwrap().is_member(), "{variant} + {family}");
            let out = solve_built(&inst, &built, &[family], &SolveOptions::default()).unwrap();
            assert_eq!(out.value, Some(rat(23)), "{variant} + {family}");
        }
    }
}

#[test]
fn full_subset_is_an_equality_at_lifts() {
    let inst = example("example2");
    let built = build_with_cuts(v("Fz"), &inst, None, &[CutFamily::ValidSubsets(SubsetMode::Full)], None).unwrap();
    let scan = tightness_scan(&inst, &built, rows_tagged("validsubsets_full")).unwrap();
    assert_eq!(scan.fraction(), 1.0);
    assert!(scan.never_tight().is_empty());
}

#[test]
fn subset_modes_row_counts() {
    let inst = example("example1");
    let base = build(v("Fz"), &inst, None).unwrap();
    for (mode, want) in
        [(SubsetMode::Singletons, 3), (SubsetMode::Pairs, 3), (SubsetMode::Complements, 3), (SubsetMode::Full, 1)]
    {
        let fam = CutFamily::ValidSubsets(mode);
        let b = build_with_cuts(v("Fz"), &inst, None, &[fam], None).unwrap();
        assert_eq!(b.model.rows.len() - base.model.rows.len(), want, "{fam}");
    }
}

#[test]
fn elimination_keeps_the_optimum_reachable() {
    let inst = example("example1");
    let bounds = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
    let built = build(v("Fz"), &inst, None).unwrap();
    assert!(elimination_tests(&built, &bounds, None).is_empty());

    let fixings = elimination_tests(&built, &bounds, Some(rat(23)));
    assert!(!fixings.is_empty());
    let pi = canonical_positions(&inst, &[1, 0, 1]).unwrap();
    for f in &fixings {
        let at = pi[f.i] == f.j;
        assert_eq!(f.value == 1, at, "{f:?} contradicts the optimum's positions {pi:?}");
    }
    let fixed = apply_fixings(&built, &fixings);
    let lift = canonical_lift(&fixed, &inst, &[1, 0, 1]).unwrap();
    assert!(domain_membership(&fixed, &lift).unwrap().is_member());
}

#[test]
fn elimination_is_sound_on_random_instances() {
    for seed in 0..50 {
        let inst = random_instance(seed, 6, 3, 3, false);
        let opt = brute_force_optimum(&inst).unwrap().value;
        for method in [BoundMethod::Enumeration, BoundMethod::LpRelaxation] {
            let bounds = compute_bounds(&inst, method).unwrap();
            for variant in [v("Fz"), v("Fs")] {
                let built = build(variant, &inst, None).unwrap();
                let fixings = elimination_tests(&built, &bounds, Some(opt));
                let fixed = apply_fixings(&built, &fixings);
                let plain = solve_built(&inst, &built, &[], &SolveOptions::default()).unwrap();
                let out = solve_built(&inst, &fixed, &[], &SolveOptions::default()).unwrap();
                assert_eq!(out.report.status, SolveStatus::Optimal, "seed {seed} {variant} {method:?}");
                assert_eq!(out.value, Some(opt), "seed {seed} {variant} {method:?} {fixings:?}");
                assert_eq!(plain.value, out.value);
            }
        }
    }
}

fn brackets(lp: &BoundTable, en: &BoundTable) -> Result<(), String> {
    let tol = 1e-6;
    for i in 0..en.p {
        if lp.l[i] > en.l[i] + tol || lp.u[i] < en.u[i] - tol {
            return Err(format!("objective {i}: lp [{}, {}] vs enum [{}, {}]", lp.l[i], lp.u[i], en.l[i], en.u[i]));
        }
        for j in 0..en.p {
            let below = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => a <= b + tol,
            };
            let above = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => a >= b - tol,
            };
            if !below(lp.lower_at[i][j], en.lower_at[i][j])
                || !above(lp.upper_at[i][j], en.upper_at[i][j])
                || !below(lp.owa_at[i][j], en.owa_at[i][j])
                || !below(lp.owa_not_at[i][j], en.owa_not_at[i][j])
            {
                return Err(format!("cell ({i}, {j})"));
            }
        }
    }
    Ok(())
}

#[test]
fn lp_bounds_bracket_enumeration() {
    for seed in 0..20 {
        let inst = random_instance(100 + seed, 6, 3, 3, false);
        let en = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
        let lp = compute_bounds(&inst, BoundMethod::LpRelaxation).unwrap();
        brackets(&lp, &en).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(en.l_pi.windows(2).all(|w| w[0] >= w[1]));
    }
}

/// Two points whose outcomes place objective 1 second with value 5, while
/// objective 2 never exceeds 1 when it comes first.
fn yyrel2_instance() -> OwaInstance {
    OwaInstance::new(
        explicit_points_domain(vec![vec![1, 0], vec![0, 1]]).unwrap(),
        CostMatrix::from_integers(&[vec![10, 0], vec![5, 0], vec![0, 1]]).unwrap(),
        WeightVector::from_integers(&[3, 2, 1]).unwrap(),
    )
    .unwrap()
}

#[test]
fn yyrel2_needs_the_same_objective_on_both_slacks() {
    let inst = yyrel2_instance();
    let bounds = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
    let built = build(v("Fzy"), &inst, None).unwrap();
    let lift = canonical_lift(&built, &inst, &[1, 0]).unwrap();
    let (i, i2, j) = (1, 2, 0);
    let z = |a: usize, b: usize| built.z_expr(a, b).value(&lift);
    let y = |a: usize, b: usize| lift[built.y_col(a, b).unwrap()];
    assert_eq!((z(i, j + 1), z(i2, j)), (1.0, 0.0));

    // Slack coefficients taken from objective i at j+1 and objective i2 at j.
    let u_i = bounds.upper_at[i][j + 1].unwrap_or(0.0);
    let u_i2 = bounds.upper_at[i2][j].unwrap_or(0.0);
    let literal = y(i, j + 1) - y(i2, j) - (1.0 - z(i, j + 1)) * u_i - (1.0 - z(i2, j)) * u_i2;
    assert_eq!((y(i, j + 1), u_i2), (5.0, 1.0));
    assert!(literal > 0.0, "the two-objective version cuts off an optimal lift");

    for family in [CutFamily::Yyrel2, CutFamily::Yyrel3] {
        let cut = apply_cut(&built, family, &bounds).unwrap();
        for x in inst.domain.enumerate().unwrap() {
            let lift = canonical_lift(&cut, &inst, &x).unwrap();
            assert!(domain_membership(&cut, &lift).unwrap().is_member(), "{family} at {x:?}");
        }
    }
}

#[test]
fn y_cuts_hold_at_every_lift_of_random_instances() {
    let families = [
        CutFamily::Owa2Eq,
        CutFamily::Cotayydis1,
        CutFamily::Cotayydis2,
        CutFamily::Yyrel1,
        CutFamily::Yyrel2,
        CutFamily::Yyrel3,
    ];
    for seed in 0..15 {
        let inst = random_instance(300 + seed, 5, 2, 3, false);
        let bounds = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
        for variant in [v("Fzy"), v("FzyR1"), v("FzyR2")] {
            let mut built = build(variant, &inst, None).unwrap();
            for f in families {
                built = apply_cut(&built, f, &bounds).unwrap();
            }
            for x in inst.domain.enumerate().unwrap() {
                let lift = canonical_lift(&built, &inst, &x).unwrap();
                let m = domain_membership(&built, &lift).unwrap();
                assert!(m.is_member(), "seed {seed} {variant} {x:?}: {:?}", m.violated_tags());
            }
        }
    }
}

#[test]
fn y_cuts_rejected_without_y() {
    let inst = example("example1");
    let bounds = compute_bounds(&inst, BoundMethod::Enumeration).unwrap();
    let built = build(FormulationVariant::new(Family::Z, Flavor::Base), &inst, None).unwrap();
    assert!(apply_cut(&built, CutFamily::Yyrel1, &bounds).is_err());
    assert!(CutFamily::default_set(v("Fz")).iter().all(|c| !c.requires_y()));
    assert_eq!(CutFamily::all().len(), 22);
}

#[test]
fn signed_weights_need_cotazy() {
    let inst = random_instance(7, 5, 2, 3, true);
    if !inst.weights.has_negative() {
        return;
    }
    assert!(build_with_cuts(v("Fz"), &inst, None, &[], None).is_err());
    let opt = brute_force_optimum(&inst).unwrap().value;
    let out = solve(&inst, v("Fz"), &[CutFamily::Cotazy], &SolveConfig::default()).unwrap();
    assert_eq!(out.value, Some(opt));
    assert!((out.report.objective.unwrap() - to_f64(&opt)).abs() < 1e-6);
}
