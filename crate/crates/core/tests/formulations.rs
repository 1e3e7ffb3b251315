mod common;

use std::collections::BTreeSet;

use common::{example, random_instance};
use owa::cuts::{build_with_cuts, CutFamily};
use owa::formulation::{
    build, canonical_lift, domain_membership, nesting_witnesses, Family, FormulationVariant, OwaInstance, KNOWN_TAGS,
};
use owa::instances::{corpus, generate_grid};
use owa::oracle::brute_force_optimum;
use owa::owa::{rat, Rational};
use owa::solve::{solve, solve_built, SolveConfig};
use owa::OwaError;
use owa_milp::{SolveOptions, SolveStatus};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(name: &str) -> FormulationVariant {
    FormulationVariant::parse(name).unwrap()
}

fn optimum(inst: &OwaInstance, variant: FormulationVariant) -> Rational {
    let out = solve(inst, variant, &[], &SolveConfig::default()).unwrap();
    assert_eq!(out.report.status, SolveStatus::Optimal, "{variant}");
    out.value.unwrap()
}

#[test]
fn worked_examples_across_the_catalog() {
    for (name, want) in [("example1", 23), ("example2", 4), ("example3", 2)] {
        let inst = example(name);
        for variant in FormulationVariant::catalog() {
            assert_eq!(optimum(&inst, variant), rat(want), "{name} {variant}");
        }
    }
}

#[test]
fn reduced_variants_keep_the_optimum() {
    let reducible: Vec<_> =
        FormulationVariant::catalog().into_iter().map(|v| v.reduced()).filter(|v| v.validate().is_ok()).collect();
    // Z and ZY base0/base/R1 and the four S flavors.
    assert_eq!(reducible.len(), 10);
    for seed in 0..6 {
        let inst = random_instance(seed, 6, 3, 3, false);
        let want = brute_force_optimum(&inst).unwrap().value;
        for &variant in &reducible {
            assert_eq!(optimum(&inst, variant), want, "seed {seed} {variant}");
        }
    }
    assert!(v("FzR2").reduced().validate().is_err());
    assert!(v("Fgs").reduced().validate().is_err());
}

/// The rows each family of the summary tables contributes, per variant.
fn table_marks(variant: FormulationVariant) -> BTreeSet<&'static str> {
    let rows: &[&str] = match variant.name().as_str() {
        "Fz0" => &["owab", "owac", "owad0", "owae"],
        "Fz" => &["owab", "owac", "owad", "owae"],
        "FzR1" => &["owab", "owac", "owad"],
        "FzR2" => &["owab", "owad"],
        "FzR3" => &["owab_le", "owad_prime"],
        "Fzy0" => &["owa2b", "owa2c", "owa2d0", "owa2e"],
        "Fzy" => &["owa2b", "owa2c", "owa2d", "owa2e"],
        "FzyR1" => &["owa2b", "owa2c", "owa2d"],
        "FzyR2" => &["owa2b", "owa2d"],
        "FzyR3" => &["owa2b_le", "owa2d_prime"],
        "Fs" => &["owa3b", "owa3c", "owa3d", "owa3e"],
        "FsR1" => &["owa3b", "owa3c", "owa3d"],
        "FsR2" => &["owa3b", "owa3d"],
        "FsR3" => &["owa3b_le", "owa3d"],
        "Fgs" => &["owa2b", "owa2c", "owa2e", "owa2g", "owa2h"],
        "Fgs'" => &["owa2b", "owa2c", "owa2d0", "owa2e", "owa2g"],
        other => panic!("unexpected variant {other}"),
    };
    rows.iter().copied().collect()
}

#[test]
fn emitted_tags_reproduce_the_summary_tables() {
    let inst = example("example1");
    let domain_tags: BTreeSet<&str> = ["card"].into_iter().collect();
    for variant in FormulationVariant::catalog() {
        let b = build(variant, &inst, None).unwrap();
        let tags: BTreeSet<&str> = b.model.rows.iter().map(|r| r.tag.as_str()).collect();
        assert!(tags.iter().all(|t| KNOWN_TAGS.contains(t)), "{variant}: {tags:?}");
        let mut want = table_marks(variant);
        want.extend(&domain_tags);
        if variant.has_y() {
            want.insert("theta_link");
        }
        assert_eq!(tags, want, "{variant}");
    }
}

#[test]
fn domain_tags_follow_the_domain() {
    let sp = generate_grid(&corpus()[0]).unwrap().instance;
    let pm = generate_grid(&corpus()[60]).unwrap().instance;
    let ex3 = example("example3");
    for (inst, want) in
        [(&sp, vec!["SPPb", "SPPc", "SPPd", "SPPe"]), (&pm, vec!["PM1"]), (&ex3, vec!["hull_convex", "hull_link"])]
    {
        let b = build(v("Fz"), inst, None).unwrap();
        let tags: BTreeSet<&str> = b.model.rows.iter().map(|r| r.tag.as_str()).collect();
        for t in want {
            assert!(tags.contains(t), "{t} missing from {tags:?}");
        }
    }
}

/// A point near the canonical lift: a random permutation or a random
/// binary matrix in the z block, and jittered thetas.
fn perturbed(b: &owa::BuiltModel, lift: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut pt = lift.to_vec();
    let z = b.z.as_ref().unwrap();
    let p = b.p;
    match rng.gen_range(0..3) {
        0 => {}
        1 => {
            let mut pi: Vec<usize> = (0..p).collect();
            pi.shuffle(rng);
            for i in 0..p {
                for j in 0..p {
                    pt[z[i][j].unwrap()] = (pi[i] == j) as u8 as f64;
                }
            }
        }
        _ => {
            for col in z.iter().flatten().flatten() {
                pt[*col] = rng.gen_range(0..=1) as f64;
            }
        }
    }
    for &t in &b.theta {
        if rng.gen_bool(0.5) {
            pt[t] = (pt[t] + rng.gen_range(-3..=3) as f64).max(0.0);
        }
    }
    pt
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn base0_and_base_describe_the_same_set(seed in 0u64..10_000) {
        let inst = random_instance(seed, 5, 2, 3, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = inst.domain.enumerate().unwrap();
        for (a, b) in [(v("Fz0"), v("Fz")), (v("Fzy0"), v("Fzy"))] {
            let ma = build(a, &inst, None).unwrap();
            let mb = build(b, &inst, None).unwrap();
            for x in &points {
                let lift = canonical_lift(&ma, &inst, x).unwrap();
                for _ in 0..8 {
                    let pt = perturbed(&ma, &lift, &mut rng);
                    let ina = domain_membership(&ma, &pt).unwrap().is_member();
                    let inb = domain_membership(&mb, &pt).unwrap().is_member();
                    prop_assert_eq!(ina, inb, "{} vs {} at {:?}", a, b, pt);
                }
            }
        }
    }

    #[test]
    fn canonical_lifts_are_feasible_everywhere(seed in 0u64..10_000) {
        let inst = random_instance(seed, 5, 3, 4, false);
        let variants: Vec<_> = FormulationVariant::catalog()
            .into_iter()
            .flat_map(|v| [v, v.reduced()])
            .filter(|v| v.validate().is_ok())
            .collect();
        for variant in variants {
            let b = build(variant, &inst, None).unwrap();
            for x in inst.domain.enumerate().unwrap() {
                let lift = canonical_lift(&b, &inst, &x).unwrap();
                let m = domain_membership(&b, &lift).unwrap();
                prop_assert!(m.is_member(), "{} x={:?} violates {:?}", variant, x, m.violated_tags());
                let obj = b.model.objective_value(&lift);
                let want = owa::owa::to_f64(&inst.evaluate(&x).unwrap());
                prop_assert!((obj - want).abs() < 1e-9, "{}: lift objective {} vs {}", variant, obj, want);
            }
        }
    }
}

#[test]
fn zy_solutions_project_to_z_solutions() {
    for seed in 0..10 {
        let inst = random_instance(seed, 6, 3, 3, false);
        for (zy, z) in [(v("Fzy"), v("Fz")), (v("FzyR1"), v("FzR1")), (v("FzyR2"), v("FzR2"))] {
            let bzy = build(zy, &inst, None).unwrap();
            let bz = build(z, &inst, None).unwrap();
            let out = solve_built(&inst, &bzy, &[], &SolveOptions::default()).unwrap();
            let values = out.report.values.unwrap();
            let mut point = values[..bz.model.num_vars()].to_vec();
            for j in 0..inst.p() {
                point[bz.theta[j]] = bzy.theta_expr(j).value(&values);
            }
            let m = domain_membership(&bz, &point).unwrap();
            assert!(m.is_member(), "seed {seed} {zy}: {:?}", m.violated_tags());
            let (a, b) = (bz.model.objective_value(&point), out.report.objective.unwrap());
            assert!((a - b).abs() < 1e-6, "seed {seed} {zy}: {a} vs {b}");
        }
    }
}

#[test]
fn nesting_witnesses_z_and_s() {
    for spec in corpus().into_iter().step_by(7) {
        let inst = generate_grid(&spec).unwrap().instance;
        let x = brute_force_optimum(&inst).unwrap().x_star;
        for family in [Family::Z, Family::S] {
            let ws = nesting_witnesses(&inst, family, &x).unwrap();
            assert_eq!(ws.len(), if family == Family::S && inst.p() < 3 { 2 } else { 3 });
            for w in ws {
                let inside = build(w.inside, &inst, None).unwrap();
                let outside = build(w.outside, &inst, None).unwrap();
                let a = domain_membership(&inside, &w.point).unwrap();
                let b = domain_membership(&outside, &w.point).unwrap();
                assert!(a.is_member(), "{} {}: {:?}", spec.name(), w.inside, a.violated_tags());
                assert!(!b.is_member(), "{} {} should reject", spec.name(), w.outside);
            }
        }
    }
}

#[test]
fn lift_with_raised_last_theta_separates_r1_from_base() {
    let inst = example("example1");
    let base = build(v("Fz"), &inst, None).unwrap();
    let r1 = build(v("FzR1"), &inst, None).unwrap();
    let mut pt = canonical_lift(&base, &inst, &[1, 0, 1]).unwrap();
    pt[base.theta[2]] = 7.5;
    let m = domain_membership(&base, &pt).unwrap();
    assert_eq!(m.violated_tags(), vec!["owae"]);
    assert!(domain_membership(&r1, &pt).unwrap().is_member());
}

#[test]
fn big_m_handling() {
    let inst = example("example1");
    assert!(matches!(build(v("Fz"), &inst, Some(rat(7))), Err(OwaError::BigMTooSmall { .. })));
    let loose = build(v("Fz"), &inst, Some(rat(1000))).unwrap();
    let out = solve_built(&inst, &loose, &[], &SolveOptions::default()).unwrap();
    assert_eq!(out.value, Some(rat(23)));
    assert!(matches!(FormulationVariant::parse("Fq"), Err(OwaError::UnknownVariant(_))));
}

#[test]
fn signed_weights_with_the_theta_upper_bound() {
    let full: Vec<_> = FormulationVariant::catalog().into_iter().filter(|v| v.keeps_full_permutation()).collect();
    // Z and ZY base0/base/R1, S base/R1 and both GS variants.
    assert_eq!(full.len(), 10);
    for seed in 0..12 {
        let inst = random_instance(100 + seed, 6, 3, 3, true);
        if !inst.weights.has_negative() {
            continue;
        }
        let want = brute_force_optimum(&inst).unwrap().value;
        assert!(matches!(build(v("Fz"), &inst, None), Err(OwaError::SignedWeights)));
        assert!(matches!(
            build_with_cuts(v("FzR2"), &inst, None, &[CutFamily::Cotazy], None),
            Err(OwaError::SignedWeights)
        ));
        for &variant in &full {
            let b = build_with_cuts(variant, &inst, None, &[CutFamily::Cotazy], None).unwrap();
            let out = solve_built(&inst, &b, &[CutFamily::Cotazy], &SolveOptions::default()).unwrap();
            assert_eq!(out.value, Some(want), "seed {seed} {variant}");
        }
    }
}

#[test]
fn single_objective_instances() {
    let inst = random_instance(3, 5, 2, 1, false);
    let want = brute_force_optimum(&inst).unwrap().value;
    for variant in FormulationVariant::catalog() {
        assert_eq!(optimum(&inst, variant), want, "{variant}");
    }
}
