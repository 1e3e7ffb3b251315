#![allow(dead_code)]

use owa::domain::explicit_cardinality_domain;
use owa::formulation::OwaInstance;
use owa::instances::builtin;
use owa::owa::{rat, CostMatrix, Rational, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example(name: &str) -> OwaInstance {
    builtin(name).unwrap().instance
}

/// Cardinality-constrained instance with costs in `0..=9` and weights in
/// `0..=4`; `signed` draws weights from `-3..=4` instead.
pub fn random_instance(seed: u64, n: usize, k: usize, p: usize, signed: bool) -> OwaInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<Vec<i64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(0..=9)).collect()).collect();
    let weights = if signed {
        WeightVector::signed((0..p).map(|_| rat(rng.gen_range(-3..=4))).collect::<Vec<Rational>>())
    } else {
        WeightVector::new((0..p).map(|_| rat(rng.gen_range(0..=4))).collect()).unwrap()
    };
    OwaInstance::new(explicit_cardinality_domain(n, k).unwrap(), CostMatrix::from_integers(&costs).unwrap(), weights)
        .unwrap()
}
