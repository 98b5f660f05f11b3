//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use ld_core::{InfoSystem, OutcomeSpace, Partition};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn plog2p(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Merging loss in bits straight from its definition.
pub fn loss_bits(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    plog2p(total) - weights.iter().map(|&p| plog2p(p)).sum::<f64>()
}

/// μ of the atom `mask` by the recursive definition
/// `μ(S) = L(S) − Σ_{T ⊊ S, |T| ≥ 2} μ(T)`, memoised over sub-masks.
pub fn recursive_mu(weights: &[f64], mask: u32) -> f64 {
    let mut memo: HashMap<u32, f64> = HashMap::new();
    recursive_mu_memo(weights, mask, &mut memo)
}

fn recursive_mu_memo(weights: &[f64], mask: u32, memo: &mut HashMap<u32, f64>) -> f64 {
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let members: Vec<f64> = (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| weights[i])
        .collect();
    let mut value = loss_bits(&members);
    let mut sub = (mask - 1) & mask;
    while sub != 0 {
        if sub.count_ones() >= 2 {
            value -= recursive_mu_memo(weights, sub, memo);
        }
        sub = (sub - 1) & mask;
    }
    memo.insert(mask, value);
    value
}

/// Shannon entropy in bits of the joint variable, by tabulating the joint
/// distribution of block indices outcome by outcome.
pub fn direct_entropy(weights: &[f64], parts: &[&Partition]) -> f64 {
    let mut joint: HashMap<Vec<usize>, f64> = HashMap::new();
    for (i, &w) in weights.iter().enumerate() {
        let key: Vec<usize> = parts.iter().map(|p| p.block_of(i)).collect();
        *joint.entry(key).or_insert(0.0) += w;
    }
    -joint.values().map(|&p| plog2p(p)).sum::<f64>()
}

pub fn entropy_of(system: &InfoSystem, names: &[&str]) -> f64 {
    let parts: Vec<&Partition> = names.iter().map(|n| system.variable(n).unwrap()).collect();
    direct_entropy(system.space().weights(), &parts)
}

/// Alternating sum over nonempty subsets of `names`.
pub fn co_information(system: &InfoSystem, names: &[&str], cond: &[&str]) -> f64 {
    let k = names.len();
    let mut total = 0.0;
    let h_cond = entropy_of(system, cond);
    for t in 1u32..(1 << k) {
        let mut vars: Vec<&str> = cond.to_vec();
        vars.extend((0..k).filter(|i| t >> i & 1 == 1).map(|i| names[i]));
        let sign = if t.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * (entropy_of(system, &vars) - h_cond);
    }
    total
}

/// Normalised weights; `zero_rate` of them are exactly zero.
pub fn random_weights(rng: &mut impl Rng, n: usize, zero_rate: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(zero_rate) {
                0.0
            } else {
                rng.gen_range(0.01..1.0)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

pub fn positive_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.01..1.0)).collect()
}

pub fn random_partition(rng: &mut impl Rng, n: usize) -> Partition {
    let k = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(&labels)
}

pub const NAMES: [&str; 3] = ["X", "Y", "Z"];

/// Random normalised system with `vars` random variables named X, Y, Z.
pub fn random_system(rng: &mut impl Rng, n: usize, vars: usize) -> InfoSystem {
    let space = OutcomeSpace::numbered(&random_weights(rng, n, 0.1)).unwrap();
    let variables = (0..vars)
        .map(|i| (NAMES[i].to_string(), random_partition(rng, n)))
        .collect();
    InfoSystem::new(space, variables).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
