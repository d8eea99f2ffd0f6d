//! Test-side oracles built from first principles: every other agent is
//! listed individually and every vector of their signals is enumerated.

#![allow(dead_code)]

use num_traits::{One, Zero};

use crowdpay::beliefs::{Signal, World};
use crowdpay::exact::{ratio, Q};
use crowdpay::mechanism::{PaymentScheme, ProfileCounts, Strategy};

pub fn plumber() -> World {
    World::new(vec![ratio(4, 5), ratio(1, 5)], vec![ratio(9, 10), ratio(3, 20)]).unwrap()
}

/// `Pr[type | obs]` straight from Bayes' rule.
pub fn posterior_weights(world: &World, obs: Signal) -> Vec<Q> {
    let joint: Vec<Q> = world
        .prior()
        .iter()
        .zip(world.high_prob())
        .map(|(prior, p)| match obs {
            Signal::High => prior * p,
            Signal::Low => prior * (Q::one() - p),
        })
        .collect();
    let total = joint.iter().fold(Q::zero(), |a, b| a + b);
    joint.into_iter().map(|j| j / &total).collect()
}

/// Probability that `m` agents observe exactly the bit vector `bits`
/// (bit `j` of the mask), given the observer's own signal.
fn vector_probability(world: &World, weights: &[Q], bits: u32, m: usize) -> Q {
    let mut total = Q::zero();
    for (w, p) in weights.iter().zip(world.high_prob()) {
        let mut prob = w.clone();
        for j in 0..m {
            if bits >> j & 1 == 1 {
                prob *= p;
            } else {
                prob *= Q::one() - p;
            }
        }
        total += prob;
    }
    total
}

fn ordered(others: &ProfileCounts) -> Vec<Strategy> {
    let mut list = Vec::new();
    list.extend(std::iter::repeat(Strategy::AlwaysNegative).take(others.neg));
    list.extend(std::iter::repeat(Strategy::AlwaysPositive).take(others.pos));
    list.extend(std::iter::repeat(Strategy::Honest).take(others.honest));
    list.extend(std::iter::repeat(Strategy::Lie).take(others.lie));
    list
}

/// Expected payment by enumerating all `2^(N-1)` signal vectors of the
/// other agents.
pub fn brute_force_payoff(
    scheme: &PaymentScheme,
    world: &World,
    strategy: Strategy,
    others: &ProfileCounts,
    obs: Signal,
) -> Q {
    let list = ordered(others);
    let m = list.len();
    let weights = posterior_weights(world, obs);
    let report = strategy.report(obs);
    let mut total = Q::zero();
    for bits in 0..(1u32 << m) {
        let positives = list
            .iter()
            .enumerate()
            .filter(|(j, s)| s.report(Signal::from_bit((bits >> j & 1) as usize)) == Signal::High)
            .count();
        total += vector_probability(world, &weights, bits, m) * scheme.pay(report, positives);
    }
    total
}

/// `Pr[n of m honest reporters are positive | obs]` by enumeration.
pub fn brute_force_reference(world: &World, obs: Signal, m: usize) -> Vec<Q> {
    let weights = posterior_weights(world, obs);
    let mut out = vec![Q::zero(); m + 1];
    for bits in 0..(1u32 << m) {
        out[bits.count_ones() as usize] += vector_probability(world, &weights, bits, m);
    }
    out
}
