//! Fixtures shared by the benchmarks.

use crowdpay::beliefs::World;
use crowdpay::exact::ratio;
use crowdpay::harness::generate_problem;

/// Two types, prior (0.8, 0.2), conditionals (0.9, 0.15).
pub fn plumber() -> World {
    World::new(vec![ratio(4, 5), ratio(1, 5)], vec![ratio(9, 10), ratio(3, 20)]).expect("valid world")
}

/// A fixed random world for size-scaling runs.
pub fn random_world(index: u64) -> World {
    generate_problem(2024, index)
}
