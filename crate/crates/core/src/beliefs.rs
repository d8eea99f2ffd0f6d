//! Bayesian machinery over a common-prior type model.
//!
//! A [`World`] lists the possible product types, the prior over them and,
//! per type, the probability that a buyer observes high quality. Everything
//! here is exact: posteriors, signal priors and the binomial mixtures that
//! describe how many of `m` honest reporters will report positively.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::WorldError;
use crate::exact::{self, Q};

/// A binary quality observation (or report).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Low,
    High,
}

impl Signal {
    pub const BOTH: [Signal; 2] = [Signal::Low, Signal::High];

    pub fn bit(self) -> usize {
        match self {
            Signal::Low => 0,
            Signal::High => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Signal {
        if bit == 0 {
            Signal::Low
        } else {
            Signal::High
        }
    }

    pub fn flip(self) -> Signal {
        match self {
            Signal::Low => Signal::High,
            Signal::High => Signal::Low,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// Unvalidated type model, e.g. straight from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWorld {
    pub types: Vec<String>,
    pub prior: Vec<Q>,
    pub high_prob: Vec<Q>,
}

/// A validated type model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    types: Vec<String>,
    prior: Vec<Q>,
    high_prob: Vec<Q>,
}

/// Checks the model assumptions and builds a [`World`].
///
/// Conditionals of exactly 0 or 1 are accepted here; see
/// [`World::is_interior`] for the stricter condition the designers need.
pub fn validate_world(raw: RawWorld) -> Result<World, WorldError> {
    let RawWorld {
        types,
        prior,
        high_prob,
    } = raw;
    if types.is_empty() && prior.is_empty() && high_prob.is_empty() {
        return Err(WorldError::Empty);
    }
    if types.len() != prior.len() || prior.len() != high_prob.len() {
        return Err(WorldError::LengthMismatch {
            types: types.len(),
            prior: prior.len(),
            high_prob: high_prob.len(),
        });
    }
    let unit = Q::one();
    for (field, values) in [("prior", &prior), ("high_prob", &high_prob)] {
        for (index, v) in values.iter().enumerate() {
            if *v < Q::zero() || *v > unit {
                return Err(WorldError::OutOfRangeProbability {
                    field,
                    index,
                    value: exact::to_exact_string(v),
                });
            }
        }
    }
    let total = exact::sum(&prior);
    if total != unit {
        return Err(WorldError::NonNormalizedPrior {
            sum: exact::to_exact_string(&total),
        });
    }
    for i in 0..high_prob.len() {
        for j in i + 1..high_prob.len() {
            if high_prob[i] == high_prob[j] {
                return Err(WorldError::DuplicateConditional {
                    first: i,
                    second: j,
                    value: exact::to_exact_string(&high_prob[i]),
                });
            }
        }
    }
    Ok(World {
        types,
        prior,
        high_prob,
    })
}

impl World {
    /// Builds and validates a world with generated type names.
    pub fn new(prior: Vec<Q>, high_prob: Vec<Q>) -> Result<World, WorldError> {
        let types = (0..prior.len()).map(|i| format!("t{i}")).collect();
        validate_world(RawWorld {
            types,
            prior,
            high_prob,
        })
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn prior(&self) -> &[Q] {
        &self.prior
    }

    pub fn high_prob(&self) -> &[Q] {
        &self.high_prob
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    /// Every conditional strictly inside (0, 1).
    pub fn is_interior(&self) -> bool {
        self.high_prob
            .iter()
            .all(|p| *p > Q::zero() && *p < Q::one())
    }

    /// Interior conditionals and at least two types with positive prior.
    pub fn require_interior(&self) -> Result<(), WorldError> {
        if !self.is_interior() {
            return Err(WorldError::Degenerate(
                "conditionals must lie strictly between 0 and 1".into(),
            ));
        }
        let supported = self.prior.iter().filter(|p| !p.is_zero()).count();
        if supported < 2 {
            return Err(WorldError::Degenerate(
                "at least two types need positive prior".into(),
            ));
        }
        Ok(())
    }

    fn likelihood(&self, idx: usize, obs: Signal) -> Q {
        match obs {
            Signal::High => self.high_prob[idx].clone(),
            Signal::Low => Q::one() - &self.high_prob[idx],
        }
    }
}

/// A probability distribution over the types of a [`World`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Belief(Vec<Q>);

impl Belief {
    pub fn new(weights: Vec<Q>) -> Belief {
        Belief(weights)
    }

    pub fn weights(&self) -> &[Q] {
        &self.0
    }

    /// Probability that a single fresh signal is high under this belief.
    pub fn high_signal_prob(&self, world: &World) -> Q {
        exact::dot(&self.0, world.high_prob())
    }
}

/// Distribution over a count `n = 0..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignalDistribution(Vec<Q>);

impl SignalDistribution {
    pub fn new(mass: Vec<Q>) -> SignalDistribution {
        SignalDistribution(mass)
    }

    /// All mass on `n`, over counts `0..=m`.
    pub fn point(n: usize, m: usize) -> SignalDistribution {
        let mut mass = vec![Q::zero(); m + 1];
        mass[n] = Q::one();
        SignalDistribution(mass)
    }

    pub fn mass(&self) -> &[Q] {
        &self.0
    }

    pub fn into_mass(self) -> Vec<Q> {
        self.0
    }

    /// Largest representable count `m`.
    pub fn max_count(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, n: usize) -> Q {
        self.0.get(n).cloned().unwrap_or_else(Q::zero)
    }

    pub fn total(&self) -> Q {
        exact::sum(&self.0)
    }

    /// Distribution of `m - n`.
    pub fn reversed(&self) -> SignalDistribution {
        SignalDistribution(self.0.iter().rev().cloned().collect())
    }

    /// Distribution of the sum of two independent counts.
    pub fn convolve(&self, other: &SignalDistribution) -> SignalDistribution {
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        SignalDistribution(out)
    }

    /// Distribution of `n + shift`.
    pub fn shifted(&self, shift: usize) -> SignalDistribution {
        let mut out = vec![Q::zero(); shift];
        out.extend(self.0.iter().cloned());
        SignalDistribution(out)
    }

    /// Adds `weight` times `other` in place; lengths must agree.
    pub fn add_scaled(&mut self, weight: &Q, other: &SignalDistribution) {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += weight * b;
            }
        }
    }
}

/// `Binomial(m, p)` with exact coefficients.
pub fn binomial_pmf(p: &Q, m: usize) -> SignalDistribution {
    let q = Q::one() - p;
    let mut p_pow = Vec::with_capacity(m + 1);
    let mut q_pow = Vec::with_capacity(m + 1);
    p_pow.push(Q::one());
    q_pow.push(Q::one());
    for k in 1..=m {
        p_pow.push(&p_pow[k - 1] * p);
        q_pow.push(&q_pow[k - 1] * &q);
    }
    let mut coeff = BigInt::one();
    let mass = (0..=m)
        .map(|n| {
            if n > 0 {
                coeff = &coeff * BigInt::from(m + 1 - n) / BigInt::from(n);
            }
            Q::from_integer(coeff.clone()) * &p_pow[n] * &q_pow[m - n]
        })
        .collect();
    SignalDistribution(mass)
}

/// Signal priors `[Pr[low], Pr[high]]`.
pub fn signal_prior(world: &World) -> [Q; 2] {
    let high = exact::dot(world.prior(), world.high_prob());
    [Q::one() - &high, high]
}

fn normalize(weights: Vec<Q>) -> Result<Belief, WorldError> {
    let total = exact::sum(&weights);
    if total.is_zero() {
        return Err(WorldError::ZeroProbabilityObservation);
    }
    Ok(Belief(weights.into_iter().map(|w| w / &total).collect()))
}

/// Posterior over types after one observation.
pub fn posterior(world: &World, obs: Signal) -> Result<Belief, WorldError> {
    let weights = (0..world.num_types())
        .map(|t| &world.prior[t] * world.likelihood(t, obs))
        .collect();
    normalize(weights)
}

/// Posterior over types after seeing `high` high signals among `signals`.
pub fn posterior_given_counts(
    world: &World,
    high: usize,
    signals: usize,
) -> Result<Belief, WorldError> {
    if high > signals {
        return Err(WorldError::CountOutOfRange {
            count: high,
            signals,
        });
    }
    let weights = (0..world.num_types())
        .map(|t| {
            let p = &world.high_prob[t];
            let q = Q::one() - p;
            &world.prior[t] * num_traits::pow(p.clone(), high) * num_traits::pow(q, signals - high)
        })
        .collect();
    normalize(weights)
}

/// Distribution of the number of positive reports among `m` honest
/// reporters, for an agent holding `belief` about the type.
pub fn reference_distribution(world: &World, belief: &Belief, m: usize) -> SignalDistribution {
    let mut out = SignalDistribution(vec![Q::zero(); m + 1]);
    for (w, p) in belief.weights().iter().zip(world.high_prob()) {
        if !w.is_zero() {
            out.add_scaled(w, &binomial_pmf(p, m));
        }
    }
    out
}

/// Reference distribution for an agent that observed `obs`, with `m` honest
/// reference reporters.
pub fn reference_given(world: &World, obs: Signal, m: usize) -> Result<SignalDistribution, WorldError> {
    Ok(reference_distribution(world, &posterior(world, obs)?, m))
}

/// Outcome of [`likelihood_ratio_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioCheck {
    pub increasing: bool,
    /// First count `n` at which `Pr[n|1]/Pr[n|0]` fails to exceed its
    /// predecessor, or at which the denominator `Pr[n|0]` vanishes.
    pub first_violation: Option<usize>,
}

/// Checks that `Pr[n|high]/Pr[n|low]` is strictly increasing over `0..=m`.
pub fn likelihood_ratio_check(world: &World, m: usize) -> Result<RatioCheck, WorldError> {
    let low = reference_given(world, Signal::Low, m)?;
    let high = reference_given(world, Signal::High, m)?;
    let violation = |n: usize| RatioCheck {
        increasing: false,
        first_violation: Some(n),
    };
    if low.get(0).is_zero() {
        return Ok(violation(0));
    }
    for n in 1..=m {
        if low.get(n).is_zero() {
            return Ok(violation(n));
        }
        // high[n]/low[n] > high[n-1]/low[n-1], cross-multiplied.
        if high.get(n) * low.get(n - 1) <= high.get(n - 1) * low.get(n) {
            return Ok(violation(n));
        }
    }
    Ok(RatioCheck {
        increasing: true,
        first_violation: None,
    })
}
