//! Brute-force equilibrium checks for a fixed payment scheme.
//!
//! Profiles are enumerated as strategy counts. A profile fails to be a Nash
//! equilibrium only when some agent has a strictly profitable deviation; ties
//! are reported through the `is_strict_ne` flag and the per-group margins
//! rather than folded into the verdict.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::beliefs::{self, Signal, World};
use crate::error::{SchemeError, VerifyError};
use crate::exact::Q;
use crate::mechanism::{self, PaymentScheme, ProfileCounts, Strategy};

/// Profiles are enumerated only up to this population.
pub const MAX_ENUMERATED_AGENTS: usize = 20;

/// A strictly profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub strategy: Strategy,
    pub observation: Signal,
    pub better_report: Signal,
    pub gain: Q,
}

/// How one strategy group fares in a profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOutcome {
    pub strategy: Strategy,
    pub count: usize,
    /// Prescribed payoff minus flipped payoff, per observation (indexed by
    /// signal bit). `None` for observations of probability zero.
    pub margins: [Option<Q>; 2],
    /// Ex-ante expected payment of one group member.
    pub value: Q,
}

impl GroupOutcome {
    pub fn min_margin(&self) -> Option<&Q> {
        self.margins.iter().flatten().min()
    }
}

/// Verdict on one profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub profile: ProfileCounts,
    /// Agents outside the profile who always report honestly and never deviate.
    pub outsiders: usize,
    pub is_ne: bool,
    /// Every prescribed report is strictly better than its flip.
    pub is_strict_ne: bool,
    pub witness: Option<Deviation>,
    pub groups: Vec<GroupOutcome>,
}

impl EquilibriumReport {
    /// Smallest margin over all groups and observations.
    pub fn min_margin(&self) -> Option<&Q> {
        self.groups.iter().filter_map(GroupOutcome::min_margin).min()
    }

    pub fn value_of(&self, strategy: Strategy) -> Option<&Q> {
        self.groups
            .iter()
            .find(|g| g.strategy == strategy)
            .map(|g| &g.value)
    }
}

/// Best report against `others` after observing `obs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    /// On ties, the low report.
    pub report: Signal,
    pub strict: bool,
    /// Payoff of the high report minus payoff of the low report.
    pub advantage_high: Q,
}

pub fn best_response(
    scheme: &PaymentScheme,
    world: &World,
    others: &ProfileCounts,
    obs: Signal,
) -> Result<BestResponse, SchemeError> {
    let low = expected_payoff_of_report(scheme, world, Signal::Low, others, obs)?;
    let high = expected_payoff_of_report(scheme, world, Signal::High, others, obs)?;
    let advantage_high = high - low;
    let report = if advantage_high > Q::zero() {
        Signal::High
    } else {
        Signal::Low
    };
    Ok(BestResponse {
        report,
        strict: !advantage_high.is_zero(),
        advantage_high,
    })
}

fn expected_payoff_of_report(
    scheme: &PaymentScheme,
    world: &World,
    report: Signal,
    others: &ProfileCounts,
    obs: Signal,
) -> Result<Q, SchemeError> {
    let form = mechanism::payoff_form(world, scheme.n_agents(), report, others, obs)?;
    Ok(form.eval(&scheme.values()))
}

fn check_profile(scheme: &PaymentScheme, total: usize) -> Result<(), SchemeError> {
    if total != scheme.n_agents() {
        return Err(SchemeError::DimensionMismatch {
            expected: scheme.n_agents(),
            found: total,
        });
    }
    Ok(())
}

/// Nash check for a profile of all `N` agents.
pub fn is_nash(
    scheme: &PaymentScheme,
    world: &World,
    profile: &ProfileCounts,
) -> Result<EquilibriumReport, SchemeError> {
    is_nash_among(scheme, world, profile, 0)
}

/// Nash check where only the agents of `profile` are strategic and
/// `outsiders` further agents report honestly no matter what.
pub fn is_nash_among(
    scheme: &PaymentScheme,
    world: &World,
    profile: &ProfileCounts,
    outsiders: usize,
) -> Result<EquilibriumReport, SchemeError> {
    check_profile(scheme, profile.total() + outsiders)?;
    let prior = beliefs::signal_prior(world);
    let full = profile.with_added(Strategy::Honest, outsiders);
    let values = scheme.values();

    let mut groups = Vec::new();
    let mut witness: Option<Deviation> = None;
    let mut strict = true;
    for (strategy, count) in profile.groups() {
        let others = full.without_one(strategy).expect("nonempty group");
        let mut margins = [None, None];
        let mut value = Q::zero();
        for obs in Signal::BOTH {
            if prior[obs.bit()].is_zero() {
                continue;
            }
            let prescribed = strategy.report(obs);
            let keep = mechanism::payoff_form(world, scheme.n_agents(), prescribed, &others, obs)?.eval(&values);
            let flip = mechanism::payoff_form(world, scheme.n_agents(), prescribed.flip(), &others, obs)?.eval(&values);
            let margin = &keep - &flip;
            if margin <= Q::zero() {
                strict = false;
            }
            if margin < Q::zero() && witness.is_none() {
                witness = Some(Deviation {
                    strategy,
                    observation: obs,
                    better_report: prescribed.flip(),
                    gain: -margin.clone(),
                });
            }
            value += &prior[obs.bit()] * &keep;
            margins[obs.bit()] = Some(margin);
        }
        groups.push(GroupOutcome {
            strategy,
            count,
            margins,
            value,
        });
    }
    let is_ne = witness.is_none();
    Ok(EquilibriumReport {
        profile: *profile,
        outsiders,
        is_ne,
        is_strict_ne: is_ne && strict,
        witness,
        groups,
    })
}

/// Verdicts for every profile of the scheme's population, in lexicographic
/// order of `(neg, pos, honest, lie)`.
pub fn enumerate_profiles(scheme: &PaymentScheme, world: &World) -> Result<Vec<EquilibriumReport>, VerifyError> {
    if scheme.n_agents() > MAX_ENUMERATED_AGENTS {
        return Err(VerifyError::PopulationTooLarge(scheme.n_agents()));
    }
    ProfileCounts::enumerate(scheme.n_agents())
        .iter()
        .map(|p| is_nash(scheme, world, p).map_err(VerifyError::from))
        .collect()
}

/// All pure Nash equilibria, in lexicographic profile order.
pub fn enumerate_pure_equilibria(scheme: &PaymentScheme, world: &World) -> Result<Vec<EquilibriumReport>, VerifyError> {
    Ok(enumerate_profiles(scheme, world)?
        .into_iter()
        .filter(|r| r.is_ne)
        .collect())
}

/// The four symmetric profiles that are equilibria.
pub fn symmetric_equilibria(scheme: &PaymentScheme, world: &World) -> Result<Vec<EquilibriumReport>, SchemeError> {
    let mut out = Vec::new();
    for strategy in Strategy::ALL {
        let report = is_nash(scheme, world, &ProfileCounts::symmetric(strategy, scheme.n_agents()))?;
        if report.is_ne {
            out.push(report);
        }
    }
    Ok(out)
}

/// One group's ex-ante value against the honest equilibrium value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupComparison {
    pub strategy: Strategy,
    pub count: usize,
    pub value: Q,
    pub versus_honest: Ordering,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoComparison {
    pub honest_value: Q,
    pub groups: Vec<GroupComparison>,
    /// Every group is strictly better off than under honest reporting.
    pub dominates: bool,
}

pub fn pareto_compare(
    scheme: &PaymentScheme,
    world: &World,
    profile: &ProfileCounts,
) -> Result<ParetoComparison, SchemeError> {
    pareto_compare_among(scheme, world, profile, 0)
}

/// Pareto comparison for the strategic agents of `profile`, with
/// `outsiders` honest agents alongside.
pub fn pareto_compare_among(
    scheme: &PaymentScheme,
    world: &World,
    profile: &ProfileCounts,
    outsiders: usize,
) -> Result<ParetoComparison, SchemeError> {
    check_profile(scheme, profile.total() + outsiders)?;
    let honest_value = mechanism::honest_expected_value(scheme, world)?;
    let full = profile.with_added(Strategy::Honest, outsiders);
    let mut groups = Vec::new();
    for (strategy, count) in profile.groups() {
        let others = full.without_one(strategy).expect("nonempty group");
        let value = mechanism::group_value_form(world, scheme.n_agents(), strategy, &others)?.eval(&scheme.values());
        let versus_honest = value.cmp(&honest_value);
        groups.push(GroupComparison {
            strategy,
            count,
            value,
            versus_honest,
        });
    }
    let dominates = !groups.is_empty() && groups.iter().all(|g| g.versus_honest == Ordering::Greater);
    Ok(ParetoComparison {
        honest_value,
        groups,
        dominates,
    })
}

/// Witness against honest dominance: `other_positive` reports from the
/// other colluders and observation `observation` leave honesty ahead by only
/// `gap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceWitness {
    pub other_positive: usize,
    pub observation: Signal,
    pub gap: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    pub holds: bool,
    /// Smallest honest-minus-flipped gap over all cases.
    pub min_gap: Q,
    pub witness: Option<DominanceWitness>,
}

/// Is honesty better by at least `margin` for a colluder whatever the other
/// `n_col - 1` colluders report, given `N - n_col` honest outsiders?
pub fn is_dominant_honest(
    scheme: &PaymentScheme,
    world: &World,
    n_col: usize,
    margin: &Q,
) -> Result<DominanceReport, SchemeError> {
    let n = scheme.n_agents();
    if n_col == 0 || n_col > n {
        return Err(SchemeError::InvalidCoalition(format!("{n_col} colluders among {n} agents")));
    }
    let values = scheme.values();
    let mut min_gap: Option<Q> = None;
    let mut witness = None;
    for c in 0..n_col {
        for obs in Signal::BOTH {
            let gap = dominance_gap_form(world, n, n_col, c, obs)?.eval(&values);
            if gap < *margin && witness.is_none() {
                witness = Some(DominanceWitness {
                    other_positive: c,
                    observation: obs,
                    gap: gap.clone(),
                });
            }
            if min_gap.as_ref().map_or(true, |m| gap < *m) {
                min_gap = Some(gap);
            }
        }
    }
    Ok(DominanceReport {
        holds: witness.is_none(),
        min_gap: min_gap.unwrap_or_else(Q::zero),
        witness,
    })
}

/// Honest minus flipped payment for a colluder who observed `obs` while the
/// other colluders file `other_positive` positive reports.
pub fn dominance_gap_form(
    world: &World,
    n_agents: usize,
    n_col: usize,
    other_positive: usize,
    obs: Signal,
) -> Result<crate::form::LinearForm, SchemeError> {
    let others = ProfileCounts::honest(n_agents - n_col)
        .with_added(Strategy::AlwaysPositive, other_positive)
        .with_added(Strategy::AlwaysNegative, n_col - 1 - other_positive);
    let keep = mechanism::payoff_form(world, n_agents, obs, &others, obs)?;
    let flip = mechanism::payoff_form(world, n_agents, obs.flip(), &others, obs)?;
    Ok(&keep - &flip)
}

/// The coalition's revenue-maximising number of positive reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionChoice {
    /// Lowest maximiser.
    pub best: usize,
    /// `best` is the unique maximiser.
    pub strict: bool,
    pub revenues: Vec<Q>,
}

pub fn coalition_best_report(
    scheme: &PaymentScheme,
    world: &World,
    n_col: usize,
    high: usize,
) -> Result<CoalitionChoice, SchemeError> {
    let revenues = (0..=n_col)
        .map(|r| mechanism::coalition_revenue(scheme, world, n_col, high, r))
        .collect::<Result<Vec<_>, _>>()?;
    let top = revenues.iter().max().expect("at least one report count").clone();
    let best = revenues.iter().position(|v| *v == top).expect("max exists");
    let strict = revenues.iter().filter(|v| **v == top).count() == 1;
    Ok(CoalitionChoice {
        best,
        strict,
        revenues,
    })
}

/// True when, for every count of observed high signals, reporting that
/// count is the coalition's unique best choice.
pub fn is_sybil_proof(scheme: &PaymentScheme, world: &World, n_col: usize) -> Result<bool, SchemeError> {
    for c in 0..=n_col {
        let choice = coalition_best_report(scheme, world, n_col, c)?;
        if choice.best != c || !choice.strict {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn plumber() -> World {
        World::new(vec![ratio(4, 5), ratio(1, 5)], vec![ratio(9, 10), ratio(3, 20)]).unwrap()
    }

    fn two_agent_scheme() -> PaymentScheme {
        PaymentScheme::new(2, vec![ratio(21, 8), int(0)], vec![int(0), ratio(37, 24)]).unwrap()
    }

    #[test]
    fn best_response_in_the_two_agent_example() {
        let br = best_response(&two_agent_scheme(), &plumber(), &ProfileCounts::honest(1), Signal::High).unwrap();
        assert_eq!(br.report, Signal::High);
        assert!(br.strict);
        let zero = PaymentScheme::zero(2).unwrap();
        let br = best_response(&zero, &plumber(), &ProfileCounts::honest(1), Signal::Low).unwrap();
        assert!(!br.strict);
    }

    #[test]
    fn constant_positive_reporting_is_an_equilibrium_of_the_two_agent_scheme() {
        let report = is_nash(&two_agent_scheme(), &plumber(), &ProfileCounts::symmetric(Strategy::AlwaysPositive, 2)).unwrap();
        assert!(report.is_ne);
        let honest = is_nash(&two_agent_scheme(), &plumber(), &ProfileCounts::honest(2)).unwrap();
        assert!(honest.is_strict_ne);
        assert_eq!(honest.min_margin(), Some(&int(1)));
    }

    #[test]
    fn zero_scheme_makes_everything_a_weak_equilibrium() {
        let zero = PaymentScheme::zero(3).unwrap();
        let reports = enumerate_profiles(&zero, &plumber()).unwrap();
        assert_eq!(reports.len(), 20);
        assert!(reports.iter().all(|r| r.is_ne && !r.is_strict_ne));
    }

    #[test]
    fn witness_is_a_strict_improvement() {
        let report = is_nash(&two_agent_scheme(), &plumber(), &ProfileCounts::new(0, 0, 1, 1)).unwrap();
        assert!(!report.is_ne);
        let w = report.witness.unwrap();
        assert!(w.gain > Q::zero());
    }

    #[test]
    fn pareto_of_the_honest_profile_is_all_equal() {
        let s = two_agent_scheme();
        let cmp = pareto_compare(&s, &plumber(), &ProfileCounts::honest(2)).unwrap();
        assert!(!cmp.dominates);
        assert!(cmp.groups.iter().all(|g| g.versus_honest == Ordering::Equal));
    }

    #[test]
    fn single_colluder_dominance_is_plain_incentive_compatibility() {
        let s = two_agent_scheme();
        let d = is_dominant_honest(&s, &plumber(), 1, &int(1)).unwrap();
        assert!(d.holds);
        assert_eq!(d.min_gap, int(1));
        assert!(!is_dominant_honest(&s, &plumber(), 1, &int(2)).unwrap().holds);
    }

    #[test]
    fn zero_scheme_coalition_ties() {
        let zero = PaymentScheme::zero(4).unwrap();
        let choice = coalition_best_report(&zero, &plumber(), 3, 1).unwrap();
        assert!(!choice.strict);
        assert!(!is_sybil_proof(&zero, &plumber(), 3).unwrap());
    }

    #[test]
    fn population_guard() {
        let big = PaymentScheme::zero(21).unwrap();
        assert_eq!(enumerate_profiles(&big, &plumber()).unwrap_err(), VerifyError::PopulationTooLarge(21));
    }
}
