//! Payment schemes, reporting strategies and exact expected payoffs.
//!
//! A payment scheme pays an agent according to its own report and the
//! number of positive reports among the other `N - 1` agents. Payoffs are
//! linear in the table, so most quantities here come in two flavours: a
//! `*_form` function returning the coefficients over the `2N` table entries,
//! and an evaluating function that applies that form to a concrete scheme.

use std::fmt;

use num_traits::Zero;

use crate::beliefs::{self, Signal, SignalDistribution, World};
use crate::error::{SchemeError, WorldError};
use crate::exact::{self, Q};
use crate::form::LinearForm;

/// One of the four pure reporting strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    AlwaysNegative,
    AlwaysPositive,
    Honest,
    Lie,
}

impl Strategy {
    /// In the field order of [`ProfileCounts`].
    pub const ALL: [Strategy; 4] = [
        Strategy::AlwaysNegative,
        Strategy::AlwaysPositive,
        Strategy::Honest,
        Strategy::Lie,
    ];

    /// The report this strategy files after observing `obs`.
    pub fn report(self, obs: Signal) -> Signal {
        match self {
            Strategy::AlwaysNegative => Signal::Low,
            Strategy::AlwaysPositive => Signal::High,
            Strategy::Honest => obs,
            Strategy::Lie => obs.flip(),
        }
    }

    /// `(report on low, report on high)`.
    pub fn reports(self) -> (Signal, Signal) {
        (self.report(Signal::Low), self.report(Signal::High))
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::AlwaysNegative => "neg",
            Strategy::AlwaysPositive => "pos",
            Strategy::Honest => "honest",
            Strategy::Lie => "lie",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Payment table `pay[report][n]` for `n = 0..N-1` positive reference reports.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PaymentScheme {
    n_agents: usize,
    pay: [Vec<Q>; 2],
}

impl PaymentScheme {
    pub fn new(n_agents: usize, pay_low: Vec<Q>, pay_high: Vec<Q>) -> Result<Self, SchemeError> {
        if n_agents < 2 {
            return Err(SchemeError::TooFewAgents(n_agents));
        }
        for row in [&pay_low, &pay_high] {
            if row.len() != n_agents {
                return Err(SchemeError::DimensionMismatch {
                    expected: n_agents,
                    found: row.len(),
                });
            }
        }
        for (report, row) in [&pay_low, &pay_high].into_iter().enumerate() {
            if let Some(count) = row.iter().position(|v| *v < Q::zero()) {
                return Err(SchemeError::NegativePayment {
                    report,
                    count,
                    value: exact::to_exact_string(&row[count]),
                });
            }
        }
        Ok(PaymentScheme {
            n_agents,
            pay: [pay_low, pay_high],
        })
    }

    /// The all-zero table.
    pub fn zero(n_agents: usize) -> Result<Self, SchemeError> {
        PaymentScheme::new(n_agents, vec![Q::zero(); n_agents], vec![Q::zero(); n_agents])
    }

    /// Builds a table from the flat layout used by [`LinearForm`]s.
    pub fn from_values(n_agents: usize, values: &[Q]) -> Result<Self, SchemeError> {
        if values.len() != 2 * n_agents {
            return Err(SchemeError::DimensionMismatch {
                expected: 2 * n_agents,
                found: values.len(),
            });
        }
        PaymentScheme::new(
            n_agents,
            values[..n_agents].to_vec(),
            values[n_agents..].to_vec(),
        )
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn pay(&self, report: Signal, n: usize) -> &Q {
        &self.pay[report.bit()][n]
    }

    pub fn row(&self, report: Signal) -> &[Q] {
        &self.pay[report.bit()]
    }

    /// Flat layout: the low-report row followed by the high-report row.
    pub fn values(&self) -> Vec<Q> {
        self.pay[0].iter().chain(&self.pay[1]).cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pay.iter().flatten().all(Zero::is_zero)
    }
}

/// Position of `pay[report][n]` in the flat layout.
pub fn var_index(n_agents: usize, report: Signal, n: usize) -> usize {
    report.bit() * n_agents + n
}

/// A pure strategy profile up to permutation of the agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ProfileCounts {
    pub neg: usize,
    pub pos: usize,
    pub honest: usize,
    pub lie: usize,
}

impl ProfileCounts {
    pub fn new(neg: usize, pos: usize, honest: usize, lie: usize) -> ProfileCounts {
        ProfileCounts {
            neg,
            pos,
            honest,
            lie,
        }
    }

    /// Everybody follows `strategy`.
    pub fn symmetric(strategy: Strategy, n: usize) -> ProfileCounts {
        ProfileCounts::default().with_added(strategy, n)
    }

    pub fn honest(n: usize) -> ProfileCounts {
        ProfileCounts::symmetric(Strategy::Honest, n)
    }

    pub fn total(&self) -> usize {
        self.neg + self.pos + self.honest + self.lie
    }

    pub fn count(&self, strategy: Strategy) -> usize {
        match strategy {
            Strategy::AlwaysNegative => self.neg,
            Strategy::AlwaysPositive => self.pos,
            Strategy::Honest => self.honest,
            Strategy::Lie => self.lie,
        }
    }

    fn slot(&mut self, strategy: Strategy) -> &mut usize {
        match strategy {
            Strategy::AlwaysNegative => &mut self.neg,
            Strategy::AlwaysPositive => &mut self.pos,
            Strategy::Honest => &mut self.honest,
            Strategy::Lie => &mut self.lie,
        }
    }

    pub fn with_added(mut self, strategy: Strategy, k: usize) -> ProfileCounts {
        *self.slot(strategy) += k;
        self
    }

    /// The profile with one `strategy` agent removed, if there is one.
    pub fn without_one(mut self, strategy: Strategy) -> Option<ProfileCounts> {
        let slot = self.slot(strategy);
        *slot = slot.checked_sub(1)?;
        Some(self)
    }

    /// Nonempty groups in field order.
    pub fn groups(&self) -> impl Iterator<Item = (Strategy, usize)> + '_ {
        Strategy::ALL
            .into_iter()
            .map(|s| (s, self.count(s)))
            .filter(|&(_, k)| k > 0)
    }

    pub fn is_all_honest(&self) -> bool {
        self.honest == self.total()
    }

    /// Every profile of `population` agents, in lexicographic order of
    /// `(neg, pos, honest, lie)`.
    pub fn enumerate(population: usize) -> Vec<ProfileCounts> {
        let mut out = Vec::new();
        for neg in 0..=population {
            for pos in 0..=population - neg {
                for honest in 0..=population - neg - pos {
                    let lie = population - neg - pos - honest;
                    out.push(ProfileCounts::new(neg, pos, honest, lie));
                }
            }
        }
        out
    }
}

impl fmt::Display for ProfileCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.neg, self.pos, self.honest, self.lie)
    }
}

/// Distribution of positive reports among `others`, for an agent that
/// observed `obs`.
pub fn report_count_distribution(
    world: &World,
    obs: Signal,
    others: &ProfileCounts,
) -> Result<SignalDistribution, WorldError> {
    let belief = beliefs::posterior(world, obs)?;
    let m = others.total();
    let mut out = SignalDistribution::new(vec![Q::zero(); m + 1]);
    for (w, p) in belief.weights().iter().zip(world.high_prob()) {
        if w.is_zero() {
            continue;
        }
        let honest = beliefs::binomial_pmf(p, others.honest);
        let liars = beliefs::binomial_pmf(p, others.lie).reversed();
        let mut mass = honest.convolve(&liars).shifted(others.pos).into_mass();
        mass.resize(m + 1, Q::zero());
        out.add_scaled(w, &SignalDistribution::new(mass));
    }
    Ok(out)
}

fn check_population(scheme_agents: usize, others: &ProfileCounts) -> Result<(), SchemeError> {
    if others.total() + 1 != scheme_agents {
        return Err(SchemeError::DimensionMismatch {
            expected: scheme_agents - 1,
            found: others.total(),
        });
    }
    Ok(())
}

/// Payment for filing `report` after observing `obs`, as a form over the table.
pub fn payoff_form(
    world: &World,
    n_agents: usize,
    report: Signal,
    others: &ProfileCounts,
    obs: Signal,
) -> Result<LinearForm, SchemeError> {
    check_population(n_agents, others)?;
    let dist = report_count_distribution(world, obs, others)?;
    let mut form = LinearForm::zeros(2 * n_agents);
    for (x, w) in dist.mass().iter().enumerate() {
        form.add_at(var_index(n_agents, report, x), w);
    }
    Ok(form)
}

/// Expected payment of an agent playing `strategy` after observing `obs`.
pub fn expected_payoff(
    scheme: &PaymentScheme,
    world: &World,
    strategy: Strategy,
    others: &ProfileCounts,
    obs: Signal,
) -> Result<Q, SchemeError> {
    let form = payoff_form(world, scheme.n_agents(), strategy.report(obs), others, obs)?;
    Ok(form.eval(&scheme.values()))
}

/// Ex-ante value of playing `strategy` against `others`: the payoff averaged
/// over the agent's own observation.
pub fn group_value_form(
    world: &World,
    n_agents: usize,
    strategy: Strategy,
    others: &ProfileCounts,
) -> Result<LinearForm, SchemeError> {
    let prior = beliefs::signal_prior(world);
    let mut form = LinearForm::zeros(2 * n_agents);
    for obs in Signal::BOTH {
        let weight = &prior[obs.bit()];
        if weight.is_zero() {
            continue;
        }
        let part = payoff_form(world, n_agents, strategy.report(obs), others, obs)?;
        form.add_scaled(weight, &part);
    }
    Ok(form)
}

/// Expected payment to an honest reporter when everybody is honest.
pub fn honest_value_form(world: &World, n_agents: usize) -> Result<LinearForm, SchemeError> {
    group_value_form(world, n_agents, Strategy::Honest, &ProfileCounts::honest(n_agents - 1))
}

pub fn honest_expected_value(scheme: &PaymentScheme, world: &World) -> Result<Q, SchemeError> {
    Ok(honest_value_form(world, scheme.n_agents())?.eval(&scheme.values()))
}

/// Expected payment to a liar when everybody lies.
pub fn lying_value_form(world: &World, n_agents: usize) -> Result<LinearForm, SchemeError> {
    let prior = beliefs::signal_prior(world);
    let top = n_agents - 1;
    let mut form = LinearForm::zeros(2 * n_agents);
    for obs in Signal::BOTH {
        if prior[obs.bit()].is_zero() {
            continue;
        }
        let dist = beliefs::reference_given(world, obs, top)?;
        for (n, w) in dist.mass().iter().enumerate() {
            let coeff = w * &prior[obs.bit()];
            form.add_at(var_index(n_agents, obs.flip(), top - n), &coeff);
        }
    }
    Ok(form)
}

pub fn lying_profile_value(scheme: &PaymentScheme, world: &World) -> Result<Q, SchemeError> {
    Ok(lying_value_form(world, scheme.n_agents())?.eval(&scheme.values()))
}

/// Expected total payment to all `N` agents when everybody is honest.
pub fn total_budget_form(world: &World, n_agents: usize) -> Result<LinearForm, SchemeError> {
    let prior_belief = beliefs::Belief::new(world.prior().to_vec());
    let dist = beliefs::reference_distribution(world, &prior_belief, n_agents);
    let mut form = LinearForm::zeros(2 * n_agents);
    for (n, w) in dist.mass().iter().enumerate() {
        if n > 0 {
            let coeff = w * Q::from_integer(n.into());
            form.add_at(var_index(n_agents, Signal::High, n - 1), &coeff);
        }
        if n < n_agents {
            let coeff = w * Q::from_integer((n_agents - n).into());
            form.add_at(var_index(n_agents, Signal::Low, n), &coeff);
        }
    }
    Ok(form)
}

pub fn total_budget(scheme: &PaymentScheme, world: &World) -> Result<Q, SchemeError> {
    Ok(total_budget_form(world, scheme.n_agents())?.eval(&scheme.values()))
}

/// Expected summed payment to a coalition of `n_col` identities that saw
/// `high` high signals and files `reported` positive reports, the other
/// agents being honest.
pub fn coalition_revenue_form(
    world: &World,
    n_agents: usize,
    n_col: usize,
    high: usize,
    reported: usize,
) -> Result<LinearForm, SchemeError> {
    if n_col == 0 || n_col > n_agents || high > n_col || reported > n_col {
        return Err(SchemeError::InvalidCoalition(format!(
            "coalition of {n_col} among {n_agents} agents with counts {high}/{reported}"
        )));
    }
    let outsiders = n_agents - n_col;
    let belief = beliefs::posterior_given_counts(world, high, n_col)?;
    let dist = beliefs::reference_distribution(world, &belief, outsiders);
    let positive = Q::from_integer(reported.into());
    let negative = Q::from_integer((n_col - reported).into());
    let mut form = LinearForm::zeros(2 * n_agents);
    for (n, w) in dist.mass().iter().enumerate() {
        if reported > 0 {
            form.add_at(var_index(n_agents, Signal::High, reported - 1 + n), &(w * &positive));
        }
        if reported < n_col {
            form.add_at(var_index(n_agents, Signal::Low, reported + n), &(w * &negative));
        }
    }
    Ok(form)
}

pub fn coalition_revenue(
    scheme: &PaymentScheme,
    world: &World,
    n_col: usize,
    high: usize,
    reported: usize,
) -> Result<Q, SchemeError> {
    let form = coalition_revenue_form(world, scheme.n_agents(), n_col, high, reported)?;
    Ok(form.eval(&scheme.values()))
}
