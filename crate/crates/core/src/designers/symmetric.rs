//! Designers over the whole payment table: plain incentive compatibility and
//! resistance to symmetric collusion.

use crate::beliefs::Signal;
use crate::error::DesignError;
use crate::exact::{int, Q};
use crate::lp::{Constraint, DisjunctiveProgram};
use crate::mechanism::{self, var_index, ProfileCounts, Strategy};

use super::{
    breaking_disjuncts, deviation_gain_form, ic_program, solve_enumerated, solve_plain, Design,
    DesignRequest, Scenario, Space,
};

pub(crate) fn expect_scenario(req: &DesignRequest, ok: bool, name: &str) -> Result<(), DesignError> {
    if ok {
        Ok(())
    } else {
        Err(wrong_scenario(req, name))
    }
}

pub(crate) fn wrong_scenario(req: &DesignRequest, name: &str) -> DesignError {
    DesignError::InvalidRequest(format!("{name} designer called for {}", req.scenario))
}

/// Cheapest incentive-compatible scheme.
pub fn design_optimal_ic(req: &DesignRequest) -> Result<Design, DesignError> {
    expect_scenario(req, req.scenario == Scenario::OptimalIc, "optimal-ic")?;
    req.validate()?;
    optimal_ic_unchecked(req)
}

pub(crate) fn optimal_ic_unchecked(req: &DesignRequest) -> Result<Design, DesignError> {
    let space = Space::full(req.n_agents);
    let lp = ic_program(req, &space)?;
    match solve_plain(req, &space, &lp) {
        Err(DesignError::Infeasible { .. }) => Err(DesignError::InternalContradiction(
            "incentive compatibility is infeasible on an interior world".into(),
        )),
        other => other,
    }
}

fn unit(n_agents: usize, report: Signal, n: usize) -> Vec<Q> {
    let mut row = vec![int(0); 2 * n_agents];
    row[var_index(n_agents, report, n)] = int(1);
    row
}

/// `τ(a) - τ(b)` as coefficients.
fn difference(n_agents: usize, a: (Signal, usize), b: (Signal, usize)) -> Vec<Q> {
    let mut row = unit(n_agents, a.0, a.1);
    row[var_index(n_agents, b.0, b.1)] -= int(1);
    row
}

/// Disjuncts making the all-lie profile unstable: a liar who observed low
/// (first) or high (second) gains at least `delta` by telling the truth.
fn all_lie_breakers(req: &DesignRequest, space: &Space) -> Result<Vec<Vec<Constraint>>, DesignError> {
    let others = ProfileCounts::symmetric(Strategy::Lie, req.n_agents - 1);
    Signal::BOTH
        .into_iter()
        .map(|obs| {
            let gain = deviation_gain_form(&req.world, req.n_agents, Strategy::Lie, &others, obs)?;
            Ok(vec![space.at_least(&gain, &req.delta, format!("all-lie flips on {obs}"))])
        })
        .collect()
}

/// Honest reporting as the only symmetric pure equilibrium (`N >= 4`).
pub fn design_unique_symmetric(req: &DesignRequest) -> Result<Design, DesignError> {
    expect_scenario(req, req.scenario == Scenario::UniqueSymmetric, "unique-symmetric")?;
    req.require_agents(4)?;
    req.validate()?;
    let n = req.n_agents;
    let space = Space::full(n);
    let mut lp = ic_program(req, &space)?;
    // All-positive: prefer reporting low at full consensus.
    lp.push(
        Constraint::ge(difference(n, (Signal::Low, n - 1), (Signal::High, n - 1)), req.epsilon.clone())
            .labeled("all-pos flips"),
    );
    // All-negative: prefer reporting high when nobody else does.
    lp.push(Constraint::ge(difference(n, (Signal::High, 0), (Signal::Low, 0)), req.epsilon.clone()).labeled("all-neg flips"));
    let mut dp = DisjunctiveProgram::new(lp);
    dp.push_group(all_lie_breakers(req, &space)?);
    solve_enumerated(req, &space, &dp)
}

/// Honest reporting as a Pareto-optimal symmetric equilibrium.
pub fn design_pareto_symmetric(req: &DesignRequest) -> Result<Design, DesignError> {
    expect_scenario(req, req.scenario == Scenario::ParetoSymmetric, "pareto-symmetric")?;
    req.validate()?;
    let n = req.n_agents;
    let space = Space::full(n);
    let honest = mechanism::honest_value_form(&req.world, n)?;
    let mut lp = ic_program(req, &space)?;
    // Consensus payments stay at least epsilon below the honest value, so the
    // constant profiles never dominate.
    for (report, count, label) in [(Signal::High, n - 1, "all-pos cap"), (Signal::Low, 0, "all-neg cap")] {
        let mut cap = honest.clone();
        cap.add_at(var_index(n, report, count), &int(-1));
        lp.push(space.at_least(&cap, &req.epsilon, label));
    }
    let mut group = all_lie_breakers(req, &space)?;
    let lying = mechanism::lying_value_form(&req.world, n)?;
    group.push(vec![space.at_least(&(&honest - &lying), &req.delta, "all-lie below honest")]);
    let mut dp = DisjunctiveProgram::new(lp);
    dp.push_group(group);
    solve_enumerated(req, &space, &dp)
}

/// `n_col` colluders restricted to symmetric strategies, the other agents
/// honest. Unique mode breaks every symmetric lying collusion; Pareto mode
/// alternatively keeps its colluders below the honest value.
pub fn design_partial_symmetric(req: &DesignRequest) -> Result<Design, DesignError> {
    let Scenario::PartialSymmetric { n_col, mode } = req.scenario else {
        return Err(wrong_scenario(req, "partial-symmetric"));
    };
    req.validate()?;
    req.require_coalition(n_col, req.n_agents - 1)?;
    let space = Space::full(req.n_agents);
    let honest = mechanism::honest_value_form(&req.world, req.n_agents)?;
    let mut dp = DisjunctiveProgram::new(ic_program(req, &space)?);
    let outsiders = req.n_agents - n_col;
    for strategy in [Strategy::AlwaysPositive, Strategy::AlwaysNegative, Strategy::Lie] {
        let profile = ProfileCounts::symmetric(strategy, n_col);
        dp.push_group(breaking_disjuncts(req, &space, &profile, outsiders, mode, &honest)?);
    }
    solve_enumerated(req, &space, &dp)
}
