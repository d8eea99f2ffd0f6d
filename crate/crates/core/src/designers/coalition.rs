//! Designers against coalitions whose colluders face honest outsiders:
//! honesty as a dominant strategy, and sybil coalitions that maximise their
//! summed payment.

use crate::beliefs::{Signal, World};
use crate::error::DesignError;
use crate::exact::Q;
use crate::lp::LinearProgram;
use crate::mechanism;
use crate::verifier;

use super::symmetric::wrong_scenario;
use super::{objective_form, solve_plain, Design, DesignRequest, Scenario, Space};

/// Honesty beats flipping by at least `Λ` for each colluder, whatever the
/// other `n_col - 1` colluders report.
pub fn design_dominant(req: &DesignRequest) -> Result<Design, DesignError> {
    let Scenario::Dominant { n_col } = req.scenario else {
        return Err(wrong_scenario(req, "dominant"));
    };
    req.validate()?;
    req.require_coalition(n_col, req.n_agents)?;
    let space = Space::full(req.n_agents);
    let mut lp = space.program(&objective_form(req)?);
    for c in 0..n_col {
        for obs in Signal::BOTH {
            let gap = verifier::dominance_gap_form(&req.world, req.n_agents, n_col, c, obs)?;
            lp.push(space.at_least(&gap, &req.margin, format!("dominant[c={c}, {obs}]")));
        }
    }
    solve_plain(req, &space, &lp)
}

/// A coalition controlling `n_col` reports earns the most, by at least `Λ`,
/// by reporting exactly as many positives as it observed.
pub fn design_sybil(req: &DesignRequest) -> Result<Design, DesignError> {
    let Scenario::Sybil { n_col } = req.scenario else {
        return Err(wrong_scenario(req, "sybil"));
    };
    req.validate()?;
    req.require_coalition(n_col, req.n_agents - 1)?;
    let space = Space::full(req.n_agents);
    let lp = sybil_program(req, n_col, &space)?;
    solve_plain(req, &space, &lp)
}

fn sybil_program(req: &DesignRequest, n_col: usize, space: &Space) -> Result<LinearProgram, DesignError> {
    let mut lp = space.program(&objective_form(req)?);
    for c in 0..=n_col {
        let truthful = mechanism::coalition_revenue_form(&req.world, req.n_agents, n_col, c, c)?;
        for r in (0..=n_col).filter(|&r| r != c) {
            let other = mechanism::coalition_revenue_form(&req.world, req.n_agents, n_col, c, r)?;
            lp.push(space.at_least(&(&truthful - &other), &req.margin, format!("sybil[c={c}, r={r}]")));
        }
    }
    Ok(lp)
}

/// Coalition scenarios with a size bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoalitionScenario {
    Dominant,
    Sybil,
}

/// Largest coalition the scenario can resist on this instance, scanning
/// down from `⌊N/2⌋` (dominant) or `N - 1` (sybil). Zero when none works.
pub fn max_coalition(
    world: &World,
    n_agents: usize,
    margin: &Q,
    scenario: CoalitionScenario,
) -> Result<usize, DesignError> {
    let top = match scenario {
        CoalitionScenario::Dominant => n_agents / 2,
        CoalitionScenario::Sybil => n_agents.saturating_sub(1),
    };
    for n_col in (1..=top).rev() {
        let s = match scenario {
            CoalitionScenario::Dominant => Scenario::Dominant { n_col },
            CoalitionScenario::Sybil => Scenario::Sybil { n_col },
        };
        let req = DesignRequest::new(world.clone(), n_agents, s).with_margin(margin.clone());
        match super::design(&req) {
            Ok(_) => return Ok(n_col),
            Err(e) if e.is_infeasible() => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(0)
}
