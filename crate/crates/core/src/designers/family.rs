//! Designers for asymmetric collusion.
//!
//! The default is the two-parameter family that pays `x` for a negative
//! report when exactly one reference report is positive, `y` for a positive
//! report when exactly one is negative, and `ε` for either consensus. Within
//! this family only three lying profiles can still be equilibria (all lie;
//! one always-negative agent and the rest lying; one always-positive agent
//! and the rest lying), so the design problem stays small for every `N`.

use crate::beliefs::Signal;
use crate::error::DesignError;
use crate::exact::Q;
use crate::lp::DisjunctiveProgram;
use crate::mechanism::{self, var_index, ProfileCounts, Strategy};

use super::symmetric::wrong_scenario;
use super::{breaking_disjuncts, ic_program, solve_branching, solve_enumerated, Design, DesignRequest, Mode, Scenario, Space};

/// Largest population for which the full-table design is allowed.
pub const FULL_TABLE_MAX_AGENTS: usize = 6;

/// The lying profiles of `n_col` colluders that the two-parameter family
/// cannot rule out structurally.
pub fn residual_profiles(n_col: usize) -> [ProfileCounts; 3] {
    let rest = n_col - 1;
    [
        ProfileCounts::symmetric(Strategy::Lie, n_col),
        ProfileCounts::new(1, 0, 0, rest),
        ProfileCounts::new(0, 1, 0, rest),
    ]
}

fn family_space(req: &DesignRequest) -> Space {
    let n = req.n_agents;
    let mut offset = vec![Q::from_integer(0.into()); 2 * n];
    offset[var_index(n, Signal::Low, 0)] = req.epsilon.clone();
    offset[var_index(n, Signal::High, n - 1)] = req.epsilon.clone();
    Space::family(offset, vec![var_index(n, Signal::Low, 1), var_index(n, Signal::High, n - 2)])
}

fn design_family(req: &DesignRequest, n_col: usize, mode: Mode) -> Result<Design, DesignError> {
    let space = family_space(req);
    let honest = mechanism::honest_value_form(&req.world, req.n_agents)?;
    let mut dp = DisjunctiveProgram::new(ic_program(req, &space)?);
    let outsiders = req.n_agents - n_col;
    for profile in residual_profiles(n_col) {
        dp.push_group(breaking_disjuncts(req, &space, &profile, outsiders, mode, &honest)?);
    }
    solve_enumerated(req, &space, &dp)
}

/// Honest reporting as a Pareto-optimal equilibrium when every agent may
/// collude on asymmetric strategies (`N >= 4`).
pub fn design_full_asymmetric_pareto(req: &DesignRequest) -> Result<Design, DesignError> {
    if req.scenario != Scenario::FullAsymmetricPareto {
        return Err(wrong_scenario(req, "full-asymmetric-pareto"));
    }
    req.require_agents(4)?;
    req.validate()?;
    design_family(req, req.n_agents, Mode::Pareto)
}

/// `n_col` colluders on asymmetric strategies, the rest honest (`N >= 4`).
pub fn design_partial_asymmetric(req: &DesignRequest) -> Result<Design, DesignError> {
    let Scenario::PartialAsymmetric { n_col, mode } = req.scenario else {
        return Err(wrong_scenario(req, "partial-asymmetric"));
    };
    req.require_agents(4)?;
    req.validate()?;
    req.require_coalition(n_col, req.n_agents - 1)?;
    if req.full_table {
        design_full_table(req, n_col, mode)
    } else {
        design_family(req, n_col, mode)
    }
}

/// Every table entry free; one disjunctive group per lying colluder profile.
fn design_full_table(req: &DesignRequest, n_col: usize, mode: Mode) -> Result<Design, DesignError> {
    if req.n_agents > FULL_TABLE_MAX_AGENTS {
        return Err(DesignError::InvalidRequest(format!(
            "the full-table design is limited to {FULL_TABLE_MAX_AGENTS} agents, got {}",
            req.n_agents
        )));
    }
    let space = Space::full(req.n_agents);
    let honest = mechanism::honest_value_form(&req.world, req.n_agents)?;
    let mut dp = DisjunctiveProgram::new(ic_program(req, &space)?);
    let outsiders = req.n_agents - n_col;
    for profile in ProfileCounts::enumerate(n_col) {
        if !profile.is_all_honest() {
            dp.push_group(breaking_disjuncts(req, &space, &profile, outsiders, mode, &honest)?);
        }
    }
    solve_branching(req, &space, &dp)
}
