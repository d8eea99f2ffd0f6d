//! Payment-scheme designers, one per collusion scenario.
//!
//! Every designer minimises the expected payment to an honest reporter (or
//! the total budget, which is `N` times that) subject to incentive
//! compatibility with margin `Λ` plus the scenario's collusion constraints.
//! Strict inequalities are closed with the request's `delta`, except the
//! consensus constraints of the symmetric designers, which carry the small
//! payment `epsilon`.

mod closed_form;
mod coalition;
mod family;
mod symmetric;

use std::fmt;

use num_traits::Zero;

use crate::beliefs::{Signal, World};
use crate::error::DesignError;
use crate::exact::{self, Q};
use crate::form::LinearForm;
use crate::lp::{self, Constraint, DisjunctiveProgram, LinearProgram, Solution, Status};
use crate::mechanism::{self, PaymentScheme, ProfileCounts, Strategy};

pub use closed_form::{
    closed_form_optimal_ic, closed_form_sybil, closed_form_unique_symmetric, unique_branch_conditions, BranchConditions,
    UniqueBranch,
};
pub use coalition::{design_dominant, design_sybil, max_coalition, CoalitionScenario};
pub use family::{design_full_asymmetric_pareto, design_partial_asymmetric, residual_profiles, FULL_TABLE_MAX_AGENTS};
pub use symmetric::{design_optimal_ic, design_pareto_symmetric, design_partial_symmetric, design_unique_symmetric};

/// Which equilibrium guarantee a collusion-resistant designer enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Honest reporting is the only equilibrium among the considered profiles.
    Unique,
    /// No considered lying equilibrium makes every colluder better off.
    Pareto,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Unique => "unique",
            Mode::Pareto => "pareto",
        }
    }
}

/// What the designer minimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Objective {
    /// Expected payment to one honest reporter.
    #[default]
    PerReport,
    /// Expected payment to all `N` honest reporters.
    TotalBudget,
}

/// Proper scoring rule behind the closed-form sybil scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ScoringRule {
    #[default]
    Quadratic,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    OptimalIc,
    UniqueSymmetric,
    ParetoSymmetric,
    FullAsymmetricPareto,
    PartialSymmetric { n_col: usize, mode: Mode },
    PartialAsymmetric { n_col: usize, mode: Mode },
    Dominant { n_col: usize },
    Sybil { n_col: usize },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::OptimalIc => "optimal-ic",
            Scenario::UniqueSymmetric => "unique-symmetric",
            Scenario::ParetoSymmetric => "pareto-symmetric",
            Scenario::FullAsymmetricPareto => "full-asymmetric-pareto",
            Scenario::PartialSymmetric { .. } => "partial-symmetric",
            Scenario::PartialAsymmetric { .. } => "partial-asymmetric",
            Scenario::Dominant { .. } => "dominant",
            Scenario::Sybil { .. } => "sybil",
        }
    }

    pub fn n_col(&self) -> Option<usize> {
        match *self {
            Scenario::PartialSymmetric { n_col, .. }
            | Scenario::PartialAsymmetric { n_col, .. }
            | Scenario::Dominant { n_col }
            | Scenario::Sybil { n_col } => Some(n_col),
            _ => None,
        }
    }

    pub fn mode(&self) -> Option<Mode> {
        match *self {
            Scenario::PartialSymmetric { mode, .. } | Scenario::PartialAsymmetric { mode, .. } => Some(mode),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        if let Some(k) = self.n_col() {
            write!(f, "(n_col={k}")?;
            if let Some(m) = self.mode() {
                write!(f, ", {}", m.name())?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Everything a designer needs. Build with [`DesignRequest::new`] and the
/// `with_*` methods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignRequest {
    pub world: World,
    pub n_agents: usize,
    pub scenario: Scenario,
    /// Minimum expected loss from misreporting (`Λ`).
    pub margin: Q,
    /// Small consensus payment (`ε`).
    pub epsilon: Q,
    /// Slack that closes strict inequalities (`δ`).
    pub delta: Q,
    pub objective: Objective,
    /// Partial asymmetric collusion only: optimise every table entry over
    /// all colluder profiles instead of the two-parameter family.
    pub full_table: bool,
}

impl DesignRequest {
    /// Defaults: `Λ = 1`, `ε = Λ/1000`, `δ = 0`, per-report objective.
    pub fn new(world: World, n_agents: usize, scenario: Scenario) -> DesignRequest {
        DesignRequest {
            world,
            n_agents,
            scenario,
            margin: exact::int(1),
            epsilon: exact::ratio(1, 1000),
            delta: Q::zero(),
            objective: Objective::PerReport,
            full_table: false,
        }
    }

    /// Sets `Λ` and resets `ε` to `Λ/1000`.
    pub fn with_margin(mut self, margin: Q) -> DesignRequest {
        self.epsilon = &margin / exact::int(1000);
        self.margin = margin;
        self
    }

    pub fn with_epsilon(mut self, epsilon: Q) -> DesignRequest {
        self.epsilon = epsilon;
        self
    }

    pub fn with_delta(mut self, delta: Q) -> DesignRequest {
        self.delta = delta;
        self
    }

    pub fn with_objective(mut self, objective: Objective) -> DesignRequest {
        self.objective = objective;
        self
    }

    pub fn with_full_table(mut self, full_table: bool) -> DesignRequest {
        self.full_table = full_table;
        self
    }

    pub fn with_scenario(mut self, scenario: Scenario) -> DesignRequest {
        self.scenario = scenario;
        self
    }

    /// Checks the request-level invariants shared by all scenarios.
    pub fn validate(&self) -> Result<(), DesignError> {
        if self.n_agents < 2 {
            return Err(DesignError::TooFewAgents {
                scenario: self.scenario.name(),
                n: self.n_agents,
                min: 2,
            });
        }
        if self.margin < Q::zero() {
            return Err(DesignError::InvalidRequest("the margin must be nonnegative".into()));
        }
        if self.epsilon < Q::zero() || self.delta < Q::zero() {
            return Err(DesignError::InvalidRequest("epsilon and delta must be nonnegative".into()));
        }
        let degenerate_zero = self.margin.is_zero() && self.epsilon.is_zero();
        if !degenerate_zero && self.epsilon >= self.margin {
            return Err(DesignError::InvalidRequest(format!(
                "epsilon {} must be smaller than the margin {}",
                exact::to_exact_string(&self.epsilon),
                exact::to_exact_string(&self.margin)
            )));
        }
        if self.full_table && !matches!(self.scenario, Scenario::PartialAsymmetric { .. }) {
            return Err(DesignError::InvalidRequest(
                "the full-table option applies to partial asymmetric collusion only".into(),
            ));
        }
        self.world
            .require_interior()
            .map_err(|e| DesignError::DegenerateWorld(e.to_string()))
    }

    fn require_agents(&self, min: usize) -> Result<(), DesignError> {
        if self.n_agents < min {
            return Err(DesignError::TooFewAgents {
                scenario: self.scenario.name(),
                n: self.n_agents,
                min,
            });
        }
        Ok(())
    }

    /// Checks `1 <= n_col <= max`.
    fn require_coalition(&self, n_col: usize, max: usize) -> Result<(), DesignError> {
        if n_col == 0 || n_col > max {
            return Err(DesignError::InvalidRequest(format!(
                "{} needs 1 <= n_col <= {max}, got {n_col}",
                self.scenario.name()
            )));
        }
        Ok(())
    }
}

/// A designed scheme and how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    pub scenario: Scenario,
    pub scheme: PaymentScheme,
    /// Expected payment to one honest reporter.
    pub cost: Q,
    /// Value of the minimised objective.
    pub objective: Q,
    /// Per disjunctive group, the index of the alternative in force.
    pub chosen_disjuncts: Vec<usize>,
}

/// Runs the designer for `req.scenario`.
pub fn design(req: &DesignRequest) -> Result<Design, DesignError> {
    match req.scenario {
        Scenario::OptimalIc => design_optimal_ic(req),
        Scenario::UniqueSymmetric => design_unique_symmetric(req),
        Scenario::ParetoSymmetric => design_pareto_symmetric(req),
        Scenario::FullAsymmetricPareto => design_full_asymmetric_pareto(req),
        Scenario::PartialSymmetric { .. } => design_partial_symmetric(req),
        Scenario::PartialAsymmetric { .. } => design_partial_asymmetric(req),
        Scenario::Dominant { .. } => design_dominant(req),
        Scenario::Sybil { .. } => design_sybil(req),
    }
}

/// Honest payoff minus flipped payoff for an honest agent among honest
/// peers: the incentive-compatibility constraint for observation `obs`.
pub fn ic_form(world: &World, n_agents: usize, obs: Signal) -> Result<LinearForm, DesignError> {
    let others = ProfileCounts::honest(n_agents - 1);
    let keep = mechanism::payoff_form(world, n_agents, obs, &others, obs)?;
    let flip = mechanism::payoff_form(world, n_agents, obs.flip(), &others, obs)?;
    Ok(&keep - &flip)
}

/// Gain from flipping the report `strategy` prescribes after observing
/// `obs`, against `others`.
pub fn deviation_gain_form(
    world: &World,
    n_agents: usize,
    strategy: Strategy,
    others: &ProfileCounts,
    obs: Signal,
) -> Result<LinearForm, DesignError> {
    let prescribed = strategy.report(obs);
    let keep = mechanism::payoff_form(world, n_agents, prescribed, others, obs)?;
    let flip = mechanism::payoff_form(world, n_agents, prescribed.flip(), others, obs)?;
    Ok(&flip - &keep)
}

fn objective_form(req: &DesignRequest) -> Result<LinearForm, DesignError> {
    Ok(match req.objective {
        Objective::PerReport => mechanism::honest_value_form(&req.world, req.n_agents)?,
        Objective::TotalBudget => mechanism::total_budget_form(&req.world, req.n_agents)?,
    })
}

/// The variables a designer optimises over: either the whole table or an
/// affine family `table = offset + Σ z_k e_{index_k}`.
#[derive(Debug, Clone)]
pub(crate) struct Space {
    offset: Vec<Q>,
    /// `None` for the full table, otherwise the table index of each parameter.
    params: Option<Vec<usize>>,
}

impl Space {
    pub(crate) fn full(n_agents: usize) -> Space {
        Space {
            offset: vec![Q::zero(); 2 * n_agents],
            params: None,
        }
    }

    pub(crate) fn family(offset: Vec<Q>, params: Vec<usize>) -> Space {
        Space {
            offset,
            params: Some(params),
        }
    }

    /// Coefficients over the space's variables and the constant part.
    fn reduce(&self, form: &LinearForm) -> (Vec<Q>, Q) {
        match &self.params {
            None => (form.coeffs().to_vec(), Q::zero()),
            Some(indices) => (
                indices.iter().map(|&i| form.coeffs()[i].clone()).collect(),
                form.eval(&self.offset),
            ),
        }
    }

    /// `form >= rhs` in the space's variables.
    pub(crate) fn at_least(&self, form: &LinearForm, rhs: &Q, label: impl Into<String>) -> Constraint {
        let (coeffs, constant) = self.reduce(form);
        Constraint::ge(coeffs, rhs - constant).labeled(label)
    }

    pub(crate) fn program(&self, objective: &LinearForm) -> LinearProgram {
        LinearProgram::new(self.reduce(objective).0)
    }

    fn table(&self, values: &[Q]) -> Vec<Q> {
        match &self.params {
            None => values.to_vec(),
            Some(indices) => {
                let mut table = self.offset.clone();
                for (&i, v) in indices.iter().zip(values) {
                    table[i] += v;
                }
                table
            }
        }
    }
}

/// Base program shared by all designers: the objective and both IC rows.
fn ic_program(req: &DesignRequest, space: &Space) -> Result<LinearProgram, DesignError> {
    let mut lp = space.program(&objective_form(req)?);
    for obs in Signal::BOTH {
        let form = ic_form(&req.world, req.n_agents, obs)?;
        lp.push(space.at_least(&form, &req.margin, format!("ic[{obs}]")));
    }
    Ok(lp)
}

fn finish(req: &DesignRequest, space: &Space, solution: Solution) -> Result<Design, DesignError> {
    match solution.status {
        Status::Optimal => {}
        Status::Infeasible => {
            return Err(DesignError::Infeasible {
                scenario: req.scenario.to_string(),
            })
        }
        Status::Unbounded => {
            return Err(DesignError::InternalContradiction(format!(
                "{} is unbounded below with nonnegative payments",
                req.scenario
            )))
        }
    }
    let table = space.table(&solution.values);
    let scheme = PaymentScheme::from_values(req.n_agents, &table)?;
    let cost = mechanism::honest_expected_value(&scheme, &req.world)?;
    let objective = objective_form(req)?.eval(&table);
    Ok(Design {
        scenario: req.scenario,
        scheme,
        cost,
        objective,
        chosen_disjuncts: solution.chosen_disjuncts,
    })
}

fn solve_plain(req: &DesignRequest, space: &Space, lp: &LinearProgram) -> Result<Design, DesignError> {
    finish(req, space, lp::solve_lp(lp)?)
}

fn solve_enumerated(req: &DesignRequest, space: &Space, dp: &DisjunctiveProgram) -> Result<Design, DesignError> {
    finish(req, space, lp::solve_disjunctive(dp, lp::DEFAULT_GUARD)?)
}

fn solve_branching(req: &DesignRequest, space: &Space, dp: &DisjunctiveProgram) -> Result<Design, DesignError> {
    finish(req, space, lp::solve_disjunctive_lazy(dp, lp::DEFAULT_GUARD)?)
}

/// Alternatives that stop `profile` (plus `outsiders` honest agents) from
/// being an equilibrium of its strategic agents: some group gains at least
/// `delta` by flipping after some observation. In Pareto mode, also: some
/// group's ex-ante value falls at least `delta` short of `honest_value`.
fn breaking_disjuncts(
    req: &DesignRequest,
    space: &Space,
    profile: &ProfileCounts,
    outsiders: usize,
    mode: Mode,
    honest_value: &LinearForm,
) -> Result<Vec<lp::Disjunct>, DesignError> {
    let full = profile.with_added(Strategy::Honest, outsiders);
    let mut out = Vec::new();
    for (strategy, _) in profile.groups() {
        let others = full.without_one(strategy).expect("nonempty group");
        for obs in Signal::BOTH {
            let gain = deviation_gain_form(&req.world, req.n_agents, strategy, &others, obs)?;
            out.push(vec![space.at_least(&gain, &req.delta, format!("{profile} {strategy} flips on {obs}"))]);
        }
    }
    if mode == Mode::Pareto {
        for (strategy, _) in profile.groups() {
            let others = full.without_one(strategy).expect("nonempty group");
            let value = mechanism::group_value_form(&req.world, req.n_agents, strategy, &others)?;
            let shortfall = honest_value - &value;
            out.push(vec![space.at_least(&shortfall, &req.delta, format!("{profile} {strategy} below honest"))]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn plumber() -> World {
        World::new(vec![ratio(4, 5), ratio(1, 5)], vec![ratio(9, 10), ratio(3, 20)]).unwrap()
    }

    #[test]
    fn request_defaults_and_validation() {
        let req = DesignRequest::new(plumber(), 4, Scenario::OptimalIc);
        assert_eq!(req.epsilon, ratio(1, 1000));
        assert!(req.validate().is_ok());
        let req = req.with_margin(int(2));
        assert_eq!(req.epsilon, ratio(1, 500));
        let bad = req.clone().with_epsilon(int(3));
        assert_eq!(bad.validate().unwrap_err().code(), "InvalidRequest");
        let bad = req.clone().with_full_table(true);
        assert_eq!(bad.validate().unwrap_err().code(), "InvalidRequest");
        let zero = DesignRequest::new(plumber(), 4, Scenario::OptimalIc).with_margin(int(0));
        assert!(zero.validate().is_ok());
        let single = World::new(vec![int(1)], vec![ratio(1, 2)]).unwrap();
        let err = DesignRequest::new(single, 4, Scenario::OptimalIc).validate().unwrap_err();
        assert_eq!(err.code(), "DegenerateWorld");
    }

    #[test]
    fn scenario_names() {
        let s = Scenario::PartialAsymmetric {
            n_col: 2,
            mode: Mode::Pareto,
        };
        assert_eq!(s.to_string(), "partial-asymmetric(n_col=2, pareto)");
        assert_eq!(Scenario::Dominant { n_col: 3 }.to_string(), "dominant(n_col=3)");
        assert_eq!(Scenario::OptimalIc.to_string(), "optimal-ic");
    }

    #[test]
    fn family_space_reduces_forms() {
        let space = Space::family(vec![int(1), int(0), int(0), int(2)], vec![1, 2]);
        let form = LinearForm::from_coeffs(vec![int(3), int(5), int(7), int(11)]);
        let c = space.at_least(&form, &int(40), "f");
        assert_eq!(c.coeffs, vec![int(5), int(7)]);
        assert_eq!(c.rhs, int(40 - 3 - 22));
        assert_eq!(space.table(&[int(1), int(2)]), vec![int(1), int(1), int(2), int(2)]);
    }
}
