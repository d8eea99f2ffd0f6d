//! Exact linear programming with disjunctive constraint groups.
//!
//! Programs are small and dense, so the engine is a plain two-phase tableau
//! simplex over rationals with Bland's pivoting rule. Disjunctions ("at least
//! one of these constraint sets holds") are handled either by enumerating
//! every selection or by a depth-first branch and bound that only branches
//! on groups the current relaxation violates.

mod disjunctive;
mod simplex;

use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::LpError;
use crate::exact::{self, Q};

pub use disjunctive::{solve_disjunctive, solve_disjunctive_lazy, DEFAULT_GUARD};
pub use simplex::solve_lp;

/// Direction of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// `coeffs · x  relation  rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
    pub label: String,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Constraint {
        Constraint {
            coeffs,
            relation,
            rhs,
            label: String::new(),
        }
    }

    pub fn ge(coeffs: Vec<Q>, rhs: Q) -> Constraint {
        Constraint::new(coeffs, Relation::Ge, rhs)
    }

    pub fn le(coeffs: Vec<Q>, rhs: Q) -> Constraint {
        Constraint::new(coeffs, Relation::Le, rhs)
    }

    pub fn eq(coeffs: Vec<Q>, rhs: Q) -> Constraint {
        Constraint::new(coeffs, Relation::Eq, rhs)
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Constraint {
        self.label = label.into();
        self
    }

    pub fn is_satisfied(&self, x: &[Q]) -> bool {
        self.relation.holds(&exact::dot(&self.coeffs, x), &self.rhs)
    }
}

/// Strict inequality `coeffs · x > rhs` (or `<` when `greater` is false).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrictConstraint {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
    pub greater: bool,
    pub label: String,
}

impl StrictConstraint {
    pub fn greater(coeffs: Vec<Q>, rhs: Q) -> StrictConstraint {
        StrictConstraint {
            coeffs,
            rhs,
            greater: true,
            label: String::new(),
        }
    }

    pub fn less(coeffs: Vec<Q>, rhs: Q) -> StrictConstraint {
        StrictConstraint {
            greater: false,
            ..StrictConstraint::greater(coeffs, rhs)
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> StrictConstraint {
        self.label = label.into();
        self
    }
}

/// Replaces every strict inequality by its closed version with slack
/// `delta`: `a·x > b` becomes `a·x >= b + delta`, `a·x < b` becomes
/// `a·x <= b - delta`.
pub fn close_strict(strict: &[StrictConstraint], delta: &Q) -> Vec<Constraint> {
    strict
        .iter()
        .map(|s| {
            let (relation, rhs) = if s.greater {
                (Relation::Ge, &s.rhs + delta)
            } else {
                (Relation::Le, &s.rhs - delta)
            };
            Constraint::new(s.coeffs.clone(), relation, rhs).labeled(s.label.clone())
        })
        .collect()
}

/// Minimize `objective · x` subject to `constraints` and `x >= lower_bounds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Q>,
    pub var_names: Vec<String>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Q>) -> LinearProgram {
        let n = objective.len();
        LinearProgram {
            num_vars: n,
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![Q::zero(); n],
            var_names: (0..n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> LinearProgram {
        self.var_names = names;
        self
    }

    pub fn push(&mut self, constraint: Constraint) {
        self.constraints.push(constraint);
    }

    pub fn extend(&mut self, constraints: impl IntoIterator<Item = Constraint>) {
        self.constraints.extend(constraints);
    }

    pub(crate) fn validate(&self) -> Result<(), LpError> {
        let bad = |what: String| Err(LpError::MalformedProgram(what));
        if self.objective.len() != self.num_vars {
            return bad(format!("objective has {} coefficients for {} variables", self.objective.len(), self.num_vars));
        }
        if self.lower_bounds.len() != self.num_vars {
            return bad(format!("{} lower bounds for {} variables", self.lower_bounds.len(), self.num_vars));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return bad(format!("constraint {i} has {} coefficients for {} variables", c.coeffs.len(), self.num_vars));
            }
        }
        Ok(())
    }

    /// Every constraint and bound holds exactly at `x`.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        x.len() == self.num_vars
            && x.iter().zip(&self.lower_bounds).all(|(v, lb)| v >= lb)
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    /// Human-readable inequality listing, with 6 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "minimize {}", self.render(&self.objective));
        let _ = writeln!(out, "subject to");
        for c in &self.constraints {
            let _ = writeln!(out, "  {}", self.render_constraint(c));
        }
        let bounds: Vec<String> = self
            .var_names
            .iter()
            .zip(&self.lower_bounds)
            .map(|(name, lb)| format!("{name} >= {}", exact::format_sig(lb, 6)))
            .collect();
        let _ = writeln!(out, "bounds {}", bounds.join(", "));
        out
    }

    fn render(&self, coeffs: &[Q]) -> String {
        let terms: Vec<String> = coeffs
            .iter()
            .zip(&self.var_names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| format!("{} {name}", exact::format_sig(c, 6)))
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ").replace("+ -", "- ")
        }
    }

    fn render_constraint(&self, c: &Constraint) -> String {
        let body = format!("{} {} {}", self.render(&c.coeffs), c.relation.symbol(), exact::format_sig(&c.rhs, 6));
        if c.label.is_empty() {
            body
        } else {
            format!("[{}] {body}", c.label)
        }
    }
}

/// Outcome class of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. `values` and `objective` are meaningful only when
/// `status` is [`Status::Optimal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub status: Status,
    pub values: Vec<Q>,
    pub objective: Q,
    /// For disjunctive solves: per group, the index of the selected disjunct.
    pub chosen_disjuncts: Vec<usize>,
}

impl Solution {
    pub(crate) fn without_point(status: Status) -> Solution {
        Solution {
            status,
            values: Vec::new(),
            objective: Q::zero(),
            chosen_disjuncts: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// One alternative of a disjunctive group: a set of constraints that must
/// hold together.
pub type Disjunct = Vec<Constraint>;

/// A linear program plus groups of alternatives; from every group at least
/// one disjunct must hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveProgram {
    pub base: LinearProgram,
    pub groups: Vec<Vec<Disjunct>>,
}

impl DisjunctiveProgram {
    pub fn new(base: LinearProgram) -> DisjunctiveProgram {
        DisjunctiveProgram {
            base,
            groups: Vec::new(),
        }
    }

    pub fn push_group(&mut self, group: Vec<Disjunct>) {
        self.groups.push(group);
    }

    pub(crate) fn validate(&self) -> Result<(), LpError> {
        self.base.validate()?;
        for (g, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(LpError::MalformedProgram(format!("group {g} has no disjuncts")));
            }
            for c in group.iter().flatten() {
                if c.coeffs.len() != self.base.num_vars {
                    return Err(LpError::MalformedProgram(format!("group {g} has a constraint of the wrong width")));
                }
            }
        }
        Ok(())
    }

    /// Number of disjunct selections, saturating.
    pub fn selection_count(&self) -> u128 {
        self.groups
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128))
    }

    /// Index of the first disjunct of `group` satisfied at `x`.
    pub fn first_satisfied(&self, group: usize, x: &[Q]) -> Option<usize> {
        self.groups[group]
            .iter()
            .position(|d| d.iter().all(|c| c.is_satisfied(x)))
    }

    /// Base constraints plus every group satisfied at `x`.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        self.base.is_feasible(x) && (0..self.groups.len()).all(|g| self.first_satisfied(g, x).is_some())
    }

    pub(crate) fn with_selection(&self, selection: &[Option<usize>]) -> LinearProgram {
        let mut lp = self.base.clone();
        for (group, choice) in self.groups.iter().zip(selection) {
            if let Some(d) = choice {
                lp.extend(group[*d].iter().cloned());
            }
        }
        lp
    }

    pub fn dump(&self) -> String {
        let mut out = self.base.dump();
        for (g, group) in self.groups.iter().enumerate() {
            let _ = writeln!(out, "group {g}: at least one of");
            for (d, disjunct) in group.iter().enumerate() {
                for c in disjunct {
                    let _ = writeln!(out, "  ({d}) {}", self.base.render_constraint(c));
                }
            }
        }
        out
    }
}
