//! Solvers for programs with disjunctive constraint groups.

use super::{solve_lp, DisjunctiveProgram, Solution, Status};
use crate::error::LpError;

/// Default cap on enumerated selections or explored branch nodes.
pub const DEFAULT_GUARD: u128 = 1_000_000;

/// Solves every disjunct selection and keeps the cheapest; ties go to the
/// lexicographically smallest selection.
pub fn solve_disjunctive(dp: &DisjunctiveProgram, guard: u128) -> Result<Solution, LpError> {
    dp.validate()?;
    let selections = dp.selection_count();
    if selections > guard {
        return Err(LpError::CombinatorialGuardExceeded { selections, guard });
    }

    let mut choice = vec![0usize; dp.groups.len()];
    let mut best: Option<Solution> = None;
    loop {
        let selection: Vec<Option<usize>> = choice.iter().map(|&c| Some(c)).collect();
        let sol = solve_lp(&dp.with_selection(&selection))?;
        match sol.status {
            Status::Unbounded => return Ok(Solution::without_point(Status::Unbounded)),
            Status::Optimal => {
                if best.as_ref().map_or(true, |b| sol.objective < b.objective) {
                    best = Some(Solution {
                        chosen_disjuncts: choice.clone(),
                        ..sol
                    });
                }
            }
            Status::Infeasible => {}
        }
        // Odometer with the last group turning fastest.
        let mut g = dp.groups.len();
        loop {
            if g == 0 {
                return Ok(best.unwrap_or_else(|| Solution::without_point(Status::Infeasible)));
            }
            g -= 1;
            choice[g] += 1;
            if choice[g] < dp.groups[g].len() {
                break;
            }
            choice[g] = 0;
        }
    }
}

/// Depth-first branch and bound: solve the relaxation holding only the
/// disjuncts fixed so far, stop if every group is already satisfied, and
/// otherwise branch on the first violated group. `node_limit` caps the
/// number of relaxations solved.
///
/// Returns the same optimal objective as [`solve_disjunctive`]. The reported
/// selection is, per group, the first disjunct satisfied by the returned
/// point, which may differ from the enumeration's choice on ties.
pub fn solve_disjunctive_lazy(dp: &DisjunctiveProgram, node_limit: u128) -> Result<Solution, LpError> {
    dp.validate()?;
    let mut search = Search {
        dp,
        best: None,
        nodes: 0,
        node_limit,
        unbounded: false,
    };
    let mut fixed = vec![None; dp.groups.len()];
    search.explore(&mut fixed)?;
    if search.unbounded {
        return Ok(Solution::without_point(Status::Unbounded));
    }
    Ok(search
        .best
        .unwrap_or_else(|| Solution::without_point(Status::Infeasible)))
}

struct Search<'a> {
    dp: &'a DisjunctiveProgram,
    best: Option<Solution>,
    nodes: u128,
    node_limit: u128,
    unbounded: bool,
}

impl Search<'_> {
    fn explore(&mut self, fixed: &mut Vec<Option<usize>>) -> Result<(), LpError> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(LpError::CombinatorialGuardExceeded {
                selections: self.nodes,
                guard: self.node_limit,
            });
        }
        let sol = solve_lp(&self.dp.with_selection(fixed))?;
        let branch_on = match sol.status {
            Status::Infeasible => return Ok(()),
            Status::Unbounded => {
                // No bound to prune with; a fully fixed unbounded node makes
                // the whole program unbounded.
                match fixed.iter().position(Option::is_none) {
                    Some(g) => g,
                    None => {
                        self.unbounded = true;
                        return Ok(());
                    }
                }
            }
            Status::Optimal => {
                if let Some(best) = &self.best {
                    if sol.objective >= best.objective {
                        return Ok(());
                    }
                }
                let violated = (0..self.dp.groups.len())
                    .find(|&g| fixed[g].is_none() && self.dp.first_satisfied(g, &sol.values).is_none());
                match violated {
                    Some(g) => g,
                    None => {
                        let chosen = (0..self.dp.groups.len())
                            .map(|g| {
                                self.dp
                                    .first_satisfied(g, &sol.values)
                                    .expect("fixed or satisfied")
                            })
                            .collect();
                        self.best = Some(Solution {
                            chosen_disjuncts: chosen,
                            ..sol
                        });
                        return Ok(());
                    }
                }
            }
        };
        for d in 0..self.dp.groups[branch_on].len() {
            fixed[branch_on] = Some(d);
            self.explore(fixed)?;
            if self.unbounded {
                break;
            }
        }
        fixed[branch_on] = None;
        Ok(())
    }
}
