//! Two-phase dense tableau simplex over exact rationals.

use num_traits::{One, Zero};

use super::{LinearProgram, Relation, Solution, Status};
use crate::error::LpError;
use crate::exact::Q;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Column {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize, costs: &mut [Vec<Q>]) {
        let inv = Q::one() / &self.rows[row][col];
        if !inv.is_one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[row] *= &inv;
        }
        let support: Vec<usize> = (0..self.rows[row].len())
            .filter(|&k| !self.rows[row][k].is_zero())
            .collect();
        let (pivot_row, pivot_rhs) = (self.rows[row].clone(), self.rhs[row].clone());

        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for &k in &support {
                let delta = &factor * &pivot_row[k];
                self.rows[i][k] -= delta;
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        for cost in costs.iter_mut() {
            // The last entry of a cost row holds minus the objective value.
            let factor = cost[col].clone();
            if factor.is_zero() {
                continue;
            }
            for &k in &support {
                let delta = &factor * &pivot_row[k];
                cost[k] -= delta;
            }
            let last = cost.len() - 1;
            cost[last] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations on `costs[0]` until optimal or unbounded.
    /// Returns false when unbounded. Columns failing `allowed` never enter.
    fn optimize(&mut self, costs: &mut [Vec<Q>], allowed: &dyn Fn(usize) -> bool) -> bool {
        let width = self.kinds.len();
        loop {
            // Bland: lowest-index improving column.
            let Some(col) = (0..width).find(|&j| allowed(j) && costs[0][j] < Q::zero()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if *a <= Q::zero() {
                    continue;
                }
                let r = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => r < *br || (r == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, r));
                }
            }
            let Some((row, _)) = best else {
                return false;
            };
            self.pivot(row, col, costs);
        }
    }
}

fn cost_row(tableau: &Tableau, costs: &[Q]) -> Vec<Q> {
    // Reduced costs c_j - c_B B^-1 A_j, plus -c_B B^-1 b in the last slot.
    let width = tableau.kinds.len();
    let mut row: Vec<Q> = costs.to_vec();
    row.push(Q::zero());
    for (i, &b) in tableau.basis.iter().enumerate() {
        let cb = costs[b].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..width {
            if !tableau.rows[i][j].is_zero() {
                row[j] -= &cb * &tableau.rows[i][j];
            }
        }
        row[width] -= &cb * &tableau.rhs[i];
    }
    row
}

/// Solves `lp` exactly. Deterministic: Bland's rule with lowest-index ties.
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution, LpError> {
    lp.validate()?;
    let n = lp.num_vars;

    // Shift x = lb + y so that y >= 0.
    let shifted: Vec<(Vec<Q>, Relation, Q)> = lp
        .constraints
        .iter()
        .map(|c| {
            let offset: Q = c
                .coeffs
                .iter()
                .zip(&lp.lower_bounds)
                .filter(|(a, l)| !a.is_zero() && !l.is_zero())
                .map(|(a, l)| a * l)
                .sum();
            let rhs = &c.rhs - offset;
            if rhs < Q::zero() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|a| -a).collect(), flipped, -rhs)
            } else {
                (c.coeffs.clone(), c.relation, rhs)
            }
        })
        .collect();

    let mut kinds = vec![Column::Original; n];
    for (_, rel, _) in &shifted {
        if *rel != Relation::Eq {
            kinds.push(Column::Slack);
        }
    }
    for (_, rel, _) in &shifted {
        if *rel != Relation::Le {
            kinds.push(Column::Artificial);
        }
    }
    let width = kinds.len();
    let m = shifted.len();

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = n;
    let mut next_art = n + shifted.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    for (coeffs, rel, b) in shifted {
        let mut row = coeffs;
        row.resize(width, Q::zero());
        match rel {
            Relation::Le => {
                row[next_slack] = Q::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Q::one();
                next_slack += 1;
                row[next_art] = Q::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Q::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        kinds,
    };

    if t.kinds.contains(&Column::Artificial) {
        let phase_one: Vec<Q> = t
            .kinds
            .iter()
            .map(|k| if *k == Column::Artificial { Q::one() } else { Q::zero() })
            .collect();
        let mut costs = vec![cost_row(&t, &phase_one)];
        t.optimize(&mut costs, &|_| true);
        if !costs[0][width].is_zero() {
            return Ok(Solution::without_point(Status::Infeasible));
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut i = 0;
        while i < t.rows.len() {
            if t.kinds[t.basis[i]] == Column::Artificial {
                let replacement = (0..width).find(|&j| t.kinds[j] != Column::Artificial && !t.rows[i][j].is_zero());
                match replacement {
                    Some(j) => t.pivot(i, j, &mut []),
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut phase_two = lp.objective.clone();
    phase_two.resize(width, Q::zero());
    let mut costs = vec![cost_row(&t, &phase_two)];
    let kinds = t.kinds.clone();
    if !t.optimize(&mut costs, &|j| kinds[j] != Column::Artificial) {
        return Ok(Solution::without_point(Status::Unbounded));
    }

    let mut values = lp.lower_bounds.clone();
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] += &t.rhs[i];
        }
    }
    let objective = values
        .iter()
        .zip(&lp.objective)
        .filter(|(v, c)| !v.is_zero() && !c.is_zero())
        .map(|(v, c)| v * c)
        .sum();
    Ok(Solution {
        status: Status::Optimal,
        values,
        objective,
        chosen_disjuncts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::lp::Constraint;

    #[test]
    fn small_optimum() {
        // min x + y, x + 2y >= 4, 3x + y >= 6
        let mut lp = LinearProgram::new(vec![int(1), int(1)]);
        lp.push(Constraint::ge(vec![int(1), int(2)], int(4)));
        lp.push(Constraint::ge(vec![int(3), int(1)], int(6)));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.values, vec![ratio(8, 5), ratio(6, 5)]);
        assert_eq!(s.objective, ratio(14, 5));
        assert!(lp.is_feasible(&s.values));
    }

    #[test]
    fn infeasible_program() {
        let mut lp = LinearProgram::new(vec![int(1)]);
        lp.push(Constraint::ge(vec![int(1)], int(1)));
        lp.push(Constraint::le(vec![int(1)], int(0)));
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn unbounded_program() {
        let lp = LinearProgram::new(vec![int(-1)]);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn equalities_negative_rhs_and_bounds() {
        // min 2a - b, a - b = -1, a >= 1/2, b <= 4
        let mut lp = LinearProgram::new(vec![int(2), int(-1)]);
        lp.lower_bounds = vec![ratio(1, 2), int(0)];
        lp.push(Constraint::eq(vec![int(1), int(-1)], int(-1)));
        lp.push(Constraint::le(vec![int(0), int(1)], int(4)));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.values, vec![ratio(1, 2), ratio(3, 2)]);
        assert_eq!(s.objective, ratio(-1, 2));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![int(1), int(1)]);
        lp.push(Constraint::eq(vec![int(1), int(1)], int(2)));
        lp.push(Constraint::eq(vec![int(2), int(2)], int(4)));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.objective, int(2));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland terminates.
        let mut lp = LinearProgram::new(vec![ratio(-3, 4), int(150), ratio(-1, 50), int(6)]);
        lp.push(Constraint::le(vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)], int(0)));
        lp.push(Constraint::le(vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)], int(0)));
        lp.push(Constraint::le(vec![int(0), int(0), int(1), int(0)], int(1)));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.objective, ratio(-1, 20));
    }

    #[test]
    fn empty_constraint_set() {
        let lp = LinearProgram::new(vec![int(1), int(0)]);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.values, vec![int(0), int(0)]);
    }
}
