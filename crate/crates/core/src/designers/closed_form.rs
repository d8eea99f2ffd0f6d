//! Closed-form schemes that need no LP solve.

use num_traits::{One, Zero};

use crate::beliefs::{self, Signal, SignalDistribution, World};
use crate::error::DesignError;
use crate::exact::{self, Q};
use crate::mechanism::{var_index, PaymentScheme};

use super::ScoringRule;

fn reference_rows(world: &World, n_agents: usize) -> Result<[SignalDistribution; 2], DesignError> {
    Ok([
        beliefs::reference_given(world, Signal::Low, n_agents - 1)?,
        beliefs::reference_given(world, Signal::High, n_agents - 1)?,
    ])
}

fn degenerate(what: &str) -> DesignError {
    DesignError::DegenerateWorld(format!("{what} is not positive"))
}

/// Cheapest incentive-compatible scheme: pays only for full consensus.
pub fn closed_form_optimal_ic(world: &World, n_agents: usize, margin: &Q) -> Result<PaymentScheme, DesignError> {
    if n_agents < 2 {
        return Err(DesignError::TooFewAgents {
            scenario: "optimal-ic",
            n: n_agents,
            min: 2,
        });
    }
    let [p0, p1] = reference_rows(world, n_agents)?;
    let top = n_agents - 1;
    let den = p1.get(top) * p0.get(0) - p0.get(top) * p1.get(0);
    if den <= Q::zero() {
        return Err(degenerate("the consensus likelihood determinant"));
    }
    let mut values = vec![Q::zero(); 2 * n_agents];
    values[var_index(n_agents, Signal::Low, 0)] = margin * (p0.get(top) + p1.get(top)) / &den;
    values[var_index(n_agents, Signal::High, top)] = margin * (p0.get(0) + p1.get(0)) / &den;
    Ok(PaymentScheme::from_values(n_agents, &values)?)
}

/// Which formula pair the unique-symmetric closed form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniqueBranch {
    /// Low-report incentive constraint binds together with the high-observer
    /// all-lie deviation.
    A,
    /// High-report incentive constraint binds together with the low-observer
    /// all-lie deviation.
    B,
    /// Both incentive constraints bind.
    Otherwise,
}

/// The literal branch conditions, written with
/// `a_o = Pr[1|o]` and `b_o = Pr[N-2|o]` over `N - 1` reference reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BranchConditions {
    pub a: bool,
    pub b: bool,
}

impl BranchConditions {
    pub fn branch(&self) -> UniqueBranch {
        match (self.a, self.b) {
            (true, _) => UniqueBranch::A,
            (false, true) => UniqueBranch::B,
            (false, false) => UniqueBranch::Otherwise,
        }
    }
}

struct Coefficients {
    a0: Q,
    b0: Q,
    a1: Q,
    b1: Q,
    p0: SignalDistribution,
    p1: SignalDistribution,
}

fn coefficients(world: &World, n_agents: usize) -> Result<Coefficients, DesignError> {
    if n_agents < 4 {
        return Err(DesignError::TooFewAgents {
            scenario: "unique-symmetric",
            n: n_agents,
            min: 4,
        });
    }
    let [p0, p1] = reference_rows(world, n_agents)?;
    Ok(Coefficients {
        a0: p0.get(1),
        b0: p0.get(n_agents - 2),
        a1: p1.get(1),
        b1: p1.get(n_agents - 2),
        p0,
        p1,
    })
}

pub fn unique_branch_conditions(world: &World, n_agents: usize) -> Result<BranchConditions, DesignError> {
    let Coefficients { a0, b0, a1, b1, .. } = coefficients(world, n_agents)?;
    let cross_a = &a0 * &a1;
    let cross_b = &b0 * &b1;
    let a = cross_a > cross_b && b1 > a1 && &b1 * &b1 - &a1 * &a1 > &cross_a - &cross_b;
    let b = cross_b > cross_a && a0 > b0 && &a0 * &a0 - &b0 * &b0 > &cross_b - &cross_a;
    Ok(BranchConditions { a, b })
}

/// Cheapest scheme in the family `τ(0,1) = x`, `τ(1,N-2) = y`,
/// `τ(0,N-1) = τ(1,0) = ε`, zero elsewhere, for which honest reporting is
/// the unique symmetric equilibrium. Strict all-lie deviations are closed
/// with `delta`; with `epsilon = delta = 0` the three formula pairs reduce
/// to the textbook ones.
pub fn closed_form_unique_symmetric(
    world: &World,
    n_agents: usize,
    margin: &Q,
    epsilon: &Q,
    delta: &Q,
) -> Result<(PaymentScheme, UniqueBranch), DesignError> {
    let Coefficients { a0, b0, a1, b1, p0, p1 } = coefficients(world, n_agents)?;
    let top = n_agents - 1;
    // Constant contributions of the ε entries.
    let e0 = epsilon * (p0.get(top) - p0.get(0));
    let e1 = epsilon * (p1.get(0) - p1.get(top));
    let need0 = margin - &e0;
    let need1 = margin - &e1;
    let lie_low = delta + &e0;
    let lie_high = delta + &e1;

    let det = &a0 * &b1 - &b0 * &a1;
    if det <= Q::zero() {
        return Err(degenerate("the interior likelihood determinant"));
    }
    let x = (&need0 * &b1 + &b0 * &need1) / &det;
    let y = (&a0 * &need1 + &a1 * &need0) / &det;
    let breaks_low = &b0 * &x - &a0 * &y >= lie_low;
    let breaks_high = &a1 * &y - &b1 * &x >= lie_high;

    let (x, y, branch) = if breaks_low || breaks_high {
        (x, y, UniqueBranch::Otherwise)
    } else {
        let cross = &b0 * &b1 - &a0 * &a1;
        if cross > Q::zero() {
            let x = (&b1 * &lie_low + &a0 * &need1) / &cross;
            let y = (&b0 * &need1 + &a1 * &lie_low) / &cross;
            (x, y, UniqueBranch::B)
        } else if cross < Q::zero() {
            let d = -cross;
            let x = (&need0 * &a1 + &b0 * &lie_high) / &d;
            let y = (&a0 * &lie_high + &b1 * &need0) / &d;
            (x, y, UniqueBranch::A)
        } else {
            return Err(degenerate("the all-lie determinant"));
        }
    };
    if x < Q::zero() || y < Q::zero() {
        return Err(DesignError::DegenerateWorld("the closed form yields a negative payment".into()));
    }
    let mut values = vec![Q::zero(); 2 * n_agents];
    values[var_index(n_agents, Signal::Low, 1)] = x;
    values[var_index(n_agents, Signal::High, n_agents - 2)] = y;
    values[var_index(n_agents, Signal::Low, top)] = epsilon.clone();
    values[var_index(n_agents, Signal::High, 0)] = epsilon.clone();
    Ok((PaymentScheme::from_values(n_agents, &values)?, branch))
}

/// Relative slack of the floating-point logarithmic rule.
pub const LOG_RULE_SLACK: f64 = 1e-9;

/// Scheme resisting a single agent that controls `N - 1` reports. The
/// coalition's revenue for reporting `r` positives after observing `c`
/// equals a proper scoring rule scoring the forecast "the outsider reports
/// positively with probability `Pr[1 | r of N-1 high]`". The raw table is
/// rescaled so every truthful-versus-lying gap is at least `margin` and every
/// payment is nonnegative.
pub fn closed_form_sybil(
    world: &World,
    n_agents: usize,
    margin: &Q,
    rule: ScoringRule,
) -> Result<PaymentScheme, DesignError> {
    if n_agents < 2 {
        return Err(DesignError::TooFewAgents {
            scenario: "sybil",
            n: n_agents,
            min: 2,
        });
    }
    let m = n_agents - 1;
    let forecasts = (0..=m)
        .map(|c| Ok(beliefs::posterior_given_counts(world, c, m)?.high_signal_prob(world)))
        .collect::<Result<Vec<Q>, DesignError>>()?;
    if forecasts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DesignError::DegenerateWorld(
            "outsider forecasts do not increase with the observed count".into(),
        ));
    }
    match rule {
        ScoringRule::Quadratic => {
            let scores: Vec<[Q; 2]> = forecasts.iter().map(brier).collect();
            let raw = table_from_scores(&scores, n_agents);
            let gap = min_gap(&forecasts, &scores);
            let scale = margin / gap;
            let mut table: Vec<Q> = raw.iter().map(|t| t * &scale).collect();
            let low = table.iter().min().cloned().unwrap_or_else(Q::zero);
            if low < Q::zero() {
                for t in &mut table {
                    *t -= &low;
                }
            }
            Ok(PaymentScheme::from_values(n_agents, &table)?)
        }
        ScoringRule::Logarithmic => {
            let q: Vec<f64> = forecasts.iter().map(exact::to_f64).collect();
            let scores: Vec<[f64; 2]> = q.iter().map(|q| [(1.0 - q).ln(), q.ln()]).collect();
            let raw = table_from_scores(&scores, n_agents);
            let gap = min_gap(&q, &scores);
            let scale = exact::to_f64(margin) * (1.0 + LOG_RULE_SLACK) / gap;
            let low = raw.iter().cloned().fold(f64::INFINITY, f64::min);
            let shift = if low < 0.0 { -low * scale } else { 0.0 };
            let table = raw
                .iter()
                .map(|t| {
                    let v = (t * scale + shift).max(0.0);
                    exact::from_f64(v).ok_or_else(|| DesignError::DegenerateWorld("non-finite log score".into()))
                })
                .collect::<Result<Vec<Q>, DesignError>>()?;
            Ok(PaymentScheme::from_values(n_agents, &table)?)
        }
    }
}

/// Quadratic scores `[SR(0, ·), SR(1, ·)]` of forecast `q`.
fn brier(q: &Q) -> [Q; 2] {
    let one = Q::one();
    let p = &one - q;
    let norm = q * q + &p * &p;
    let two = exact::int(2);
    [&two * &p - &norm, &two * q - &norm]
}

/// Arithmetic needed by [`table_from_scores`] and [`min_gap`], shared by
/// exact and floating-point scores.
trait Score: Clone + PartialOrd {
    fn nil() -> Self;
    fn unit() -> Self;
    fn of(n: usize) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

impl Score for Q {
    fn nil() -> Self {
        <Q as Zero>::zero()
    }
    fn unit() -> Self {
        <Q as One>::one()
    }
    fn of(n: usize) -> Self {
        Q::from_integer(n.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Score for f64 {
    fn nil() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn of(n: usize) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Solves, for `r = 0..N-1`,
/// `r τ(1,r-1) + (N-1-r) τ(0,r) = SR(0,r)` and
/// `r τ(1,r) + (N-1-r) τ(0,r+1) = SR(1,r)`.
fn table_from_scores<T: Score>(scores: &[[T; 2]], n_agents: usize) -> Vec<T> {
    let m = n_agents - 1;
    let mm = T::of(m);
    let mut table = vec![T::nil(); 2 * n_agents];
    table[var_index(n_agents, Signal::Low, 0)] = scores[0][0].div(&mm);
    table[var_index(n_agents, Signal::High, m)] = scores[m][1].div(&mm);
    for r in 1..=m {
        let high_prev = T::of(n_agents - r)
            .mul(&scores[r][0])
            .sub(&T::of(m - r).mul(&scores[r - 1][1]));
        let low_here = T::of(r).mul(&scores[r - 1][1]).sub(&T::of(r - 1).mul(&scores[r][0]));
        table[var_index(n_agents, Signal::High, r - 1)] = high_prev.div(&mm);
        table[var_index(n_agents, Signal::Low, r)] = low_here.div(&mm);
    }
    table
}

/// Smallest expected-score gap between the true count and any other.
fn min_gap<T: Score>(forecasts: &[T], scores: &[[T; 2]]) -> T {
    let mut best: Option<T> = None;
    for (c, q) in forecasts.iter().enumerate() {
        let p = T::unit().sub(q);
        let value = |r: usize| p.mul(&scores[r][0]).add(&q.mul(&scores[r][1]));
        let truthful = value(c);
        for r in (0..scores.len()).filter(|&r| r != c) {
            let gap = truthful.sub(&value(r));
            if best.as_ref().map_or(true, |b| gap < *b) {
                best = Some(gap);
            }
        }
    }
    best.expect("at least two counts")
}
