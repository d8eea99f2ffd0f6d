//! Random problem generation and the batch experiments.
//!
//! Problem `i` of a run with seed `s` is drawn from ChaCha20 seeded with `s`
//! on stream `i`, so results do not depend on the worker count or on the
//! order in which problems are solved.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::beliefs::World;
use crate::designers::{self, max_coalition, CoalitionScenario, DesignRequest, Mode, Scenario};
use crate::error::DesignError;
use crate::exact::{self, Q};

pub const MIN_TYPES: usize = 2;
pub const MAX_TYPES: usize = 20;
/// Conditionals are multiples of `1 / GRID` in `[LOW, HIGH] / GRID`.
pub const GRID: i64 = 1000;
const LOW: i64 = 10;
const HIGH: i64 = 990;
/// Integer prior weights are drawn from `1..=PRIOR_WEIGHT_MAX`.
pub const PRIOR_WEIGHT_MAX: i64 = 1000;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CROWDPAY_WORKERS";

/// Description of the generator, written into every CSV header.
pub const GENERATOR: &str =
    "chacha20(seed, stream=index); types uniform 2..20; conditionals on a 1/1000 grid in [0.01, 0.99] without repeats; prior = normalised integer weights uniform 1..1000";

/// Draws problem `index` of the run seeded with `seed`.
pub fn generate_problem(seed: u64, index: u64) -> World {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let types = rng.random_range(MIN_TYPES..=MAX_TYPES);
    let mut grid: Vec<i64> = Vec::with_capacity(types);
    while grid.len() < types {
        let k = rng.random_range(LOW..=HIGH);
        if !grid.contains(&k) {
            grid.push(k);
        }
    }
    let weights: Vec<i64> = (0..types).map(|_| rng.random_range(1..=PRIOR_WEIGHT_MAX)).collect();
    let total: i64 = weights.iter().sum();
    let prior = weights.iter().map(|&w| exact::ratio(w, total)).collect();
    let high_prob = grid.iter().map(|&k| exact::ratio(k, GRID)).collect();
    World::new(prior, high_prob).expect("generated worlds are valid by construction")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: usize,
    pub agent_counts: Vec<usize>,
    pub margin: Q,
    /// Significant digits for CSV decimals.
    pub digits: usize,
    /// Thread count; results do not depend on it.
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            seed,
            samples: 200,
            agent_counts: vec![5, 10],
            margin: Q::one(),
            digits: 6,
            workers: workers(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> ExperimentConfig {
        self.workers = workers.max(1);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> ExperimentConfig {
        self.samples = samples;
        self
    }

    pub fn with_agent_counts(mut self, agent_counts: Vec<usize>) -> ExperimentConfig {
        self.agent_counts = agent_counts;
        self
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        if self.samples == 0 {
            return Err(DesignError::InvalidRequest("samples must be at least 1".into()));
        }
        if let Some(&n) = self.agent_counts.iter().find(|&&n| n < 2) {
            return Err(DesignError::InvalidRequest(format!("agent count {n} is below 2")));
        }
        if self.margin <= Q::zero() {
            return Err(DesignError::InvalidRequest("margin must be positive".into()));
        }
        Ok(())
    }

    fn worlds(&self) -> Vec<World> {
        (0..self.samples as u64).map(|i| generate_problem(self.seed, i)).collect()
    }

    fn header(&self, title: &str) -> String {
        let counts: Vec<String> = self.agent_counts.iter().map(usize::to_string).collect();
        format!(
            "# {title}\n# seed={} samples={} agents={} margin={}\n# generator: {GENERATOR}\n",
            self.seed,
            self.samples,
            counts.join(","),
            exact::to_exact_string(&self.margin)
        )
    }
}

/// Runs `f` over `items` on a pool of `threads` threads, keeping order.
fn parallel_map<T: Sync, R: Send>(threads: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn cost(req: &DesignRequest) -> Result<Option<Q>, DesignError> {
    match designers::design(req) {
        Ok(d) => Ok(Some(d.cost)),
        Err(e) if e.is_infeasible() => Ok(None),
        Err(e) => Err(e),
    }
}

fn ic_cost(world: &World, n_agents: usize, margin: &Q) -> Result<Q, DesignError> {
    let req = DesignRequest::new(world.clone(), n_agents, Scenario::OptimalIc).with_margin(margin.clone());
    Ok(designers::design(&req)?.cost)
}

fn mean(values: &[Q]) -> Option<Q> {
    if values.is_empty() {
        None
    } else {
        Some(exact::sum(values) / Q::from_integer(values.len().into()))
    }
}

fn cell(q: Option<&Q>, digits: usize) -> String {
    q.map_or_else(|| "nan".to_string(), |q| exact::format_sig(q, digits))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub n_agents: usize,
    pub n_col: usize,
    /// Mean of scenario cost over optimal-IC cost, over feasible instances.
    pub mean_normalized: Option<Q>,
    pub feasible: usize,
    pub infeasible: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub scenario: CoalitionScenario,
    pub rows: Vec<CostRow>,
}

impl CostCurve {
    pub fn row(&self, n_agents: usize, n_col: usize) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.n_agents == n_agents && r.n_col == n_col)
    }
}

fn coalition_scenario(scenario: CoalitionScenario, n_col: usize) -> Scenario {
    match scenario {
        CoalitionScenario::Dominant => Scenario::Dominant { n_col },
        CoalitionScenario::Sybil => Scenario::Sybil { n_col },
    }
}

/// Coalition sizes covered by the cost curve: up to `⌊N/2⌋` for dominance
/// (larger coalitions are always infeasible) and `N - 1` for sybils.
pub fn coalition_sizes(scenario: CoalitionScenario, n_agents: usize) -> std::ops::RangeInclusive<usize> {
    match scenario {
        CoalitionScenario::Dominant => 1..=n_agents / 2,
        CoalitionScenario::Sybil => 1..=n_agents - 1,
    }
}

/// Mean normalised cost for every `N` and coalition size.
pub fn run_cost_curve(config: &ExperimentConfig, scenario: CoalitionScenario) -> Result<CostCurve, DesignError> {
    config.validate()?;
    let worlds = config.worlds();
    let mut rows = Vec::new();
    for &n in &config.agent_counts {
        let per_world = parallel_map(config.workers, &worlds, |world| -> Result<Vec<Option<Q>>, DesignError> {
            let base = ic_cost(world, n, &config.margin)?;
            coalition_sizes(scenario, n)
                .map(|n_col| {
                    let req = DesignRequest::new(world.clone(), n, coalition_scenario(scenario, n_col))
                        .with_margin(config.margin.clone());
                    Ok(cost(&req)?.map(|c| c / &base))
                })
                .collect()
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        for (k, n_col) in coalition_sizes(scenario, n).enumerate() {
            let feasible: Vec<Q> = per_world.iter().filter_map(|costs| costs[k].clone()).collect();
            rows.push(CostRow {
                n_agents: n,
                n_col,
                mean_normalized: mean(&feasible),
                feasible: feasible.len(),
                infeasible: per_world.len() - feasible.len(),
            });
        }
    }
    Ok(CostCurve { scenario, rows })
}

pub fn cost_curve_csv(config: &ExperimentConfig, curve: &CostCurve) -> String {
    let name = match curve.scenario {
        CoalitionScenario::Dominant => "dominant",
        CoalitionScenario::Sybil => "sybil",
    };
    let mut out = config.header(&format!("cost curve: {name} cost normalised by optimal-ic cost"));
    out.push_str("n_agents,n_col,fraction,mean_normalized_cost,feasible,infeasible\n");
    for r in &curve.rows {
        let fraction = exact::ratio(r.n_col as i64, r.n_agents as i64);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n_agents,
            r.n_col,
            exact::format_sig(&fraction, config.digits),
            cell(r.mean_normalized.as_ref(), config.digits),
            r.feasible,
            r.infeasible
        );
    }
    out
}

/// Distribution of the largest resistible dominant coalition, per `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionBound {
    /// `N -> (bound -> number of problems)`.
    pub counts: BTreeMap<usize, BTreeMap<usize, usize>>,
    pub samples: usize,
}

impl CoalitionBound {
    pub fn fraction(&self, n_agents: usize, bound: usize) -> f64 {
        let hits = self.counts.get(&n_agents).and_then(|m| m.get(&bound)).copied().unwrap_or(0);
        hits as f64 / self.samples as f64
    }
}

pub fn run_coalition_bound(config: &ExperimentConfig) -> Result<CoalitionBound, DesignError> {
    config.validate()?;
    let worlds = config.worlds();
    let mut counts = BTreeMap::new();
    for &n in &config.agent_counts {
        let bounds = parallel_map(config.workers, &worlds, |w| max_coalition(w, n, &config.margin, CoalitionScenario::Dominant))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let hist: &mut BTreeMap<usize, usize> = counts.entry(n).or_default();
        for b in bounds {
            *hist.entry(b).or_default() += 1;
        }
    }
    Ok(CoalitionBound {
        counts,
        samples: config.samples,
    })
}

pub fn coalition_bound_csv(config: &ExperimentConfig, bound: &CoalitionBound) -> String {
    let mut out = config.header("coalition bound: largest n_col with a dominant-honest scheme");
    out.push_str("n_agents,max_coalition,count,percent\n");
    for (n, hist) in &bound.counts {
        for (b, count) in hist {
            let percent = exact::ratio(100 * *count as i64, bound.samples as i64);
            let _ = writeln!(out, "{n},{b},{count},{}", exact::format_sig(&percent, config.digits));
        }
    }
    out
}

/// Normalised costs of the three equilibrium concepts on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptRow {
    pub problem: usize,
    pub n_agents: usize,
    pub n_col: usize,
    pub dominant: Option<Q>,
    pub unique: Option<Q>,
    pub pareto: Option<Q>,
}

impl ConceptRow {
    /// `pareto <= unique <= dominant` over the feasible entries.
    pub fn ordered(&self) -> bool {
        let le = |a: &Option<Q>, b: &Option<Q>| match (a, b) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        };
        le(&self.pareto, &self.unique) && le(&self.unique, &self.dominant) && le(&self.pareto, &self.dominant)
    }
}

/// Equilibrium-concept comparison is limited to populations where the
/// asymmetric designers are defined.
pub const CONCEPT_MIN_AGENTS: usize = 4;

/// Dominant versus unique-NE versus Pareto-NE cost for every problem, `N`
/// and coalition size `1..=⌊N/2⌋`. Unique and Pareto use the asymmetric
/// two-parameter family with honest outsiders.
pub fn run_concept_comparison(config: &ExperimentConfig) -> Result<Vec<ConceptRow>, DesignError> {
    config.validate()?;
    if let Some(&n) = config.agent_counts.iter().find(|&&n| n < CONCEPT_MIN_AGENTS) {
        return Err(DesignError::TooFewAgents {
            scenario: "concept-compare",
            n,
            min: CONCEPT_MIN_AGENTS,
        });
    }
    let worlds = config.worlds();
    let mut rows = Vec::new();
    for &n in &config.agent_counts {
        let per_world = parallel_map(config.workers, &worlds, |world| -> Result<Vec<[Option<Q>; 3]>, DesignError> {
            let base = ic_cost(world, n, &config.margin)?;
            let normalized = |scenario: Scenario| -> Result<Option<Q>, DesignError> {
                let req = DesignRequest::new(world.clone(), n, scenario).with_margin(config.margin.clone());
                Ok(cost(&req)?.map(|c| c / &base))
            };
            (1..=n / 2)
                .map(|n_col| {
                    Ok([
                        normalized(Scenario::Dominant { n_col })?,
                        normalized(Scenario::PartialAsymmetric { n_col, mode: Mode::Unique })?,
                        normalized(Scenario::PartialAsymmetric { n_col, mode: Mode::Pareto })?,
                    ])
                })
                .collect()
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        for (problem, cells) in per_world.into_iter().enumerate() {
            for (k, [dominant, unique, pareto]) in cells.into_iter().enumerate() {
                rows.push(ConceptRow {
                    problem,
                    n_agents: n,
                    n_col: k + 1,
                    dominant,
                    unique,
                    pareto,
                });
            }
        }
    }
    Ok(rows)
}

pub fn concept_csv(config: &ExperimentConfig, rows: &[ConceptRow]) -> String {
    let mut out = config.header("equilibrium concepts: costs normalised by optimal-ic cost");
    out.push_str("problem,n_agents,n_col,dominant,unique,pareto,ordered\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.problem,
            r.n_agents,
            r.n_col,
            cell(r.dominant.as_ref(), config.digits),
            cell(r.unique.as_ref(), config.digits),
            cell(r.pareto.as_ref(), config.digits),
            r.ordered()
        );
    }
    out
}
