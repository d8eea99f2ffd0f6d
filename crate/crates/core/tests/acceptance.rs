//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;

use crowdpay::beliefs::{likelihood_ratio_check, reference_given, Signal, World};
use crowdpay::designers::{
    closed_form_optimal_ic, closed_form_unique_symmetric, design, max_coalition, CoalitionScenario, DesignRequest, Scenario,
};
use crowdpay::exact::{int, ratio, to_f64, Q};
use crowdpay::harness::{generate_problem, run_concept_comparison, ExperimentConfig};
use crowdpay::mechanism::{expected_payoff, payoff_form, PaymentScheme, ProfileCounts, Strategy};
use crowdpay::verifier;

mod support;
use support::brute_force_payoff;

/// Slack that turns weak boundary ties into strict deviations.
fn tiny_delta() -> Q {
    ratio(1, 1_000_000)
}

fn plumber() -> World {
    World::new(vec![ratio(4, 5), ratio(1, 5)], vec![ratio(9, 10), ratio(3, 20)]).unwrap()
}

fn near(q: &Q, target: f64, tol: f64) -> bool {
    (to_f64(q) - target).abs() <= tol
}

fn near_rel(q: &Q, target: f64, rel: f64) -> bool {
    (to_f64(q) - target).abs() <= rel * target.abs()
}

fn fmt(values: &[Q]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{:.4}", to_f64(v))).collect();
    format!("({})", parts.join(", "))
}

type Outcome = Result<(bool, String), String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, title: &str, budget: Option<Duration>, body: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = body();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match result {
            Ok(pair) => pair,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = budget {
            if elapsed > limit {
                pass = false;
                detail = format!("{detail}; over the {limit:?} budget");
            }
        }
        if !pass {
            self.failures += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {id:>3} {title}: {detail} [{:.2}s]", elapsed.as_secs_f64());
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let w = plumber();
    let d = design(&DesignRequest::new(w.clone(), 2, Scenario::OptimalIc)).map_err(err)?;
    let s = &d.scheme;
    let other = ProfileCounts::honest(1);
    let payoff = |strategy, obs| expected_payoff(s, &w, strategy, &other, obs).map_err(err);
    // Per observation, truthful report first.
    let quad = [
        payoff(Strategy::Honest, Signal::High)?,
        payoff(Strategy::Lie, Signal::High)?,
        payoff(Strategy::Honest, Signal::Low)?,
        payoff(Strategy::Lie, Signal::Low)?,
    ];
    let table_ok = near(s.pay(Signal::Low, 0), 2.62, 0.01) && near(s.pay(Signal::High, 1), 1.54, 0.01);
    let quad_ok = quad.iter().zip([1.34, 0.34, 1.6, 0.6]).all(|(q, t)| near(q, t, 0.01));
    let detail = format!(
        "tau(0,0), tau(1,1) = {}; payoffs {}",
        fmt(&[s.pay(Signal::Low, 0).clone(), s.pay(Signal::High, 1).clone()]),
        fmt(&quad)
    );
    Ok((table_ok && quad_ok, detail))
}

fn criterion_2() -> Outcome {
    let w = plumber();
    let low = reference_given(&w, Signal::Low, 3).map_err(err)?;
    let high = reference_given(&w, Signal::High, 3).map_err(err)?;
    let ok_low = low.mass().iter().zip([0.4179, 0.2297, 0.1168, 0.2356]).all(|(q, t)| near(q, t, 1e-4));
    let ok_high = high.mass().iter().zip([0.0255, 0.0389, 0.2356, 0.7]).all(|(q, t)| near(q, t, 1e-4));
    Ok((ok_low && ok_high, format!("low {} high {}", fmt(low.mass()), fmt(high.mass()))))
}

fn criterion_3() -> Outcome {
    let w = plumber();
    let req = DesignRequest::new(w.clone(), 4, Scenario::UniqueSymmetric);
    let d = design(&req).map_err(err)?;
    let values = [d.scheme.pay(Signal::Low, 1).clone(), d.scheme.pay(Signal::High, 2).clone()];
    let values_ok = near(&values[0], 12.37, 0.01) && near(&values[1], 6.29, 0.01);
    let strict = design(&req.with_delta(tiny_delta())).map_err(err)?;
    let strict_ok = near(strict.scheme.pay(Signal::Low, 1), 12.37, 0.01);
    let eq = verifier::symmetric_equilibria(&strict.scheme, &w).map_err(err)?;
    let only_honest = eq.len() == 1 && eq[0].profile.is_all_honest();
    Ok((
        values_ok && strict_ok && only_honest,
        format!(
            "tau(0,1), tau(1,2) = {} at delta=0; symmetric NE at delta=1e-6: {:?}",
            fmt(&values),
            eq.iter().map(|r| r.profile.to_string()).collect::<Vec<_>>()
        ),
    ))
}

fn criterion_4() -> Outcome {
    let w = plumber();
    let req = DesignRequest::new(w.clone(), 4, Scenario::ParetoSymmetric);
    let corners = |s: &PaymentScheme| {
        [
            s.pay(Signal::Low, 0).clone(),
            s.pay(Signal::Low, 1).clone(),
            s.pay(Signal::High, 2).clone(),
            s.pay(Signal::High, 3).clone(),
        ]
    };
    let expected = [1.30, 4.52, 1.26, 1.30];
    let table = corners(&design(&req).map_err(err)?.scheme);
    let strict = design(&req.with_delta(tiny_delta())).map_err(err)?;
    let s = &strict.scheme;
    let table_ok = table.iter().chain(corners(s).iter()).zip(expected.iter().chain(&expected)).all(|(q, t)| near(q, *t, 0.01));
    let mut bad = Vec::new();
    for strategy in [Strategy::AlwaysNegative, Strategy::AlwaysPositive, Strategy::Lie] {
        let profile = ProfileCounts::symmetric(strategy, 4);
        let ne = verifier::is_nash(s, &w, &profile).map_err(err)?;
        let cmp = verifier::pareto_compare(s, &w, &profile).map_err(err)?;
        let weakly_better = cmp.groups.iter().all(|g| g.value >= cmp.honest_value);
        if ne.is_ne && weakly_better {
            bad.push(profile.to_string());
        }
    }
    Ok((
        table_ok && bad.is_empty(),
        format!("table {} at delta=0; weakly dominating lying NE at delta=1e-6: {bad:?}", fmt(&table)),
    ))
}

fn criterion_5() -> Outcome {
    let w = plumber();
    let req = DesignRequest::new(w.clone(), 4, Scenario::FullAsymmetricPareto).with_delta(tiny_delta());
    let d = design(&req).map_err(err)?;
    let all = verifier::enumerate_profiles(&d.scheme, &w).map_err(err)?;
    let eq: Vec<ProfileCounts> = all.iter().filter(|r| r.is_ne).map(|r| r.profile).collect();
    let expected = [
        ProfileCounts::honest(4),
        ProfileCounts::symmetric(Strategy::AlwaysPositive, 4),
        ProfileCounts::symmetric(Strategy::AlwaysNegative, 4),
    ];
    let ok = all.len() == 35 && eq.len() == 3 && expected.iter().all(|p| eq.contains(p));
    Ok((
        ok,
        format!(
            "{} profiles, NE {:?} (delta=1e-6)",
            all.len(),
            eq.iter().map(|p| p.to_string()).collect::<Vec<_>>()
        ),
    ))
}

fn criterion_6() -> Outcome {
    let w = plumber();
    let d = design(&DesignRequest::new(w.clone(), 4, Scenario::Dominant { n_col: 2 })).map_err(err)?;
    let s = &d.scheme;
    let table = [
        s.pay(Signal::Low, 0).clone(),
        s.pay(Signal::Low, 1).clone(),
        s.pay(Signal::High, 2).clone(),
        s.pay(Signal::High, 3).clone(),
    ];
    let table_ok = table.iter().zip([1.575, 3.575, 2.203, 0.943]).all(|(q, t)| near(q, t, 0.005));
    let mut checks = Vec::new();
    for other_positive in 0..2 {
        let others = ProfileCounts::new(1 - other_positive, other_positive, 2, 0);
        for report in [Signal::High, Signal::Low] {
            let form = payoff_form(&w, 4, report, &others, Signal::High).map_err(err)?;
            checks.push(form.eval(&s.values()));
        }
    }
    let checks_ok = checks.iter().zip([1.715, 0.715, 1.138, 0.138]).all(|(q, t)| near(q, t, 0.005));
    let three = design(&DesignRequest::new(w, 4, Scenario::Dominant { n_col: 3 }));
    let infeasible = matches!(&three, Err(e) if e.is_infeasible());
    Ok((
        table_ok && checks_ok && infeasible,
        format!("table {}; checks {}; n_col=3 infeasible: {infeasible}", fmt(&table), fmt(&checks)),
    ))
}

fn sybil_case(n_col: usize, low: [f64; 6], high: [f64; 6]) -> Result<(bool, String), String> {
    let w = plumber();
    let d = design(&DesignRequest::new(w.clone(), 6, Scenario::Sybil { n_col })).map_err(err)?;
    let s = &d.scheme;
    let mut misses = Vec::new();
    for (report, expected) in [(Signal::Low, low), (Signal::High, high)] {
        for (n, t) in expected.iter().enumerate() {
            let got = s.pay(report, n);
            let ok = if *t == 0.0 { got.is_zero() } else { near_rel(got, *t, 0.01) };
            if !ok {
                misses.push(format!("tau({report},{n})={:.4} vs {t}", to_f64(got)));
            }
        }
    }
    let mut truthful = true;
    for c in 0..=n_col {
        let choice = verifier::coalition_best_report(s, &w, n_col, c).map_err(err)?;
        truthful &= choice.best == c && choice.strict;
    }
    let detail = if misses.is_empty() {
        format!("n_col={n_col}: table matches, truthful={truthful}")
    } else {
        format!("n_col={n_col}: {} entries off [{}], truthful={truthful}", misses.len(), misses.join("; "))
    };
    Ok((misses.is_empty() && truthful, detail))
}

fn criterion_7() -> Outcome {
    let (a, da) = sybil_case(
        3,
        [20.85, 0.0, 0.0, 0.0, 4.40, 9.98],
        [45.54, 28.78, 0.0, 0.0, 0.0, 4.31],
    )?;
    let (b, db) = sybil_case(
        5,
        [3455.0, 0.0, 1378.0, 615.0, 0.0, 1125.0],
        [1530.0, 5569.0, 4674.0, 3736.0, 0.0, 2585.0],
    )?;
    Ok((a && b, format!("{da} | {db}")))
}

fn criterion_8() -> Outcome {
    let margin = int(1);
    let mut ic_cases = 0;
    let mut ic_bad = Vec::new();
    for i in 0..105u64 {
        let w = generate_problem(8, i);
        let n = 2 + (i as usize % 7);
        let lp = design(&DesignRequest::new(w.clone(), n, Scenario::OptimalIc)).map_err(err)?;
        let closed = closed_form_optimal_ic(&w, n, &margin).map_err(err)?;
        ic_cases += 1;
        if lp.scheme != closed {
            ic_bad.push(i);
        }
    }
    let mut unique_cases = 0;
    let mut unique_bad = Vec::new();
    for i in 0..55u64 {
        let w = generate_problem(88, i);
        let n = 4 + (i as usize % 5);
        let req = DesignRequest::new(w.clone(), n, Scenario::UniqueSymmetric);
        let lp = design(&req).map_err(err)?;
        unique_cases += 1;
        match closed_form_unique_symmetric(&w, n, &req.margin, &req.epsilon, &Q::zero()) {
            Ok((closed, _)) if closed == lp.scheme => {}
            _ => unique_bad.push(i),
        }
    }
    Ok((
        ic_bad.is_empty() && unique_bad.is_empty(),
        format!(
            "optimal-ic {}/{ic_cases} equal; unique-symmetric {}/{unique_cases} equal",
            ic_cases - ic_bad.len(),
            unique_cases - unique_bad.len()
        ),
    ))
}

fn criterion_9() -> Outcome {
    let mut violations = 0;
    for i in 0..1000u64 {
        let w = generate_problem(9, i);
        for m in 1..=10 {
            if !likelihood_ratio_check(&w, m).map_err(err)?.increasing {
                violations += 1;
            }
        }
    }
    Ok((violations == 0, format!("1000 worlds, m in 1..=10, {violations} violations")))
}

fn criterion_10() -> Outcome {
    let mut found = 0;
    let cases = 50;
    for i in 0..cases as u64 {
        let w = generate_problem(10, i);
        let n = 3 + (i as usize % 6);
        let d = design(&DesignRequest::new(w.clone(), n, Scenario::OptimalIc)).map_err(err)?;
        let eq = verifier::enumerate_pure_equilibria(&d.scheme, &w).map_err(err)?;
        if eq.iter().any(|r| r.profile.honest == 0 && r.profile.lie == 0) {
            found += 1;
        }
    }
    Ok((found == cases, format!("{found}/{cases} optimal-ic schemes have a constant-reporting NE")))
}

fn criterion_11() -> Outcome {
    let mut offending = Vec::new();
    let cases = 50;
    for i in 0..cases as u64 {
        let w = generate_problem(11, i);
        let n = 5 + (i as usize % 4);
        let d = design(&DesignRequest::new(w.clone(), n, Scenario::FullAsymmetricPareto)).map_err(err)?;
        for p in ProfileCounts::enumerate(n) {
            let mixed = p.honest >= 1 && p.lie >= 1 && p.neg <= 1 && p.pos <= 1;
            let split = p.neg == 1 && p.pos == 1;
            if (mixed || split) && verifier::is_nash(&d.scheme, &w, &p).map_err(err)?.is_ne {
                offending.push(format!("world {i}: {p}"));
            }
        }
    }
    Ok((
        offending.is_empty(),
        format!("{cases} worlds, N in 5..=8, covered NE found: {offending:?}"),
    ))
}

fn criterion_12() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(12);
    let cases = 120;
    let mut mismatches = 0;
    for i in 0..cases as u64 {
        let w = generate_problem(12, i);
        let n = rng.random_range(2..=6);
        let mut counts = [0usize; 4];
        for _ in 0..n - 1 {
            counts[rng.random_range(0..4)] += 1;
        }
        let others = ProfileCounts::new(counts[0], counts[1], counts[2], counts[3]);
        let table: Vec<Q> = (0..2 * n).map(|_| ratio(rng.random_range(0..50), rng.random_range(1..9))).collect();
        let scheme = PaymentScheme::from_values(n, &table).map_err(err)?;
        let strategy = Strategy::ALL[rng.random_range(0..4)];
        let obs = Signal::from_bit(rng.random_range(0..2));
        let fast = expected_payoff(&scheme, &w, strategy, &others, obs).map_err(err)?;
        if fast != brute_force_payoff(&scheme, &w, strategy, &others, obs) {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{cases} cases, N <= 6, {mismatches} mismatches")))
}

fn criterion_13() -> Outcome {
    let margin = int(1);
    let samples = 200;
    let mut at_two = 0;
    for i in 0..samples as u64 {
        let w = generate_problem(13, i);
        if max_coalition(&w, 5, &margin, CoalitionScenario::Dominant).map_err(err)? == 2 {
            at_two += 1;
        }
    }
    let fraction = at_two as f64 / samples as f64;
    Ok((fraction >= 0.98, format!("{at_two}/{samples} problems reach n_col=2 ({:.2}%)", 100.0 * fraction)))
}

/// Criteria 14 and 15 share one seeded run at `N = 10`.
fn criteria_14_15(suite: &mut Suite) {
    let start = Instant::now();
    let config = ExperimentConfig::new(14).with_samples(100).with_agent_counts(vec![10]);
    let rows = run_concept_comparison(&config);
    let elapsed = start.elapsed();
    let rows = match rows {
        Ok(rows) => rows,
        Err(e) => {
            let message = e.to_string();
            suite.run("14", "scaled cost curve shape", None, || Err(message.clone()));
            suite.run("15", "cost orderings", None, || Err(message));
            return;
        }
    };
    suite.run("14", "scaled cost curve shape", None, || {
        let mut means = Vec::new();
        for n_col in 1..=5 {
            let costs: Vec<Q> = rows.iter().filter(|r| r.n_col == n_col).filter_map(|r| r.dominant.clone()).collect();
            if costs.is_empty() {
                return Err(format!("no feasible dominant scheme at n_col={n_col}"));
            }
            let mean = costs.iter().fold(Q::zero(), |a, c| a + c) / Q::from_integer(costs.len().into());
            means.push(mean);
        }
        // n_col/N <= 1/3 covers n_col = 1, 2, 3.
        let cheap = means[..3].iter().all(|m| to_f64(m) <= 1.5);
        let rising = means[2..].windows(2).all(|w| w[0] < w[1]);
        Ok((
            cheap && rising,
            format!(
                "mean normalised dominant cost by n_col 1..5 = {}; <=1.5 up to 1/3: {cheap}; increasing after: {rising} (run {:.1}s)",
                fmt(&means),
                elapsed.as_secs_f64()
            ),
        ))
    });
    suite.run("15", "cost orderings", None, || {
        let unordered: Vec<&_> = rows.iter().filter(|r| !r.ordered()).collect();
        let pareto_unique = rows
            .iter()
            .filter(|r| matches!((&r.pareto, &r.unique), (Some(p), Some(u)) if p > u))
            .count();
        let unique_dominant = rows
            .iter()
            .filter(|r| matches!((&r.unique, &r.dominant), (Some(u), Some(d)) if u > d))
            .count();
        let mut monotone = 0;
        let worlds = 20;
        for i in 0..worlds as u64 {
            let w = generate_problem(15, i);
            let costs = [4, 6, 8]
                .iter()
                .map(|&n| design(&DesignRequest::new(w.clone(), n, Scenario::OptimalIc)).map(|d| d.cost))
                .collect::<Result<Vec<Q>, _>>()
                .map_err(err)?;
            if costs.windows(2).all(|c| c[1] <= c[0]) {
                monotone += 1;
            }
        }
        Ok((
            unordered.is_empty() && monotone == worlds,
            format!(
                "{} of {} instances violate pareto<=unique<=dominant (pareto>unique: {pareto_unique}, unique>dominant: {unique_dominant}); optimal-ic cost non-increasing over N=4,6,8 on {monotone}/{worlds} worlds",
                unordered.len(),
                rows.len()
            ),
        ))
    });
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    suite.run("1", "plumber incentive-compatible scheme", Some(Duration::from_secs(1)), criterion_1);
    suite.run("2", "reference-report table", None, criterion_2);
    suite.run("3", "unique-symmetric scheme", None, criterion_3);
    suite.run("4", "pareto-symmetric scheme", None, criterion_4);
    suite.run("5", "three pure equilibria at N=4", None, criterion_5);
    suite.run("6", "dominant scheme", None, criterion_6);
    suite.run("7", "sybil schemes", None, criterion_7);
    suite.run("8", "closed form equals LP", Some(Duration::from_secs(60)), criterion_8);
    suite.run("9", "likelihood-ratio monotonicity", None, criterion_9);
    suite.run("10", "constant-reporting equilibria exist", None, criterion_10);
    suite.run("11", "no mixed honest/liar equilibria", None, criterion_11);
    suite.run("12", "payoff versus brute force", None, criterion_12);
    suite.run("13", "scaled coalition bound at N=5", Some(Duration::from_secs(300)), criterion_13);
    criteria_14_15(&mut suite);
    if suite.failures == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
