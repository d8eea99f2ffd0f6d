//! `crowdpay`: design, verify and benchmark feedback payment schemes.
//!
//! Exit status 0 on success, 1 on domain errors (reported as one JSON object
//! on standard error), 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crowdpay::beliefs::{Signal, World};
use crowdpay::designers::{self, CoalitionScenario, DesignRequest, Mode, Objective, Scenario, ScoringRule};
use crowdpay::exact::{self, Q};
use crowdpay::harness::{self, ExperimentConfig};
use crowdpay::io::{self, Provenance, SchemeFile, VerifyOptions};
use crowdpay::mechanism::{self, PaymentScheme};

#[derive(Parser)]
#[command(name = "crowdpay", version, about = "Minimum-cost payment schemes for honest feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a payment scheme for one scenario.
    Design(DesignArgs),
    /// Check a scheme: honest margins, equilibria, dominance.
    Verify(VerifyArgs),
    /// Run a seeded batch experiment and write CSV.
    Experiment(ExperimentArgs),
    /// Draw a random world.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    OptimalIc,
    UniqueSymmetric,
    ParetoSymmetric,
    FullAsymmetricPareto,
    PartialSymmetric,
    PartialAsymmetric,
    Dominant,
    Sybil,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeName {
    Unique,
    Pareto,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveName {
    PerReport,
    TotalBudget,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleName {
    Quadratic,
    Log,
}

fn decimal(s: &str) -> Result<Q, String> {
    exact::parse_exact(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioName,
    /// World JSON file.
    #[arg(long)]
    world: PathBuf,
    /// Number of agents N.
    #[arg(long)]
    n: usize,
    /// Coalition size for the coalition scenarios.
    #[arg(long)]
    ncol: Option<usize>,
    #[arg(long, value_enum, default_value = "unique")]
    mode: ModeName,
    /// Truth-telling margin.
    #[arg(long, value_parser = decimal, default_value = "1")]
    lambda: Q,
    /// Small consensus payment; defaults to lambda/1000.
    #[arg(long, value_parser = decimal)]
    epsilon: Option<Q>,
    /// Slack closing strict inequalities.
    #[arg(long, value_parser = decimal, default_value = "0")]
    delta: Q,
    #[arg(long, value_enum, default_value = "per-report")]
    objective: ObjectiveName,
    /// Use the closed form (optimal-ic, unique-symmetric, or sybil with n_col = N-1).
    #[arg(long)]
    closed_form: bool,
    /// Scoring rule of the closed-form sybil scheme.
    #[arg(long, value_enum, default_value = "quadratic")]
    rule: RuleName,
    /// Optimise over the whole table (partial-asymmetric, N <= 6).
    #[arg(long)]
    full_table: bool,
    /// Output scheme file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long)]
    scheme: PathBuf,
    /// List every pure equilibrium with its Pareto comparison.
    #[arg(long)]
    enumerate: bool,
    /// Coalition sizes to test for honest dominance.
    #[arg(long, value_delimiter = ',')]
    dominance: Vec<usize>,
    /// Margin for the dominance checks.
    #[arg(long, value_parser = decimal)]
    lambda: Option<Q>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    CostCurve,
    CoalitionBound,
    ConceptCompare,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveScenario {
    Dominant,
    Sybil,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Comma-separated agent counts.
    #[arg(long, value_delimiter = ',', default_value = "5,10")]
    agents: Vec<usize>,
    #[arg(long, value_parser = decimal, default_value = "1")]
    lambda: Q,
    /// Scenario of the cost curve.
    #[arg(long, value_enum, default_value = "dominant")]
    scenario: CurveScenario,
    /// Significant digits in the CSV.
    #[arg(long, default_value_t = 6)]
    digits: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    /// Problem index within the seeded run.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A domain failure: a stable code plus a human-readable message.
struct Failure {
    code: String,
    message: String,
}

macro_rules! failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure { code: e.code().to_string(), message: e.to_string() }
            }
        }
    )*};
}

failure_from!(
    crowdpay::error::DesignError,
    crowdpay::error::VerifyError,
    crowdpay::error::FormatError,
    crowdpay::error::SchemeError
);

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: "Io".into(),
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_world(path: &Path) -> Result<World, Failure> {
    Ok(io::parse_world(&read(path)?)?)
}

fn needs_ncol(args: &DesignArgs) -> Result<usize, Failure> {
    args.ncol.ok_or_else(|| Failure {
        code: "InvalidRequest".into(),
        message: "this scenario needs --ncol".into(),
    })
}

fn scenario(args: &DesignArgs) -> Result<Scenario, Failure> {
    let mode = match args.mode {
        ModeName::Unique => Mode::Unique,
        ModeName::Pareto => Mode::Pareto,
    };
    Ok(match args.scenario {
        ScenarioName::OptimalIc => Scenario::OptimalIc,
        ScenarioName::UniqueSymmetric => Scenario::UniqueSymmetric,
        ScenarioName::ParetoSymmetric => Scenario::ParetoSymmetric,
        ScenarioName::FullAsymmetricPareto => Scenario::FullAsymmetricPareto,
        ScenarioName::PartialSymmetric => Scenario::PartialSymmetric { n_col: needs_ncol(args)?, mode },
        ScenarioName::PartialAsymmetric => Scenario::PartialAsymmetric { n_col: needs_ncol(args)?, mode },
        ScenarioName::Dominant => Scenario::Dominant { n_col: needs_ncol(args)? },
        ScenarioName::Sybil => Scenario::Sybil { n_col: needs_ncol(args)? },
    })
}

fn closed_form(req: &DesignRequest, rule: RuleName) -> Result<PaymentScheme, Failure> {
    req.validate()?;
    let (world, n) = (&req.world, req.n_agents);
    Ok(match req.scenario {
        Scenario::OptimalIc => designers::closed_form_optimal_ic(world, n, &req.margin)?,
        Scenario::UniqueSymmetric => {
            designers::closed_form_unique_symmetric(world, n, &req.margin, &req.epsilon, &req.delta)?.0
        }
        Scenario::Sybil { n_col } if n_col + 1 == n => {
            let rule = match rule {
                RuleName::Quadratic => ScoringRule::Quadratic,
                RuleName::Log => ScoringRule::Logarithmic,
            };
            designers::closed_form_sybil(world, n, &req.margin, rule)?
        }
        _ => {
            return Err(Failure {
                code: "InvalidRequest".into(),
                message: format!("no closed form for {}", req.scenario),
            })
        }
    })
}

fn summary(scheme: &PaymentScheme, cost: &Q) -> String {
    let row = |signal| {
        scheme
            .row(signal)
            .iter()
            .map(|v| format!("{:>10}", exact::format_sig(v, 4)))
            .collect::<String>()
    };
    format!(
        "tau(0,.) {}\ntau(1,.) {}\nexpected payment {}\n",
        row(Signal::Low),
        row(Signal::High),
        exact::format_sig(cost, 6)
    )
}

fn run_design(args: DesignArgs) -> Result<(), Failure> {
    let world = load_world(&args.world)?;
    let digest = io::world_digest(&world);
    let mut req = DesignRequest::new(world, args.n, scenario(&args)?)
        .with_margin(args.lambda.clone())
        .with_delta(args.delta.clone())
        .with_full_table(args.full_table)
        .with_objective(match args.objective {
            ObjectiveName::PerReport => Objective::PerReport,
            ObjectiveName::TotalBudget => Objective::TotalBudget,
        });
    if let Some(eps) = &args.epsilon {
        req = req.with_epsilon(eps.clone());
    }
    let scheme = if args.closed_form {
        closed_form(&req, args.rule)?
    } else {
        designers::design(&req)?.scheme
    };
    let cost = mechanism::honest_expected_value(&scheme, &req.world)?;
    let mut file = SchemeFile::from_scheme(&scheme);
    file.lambda = Some(exact::to_exact_string(&req.margin));
    file.epsilon = Some(exact::to_exact_string(&req.epsilon));
    file.provenance = Some(Provenance {
        scenario: Some(req.scenario.to_string()),
        world_digest: Some(digest),
    });
    let text = io::scheme_to_json(&file) + "\n";
    match &args.output {
        Some(path) => {
            emit(Some(path), &text)?;
            print!("{}", summary(&scheme, &cost));
        }
        None => emit(None, &text)?,
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let world = load_world(&args.world)?;
    let scheme = io::parse_scheme(&read(&args.scheme)?)?;
    let options = VerifyOptions {
        enumerate: args.enumerate,
        dominance: args.dominance,
        margin: args.lambda,
    };
    let report = io::verify_report(&scheme, &world, &options)?;
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    emit(args.output.as_deref(), &text)
}

fn run_experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let mut config = ExperimentConfig::new(args.seed)
        .with_samples(args.samples)
        .with_agent_counts(args.agents);
    config.margin = args.lambda;
    config.digits = args.digits;
    let csv = match args.kind {
        ExperimentKind::CostCurve => {
            let scenario = match args.scenario {
                CurveScenario::Dominant => CoalitionScenario::Dominant,
                CurveScenario::Sybil => CoalitionScenario::Sybil,
            };
            harness::cost_curve_csv(&config, &harness::run_cost_curve(&config, scenario)?)
        }
        ExperimentKind::CoalitionBound => harness::coalition_bound_csv(&config, &harness::run_coalition_bound(&config)?),
        ExperimentKind::ConceptCompare => harness::concept_csv(&config, &harness::run_concept_comparison(&config)?),
    };
    emit(args.output.as_deref(), &csv)
}

fn run_generate(args: GenerateArgs) -> Result<(), Failure> {
    let world = harness::generate_problem(args.seed, args.index);
    emit(args.output.as_deref(), &(io::world_to_json(&world) + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(a) => run_design(a),
        Command::Verify(a) => run_verify(a),
        Command::Experiment(a) => run_experiment(a),
        Command::Generate(a) => run_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({"error": f.code, "message": f.message}));
            ExitCode::from(1)
        }
    }
}
