//! JSON formats for worlds, schemes and verification reports.
//!
//! Numbers travel as decimal strings (or `p/q` when no terminating decimal
//! exists) and are parsed exactly.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::beliefs::{validate_world, RawWorld, Signal, World};
use crate::error::{FormatError, VerifyError};
use crate::exact::{self, Q};
use crate::mechanism::{self, PaymentScheme};
use crate::verifier::{self, EquilibriumReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldFile {
    pub types: Vec<String>,
    pub prior: Vec<String>,
    pub high_prob: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub n_agents: usize,
    pub pay0: Vec<String>,
    pub pay1: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn strings(values: &[Q]) -> Vec<String> {
    values.iter().map(exact::to_exact_string).collect()
}

fn numbers(values: &[String]) -> Result<Vec<Q>, FormatError> {
    values.iter().map(|s| Ok(exact::parse_exact(s)?)).collect()
}

impl WorldFile {
    pub fn from_world(world: &World) -> WorldFile {
        WorldFile {
            types: world.types().to_vec(),
            prior: strings(world.prior()),
            high_prob: strings(world.high_prob()),
        }
    }

    pub fn to_world(&self) -> Result<World, FormatError> {
        Ok(validate_world(RawWorld {
            types: self.types.clone(),
            prior: numbers(&self.prior)?,
            high_prob: numbers(&self.high_prob)?,
        })?)
    }
}

pub fn parse_world(text: &str) -> Result<World, FormatError> {
    serde_json::from_str::<WorldFile>(text)?.to_world()
}

pub fn world_to_json(world: &World) -> String {
    serde_json::to_string_pretty(&WorldFile::from_world(world)).expect("world serialises")
}

/// SHA-256 over the compact canonical JSON of the world, hex encoded.
pub fn world_digest(world: &World) -> String {
    let canonical = serde_json::to_vec(&WorldFile::from_world(world)).expect("world serialises");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

impl SchemeFile {
    pub fn from_scheme(scheme: &PaymentScheme) -> SchemeFile {
        SchemeFile {
            n_agents: scheme.n_agents(),
            pay0: strings(scheme.row(Signal::Low)),
            pay1: strings(scheme.row(Signal::High)),
            lambda: None,
            epsilon: None,
            provenance: None,
        }
    }

    pub fn to_scheme(&self) -> Result<PaymentScheme, FormatError> {
        Ok(PaymentScheme::new(self.n_agents, numbers(&self.pay0)?, numbers(&self.pay1)?)?)
    }
}

pub fn parse_scheme(text: &str) -> Result<PaymentScheme, FormatError> {
    serde_json::from_str::<SchemeFile>(text)?.to_scheme()
}

pub fn scheme_to_json(file: &SchemeFile) -> String {
    serde_json::to_string_pretty(file).expect("scheme serialises")
}

fn opt(q: Option<&Q>) -> Value {
    q.map_or(Value::Null, |q| Value::String(exact::to_exact_string(q)))
}

fn equilibrium_json(report: &EquilibriumReport) -> Value {
    let p = report.profile;
    json!({
        "profile": {"neg": p.neg, "pos": p.pos, "honest": p.honest, "lie": p.lie},
        "strict": report.is_strict_ne,
        "min_margin": opt(report.min_margin()),
        "groups": report.groups.iter().map(|g| json!({
            "strategy": g.strategy.name(),
            "count": g.count,
            "value": exact::to_exact_string(&g.value),
        })).collect::<Vec<_>>(),
    })
}

/// What the `verify` subcommand should include.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub enumerate: bool,
    pub dominance: Vec<usize>,
    pub margin: Option<Q>,
}

/// Honest-profile margins, optional equilibrium enumeration with Pareto
/// comparisons, and dominance verdicts.
pub fn verify_report(scheme: &PaymentScheme, world: &World, options: &VerifyOptions) -> Result<Value, VerifyError> {
    let n = scheme.n_agents();
    let honest = verifier::is_nash(scheme, world, &mechanism::ProfileCounts::honest(n))?;
    let honest_value = mechanism::honest_expected_value(scheme, world)?;
    let mut report = json!({
        "n_agents": n,
        "world_digest": world_digest(world),
        "honest": {
            "is_ne": honest.is_ne,
            "strict": honest.is_strict_ne,
            "min_margin": opt(honest.min_margin()),
            "value": exact::to_exact_string(&honest_value),
        },
    });
    if options.enumerate {
        let equilibria = verifier::enumerate_pure_equilibria(scheme, world)?;
        let mut pareto = Vec::new();
        for eq in &equilibria {
            let cmp = verifier::pareto_compare(scheme, world, &eq.profile)?;
            pareto.push(json!({
                "profile": [eq.profile.neg, eq.profile.pos, eq.profile.honest, eq.profile.lie],
                "dominates_honest": cmp.dominates,
                "signs": cmp.groups.iter().map(|g| json!({
                    "strategy": g.strategy.name(),
                    "versus_honest": g.versus_honest as i8,
                })).collect::<Vec<_>>(),
            }));
        }
        report["equilibria"] = equilibria.iter().map(equilibrium_json).collect();
        report["pareto"] = Value::Array(pareto);
    }
    if !options.dominance.is_empty() {
        let margin = options.margin.clone().unwrap_or_else(|| exact::int(1));
        let mut verdicts = Vec::new();
        for &n_col in &options.dominance {
            let d = verifier::is_dominant_honest(scheme, world, n_col, &margin)?;
            verdicts.push(json!({
                "n_col": n_col,
                "holds": d.holds,
                "min_gap": exact::to_exact_string(&d.min_gap),
            }));
        }
        report["dominance"] = Value::Array(verdicts);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    const PLUMBER: &str = r#"{"types": ["good", "bad"], "prior": ["0.8", "0.2"], "high_prob": ["0.9", "0.15"]}"#;

    #[test]
    fn world_round_trip_and_digest() {
        let w = parse_world(PLUMBER).unwrap();
        assert_eq!(w.prior(), &[ratio(4, 5), ratio(1, 5)]);
        assert_eq!(parse_world(&world_to_json(&w)).unwrap(), w);
        let d = world_digest(&w);
        assert_eq!(d.len(), 64);
        assert_eq!(d, world_digest(&w.clone()));
    }

    #[test]
    fn bad_prior_is_reported() {
        let err = parse_world(r#"{"types": ["a"], "prior": ["0.5"], "high_prob": ["0.3"]}"#).unwrap_err();
        assert_eq!(err.code(), "NonNormalizedPrior");
        assert_eq!(parse_world("{").unwrap_err().code(), "InvalidJson");
    }

    #[test]
    fn scheme_keeps_exact_thirds() {
        let s = PaymentScheme::new(2, vec![ratio(1, 3), ratio(0, 1)], vec![ratio(0, 1), ratio(37, 24)]).unwrap();
        let file = SchemeFile::from_scheme(&s);
        assert_eq!(file.pay0[0], "1/3");
        assert_eq!(parse_scheme(&scheme_to_json(&file)).unwrap(), s);
    }

    #[test]
    fn verify_report_lists_equilibria() {
        let w = parse_world(PLUMBER).unwrap();
        let s = PaymentScheme::new(2, vec![ratio(21, 8), ratio(0, 1)], vec![ratio(0, 1), ratio(37, 24)]).unwrap();
        let options = VerifyOptions {
            enumerate: true,
            dominance: vec![1],
            margin: None,
        };
        let r = verify_report(&s, &w, &options).unwrap();
        assert_eq!(r["honest"]["min_margin"], "1");
        assert!(r["equilibria"].as_array().unwrap().len() >= 3);
        assert_eq!(r["dominance"][0]["holds"], true);
    }
}
