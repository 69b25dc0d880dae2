//! Turning flags and an optional JSON config file into one validated run.

use std::path::PathBuf;
use std::result::Result;

use clap::{Args, ValueEnum};
use hopf_chains::algebras::DEFAULT_STATE_CAP;
use hopf_chains::catalog::tree::{example_company, TreeChainConfig, TreeModel};
use hopf_chains::prelude::*;
use serde_json::Value;

use crate::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Human-readable table; `verify` only.
    Table,
}

/// Flags shared by every subcommand. Each one overrides the same key in `--config`.
#[derive(Args, Debug, Default, Clone)]
pub struct Opts {
    /// tree | todo | shuffle | rock
    #[arg(long, global = true)]
    pub chain: Option<String>,
    /// JSON file with the same keys as the flags; numeric parameters sit under "params"
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Operator: ter, trer, binter, tober, bintobrer, trintober, taber, tabrer, riffle, identity
    #[arg(long, global = true)]
    pub kind: Option<String>,
    /// Tree model: single | binomial | vp
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Start tree in compact notation, e.g. "*(A,C(D))"
    #[arg(long, global = true)]
    pub tree: Option<String>,
    /// Deck as comma-separated card values, e.g. 1,1,2,3
    #[arg(long, global = true)]
    pub deck: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Parameter of tober and bintobrer
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub q1: Option<String>,
    #[arg(long, global = true)]
    pub q2: Option<String>,
    #[arg(long, global = true)]
    pub q3: Option<String>,
    #[arg(long, global = true)]
    pub t: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Start state as JSON; defaults to the chain's natural start
    #[arg(long, global = true)]
    pub x0: Option<String>,
    /// team:s1,s2,... | subtree:TREE | vp:j | f:ONE-LINE
    #[arg(long, global = true)]
    pub observable: Option<String>,
    /// Number of trailing letters kept by `lump` on the to-do list
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Suite name for `verify`; repeatable, all suites when absent
    #[arg(long, global = true)]
    pub suite: Vec<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "DCHAIN_STATE_CAP")]
    pub state_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chain {
    Tree(TreeChainConfig),
    Todo { kind: OperatorKind, n: usize },
    Shuffle { kind: OperatorKind, deck: Vec<u32> },
    Rock { kind: OperatorKind, n: usize },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub chain: Option<Chain>,
    pub t: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub x0: Option<Value>,
    pub observable: Option<String>,
    pub k: Option<usize>,
    pub suites: Vec<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub cap: usize,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// A rational from a flag or a config value: "num/den", an integer, or a JSON integer.
fn rational_value(v: &Value, key: &str) -> Result<Rational, CliError> {
    match v {
        Value::String(s) => Ok(parse_rational(s)?),
        Value::Number(x) if x.is_i64() || x.is_u64() => Ok(parse_rational(&x.to_string())?),
        _ => Err(config_error(format!("{key} must be an integer or \"num/den\", got {v}"))),
    }
}

/// Looks a key up among the flags first, then `params`, then the top level of the file.
struct Source<'a> {
    file: &'a Value,
}

impl Source<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.file.get("params").and_then(|p| p.get(key)).or_else(|| self.file.get(key))
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Result<Option<String>, CliError> {
        if let Some(s) = flag {
            return Ok(Some(s.clone()));
        }
        match self.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(config_error(format!("{key} must be a string, got {other}"))),
        }
    }

    fn rational(&self, flag: &Option<String>, key: &str) -> Result<Option<Rational>, CliError> {
        if let Some(s) = flag {
            return Ok(Some(parse_rational(s)?));
        }
        self.get(key).map(|v| rational_value(v, key)).transpose()
    }

    fn count(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| config_error(format!("{key} must be a nonnegative integer, got {v}"))),
        }
    }
}

fn required(v: Option<Rational>, key: &str, kind: &str) -> Result<Rational, CliError> {
    v.ok_or_else(|| config_error(format!("{kind} needs --{key}")))
}

fn operator(src: &Source, o: &Opts) -> Result<OperatorKind, CliError> {
    let name = src.string(&o.kind, "kind")?.ok_or_else(|| config_error("this chain needs --kind"))?;
    let r = || src.count(o.r, "r")?.ok_or_else(|| config_error(format!("{name} needs --r")));
    let q = |key: &str, flag: &Option<String>| -> Result<Rational, CliError> { required(src.rational(flag, key)?, key, &name) };
    Ok(match name.as_str() {
        "ter" => OperatorKind::Ter,
        "trer" => OperatorKind::Trer { r: r()? },
        "binter" => OperatorKind::Binter { q2: q("q2", &o.q2)? },
        "tober" => OperatorKind::Tober { q: q("q", &o.q)? },
        "bintobrer" => OperatorKind::Bintobrer { r: r()?, q: q("q", &o.q)? },
        "trintober" => OperatorKind::Trintober { q1: q("q1", &o.q1)?, q2: q("q2", &o.q2)?, q3: q("q3", &o.q3)? },
        "taber" => OperatorKind::Taber,
        "tabrer" => OperatorKind::Tabrer { r: r()? },
        "riffle" => OperatorKind::Riffle,
        "identity" => OperatorKind::Identity,
        other => return Err(config_error(format!("unknown operator {other:?}"))),
    })
}

fn tree_model(src: &Source, o: &Opts) -> Result<TreeModel, CliError> {
    let name = src.string(&o.model, "model")?.unwrap_or_else(|| "single".into());
    let q = |key: &str, flag: &Option<String>| -> Result<Rational, CliError> { required(src.rational(flag, key)?, key, &name) };
    Ok(match name.as_str() {
        "single" => TreeModel::Single,
        "binomial" => TreeModel::Binomial { q2: q("q2", &o.q2)? },
        "vp" => TreeModel::Vp { q1: q("q1", &o.q1)?, q2: q("q2", &o.q2)?, q3: q("q3", &o.q3)? },
        other => return Err(config_error(format!("unknown tree model {other:?}"))),
    })
}

fn deck(src: &Source, o: &Opts) -> Result<Option<Vec<u32>>, CliError> {
    if let Some(s) = &o.deck {
        return s
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| config_error(format!("bad card {c:?} in --deck"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some);
    }
    match src.get("deck") {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(cards)) => cards
            .iter()
            .map(|c| c.as_u64().map(|x| x as u32).ok_or_else(|| config_error(format!("bad card {c}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(other) => Err(config_error(format!("deck must be an array, got {other}"))),
    }
}

impl RunConfig {
    pub fn resolve(o: &Opts) -> Result<RunConfig, CliError> {
        let file = match &o.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?
            }
            None => Value::Null,
        };
        let src = Source { file: &file };
        let cap = match o.state_cap {
            Some(c) => c,
            None => src.count(None, "state_cap")?.unwrap_or(DEFAULT_STATE_CAP),
        };
        if cap == 0 {
            return Err(config_error("the state cap must be positive"));
        }
        let n = src.count(o.n, "n")?;
        let chain = match src.string(&o.chain, "chain")?.as_deref() {
            None => None,
            Some("tree") => {
                let start = match src.string(&o.tree, "tree")? {
                    Some(s) => Forest::parse(&s)?,
                    None => example_company(),
                };
                Some(Chain::Tree(TreeChainConfig::new(start, tree_model(&src, o)?)?))
            }
            Some("todo") => {
                let n = n.ok_or_else(|| config_error("the to-do list needs --n"))?;
                Some(Chain::Todo { kind: operator(&src, o)?, n })
            }
            Some("shuffle") => {
                let deck = match (deck(&src, o)?, n) {
                    (Some(d), Some(n)) if d.len() != n => {
                        return Err(config_error(format!("--n {n} disagrees with a deck of {} cards", d.len())))
                    }
                    (Some(d), _) => d,
                    (None, Some(n)) => (1..=n as u32).collect(),
                    (None, None) => return Err(config_error("shuffling needs --deck or --n")),
                };
                Some(Chain::Shuffle { kind: operator(&src, o)?, deck })
            }
            Some("rock") => {
                let n = n.ok_or_else(|| config_error("rock breaking needs --n"))?;
                Some(Chain::Rock { kind: operator(&src, o)?, n })
            }
            Some(other) => return Err(config_error(format!("unknown chain {other:?}; expected tree, todo, shuffle or rock"))),
        };
        let x0 = match &o.x0 {
            Some(s) => Some(serde_json::from_str(s).map_err(|e| config_error(format!("--x0 is not JSON: {e}")))?),
            None => src.get("x0").cloned(),
        };
        let mut suites = o.suite.clone();
        if suites.is_empty() {
            if let Some(Value::Array(xs)) = src.get("suite") {
                suites = xs.iter().filter_map(|x| x.as_str().map(str::to_string)).collect();
            }
        }
        Ok(RunConfig {
            chain,
            t: src.count(o.t, "t")?,
            trials: src.count(o.trials, "trials")?.unwrap_or(10_000),
            seed: match o.seed {
                Some(s) => s,
                None => src.count(None, "seed")?.unwrap_or(0) as u64,
            },
            x0,
            observable: src.string(&o.observable, "observable")?,
            k: src.count(o.k, "k")?,
            suites,
            format: o.format,
            out: o.out.clone(),
            cap,
        })
    }

    pub fn chain(&self) -> Result<&Chain, CliError> {
        self.chain.as_ref().ok_or_else(|| config_error("this subcommand needs --chain"))
    }
}
