//! The subcommands. Each returns its JSON and CSV renderings; `main` picks one.

use std::collections::BTreeMap;
use std::result::Result;

use hopf_chains::catalog::rock::{rock_chain, rock_matrix};
use hopf_chains::catalog::shuffle::{deck_spectrum, shuffle_chain};
use hopf_chains::catalog::todo::{f_tau, first_moved, fqsym_eigenbasis, last_k, todo_chain, todo_matrix, TodoSampler};
use hopf_chains::catalog::tree::{
    core_tree, team_count_observable, tree_chain_matrix, tree_eigenbasis, tree_eigenfunction, vp_observable, TreeChainConfig,
    TreeModel, TreeSampler,
};
use hopf_chains::catalog::Observable;
use hopf_chains::chain::LumpViolation;
use hopf_chains::prelude::*;
use hopf_chains::sim::{estimate_expectation, run_trajectories, state_counts, StepSampler};
use hopf_chains::spectral::{
    algebra_dims, spectrum, stationary_distributions, t2r_spectrum, triangular_spectrum, EigenFunction, Side, SpectrumReport,
};
use hopf_chains::verify::{run_suite, SuiteReport, SUITES};
use serde_json::{json, Value};

use crate::config::{Chain, RunConfig};
use crate::CliError;

pub struct Output {
    pub json: Value,
    pub csv: String,
    pub table: Option<String>,
    /// Set when a verification check failed; the output is still written.
    pub failure: Option<String>,
}

impl Output {
    fn new(json: Value, csv: String) -> Self {
        Output { json, csv, table: None, failure: None }
    }
}

/// Quotes a CSV field when it holds a separator or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn rat_json(r: &Rational) -> Value {
    Value::String(fmt_rational(r))
}

fn unsupported(what: &str, chain: &Chain) -> CliError {
    let name = match chain {
        Chain::Tree(_) => "tree",
        Chain::Todo { .. } => "todo",
        Chain::Shuffle { .. } => "shuffle",
        Chain::Rock { .. } => "rock",
    };
    CliError::Config(format!("{what} is not available for the {name} chain"))
}

fn lump_error<B: StateCodec, C: StateCodec>(v: LumpViolation<B, C>) -> CliError {
    CliError::Config(format!(
        "not lumpable: states {} and {} send mass {} and {} to {}",
        v.first.render(),
        v.second.render(),
        fmt_rational(&v.first_mass),
        fmt_rational(&v.second_mass),
        v.target.render()
    ))
}

/// The forest standing for a tree inside the chain started from `cfg.start`.
fn padded(cfg: &TreeChainConfig, t: &Forest) -> Forest {
    let n0 = cfg.n0();
    if t.size() >= n0 {
        t.clone()
    } else if t.size() <= 1 {
        Forest::singletons(n0)
    } else {
        t.union(&Forest::singletons(n0 - t.size()))
    }
}

fn lumps_to_trees(cfg: &TreeChainConfig) -> bool {
    !matches!(cfg.model, TreeModel::Vp { .. })
}

fn start_state<B: StateCodec>(run: &RunConfig, default: B) -> Result<B, CliError> {
    match &run.x0 {
        Some(v) => Ok(B::from_json(v)?),
        None => Ok(default),
    }
}

enum Built {
    Tree(TransitionMatrix<Forest>),
    Todo(TransitionMatrix<Permutation>),
    Shuffle(TransitionMatrix<Word>),
    Rock(TransitionMatrix<IntPartition>),
}

macro_rules! each {
    ($b:expr, $k:ident => $e:expr) => {
        match $b {
            Built::Tree($k) => $e,
            Built::Todo($k) => $e,
            Built::Shuffle($k) => $e,
            Built::Rock($k) => $e,
        }
    };
}

fn build(chain: &Chain, cap: usize) -> Result<Built, CliError> {
    Ok(match chain {
        Chain::Tree(cfg) => {
            let h = Hopf::new(ConnesKreimer);
            Built::Tree(tree_chain_matrix(cfg, &h, cap)?)
        }
        Chain::Todo { kind, n } => Built::Todo(todo_matrix(&Hopf::new(Fqsym), kind, *n, cap)?),
        Chain::Shuffle { kind, deck } => {
            let h = Hopf::new(ShuffleAlgebra::new());
            Built::Shuffle(shuffle_chain(&h, kind.distribution(deck.len())?, deck, cap)?.build_transition_matrix()?)
        }
        Chain::Rock { kind, n } => Built::Rock(rock_matrix(&Hopf::new(SymE), kind, *n, cap)?),
    })
}

pub fn matrix(run: &RunConfig) -> Result<Output, CliError> {
    let b = build(run.chain()?, run.cap)?;
    Ok(each!(&b, k => Output::new(k.to_json(), k.to_csv())))
}

fn spectrum_output(r: &SpectrumReport) -> Output {
    let mut csv = String::from("value,multiplicity\n");
    for e in &r.entries {
        csv.push_str(&format!("{},{}\n", fmt_rational(&e.value), e.multiplicity));
    }
    Output::new(r.to_json(), csv)
}

pub fn spectrum_cmd(run: &RunConfig) -> Result<Output, CliError> {
    let chain = run.chain()?;
    let report = match chain {
        Chain::Tree(_) => {
            let Built::Tree(k) = build(chain, run.cap)? else { unreachable!() };
            triangular_spectrum(&k).ok_or_else(|| CliError::Config("the tree chain is not triangular".into()))?
        }
        Chain::Todo { kind, n } => {
            TodoSampler::new(kind.clone(), *n)?;
            t2r_spectrum(kind, *n, &algebra_dims(&Fqsym, *n)?, 1)?
        }
        Chain::Shuffle { kind, deck } => deck_spectrum(&kind.distribution(deck.len())?, deck, run.cap)?,
        Chain::Rock { kind, n } => {
            rock_chain(&Hopf::new(SymE), kind, *n, run.cap)?;
            spectrum(&kind.distribution(*n)?, &algebra_dims(&SymE, *n)?)?
        }
    };
    Ok(spectrum_output(&report))
}

fn functions_output<B: Ord + std::hash::Hash + Clone + StateCodec>(key: &str, fs: &[(Option<Value>, EigenFunction<B>)]) -> Output {
    let mut csv = String::from("index,label,eigenvalue,state,value\n");
    let mut items = Vec::new();
    for (i, (label, f)) in fs.iter().enumerate() {
        let label_text = label.as_ref().map(Value::to_string).unwrap_or_default();
        for (s, v) in &f.values {
            csv.push_str(&format!(
                "{i},{},{},{},{}\n",
                csv_field(&label_text),
                fmt_rational(&f.eigenvalue),
                csv_field(&s.render()),
                fmt_rational(v)
            ));
        }
        let mut item = f.to_json();
        if let Some(l) = label {
            item["label"] = l.clone();
        }
        items.push(item);
    }
    Output::new(json!({ key: items }), csv)
}

pub fn stationary(run: &RunConfig) -> Result<Output, CliError> {
    let chain = run.chain()?;
    fn unlabelled<B: Ord>(fs: Vec<EigenFunction<B>>) -> Vec<(Option<Value>, EigenFunction<B>)> {
        fs.into_iter().map(|f| (None, f)).collect()
    }
    Ok(match chain {
        Chain::Tree(cfg) => {
            let h = Hopf::new(ConnesKreimer);
            let spec = cfg.hopf_chain(&h, run.cap)?;
            let k = spec.build_transition_matrix()?;
            let pis = stationary_distributions(&spec, &k)?;
            if lumps_to_trees(cfg) {
                let lumped = tree_chain_matrix(cfg, &h, run.cap)?;
                let mut out = Vec::new();
                for pi in pis {
                    let mut values: BTreeMap<Forest, Rational> = BTreeMap::new();
                    for (x, v) in pi.values {
                        *values.entry(core_tree(&x)).or_default() += v;
                    }
                    out.push((None, EigenFunction::verified(&lumped, Side::Left, Rational::from_integer(1.into()), values)?));
                }
                functions_output("distributions", &out)
            } else {
                functions_output("distributions", &unlabelled(pis))
            }
        }
        Chain::Todo { kind, n } => {
            let h = Hopf::new(Fqsym);
            let spec = todo_chain(&h, kind, *n, run.cap)?;
            let k = spec.build_transition_matrix()?;
            functions_output("distributions", &unlabelled(stationary_distributions(&spec, &k)?))
        }
        Chain::Shuffle { kind, deck } => {
            let h = Hopf::new(ShuffleAlgebra::new());
            let spec = shuffle_chain(&h, kind.distribution(deck.len())?, deck, run.cap)?;
            let k = spec.build_transition_matrix()?;
            functions_output("distributions", &unlabelled(stationary_distributions(&spec, &k)?))
        }
        Chain::Rock { kind, n } => {
            let h = Hopf::new(SymE);
            let spec = rock_chain(&h, kind, *n, run.cap)?;
            let k = spec.build_transition_matrix()?;
            functions_output("distributions", &unlabelled(stationary_distributions(&spec, &k)?))
        }
    })
}

pub fn eigenbasis(run: &RunConfig) -> Result<Output, CliError> {
    let chain = run.chain()?;
    match (chain, build(chain, run.cap)?) {
        (Chain::Tree(cfg), Built::Tree(k)) if lumps_to_trees(cfg) => {
            let basis = tree_eigenbasis(cfg, &k)?;
            let labels = std::iter::once(None).chain(k.states().iter().filter(|s| s.size() > 1).map(|s| Some(s.to_json())));
            let fs: Vec<_> = labels.zip(basis).collect();
            Ok(functions_output("functions", &fs))
        }
        (Chain::Todo { kind, n }, Built::Todo(k)) => {
            let fs: Vec<_> = fqsym_eigenbasis(&k, kind, *n)?.into_iter().map(|(tau, f)| (Some(tau.to_json()), f)).collect();
            Ok(functions_output("functions", &fs))
        }
        _ => Err(unsupported("an explicit eigenbasis", chain)),
    }
}

fn observable_from_values(name: &str, f: EigenFunction<Forest>) -> Observable<Forest> {
    let beta = f.eigenvalue.clone();
    Observable::new(name, move |x: &Forest| f.value(&core_tree(x))).with_eigenvalue(beta)
}

fn tree_observable(cfg: &TreeChainConfig, spec: &str, cap: usize) -> Result<Observable<Forest>, CliError> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "team" => {
            let s = if arg.is_empty() {
                Vec::new()
            } else {
                arg.split(',')
                    .map(|x| x.trim().parse().map_err(|_| CliError::Config(format!("bad team size {x:?}"))))
                    .collect::<Result<Vec<usize>, _>>()?
            };
            Ok(team_count_observable(cfg, &s)?)
        }
        "subtree" => {
            let t = Forest::parse(arg)?;
            let k = tree_chain_matrix(cfg, &Hopf::new(ConnesKreimer), cap)?;
            Ok(observable_from_values(spec, tree_eigenfunction(cfg, &k, &t)?))
        }
        "vp" => {
            let TreeModel::Vp { q1, q3, .. } = &cfg.model else {
                return Err(CliError::Config("vp observables need the vp model".into()));
            };
            let j = arg.parse().map_err(|_| CliError::Config(format!("bad index {arg:?}")))?;
            Ok(vp_observable(q1, q3, cfg.n0(), j)?)
        }
        other => Err(CliError::Config(format!("unknown tree observable {other:?}; expected team, subtree or vp"))),
    }
}

fn todo_observable(kind: &OperatorKind, n: usize, spec: &str) -> Result<Observable<Permutation>, CliError> {
    let Some(word) = spec.strip_prefix("f:") else {
        return Err(CliError::Config(format!("unknown to-do observable {spec:?}; expected f:ONE-LINE")));
    };
    let letters = word
        .chars()
        .map(|c| c.to_digit(10).ok_or_else(|| CliError::Config(format!("bad letter {c:?} in {word}"))))
        .collect::<Result<Vec<u32>, _>>()?;
    let tau = Permutation::new(letters)?;
    if tau.len() != n {
        return Err(CliError::Config(format!("{word} is not in S_{n}")));
    }
    let j = first_moved(&tau);
    let beta = if j == n { Rational::from_integer(1.into()) } else { kind.t2r_eigenvalue(n, j)? };
    f_tau(&tau, &tau)?;
    Ok(Observable::new(spec, move |s: &Permutation| f_tau(&tau, s).expect("same degree")).with_eigenvalue(beta))
}

fn simulate_with<B, S>(run: &RunConfig, sampler: &S, x0: B, obs: Option<Observable<B>>) -> Result<Output, CliError>
where
    B: Ord + Clone + Send + Sync + StateCodec,
    S: StepSampler<B>,
{
    let t = run.t.unwrap_or(1);
    if run.trials == 0 {
        return Err(CliError::Config("--trials must be positive".into()));
    }
    let ends = run_trajectories(sampler, &x0, t, run.trials, run.seed)?;
    let counts = state_counts(&ends);
    let report = obs.map(|f| estimate_expectation(sampler, &f, &x0, t, run.trials, run.seed)).transpose()?;
    let mut csv = String::from("state,count\n");
    for (s, c) in &counts {
        csv.push_str(&format!("{},{c}\n", csv_field(&s.render())));
    }
    let json = json!({
        "t": t,
        "trials": run.trials,
        "seed": run.seed,
        "x0": x0.to_json(),
        "counts": counts.iter().map(|(s, c)| json!({"state": s.to_json(), "count": c})).collect::<Vec<_>>(),
        "report": report.as_ref().map(|r| r.to_json()),
    });
    Ok(Output::new(json, csv))
}

pub fn simulate(run: &RunConfig) -> Result<Output, CliError> {
    let chain = run.chain()?;
    match chain {
        Chain::Tree(cfg) => {
            let x0: Forest = start_state(run, cfg.start.clone())?;
            let obs = run.observable.as_deref().map(|s| tree_observable(cfg, s, run.cap)).transpose()?;
            if lumps_to_trees(cfg) {
                simulate_with(run, &TreeSampler::new(cfg.clone())?, x0, obs)
            } else {
                let h = Hopf::new(ConnesKreimer);
                let spec = cfg.hopf_chain(&h, run.cap)?;
                simulate_with(run, &spec, padded(cfg, &x0), obs)
            }
        }
        Chain::Todo { kind, n } => {
            let x0 = start_state(run, Permutation::identity(*n))?;
            let obs = run.observable.as_deref().map(|s| todo_observable(kind, *n, s)).transpose()?;
            simulate_with(run, &TodoSampler::new(kind.clone(), *n)?, x0, obs)
        }
        _ if run.observable.is_some() => Err(unsupported("a named observable", chain)),
        Chain::Shuffle { kind, deck } => {
            let h = Hopf::new(ShuffleAlgebra::new());
            let spec = shuffle_chain(&h, kind.distribution(deck.len())?, deck, run.cap)?;
            simulate_with(run, &spec, start_state(run, Word::new(deck.clone()))?, None)
        }
        Chain::Rock { kind, n } => {
            let h = Hopf::new(SymE);
            let spec = rock_chain(&h, kind, *n, run.cap)?;
            simulate_with(run, &spec, start_state(run, IntPartition::new(vec![*n as u32])?)?, None)
        }
    }
}

pub fn lump(run: &RunConfig) -> Result<Output, CliError> {
    let chain = run.chain()?;
    match chain {
        Chain::Todo { kind, n } => {
            let k = run.k.ok_or_else(|| CliError::Config("lumping the to-do list needs --k".into()))?;
            if k == 0 || k > *n {
                return Err(CliError::Config(format!("--k must lie in 1..={n}")));
            }
            let m = todo_matrix(&Hopf::new(Fqsym), kind, *n, run.cap)?;
            let q = m.lump(last_k(k)).map_err(lump_error)?;
            Ok(Output::new(q.to_json(), q.to_csv()))
        }
        Chain::Tree(cfg) => {
            let h = Hopf::new(ConnesKreimer);
            let m = cfg.hopf_chain(&h, run.cap)?.build_transition_matrix()?;
            let q = m.lump(core_tree).map_err(lump_error)?;
            Ok(Output::new(q.to_json(), q.to_csv()))
        }
        _ => Err(unsupported("lumping", chain)),
    }
}

pub fn absorb(run: &RunConfig) -> Result<Output, CliError> {
    let chain = run.chain()?;
    let t = run.t.unwrap_or(1);
    let built = build(chain, run.cap)?;
    let (x0_json, rows): (Value, Vec<(Rational, Option<Rational>)>) = match (chain, &built) {
        (Chain::Tree(cfg), Built::Tree(k)) => {
            let x0 = start_state(run, cfg.start.clone())?;
            let h = Hopf::new(ConnesKreimer);
            let spec = cfg.hopf_chain(&h, run.cap)?;
            let state = if lumps_to_trees(cfg) { x0.clone() } else { padded(cfg, &x0) };
            let forest = padded(cfg, &x0);
            let mut rows = Vec::new();
            for s in 1..=t {
                rows.push((k.absorption_probability(&state, s)?, Some(spec.absorption_via_qsym(&forest, s)?)));
            }
            (x0.to_json(), rows)
        }
        (Chain::Rock { kind, n }, Built::Rock(k)) => {
            let x0 = start_state(run, IntPartition::new(vec![*n as u32])?)?;
            let h = Hopf::new(SymE);
            let spec = rock_chain(&h, kind, *n, run.cap)?;
            let mut rows = Vec::new();
            for s in 1..=t {
                rows.push((k.absorption_probability(&x0, s)?, Some(spec.absorption_via_qsym(&x0, s)?)));
            }
            (x0.to_json(), rows)
        }
        (Chain::Todo { n, .. }, Built::Todo(k)) => {
            let x0 = start_state(run, Permutation::identity(*n))?;
            ((x0.to_json()), (1..=t).map(|s| Ok((k.absorption_probability(&x0, s)?, None))).collect::<Result<_, CliError>>()?)
        }
        (Chain::Shuffle { deck, .. }, Built::Shuffle(k)) => {
            let x0 = start_state(run, Word::new(deck.clone()))?;
            ((x0.to_json()), (1..=t).map(|s| Ok((k.absorption_probability(&x0, s)?, None))).collect::<Result<_, CliError>>()?)
        }
        _ => unreachable!("build follows the chain"),
    };
    let absorbing = each!(&built, k => k.absorbing_states().iter().map(StateCodec::to_json).collect::<Vec<_>>());
    let mut csv = String::from("t,matrix,qsym\n");
    for (i, (m, q)) in rows.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", i + 1, fmt_rational(m), q.as_ref().map(fmt_rational).unwrap_or_default()));
    }
    let json = json!({
        "x0": x0_json,
        "absorbing": absorbing,
        "rows": rows.iter().enumerate().map(|(i, (m, q))| json!({
            "t": i + 1,
            "matrix": rat_json(m),
            "qsym": q.as_ref().map(rat_json),
        })).collect::<Vec<_>>(),
    });
    Ok(Output::new(json, csv))
}

pub fn verify(run: &RunConfig) -> Result<Output, CliError> {
    let names: Vec<String> = if run.suites.is_empty() || run.suites.iter().any(|s| s == "all") {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        run.suites.clone()
    };
    let reports = names.iter().map(|s| run_suite(s)).collect::<hopf_chains::error::Result<Vec<SuiteReport>>>()?;
    let mut table = String::new();
    let mut csv = String::from("suite,check,passed,detail\n");
    for r in &reports {
        table.push_str(&r.table());
        for c in &r.checks {
            csv.push_str(&format!("{},{},{},{}\n", r.suite, csv_field(&c.name), c.passed, csv_field(&c.detail)));
        }
    }
    let failure = reports
        .iter()
        .find_map(|r| r.first_failure().map(|c| format!("{}: {}: {}", r.suite, c.name, c.detail)));
    let passed: usize = reports.iter().map(|r| r.checks.iter().filter(|c| c.passed).count()).sum();
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    table.push_str(&format!("{passed}/{total} checks passed\n"));
    let json = json!({
        "passed": failure.is_none(),
        "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
    });
    Ok(Output { json, csv, table: Some(table), failure })
}
