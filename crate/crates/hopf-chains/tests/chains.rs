use std::collections::BTreeMap;

use hopf_chains::algebras::{ConnesKreimer, Forest, Fqsym, IntPartition, Permutation, ShuffleAlgebra, SymE, Word};
use hopf_chains::catalog::rock::rock_chain;
use hopf_chains::catalog::shuffle::shuffle_chain;
use hopf_chains::catalog::todo::{todo_chain, TodoSampler};
use hopf_chains::catalog::tree::{example_company, large_company, TreeChainConfig, TreeModel, TreeSampler};
use hopf_chains::composition::OperatorKind;
use hopf_chains::hopf::Hopf;
use hopf_chains::rational::{int, rat, Rational};
use hopf_chains::sim::{chi_squared, run_trajectories, state_counts};
use hopf_chains::spectral::stationary_distributions;

#[test]
fn todo_sampler_matches_exact_law() {
    let h = Hopf::new(Fqsym);
    let kind = OperatorKind::Binter { q2: rat(1, 3) };
    let k = todo_chain(&h, &kind, 4, 100).unwrap().build_transition_matrix().unwrap();
    let x0 = Permutation::identity(4);
    let exact = k.distribution_at_time(&x0, 2).unwrap();
    let ends = run_trajectories(&TodoSampler::new(kind, 4).unwrap(), &x0, 2, 20_000, 11).unwrap();
    let report = chi_squared(&state_counts(&ends), &exact).unwrap();
    assert!(report.p_value > 1e-4, "{report:?}");
}

#[test]
fn tree_sampler_matches_exact_law() {
    let h = Hopf::new(ConnesKreimer);
    for model in [TreeModel::Single, TreeModel::Binomial { q2: rat(2, 5) }] {
        let cfg = TreeChainConfig::new(large_company(), model).unwrap();
        let k = hopf_chains::catalog::tree::tree_chain_matrix(&cfg, &h, 5000).unwrap();
        let exact = k.distribution_at_time(&large_company(), 2).unwrap();
        let ends = run_trajectories(&TreeSampler::new(cfg).unwrap(), &large_company(), 2, 20_000, 3).unwrap();
        let report = chi_squared(&state_counts(&ends), &exact).unwrap();
        assert!(report.p_value > 1e-4, "{report:?}");
    }
}

#[test]
fn hopf_chain_sampler_matches_exact_law() {
    let h = Hopf::new(ShuffleAlgebra::new());
    let spec = shuffle_chain(&h, OperatorKind::Riffle.distribution(4).unwrap(), &[1, 1, 2, 3], 100).unwrap();
    let k = spec.build_transition_matrix().unwrap();
    let x0 = Word::new(vec![1, 1, 2, 3]);
    let exact = k.distribution_at_time(&x0, 1).unwrap();
    let ends = run_trajectories(&spec, &x0, 1, 20_000, 5).unwrap();
    assert!(chi_squared(&state_counts(&ends), &exact).unwrap().p_value > 1e-4);
}

#[test]
fn riffle_settles_on_uniform_arrangements() {
    let h = Hopf::new(ShuffleAlgebra::new());
    let spec = shuffle_chain(&h, OperatorKind::Riffle.distribution(4).unwrap(), &[1, 1, 2, 2], 100).unwrap();
    let k = spec.build_transition_matrix().unwrap();
    let pis = stationary_distributions(&spec, &k).unwrap();
    assert_eq!(pis.len(), 1);
    for s in k.states() {
        assert_eq!(pis[0].value(s), rat(1, 6));
    }
}

#[test]
fn rocks_end_as_sand() {
    let h = Hopf::new(SymE);
    let spec = rock_chain(&h, &OperatorKind::Riffle, 5, 100).unwrap();
    let k = spec.build_transition_matrix().unwrap();
    let dust = IntPartition::new(vec![1; 5]).unwrap();
    assert_eq!(k.absorbing_states(), vec![dust.clone()]);
    let p = k.distribution_at_time(&IntPartition::new(vec![5]).unwrap(), 40).unwrap();
    assert!(p[&dust] > rat(99, 100));
}

#[test]
fn company_chain_loses_staff_monotonically() {
    let h = Hopf::new(ConnesKreimer);
    let cfg = TreeChainConfig::new(example_company(), TreeModel::Single).unwrap();
    let k = hopf_chains::catalog::tree::tree_chain_matrix(&cfg, &h, 1000).unwrap();
    let mut last = int(0);
    let boss = Forest::parse("*").unwrap();
    for t in 0..8 {
        let p: BTreeMap<Forest, Rational> = k.distribution_at_time(&example_company(), t).unwrap().into_iter().collect();
        let absorbed = p.get(&boss).cloned().unwrap_or_default();
        assert!(absorbed >= last);
        last = absorbed;
    }
    assert_eq!(k.distribution_at_time(&example_company(), 3).unwrap()[&boss], rat(3, 8));
}
