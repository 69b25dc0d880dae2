//! Named invariant suites. Each returns a table of checks; a suite passes when every row does.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebras::{
    partition_states, permutation_states, unlabelled_forests, ConnesKreimer, Forest, FreeAssociative, Fqsym, FqsymDual,
    IntPartition, Permutation, ShuffleAlgebra, SymE, Word,
};
use crate::catalog::rock::{large_rock_survival, rock_chain, rock_matrix};
use crate::catalog::shuffle::{as_word, deck_spectrum, shuffle_chain};
use crate::catalog::todo::{
    expected_last_k_chain, f_tau, f_tau_by_duality, fqsym_eigenbasis, last_k, newest_position_distribution, todo_chain,
    todo_matrix,
};
use crate::catalog::tree::{
    coproduct_ratio_sides, example_company, example_states, hook_walk_from, large_company, team_count_observable,
    tree_chain_matrix, tree_eigenbasis, trunk_hook_sum, TreeChainConfig, TreeModel,
};
use crate::chain::{ChainSpec, TransitionMatrix};
use crate::composition::{CompositionSum, OperatorKind, PieceDistribution, WeakComposition};
use crate::element::Element;
use crate::error::Error;
use crate::hopf::{Hopf, HopfAlgebra};
use crate::linalg::Matrix;
use crate::rational::{big, binomial, fmt_rational, int, pow, rat, Rational};
use crate::spectral::{
    algebra_dims, check_spectrum, eigen_multiplicities, is_eigenvector, kernel_elements, spectrum, stationary_distributions,
    symmetrisation_block, t2r_eigenvector, t2r_spectrum, EigenFunction, Side, SpectrumReport,
};

pub const SUITES: [&str; 7] =
    ["hopf-axioms", "eta-harmonic", "spectrum-exact", "eigenbasis", "lumping", "absorption", "paper-goldens"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// One line per check: `PASS|FAIL  suite  name  detail`.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark}  {}  {:width$}  {}\n", self.suite, c.name, c.detail));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> crate::error::Result<Self> {
        let bad = || Error::Parse("malformed suite report".into());
        let text = |x: &Value, k: &str| x.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(bad);
        let checks = v
            .get("checks")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| {
                Ok(Check {
                    name: text(c, "name")?,
                    passed: c.get("passed").and_then(Value::as_bool).ok_or_else(bad)?,
                    detail: text(c, "detail")?,
                })
            })
            .collect::<crate::error::Result<_>>()?;
        Ok(SuiteReport { suite: text(v, "suite")?, checks })
    }
}

/// Why a check failed.
#[derive(Debug)]
pub struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = std::result::Result<String, Failure>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure(msg()))
    }
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> Check {
    match f() {
        Ok(detail) => Check { name: name.into(), passed: true, detail },
        Err(e) => Check { name: name.into(), passed: false, detail: e.0 },
    }
}

pub fn run_suite(name: &str) -> crate::error::Result<SuiteReport> {
    let checks = match name {
        "hopf-axioms" => hopf_axioms(),
        "eta-harmonic" => eta_harmonic(),
        "spectrum-exact" => spectrum_exact(),
        "eigenbasis" => eigenbasis(),
        "lumping" => lumping(),
        "absorption" => absorption(),
        "paper-goldens" => paper_goldens(),
        other => return Err(Error::Precondition(format!("unknown suite {other}; known: {}", SUITES.join(", ")))),
    };
    Ok(SuiteReport { suite: name.into(), checks })
}

// ---------------------------------------------------------------------------
// hopf-axioms

type Triple<B> = BTreeMap<(B, B, B), Rational>;

fn coassociativity<A: HopfAlgebra>(h: &Hopf<A>, x: &A::Basis) -> std::result::Result<usize, Failure> {
    let n = h.degree(x);
    let mut checked = 0;
    for a in 0..=n {
        for b in 0..=(n - a) {
            let mut left: Triple<A::Basis> = BTreeMap::new();
            for (l, r, c) in h.coproduct(x, a + b)?.iter() {
                for (l1, l2, c2) in h.coproduct(l, a)?.iter() {
                    *left.entry((l1.clone(), l2.clone(), r.clone())).or_insert_with(Rational::zero) += c * c2;
                }
            }
            let mut right: Triple<A::Basis> = BTreeMap::new();
            for (l, r, c) in h.coproduct(x, a)?.iter() {
                for (r1, r2, c2) in h.coproduct(r, b)?.iter() {
                    *right.entry((l.clone(), r1.clone(), r2.clone())).or_insert_with(Rational::zero) += c * c2;
                }
            }
            left.retain(|_, v| !v.is_zero());
            right.retain(|_, v| !v.is_zero());
            ensure(left == right, || format!("(Δ⊗id)Δ ≠ (id⊗Δ)Δ at split ({a},{b},{})", n - a - b))?;
            let refined: Triple<A::Basis> = h
                .refined_coproduct(x, &WeakComposition::new(vec![a, b, n - a - b]))?
                .iter()
                .map(|(zs, c)| ((zs[0].clone(), zs[1].clone(), zs[2].clone()), c.clone()))
                .collect();
            ensure(refined == left, || format!("refined coproduct disagrees at ({a},{b},{})", n - a - b))?;
            checked += 1;
        }
    }
    let unit = h.algebra().unit();
    let c0 = h.coproduct(x, 0)?;
    ensure(c0.len() == 1 && c0[0].0 == unit && &c0[0].1 == x && c0[0].2.is_one(), || "counit fails on the left".into())?;
    let cn = h.coproduct(x, n)?;
    ensure(cn.len() == 1 && &cn[0].0 == x && cn[0].1 == unit && cn[0].2.is_one(), || "counit fails on the right".into())?;
    Ok(checked)
}

fn compatibility<A: HopfAlgebra>(h: &Hopf<A>, x: &A::Basis, y: &A::Basis) -> std::result::Result<(), Failure> {
    let n = h.degree(x) + h.degree(y);
    let prod = h.product(x, y);
    for i in 0..=n {
        let mut left: BTreeMap<(A::Basis, A::Basis), Rational> = BTreeMap::new();
        for (z, c) in prod.iter() {
            for (l, r, c2) in h.coproduct(z, i)?.iter() {
                *left.entry((l.clone(), r.clone())).or_insert_with(Rational::zero) += c * c2;
            }
        }
        let mut right: BTreeMap<(A::Basis, A::Basis), Rational> = BTreeMap::new();
        for a in i.saturating_sub(h.degree(y))..=i.min(h.degree(x)) {
            for (xl, xr, cx) in h.coproduct(x, a)?.iter() {
                for (yl, yr, cy) in h.coproduct(y, i - a)?.iter() {
                    let ls = h.product(xl, yl);
                    let rs = h.product(xr, yr);
                    for (l, cl) in ls.iter() {
                        for (r, cr) in rs.iter() {
                            *right.entry((l.clone(), r.clone())).or_insert_with(Rational::zero) += cx * cy * cl * cr;
                        }
                    }
                }
            }
        }
        left.retain(|_, v| !v.is_zero());
        right.retain(|_, v| !v.is_zero());
        ensure(left == right, || format!("Δ_{i}(xy) ≠ Δ(x)Δ(y)"))?;
    }
    Ok(())
}

fn axioms_on<A: HopfAlgebra>(h: &Hopf<A>, by_degree: &[Vec<A::Basis>]) -> Outcome {
    let mut splits = 0;
    for xs in by_degree {
        for x in xs {
            splits += coassociativity(h, x)?;
        }
    }
    let mut pairs = 0;
    for (dx, xs) in by_degree.iter().enumerate() {
        for (dy, ys) in by_degree.iter().enumerate() {
            if dx + dy > by_degree.len() - 1 || dx == 0 || dy == 0 {
                continue;
            }
            for x in xs {
                for y in ys {
                    compatibility(h, x, y)?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{splits} coassociativity splits, {pairs} product pairs"))
}

fn basis_upto<A: HopfAlgebra>(alg: &A, n: usize) -> Vec<Vec<A::Basis>> {
    (0..=n).map(|m| alg.basis_of_degree(m).unwrap_or_default()).collect()
}

fn hopf_axioms() -> Vec<Check> {
    vec![
        run("shuffle words, degree ≤ 4", || {
            let h = Hopf::new(ShuffleAlgebra::with_alphabet(2));
            axioms_on(&h, &basis_upto(h.algebra(), 4))
        }),
        run("free associative words, degree ≤ 4", || {
            let h = Hopf::new(FreeAssociative::with_alphabet(2));
            axioms_on(&h, &basis_upto(h.algebra(), 4))
        }),
        run("fqsym, degree ≤ 4", || {
            let h = Hopf::new(Fqsym);
            axioms_on(&h, &basis_upto(h.algebra(), 4))
        }),
        run("fqsym dual, degree ≤ 4", || {
            let h = Hopf::new(FqsymDual);
            axioms_on(&h, &basis_upto(h.algebra(), 4))
        }),
        run("sym-e, degree ≤ 5", || {
            let h = Hopf::new(SymE);
            axioms_on(&h, &basis_upto(h.algebra(), 5))
        }),
        run("connes-kreimer forests, degree ≤ 5", || {
            let h = Hopf::new(ConnesKreimer);
            let by: Vec<Vec<Forest>> = (0..=5).map(unlabelled_forests).collect();
            axioms_on(&h, &by)
        }),
        run("decorated company trees", || {
            let h = Hopf::new(ConnesKreimer);
            let mut n = 0;
            for x in [example_company(), large_company()] {
                n += coassociativity(&h, &x)?;
            }
            compatibility(&h, &example_company(), &Forest::parse("*(B)").expect("static tree"))?;
            Ok(format!("{n} coassociativity splits"))
        }),
    ]
}

// ---------------------------------------------------------------------------
// eta-harmonic

/// `Σ_y [m∆_P x]_y η(y) = η(x)` for every state, and the two η computations agree.
fn harmonic<A: HopfAlgebra>(spec: &ChainSpec<'_, A>) -> Outcome {
    let h = spec.hopf();
    for x in spec.states() {
        let image = h.descent_operator_p(x, spec.distribution())?;
        let total = image.iter().fold(Rational::zero(), |acc, (y, c)| acc + c * h.eta(y));
        ensure(total == h.eta(x), || format!("η not harmonic at a state: {} vs {}", fmt_rational(&total), fmt_rational(&h.eta(x))))?;
        ensure(h.eta_full_deconstruction(x)? == h.eta(x), || "recursive and full-deconstruction η differ".into())?;
    }
    let k = spec.build_transition_matrix()?;
    for i in 0..k.len() {
        let s: Rational = k.row(i).values().sum();
        ensure(s.is_one(), || format!("row {i} sums to {}", fmt_rational(&s)))?;
    }
    Ok(format!("{} states", spec.states().len()))
}

fn eta_harmonic() -> Vec<Check> {
    let mut out = vec![
        run("tree chain, single model", || {
            let h = Hopf::new(ConnesKreimer);
            harmonic(&TreeChainConfig::new(example_company(), TreeModel::Single)?.hopf_chain(&h, 1000)?)
        }),
        run("tree chain, binomial model", || {
            let h = Hopf::new(ConnesKreimer);
            harmonic(&TreeChainConfig::new(large_company(), TreeModel::Binomial { q2: rat(1, 3) })?.hopf_chain(&h, 5000)?)
        }),
        run("tree chain, vp model", || {
            let h = Hopf::new(ConnesKreimer);
            let m = TreeModel::Vp { q1: rat(1, 4), q2: rat(1, 2), q3: rat(1, 4) };
            harmonic(&TreeChainConfig::new(example_company(), m)?.hopf_chain(&h, 1000)?)
        }),
        run("to-do list, ter and binter, n = 4", || {
            let h = Hopf::new(Fqsym);
            harmonic(&todo_chain(&h, &OperatorKind::Ter, 4, 100)?)?;
            harmonic(&todo_chain(&h, &OperatorKind::Binter { q2: rat(1, 3) }, 4, 100)?)
        }),
        run("shuffles of 1123 under riffle and tober", || {
            let h = Hopf::new(ShuffleAlgebra::new());
            harmonic(&shuffle_chain(&h, OperatorKind::Riffle.distribution(4)?, &[1, 1, 2, 3], 100)?)?;
            harmonic(&shuffle_chain(&h, OperatorKind::Tober { q: rat(1, 3) }.distribution(4)?, &[1, 1, 2, 3], 100)?)
        }),
        run("rock breaking, n = 6", || {
            let h = Hopf::new(SymE);
            harmonic(&rock_chain(&h, &OperatorKind::Ter, 6, 100)?)?;
            harmonic(&rock_chain(&h, &OperatorKind::Riffle, 6, 100)?)
        }),
        run("hook formula η = n!/∏h on forests of degree ≤ 6", || {
            let h = Hopf::new(ConnesKreimer);
            let mut count = 0;
            for n in 0..=6 {
                for x in unlabelled_forests(n) {
                    ensure(crate::catalog::tree::hook_eta(&x) == h.eta(&x), || format!("hook formula fails on {x}"))?;
                    count += 1;
                }
            }
            Ok(format!("{count} forests"))
        }),
        run("trunk hook sum equals binom(n, i), degree ≤ 6", || {
            let mut count = 0;
            for n in 0..=6 {
                for x in unlabelled_forests(n) {
                    for i in 0..=n {
                        let s = trunk_hook_sum(&x, i);
                        ensure(s == big(binomial(n, i)), || format!("{x}, i = {i}: {}", fmt_rational(&s)))?;
                        count += 1;
                    }
                }
            }
            Ok(format!("{count} (forest, i) pairs"))
        }),
    ];
    out.push(run("coproduct ratio equals hook products, degree ≤ 6", lemma_ratio));
    out
}

fn lemma_ratio() -> Outcome {
    let h = Hopf::new(ConnesKreimer);
    let trees: Vec<Vec<Forest>> = (0..=6)
        .map(|m| unlabelled_forests(m).into_iter().filter(|f| f.trees().len() == 1).collect())
        .collect();
    let mut count = 0;
    for n in 1..=6 {
        for x in unlabelled_forests(n) {
            for (m, tps) in trees.iter().enumerate().take(n + 1).skip(1) {
                for tp in tps {
                    for i in 0..=(n - m) {
                        let (l, r) = coproduct_ratio_sides(&h, &x, tp, i)?;
                        ensure(l == r, || format!("x = {x}, T′ = {tp}, i = {i}: {} vs {}", fmt_rational(&l), fmt_rational(&r)))?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} (x, T′, i) triples"))
}

// ---------------------------------------------------------------------------
// spectrum-exact

fn predicted(report: &crate::spectral::SpectrumReport) -> Vec<(Rational, BigInt)> {
    report.entries.iter().map(|e| (e.value.clone(), e.multiplicity.clone())).collect()
}

/// Roots of the characteristic polynomial lie among the predicted eigenvalues; with `exact`
/// the multiplicities match too.
fn spectrum_matches<A: HopfAlgebra>(spec: &ChainSpec<'_, A>, report: &SpectrumReport, exact: bool) -> Outcome {
    let k = spec.build_transition_matrix()?;
    let check = check_spectrum(&k.to_dense(), &predicted(report));
    ensure(check.roots_covered(), || "characteristic polynomial has roots outside the predicted values".into())?;
    if exact {
        ensure(check.multiplicities_match(), || format!("multiplicities differ: {:?}", check.rows))?;
    }
    let found: Vec<String> = check
        .rows
        .iter()
        .filter(|r| r.2 > 0)
        .map(|r| format!("{}:{}", fmt_rational(&r.0), r.2))
        .collect();
    Ok(found.join(" "))
}

fn deck_matches(deck: &[u32], kinds: &[OperatorKind]) -> Outcome {
    let h = Hopf::new(ShuffleAlgebra::new());
    let n = deck.len();
    // the β_λ over all partitions, from the word algebra on n letters
    let all = spectrum(&OperatorKind::Riffle.distribution(n)?, &algebra_dims(&ShuffleAlgebra::with_alphabet(n as u32), n)?)?;
    let mut out = Vec::new();
    for kind in kinds {
        let dist = kind.distribution(n)?;
        let spec = shuffle_chain(&h, dist.clone(), deck, 100)?;
        if matches!(kind, OperatorKind::Riffle) {
            spectrum_matches(&spec, &all, false)?;
        }
        out.push(spectrum_matches(&spec, &deck_spectrum(&dist, deck, 100)?, true)?);
    }
    Ok(out.join(" | "))
}

fn prop_identities() -> Outcome {
    let h = Hopf::new(SymE);
    let n = 5;
    let states = partition_states(n, 100)?;
    let spec = ChainSpec::new(&h, PieceDistribution::identity(n), states);
    let q = rat(1, 3);
    let matrix_of = |kind: &OperatorKind| -> crate::error::Result<Matrix> {
        spec.operator_matrix(&kind.distribution(n)?.composition_sum())
    };
    let tober = matrix_of(&OperatorKind::Tober { q: q.clone() })?;
    let size = tober.rows();
    let id = Matrix::identity(size);
    let nn = Rational::from_integer(n.into());
    // bintobrer_r(q) = ∏_{i<r} (n·tober − i)/(n − i)
    for r in 0..=n {
        let mut poly = id.clone();
        for i in 0..r {
            let factor = tober.scale(&nn).shift(&int(i as i64)).scale(&Rational::new(1.into(), (n - i).into()));
            poly = poly.mul(&factor);
        }
        let direct = matrix_of(&OperatorKind::Bintobrer { r, q: q.clone() })?;
        ensure(poly == direct, || format!("bintobrer_{r} is not the falling-factorial polynomial in tober"))?;
    }
    let (q1, q2, q3) = (rat(1, 4), rat(1, 2), rat(1, 4));
    let tri = matrix_of(&OperatorKind::Trintober { q1: q1.clone(), q2: q2.clone(), q3: q3.clone() })?;
    let ratio = &q1 / (&q1 + &q3);
    let mut mixture = Matrix::zeros(size, size);
    let mut poly = Matrix::zeros(size, size);
    let x = matrix_of(&OperatorKind::Tober { q: ratio.clone() })?.scale(&nn);
    let p = Rational::one() - &q2;
    for r in 0..=n {
        let w = big(binomial(n, r)) * pow(&q2, n - r) * pow(&p, r);
        mixture = mixture.add(&matrix_of(&OperatorKind::Bintobrer { r, q: ratio.clone() })?.scale(&w));
        let mut choose = id.clone();
        for i in 0..r {
            choose = choose.mul(&x.shift(&int(i as i64)));
        }
        let coeff = pow(&q2, n - r) * pow(&p, r) / big(crate::rational::factorial(r));
        poly = poly.add(&choose.scale(&coeff));
    }
    ensure(tri == mixture, || "trintober is not the binomial mixture of bintobrer".into())?;
    ensure(tri == poly, || "trintober is not Σ binom(x, r) q2^{n-r} (1-q2)^r at x = n·tober".into())?;
    Ok(format!("{size}×{size} operators on sym-e, n = {n}"))
}

fn spectrum_exact() -> Vec<Check> {
    vec![
        run("shuffle, distinct 3-card deck, riffle/ter/tober", || {
            deck_matches(&[1, 2, 3], &[OperatorKind::Riffle, OperatorKind::Ter, OperatorKind::Tober { q: rat(1, 3) }])
        }),
        run("shuffle, distinct 4-card deck, riffle/ter", || deck_matches(&[1, 2, 3, 4], &[OperatorKind::Riffle, OperatorKind::Ter])),
        run("shuffle, decks with repeats, riffle/ter", || {
            deck_matches(&[1, 1, 2, 3], &[OperatorKind::Riffle, OperatorKind::Ter])?;
            deck_matches(&[1, 1, 2, 2], &[OperatorKind::Riffle, OperatorKind::Ter])
        }),
        run("sym-e, n ≤ 4, riffle/ter/taber", || {
            let h = Hopf::new(SymE);
            let mut count = 0;
            for n in 1..=4 {
                for kind in [OperatorKind::Riffle, OperatorKind::Ter, OperatorKind::Taber] {
                    let Ok(dist) = kind.distribution(n) else { continue };
                    let report = spectrum(&dist, &algebra_dims(&SymE, n)?)?;
                    spectrum_matches(&ChainSpec::new(&h, dist, partition_states(n, 100)?), &report, true)?;
                    count += 1;
                }
            }
            Ok(format!("{count} chains"))
        }),
        run("free associative on 2 letters, n ≤ 4, riffle/ter", || {
            let h = Hopf::new(FreeAssociative::with_alphabet(2));
            let mut count = 0;
            for n in 1..=4 {
                for kind in [OperatorKind::Riffle, OperatorKind::Ter] {
                    let states = h.algebra().basis_of_degree(n).unwrap_or_default();
                    let dist = kind.distribution(n)?;
                    let report = spectrum(&dist, &algebra_dims(h.algebra(), n)?)?;
                    spectrum_matches(&ChainSpec::new(&h, dist, states), &report, true)?;
                    count += 1;
                }
            }
            Ok(format!("{count} chains"))
        }),
        run("riffle on 3 distinct cards has multiplicities 1, 3, 2", || {
            let h = Hopf::new(ShuffleAlgebra::new());
            let k = shuffle_chain(&h, OperatorKind::Riffle.distribution(3)?, &[1, 2, 3], 100)?.build_transition_matrix()?;
            let d = k.to_dense();
            let cp = d.charpoly();
            let got: Vec<(usize, usize)> =
                [rat(1, 1), rat(1, 2), rat(1, 4)].iter().map(|v| eigen_multiplicities(&d, &cp, v)).collect();
            ensure(got == vec![(1, 1), (3, 3), (2, 2)], || format!("(algebraic, geometric) = {got:?}"))?;
            Ok("1:1 1/2:3 1/4:2".into())
        }),
        run("to-do list ter_4: charpoly matches the top-to-random formula", || {
            let h = Hopf::new(Fqsym);
            let k = todo_matrix(&h, &OperatorKind::Ter, 4, 100)?;
            let report = t2r_spectrum(&OperatorKind::Ter, 4, &algebra_dims(h.algebra(), 4)?, 1)?;
            let check = check_spectrum(&k.to_dense(), &predicted(&report));
            ensure(check.multiplicities_match() && check.diagonalisable(), || format!("{:?}", check.rows))?;
            Ok(report.entries.iter().map(|e| format!("{}:{}", fmt_rational(&e.value), e.multiplicity)).collect::<Vec<_>>().join(" "))
        }),
        run("to-do list ter_5 and binter_5: eigenspace dimensions", || {
            let h = Hopf::new(Fqsym);
            let mut out = String::new();
            for kind in [OperatorKind::Ter, OperatorKind::Binter { q2: rat(1, 2) }] {
                let k = todo_matrix(&h, &kind, 5, 200)?;
                let d = k.to_dense();
                let report = t2r_spectrum(&kind, 5, &algebra_dims(h.algebra(), 5)?, 1)?;
                for e in &report.entries {
                    let geo = d.rows() - d.shift(&e.value).rank();
                    ensure(BigInt::from(geo) == e.multiplicity, || format!("{}: eigenspace {geo}, formula {}", fmt_rational(&e.value), e.multiplicity))?;
                }
                out = report.entries.iter().map(|e| format!("{}:{}", fmt_rational(&e.value), e.multiplicity)).collect::<Vec<_>>().join(" ");
            }
            Ok(out)
        }),
        run("tober and taber on sym-e n = 5 match their closed-form spectra", || {
            let h = Hopf::new(SymE);
            let dims = algebra_dims(&SymE, 5)?;
            for kind in [OperatorKind::Tober { q: rat(1, 3) }, OperatorKind::Taber, OperatorKind::Trintober { q1: rat(1, 4), q2: rat(1, 2), q3: rat(1, 4) }] {
                let k = ChainSpec::new(&h, kind.distribution(5)?, partition_states(5, 100)?).build_transition_matrix()?;
                let report = t2r_spectrum(&kind, 5, &dims, 1)?;
                let check = check_spectrum(&k.to_dense(), &predicted(&report));
                ensure(check.multiplicities_match(), || format!("{}: {:?}", kind.name(), check.rows))?;
            }
            Ok("3 operators".into())
        }),
        run("operator identities on sym-e", prop_identities),
    ]
}

// ---------------------------------------------------------------------------
// eigenbasis

fn taber_vectors() -> Outcome {
    let h = Hopf::new(FreeAssociative::with_alphabet(2));
    let n = 5;
    let kind = OperatorKind::Taber;
    let dist = kind.distribution(n)?;
    let letters = [Word::new(vec![1]), Word::new(vec![2])];
    let mut count = 0;
    for j in 0..=3 {
        let ps = kernel_elements(&h, n - j, true)?;
        ensure(!ps.is_empty(), || format!("no kernel elements of degree {}", n - j))?;
        for p in &ps {
            for pick in 0..(1usize << j) {
                let cs: Vec<Word> = (0..j).map(|b| letters[(pick >> b) & 1].clone()).collect();
                let (v, beta) = t2r_eigenvector(&h, &kind, n, p, &cs)?;
                if v.is_zero() {
                    continue;
                }
                ensure(is_eigenvector(&h, &dist, &v, &beta)?, || format!("j = {j}: not an eigenvector"))?;
                ensure(j >= 2 || beta.is_zero(), || format!("j = {j} should give eigenvalue 0"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} eigenvectors for j = 0..3"))
}

fn symmetrisation_checks() -> Outcome {
    let mut count = 0;
    for (kind, n) in [(OperatorKind::Riffle, 4), (OperatorKind::Ter, 4), (OperatorKind::Tober { q: rat(1, 3) }, 4), (OperatorKind::Taber, 5)] {
        let p = kind.distribution(n)?;
        // blocks have l(λ)! rows, so long partitions are skipped
        for lambda in crate::algebras::partitions(n).into_iter().filter(|l| l.parts().len() <= 3) {
            let degrees: Vec<usize> = lambda.parts().iter().map(|&d| d as usize).collect();
            for order in [degrees.clone(), degrees.iter().rev().copied().collect()] {
                let block = symmetrisation_block(&p, &order)?;
                let image = block.matrix.mul_vec(&block.kappa);
                ensure(image == block.kappa.iter().map(|x| x * &block.beta).collect::<Vec<_>>(), || "κ is not a β-eigenvector".into())?;
                count += 1;
            }
        }
    }
    let h = Hopf::new(ShuffleAlgebra::with_alphabet(2));
    for k in 1..=4 {
        for p in kernel_elements(&h, k, false)? {
            let c = h.coproduct_element(&p, 1)?;
            ensure(k == 1 || c.is_zero(), || format!("kernel element of degree {k} has Δ_(1,k-1) ≠ 0"))?;
        }
    }
    Ok(format!("{count} blocks with nonnegative κ"))
}

fn stationary_checks() -> Outcome {
    let mut notes = Vec::new();
    let h = Hopf::new(Fqsym);
    let spec = todo_chain(&h, &OperatorKind::Ter, 4, 100)?;
    let k = spec.build_transition_matrix()?;
    let pis = stationary_distributions(&spec, &k)?;
    ensure(pis.len() == 1 && k.states().iter().all(|s| pis[0].value(s) == rat(1, 24)), || "to-do list n = 4 is not uniform".into())?;
    notes.push("to-do uniform 1/24".to_string());

    let hs = Hopf::new(ShuffleAlgebra::new());
    let spec = shuffle_chain(&hs, OperatorKind::Riffle.distribution(4)?, &[1, 1, 2, 3], 100)?;
    let k = spec.build_transition_matrix()?;
    let pis = stationary_distributions(&spec, &k)?;
    ensure(!pis.is_empty(), || "riffle on 1123 has no stationary distribution".into())?;
    for pi in &pis {
        pi.verify(&k)?;
    }
    notes.push(format!("riffle 1123: {} distribution(s)", pis.len()));

    let hr = Hopf::new(SymE);
    let spec = rock_chain(&hr, &OperatorKind::Ter, 4, 100)?;
    let k = spec.build_transition_matrix()?;
    let pis = stationary_distributions(&spec, &k)?;
    let ones = IntPartition::new(vec![1; 4])?;
    ensure(pis.len() == 1 && pis[0].value(&ones).is_one(), || "rock chain should settle on (1,1,1,1)".into())?;
    notes.push("rocks: point mass on 1^4".into());

    let hc = Hopf::new(ConnesKreimer);
    let spec = TreeChainConfig::new(example_company(), TreeModel::Single)?.hopf_chain(&hc, 1000)?;
    let k = spec.build_transition_matrix()?;
    let pis = stationary_distributions(&spec, &k)?;
    ensure(pis.len() == 1 && pis[0].value(&Forest::singletons(4)).is_one(), || "forest chain should settle on four singletons".into())?;
    notes.push("trees: point mass on •^4".into());
    Ok(notes.join(", "))
}

fn eigenbasis() -> Vec<Check> {
    vec![
        run("tree eigenfunctions, both models", || {
            let h = Hopf::new(ConnesKreimer);
            for model in [TreeModel::Single, TreeModel::Binomial { q2: rat(1, 3) }] {
                for start in [example_company(), large_company()] {
                    let cfg = TreeChainConfig::new(start, model.clone())?;
                    let k = tree_chain_matrix(&cfg, &h, 5000)?;
                    let basis = tree_eigenbasis(&cfg, &k)?;
                    let m = Matrix::from_rows(basis.iter().map(|f| f.vector(&k)).collect());
                    ensure(m.rank() == k.len(), || "tree eigenfunctions are dependent".into())?;
                }
            }
            Ok("full rank on 6 and 41 states".into())
        }),
        run("team counts are eigenfunctions", || {
            let h = Hopf::new(ConnesKreimer);
            let mut count = 0;
            for model in [TreeModel::Single, TreeModel::Binomial { q2: rat(2, 5) }] {
                let cfg = TreeChainConfig::new(large_company(), model)?;
                let k = tree_chain_matrix(&cfg, &h, 5000)?;
                for s in [vec![1], vec![0, 1], vec![1, 1], vec![2, 3], vec![1, 4]] {
                    let f = team_count_observable(&cfg, &s)?;
                    let values = k.states().iter().map(|x| (x.clone(), f.eval(x))).collect();
                    EigenFunction::verified(&k, Side::Right, f.eigenvalue.clone().unwrap_or_default(), values)?;
                    count += 1;
                }
            }
            Ok(format!("{count} functions"))
        }),
        run("to-do list f_τ basis, n = 4", || {
            let h = Hopf::new(Fqsym);
            for kind in [OperatorKind::Ter, OperatorKind::Binter { q2: rat(1, 3) }] {
                fqsym_eigenbasis(&todo_matrix(&h, &kind, 4, 100)?, &kind, 4)?;
            }
            for tau in permutation_states(4, 100)? {
                let (v, _) = f_tau_by_duality(&tau)?;
                for s in permutation_states(4, 100)? {
                    ensure(v.get(&s).cloned().unwrap_or_default() == f_tau(&tau, &s)?, || format!("duality disagrees for τ = {tau}"))?;
                }
            }
            Ok("24 functions, rank 24, duality agrees".into())
        }),
        run("two-sided eigenvectors on free associative, n = 5", taber_vectors),
        run("symmetrisation blocks and kernels", symmetrisation_checks),
        run("stationary distributions are left 1-eigenfunctions", stationary_checks),
    ]
}

// ---------------------------------------------------------------------------
// lumping

fn lumping() -> Vec<Check> {
    vec![
        run("ter_5 observed on the last 3 letters", || {
            let h = Hopf::new(Fqsym);
            let k = todo_matrix(&h, &OperatorKind::Ter, 5, 200)?;
            let lumped = k.lump(last_k(3)).map_err(|v| Failure(format!("not lumpable: {} vs {}", v.first, v.second)))?;
            let want = expected_last_k_chain(&h, &OperatorKind::Ter, 5, 3)?;
            ensure(lumped == want, || "quotient is not (2/5)I + (3/5)ter_3".into())?;
            Ok("quotient = (2/5)I + (3/5)ter_3".into())
        }),
        run("binter_5(1/3) observed on the last 3 letters", || {
            let h = Hopf::new(Fqsym);
            let kind = OperatorKind::Binter { q2: rat(1, 3) };
            let k = todo_matrix(&h, &kind, 5, 200)?;
            let lumped = k.lump(last_k(3)).map_err(|v| Failure(format!("not lumpable: {} vs {}", v.first, v.second)))?;
            ensure(lumped == expected_last_k_chain(&h, &kind, 5, 3)?, || "quotient is not binter_3(1/3)".into())?;
            Ok("quotient = binter_3(1/3)".into())
        }),
        run("forest chains lump to tree chains", || {
            let h = Hopf::new(ConnesKreimer);
            for model in [TreeModel::Single, TreeModel::Binomial { q2: rat(1, 2) }] {
                tree_chain_matrix(&TreeChainConfig::new(large_company(), model)?, &h, 5000)?;
            }
            Ok("lumped chain equals the hook-walk chain".into())
        }),
        run("first-letter map is not a lumping of ter_4", || {
            let h = Hopf::new(Fqsym);
            let k = todo_matrix(&h, &OperatorKind::Ter, 4, 100)?;
            match k.lump(|s: &Permutation| s.one_line()[0]) {
                Ok(_) => Err(Failure("unexpectedly lumpable".into())),
                Err(v) => Ok(format!("witness {} vs {}", v.first, v.second)),
            }
        }),
    ]
}

// ---------------------------------------------------------------------------
// absorption

fn absorption_agrees<A: HopfAlgebra>(spec: &ChainSpec<'_, A>, x0: &A::Basis, ts: std::ops::RangeInclusive<usize>) -> Outcome {
    let k = spec.build_transition_matrix()?;
    let mut seen = Vec::new();
    for t in ts {
        let a = spec.absorption_via_qsym(x0, t)?;
        let b = k.absorption_probability(x0, t)?;
        ensure(a == b, || format!("t = {t}: {} vs {}", fmt_rational(&a), fmt_rational(&b)))?;
        seen.push(fmt_rational(&a));
    }
    Ok(seen.join(", "))
}

fn absorption() -> Vec<Check> {
    vec![
        run("company tree, single model", || {
            let h = Hopf::new(ConnesKreimer);
            absorption_agrees(&TreeChainConfig::new(example_company(), TreeModel::Single)?.hopf_chain(&h, 1000)?, &example_company(), 1..=3)
        }),
        run("company tree, binomial model q2 = 1/2", || {
            let h = Hopf::new(ConnesKreimer);
            let cfg = TreeChainConfig::new(example_company(), TreeModel::Binomial { q2: rat(1, 2) })?;
            absorption_agrees(&cfg.hopf_chain(&h, 1000)?, &example_company(), 1..=3)
        }),
        run("rock breaking from (5), ter and riffle", || {
            let h = Hopf::new(SymE);
            let x0 = IntPartition::new(vec![5])?;
            let a = absorption_agrees(&rock_chain(&h, &OperatorKind::Ter, 5, 100)?, &x0, 1..=5)?;
            let b = absorption_agrees(&rock_chain(&h, &OperatorKind::Riffle, 5, 100)?, &x0, 1..=3)?;
            Ok(format!("ter: {a}; riffle: {b}"))
        }),
        run("large rock survival bound", || {
            let h = Hopf::new(SymE);
            let k = rock_matrix(&h, &OperatorKind::Ter, 4, 100)?;
            for t in 0..=10 {
                let (p, b) = large_rock_survival(&k, &IntPartition::new(vec![4])?, 3, t)?;
                ensure(p <= b, || format!("t = {t}: {} > {}", fmt_rational(&p), fmt_rational(&b)))?;
            }
            Ok("t ≤ 10".into())
        }),
    ]
}

// ---------------------------------------------------------------------------
// paper-goldens

/// Which reading of the binomial-model matrix to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transcription {
    /// The entries as typeset.
    Printed,
    /// With the `(1−q)^k(1+…)` factors of the first column fixed so rows sum to 1.
    Corrected,
}

/// Single-model matrix of the company tree in [`example_states`] order.
pub fn example_single_rows() -> Vec<Vec<Rational>> {
    let z = Rational::zero;
    vec![
        vec![int(1), z(), z(), z(), z(), z()],
        vec![rat(1, 2), rat(1, 2), z(), z(), z(), z()],
        vec![rat(1, 2), z(), rat(1, 2), z(), z(), z()],
        vec![z(), z(), rat(3, 4), rat(1, 4), z(), z()],
        vec![z(), rat(3, 8), rat(3, 8), z(), rat(1, 4), z()],
        vec![z(), z(), z(), rat(1, 3), rat(2, 3), z()],
    ]
}

/// Binomial-model matrix of the company tree at `q = q₂`, in [`example_states`] order.
pub fn example_binomial_rows(q: &Rational, which: Transcription) -> Vec<Vec<Rational>> {
    let one = Rational::one();
    let p = &one - q;
    let z = Rational::zero;
    let (c4, c6) = match which {
        Transcription::Printed => (&one + int(3) * q, &one + int(4) * q),
        Transcription::Corrected => (&one + int(2) * q, &one + int(3) * q),
    };
    let q2 = pow(q, 2);
    let q3 = pow(q, 3);
    vec![
        vec![one.clone(), z(), z(), z(), z(), z()],
        vec![&p * (&one + q), q2.clone(), z(), z(), z(), z()],
        vec![&p * (&one + q), z(), q2.clone(), z(), z(), z()],
        vec![pow(&p, 2) * &c4, z(), int(3) * &q2 * &p, q3.clone(), z(), z()],
        vec![pow(&p, 2) * &c4, rat(3, 2) * &q2 * &p, rat(3, 2) * &q2 * &p, z(), q3.clone(), z()],
        vec![
            pow(&p, 3) * &c6,
            int(2) * &q2 * pow(&p, 2),
            int(4) * &q2 * pow(&p, 2),
            rat(4, 3) * &q3 * &p,
            rat(8, 3) * &q3 * &p,
            pow(q, 4),
        ],
    ]
}

/// Eigenfunction table of the company tree: row per state, column per function.
pub fn example_eigen_table() -> Vec<Vec<Rational>> {
    let z = Rational::zero;
    vec![
        vec![int(1), z(), z(), z(), z(), z()],
        vec![int(1), int(1), z(), z(), z(), z()],
        vec![int(1), z(), int(1), z(), z(), z()],
        vec![int(1), z(), int(3), int(1), z(), z()],
        vec![int(1), rat(3, 2), rat(3, 2), z(), int(1), z()],
        vec![int(1), int(2), int(4), rat(4, 3), rat(8, 3), int(1)],
    ]
}

/// Eigenvalues attached to the table columns.
pub fn example_eigenvalues(model: &TreeModel) -> Vec<Rational> {
    match model {
        TreeModel::Binomial { q2 } => {
            vec![int(1), pow(q2, 2), pow(q2, 2), pow(q2, 3), pow(q2, 3), pow(q2, 4)]
        }
        _ => vec![int(1), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 4), int(0)],
    }
}

/// The company-tree chain in [`example_states`] order.
pub fn example_matrix(model: TreeModel) -> crate::error::Result<TransitionMatrix<Forest>> {
    let h = Hopf::new(ConnesKreimer);
    let cfg = TreeChainConfig::new(example_company(), model)?;
    tree_chain_matrix(&cfg, &h, 1000)?.reindexed(&example_states())
}

fn dense_equals(k: &TransitionMatrix<Forest>, rows: &[Vec<Rational>]) -> std::result::Result<(), Failure> {
    let d = k.to_dense();
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            ensure(d.get(i, j) == v, || format!("entry ({i},{j}) is {}, expected {}", fmt_rational(d.get(i, j)), fmt_rational(v)))?;
        }
    }
    Ok(())
}

/// Checks the table columns as right eigenfunctions of `k`.
pub fn check_eigen_table(k: &TransitionMatrix<Forest>, model: &TreeModel) -> std::result::Result<(), Failure> {
    let table = example_eigen_table();
    let states = example_states();
    let cfg = TreeChainConfig::new(example_company(), model.clone())?;
    let basis = tree_eigenbasis(&cfg, k)?;
    let betas = example_eigenvalues(model);
    for (col, f) in basis.iter().enumerate() {
        ensure(f.eigenvalue == betas[col], || format!("column {col} has eigenvalue {}", fmt_rational(&f.eigenvalue)))?;
        for (row, s) in states.iter().enumerate() {
            ensure(f.value(s) == table[row][col], || format!("entry ({row},{col}) is {}", fmt_rational(&f.value(s))))?;
        }
        let values = states.iter().cloned().zip(table.iter().map(|r| r[col].clone())).collect();
        EigenFunction::verified(k, Side::Right, betas[col].clone(), values)?;
    }
    Ok(())
}

fn perm(s: &str) -> std::result::Result<Permutation, Failure> {
    Ok(Permutation::parse(s)?)
}

fn paper_goldens() -> Vec<Check> {
    vec![
        run("company tree, single-model matrix", || {
            dense_equals(&example_matrix(TreeModel::Single)?, &example_single_rows())?;
            Ok("6×6 exact".into())
        }),
        run("company tree, binomial-model matrix (corrected first column)", || {
            for q in [rat(1, 3), rat(7, 10), rat(1, 1)] {
                dense_equals(&example_matrix(TreeModel::Binomial { q2: q.clone() })?, &example_binomial_rows(&q, Transcription::Corrected))?;
            }
            Ok("q = 1/3, 7/10, 1".into())
        }),
        run("company tree eigenfunction table", || {
            check_eigen_table(&example_matrix(TreeModel::Single)?, &TreeModel::Single)?;
            let m = TreeModel::Binomial { q2: rat(2, 7) };
            check_eigen_table(&example_matrix(m.clone())?, &m)?;
            Ok("both models".into())
        }),
        run("team count on the eight-person company", || {
            let cfg = TreeChainConfig::new(large_company(), TreeModel::Single)?;
            let v = team_count_observable(&cfg, &[1, 2])?.eval(&large_company());
            ensure(v == int(160), || format!("got {}", fmt_rational(&v)))?;
            Ok("160".into())
        }),
        run("firing C: walk ends at D, E or G", || {
            let t = large_company();
            let a = t.arena();
            let c = (0..a.len()).find(|&v| a.label[v].as_deref() == Some("C")).ok_or_else(|| Failure("no C".into()))?;
            let law: BTreeMap<String, Rational> =
                hook_walk_from(&a, c).into_iter().map(|(v, p)| (a.label[v].clone().unwrap_or_default(), p)).collect();
            let want = BTreeMap::from([("D".to_string(), rat(1, 4)), ("E".to_string(), rat(1, 4)), ("G".to_string(), rat(1, 2))]);
            ensure(law == want, || format!("{law:?}"))?;
            Ok("D 1/4, E 1/4, G 1/2".into())
        }),
        run("to-do list moves", || {
            let h = Hopf::new(Fqsym);
            let k3 = todo_matrix(&h, &OperatorKind::Ter, 3, 100)?;
            let row: Vec<(String, Rational)> = k3
                .distribution_at_time(&Permutation::identity(3), 1)?
                .into_iter()
                .map(|(s, p)| (s.to_string(), p))
                .collect();
            ensure(row.len() == 3 && row.iter().all(|(_, p)| *p == rat(1, 3)), || format!("{row:?}"))?;
            let k5 = todo_matrix(&h, &OperatorKind::Trer { r: 2 }, 5, 200)?;
            ensure(k5.entry(&perm("23541")?, &perm("15423")?) > Rational::zero(), || "23541 → 15423 unreachable".into())?;
            let k1 = todo_matrix(&h, &OperatorKind::Ter, 1, 10)?;
            ensure(k1.len() == 1 && k1.absorbing_states().len() == 1, || "n = 1 is not a single absorbing state".into())?;
            Ok("ter_3 row uniform, two-task step reachable".into())
        }),
        run("f_τ for τ = 12534", || {
            let tau = perm("12534")?;
            let got = [f_tau(&tau, &perm("35412")?)?, f_tau(&tau, &perm("24153")?)?, f_tau(&tau, &perm("25431")?)?];
            // the last three letters of 24153 are low-high-middle, the −1 pattern
            ensure(got == [int(1), int(-1), int(0)], || format!("{got:?}"))?;
            Ok("1, −1, 0".into())
        }),
        run("newest task position", || {
            let h = Hopf::new(Fqsym);
            let k = todo_matrix(&h, &OperatorKind::Ter, 5, 200)?;
            let d = newest_position_distribution(&k, &OperatorKind::Ter, 5, 2, 1)?;
            let want = BTreeMap::from([(3, rat(3, 5)), (4, rat(1, 5)), (5, rat(1, 5))]);
            ensure(d.agrees() && d.closed_form == want, || format!("{d:?}"))?;
            Ok("3/5, 1/5, 1/5".into())
        }),
        run("to-do list stationary distribution", || {
            let h = Hopf::new(Fqsym);
            let spec = todo_chain(&h, &OperatorKind::Ter, 4, 100)?;
            let k = spec.build_transition_matrix()?;
            let pis = stationary_distributions(&spec, &k)?;
            ensure(pis.len() == 1 && pis[0].values.values().all(|v| *v == rat(1, 24)), || "not uniform".into())?;
            Ok("uniform 1/24".into())
        }),
        run("rock chipping from (3,1)", || {
            let h = Hopf::new(SymE);
            let k = rock_matrix(&h, &OperatorKind::Ter, 4, 100)?;
            let from = IntPartition::new(vec![3, 1])?;
            ensure(k.entry(&from, &IntPartition::new(vec![2, 1, 1])?) == rat(3, 4), || "(3,1) → (2,1,1) is not 3/4".into())?;
            ensure(k.entry(&from, &from) == rat(1, 4), || "(3,1) does not stay with 1/4".into())?;
            Ok("3/4 and 1/4".into())
        }),
        run("riffle on sym-e, n = 3", || {
            let report = spectrum(&OperatorKind::Riffle.distribution(3)?, &algebra_dims(&SymE, 3)?)?;
            let vals = report.values();
            ensure(vals == vec![int(1), rat(1, 2), rat(1, 4)], || format!("{vals:?}"))?;
            Ok("1, 1/2, 1/4".into())
        }),
        run("to-do list ter_5 spectrum", || {
            let report = t2r_spectrum(&OperatorKind::Ter, 5, &algebra_dims(&Fqsym, 5)?, 1)?;
            let got: Vec<(Rational, BigInt)> = predicted(&report);
            let want: Vec<(Rational, BigInt)> =
                [(int(1), 1), (rat(3, 5), 1), (rat(2, 5), 4), (rat(1, 5), 18), (int(0), 96)].into_iter().map(|(v, m)| (v, BigInt::from(m))).collect();
            ensure(got == want, || format!("{got:?}"))?;
            Ok("1:1 3/5:1 2/5:4 1/5:18 0:96".into())
        }),
        run("equidistribution of to-do list and shuffles", || {
            let hf = Hopf::new(Fqsym);
            let hs = Hopf::new(ShuffleAlgebra::new());
            for kind in [OperatorKind::Ter, OperatorKind::Binter { q2: rat(1, 3) }] {
                let todo = todo_matrix(&hf, &kind, 4, 100)?;
                let shuf = shuffle_chain(&hs, kind.distribution(4)?, &[1, 2, 3, 4], 100)?.build_transition_matrix()?;
                for t in 1..=3 {
                    let a: BTreeMap<Word, Rational> =
                        todo.distribution_at_time(&Permutation::identity(4), t)?.into_iter().map(|(s, p)| (as_word(&s), p)).collect();
                    let b = shuf.distribution_at_time(&Word::new(vec![1, 2, 3, 4]), t)?;
                    ensure(a == b, || format!("{} differs at t = {t}", kind.name()))?;
                }
            }
            Ok("n = 4, t ≤ 3".into())
        }),
        run("composition-sum identity matrix", || {
            let h = Hopf::new(ShuffleAlgebra::new());
            let spec = shuffle_chain(&h, PieceDistribution::identity(3), &[1, 2, 3], 100)?;
            let m = spec.operator_matrix(&CompositionSum::unit(3))?;
            ensure(m == Matrix::identity(6), || "δ_(n) is not the identity".into())?;
            let e: Element<Word> = h.descent_operator_p(&Word::new(vec![1, 2, 3]), spec.distribution())?;
            ensure(e == Element::basis(Word::new(vec![1, 2, 3])), || "δ_(n) moves a word".into())?;
            Ok("identity".into())
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_rows_fail_to_sum_to_one() {
        let q = rat(1, 3);
        let printed = example_binomial_rows(&q, Transcription::Printed);
        let corrected = example_binomial_rows(&q, Transcription::Corrected);
        for (i, row) in corrected.iter().enumerate() {
            assert!(row.iter().sum::<Rational>().is_one(), "corrected row {i}");
        }
        assert!(!printed[3].iter().sum::<Rational>().is_one());
        let at_one = example_binomial_rows(&Rational::one(), Transcription::Printed);
        assert!(at_one.iter().all(|r| r.iter().sum::<Rational>().is_one()));
    }

    #[test]
    fn report_json_round_trip() {
        let r = SuiteReport {
            suite: "s".into(),
            checks: vec![Check { name: "a".into(), passed: false, detail: "x".into() }],
        };
        assert_eq!(SuiteReport::from_json(&r.to_json()).unwrap(), r);
        assert!(!r.passed());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope").is_err());
    }

    #[test]
    fn fast_suites_pass() {
        for name in ["lumping", "absorption", "paper-goldens"] {
            let r = run_suite(name).unwrap();
            assert!(r.passed(), "{}", r.table());
        }
    }
}
