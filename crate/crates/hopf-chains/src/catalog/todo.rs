//! Relative time on a to-do list: top-to-random with standardisation on permutations.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::algebras::{permutation_states, standardise, Fqsym, FqsymDual, Permutation};
use crate::chain::{pick, uniform, ChainSpec, TransitionMatrix};
use crate::composition::{OperatorKind, PieceDistribution};
use crate::error::{Error, Result};
use crate::hopf::Hopf;
use crate::linalg::Matrix;
use crate::rational::{big, binomial, factorial, pow, to_f64, Rational};
use crate::spectral::{t2r_eigenvector, EigenFunction, Side};

fn check_kind(kind: &OperatorKind, n: usize) -> Result<()> {
    match kind {
        OperatorKind::Ter | OperatorKind::Binter { .. } => Ok(()),
        OperatorKind::Trer { r } if *r <= n => Ok(()),
        OperatorKind::Trer { r } => Err(Error::Precondition(format!("r = {r} exceeds n = {n}"))),
        other => Err(Error::Precondition(format!("the to-do list takes ter, trer or binter, not {}", other.name()))),
    }
}

/// Law of the number of new tasks per day.
fn task_counts(kind: &OperatorKind, n: usize) -> Vec<(usize, Rational)> {
    match kind {
        OperatorKind::Ter => vec![(1.min(n), Rational::one())],
        OperatorKind::Trer { r } => vec![(*r, Rational::one())],
        OperatorKind::Binter { q2 } => {
            let p = Rational::one() - q2;
            (0..=n).map(|r| (r, big(binomial(n, r)) * pow(&p, r) * pow(q2, n - r))).collect()
        }
        _ => unreachable!("checked by check_kind"),
    }
}

/// The generic chain on `S_n` driven by `kind`.
pub fn todo_chain<'h>(hopf: &'h Hopf<Fqsym>, kind: &OperatorKind, n: usize, cap: usize) -> Result<ChainSpec<'h, Fqsym>> {
    if n == 0 {
        return Err(Error::Precondition("the to-do list needs n >= 1".into()));
    }
    check_kind(kind, n)?;
    Ok(ChainSpec::new(hopf, kind.distribution(n)?, permutation_states(n, cap)?))
}

/// Drops the first `r` letters and relabels the rest to `r+1..n`.
fn complete_tasks(sigma: &[u32], r: usize) -> Vec<u32> {
    let rest = standardise(&sigma[r..]).expect("permutation letters are distinct");
    rest.one_line().iter().map(|&v| v + r as u32).collect()
}

/// Every way to insert `1..r` into `rest`, one per injective choice of positions.
fn insertions(rest: &[u32], r: usize) -> Vec<Vec<u32>> {
    let n = rest.len() + r;
    let mut out = Vec::new();
    for slots in (0..n).combinations(r) {
        for order in (1..=r as u32).permutations(r) {
            let mut w = Vec::with_capacity(n);
            let (mut a, mut b) = (0, 0);
            for k in 0..n {
                if a < slots.len() && slots[a] == k {
                    w.push(order[a]);
                    a += 1;
                } else {
                    w.push(rest[b]);
                    b += 1;
                }
            }
            out.push(w);
        }
    }
    out
}

/// The chain built from the complete-relabel-insert description alone.
pub fn direct_todo_matrix(kind: &OperatorKind, n: usize, cap: usize) -> Result<TransitionMatrix<Permutation>> {
    check_kind(kind, n)?;
    let states = permutation_states(n, cap)?;
    let index: HashMap<&[u32], usize> = states.iter().enumerate().map(|(i, s)| (s.one_line(), i)).collect();
    let counts = task_counts(kind, n);
    let mut rows = Vec::with_capacity(states.len());
    for s in &states {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for (r, w) in &counts {
            let outs = insertions(&complete_tasks(s.one_line(), *r), *r);
            let each = w / big(num_bigint::BigInt::from(outs.len()));
            for y in outs {
                *row.entry(index[y.as_slice()]).or_insert_with(Rational::zero) += &each;
            }
        }
        rows.push(row);
    }
    TransitionMatrix::new(states, rows)
}

/// Generic matrix, checked against [`direct_todo_matrix`].
pub fn todo_matrix(hopf: &Hopf<Fqsym>, kind: &OperatorKind, n: usize, cap: usize) -> Result<TransitionMatrix<Permutation>> {
    let k = todo_chain(hopf, kind, n, cap)?.build_transition_matrix()?;
    if k != direct_todo_matrix(kind, n, cap)? {
        return Err(Error::Precondition("Hopf chain and direct to-do list chain disagree".into()));
    }
    Ok(k)
}

/// Samples the direct description: finish `r` tasks, then add `r` new ones at uniform positions.
pub struct TodoSampler {
    kind: OperatorKind,
    n: usize,
    counts: Vec<f64>,
}

impl TodoSampler {
    pub fn new(kind: OperatorKind, n: usize) -> Result<Self> {
        check_kind(&kind, n)?;
        let counts = task_counts(&kind, n).iter().map(|(_, w)| to_f64(w)).collect();
        Ok(TodoSampler { kind, n, counts })
    }

    pub fn step<R: RngCore>(&self, x: &Permutation, rng: &mut R) -> Result<Permutation> {
        if x.len() != self.n {
            return Err(Error::DegreeMismatch { expected: self.n, found: x.len() });
        }
        let i = pick(self.counts.iter().copied(), uniform(rng));
        let r = task_counts(&self.kind, self.n)[i].0;
        let mut w = complete_tasks(x.one_line(), r);
        for task in (1..=r as u32).rev() {
            // inserting r, r-1, .., 1 each uniformly gives a uniform injective placement
            let pos = ((uniform(rng) * (w.len() + 1) as f64) as usize).min(w.len());
            w.insert(pos, task);
        }
        Permutation::new(w)
    }
}

/// `j` with `j+1` the smallest letter moved by `τ`; the identity gets `j = n`.
pub fn first_moved(tau: &Permutation) -> usize {
    tau.one_line().iter().enumerate().position(|(k, &v)| v as usize != k + 1).unwrap_or(tau.len())
}

/// The relative-order rule for `f_τ(σ)`.
pub fn f_tau(tau: &Permutation, sigma: &Permutation) -> Result<Rational> {
    let n = tau.len();
    if sigma.len() != n {
        return Err(Error::DegreeMismatch { expected: n, found: sigma.len() });
    }
    let j = first_moved(tau);
    if j == n {
        return Ok(Rational::one());
    }
    let t = tau.one_line();
    let i = t.iter().position(|&v| v as usize == j + 1).expect("j+1 occurs");
    let tail = standardise(&sigma.one_line()[j..])?;
    if tail == standardise(&t[j..])? {
        return Ok(Rational::one());
    }
    let mut minus = vec![j as u32 + 1];
    minus.extend(t[j..i].iter().chain(&t[i + 1..]));
    if tail == standardise(&minus)? {
        return Ok(-Rational::one());
    }
    Ok(Rational::zero())
}

/// The same function obtained by dualising: `t2r_eigenvector` in the dual algebra
/// with `p = τ̄* − (1 τ̄ without its 1)*`, divided by `j!`.
pub fn f_tau_by_duality(tau: &Permutation) -> Result<(BTreeMap<Permutation, Rational>, Rational)> {
    let n = tau.len();
    let j = first_moved(tau);
    let dual = Hopf::new(FqsymDual);
    if j == n {
        return Ok((permutation_states(n, usize::MAX)?.into_iter().map(|s| (s, Rational::one())).collect(), Rational::one()));
    }
    let bar = standardise(&tau.one_line()[j..])?;
    let mut other = vec![1u32];
    other.extend(bar.one_line().iter().copied().filter(|&v| v != 1));
    let mut p = crate::element::Element::basis(bar);
    p.add_term(Permutation::new(other)?, -Rational::one());
    let cs = vec![Permutation::identity(1); j];
    let (v, beta) = t2r_eigenvector(&dual, &OperatorKind::Ter, n, &p, &cs)?;
    let jf = big(factorial(j));
    Ok((v.iter().map(|(s, c)| (s.clone(), c / &jf)).collect(), beta))
}

/// One `f_τ` per `τ ∈ S_n`, each checked as an exact right eigenfunction of `k`
/// (a ter or binter to-do chain on `n` letters), with the full set checked to have rank `n!`.
pub fn fqsym_eigenbasis(k: &TransitionMatrix<Permutation>, kind: &OperatorKind, n: usize) -> Result<Vec<(Permutation, EigenFunction<Permutation>)>> {
    if !matches!(kind, OperatorKind::Ter | OperatorKind::Binter { .. }) {
        return Err(Error::Precondition("the f_τ basis is for ter and binter".into()));
    }
    let states = k.states().to_vec();
    let mut out = Vec::with_capacity(states.len());
    for tau in &states {
        let j = first_moved(tau);
        let beta = if j == n { Rational::one() } else { kind.t2r_eigenvalue(n, j)? };
        let values = states.iter().map(|s| Ok((s.clone(), f_tau(tau, s)?))).collect::<Result<_>>()?;
        out.push((tau.clone(), EigenFunction::verified(k, Side::Right, beta, values)?));
    }
    let m = Matrix::from_rows(out.iter().map(|(_, f)| f.vector(k)).collect());
    if m.rank() != states.len() {
        return Err(Error::EigenEquation(format!("the f_τ span only rank {} of {}", m.rank(), states.len())));
    }
    Ok(out)
}

/// Closed form and matrix-power value of the position of the smallest of `σ_{j+1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewestPosition {
    pub closed_form: BTreeMap<usize, Rational>,
    pub brute_force: BTreeMap<usize, Rational>,
}

impl NewestPosition {
    pub fn agrees(&self) -> bool {
        self.closed_form == self.brute_force
    }
}

/// Positions are 1-based and absolute, so they run over `j+1..=n`.
pub fn newest_position_distribution(k: &TransitionMatrix<Permutation>, kind: &OperatorKind, n: usize, j: usize, t: usize) -> Result<NewestPosition> {
    if j >= n {
        return Err(Error::Precondition(format!("j = {j} must be below n = {n}")));
    }
    let beta = match kind {
        OperatorKind::Ter | OperatorKind::Binter { .. } => kind.t2r_eigenvalue(n, j)?,
        _ => return Err(Error::Precondition("the closed form is for ter and binter".into())),
    };
    let bt = pow(&beta, t);
    let m = Rational::from_integer((n - j).into());
    let mut closed_form = BTreeMap::new();
    for pos in j + 1..=n {
        let v = if pos == j + 1 {
            (Rational::one() + &bt * (&m - Rational::one())) / &m
        } else {
            (Rational::one() - &bt) / &m
        };
        closed_form.insert(pos, v);
    }
    let mut brute_force: BTreeMap<usize, Rational> = (j + 1..=n).map(|p| (p, Rational::zero())).collect();
    for (s, p) in k.distribution_at_time(&Permutation::identity(n), t)? {
        let tail = &s.one_line()[j..];
        let lowest = tail.iter().position_min().expect("nonempty tail");
        *brute_force.get_mut(&(j + 1 + lowest)).expect("position in range") += p;
    }
    Ok(NewestPosition { closed_form, brute_force })
}

/// `σ ↦ std(last k letters)`.
pub fn last_k(k: usize) -> impl Fn(&Permutation) -> Permutation {
    move |s: &Permutation| {
        let l = s.one_line();
        standardise(&l[l.len().saturating_sub(k)..]).expect("permutation letters are distinct")
    }
}

/// The chain that observing the last `k` letters should produce: lazy ter or the same binter.
pub fn expected_last_k_chain(hopf: &Hopf<Fqsym>, kind: &OperatorKind, n: usize, k: usize) -> Result<TransitionMatrix<Permutation>> {
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} must lie in [1, n]")));
    }
    let dist: PieceDistribution = match kind {
        OperatorKind::Ter => OperatorKind::Ter.distribution(k)?.lazy(&Rational::new((n - k).into(), n.into()))?,
        OperatorKind::Binter { .. } => kind.distribution(k)?,
        _ => return Err(Error::Precondition("last-k lumping is for ter and binter".into())),
    };
    ChainSpec::new(hopf, dist, permutation_states(k, usize::MAX)?).build_transition_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(s: &str) -> Permutation {
        Permutation::parse(s).unwrap()
    }

    #[test]
    fn generic_and_direct_agree() {
        let h = Hopf::new(Fqsym);
        for kind in [OperatorKind::Ter, OperatorKind::Trer { r: 2 }, OperatorKind::Binter { q2: rat(1, 3) }] {
            for n in 1..=4 {
                if let OperatorKind::Trer { r } = kind {
                    if r > n {
                        continue;
                    }
                }
                todo_matrix(&h, &kind, n, 100).unwrap();
            }
        }
    }

    #[test]
    fn two_task_step_is_reachable() {
        let k = direct_todo_matrix(&OperatorKind::Trer { r: 2 }, 5, 200).unwrap();
        assert_eq!(k.entry(&perm("23541"), &perm("15423")), rat(1, 20));
    }

    #[test]
    fn relative_order_rule() {
        let tau = perm("12534");
        assert_eq!(f_tau(&tau, &perm("35412")).unwrap(), Rational::one());
        assert_eq!(f_tau(&tau, &perm("24153")).unwrap(), -Rational::one());
        assert_eq!(f_tau(&tau, &perm("25431")).unwrap(), Rational::zero());
        assert_eq!(f_tau(&perm("1234"), &perm("4321")).unwrap(), Rational::one());
    }

    #[test]
    fn rule_matches_duality() {
        for tau in permutation_states(4, 100).unwrap() {
            let (v, beta) = f_tau_by_duality(&tau).unwrap();
            for s in permutation_states(4, 100).unwrap() {
                assert_eq!(v.get(&s).cloned().unwrap_or_else(Rational::zero), f_tau(&tau, &s).unwrap(), "{tau} at {s}");
            }
            let j = first_moved(&tau);
            assert_eq!(beta, if j == 4 { Rational::one() } else { rat(j as i64, 4) });
        }
    }

    #[test]
    fn eigenbasis_for_four_letters() {
        let h = Hopf::new(Fqsym);
        for kind in [OperatorKind::Ter, OperatorKind::Binter { q2: rat(1, 2) }] {
            let k = todo_matrix(&h, &kind, 4, 100).unwrap();
            assert_eq!(fqsym_eigenbasis(&k, &kind, 4).unwrap().len(), 24);
        }
    }

    #[test]
    fn newest_position_examples() {
        let h = Hopf::new(Fqsym);
        let k = todo_matrix(&h, &OperatorKind::Ter, 5, 200).unwrap();
        let d = newest_position_distribution(&k, &OperatorKind::Ter, 5, 2, 1).unwrap();
        assert!(d.agrees());
        assert_eq!(d.closed_form, BTreeMap::from([(3, rat(3, 5)), (4, rat(1, 5)), (5, rat(1, 5))]));
        let d0 = newest_position_distribution(&k, &OperatorKind::Ter, 5, 2, 0).unwrap();
        assert_eq!(d0.brute_force[&3], Rational::one());
        let kind = OperatorKind::Binter { q2: rat(1, 2) };
        let kb = todo_matrix(&h, &kind, 4, 100).unwrap();
        assert!(newest_position_distribution(&kb, &kind, 4, 1, 2).unwrap().agrees());
    }

    #[test]
    fn sampler_matches_matrix_support() {
        let kind = OperatorKind::Trer { r: 2 };
        let k = direct_todo_matrix(&kind, 4, 100).unwrap();
        let s = TodoSampler::new(kind, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = perm("3142");
        for _ in 0..200 {
            let y = s.step(&x, &mut rng).unwrap();
            assert!(k.entry(&x, &y) > Rational::zero());
        }
    }
}
