//! Employee firing: top-to-random chains on decorated Connes–Kreimer forests,
//! read as a company tree losing employees through promotion cascades.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::RngCore;

use crate::algebras::{Arena, ConnesKreimer, Forest};
use crate::chain::{pick, uniform, ChainSpec, TransitionMatrix};
use crate::composition::OperatorKind;
use crate::error::{Error, Result};
use crate::hopf::Hopf;
use crate::rational::{big, binomial, factorial, pow, Rational};
use crate::spectral::{EigenFunction, Side};

use super::Observable;

/// The small company used throughout: a boss over A and C, with D under C.
pub fn example_company() -> Forest {
    Forest::parse("*(A,C(D))").expect("static tree")
}

/// Rooted subtrees of [`example_company`] in the conventional display order.
pub fn example_states() -> Vec<Forest> {
    ["*", "*(A)", "*(C)", "*(C(D))", "*(A,C)", "*(A,C(D))"]
        .iter()
        .map(|s| Forest::parse(s).expect("static tree"))
        .collect()
}

/// An eight-person company: accounting (A over B) and consulting (C over D, E, F; F over G).
pub fn large_company() -> Forest {
    Forest::parse("*(A(B),C(D,E,F(G)))").expect("static tree")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeModel {
    Single,
    Binomial { q2: Rational },
    Vp { q1: Rational, q2: Rational, q3: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeChainConfig {
    pub start: Forest,
    pub model: TreeModel,
}

impl TreeChainConfig {
    pub fn new(start: Forest, model: TreeModel) -> Result<Self> {
        if start.trees().len() != 1 {
            return Err(Error::Precondition("the start state must be a single tree".into()));
        }
        let cfg = TreeChainConfig { start, model };
        cfg.operator().distribution(cfg.n0())?;
        Ok(cfg)
    }

    pub fn n0(&self) -> usize {
        self.start.size()
    }

    pub fn operator(&self) -> OperatorKind {
        match &self.model {
            TreeModel::Single => OperatorKind::Ter,
            TreeModel::Binomial { q2 } => OperatorKind::Binter { q2: q2.clone() },
            TreeModel::Vp { q1, q2, q3 } => OperatorKind::Trintober { q1: q1.clone(), q2: q2.clone(), q3: q3.clone() },
        }
    }

    /// The Hopf chain on forests `•^{n₀−n} ⊔ T`, closed from the start tree.
    pub fn hopf_chain<'h>(&self, hopf: &'h Hopf<ConnesKreimer>, cap: usize) -> Result<ChainSpec<'h, ConnesKreimer>> {
        // every rooted subtree is seeded, so degenerate parameters still give the full state space
        let n0 = self.n0();
        let mut starts = vec![self.start.clone(), Forest::singletons(n0)];
        for t in rooted_subtree_states(&self.start)? {
            if t.size() > 1 && t.size() < n0 {
                starts.push(t.union(&Forest::singletons(n0 - t.size())));
            }
        }
        ChainSpec::closure(hopf, self.operator().distribution(n0)?, starts, cap)
    }

    /// Eigenvalue attached to a rooted subtree on `n′` vertices.
    pub fn subtree_eigenvalue(&self, n_prime: usize) -> Result<Rational> {
        match &self.model {
            TreeModel::Single => Ok(Rational::new((self.n0() - n_prime).into(), self.n0().into())),
            TreeModel::Binomial { q2 } => Ok(pow(q2, n_prime)),
            TreeModel::Vp { .. } => Err(Error::Precondition("subtree eigenfunctions need the single or binomial model".into())),
        }
    }
}

/// `n!/∏ h(v)`: the number of increasing labellings.
pub fn hook_eta(x: &Forest) -> Rational {
    let a = x.arena();
    let hooks: num_bigint::BigInt = (0..a.len()).map(|v| num_bigint::BigInt::from(a.hook(v))).product();
    Rational::new(factorial(a.len()), hooks)
}

/// The tree a forest `•^k ⊔ T` stands for; all-singleton forests map to `•`.
pub fn core_tree(x: &Forest) -> Forest {
    let (_, rest) = x.split_singletons();
    if rest.trees().is_empty() {
        Forest::singletons(1)
    } else {
        rest
    }
}

/// Every rooted subtree of a tree, sorted.
pub fn rooted_subtree_states(t: &Forest) -> Result<Vec<Forest>> {
    let a = t.arena();
    let &[root] = a.roots.as_slice() else {
        return Err(Error::Precondition("expected a single tree".into()));
    };
    let mut out: Vec<Forest> = a.rooted_subtrees(root).iter().map(|m| a.induced(m)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Distribution of the next vertex in the walk from `v`: uniform over strict descendants.
pub fn hook_walk_step(a: &Arena, v: usize) -> Vec<(usize, Rational)> {
    let d = a.descendants(v);
    let k = d.len();
    d.into_iter().map(|w| (w, Rational::new(1.into(), k.into()))).collect()
}

/// Exact law of the leaf where a walk started at `v` stops.
pub fn hook_walk_from(a: &Arena, v: usize) -> BTreeMap<usize, Rational> {
    fn go(a: &Arena, v: usize, memo: &mut HashMap<usize, BTreeMap<usize, Rational>>) -> BTreeMap<usize, Rational> {
        if let Some(m) = memo.get(&v) {
            return m.clone();
        }
        let out = if a.is_leaf(v) {
            BTreeMap::from([(v, Rational::one())])
        } else {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (w, p) in hook_walk_step(a, v) {
                for (leaf, q) in go(a, w, memo) {
                    *acc.entry(leaf).or_insert_with(Rational::zero) += &p * q;
                }
            }
            acc
        };
        memo.insert(v, out.clone());
        out
    }
    go(a, v, &mut HashMap::new())
}

/// Exact law of the removed leaf when the start vertex is uniform.
pub fn hook_walk_distribution(t: &Forest) -> BTreeMap<usize, Rational> {
    let a = t.arena();
    let n = Rational::from_integer(a.len().into());
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut memo = HashMap::new();
    for v in 0..a.len() {
        let law = memo.entry(v).or_insert_with(|| hook_walk_from(&a, v)).clone();
        for (leaf, p) in law {
            *acc.entry(leaf).or_insert_with(Rational::zero) += p / &n;
        }
    }
    acc
}

/// Result of one firing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removal {
    pub leaf: usize,
    pub label: Option<String>,
    pub remaining: Forest,
}

/// One hook walk on a tree: uniform start, then uniform strict descendants until a leaf.
pub fn hook_walk_remove<R: RngCore>(t: &Forest, rng: &mut R) -> Result<Removal> {
    let a = t.arena();
    if a.is_empty() {
        return Err(Error::Precondition("cannot fire from an empty forest".into()));
    }
    let mut v = ((uniform(rng) * a.len() as f64) as usize).min(a.len() - 1);
    while !a.is_leaf(v) {
        let d = a.descendants(v);
        v = d[((uniform(rng) * d.len() as f64) as usize).min(d.len() - 1)];
    }
    let keep: Vec<bool> = (0..a.len()).map(|u| u != v).collect();
    Ok(Removal { leaf: v, label: a.label[v].clone(), remaining: a.induced(&keep) })
}

fn remove_vertex(a: &Arena, v: usize) -> Forest {
    let keep: Vec<bool> = (0..a.len()).map(|u| u != v).collect();
    a.induced(&keep)
}

/// Law of the tree left after `k` successive firings; a lone boss is never fired.
pub fn removal_distribution(t: &Forest, k: usize) -> BTreeMap<Forest, Rational> {
    let mut dist = BTreeMap::from([(t.clone(), Rational::one())]);
    for _ in 0..k {
        let mut next: BTreeMap<Forest, Rational> = BTreeMap::new();
        for (x, p) in dist {
            if x.size() <= 1 {
                *next.entry(x).or_insert_with(Rational::zero) += p;
                continue;
            }
            let a = x.arena();
            for (leaf, q) in hook_walk_distribution(&x) {
                *next.entry(remove_vertex(&a, leaf)).or_insert_with(Rational::zero) += &p * q;
            }
        }
        dist = next;
    }
    dist
}

/// The firing chain built straight from hook walks, without the Hopf algebra.
pub fn direct_tree_matrix(cfg: &TreeChainConfig) -> Result<TransitionMatrix<Forest>> {
    let states = rooted_subtree_states(&cfg.start)?;
    let index: HashMap<&Forest, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n0 = cfg.n0();
    let one = Rational::one();
    let mut rows = Vec::with_capacity(states.len());
    for t in &states {
        let n = t.size();
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut add = |law: BTreeMap<Forest, Rational>, w: &Rational| -> Result<()> {
            for (y, p) in law {
                let j = *index.get(&y).ok_or_else(|| Error::Precondition(format!("{y} is not a rooted subtree")))?;
                *row.entry(j).or_insert_with(Rational::zero) += w * p;
            }
            Ok(())
        };
        match &cfg.model {
            TreeModel::Single => {
                let fire = Rational::new(n.into(), n0.into());
                add(BTreeMap::from([(t.clone(), one.clone())]), &(&one - &fire))?;
                add(removal_distribution(t, 1), &fire)?;
            }
            TreeModel::Binomial { q2 } => {
                let p = &one - q2;
                for r in 0..=n {
                    let w = big(binomial(n, r)) * pow(&p, r) * pow(q2, n - r);
                    add(removal_distribution(t, r.min(n.saturating_sub(1))), &w)?;
                }
            }
            TreeModel::Vp { .. } => {
                return Err(Error::Precondition("the VP model has no direct tree description".into()));
            }
        }
        rows.push(row);
    }
    TransitionMatrix::new(states, rows)
}

/// The firing chain: the generic Hopf chain, lumped to trees for the single and
/// binomial models and checked against [`direct_tree_matrix`].
pub fn tree_chain_matrix(cfg: &TreeChainConfig, hopf: &Hopf<ConnesKreimer>, cap: usize) -> Result<TransitionMatrix<Forest>> {
    let spec = cfg.hopf_chain(hopf, cap)?;
    let generic = spec.build_transition_matrix()?;
    if let TreeModel::Vp { .. } = cfg.model {
        return Ok(generic);
    }
    let lumped = generic.lump(core_tree).map_err(|v| {
        Error::Precondition(format!("forest chain does not lump to trees: {} vs {}", v.first, v.second))
    })?;
    let direct = direct_tree_matrix(cfg)?;
    if lumped != direct {
        return Err(Error::Precondition("Hopf chain and hook-walk chain disagree".into()));
    }
    Ok(lumped)
}

/// `f_{T′}(T) = binom(n, n′) · P(n − n′ firings from T leave T′)`.
pub fn tree_eigenfunction(cfg: &TreeChainConfig, k: &TransitionMatrix<Forest>, t_prime: &Forest) -> Result<EigenFunction<Forest>> {
    let n_prime = t_prime.size();
    if n_prime <= 1 {
        return Err(Error::Precondition("the one-vertex tree has no subtree eigenfunction".into()));
    }
    let mut values = BTreeMap::new();
    for t in k.states() {
        let n = t.size();
        if n < n_prime {
            continue;
        }
        let p = removal_distribution(t, n - n_prime).remove(t_prime).unwrap_or_else(Rational::zero);
        values.insert(t.clone(), big(binomial(n, n_prime)) * p);
    }
    let f = EigenFunction::verified(k, Side::Right, cfg.subtree_eigenvalue(n_prime)?, values)?;
    if f.value(t_prime) != Rational::one()
        || k.states().iter().any(|s| s != t_prime && s.size() <= n_prime && !f.value(s).is_zero())
    {
        return Err(Error::EigenEquation("subtree eigenfunction is not triangular".into()));
    }
    Ok(f)
}

/// The constant function together with one `f_{T′}` per rooted subtree `T′ ≠ •`, in state order.
pub fn tree_eigenbasis(cfg: &TreeChainConfig, k: &TransitionMatrix<Forest>) -> Result<Vec<EigenFunction<Forest>>> {
    let ones = k.states().iter().map(|s| (s.clone(), Rational::one())).collect();
    let mut out = vec![EigenFunction::verified(k, Side::Right, Rational::one(), ones)?];
    for t in k.states().iter().filter(|s| s.size() > 1) {
        out.push(tree_eigenfunction(cfg, k, t)?);
    }
    Ok(out)
}

/// Department heads of the start tree, in canonical child order.
pub fn department_heads(start: &Forest) -> Result<Vec<String>> {
    let a = start.arena();
    let &[root] = a.roots.as_slice() else {
        return Err(Error::Precondition("expected a single tree".into()));
    };
    let heads: Vec<String> = a.children[root]
        .iter()
        .map(|&c| a.label[c].clone().ok_or_else(|| Error::Precondition("department heads need labels".into())))
        .collect::<Result<_>>()?;
    let mut sorted = heads.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != heads.len() {
        return Err(Error::Precondition("department heads need distinct labels".into()));
    }
    Ok(heads)
}

/// Sizes of the departments headed by `heads` in a rooted subtree; absent heads count 0.
pub fn department_sizes(x: &Forest, heads: &[String]) -> Vec<usize> {
    let t = core_tree(x);
    let a = t.arena();
    let root = a.roots[0];
    heads
        .iter()
        .map(|h| {
            a.children[root]
                .iter()
                .find(|&&c| a.label[c].as_deref() == Some(h.as_str()))
                .map_or(0, |&c| a.hook(c))
        })
        .collect()
}

/// `T ↦ n ∏ binom(n⁽ⁱ⁾, s_i)`, departments identified by their heads in the start tree.
pub fn team_count_observable(cfg: &TreeChainConfig, s: &[usize]) -> Result<Observable<Forest>> {
    let heads = department_heads(&cfg.start)?;
    if s.len() > heads.len() && s[heads.len()..].iter().any(|&x| x > 0) {
        return Err(Error::Precondition("more departments requested than the company has".into()));
    }
    let sum: usize = s.iter().sum();
    let beta = match &cfg.model {
        TreeModel::Single => {
            if sum + 1 > cfg.n0() {
                Rational::zero()
            } else {
                Rational::new((cfg.n0() - 1 - sum).into(), cfg.n0().into())
            }
        }
        TreeModel::Binomial { q2 } => pow(q2, 1 + sum),
        TreeModel::Vp { .. } => return Err(Error::Precondition("team counts need the single or binomial model".into())),
    };
    let s = s.to_vec();
    let name = format!("team-count{s:?}");
    let f = Observable::new(name, move |x: &Forest| {
        let t = core_tree(x);
        let sizes = department_sizes(&t, &heads);
        let mut v = Rational::from_integer(t.size().into());
        for (i, &si) in s.iter().enumerate() {
            v *= big(binomial(sizes.get(i).copied().unwrap_or(0), si));
        }
        v
    });
    // with Σs = 0 this is the head count n, which is not an eigenfunction
    Ok(if sum == 0 { f } else { f.with_eigenvalue(beta) })
}

/// `fo_j(x) = Σ_u binom(h(u), n₀−j) (q₃/(q₁+q₃))^{a(u)−1} (q₁/(q₁+q₃))^{h(u)}`.
pub fn vp_observable(q1: &Rational, q3: &Rational, n0: usize, j: usize) -> Result<Observable<Forest>> {
    let s = q1 + q3;
    if s.is_zero() {
        return Err(Error::Precondition("q1 + q3 must be positive".into()));
    }
    if j >= n0 {
        return Err(Error::Precondition(format!("j = {j} must lie in [0, n0 - 1]")));
    }
    let up = q3 / &s;
    let down = q1 / &s;
    Ok(Observable::new(format!("fo_{j}"), move |x: &Forest| {
        let a = x.arena();
        let mut acc = Rational::zero();
        for u in 0..a.len() {
            let h = a.hook(u);
            if h < n0 - j {
                continue;
            }
            acc += big(binomial(h, n0 - j)) * pow(&up, a.depth(u) - 1) * pow(&down, h);
        }
        acc
    }))
}

/// `max binom(n₀, a(u)−1)` over vertices of the start tree with `h(u) ≥ n₀ − j`.
pub fn vp_bound_factor(start: &Forest, j: usize) -> Rational {
    let a = start.arena();
    let n0 = a.len();
    (0..a.len())
        .filter(|&u| a.hook(u) + j >= n0)
        .map(|u| big(binomial(n0, a.depth(u) - 1)))
        .max()
        .unwrap_or_else(Rational::zero)
}

fn within_hook(a: &Arena, v: usize, mask: &[bool]) -> usize {
    1 + a.descendants(v).iter().filter(|&&u| mask[u]).count()
}

fn is_trunk_of(a: &Arena, mask: &[bool], within: &[bool]) -> bool {
    (0..a.len()).all(|v| !mask[v] || a.parent[v].map_or(true, |p| mask[p] || !within[p]))
}

/// Both sides of the coproduct-ratio identity for `•^{j−i} ⊗ T′ ⊗ •^i`.
pub fn coproduct_ratio_sides(hopf: &Hopf<ConnesKreimer>, x: &Forest, t_prime: &Forest, i: usize) -> Result<(Rational, Rational)> {
    let n = x.size();
    let m = t_prime.size();
    if m > n || t_prime.trees().len() > 1 {
        return Err(Error::Precondition("T′ must be a tree no larger than x".into()));
    }
    let j = n - m;
    if i > j {
        return Err(Error::Precondition("i must lie in [0, j]".into()));
    }
    let mut parts = vec![1; j - i];
    parts.push(m);
    parts.extend(std::iter::repeat(1).take(i));
    let d = crate::composition::WeakComposition::new(parts);
    let mut target = vec![Forest::singletons(1); j - i];
    target.push(t_prime.clone());
    target.extend(std::iter::repeat(Forest::singletons(1)).take(i));
    let coeff = hopf
        .refined_coproduct(x, &d)?
        .iter()
        .find(|(zs, _)| zs == &target)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Rational::zero);
    let lhs = coeff / hopf.eta(x);

    let a = x.arena();
    let all = vec![true; a.len()];
    let mut sum = Rational::zero();
    for mask in 0u64..(1u64 << a.len()) {
        let s: Vec<bool> = (0..a.len()).map(|v| mask >> v & 1 == 1).collect();
        if s.iter().filter(|&&b| b).count() != i || !is_trunk_of(&a, &s, &all) {
            continue;
        }
        let rest: Vec<bool> = s.iter().map(|b| !b).collect();
        let s_factor: Rational = (0..a.len())
            .filter(|&v| s[v])
            .map(|v| Rational::new(a.hook(v).into(), within_hook(&a, v, &s).into()))
            .product();
        for tmask in 0u64..(1u64 << a.len()) {
            let tm: Vec<bool> = (0..a.len()).map(|v| tmask >> v & 1 == 1).collect();
            if tm.iter().zip(&s).any(|(t, s)| *t && *s) || tm.iter().filter(|&&b| b).count() != m {
                continue;
            }
            if !is_trunk_of(&a, &tm, &rest) || &a.induced(&tm) != t_prime {
                continue;
            }
            let t_factor: Rational = (0..a.len()).filter(|&v| tm[v]).map(|v| Rational::from_integer(a.hook(v).into())).product();
            sum += &s_factor * t_factor;
        }
    }
    let norm = big(factorial(m) * crate::rational::multinomial(&[i, m, j - i]));
    Ok((lhs, sum / norm))
}

/// `Σ_S ∏_{v∈S} h_x(v)/h_S(v)` over trunks `S` of degree `i`.
pub fn trunk_hook_sum(x: &Forest, i: usize) -> Rational {
    let a = x.arena();
    let all = vec![true; a.len()];
    let mut sum = Rational::zero();
    for mask in 0u64..(1u64 << a.len()) {
        let s: Vec<bool> = (0..a.len()).map(|v| mask >> v & 1 == 1).collect();
        if s.iter().filter(|&&b| b).count() != i || !is_trunk_of(&a, &s, &all) {
            continue;
        }
        sum += (0..a.len())
            .filter(|&v| s[v])
            .map(|v| Rational::new(a.hook(v).into(), within_hook(&a, v, &s).into()))
            .product::<Rational>();
    }
    sum
}

/// Catalog sampler for the single and binomial models on trees.
pub struct TreeSampler {
    cfg: TreeChainConfig,
}

impl TreeSampler {
    pub fn new(cfg: TreeChainConfig) -> Result<Self> {
        if let TreeModel::Vp { .. } = cfg.model {
            return Err(Error::Precondition("the VP model is sampled through the Hopf chain".into()));
        }
        Ok(TreeSampler { cfg })
    }

    pub fn step<R: RngCore>(&self, x: &Forest, rng: &mut R) -> Result<Forest> {
        let n = x.size();
        let n0 = self.cfg.n0();
        let fires = match &self.cfg.model {
            TreeModel::Single => usize::from(uniform(rng) * (n0 as f64) < n as f64),
            TreeModel::Binomial { q2 } => {
                let p = 1.0 - crate::rational::to_f64(q2);
                (0..n).filter(|_| uniform(rng) < p).count()
            }
            TreeModel::Vp { .. } => unreachable!("rejected in new"),
        };
        let mut t = x.clone();
        for _ in 0..fires {
            if t.size() <= 1 {
                break;
            }
            t = hook_walk_remove(&t, rng)?.remaining;
        }
        Ok(t)
    }
}

/// Picks an index from exact weights; convenience for the samplers here.
pub fn pick_exact<R: RngCore>(weights: &[Rational], rng: &mut R) -> usize {
    pick(weights.iter().map(crate::rational::to_f64), uniform(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hook_walk_matches_eta_ratios() {
        let h = Hopf::new(ConnesKreimer);
        for t in [example_company(), large_company()] {
            let a = t.arena();
            for (leaf, p) in hook_walk_distribution(&t) {
                assert_eq!(p, h.eta(&remove_vertex(&a, leaf)) / h.eta(&t));
            }
            assert_eq!(hook_eta(&t), h.eta(&t));
        }
    }

    #[test]
    fn firing_c_in_the_large_company() {
        let t = large_company();
        let a = t.arena();
        let c = (0..a.len()).find(|&v| a.label[v].as_deref() == Some("C")).unwrap();
        let step = hook_walk_step(&a, c);
        assert_eq!(step.len(), 4);
        assert!(step.iter().all(|(_, p)| *p == rat(1, 4)));
        let law: BTreeMap<String, Rational> =
            hook_walk_from(&a, c).into_iter().map(|(v, p)| (a.label[v].clone().unwrap(), p)).collect();
        assert_eq!(law, BTreeMap::from([("D".into(), rat(1, 4)), ("E".into(), rat(1, 4)), ("G".into(), rat(1, 2))]));
    }

    #[test]
    fn path_always_loses_its_bottom() {
        let t = Forest::parse("*(C(D))").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let r = hook_walk_remove(&t, &mut rng).unwrap();
            assert_eq!(r.label.as_deref(), Some("D"));
            assert_eq!(r.remaining, Forest::parse("*(C)").unwrap());
        }
    }

    #[test]
    fn example_states_are_the_rooted_subtrees() {
        let mut want = example_states();
        want.sort();
        assert_eq!(rooted_subtree_states(&example_company()).unwrap(), want);
        assert_eq!(rooted_subtree_states(&large_company()).unwrap().iter().filter(|s| s.size() == 3).count(), 5);
    }

    #[test]
    fn team_counts_on_the_large_company() {
        let cfg = TreeChainConfig::new(large_company(), TreeModel::Single).unwrap();
        let f = team_count_observable(&cfg, &[1, 2]).unwrap();
        assert_eq!(f.eval(&large_company()), int(160));
        let zero = team_count_observable(&cfg, &[]).unwrap();
        assert_eq!(zero.eval(&large_company()), int(8));
        assert!(zero.eigenvalue.is_none());
    }

    #[test]
    fn trunk_identity_small() {
        let x = example_company();
        for i in 0..=4 {
            assert_eq!(trunk_hook_sum(&x, i), big(binomial(4, i)));
        }
    }

    fn golden(model: TreeModel) -> (TreeChainConfig, TransitionMatrix<Forest>) {
        let cfg = TreeChainConfig::new(example_company(), model).unwrap();
        let h = Hopf::new(ConnesKreimer);
        let k = tree_chain_matrix(&cfg, &h, 1000).unwrap().reindexed(&example_states()).unwrap();
        (cfg, k)
    }

    #[test]
    fn single_model_rows() {
        let (_, k) = golden(TreeModel::Single);
        let want = [
            vec![int(1)],
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(1, 2), int(0), rat(1, 2)],
            vec![int(0), int(0), rat(3, 4), rat(1, 4)],
            vec![int(0), rat(3, 8), rat(3, 8), int(0), rat(1, 4)],
            vec![int(0), int(0), int(0), rat(1, 3), rat(2, 3), int(0)],
        ];
        let d = k.to_dense();
        for (i, row) in want.iter().enumerate() {
            for j in 0..6 {
                assert_eq!(*d.get(i, j), row.get(j).cloned().unwrap_or_else(Rational::zero), "({i},{j})");
            }
        }
    }

    #[test]
    fn binomial_model_rows() {
        let q = rat(2, 7);
        let p = &Rational::one() - &q;
        let (_, k) = golden(TreeModel::Binomial { q2: q.clone() });
        let d = k.to_dense();
        let q2 = pow(&q, 2);
        let q3 = pow(&q, 3);
        assert_eq!(*d.get(1, 0), &p * (&Rational::one() + &q));
        assert_eq!(*d.get(3, 0), pow(&p, 2) * (&Rational::one() + int(2) * &q));
        assert_eq!(*d.get(3, 2), int(3) * &q2 * &p);
        assert_eq!(*d.get(4, 1), rat(3, 2) * &q2 * &p);
        assert_eq!(*d.get(5, 0), pow(&p, 3) * (&Rational::one() + int(3) * &q));
        assert_eq!(*d.get(5, 4), rat(8, 3) * &q3 * &p);
        assert_eq!(*d.get(5, 5), pow(&q, 4));
    }

    #[test]
    fn eigenfunction_table() {
        let (cfg, k) = golden(TreeModel::Single);
        let basis = tree_eigenbasis(&cfg, &k).unwrap();
        let states = example_states();
        let t0 = &states[5];
        let last: Vec<Rational> = basis.iter().map(|f| f.value(t0)).collect();
        assert_eq!(last, vec![int(1), int(2), int(4), rat(4, 3), rat(8, 3), int(1)]);
        let col_c: Vec<Rational> = states.iter().map(|s| basis[2].value(s)).collect();
        assert_eq!(col_c, vec![int(0), int(0), int(1), int(3), rat(3, 2), int(4)]);
        let betas: Vec<Rational> = basis.iter().map(|f| f.eigenvalue.clone()).collect();
        assert_eq!(betas, vec![int(1), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 4), int(0)]);
    }

    #[test]
    fn team_count_is_an_eigenfunction() {
        let h = Hopf::new(ConnesKreimer);
        let start = Forest::parse("*(A(B),C(D))").unwrap();
        for model in [TreeModel::Single, TreeModel::Binomial { q2: rat(1, 3) }] {
            let cfg = TreeChainConfig::new(start.clone(), model).unwrap();
            let k = tree_chain_matrix(&cfg, &h, 1000).unwrap();
            for s in [vec![1, 0], vec![1, 1], vec![2, 1], vec![0, 2]] {
                let f = team_count_observable(&cfg, &s).unwrap();
                let values = k.states().iter().map(|x| (x.clone(), f.eval(x))).collect();
                EigenFunction::verified(&k, Side::Right, f.eigenvalue.clone().unwrap(), values).unwrap();
            }
            // n itself fails only because the lone boss is never fired
            let f = team_count_observable(&cfg, &[]).unwrap();
            assert!(f.eigenvalue.is_none());
            let beta = match &cfg.model {
                TreeModel::Binomial { q2 } => q2.clone(),
                _ => rat(3, 4),
            };
            let values = k.states().iter().map(|x| (x.clone(), f.eval(x))).collect();
            assert!(EigenFunction::verified(&k, Side::Right, beta, values).is_err());
        }
    }

    #[test]
    fn coproduct_ratio_identity() {
        let h = Hopf::new(ConnesKreimer);
        let x = Forest::parse("*(A,C(D))").unwrap();
        for tp in ["*", "*(A)", "*(C(D))", "*(A,C)"] {
            let tp = Forest::parse(tp).unwrap();
            for i in 0..=(4 - tp.size()) {
                let (l, r) = coproduct_ratio_sides(&h, &x, &tp, i).unwrap();
                assert_eq!(l, r, "{tp} i={i}");
            }
        }
    }

    #[test]
    fn vp_bound_holds() {
        let (q1, q2, q3) = (rat(1, 4), rat(1, 2), rat(1, 4));
        let cfg = TreeChainConfig::new(example_company(), TreeModel::Vp { q1: q1.clone(), q2: q2.clone(), q3: q3.clone() }).unwrap();
        let h = Hopf::new(ConnesKreimer);
        let k = tree_chain_matrix(&cfg, &h, 1000).unwrap();
        let x0 = example_company();
        for j in 0..=2 {
            let f = vp_observable(&q1, &q3, 4, j).unwrap();
            let factor = vp_bound_factor(&x0, j);
            for t in 0..=4 {
                let e = k.expectation(|x| f.eval(x), &x0, t).unwrap();
                assert!(e <= pow(&q2, (4 - j) * t) * f.eval(&x0) * &factor, "j={j} t={t}");
            }
        }
    }

    #[test]
    fn one_vertex_start() {
        let cfg = TreeChainConfig::new(Forest::singletons(1), TreeModel::Single).unwrap();
        let h = Hopf::new(ConnesKreimer);
        let k = tree_chain_matrix(&cfg, &h, 100).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k.entry(&Forest::singletons(1), &Forest::singletons(1)), int(1));
    }
}
