//! Doob-transformed descent-operator chains: validation, exact transition
//! matrices, sampling, matrix powers, lumping and absorption.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, Zero};
use rand::RngCore;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::composition::{internal_product, CompositionSum, Orientation, PieceDistribution, WeakComposition};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::{Hopf, HopfAlgebra, StateCodec};
use crate::linalg::Matrix;
use crate::rational::{big, factorial, fmt_rational, parse_rational, to_f64, Rational};

/// Row-stochastic exact matrix; rows index the source state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix<B: Ord + Hash + Clone> {
    states: Vec<B>,
    index: HashMap<B, usize>,
    rows: Vec<BTreeMap<usize, Rational>>,
}

/// States whose transitions out of a fibre disagree, found while lumping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LumpViolation<B, C> {
    pub first: B,
    pub second: B,
    pub target: C,
    pub first_mass: Rational,
    pub second_mass: Rational,
}

impl<B: Ord + Hash + Clone> TransitionMatrix<B> {
    /// Checks nonnegativity and exact row sums.
    pub fn new(states: Vec<B>, rows: Vec<BTreeMap<usize, Rational>>) -> Result<Self> {
        let m = Self::unchecked(states, rows)?;
        for (i, row) in m.rows.iter().enumerate() {
            let mut total = Rational::zero();
            for (&j, v) in row {
                if v.is_negative() {
                    return Err(Error::NegativeEntry {
                        from: i.to_string(),
                        to: j.to_string(),
                        value: fmt_rational(v),
                    });
                }
                total += v;
            }
            if !total.is_one() {
                return Err(Error::Precondition(format!(
                    "row {i} sums to {}, not 1",
                    fmt_rational(&total)
                )));
            }
        }
        Ok(m)
    }

    fn unchecked(states: Vec<B>, mut rows: Vec<BTreeMap<usize, Rational>>) -> Result<Self> {
        if rows.len() != states.len() {
            return Err(Error::Precondition("row count differs from state count".into()));
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Precondition(format!("duplicate state at index {i}")));
            }
        }
        for row in &mut rows {
            row.retain(|_, v| !v.is_zero());
            if row.keys().any(|&j| j >= states.len()) {
                return Err(Error::Precondition("column index outside the state list".into()));
            }
        }
        Ok(TransitionMatrix { states, index, rows })
    }

    pub fn identity(states: Vec<B>) -> Result<Self> {
        let rows = (0..states.len()).map(|i| BTreeMap::from([(i, Rational::one())])).collect();
        Self::new(states, rows)
    }

    pub fn states(&self) -> &[B] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, x: &B) -> Option<usize> {
        self.index.get(x).copied()
    }

    fn require(&self, x: &B) -> Result<usize> {
        self.index_of(x)
            .ok_or_else(|| Error::Precondition("state is not in the state list".into()))
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Rational> {
        &self.rows[i]
    }

    pub fn entry(&self, x: &B, y: &B) -> Rational {
        match (self.index_of(x), self.index_of(y)) {
            (Some(i), Some(j)) => self.rows[i].get(&j).cloned().unwrap_or_else(Rational::zero),
            _ => Rational::zero(),
        }
    }

    /// The same chain with states listed in `order`, which must be a permutation of the states.
    pub fn reindexed(&self, order: &[B]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::Precondition("reordering must list every state once".into()));
        }
        let old: Vec<usize> = order.iter().map(|x| self.require(x)).collect::<Result<_>>()?;
        let mut new_of = vec![usize::MAX; self.len()];
        for (new, &o) in old.iter().enumerate() {
            if new_of[o] != usize::MAX {
                return Err(Error::Precondition("reordering repeats a state".into()));
            }
            new_of[o] = new;
        }
        let rows = old
            .iter()
            .map(|&o| self.rows[o].iter().map(|(&j, v)| (new_of[j], v.clone())).collect())
            .collect();
        Self::unchecked(order.to_vec(), rows)
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.len();
        let mut m = Matrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, v) in row {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// One step of `μ ↦ μ K` on a vector indexed like the states.
    pub fn step_vector(&self, mu: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len()];
        for (i, m) in mu.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for (&j, v) in &self.rows[i] {
                out[j] += m * v;
            }
        }
        out
    }

    /// Row `x₀` of `K^t`.
    pub fn distribution_at_time(&self, x0: &B, t: usize) -> Result<BTreeMap<B, Rational>> {
        let v = self.distribution_vector(x0, t)?;
        Ok(self
            .states
            .iter()
            .zip(v)
            .filter(|(_, p)| !p.is_zero())
            .map(|(s, p)| (s.clone(), p))
            .collect())
    }

    pub fn distribution_vector(&self, x0: &B, t: usize) -> Result<Vec<Rational>> {
        let i = self.require(x0)?;
        let mut mu = vec![Rational::zero(); self.len()];
        mu[i] = Rational::one();
        for _ in 0..t {
            mu = self.step_vector(&mu);
        }
        Ok(mu)
    }

    /// `E[f(X_t) | X_0 = x₀]`.
    pub fn expectation(&self, f: impl Fn(&B) -> Rational, x0: &B, t: usize) -> Result<Rational> {
        let mu = self.distribution_vector(x0, t)?;
        Ok(self
            .states
            .iter()
            .zip(mu)
            .filter(|(_, p)| !p.is_zero())
            .fold(Rational::zero(), |acc, (s, p)| acc + p * f(s)))
    }

    /// Sparse product `self · other` over the same state list.
    pub fn compose(&self, other: &TransitionMatrix<B>) -> Result<TransitionMatrix<B>> {
        if self.states != other.states {
            return Err(Error::Precondition("state lists differ".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
                for (&k, a) in row {
                    for (&j, b) in &other.rows[k] {
                        *out.entry(j).or_insert_with(Rational::zero) += a * b;
                    }
                }
                out
            })
            .collect();
        TransitionMatrix::new(self.states.clone(), rows)
    }

    pub fn power(&self, t: usize) -> Result<TransitionMatrix<B>> {
        let mut acc = TransitionMatrix::identity(self.states.clone())?;
        for _ in 0..t {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// States with `K(y,y) = 1`.
    pub fn absorbing_states(&self) -> Vec<B> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(i, row)| row.get(i).is_some_and(One::is_one))
            .map(|(i, _)| self.states[i].clone())
            .collect()
    }

    /// Total mass on absorbing states after `t` steps from `x₀`.
    pub fn absorption_probability(&self, x0: &B, t: usize) -> Result<Rational> {
        let mu = self.distribution_vector(x0, t)?;
        Ok(self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, row)| row.get(i).is_some_and(One::is_one))
            .fold(Rational::zero(), |acc, (i, _)| acc + &mu[i]))
    }

    /// Checks `π(x)K(x,y) = π(y)K(y,x)`; returns the first failing pair.
    pub fn detailed_balance_check(&self, pi: &BTreeMap<B, Rational>) -> std::result::Result<(), (B, B)> {
        let p = |x: &B| pi.get(x).cloned().unwrap_or_else(Rational::zero);
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, v) in row {
                let back = self.rows[j].get(&i).cloned().unwrap_or_else(Rational::zero);
                if p(&self.states[i]) * v != p(&self.states[j]) * back {
                    return Err((self.states[i].clone(), self.states[j].clone()));
                }
            }
        }
        Ok(())
    }

    /// Verifies the Dynkin criterion for `θ` and returns the quotient chain.
    pub fn lump<C: Ord + Hash + Clone>(
        &self,
        theta: impl Fn(&B) -> C,
    ) -> std::result::Result<TransitionMatrix<C>, LumpViolation<B, C>> {
        let images: Vec<C> = self.states.iter().map(&theta).collect();
        let targets: Vec<C> = images.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let tindex: HashMap<&C, usize> = targets.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut rows: Vec<Option<(usize, BTreeMap<usize, Rational>)>> = vec![None; targets.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let mut mass: BTreeMap<usize, Rational> = BTreeMap::new();
            for (&j, v) in row {
                *mass.entry(tindex[&images[j]]).or_insert_with(Rational::zero) += v;
            }
            mass.retain(|_, v| !v.is_zero());
            let a = tindex[&images[i]];
            match &rows[a] {
                None => rows[a] = Some((i, mass)),
                Some((first, seen)) => {
                    if seen != &mass {
                        let c = (0..targets.len())
                            .find(|k| seen.get(k) != mass.get(k))
                            .expect("rows differ somewhere");
                        return Err(LumpViolation {
                            first: self.states[*first].clone(),
                            second: self.states[i].clone(),
                            target: targets[c].clone(),
                            first_mass: seen.get(&c).cloned().unwrap_or_else(Rational::zero),
                            second_mass: mass.get(&c).cloned().unwrap_or_else(Rational::zero),
                        });
                    }
                }
            }
        }
        let rows = rows.into_iter().map(|r| r.expect("θ is onto its image").1).collect();
        Ok(TransitionMatrix::new(targets, rows).expect("quotient of a stochastic matrix is stochastic"))
    }
}

impl<B: Ord + Hash + Clone + StateCodec> TransitionMatrix<B> {
    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                entries.push(json!({
                    "from": i,
                    "to": j,
                    "num": v.numer().to_string(),
                    "den": v.denom().to_string(),
                }));
            }
        }
        json!({
            "states": self.states.iter().map(StateCodec::to_json).collect::<Vec<_>>(),
            "rows": entries,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let states = v
            .get("states")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("matrix JSON needs a states array".into()))?
            .iter()
            .map(B::from_json)
            .collect::<Result<Vec<_>>>()?;
        let mut rows = vec![BTreeMap::new(); states.len()];
        for e in v.get("rows").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing rows".into()))? {
            let idx = |k: &str| {
                e.get(k)
                    .and_then(Value::as_u64)
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::Parse(format!("entry missing {k}")))
            };
            let (i, j) = (idx("from")?, idx("to")?);
            let val = rational_from_json(e)?;
            if i >= rows.len() {
                return Err(Error::Parse(format!("row index {i} out of range")));
            }
            rows[i].insert(j, val);
        }
        TransitionMatrix::new(states, rows)
    }

    /// `from,to,value` with exact `num/den` values; states are listed in a leading comment block.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (i, st) in self.states.iter().enumerate() {
            s.push_str(&format!("# {i} {}\n", st.render()));
        }
        s.push_str("from,to,value\n");
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                s.push_str(&format!("{i},{j},{}\n", fmt_rational(v)));
            }
        }
        s
    }
}

pub(crate) fn rational_from_json(e: &Value) -> Result<Rational> {
    let part = |k: &str| {
        e.get(k)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse(format!("missing string field {k}")))
    };
    parse_rational(&format!("{}/{}", part("num")?, part("den")?))
}

/// A descent-operator chain: algebra, distribution `P` and a closed state list.
pub struct ChainSpec<'h, A: HopfAlgebra> {
    hopf: &'h Hopf<A>,
    dist: PieceDistribution,
    states: Vec<A::Basis>,
}

/// One structure-constant failure found by validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub state: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub states_checked: usize,
    pub reduced_conditions: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.violations.first() {
            None => Ok(self),
            Some(v) => Err(Error::InvalidBasis(format!("{}: {}", v.state, v.detail))),
        }
    }
}

impl<'h, A: HopfAlgebra> Clone for ChainSpec<'h, A> {
    fn clone(&self) -> Self {
        ChainSpec { hopf: self.hopf, dist: self.dist.clone(), states: self.states.clone() }
    }
}

impl<'h, A: HopfAlgebra> ChainSpec<'h, A> {
    pub fn new(hopf: &'h Hopf<A>, dist: PieceDistribution, states: Vec<A::Basis>) -> Self {
        ChainSpec { hopf, dist, states }
    }

    /// States reachable from `starts` under the support of `m∆_P`, sorted.
    pub fn closure(
        hopf: &'h Hopf<A>,
        dist: PieceDistribution,
        starts: Vec<A::Basis>,
        cap: usize,
    ) -> Result<Self> {
        let states = reachable_states(hopf, &dist, starts, cap)?;
        Ok(ChainSpec { hopf, dist, states })
    }

    pub fn hopf(&self) -> &'h Hopf<A> {
        self.hopf
    }

    pub fn distribution(&self) -> &PieceDistribution {
        &self.dist
    }

    pub fn states(&self) -> &[A::Basis] {
        &self.states
    }

    pub fn n(&self) -> usize {
        self.dist.n()
    }

    pub fn with_distribution(&self, dist: PieceDistribution) -> Self {
        ChainSpec { hopf: self.hopf, dist, states: self.states.clone() }
    }

    /// Structure-constant checks; the reduced checks apply to the top/bottom-to-random family.
    pub fn validate_state_space_basis(&self) -> ValidationReport {
        let mut report = ValidationReport { states_checked: self.states.len(), ..Default::default() };
        let h = self.hopf;
        for x in &self.states {
            if h.degree(x) != self.n() {
                report.violations.push(Violation {
                    state: x.render(),
                    detail: format!("degree {} differs from n = {}", h.degree(x), self.n()),
                });
            }
        }
        if !report.violations.is_empty() {
            return report;
        }
        let mut bad = |x: &A::Basis, detail: String| {
            report.violations.push(Violation { state: x.render(), detail });
        };
        let two_sided = self
            .dist
            .weights()
            .any(|(d, _)| d.normalized().parts().last().is_some_and(|&p| p == 1) && d.normalized().len() > 1);
        if self.dist.is_top_to_random_family() && self.dist.has_proper_split() {
            report.reduced_conditions = true;
            let mut seen: BTreeSet<A::Basis> = BTreeSet::new();
            let mut queue: VecDeque<A::Basis> = self.states.iter().cloned().collect();
            while let Some(x) = queue.pop_front() {
                let n = h.degree(&x);
                if n == 0 || !seen.insert(x.clone()) {
                    continue;
                }
                let mut splits = vec![(1, false)];
                if two_sided {
                    splits.push((n - 1, true));
                }
                for (i, right_single) in splits {
                    let comp = h.coproduct(&x, i).expect("i <= n");
                    if comp.is_empty() {
                        bad(&x, format!("Δ_({i},{}) vanishes", n - i));
                    }
                    for (a, b, c) in comp.iter() {
                        if c.is_negative() {
                            bad(&x, format!("coproduct constant {} at split {i}", fmt_rational(c)));
                        }
                        let (single, rest) = if right_single { (b, a) } else { (a, b) };
                        let prods = [h.product(single, rest), h.product(rest, single)];
                        for p in prods.iter() {
                            if let Some((_, v)) = p.iter().find(|(_, v)| v.is_negative()) {
                                bad(&x, format!("product constant {}", fmt_rational(v)));
                            }
                        }
                        queue.push_back(rest.clone());
                    }
                }
            }
            return report;
        }
        for x in &self.states {
            for (d, _) in self.dist.weights() {
                let d = d.normalized();
                let tuples = match h.refined_coproduct(x, &d) {
                    Ok(t) => t,
                    Err(e) => {
                        bad(x, e.to_string());
                        continue;
                    }
                };
                for (zs, c) in tuples.iter() {
                    if c.is_negative() {
                        bad(x, format!("coproduct constant {} in Δ_{d}", fmt_rational(c)));
                    }
                    if let Some((_, v)) = h.multiply_sequence(zs).iter().find(|(_, v)| v.is_negative()) {
                        bad(x, format!("product constant {} for pieces of Δ_{d}", fmt_rational(v)));
                    }
                }
            }
            let eta = h.eta(x);
            if !eta.is_positive() {
                bad(x, format!("η = {}", fmt_rational(&eta)));
            }
        }
        report
    }

    /// `K̂(x,y) = η(y)/η(x) · coeff_y(m∆_P(x))`.
    pub fn build_transition_matrix(&self) -> Result<TransitionMatrix<A::Basis>> {
        self.validate_state_space_basis().into_result()?;
        let rows = self.operator_rows(&self.dist.composition_sum())?;
        let m = TransitionMatrix::unchecked(self.states.clone(), rows)?;
        for (i, row) in m.rows.iter().enumerate() {
            if let Some((j, v)) = row.iter().find(|(_, v)| v.is_negative()) {
                return Err(Error::NegativeEntry {
                    from: self.states[i].render(),
                    to: self.states[*j].render(),
                    value: fmt_rational(v),
                });
            }
        }
        TransitionMatrix::new(m.states, m.rows)
    }

    /// Doob transform of an arbitrary `θ(F)`, as a dense matrix.
    pub fn operator_matrix(&self, f: &CompositionSum) -> Result<Matrix> {
        let rows = self.operator_rows(f)?;
        let n = self.states.len();
        let mut m = Matrix::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    fn operator_rows(&self, f: &CompositionSum) -> Result<Vec<BTreeMap<usize, Rational>>> {
        let index: HashMap<&A::Basis, usize> = self.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        self.states
            .par_iter()
            .map(|x| {
                let image = self.hopf.descent_operator_sum(x, f)?;
                let ex = self.hopf.eta(x);
                let mut row = BTreeMap::new();
                for (y, c) in image.iter() {
                    let Some(&j) = index.get(y) else {
                        return Err(Error::StateEscape {
                            from: x.render(),
                            to: y.render(),
                            image: element_json(self.hopf.algebra().id(), &image).to_string(),
                        });
                    };
                    row.insert(j, self.hopf.eta(y) / &ex * c);
                }
                Ok(row)
            })
            .collect()
    }

    /// The three-step description: pick `D`, break `x`, recombine.
    pub fn step_sample<R: RngCore>(&self, x: &A::Basis, rng: &mut R) -> Result<A::Basis> {
        let h = self.hopf;
        let n = h.degree(x);
        if n != self.n() {
            return Err(Error::DegreeMismatch { expected: self.n(), found: n });
        }
        let ds: Vec<(&WeakComposition, &Rational)> = self.dist.weights().collect();
        let d = ds[pick(ds.iter().map(|(_, w)| to_f64(w)), uniform(rng))].0.normalized();
        let ex = h.eta(x);
        let tuples = h.refined_coproduct(x, &d)?;
        let etas: Vec<Rational> = tuples.iter().map(|(zs, _)| zs.iter().map(|z| h.eta(z)).product()).collect();
        let k = pick(tuples.iter().zip(&etas).map(|((_, c), e)| to_f64(&(c * e / &ex))), uniform(rng));
        let (zs, _) = &tuples[k];
        let prod = h.multiply_sequence(zs);
        let denom = d.multinomial() * &etas[k];
        let ys: Vec<(&A::Basis, &Rational)> = prod.iter().collect();
        let j = pick(ys.iter().map(|(y, c)| to_f64(&(*c * h.eta(y) / &denom))), uniform(rng));
        Ok(ys[j].0.clone())
    }

    /// `n!/η(x₀) · ⟨S^P ⊙ … ⊙ S^P, χ(x₀)⟩` on a free-commutative algebra.
    pub fn absorption_via_qsym(&self, x0: &A::Basis, t: usize) -> Result<Rational> {
        let h = self.hopf;
        let alg = h.algebra();
        if !alg.is_commutative() || alg.degree_one_monomial(x0).is_none() {
            return Err(Error::Precondition(format!(
                "{} is not free-commutative on a monomial basis",
                alg.id()
            )));
        }
        let n = self.n();
        let sp = self.dist.composition_sum();
        let mut f = CompositionSum::unit(n);
        for _ in 0..t {
            f = internal_product(&f, &sp, Orientation::Commutative)?;
        }
        let mut pairing = Rational::zero();
        for (d, c) in f.iter() {
            let image = h.descent_operator_d(x0, d)?;
            let zeta = image
                .iter()
                .filter(|(y, _)| alg.degree_one_monomial(y) == Some(true))
                .fold(Rational::zero(), |acc, (_, v)| acc + v);
            pairing += c * zeta;
        }
        Ok(big(factorial(n)) / h.eta(x0) * pairing)
    }
}

/// Canonical element JSON: `{"algebra": id, "terms": [{"state", "num", "den"}]}`.
pub fn element_json<B: Ord + Clone + StateCodec>(algebra: &str, e: &Element<B>) -> Value {
    json!({
        "algebra": algebra,
        "terms": e.iter().map(|(b, c)| json!({
            "state": b.to_json(),
            "num": c.numer().to_string(),
            "den": c.denom().to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn element_from_json<B: Ord + Clone + StateCodec>(v: &Value) -> Result<(String, Element<B>)> {
    let id = v
        .get("algebra")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("element JSON needs an algebra id".into()))?;
    let mut e = Element::zero();
    for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing terms".into()))? {
        let state = B::from_json(t.get("state").ok_or_else(|| Error::Parse("term without state".into()))?)?;
        e.add_term(state, rational_from_json(t)?);
    }
    Ok((id.to_owned(), e))
}

pub fn composition_sum_json(s: &CompositionSum) -> Value {
    json!({
        "algebra": "nsym",
        "terms": s.iter().map(|(d, c)| json!({
            "state": d.parts(),
            "num": c.numer().to_string(),
            "den": c.denom().to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn composition_sum_from_json(v: &Value) -> Result<CompositionSum> {
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing terms".into()))?;
    let mut parsed = Vec::new();
    for t in terms {
        let parts = t
            .get("state")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("term without composition".into()))?
            .iter()
            .map(|x| x.as_u64().map(|p| p as usize).ok_or_else(|| Error::Parse(format!("bad part {x}"))))
            .collect::<Result<Vec<_>>>()?;
        parsed.push((WeakComposition::new(parts), rational_from_json(t)?));
    }
    let n = parsed.first().map_or(0, |(d, _)| d.total());
    CompositionSum::from_terms(n, parsed)
}

/// Breadth-first closure under the support of `m∆_P`, returned sorted.
pub fn reachable_states<A: HopfAlgebra>(
    hopf: &Hopf<A>,
    dist: &PieceDistribution,
    starts: Vec<A::Basis>,
    cap: usize,
) -> Result<Vec<A::Basis>> {
    let sp = dist.composition_sum();
    let mut seen: BTreeSet<A::Basis> = BTreeSet::new();
    let mut frontier: Vec<A::Basis> = Vec::new();
    for s in starts {
        if hopf.degree(&s) != dist.n() {
            return Err(Error::DegreeMismatch { expected: dist.n(), found: hopf.degree(&s) });
        }
        if seen.insert(s.clone()) {
            frontier.push(s);
        }
    }
    while !frontier.is_empty() {
        if seen.len() > cap {
            return Err(Error::CapExceeded { cap });
        }
        let images: Vec<Element<A::Basis>> = frontier
            .par_iter()
            .map(|x| hopf.descent_operator_sum(x, &sp))
            .collect::<Result<_>>()?;
        frontier = Vec::new();
        for img in images {
            for (y, _) in img.iter() {
                if seen.insert(y.clone()) {
                    frontier.push(y.clone());
                }
            }
        }
    }
    if seen.len() > cap {
        return Err(Error::CapExceeded { cap });
    }
    Ok(seen.into_iter().collect())
}

/// A uniform draw in `[0,1)` from the top 53 bits of one `u64`.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Index of the first cumulative weight exceeding `u`; zero-weight entries are never chosen.
pub fn pick(weights: impl Iterator<Item = f64>, u: f64) -> usize {
    let w: Vec<f64> = weights.collect();
    let total: f64 = w.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, x) in w.iter().enumerate() {
        if *x <= 0.0 {
            continue;
        }
        acc += x;
        last = i;
        if target < acc {
            return i;
        }
    }
    last
}

/// Shared row sampler backed by a built matrix: cumulative f64 rows, cached.
pub struct MatrixSampler<'m, B: Ord + Hash + Clone> {
    matrix: &'m TransitionMatrix<B>,
    cum: RwLock<HashMap<usize, Arc<Vec<(usize, f64)>>>>,
}

impl<'m, B: Ord + Hash + Clone> MatrixSampler<'m, B> {
    pub fn new(matrix: &'m TransitionMatrix<B>) -> Self {
        MatrixSampler { matrix, cum: RwLock::default() }
    }

    pub fn step<R: RngCore>(&self, x: &B, rng: &mut R) -> Result<B> {
        let i = self.matrix.require(x)?;
        let row = {
            let cached = self.cum.read().expect("cache poisoned").get(&i).cloned();
            match cached {
                Some(r) => r,
                None => {
                    let r: Arc<Vec<(usize, f64)>> =
                        Arc::new(self.matrix.rows[i].iter().map(|(&j, v)| (j, to_f64(v))).collect());
                    self.cum.write().expect("cache poisoned").insert(i, r.clone());
                    r
                }
            }
        };
        let k = pick(row.iter().map(|(_, w)| *w), uniform(rng));
        Ok(self.matrix.states[row[k].0].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::{permutation_states, Fqsym, Permutation};
    use crate::composition::OperatorKind;
    use crate::rational::{int, rat};

    #[test]
    fn identity_distribution_gives_identity_matrix() {
        let h = Hopf::new(Fqsym);
        let spec = ChainSpec::new(&h, PieceDistribution::identity(3), permutation_states(3, 10).unwrap());
        let k = spec.build_transition_matrix().unwrap();
        assert_eq!(k, TransitionMatrix::identity(k.states().to_vec()).unwrap());
    }

    #[test]
    fn top_to_random_from_identity() {
        let h = Hopf::new(Fqsym);
        let spec = ChainSpec::new(&h, OperatorKind::Ter.distribution(3).unwrap(), permutation_states(3, 10).unwrap());
        let k = spec.build_transition_matrix().unwrap();
        let d = k.distribution_at_time(&Permutation::identity(3), 1).unwrap();
        let expect: BTreeMap<Permutation, Rational> = ["123", "213", "231"]
            .iter()
            .map(|s| (Permutation::parse(s).unwrap(), rat(1, 3)))
            .collect();
        assert_eq!(d, expect);
        assert_eq!(k.distribution_at_time(&Permutation::identity(3), 0).unwrap().len(), 1);
        let uniform: BTreeMap<Permutation, Rational> = k.states().iter().map(|s| (s.clone(), rat(1, 6))).collect();
        assert!(k.detailed_balance_check(&uniform).is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let h = Hopf::new(Fqsym);
        let spec = ChainSpec::new(&h, OperatorKind::Ter.distribution(3).unwrap(), permutation_states(3, 10).unwrap());
        let k = spec.build_transition_matrix().unwrap();
        let back = TransitionMatrix::<Permutation>::from_json(&k.to_json()).unwrap();
        assert_eq!(back, k);
        assert!(k.to_csv().contains("0,0,1/3"));
    }

    #[test]
    fn escaping_state_is_named() {
        let h = Hopf::new(Fqsym);
        let states = vec![Permutation::identity(3)];
        let spec = ChainSpec::new(&h, OperatorKind::Ter.distribution(3).unwrap(), states);
        match spec.build_transition_matrix() {
            Err(Error::StateEscape { to, .. }) => assert!(to == "[2,1,3]" || to == "[2,3,1]"),
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_two_state_balance() {
        let states = vec![0u8, 1];
        let rows = vec![
            BTreeMap::from([(0, rat(1, 2)), (1, rat(1, 2))]),
            BTreeMap::from([(0, rat(1, 2)), (1, rat(1, 2))]),
        ];
        let k = TransitionMatrix::new(states, rows).unwrap();
        let pi = BTreeMap::from([(0u8, rat(1, 2)), (1, rat(1, 2))]);
        assert!(k.detailed_balance_check(&pi).is_ok());
        let id = TransitionMatrix::identity(vec![0u8, 1]).unwrap();
        let skew = BTreeMap::from([(0u8, rat(1, 3)), (1, rat(2, 3))]);
        assert!(id.detailed_balance_check(&skew).is_ok());
        assert_eq!(id.absorption_probability(&0, 0).unwrap(), int(1));
    }

    #[test]
    fn pick_skips_zero_weights() {
        assert_eq!(pick([0.0, 1.0, 0.0].into_iter(), 0.999), 1);
        assert_eq!(pick([0.5, 0.5].into_iter(), 0.25), 0);
        assert_eq!(pick([0.5, 0.5].into_iter(), 0.75), 1);
    }
}
