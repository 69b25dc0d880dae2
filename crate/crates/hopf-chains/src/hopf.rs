//! The graded connected Hopf algebra interface and the memoising engine that
//! turns single-split coproducts into refined coproducts and descent operators.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::composition::{CompositionSum, PieceDistribution, WeakComposition};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// JSON form of a basis element.
pub trait StateCodec: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn render(&self) -> String {
        self.to_json().to_string()
    }
}

pub trait HopfAlgebra: Send + Sync {
    /// `Ord` must order by degree first.
    type Basis: Clone + Ord + Hash + Debug + Send + Sync + StateCodec;

    fn id(&self) -> &'static str;
    fn degree(&self, x: &Self::Basis) -> usize;
    fn unit(&self) -> Self::Basis;
    fn product(&self, a: &Self::Basis, b: &Self::Basis) -> Element<Self::Basis>;
    /// Degree-`(i, deg x - i)` part of `Δ(x)`. Only called with `0 < i < deg x`.
    fn coproduct_component(&self, x: &Self::Basis, i: usize) -> Vec<(Self::Basis, Self::Basis, Rational)>;
    fn is_commutative(&self) -> bool;
    fn is_cocommutative(&self) -> bool;

    fn dimension(&self, _n: usize) -> Option<BigInt> {
        None
    }

    /// The whole homogeneous basis in degree `n`, where finite and configured.
    fn basis_of_degree(&self, _n: usize) -> Option<Vec<Self::Basis>> {
        None
    }

    /// For free-commutative algebras with the monomial basis: whether `x` is a
    /// product of degree-1 generators. `None` otherwise.
    fn degree_one_monomial(&self, _x: &Self::Basis) -> Option<bool> {
        None
    }
}

type Split<B> = Arc<Vec<(B, B, Rational)>>;
type Tensor<B> = Arc<Vec<(Vec<B>, Rational)>>;

/// Wraps an algebra with write-once caches; safe to share across threads.
pub struct Hopf<A: HopfAlgebra> {
    alg: A,
    splits: RwLock<HashMap<(A::Basis, usize), Split<A::Basis>>>,
    refined: RwLock<HashMap<(A::Basis, WeakComposition), Tensor<A::Basis>>>,
    products: RwLock<HashMap<(A::Basis, A::Basis), Arc<Element<A::Basis>>>>,
    etas: RwLock<HashMap<A::Basis, Rational>>,
}

fn cached<K: Hash + Eq, V: Clone>(map: &RwLock<HashMap<K, V>>, key: K, make: impl FnOnce() -> V) -> V {
    if let Some(v) = map.read().expect("cache poisoned").get(&key) {
        return v.clone();
    }
    let v = make();
    map.write().expect("cache poisoned").entry(key).or_insert(v).clone()
}

impl<A: HopfAlgebra> Hopf<A> {
    pub fn new(alg: A) -> Self {
        Hopf {
            alg,
            splits: RwLock::default(),
            refined: RwLock::default(),
            products: RwLock::default(),
            etas: RwLock::default(),
        }
    }

    pub fn algebra(&self) -> &A {
        &self.alg
    }

    pub fn degree(&self, x: &A::Basis) -> usize {
        self.alg.degree(x)
    }

    /// Degree-`(i, n-i)` component of `Δ(x)`, counit cases included.
    pub fn coproduct(&self, x: &A::Basis, i: usize) -> Result<Split<A::Basis>> {
        let n = self.alg.degree(x);
        if i > n {
            return Err(Error::SplitOutOfRange { split: i, degree: n });
        }
        if i == 0 {
            return Ok(Arc::new(vec![(self.alg.unit(), x.clone(), Rational::one())]));
        }
        if i == n {
            return Ok(Arc::new(vec![(x.clone(), self.alg.unit(), Rational::one())]));
        }
        Ok(cached(&self.splits, (x.clone(), i), || {
            Arc::new(self.alg.coproduct_component(x, i))
        }))
    }

    /// `Δ_D(x)` as a list of tensor tuples; zero parts give the unit in their slot.
    pub fn refined_coproduct(&self, x: &A::Basis, d: &WeakComposition) -> Result<Tensor<A::Basis>> {
        let n = self.alg.degree(x);
        if d.total() != n {
            return Err(Error::DegreeMismatch { expected: d.total(), found: n });
        }
        if d.is_empty() {
            return Ok(Arc::new(vec![(Vec::new(), Rational::one())]));
        }
        if d.len() == 1 {
            return Ok(Arc::new(vec![(vec![x.clone()], Rational::one())]));
        }
        let key = (x.clone(), d.clone());
        if let Some(v) = self.refined.read().expect("cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let tail = WeakComposition::new(d.parts()[1..].to_vec());
        let mut acc: BTreeMap<Vec<A::Basis>, Rational> = BTreeMap::new();
        for (a, b, c) in self.coproduct(x, d.parts()[0])?.iter() {
            for (rest, c2) in self.refined_coproduct(b, &tail)?.iter() {
                let mut t = Vec::with_capacity(d.len());
                t.push(a.clone());
                t.extend(rest.iter().cloned());
                *acc.entry(t).or_insert_with(Rational::zero) += c * c2;
            }
        }
        let v: Tensor<A::Basis> = Arc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        Ok(self.refined.write().expect("cache poisoned").entry(key).or_insert(v).clone())
    }

    pub fn product(&self, a: &A::Basis, b: &A::Basis) -> Arc<Element<A::Basis>> {
        cached(&self.products, (a.clone(), b.clone()), || Arc::new(self.alg.product(a, b)))
    }

    pub fn multiply(&self, a: &Element<A::Basis>, b: &Element<A::Basis>) -> Element<A::Basis> {
        let mut out = Element::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                out.add_scaled(&self.product(x, y), &(cx * cy));
            }
        }
        out
    }

    /// `z_1 z_2 ... z_k`, the unit for an empty sequence.
    pub fn multiply_sequence(&self, zs: &[A::Basis]) -> Element<A::Basis> {
        let mut it = zs.iter();
        let Some(first) = it.next() else {
            return Element::basis(self.alg.unit());
        };
        let mut acc = Element::basis(first.clone());
        for z in it {
            let mut next = Element::zero();
            for (x, c) in acc.iter() {
                next.add_scaled(&self.product(x, z), c);
            }
            acc = next;
        }
        acc
    }

    /// `m∆_D(x)`; zero parts are dropped first.
    pub fn descent_operator_d(&self, x: &A::Basis, d: &WeakComposition) -> Result<Element<A::Basis>> {
        let d = d.normalized();
        let mut out = Element::zero();
        for (zs, c) in self.refined_coproduct(x, &d)?.iter() {
            out.add_scaled(&self.multiply_sequence(zs), c);
        }
        Ok(out)
    }

    /// `m∆_P(x) = sum_D P(D)/binom(n,D) m∆_D(x)`.
    pub fn descent_operator_p(&self, x: &A::Basis, p: &PieceDistribution) -> Result<Element<A::Basis>> {
        self.descent_operator_sum(x, &p.composition_sum())
    }

    /// The operator `θ(F)` applied to `x`.
    pub fn descent_operator_sum(&self, x: &A::Basis, f: &CompositionSum) -> Result<Element<A::Basis>> {
        let n = self.alg.degree(x);
        if f.n() != n {
            return Err(Error::DegreeMismatch { expected: f.n(), found: n });
        }
        let mut out = Element::zero();
        for (d, c) in f.iter() {
            out.add_scaled(&self.descent_operator_d(x, d)?, c);
        }
        Ok(out)
    }

    pub fn apply_sum(&self, v: &Element<A::Basis>, f: &CompositionSum) -> Result<Element<A::Basis>> {
        let mut out = Element::zero();
        for (x, c) in v.iter() {
            out.add_scaled(&self.descent_operator_sum(x, f)?, c);
        }
        Ok(out)
    }

    pub fn apply_p(&self, v: &Element<A::Basis>, p: &PieceDistribution) -> Result<Element<A::Basis>> {
        self.apply_sum(v, &p.composition_sum())
    }

    /// Linear extension of a single split to elements: the `(i, n-i)` part of `Δ(v)`.
    pub fn coproduct_element(
        &self,
        v: &Element<A::Basis>,
        i: usize,
    ) -> Result<Element<(A::Basis, A::Basis)>> {
        let mut out = Element::zero();
        for (x, c) in v.iter() {
            for (a, b, k) in self.coproduct(x, i)?.iter() {
                out.add_term((a.clone(), b.clone()), c * k);
            }
        }
        Ok(out)
    }

    /// Number of ways to break `x` into singletons, weighted by structure constants.
    pub fn eta(&self, x: &A::Basis) -> Rational {
        let n = self.alg.degree(x);
        if n <= 1 {
            return Rational::one();
        }
        if let Some(v) = self.etas.read().expect("cache poisoned").get(x) {
            return v.clone();
        }
        let mut acc = Rational::zero();
        for (_, b, c) in self.coproduct(x, 1).expect("1 <= deg").iter() {
            acc += c * self.eta(b);
        }
        self.etas.write().expect("cache poisoned").insert(x.clone(), acc.clone());
        acc
    }

    /// Coefficient sum of `Δ_{1,...,1}(x)`, computed literally.
    pub fn eta_full_deconstruction(&self, x: &A::Basis) -> Result<Rational> {
        let n = self.alg.degree(x);
        let ones = WeakComposition::new(vec![1; n]);
        Ok(self
            .refined_coproduct(x, &ones)?
            .iter()
            .fold(Rational::zero(), |acc, (_, c)| acc + c))
    }
}
