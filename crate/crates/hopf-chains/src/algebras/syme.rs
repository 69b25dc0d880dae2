use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::{HopfAlgebra, StateCodec};
use crate::rational::Rational;

/// An integer partition stored weakly decreasing; ordered by (size, parts).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPartition(Vec<u32>);

impl IntPartition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse(format!("partition {parts:?} has a zero part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntPartition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        IntPartition(parts)
    }

    /// Multiplicity of `i` among the parts.
    pub fn count(&self, i: u32) -> usize {
        self.0.iter().filter(|&&p| p == i).count()
    }
}

impl Ord for IntPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for IntPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IntPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

impl StateCodec for IntPartition {
    fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|&p| Value::from(p)).collect())
    }

    fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected an array, got {v}")))?;
        let parts = arr
            .iter()
            .map(|x| {
                x.as_u64()
                    .filter(|&p| p >= 1 && p <= u32::MAX as u64)
                    .map(|p| p as u32)
                    .ok_or_else(|| Error::Parse(format!("bad part {x}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!("partition {parts:?} is not weakly decreasing")));
        }
        Ok(IntPartition(parts))
    }
}

/// All partitions of `n`, in increasing canonical order.
pub fn partitions(n: usize) -> Vec<IntPartition> {
    fn go(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<IntPartition>) {
        if left == 0 {
            out.push(IntPartition(cur.clone()));
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            go(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n as u32, n as u32, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Symmetric functions in the elementary basis `e_λ`; `Δ(e_k) = Σ e_i ⊗ e_{k-i}`.
#[derive(Clone, Debug, Default)]
pub struct SymE;

impl HopfAlgebra for SymE {
    type Basis = IntPartition;

    fn id(&self) -> &'static str {
        "sym-e"
    }

    fn degree(&self, x: &IntPartition) -> usize {
        x.size()
    }

    fn unit(&self) -> IntPartition {
        IntPartition::default()
    }

    fn product(&self, a: &IntPartition, b: &IntPartition) -> Element<IntPartition> {
        let mut parts = a.0.clone();
        parts.extend_from_slice(&b.0);
        Element::basis(IntPartition::from_unsorted(parts))
    }

    fn coproduct_component(&self, x: &IntPartition, i: usize) -> Vec<(IntPartition, IntPartition, Rational)> {
        let mut acc: BTreeMap<(IntPartition, IntPartition), Rational> = BTreeMap::new();
        let parts = &x.0;
        let mut cut = vec![0u32; parts.len()];
        fn go(
            k: usize,
            left: u32,
            parts: &[u32],
            cut: &mut Vec<u32>,
            acc: &mut BTreeMap<(IntPartition, IntPartition), Rational>,
        ) {
            if k == parts.len() {
                if left == 0 {
                    let l = IntPartition::from_unsorted(cut.clone());
                    let r = IntPartition::from_unsorted(parts.iter().zip(cut.iter()).map(|(p, c)| p - c).collect());
                    *acc.entry((l, r)).or_insert_with(Rational::zero) += Rational::one();
                }
                return;
            }
            let rest: u32 = parts[k + 1..].iter().sum();
            for c in left.saturating_sub(rest)..=parts[k].min(left) {
                cut[k] = c;
                go(k + 1, left - c, parts, cut, acc);
            }
            cut[k] = 0;
        }
        go(0, i as u32, parts, &mut cut, &mut acc);
        acc.into_iter().map(|((l, r), c)| (l, r, c)).collect()
    }

    fn is_commutative(&self) -> bool {
        true
    }

    fn is_cocommutative(&self) -> bool {
        true
    }

    fn dimension(&self, n: usize) -> Option<BigInt> {
        Some(BigInt::from(partitions(n).len()))
    }

    fn basis_of_degree(&self, n: usize) -> Option<Vec<IntPartition>> {
        Some(partitions(n))
    }

    fn degree_one_monomial(&self, x: &IntPartition) -> Option<bool> {
        Some(x.0.iter().all(|&p| p == 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::Hopf;
    use crate::rational::{factorial, int};

    fn part(v: &[u32]) -> IntPartition {
        IntPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partitions_of_four_in_order() {
        let p = partitions(4);
        let expect: Vec<IntPartition> =
            [&[1, 1, 1, 1][..], &[2, 1, 1], &[2, 2], &[3, 1], &[4]].iter().map(|v| part(v)).collect();
        assert_eq!(p, expect);
        assert_eq!(partitions(0), vec![IntPartition::default()]);
    }

    #[test]
    fn eta_counts_chips() {
        let h = Hopf::new(SymE);
        // η(e_λ) = n!/∏λ_i!
        for lam in partitions(5) {
            let denom: BigInt = lam.parts().iter().map(|&p| factorial(p as usize)).product();
            assert_eq!(h.eta(&lam), Rational::new(factorial(5), denom));
        }
    }

    #[test]
    fn coproduct_of_e2() {
        let c = SymE.coproduct_component(&part(&[2]), 1);
        assert_eq!(c, vec![(part(&[1]), part(&[1]), int(1))]);
        let c = SymE.coproduct_component(&part(&[1, 1]), 1);
        assert_eq!(c, vec![(part(&[1]), part(&[1]), int(2))]);
        assert!(IntPartition::from_json(&serde_json::json!([1, 2])).is_err());
    }
}
