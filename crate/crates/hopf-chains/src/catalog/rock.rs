//! Rock breaking on integer partitions: each step chips pieces off the rocks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebras::{partition_states, IntPartition, SymE};
use crate::chain::{ChainSpec, TransitionMatrix};
use crate::composition::OperatorKind;
use crate::error::{Error, Result};
use crate::hopf::Hopf;
use crate::rational::{big, binomial, pow, Rational};

fn check_kind(kind: &OperatorKind) -> Result<()> {
    match kind {
        OperatorKind::Ter | OperatorKind::Riffle => Ok(()),
        other => Err(Error::Precondition(format!("rock breaking takes ter or riffle, not {}", other.name()))),
    }
}

pub fn rock_chain<'h>(hopf: &'h Hopf<SymE>, kind: &OperatorKind, n: usize, cap: usize) -> Result<ChainSpec<'h, SymE>> {
    if n == 0 {
        return Err(Error::Precondition("rock breaking needs n >= 1".into()));
    }
    check_kind(kind)?;
    Ok(ChainSpec::new(hopf, kind.distribution(n)?, partition_states(n, cap)?))
}

/// Every split of each rock `λᵢ` into `(cᵢ, λᵢ − cᵢ)`, with weight `∏ binom(λᵢ, cᵢ)`.
fn splits(parts: &[u32]) -> Vec<(Vec<u32>, BigInt)> {
    let mut out = vec![(Vec::new(), BigInt::one())];
    for &p in parts {
        let mut next = Vec::new();
        for (pieces, w) in &out {
            for c in 0..=p {
                let mut v = pieces.clone();
                v.extend([c, p - c].into_iter().filter(|&x| x > 0));
                next.push((v, w * binomial(p as usize, c as usize)));
            }
        }
        out = next;
    }
    out
}

/// The rock chain from its physical description.
///
/// `ter`: a rock is chosen with probability proportional to its size and a piece of size 1 is
/// chipped off it. `riffle`: every unit of mass independently goes left or right, so each rock
/// splits binomially.
pub fn direct_rock_matrix(kind: &OperatorKind, n: usize, cap: usize) -> Result<TransitionMatrix<IntPartition>> {
    check_kind(kind)?;
    let states = partition_states(n, cap)?;
    let index: BTreeMap<&IntPartition, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut rows = Vec::with_capacity(states.len());
    for s in &states {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut add = |parts: Vec<u32>, w: Rational| -> Result<()> {
            let y = IntPartition::new(parts)?;
            *row.entry(index[&y]).or_insert_with(Rational::zero) += w;
            Ok(())
        };
        match kind {
            OperatorKind::Ter => {
                for (i, &p) in s.parts().iter().enumerate() {
                    let mut parts = s.parts().to_vec();
                    if p > 1 {
                        parts[i] = p - 1;
                        parts.push(1);
                    }
                    add(parts, Rational::new(p.into(), n.into()))?;
                }
            }
            _ => {
                let denom = big(BigInt::from(2).pow(n as u32));
                for (parts, w) in splits(s.parts()) {
                    add(parts, big(w) / &denom)?;
                }
            }
        }
        rows.push(row);
    }
    TransitionMatrix::new(states, rows)
}

/// Generic matrix, checked against [`direct_rock_matrix`].
pub fn rock_matrix(hopf: &Hopf<SymE>, kind: &OperatorKind, n: usize, cap: usize) -> Result<TransitionMatrix<IntPartition>> {
    let k = rock_chain(hopf, kind, n, cap)?.build_transition_matrix()?;
    if k != direct_rock_matrix(kind, n, cap)? {
        return Err(Error::Precondition("Hopf chain and direct rock chain disagree".into()));
    }
    Ok(k)
}

/// `P(largest rock ≥ n′ after t steps)` and the bound `((n−n′)/n)ᵗ Σ binom(λᵢ, n′)` under `ter`.
pub fn large_rock_survival(k: &TransitionMatrix<IntPartition>, start: &IntPartition, n_prime: usize, t: usize) -> Result<(Rational, Rational)> {
    let n = start.size();
    if n_prime == 0 || n_prime > n {
        return Err(Error::Precondition(format!("n′ = {n_prime} must lie in [1, {n}]")));
    }
    let prob = k
        .distribution_at_time(start, t)?
        .into_iter()
        .filter(|(y, _)| y.parts().iter().any(|&p| p as usize >= n_prime))
        .fold(Rational::zero(), |acc, (_, p)| acc + p);
    let count: BigInt = start.parts().iter().map(|&p| binomial(p as usize, n_prime)).sum();
    let bound = pow(&Rational::new((n - n_prime).into(), n.into()), t) * big(count);
    Ok((prob, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn part(v: &[u32]) -> IntPartition {
        IntPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn generic_and_direct_agree() {
        let h = Hopf::new(SymE);
        for n in 1..=6 {
            for kind in [OperatorKind::Ter, OperatorKind::Riffle] {
                rock_matrix(&h, &kind, n, 100).unwrap();
            }
        }
    }

    #[test]
    fn chipping_examples() {
        let h = Hopf::new(SymE);
        let k2 = rock_matrix(&h, &OperatorKind::Ter, 2, 100).unwrap();
        assert_eq!(k2.entry(&part(&[2]), &part(&[1, 1])), Rational::one());
        let k4 = rock_matrix(&h, &OperatorKind::Ter, 4, 100).unwrap();
        assert_eq!(k4.entry(&part(&[3, 1]), &part(&[2, 1, 1])), rat(3, 4));
        assert_eq!(k4.entry(&part(&[3, 1]), &part(&[3, 1])), rat(1, 4));
    }

    #[test]
    fn large_rock_bound() {
        let h = Hopf::new(SymE);
        let k = rock_matrix(&h, &OperatorKind::Ter, 4, 100).unwrap();
        for t in 0..=10 {
            let (p, b) = large_rock_survival(&k, &part(&[4]), 3, t).unwrap();
            assert!(p <= b, "t={t}");
        }
    }
}
