//! Card shuffling: cut the deck by `P`, then riffle the packets together uniformly.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebras::{deck_word_states, IntPartition, Permutation, ShuffleAlgebra, Word};
use crate::chain::{ChainSpec, TransitionMatrix};
use crate::composition::PieceDistribution;
use crate::error::{Error, Result};
use crate::hopf::Hopf;
use crate::rational::{big, Rational};
use crate::spectral::{beta_lambda_p, SpectrumEntry, SpectrumReport};

/// The generic chain on rearrangements of `deck`.
pub fn shuffle_chain<'h>(hopf: &'h Hopf<ShuffleAlgebra>, dist: PieceDistribution, deck: &[u32], cap: usize) -> Result<ChainSpec<'h, ShuffleAlgebra>> {
    if deck.is_empty() {
        return Err(Error::Precondition("the deck must be nonempty".into()));
    }
    if dist.n() != deck.len() {
        return Err(Error::DegreeMismatch { expected: deck.len(), found: dist.n() });
    }
    Ok(ChainSpec::new(hopf, dist, deck_word_states(deck, cap)?))
}

/// Every interleaving of the packets, with repetition: one entry per choice of source packet per position.
fn riffles(packets: &[&[u32]]) -> Vec<Vec<u32>> {
    let n: usize = packets.iter().map(|p| p.len()).sum();
    let mut out = Vec::new();
    let mut owner = Vec::with_capacity(n);
    fn go(packets: &[&[u32]], used: &mut Vec<usize>, owner: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<u32>>) {
        if owner.len() == n {
            let mut pos = vec![0; packets.len()];
            out.push(owner.iter().map(|&k| {
                pos[k] += 1;
                packets[k][pos[k] - 1]
            }).collect());
            return;
        }
        for k in 0..packets.len() {
            if used[k] < packets[k].len() {
                used[k] += 1;
                owner.push(k);
                go(packets, used, owner, n, out);
                owner.pop();
                used[k] -= 1;
            }
        }
    }
    go(packets, &mut vec![0; packets.len()], &mut owner, n, &mut out);
    out
}

/// The shuffle built directly: cut with law `P`, then a uniform interleaving of the packets.
pub fn direct_shuffle_matrix(dist: &PieceDistribution, deck: &[u32], cap: usize) -> Result<TransitionMatrix<Word>> {
    let states = deck_word_states(deck, cap)?;
    let index: HashMap<&[u32], usize> = states.iter().enumerate().map(|(i, s)| (s.letters(), i)).collect();
    let mut rows = Vec::with_capacity(states.len());
    for s in &states {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for (d, w) in dist.weights() {
            let mut packets = Vec::new();
            let mut at = 0;
            for &k in d.parts() {
                packets.push(&s.letters()[at..at + k]);
                at += k;
            }
            let outs = riffles(&packets);
            let each = w / big(BigInt::from(outs.len()));
            for y in outs {
                *row.entry(index[y.as_slice()]).or_insert_with(Rational::zero) += &each;
            }
        }
        rows.push(row);
    }
    TransitionMatrix::new(states, rows)
}

/// Lengths of the Lyndon factors of `w`, by Duval's algorithm.
pub fn lyndon_factor_lengths(w: &[u32]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let (mut j, mut k) = (i + 1, i);
        while j < w.len() && w[k] <= w[j] {
            k = if w[k] < w[j] { i } else { k + 1 };
            j += 1;
        }
        while i <= k {
            out.push(j - k);
            i += j - k;
        }
    }
    out
}

/// Eigenvalues of the shuffle chain on `deck`.
///
/// Words with the deck's content have the basis of products of Lyndon words, so `β_λ` has
/// multiplicity equal to the number of rearrangements whose Lyndon factors have lengths `λ`.
pub fn deck_spectrum(dist: &PieceDistribution, deck: &[u32], cap: usize) -> Result<SpectrumReport> {
    if dist.n() != deck.len() {
        return Err(Error::DegreeMismatch { expected: deck.len(), found: dist.n() });
    }
    let states = deck_word_states(deck, cap)?;
    let mut by_type: BTreeMap<IntPartition, BigInt> = BTreeMap::new();
    for w in &states {
        let lambda = IntPartition::new(lyndon_factor_lengths(w.letters()).into_iter().map(|l| l as u32).collect())?;
        *by_type.entry(lambda).or_insert_with(BigInt::zero) += 1;
    }
    let mut map: BTreeMap<Rational, SpectrumEntry> = BTreeMap::new();
    for (lambda, m) in by_type {
        let beta = beta_lambda_p(&lambda, dist)?;
        let e = map.entry(beta.clone()).or_insert_with(|| SpectrumEntry {
            value: beta,
            multiplicity: BigInt::zero(),
            partitions: Vec::new(),
            indices: Vec::new(),
        });
        e.multiplicity += m;
        e.partitions.push(lambda);
    }
    let entries: Vec<SpectrumEntry> = map.into_values().rev().filter(|e| !e.multiplicity.is_zero()).collect();
    Ok(SpectrumReport { entries, b: vec![BigInt::zero()], dimension: BigInt::from(states.len()) })
}

/// `σ ↦ ⟦σ⟧`, the permutation read as a word on the deck `1..n`.
pub fn as_word(s: &Permutation) -> Word {
    Word::new(s.one_line().to_vec())
}

/// `w ↦ σ` for a word that is a rearrangement of `1..n`.
pub fn as_permutation(w: &Word) -> Result<Permutation> {
    Permutation::new(w.letters().to_vec())
}
