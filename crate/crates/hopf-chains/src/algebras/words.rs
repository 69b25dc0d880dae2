//! Words and permutations, shared by the shuffle, free associative and FQSym algebras.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hopf::StateCodec;

/// A word in positive integer letters; `⟦w₁…w_n⟧` with `w₁` on top of the deck.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u32>);

/// A permutation in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Permutation(Vec<u32>);

macro_rules! graded_order {
    ($t:ty) => {
        impl Ord for $t {
            fn cmp(&self, other: &Self) -> Ordering {
                self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
            }
        }
        impl PartialOrd for $t {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
    };
}
graded_order!(Word);
graded_order!(Permutation);

fn letters_json(v: &[u32]) -> Value {
    Value::Array(v.iter().map(|&l| Value::from(l)).collect())
}

fn letters_from_json(v: &Value) -> Result<Vec<u32>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected an array, got {v}")))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .filter(|&l| l >= 1 && l <= u32::MAX as u64)
                .map(|l| l as u32)
                .ok_or_else(|| Error::Parse(format!("expected a positive integer letter, got {x}")))
        })
        .collect()
}

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟦{}⟧", self.0.iter().join(" "))
    }
}

impl StateCodec for Word {
    fn to_json(&self) -> Value {
        letters_json(&self.0)
    }

    fn from_json(v: &Value) -> Result<Self> {
        Ok(Word(letters_from_json(v)?))
    }
}

impl Permutation {
    pub fn new(one_line: Vec<u32>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n];
        for &l in &one_line {
            let i = l as usize;
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::Parse(format!("{one_line:?} is not a permutation")));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    /// Parses compact one-line notation such as `"24153"` (single digits only).
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad letter {c:?}"))))
            .collect::<Result<Vec<u32>>>()?;
        Self::new(letters)
    }

    pub fn one_line(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_raw(v: Vec<u32>) -> Self {
        Permutation(v)
    }

    /// Position (0-based) of each value: `inv[v-1] = i` where `σ_i = v`.
    pub fn inverse_positions(&self) -> Vec<usize> {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i;
        }
        inv
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&l| l < 10) {
            write!(f, "({})", self.0.iter().join(""))
        } else {
            write!(f, "({})", self.0.iter().join(" "))
        }
    }
}

impl StateCodec for Permutation {
    fn to_json(&self) -> Value {
        letters_json(&self.0)
    }

    fn from_json(v: &Value) -> Result<Self> {
        Permutation::new(letters_from_json(v)?)
    }
}

/// The permutation order-isomorphic to a sequence of distinct integers.
pub fn standardise(s: &[u32]) -> Result<Permutation> {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by_key(|&i| s[i]);
    if idx.windows(2).any(|w| s[w[0]] == s[w[1]]) {
        return Err(Error::Precondition(format!("standardise: repeated letters in {s:?}")));
    }
    let mut out = vec![0u32; s.len()];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = rank as u32 + 1;
    }
    Ok(Permutation(out))
}

pub(crate) fn std_unchecked(s: &[u32]) -> Permutation {
    standardise(s).expect("letters are distinct")
}

/// All ways of interleaving `a` and `b`, one output per choice of positions for `a`.
pub(crate) fn interleavings(a: &[u32], b: &[u32]) -> Vec<Vec<u32>> {
    let n = a.len() + b.len();
    (0..n)
        .combinations(a.len())
        .map(|pos| {
            let mut out = Vec::with_capacity(n);
            let (mut i, mut j) = (0, 0);
            for k in 0..n {
                if i < pos.len() && pos[i] == k {
                    out.push(a[i]);
                    i += 1;
                } else {
                    out.push(b[j]);
                    j += 1;
                }
            }
            out
        })
        .collect()
}

/// Distinct rearrangements of a multiset, in lexicographic order.
pub fn multiset_permutations(letters: &[u32]) -> Vec<Vec<u32>> {
    let mut cur: Vec<u32> = letters.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `S_n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Permutation> {
    multiset_permutations(&(1..=n as u32).collect::<Vec<_>>())
        .into_iter()
        .map(Permutation)
        .collect()
}

/// All words of length `n` over `{1..alphabet}`, lexicographic.
pub fn all_words(alphabet: u32, n: usize) -> Vec<Word> {
    if n == 0 {
        return vec![Word::default()];
    }
    (0..n)
        .map(|_| 1..=alphabet)
        .multi_cartesian_product()
        .map(Word)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardisation() {
        assert_eq!(standardise(&[4, 1, 3]).unwrap().one_line(), &[3, 1, 2]);
        assert_eq!(standardise(&[1, 3, 2]).unwrap().one_line(), &[1, 3, 2]);
        assert_eq!(standardise(&[9, 7]).unwrap().one_line(), &[2, 1]);
        assert!(standardise(&[2, 2]).is_err());
    }

    #[test]
    fn enumerations() {
        let s3 = permutations(3);
        assert_eq!(s3.len(), 6);
        assert_eq!(s3[0].one_line(), &[1, 2, 3]);
        assert_eq!(s3[5].one_line(), &[3, 2, 1]);
        assert_eq!(multiset_permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(all_words(2, 3).len(), 8);
        assert_eq!(all_words(2, 0), vec![Word::default()]);
        assert_eq!(interleavings(&[1, 5], &[5, 2]).len(), 6);
    }

    #[test]
    fn graded_ordering() {
        assert!(Word(vec![9]) < Word(vec![1, 1]));
        assert!(Word(vec![1, 2]) < Word(vec![2, 1]));
        assert!(Permutation::new(vec![2, 2]).is_err());
        assert_eq!(Permutation::parse("312").unwrap().to_string(), "(312)");
    }
}
