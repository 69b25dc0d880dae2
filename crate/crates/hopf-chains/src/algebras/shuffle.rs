use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;

use super::words::{all_words, interleavings, multiset_permutations, Word};
use crate::element::Element;
use crate::hopf::HopfAlgebra;
use crate::rational::Rational;

/// Words with shuffle product and deconcatenation coproduct.
#[derive(Clone, Debug, Default)]
pub struct ShuffleAlgebra {
    alphabet: Option<u32>,
}

/// Words with concatenation product and deshuffle coproduct.
#[derive(Clone, Debug, Default)]
pub struct FreeAssociative {
    alphabet: Option<u32>,
}

impl ShuffleAlgebra {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fixes the alphabet `{1..k}`, which makes each degree finite-dimensional.
    pub fn with_alphabet(k: u32) -> Self {
        ShuffleAlgebra { alphabet: Some(k) }
    }
}

impl FreeAssociative {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_alphabet(k: u32) -> Self {
        FreeAssociative { alphabet: Some(k) }
    }
}

/// Distinct rearrangements of a deck, lexicographic.
pub fn deck_states(deck: &[u32]) -> Vec<Word> {
    multiset_permutations(deck).into_iter().map(Word::new).collect()
}

impl HopfAlgebra for ShuffleAlgebra {
    type Basis = Word;

    fn id(&self) -> &'static str {
        "shuffle"
    }

    fn degree(&self, x: &Word) -> usize {
        x.len()
    }

    fn unit(&self) -> Word {
        Word::default()
    }

    fn product(&self, a: &Word, b: &Word) -> Element<Word> {
        interleavings(a.letters(), b.letters())
            .into_iter()
            .map(|w| (Word::new(w), Rational::one()))
            .collect()
    }

    fn coproduct_component(&self, x: &Word, i: usize) -> Vec<(Word, Word, Rational)> {
        let (l, r) = x.letters().split_at(i);
        vec![(Word::new(l.to_vec()), Word::new(r.to_vec()), Rational::one())]
    }

    fn is_commutative(&self) -> bool {
        true
    }

    fn is_cocommutative(&self) -> bool {
        false
    }

    fn dimension(&self, n: usize) -> Option<BigInt> {
        self.alphabet.map(|k| BigInt::from(k).pow(n as u32))
    }

    fn basis_of_degree(&self, n: usize) -> Option<Vec<Word>> {
        self.alphabet.map(|k| all_words(k, n))
    }
}

impl HopfAlgebra for FreeAssociative {
    type Basis = Word;

    fn id(&self) -> &'static str {
        "free-assoc"
    }

    fn degree(&self, x: &Word) -> usize {
        x.len()
    }

    fn unit(&self) -> Word {
        Word::default()
    }

    fn product(&self, a: &Word, b: &Word) -> Element<Word> {
        let mut w = a.letters().to_vec();
        w.extend_from_slice(b.letters());
        Element::basis(Word::new(w))
    }

    fn coproduct_component(&self, x: &Word, i: usize) -> Vec<(Word, Word, Rational)> {
        let n = x.len();
        let mut acc: BTreeMap<(Word, Word), Rational> = BTreeMap::new();
        for pos in (0..n).combinations(i) {
            let mut l = Vec::with_capacity(i);
            let mut r = Vec::with_capacity(n - i);
            let mut p = pos.iter().peekable();
            for (k, &c) in x.letters().iter().enumerate() {
                if p.peek() == Some(&&k) {
                    l.push(c);
                    p.next();
                } else {
                    r.push(c);
                }
            }
            *acc.entry((Word::new(l), Word::new(r))).or_insert_with(|| Rational::from_integer(0.into())) +=
                Rational::one();
        }
        acc.into_iter().map(|((l, r), c)| (l, r, c)).collect()
    }

    fn is_commutative(&self) -> bool {
        false
    }

    fn is_cocommutative(&self) -> bool {
        true
    }

    fn dimension(&self, n: usize) -> Option<BigInt> {
        self.alphabet.map(|k| BigInt::from(k).pow(n as u32))
    }

    fn basis_of_degree(&self, n: usize) -> Option<Vec<Word>> {
        self.alphabet.map(|k| all_words(k, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::WeakComposition;
    use crate::hopf::Hopf;
    use crate::rational::int;

    fn w(s: &[u32]) -> Word {
        Word::new(s.to_vec())
    }

    #[test]
    fn shuffle_product_with_multiplicity() {
        let sh = ShuffleAlgebra::new();
        let p = sh.product(&w(&[1, 5]), &w(&[5, 2]));
        let expect = Element::from_terms([
            (w(&[1, 5, 5, 2]), int(2)),
            (w(&[1, 5, 2, 5]), int(1)),
            (w(&[5, 1, 5, 2]), int(1)),
            (w(&[5, 1, 2, 5]), int(1)),
            (w(&[5, 2, 1, 5]), int(1)),
        ]);
        assert_eq!(p, expect);
        assert_eq!(sh.product(&w(&[1]), &w(&[1])), Element::term(w(&[1, 1]), int(2)));
        assert_eq!(sh.product(&w(&[]), &w(&[3, 4])), Element::basis(w(&[3, 4])));
    }

    #[test]
    fn refined_deconcatenation() {
        let h = Hopf::new(ShuffleAlgebra::new());
        let t = h.refined_coproduct(&w(&[1, 5, 5, 2]), &WeakComposition::new(vec![1, 1, 2])).unwrap();
        assert_eq!(t.as_slice(), &[(vec![w(&[1]), w(&[5]), w(&[5, 2])], int(1))]);
        let t = h.refined_coproduct(&w(&[1, 5, 5, 2]), &WeakComposition::new(vec![2, 0, 2])).unwrap();
        assert_eq!(t.as_slice(), &[(vec![w(&[1, 5]), w(&[]), w(&[5, 2])], int(1))]);
    }

    #[test]
    fn top_to_random_on_words() {
        let h = Hopf::new(ShuffleAlgebra::new());
        let v = h.descent_operator_d(&w(&[1, 5, 5, 2]), &WeakComposition::new(vec![1, 3])).unwrap();
        let expect: Element<Word> = [[1, 5, 5, 2], [5, 1, 5, 2], [5, 5, 1, 2], [5, 5, 2, 1]]
            .iter()
            .map(|x| (w(x), int(1)))
            .collect();
        assert_eq!(v, expect);
        let fa = Hopf::new(FreeAssociative::new());
        let v = fa.descent_operator_d(&w(&[3, 1, 6]), &WeakComposition::new(vec![1, 2])).unwrap();
        let expect: Element<Word> = [[3, 1, 6], [1, 3, 6], [6, 3, 1]].iter().map(|x| (w(x), int(1))).collect();
        assert_eq!(v, expect);
    }

    #[test]
    fn single_splits() {
        let sh = ShuffleAlgebra::new();
        assert_eq!(sh.coproduct_component(&w(&[3, 1, 6]), 1), vec![(w(&[3]), w(&[1, 6]), int(1))]);
        let mut fa = FreeAssociative::new().coproduct_component(&w(&[3, 1, 6]), 1);
        fa.sort();
        assert_eq!(
            fa,
            vec![(w(&[1]), w(&[3, 6]), int(1)), (w(&[3]), w(&[1, 6]), int(1)), (w(&[6]), w(&[3, 1]), int(1))]
        );
    }
}
