use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Rational;

/// A finitely supported vector: basis element to nonzero rational.
///
/// Terms iterate in the basis type's `Ord`, which every algebra here defines as
/// (degree, payload), so serialisations are deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element<B: Ord> {
    terms: BTreeMap<B, Rational>,
}

impl<B: Ord + Clone> Default for Element<B> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<B: Ord + Clone> Element<B> {
    pub fn zero() -> Self {
        Element { terms: BTreeMap::new() }
    }

    pub fn basis(b: B) -> Self {
        Self::term(b, Rational::from_integer(1.into()))
    }

    pub fn term(b: B, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(b, c);
        e
    }

    pub fn from_terms(it: impl IntoIterator<Item = (B, Rational)>) -> Self {
        let mut e = Self::zero();
        for (b, c) in it {
            e.add_term(b, c);
        }
        e
    }

    pub fn add_term(&mut self, b: B, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(b) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element<B>, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (b, v) in &other.terms {
            self.add_term(b.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut e = Self::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn sub(&self, other: &Element<B>) -> Self {
        let mut e = self.clone();
        e.add_scaled(other, &Rational::from_integer((-1).into()));
        e
    }

    pub fn coeff(&self, b: &B) -> Rational {
        self.terms.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&B, &Rational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &B> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn map_basis<C: Ord + Clone>(&self, f: impl Fn(&B) -> C) -> Element<C> {
        Element::from_terms(self.terms.iter().map(|(b, c)| (f(b), c.clone())))
    }
}

impl<B: Ord + Clone> FromIterator<(B, Rational)> for Element<B> {
    fn from_iter<T: IntoIterator<Item = (B, Rational)>>(iter: T) -> Self {
        Element::from_terms(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn cancellation_removes_terms() {
        let mut e = Element::from_terms([(1u8, int(2)), (2, rat(1, 2))]);
        e.add_term(1, int(-2));
        assert_eq!(e.len(), 1);
        assert_eq!(e.coeff(&1), int(0));
        assert_eq!(e.coefficient_sum(), rat(1, 2));
        assert!(e.sub(&e).is_zero());
    }
}
