use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;

use super::words::{interleavings, permutations, std_unchecked, Permutation};
use crate::element::Element;
use crate::hopf::HopfAlgebra;
use crate::rational::{factorial, Rational};

/// Free quasisymmetric functions in the fundamental basis: shifted shuffle
/// product, deconcatenate-and-standardise coproduct.
#[derive(Clone, Debug, Default)]
pub struct Fqsym;

/// The graded dual of [`Fqsym`], basis `σ*` labelled by `σ`.
///
/// `σ*·τ*` sums the `ρ` whose first `|σ|` letters standardise to `σ` and last
/// letters to `τ`; `Δ(ρ*)` splits `ρ` by value and standardises each side.
#[derive(Clone, Debug, Default)]
pub struct FqsymDual;

impl HopfAlgebra for Fqsym {
    type Basis = Permutation;

    fn id(&self) -> &'static str {
        "fqsym"
    }

    fn degree(&self, x: &Permutation) -> usize {
        x.len()
    }

    fn unit(&self) -> Permutation {
        Permutation::identity(0)
    }

    fn product(&self, a: &Permutation, b: &Permutation) -> Element<Permutation> {
        let k = a.len() as u32;
        let shifted: Vec<u32> = b.one_line().iter().map(|&l| l + k).collect();
        interleavings(a.one_line(), &shifted)
            .into_iter()
            .map(|v| (Permutation::from_raw(v), Rational::one()))
            .collect()
    }

    fn coproduct_component(&self, x: &Permutation, i: usize) -> Vec<(Permutation, Permutation, Rational)> {
        let (l, r) = x.one_line().split_at(i);
        vec![(std_unchecked(l), std_unchecked(r), Rational::one())]
    }

    fn is_commutative(&self) -> bool {
        false
    }

    fn is_cocommutative(&self) -> bool {
        false
    }

    fn dimension(&self, n: usize) -> Option<BigInt> {
        Some(factorial(n))
    }

    fn basis_of_degree(&self, n: usize) -> Option<Vec<Permutation>> {
        Some(permutations(n))
    }
}

impl HopfAlgebra for FqsymDual {
    type Basis = Permutation;

    fn id(&self) -> &'static str {
        "fqsym-dual"
    }

    fn degree(&self, x: &Permutation) -> usize {
        x.len()
    }

    fn unit(&self) -> Permutation {
        Permutation::identity(0)
    }

    fn product(&self, a: &Permutation, b: &Permutation) -> Element<Permutation> {
        let k = a.len();
        let n = k + b.len();
        let mut out = Element::zero();
        for first in (1..=n as u32).combinations(k) {
            let rest: Vec<u32> = (1..=n as u32).filter(|v| !first.contains(v)).collect();
            let mut rho: Vec<u32> = a.one_line().iter().map(|&v| first[v as usize - 1]).collect();
            rho.extend(b.one_line().iter().map(|&v| rest[v as usize - 1]));
            out.add_term(Permutation::from_raw(rho), Rational::one());
        }
        out
    }

    fn coproduct_component(&self, x: &Permutation, i: usize) -> Vec<(Permutation, Permutation, Rational)> {
        let i = i as u32;
        let low: Vec<u32> = x.one_line().iter().copied().filter(|&v| v <= i).collect();
        let high: Vec<u32> = x.one_line().iter().copied().filter(|&v| v > i).collect();
        vec![(std_unchecked(&low), std_unchecked(&high), Rational::one())]
    }

    fn is_commutative(&self) -> bool {
        false
    }

    fn is_cocommutative(&self) -> bool {
        false
    }

    fn dimension(&self, n: usize) -> Option<BigInt> {
        Some(factorial(n))
    }

    fn basis_of_degree(&self, n: usize) -> Option<Vec<Permutation>> {
        Some(permutations(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::Hopf;
    use crate::rational::int;

    fn p(s: &str) -> Permutation {
        Permutation::parse(s).unwrap()
    }

    #[test]
    fn shifted_shuffle_product() {
        let prod = Fqsym.product(&p("312"), &p("21"));
        let expect: Element<Permutation> = [
            "31254", "31524", "31542", "35124", "35142", "35412", "53124", "53142", "53412", "54312",
        ]
        .iter()
        .map(|s| (p(s), int(1)))
        .collect();
        assert_eq!(prod, expect);
        assert_eq!(Fqsym.product(&p("1"), &p("1")), Element::from_terms([(p("12"), int(1)), (p("21"), int(1))]));
    }

    #[test]
    fn deconcatenate_and_standardise() {
        assert_eq!(Fqsym.coproduct_component(&p("4132"), 2), vec![(p("21"), p("21"), int(1))]);
        let h = Hopf::new(Fqsym);
        for n in 1..=5 {
            let id = Permutation::identity(n);
            let mut terms = 0;
            for i in 0..=n {
                for (l, r, c) in h.coproduct(&id, i).unwrap().iter() {
                    assert_eq!(l, &Permutation::identity(i));
                    assert_eq!(r, &Permutation::identity(n - i));
                    assert_eq!(c, &int(1));
                    terms += 1;
                }
            }
            assert_eq!(terms, n + 1);
        }
    }

    #[test]
    fn dual_pairing() {
        // coefficient of ρ in σ·τ equals coefficient of σ*⊗τ* in Δ(ρ*)
        let h = Hopf::new(Fqsym);
        let d = Hopf::new(FqsymDual);
        for s in permutations(2) {
            for t in permutations(2) {
                let prod = h.product(&s, &t);
                for rho in permutations(4) {
                    let split = d.coproduct(&rho, 2).unwrap();
                    let c = split
                        .iter()
                        .filter(|(l, r, _)| l == &s && r == &t)
                        .fold(int(0), |a, (_, _, c)| a + c);
                    assert_eq!(prod.coeff(&rho), c);
                }
            }
        }
        for rho in permutations(3) {
            let split = h.coproduct(&rho, 1).unwrap();
            for s in permutations(1) {
                for t in permutations(2) {
                    let dp = d.product(&s, &t);
                    let c = split.iter().filter(|(l, r, _)| l == &s && r == &t).count();
                    assert_eq!(dp.coeff(&rho), int(c as i64));
                }
            }
        }
    }
}
