//! Weak-compositions, distributions over them, and formal sums of complete
//! noncommutative symmetric functions `S^D` with their internal product.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{big, binomial, falling, fmt_rational, multinomial, pow, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakComposition(Vec<usize>);

impl WeakComposition {
    pub fn new(parts: Vec<usize>) -> Self {
        WeakComposition(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn normalized(&self) -> Self {
        WeakComposition(self.0.iter().copied().filter(|&d| d > 0).collect())
    }

    /// The multinomial coefficient `binom(n, D)`.
    pub fn multinomial(&self) -> Rational {
        big(multinomial(&self.0))
    }

    /// `(1^a, middle, 1^b)` where `1^0` is a single zero part.
    pub fn padded(a: usize, middle: usize, b: usize) -> Self {
        let mut parts = Vec::new();
        if a == 0 {
            parts.push(0);
        } else {
            parts.extend(std::iter::repeat(1).take(a));
        }
        parts.push(middle);
        if b == 0 {
            parts.push(0);
        } else {
            parts.extend(std::iter::repeat(1).take(b));
        }
        WeakComposition(parts)
    }

    /// `(1^a, middle)` with `1^0` a single zero part.
    pub fn top_padded(a: usize, middle: usize) -> Self {
        let mut parts = if a == 0 { vec![0] } else { vec![1; a] };
        parts.push(middle);
        WeakComposition(parts)
    }
}

impl fmt::Display for WeakComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl From<Vec<usize>> for WeakComposition {
    fn from(v: Vec<usize>) -> Self {
        WeakComposition(v)
    }
}

/// A probability distribution `P` on weak-compositions of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceDistribution {
    n: usize,
    weights: BTreeMap<WeakComposition, Rational>,
}

impl PieceDistribution {
    /// Builds from `(D, weight)` pairs. Repeated keys accumulate; zero weights are dropped.
    pub fn new(n: usize, entries: impl IntoIterator<Item = (WeakComposition, Rational)>) -> Result<Self> {
        let mut weights: BTreeMap<WeakComposition, Rational> = BTreeMap::new();
        for (d, w) in entries {
            if d.total() != n {
                return Err(Error::InvalidDistribution(format!("{d} does not sum to {n}")));
            }
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {} on {d}",
                    fmt_rational(&w)
                )));
            }
            *weights.entry(d).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        let total = weights.values().fold(Rational::zero(), |a, w| a + w);
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, not 1",
                fmt_rational(&total)
            )));
        }
        Ok(PieceDistribution { n, weights })
    }

    pub fn point(d: WeakComposition) -> Self {
        let n = d.total();
        PieceDistribution { n, weights: BTreeMap::from([(d, Rational::one())]) }
    }

    pub fn identity(n: usize) -> Self {
        Self::point(WeakComposition(vec![n]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> impl Iterator<Item = (&WeakComposition, &Rational)> {
        self.weights.iter()
    }

    pub fn weight(&self, d: &WeakComposition) -> Rational {
        self.weights.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    /// `alpha * delta_(n) + (1 - alpha) * self`.
    pub fn lazy(&self, alpha: &Rational) -> Result<Self> {
        let beta = Rational::one() - alpha;
        let mut entries: Vec<(WeakComposition, Rational)> =
            self.weights.iter().map(|(d, w)| (d.clone(), w * &beta)).collect();
        entries.push((WeakComposition(vec![self.n]), alpha.clone()));
        Self::new(self.n, entries)
    }

    /// `S^P = sum_D P(D)/binom(n,D) S^D`, zero parts dropped.
    pub fn composition_sum(&self) -> CompositionSum {
        let mut s = CompositionSum::zero(self.n);
        for (d, w) in &self.weights {
            s.add_term(d.normalized(), w / d.multinomial());
        }
        s
    }

    /// Inverse of [`composition_sum`](Self::composition_sum): `P(D) = c_D binom(n, D)`.
    pub fn from_composition_sum(s: &CompositionSum) -> Result<Self> {
        Self::new(s.n(), s.iter().map(|(d, c)| (d.clone(), c * d.multinomial())))
    }

    /// True when every composition in the support has at most one part larger than 1.
    pub fn is_top_to_random_family(&self) -> bool {
        self.weights
            .keys()
            .all(|d| d.parts().iter().filter(|&&p| p > 1).count() <= 1)
    }

    /// Some composition in the support has at least two nonzero parts.
    pub fn has_proper_split(&self) -> bool {
        self.weights.keys().any(|d| d.parts().iter().filter(|&&p| p > 0).count() >= 2)
    }
}

impl fmt::Display for PieceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .weights
            .iter()
            .map(|(d, w)| format!("{d}:{}", fmt_rational(w)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The named operators, with their parameters evaluated at exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// top-to-random
    Ter,
    /// top-r-to-random
    Trer { r: usize },
    /// binomial-top-to-random
    Binter { q2: Rational },
    /// top-or-bottom-to-random
    Tober { q: Rational },
    /// binomial-top-or-bottom-r-to-random
    Bintobrer { r: usize, q: Rational },
    /// trinomial-top-and-bottom-to-random
    Trintober { q1: Rational, q2: Rational, q3: Rational },
    /// top-and-bottom-to-random
    Taber,
    /// top-and-bottom-r-to-random
    Tabrer { r: usize },
    /// Gilbert-Shannon-Reeds two-piece riffle
    Riffle,
    Identity,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Ter => "ter",
            OperatorKind::Trer { .. } => "trer",
            OperatorKind::Binter { .. } => "binter",
            OperatorKind::Tober { .. } => "tober",
            OperatorKind::Bintobrer { .. } => "bintobrer",
            OperatorKind::Trintober { .. } => "trintober",
            OperatorKind::Taber => "taber",
            OperatorKind::Tabrer { .. } => "tabrer",
            OperatorKind::Riffle => "riffle",
            OperatorKind::Identity => "identity",
        }
    }

    pub fn distribution(&self, n: usize) -> Result<PieceDistribution> {
        let one = Rational::one();
        let check = |q: &Rational, what: &str| -> Result<()> {
            if q.is_negative() || q > &one {
                return Err(Error::InvalidDistribution(format!("{what} = {} not in [0,1]", fmt_rational(q))));
            }
            Ok(())
        };
        let need = |cond: bool, msg: String| if cond { Ok(()) } else { Err(Error::InvalidDistribution(msg)) };
        match self {
            OperatorKind::Identity => Ok(PieceDistribution::identity(n)),
            OperatorKind::Ter => {
                need(n >= 1, "ter needs n >= 1".into())?;
                Ok(PieceDistribution::point(WeakComposition(vec![1, n - 1])))
            }
            OperatorKind::Trer { r } => {
                need(*r <= n, format!("r = {r} exceeds n = {n}"))?;
                Ok(PieceDistribution::point(WeakComposition::top_padded(*r, n - r)))
            }
            OperatorKind::Binter { q2 } => {
                check(q2, "q2")?;
                let p = &one - q2;
                PieceDistribution::new(
                    n,
                    (0..=n).map(|r| {
                        let w = big(binomial(n, r)) * pow(&p, r) * pow(q2, n - r);
                        (WeakComposition::top_padded(r, n - r), w)
                    }),
                )
            }
            OperatorKind::Tober { q } => {
                check(q, "q")?;
                need(n >= 1, "tober needs n >= 1".into())?;
                PieceDistribution::new(
                    n,
                    [
                        (WeakComposition(vec![1, n - 1]), q.clone()),
                        (WeakComposition(vec![n - 1, 1]), &one - q),
                    ],
                )
            }
            OperatorKind::Bintobrer { r, q } => {
                check(q, "q")?;
                need(*r <= n, format!("r = {r} exceeds n = {n}"))?;
                PieceDistribution::new(
                    n,
                    (0..=*r).map(|r1| {
                        let r3 = r - r1;
                        let w = big(binomial(*r, r1)) * pow(q, r1) * pow(&(&one - q), r3);
                        (WeakComposition::padded(r1, n - r, r3), w)
                    }),
                )
            }
            OperatorKind::Trintober { q1, q2, q3 } => {
                for (q, s) in [(q1, "q1"), (q2, "q2"), (q3, "q3")] {
                    check(q, s)?;
                }
                need(
                    (q1 + q2 + q3).is_one(),
                    "trintober parameters must sum to 1".into(),
                )?;
                let mut entries = Vec::new();
                for r1 in 0..=n {
                    for r3 in 0..=(n - r1) {
                        let r2 = n - r1 - r3;
                        let w = big(multinomial(&[r1, r2, r3])) * pow(q1, r1) * pow(q2, r2) * pow(q3, r3);
                        entries.push((WeakComposition::padded(r1, r2, r3), w));
                    }
                }
                PieceDistribution::new(n, entries)
            }
            OperatorKind::Taber => OperatorKind::Tabrer { r: 1 }.distribution(n),
            OperatorKind::Tabrer { r } => {
                need(2 * r <= n, format!("2r = {} exceeds n = {n}", 2 * r))?;
                Ok(PieceDistribution::point(WeakComposition::padded(*r, n - 2 * r, *r)))
            }
            OperatorKind::Riffle => {
                let denom = big(num_bigint::BigInt::from(2).pow(n as u32));
                PieceDistribution::new(
                    n,
                    (0..=n).map(|k| (WeakComposition(vec![k, n - k]), big(binomial(n, k)) / &denom)),
                )
            }
        }
    }

    /// Eigenvalue `beta_j` attached to the top/bottom-to-random eigenvector families.
    pub fn t2r_eigenvalue(&self, n: usize, j: usize) -> Result<Rational> {
        let ratio = |k: usize| big(falling(j, k)) / big(falling(n, k));
        Ok(match self {
            OperatorKind::Ter | OperatorKind::Tober { .. } => Rational::new(j.into(), n.into()),
            OperatorKind::Trer { r } | OperatorKind::Bintobrer { r, .. } => ratio(*r),
            OperatorKind::Binter { q2 } | OperatorKind::Trintober { q2, .. } => pow(q2, n - j),
            OperatorKind::Taber => ratio(2),
            OperatorKind::Tabrer { r } => ratio(2 * r),
            other => {
                return Err(Error::Precondition(format!(
                    "{} is not a top/bottom-to-random operator",
                    other.name()
                )))
            }
        })
    }

    pub fn is_two_sided(&self) -> bool {
        matches!(
            self,
            OperatorKind::Tober { .. }
                | OperatorKind::Bintobrer { .. }
                | OperatorKind::Trintober { .. }
                | OperatorKind::Taber
                | OperatorKind::Tabrer { .. }
        )
    }
}

/// A formal combination `sum_D c_D S^D`; compositions are stored zero-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionSum {
    n: usize,
    terms: BTreeMap<WeakComposition, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Commutative,
    Cocommutative,
}

impl CompositionSum {
    pub fn zero(n: usize) -> Self {
        CompositionSum { n, terms: BTreeMap::new() }
    }

    /// `S^(n)`, the unit of the internal product in degree `n`.
    pub fn unit(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.add_term(WeakComposition(vec![n]), Rational::one());
        s
    }

    pub fn from_terms(n: usize, it: impl IntoIterator<Item = (WeakComposition, Rational)>) -> Result<Self> {
        let mut s = Self::zero(n);
        for (d, c) in it {
            if d.total() != n {
                return Err(Error::DegreeMismatch { expected: n, found: d.total() });
            }
            s.add_term(d, c);
        }
        Ok(s)
    }

    fn add_term(&mut self, d: WeakComposition, c: Rational) {
        let d = d.normalized();
        let e = self.terms.entry(d.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WeakComposition, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, d: &WeakComposition) -> Rational {
        self.terms.get(&d.normalized()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Every `D''(M)` for nonnegative integer matrices `M` with row sums `D` and
/// column sums `D'`, read down columns (commutative) or across rows
/// (cocommutative). Zero parts are kept.
pub fn compose_descent_terms(
    d: &WeakComposition,
    dp: &WeakComposition,
    orientation: Orientation,
) -> Result<Vec<WeakComposition>> {
    if d.total() != dp.total() {
        return Err(Error::DegreeMismatch { expected: d.total(), found: dp.total() });
    }
    let rows = d.len();
    let cols = dp.len();
    let mut out = Vec::new();
    let mut m = vec![vec![0usize; cols]; rows];
    let mut col_left: Vec<usize> = dp.parts().to_vec();
    fill_row(0, d.parts(), &mut col_left, &mut m, &mut |m| {
        let mut parts = Vec::with_capacity(rows * cols);
        match orientation {
            Orientation::Commutative => {
                for j in 0..cols {
                    for row in m.iter() {
                        parts.push(row[j]);
                    }
                }
            }
            Orientation::Cocommutative => {
                for row in m.iter() {
                    parts.extend_from_slice(row);
                }
            }
        }
        out.push(WeakComposition(parts));
    });
    Ok(out)
}

fn fill_row(
    i: usize,
    row_sums: &[usize],
    col_left: &mut [usize],
    m: &mut Vec<Vec<usize>>,
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if i == row_sums.len() {
        if col_left.iter().all(|&c| c == 0) {
            emit(m);
        }
        return;
    }
    fill_entry(i, 0, row_sums[i], row_sums, col_left, m, emit);
}

fn fill_entry(
    i: usize,
    j: usize,
    left: usize,
    row_sums: &[usize],
    col_left: &mut [usize],
    m: &mut Vec<Vec<usize>>,
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    let cols = col_left.len();
    if j + 1 == cols || cols == 0 {
        if cols == 0 {
            if left == 0 {
                fill_row(i + 1, row_sums, col_left, m, emit);
            }
            return;
        }
        if left <= col_left[j] {
            m[i][j] = left;
            col_left[j] -= left;
            fill_row(i + 1, row_sums, col_left, m, emit);
            col_left[j] += left;
            m[i][j] = 0;
        }
        return;
    }
    for v in 0..=left.min(col_left[j]) {
        m[i][j] = v;
        col_left[j] -= v;
        fill_entry(i, j + 1, left - v, row_sums, col_left, m, emit);
        col_left[j] += v;
    }
    m[i][j] = 0;
}

/// `S^D` composed with `S^D'` as descent operators: `m∆_D ∘ m∆_D' = sum_M m∆_{D''(M)}`.
pub fn compose_descent(
    d: &WeakComposition,
    dp: &WeakComposition,
    orientation: Orientation,
) -> Result<CompositionSum> {
    let terms = compose_descent_terms(d, dp, orientation)?;
    CompositionSum::from_terms(d.total(), terms.into_iter().map(|t| (t, Rational::one())))
}

/// Bilinear extension of [`compose_descent`]: the sum representing `θ(F) ∘ θ(G)`.
pub fn internal_product(f: &CompositionSum, g: &CompositionSum, orientation: Orientation) -> Result<CompositionSum> {
    if f.n() != g.n() {
        return Err(Error::DegreeMismatch { expected: f.n(), found: g.n() });
    }
    let mut out = CompositionSum::zero(f.n());
    for (d, a) in f.iter() {
        for (dp, b) in g.iter() {
            let ab = a * b;
            for t in compose_descent_terms(d, dp, orientation)? {
                out.add_term(t, ab.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn wc(v: &[usize]) -> WeakComposition {
        WeakComposition::new(v.to_vec())
    }

    #[test]
    fn two_by_two_matrices() {
        let t = compose_descent_terms(&wc(&[1, 1]), &wc(&[1, 1]), Orientation::Commutative).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.contains(&wc(&[1, 0, 0, 1])));
        assert!(t.contains(&wc(&[0, 1, 1, 0])));
        let s = compose_descent(&wc(&[1, 1]), &wc(&[1, 1]), Orientation::Commutative).unwrap();
        assert_eq!(s.coeff(&wc(&[1, 1])), int(2));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn single_row_and_single_column() {
        let s = compose_descent(&wc(&[3]), &wc(&[1, 2]), Orientation::Commutative).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(&wc(&[1, 2]), &int(1))]);
        let s = compose_descent(&wc(&[1, 1]), &wc(&[2]), Orientation::Cocommutative).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(&wc(&[1, 1]), &int(1))]);
    }

    #[test]
    fn reading_orders_differ() {
        // M = [[1,1],[0,1]] for D=(2,1), D'=(1,2)
        let col = compose_descent_terms(&wc(&[2, 1]), &wc(&[1, 2]), Orientation::Commutative).unwrap();
        let row = compose_descent_terms(&wc(&[2, 1]), &wc(&[1, 2]), Orientation::Cocommutative).unwrap();
        assert!(col.contains(&wc(&[1, 0, 1, 1])));
        assert!(row.contains(&wc(&[1, 1, 0, 1])));
        assert_eq!(col.len(), 2);
    }

    #[test]
    fn internal_products() {
        let unit = CompositionSum::unit(2);
        assert_eq!(internal_product(&unit, &unit, Orientation::Commutative).unwrap(), unit);
        let sp = PieceDistribution::point(wc(&[1, 1])).composition_sum();
        assert_eq!(sp.coeff(&wc(&[1, 1])), rat(1, 2));
        let sq = internal_product(&sp, &sp, Orientation::Commutative).unwrap();
        assert_eq!(sq, sp);
        let f = CompositionSum::from_terms(2, [(wc(&[1, 1]), int(1))]).unwrap();
        let g = CompositionSum::unit(2);
        assert_eq!(internal_product(&f, &g, Orientation::Cocommutative).unwrap(), f);
    }

    #[test]
    fn distribution_validation() {
        assert!(PieceDistribution::new(2, [(wc(&[1, 1]), rat(1, 2))]).is_err());
        assert!(PieceDistribution::new(2, [(wc(&[1, 2]), int(1))]).is_err());
        assert!(PieceDistribution::new(2, [(wc(&[1, 1]), int(2)), (wc(&[2]), int(-1))]).is_err());
        let p = OperatorKind::Binter { q2: rat(1, 2) }.distribution(2).unwrap();
        assert_eq!(p.weight(&wc(&[0, 2])), rat(1, 4));
        assert_eq!(p.weight(&wc(&[1, 1])), rat(1, 2));
        assert_eq!(p.weight(&wc(&[1, 1, 0])), rat(1, 4));
    }

    #[test]
    fn trinomial_accumulates_coinciding_keys() {
        let p = OperatorKind::Trintober { q1: rat(1, 4), q2: rat(1, 2), q3: rat(1, 4) }
            .distribution(4)
            .unwrap();
        // (1,1,2) and (2,1,1) both give the tuple (1,1,1,1)
        let w = p.weight(&wc(&[1, 1, 1, 1]));
        let each = big(multinomial(&[1, 1, 2])) * rat(1, 4) * rat(1, 2) * rat(1, 16);
        assert_eq!(w, &each + &each);
    }

    #[test]
    fn composition_sum_round_trip() {
        let p = OperatorKind::Riffle.distribution(3).unwrap();
        let s = p.composition_sum();
        assert_eq!(s.coeff(&wc(&[1, 2])), rat(1, 8));
        assert_eq!(s.coeff(&wc(&[3])), rat(1, 4));
        let back = PieceDistribution::from_composition_sum(&s).unwrap();
        assert_eq!(back.weight(&wc(&[3])), rat(1, 4));
    }

    #[test]
    fn lazy_mixture() {
        let p = OperatorKind::Ter.distribution(3).unwrap().lazy(&rat(1, 3)).unwrap();
        assert_eq!(p.weight(&wc(&[3])), rat(1, 3));
        assert_eq!(p.weight(&wc(&[1, 2])), rat(2, 3));
    }
}
