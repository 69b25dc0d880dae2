//! Eigenvalues `β_λ^P` with multiplicities, eigenvector families for the
//! top/bottom-to-random operators, stationary distributions and eigenfunctions.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::Hash;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::algebras::{multiset_permutations, partitions, IntPartition};
use crate::chain::{ChainSpec, TransitionMatrix};
use crate::composition::{OperatorKind, PieceDistribution, WeakComposition};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::{Hopf, HopfAlgebra, StateCodec};
use crate::linalg::{is_nonnegative_vec, root_multiplicity, Matrix};
use crate::rational::{big, binomial, binomial_big, factorial, fmt_rational, pow, Rational};

/// Number of set compositions `B_1|…|B_l` of the parts of `λ` with block sums `d_i`.
pub fn beta_lambda_d(lambda: &IntPartition, d: &WeakComposition) -> Result<BigInt> {
    if lambda.size() != d.total() {
        return Err(Error::DegreeMismatch { expected: d.total(), found: lambda.size() });
    }
    let parts: Vec<usize> = lambda.parts().iter().map(|&p| p as usize).collect();
    let mut room = d.parts().to_vec();
    Ok(count_fillings(&parts, &mut room))
}

fn count_fillings(parts: &[usize], room: &mut [usize]) -> BigInt {
    let Some((&first, rest)) = parts.split_first() else {
        return if room.iter().all(|&r| r == 0) { BigInt::one() } else { BigInt::zero() };
    };
    let mut total = BigInt::zero();
    for b in 0..room.len() {
        if room[b] >= first {
            room[b] -= first;
            total += count_fillings(rest, room);
            room[b] += first;
        }
    }
    total
}

/// `β_λ^P = Σ_D P(D)/binom(n,D) · β_λ^D`.
pub fn beta_lambda_p(lambda: &IntPartition, p: &PieceDistribution) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (d, w) in p.weights() {
        acc += w / d.multinomial() * big(beta_lambda_d(lambda, d)?);
    }
    Ok(acc)
}

/// Solves `∏(1−x^i)^{−b_i} = Σ dims[n] xⁿ` degree by degree; `b[0]` is unused and zero.
pub fn generator_counts(dims: &[BigInt]) -> Result<Vec<BigInt>> {
    if dims.first() != Some(&BigInt::one()) {
        return Err(Error::InconsistentDimensions("dims[0] must be 1".into()));
    }
    let top = dims.len() - 1;
    let mut series = vec![BigInt::zero(); top + 1];
    series[0] = BigInt::one();
    let mut b = vec![BigInt::zero(); top + 1];
    for i in 1..=top {
        let bi = &dims[i] - &series[i];
        if bi.is_negative() {
            return Err(Error::InconsistentDimensions(format!(
                "b_{i} would be {bi}; no generating set matches these dimensions"
            )));
        }
        let factor: Vec<BigInt> = (0..=top)
            .map(|k| if k % i == 0 { binomial_big(&(&bi + k / i - 1), k / i) } else { BigInt::zero() })
            .collect();
        let mut next = vec![BigInt::zero(); top + 1];
        for (a, sa) in series.iter().enumerate() {
            if sa.is_zero() {
                continue;
            }
            for (k, f) in factor.iter().enumerate().take(top + 1 - a) {
                if !f.is_zero() {
                    next[a + k] += sa * f;
                }
            }
        }
        series = next;
        b[i] = bi;
    }
    Ok(b)
}

/// `∏_i binom(b_i + m_i − 1, m_i)` where `m_i` counts parts equal to `i`.
pub fn multiplicity(lambda: &IntPartition, b: &[BigInt]) -> BigInt {
    let mut out = BigInt::one();
    for (part, run) in &lambda.parts().iter().chunk_by(|&&p| p) {
        let m = run.count();
        let bi = b.get(part as usize).cloned().unwrap_or_default();
        if bi.is_zero() {
            return BigInt::zero();
        }
        out *= binomial_big(&(bi + m - 1), m);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub value: Rational,
    pub multiplicity: BigInt,
    pub partitions: Vec<IntPartition>,
    /// The `j` indices of the top/bottom-to-random families.
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    pub b: Vec<BigInt>,
    pub dimension: BigInt,
}

impl SpectrumReport {
    /// Entries sorted by decreasing value, zero multiplicities dropped.
    fn from_map(map: BTreeMap<Rational, SpectrumEntry>, b: Vec<BigInt>, dimension: BigInt) -> Result<Self> {
        let entries: Vec<SpectrumEntry> = map.into_values().rev().filter(|e| !e.multiplicity.is_zero()).collect();
        let total: BigInt = entries.iter().map(|e| &e.multiplicity).sum();
        if total != dimension {
            return Err(Error::InconsistentDimensions(format!(
                "multiplicities sum to {total}, dimension is {dimension}"
            )));
        }
        Ok(SpectrumReport { entries, b, dimension })
    }

    pub fn multiplicity_of(&self, value: &Rational) -> BigInt {
        self.entries.iter().find(|e| &e.value == value).map(|e| e.multiplicity.clone()).unwrap_or_default()
    }

    pub fn values(&self) -> Vec<Rational> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "eigenvalues": self.entries.iter().map(|e| {
                let mut v = json!({
                    "value": fmt_rational(&e.value),
                    "multiplicity": e.multiplicity.to_string(),
                    "partitions": e.partitions.iter().map(|l| l.parts().to_vec()).collect::<Vec<_>>(),
                });
                if !e.indices.is_empty() {
                    v["j"] = json!(e.indices);
                }
                v
            }).collect::<Vec<_>>(),
            "b": self.b.iter().skip(1).map(|x| x.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("malformed spectrum JSON".into());
        let num = |x: &Value| -> Result<BigInt> {
            x.as_str().and_then(|s| s.parse().ok()).ok_or_else(bad)
        };
        let mut b = vec![BigInt::zero()];
        for x in v.get("b").and_then(Value::as_array).ok_or_else(bad)? {
            b.push(num(x)?);
        }
        let mut entries = Vec::new();
        for e in v.get("eigenvalues").and_then(Value::as_array).ok_or_else(bad)? {
            let value = crate::rational::parse_rational(e.get("value").and_then(Value::as_str).ok_or_else(bad)?)?;
            let multiplicity = num(e.get("multiplicity").ok_or_else(bad)?)?;
            let partitions = e
                .get("partitions")
                .and_then(Value::as_array)
                .ok_or_else(bad)?
                .iter()
                .map(IntPartition::from_json)
                .collect::<Result<Vec<_>>>()?;
            let indices = match e.get("j").and_then(Value::as_array) {
                Some(js) => js.iter().map(|x| x.as_u64().map(|j| j as usize).ok_or_else(bad)).collect::<Result<_>>()?,
                None => Vec::new(),
            };
            entries.push(SpectrumEntry { value, multiplicity, partitions, indices });
        }
        let dimension = entries.iter().map(|e| &e.multiplicity).sum();
        Ok(SpectrumReport { entries, b, dimension })
    }
}

/// Eigenvalues `β_λ^P` over partitions of `n`, with multiplicities from the dimension series.
pub fn spectrum(p: &PieceDistribution, dims: &[BigInt]) -> Result<SpectrumReport> {
    let n = p.n();
    if dims.len() <= n {
        return Err(Error::InconsistentDimensions(format!("need dimensions up to degree {n}")));
    }
    let b = generator_counts(&dims[..=n])?;
    let mut map: BTreeMap<Rational, SpectrumEntry> = BTreeMap::new();
    for lambda in partitions(n) {
        let beta = beta_lambda_p(&lambda, p)?;
        let m = multiplicity(&lambda, &b);
        let e = map.entry(beta.clone()).or_insert_with(|| SpectrumEntry {
            value: beta,
            multiplicity: BigInt::zero(),
            partitions: Vec::new(),
            indices: Vec::new(),
        });
        if !m.is_zero() {
            e.multiplicity += m;
            e.partitions.push(lambda);
        }
    }
    SpectrumReport::from_map(map, b, dims[n].clone())
}

/// Spectrum of a top/bottom-to-random operator from `dim 𝓗_m` (m ≤ n) and `dim 𝓗_1`.
///
/// The multiplicity attached to `j` is the coefficient of `x^{n−j} y^j` in
/// `((1−x)/(1−y))^{dim 𝓗_1} Σ dim 𝓗_m x^m`; indices whose eigenvalues coincide
/// (all of `j < r`, say) are merged by value.
pub fn t2r_spectrum(kind: &OperatorKind, n: usize, dims: &[BigInt], dim1: usize) -> Result<SpectrumReport> {
    if dims.len() <= n {
        return Err(Error::InconsistentDimensions(format!("need dimensions up to degree {n}")));
    }
    if n >= 1 && dims[1] != BigInt::from(dim1) {
        return Err(Error::InconsistentDimensions("dims[1] disagrees with dim 𝓗_1".into()));
    }
    kind.distribution(n)?;
    let b = generator_counts(&dims[..=n])?;
    let mut map: BTreeMap<Rational, SpectrumEntry> = BTreeMap::new();
    for j in 0..=n {
        let ycoef = match (dim1, j) {
            (0, 0) => BigInt::one(),
            (0, _) => BigInt::zero(),
            _ => binomial(dim1 + j - 1, j),
        };
        let mut xcoef = BigInt::zero();
        for k in 0..=dim1.min(n - j) {
            let term = big_binomial_signed(dim1, k) * &dims[n - j - k];
            xcoef += term;
        }
        let m = ycoef * xcoef;
        if m.is_negative() {
            return Err(Error::InconsistentDimensions(format!("negative multiplicity at j = {j}")));
        }
        let beta = kind.t2r_eigenvalue(n, j)?;
        let e = map.entry(beta.clone()).or_insert_with(|| SpectrumEntry {
            value: beta,
            multiplicity: BigInt::zero(),
            partitions: Vec::new(),
            indices: Vec::new(),
        });
        if !m.is_zero() {
            e.multiplicity += m;
            e.indices.push(j);
        }
    }
    SpectrumReport::from_map(map, b, dims[n].clone())
}

fn big_binomial_signed(n: usize, k: usize) -> BigInt {
    let c = binomial(n, k);
    if k % 2 == 1 { -c } else { c }
}

/// Dimensions `dim 𝓗_0..=dim 𝓗_n` from the algebra, when it knows them.
pub fn algebra_dims<A: HopfAlgebra>(alg: &A, n: usize) -> Result<Vec<BigInt>> {
    (0..=n)
        .map(|m| {
            alg.dimension(m)
                .ok_or_else(|| Error::Precondition(format!("{} has no finite dimension in degree {m}", alg.id())))
        })
        .collect()
}

/// Algebraic and geometric multiplicity of `value` for a dense matrix.
pub fn eigen_multiplicities(m: &Matrix, charpoly: &[Rational], value: &Rational) -> (usize, usize) {
    let alg = root_multiplicity(charpoly, value);
    let geo = if alg == 0 { 0 } else { m.rows() - m.shift(value).rank() };
    (alg, geo)
}

/// Per-value check of a predicted spectrum against the exact characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumCheck {
    pub rows: Vec<(Rational, BigInt, usize, usize)>,
    pub dimension: usize,
}

impl SpectrumCheck {
    /// Every root of the characteristic polynomial is a predicted value.
    pub fn roots_covered(&self) -> bool {
        self.rows.iter().map(|r| r.2).sum::<usize>() == self.dimension
    }

    pub fn multiplicities_match(&self) -> bool {
        self.roots_covered() && self.rows.iter().all(|(_, m, a, _)| BigInt::from(*a) == *m)
    }

    pub fn diagonalisable(&self) -> bool {
        self.roots_covered() && self.rows.iter().all(|(_, _, a, g)| a == g)
    }
}

pub fn check_spectrum(m: &Matrix, predicted: &[(Rational, BigInt)]) -> SpectrumCheck {
    let cp = m.charpoly();
    let rows = predicted
        .iter()
        .map(|(v, mult)| {
            let (a, g) = eigen_multiplicities(m, &cp, v);
            (v.clone(), mult.clone(), a, g)
        })
        .collect();
    SpectrumCheck { rows, dimension: m.rows() }
}

/// Eigenvalues read off the diagonal when the chain never returns to a state it has left,
/// so that the matrix is triangular in a topological order. `None` when there is a cycle.
pub fn triangular_spectrum<B: Ord + Hash + Clone>(k: &TransitionMatrix<B>) -> Option<SpectrumReport> {
    let n = k.len();
    let mut indegree = vec![0usize; n];
    for i in 0..n {
        for &j in k.row(i).keys() {
            if j != i {
                indegree[j] += 1;
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = ready.pop() {
        seen += 1;
        for &j in k.row(i).keys() {
            if j != i {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
    }
    if seen < n {
        return None;
    }
    let mut map: BTreeMap<Rational, SpectrumEntry> = BTreeMap::new();
    for i in 0..n {
        let d = k.row(i).get(&i).cloned().unwrap_or_else(Rational::zero);
        map.entry(d.clone())
            .or_insert_with(|| SpectrumEntry { value: d, multiplicity: BigInt::zero(), partitions: Vec::new(), indices: Vec::new() })
            .multiplicity += 1;
    }
    SpectrumReport::from_map(map, vec![BigInt::zero()], BigInt::from(n)).ok()
}

/// A basis of `{p ∈ 𝓗_k : Δ_{1,k−1}(p) = 0}`, also killing `Δ_{k−1,1}` when `two_sided`.
pub fn kernel_elements<A: HopfAlgebra>(hopf: &Hopf<A>, k: usize, two_sided: bool) -> Result<Vec<Element<A::Basis>>> {
    let alg = hopf.algebra();
    let basis = alg
        .basis_of_degree(k)
        .ok_or_else(|| Error::Precondition(format!("{} cannot enumerate degree {k}", alg.id())))?;
    if k == 0 {
        return Ok(vec![Element::basis(alg.unit())]);
    }
    let mut splits = vec![1];
    if two_sided && k > 1 {
        splits.push(k - 1);
    }
    let mut rows: BTreeMap<(usize, A::Basis, A::Basis), Vec<Rational>> = BTreeMap::new();
    for (col, x) in basis.iter().enumerate() {
        for &i in &splits {
            for (a, b, c) in hopf.coproduct(x, i)?.iter() {
                rows.entry((i, a.clone(), b.clone())).or_insert_with(|| vec![Rational::zero(); basis.len()])[col] += c;
            }
        }
    }
    let m = Matrix::from_rows(rows.into_values().collect());
    let kernel = if m.rows() == 0 {
        (0..basis.len())
            .map(|i| (0..basis.len()).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    } else {
        m.kernel()
    };
    Ok(kernel
        .into_iter()
        .map(|v| Element::from_terms(basis.iter().cloned().zip(v)))
        .collect())
}

fn check_kernel<A: HopfAlgebra>(hopf: &Hopf<A>, p: &Element<A::Basis>, two_sided: bool) -> Result<()> {
    let degs: BTreeSet<usize> = p.support().map(|x| hopf.degree(x)).collect();
    if degs.len() > 1 {
        return Err(Error::KernelCondition("p is not homogeneous".into()));
    }
    let Some(&k) = degs.first() else {
        return Err(Error::KernelCondition("p is zero".into()));
    };
    if k == 0 {
        return Ok(());
    }
    let mut splits = vec![1];
    if two_sided {
        splits.push(k - 1);
    }
    for i in splits {
        let img = hopf.coproduct_element(p, i)?;
        let witness = img.iter().next().map(|((a, b), c)| {
            format!("Δ_({i},{}) leaves {} · {} ⊗ {}", k - i, fmt_rational(c), a.render(), b.render())
        });
        if let Some(w) = witness {
            return Err(Error::KernelCondition(w));
        }
    }
    Ok(())
}

/// The closed-form eigenvector built from a kernel element `p` and degree-one elements `cs`.
///
/// Returns the vector together with its eigenvalue.
pub fn t2r_eigenvector<A: HopfAlgebra>(
    hopf: &Hopf<A>,
    kind: &OperatorKind,
    n: usize,
    p: &Element<A::Basis>,
    cs: &[A::Basis],
) -> Result<(Element<A::Basis>, Rational)> {
    let j = cs.len();
    if cs.iter().any(|c| hopf.degree(c) != 1) {
        return Err(Error::Precondition("every c must have degree 1".into()));
    }
    check_kernel(hopf, p, kind.is_two_sided())?;
    if let Some(x) = p.support().find(|x| hopf.degree(x) + j != n) {
        return Err(Error::DegreeMismatch { expected: n - j.min(n), found: hopf.degree(x) });
    }
    let beta = kind.t2r_eigenvalue(n, j)?;
    let one = Rational::one();
    // weights indexed by how many c's sit left of p
    let weights: Vec<Rational> = match kind {
        OperatorKind::Ter | OperatorKind::Trer { .. } | OperatorKind::Binter { .. } => {
            let mut w = vec![Rational::zero(); j + 1];
            w[j] = one.clone();
            w
        }
        OperatorKind::Tober { q } | OperatorKind::Bintobrer { q, .. } => {
            (0..=j).map(|i| big(binomial(j, i)) * pow(q, i) * pow(&(&one - q), j - i)).collect()
        }
        OperatorKind::Trintober { q1, q3, .. } => {
            (0..=j).map(|i| big(binomial(j, i)) * pow(q1, i) * pow(q3, j - i)).collect()
        }
        OperatorKind::Taber | OperatorKind::Tabrer { .. } => {
            let r = if let OperatorKind::Tabrer { r } = kind { *r } else { 1 };
            if j < 2 * r {
                let mut w = vec![Rational::zero(); j + 1];
                w[j] = one.clone();
                w
            } else {
                (0..=j)
                    .map(|i| {
                        if i < r || i > j - r {
                            Rational::zero()
                        } else {
                            big(binomial(j - r, i) * binomial(j - r, i - r))
                        }
                    })
                    .collect()
            }
        }
        other => {
            return Err(Error::Precondition(format!("{} has no closed-form eigenvectors", other.name())));
        }
    };
    let orders: Vec<Vec<&A::Basis>> = (0..j).permutations(j).map(|s| s.into_iter().map(|k| &cs[k]).collect()).collect();
    let mut out = Element::zero();
    for (i, w) in weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        for order in &orders {
            let left: Vec<A::Basis> = order[..i].iter().map(|&c| c.clone()).collect();
            let right: Vec<A::Basis> = order[i..].iter().map(|&c| c.clone()).collect();
            let prod = hopf.multiply(&hopf.multiply(&hopf.multiply_sequence(&left), p), &hopf.multiply_sequence(&right));
            out.add_scaled(&prod, w);
        }
    }
    Ok((out, beta))
}

/// `m∆_P(v) = β v`, exactly.
pub fn is_eigenvector<A: HopfAlgebra>(
    hopf: &Hopf<A>,
    p: &PieceDistribution,
    v: &Element<A::Basis>,
    beta: &Rational,
) -> Result<bool> {
    Ok(!v.is_zero() && hopf.apply_p(v, p)? == v.scaled(beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// A function on states with an exact eigenvalue; missing states read as 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenFunction<B: Ord> {
    pub side: Side,
    pub eigenvalue: Rational,
    pub values: BTreeMap<B, Rational>,
}

impl<B: Ord + Hash + Clone> EigenFunction<B> {
    /// Builds and checks the eigen-equation against `k`.
    pub fn verified(k: &TransitionMatrix<B>, side: Side, eigenvalue: Rational, values: BTreeMap<B, Rational>) -> Result<Self> {
        let f = EigenFunction { side, eigenvalue, values: values.into_iter().filter(|(_, v)| !v.is_zero()).collect() };
        f.verify(k)?;
        Ok(f)
    }

    pub fn value(&self, x: &B) -> Rational {
        self.values.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vector(&self, k: &TransitionMatrix<B>) -> Vec<Rational> {
        k.states().iter().map(|s| self.value(s)).collect()
    }

    /// The first state whose eigen-equation fails, with its residual.
    pub fn residual(&self, k: &TransitionMatrix<B>) -> Option<(B, Rational)> {
        let v = self.vector(k);
        let image: Vec<Rational> = match self.side {
            Side::Right => (0..k.len())
                .map(|i| k.row(i).iter().fold(Rational::zero(), |acc, (&j, p)| acc + p * &v[j]))
                .collect(),
            Side::Left => k.step_vector(&v),
        };
        k.states()
            .iter()
            .zip(image)
            .zip(&v)
            .map(|((s, img), x)| (s, img - x * &self.eigenvalue))
            .find(|(_, r)| !r.is_zero())
            .map(|(s, r)| (s.clone(), r))
    }

    pub fn verify(&self, k: &TransitionMatrix<B>) -> Result<()> {
        if self.values.keys().any(|s| k.index_of(s).is_none()) {
            return Err(Error::EigenEquation("function is supported off the state list".into()));
        }
        if self.values.is_empty() {
            return Err(Error::EigenEquation("zero function".into()));
        }
        match self.residual(k) {
            None => Ok(()),
            Some((_, r)) => Err(Error::EigenEquation(format!(
                "{} eigen-equation for {} fails with residual {}",
                self.side.name(),
                fmt_rational(&self.eigenvalue),
                fmt_rational(&r)
            ))),
        }
    }

    /// `E[f(X_t) | X_0 = x₀] = βᵗ f(x₀)` for a right eigenfunction.
    pub fn predict_expectation(&self, x0: &B, t: usize) -> Result<Rational> {
        if self.side != Side::Right {
            return Err(Error::Precondition("expectations need a right eigenfunction".into()));
        }
        Ok(pow(&self.eigenvalue, t) * self.value(x0))
    }
}

impl<B: Ord + Hash + Clone + StateCodec> EigenFunction<B> {
    pub fn to_json(&self) -> Value {
        json!({
            "side": self.side.name(),
            "eigenvalue": fmt_rational(&self.eigenvalue),
            "values": self.values.iter().map(|(s, v)| json!({
                "state": s.to_json(),
                "num": v.numer().to_string(),
                "den": v.denom().to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("malformed eigenfunction JSON".into());
        let side = match v.get("side").and_then(Value::as_str) {
            Some("left") => Side::Left,
            Some("right") => Side::Right,
            _ => return Err(bad()),
        };
        let eigenvalue = crate::rational::parse_rational(v.get("eigenvalue").and_then(Value::as_str).ok_or_else(bad)?)?;
        let mut values = BTreeMap::new();
        for t in v.get("values").and_then(Value::as_array).ok_or_else(bad)? {
            values.insert(B::from_json(t.get("state").ok_or_else(bad)?)?, crate::chain::rational_from_json(t)?);
        }
        Ok(EigenFunction { side, eigenvalue, values })
    }
}

/// Turns an eigenvector of `m∆_P` (left) or of its dual (right) into a chain eigenfunction.
pub fn extract_eigenfunction<A: HopfAlgebra>(
    k: &TransitionMatrix<A::Basis>,
    hopf: &Hopf<A>,
    vector: &Element<A::Basis>,
    side: Side,
    eigenvalue: Rational,
) -> Result<EigenFunction<A::Basis>> {
    let values = vector
        .iter()
        .map(|(x, c)| {
            let e = hopf.eta(x);
            let v = match side {
                Side::Left => e * c,
                Side::Right => c / e,
            };
            (x.clone(), v)
        })
        .collect();
    EigenFunction::verified(k, side, eigenvalue, values)
}

/// Degree-one pieces appearing in full deconstructions of the states.
pub fn degree_one_pieces<A: HopfAlgebra>(hopf: &Hopf<A>, states: &[A::Basis]) -> Result<Vec<A::Basis>> {
    let mut out = BTreeSet::new();
    for x in states {
        let n = hopf.degree(x);
        for (zs, _) in hopf.refined_coproduct(x, &WeakComposition::new(vec![1; n]))?.iter() {
            out.extend(zs.iter().cloned());
        }
    }
    Ok(out.into_iter().collect())
}

/// One stationary distribution per multiset of degree-one pieces whose symmetrised
/// product is a probability vector on the state list.
pub fn stationary_distributions<A: HopfAlgebra>(
    spec: &ChainSpec<'_, A>,
    k: &TransitionMatrix<A::Basis>,
) -> Result<Vec<EigenFunction<A::Basis>>> {
    if !spec.distribution().has_proper_split() {
        return Err(Error::Precondition("P puts no mass on a composition with two nonzero parts".into()));
    }
    let hopf = spec.hopf();
    let n = spec.n();
    let singles = degree_one_pieces(hopf, spec.states())?;
    let states: BTreeSet<&A::Basis> = spec.states().iter().collect();
    let nfact2 = big(factorial(n) * factorial(n));
    let mut out = Vec::new();
    for multiset in (0..singles.len()).combinations_with_replacement(n) {
        let letters: Vec<u32> = multiset.iter().map(|&i| i as u32).collect();
        let repeats: BigInt = multiset
            .iter()
            .chunk_by(|&&i| i)
            .into_iter()
            .map(|(_, run)| factorial(run.count()))
            .product();
        let mut sym = Element::zero();
        for order in multiset_permutations(&letters) {
            let zs: Vec<A::Basis> = order.iter().map(|&i| singles[i as usize].clone()).collect();
            sym.add_scaled(&hopf.multiply_sequence(&zs), &Rational::one());
        }
        if sym.support().any(|x| !states.contains(x)) {
            continue;
        }
        let values: BTreeMap<A::Basis, Rational> = sym
            .iter()
            .map(|(x, c)| (x.clone(), hopf.eta(x) * c * big(repeats.clone()) / &nfact2))
            .collect();
        let total: Rational = values.values().sum();
        if !total.is_one() || values.values().any(Signed::is_negative) {
            continue;
        }
        out.push(EigenFunction::verified(k, Side::Left, Rational::one(), values)?);
    }
    Ok(out)
}

/// `m∆_P` on formal products `p_{σ(1)}…p_{σ(k)}` of primitives with the given degrees.
#[derive(Clone, Debug)]
pub struct SymmetrisationBlock {
    pub orderings: Vec<Vec<usize>>,
    /// Column `σ` holds the image of the product in order `σ`.
    pub matrix: Matrix,
    pub beta: Rational,
    pub kappa: Vec<Rational>,
}

pub fn symmetrisation_block(p: &PieceDistribution, degrees: &[usize]) -> Result<SymmetrisationBlock> {
    if degrees.iter().sum::<usize>() != p.n() || degrees.contains(&0) {
        return Err(Error::DegreeMismatch { expected: p.n(), found: degrees.iter().sum() });
    }
    let k = degrees.len();
    let orderings: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let index: BTreeMap<&Vec<usize>, usize> = orderings.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let mut m = Matrix::zeros(orderings.len(), orderings.len());
    for (col, order) in orderings.iter().enumerate() {
        for (d, w) in p.weights() {
            let d = d.normalized();
            let scale = w / d.multinomial();
            let mut assign = vec![0usize; k];
            let mut room = d.parts().to_vec();
            block_images(order, degrees, &mut room, &mut assign, 0, &mut |blocks| {
                let mut image = Vec::with_capacity(k);
                for b in 0..d.len() {
                    image.extend(order.iter().zip(blocks).filter(|(_, &blk)| blk == b).map(|(&o, _)| o));
                }
                let row = index[&image];
                let v = m.get(row, col) + &scale;
                m.set(row, col, v);
            });
        }
    }
    let lambda = IntPartition::new(degrees.iter().map(|&d| d as u32).collect())?;
    let beta = beta_lambda_p(&lambda, p)?;
    for col in 0..orderings.len() {
        let s: Rational = (0..orderings.len()).map(|r| m.get(r, col).clone()).sum();
        if s != beta {
            return Err(Error::EigenEquation(format!(
                "column {col} sums to {}, expected {}",
                fmt_rational(&s),
                fmt_rational(&beta)
            )));
        }
    }
    let kappa = nonnegative_eigenvector(&m, &beta)?;
    Ok(SymmetrisationBlock { orderings, matrix: m, beta, kappa })
}

fn block_images(
    order: &[usize],
    degrees: &[usize],
    room: &mut [usize],
    assign: &mut [usize],
    pos: usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    if pos == order.len() {
        if room.iter().all(|&r| r == 0) {
            emit(assign);
        }
        return;
    }
    let deg = degrees[order[pos]];
    for b in 0..room.len() {
        if room[b] >= deg {
            room[b] -= deg;
            assign[pos] = b;
            block_images(order, degrees, room, assign, pos + 1, emit);
            room[b] += deg;
        }
    }
}

/// Spectral projection of the all-ones vector onto the generalised `β`-eigenspace.
///
/// When every column sums to `β` and the matrix is nonnegative this is a
/// nonnegative `β`-eigenvector; anything else is reported.
pub fn nonnegative_eigenvector(m: &Matrix, beta: &Rational) -> Result<Vec<Rational>> {
    let n = m.rows();
    let shifted = m.shift(beta);
    let big_power = shifted.pow(n);
    let kernel = big_power.kernel();
    if kernel.is_empty() {
        return Err(Error::EigenEquation(format!("{} is not an eigenvalue", fmt_rational(beta))));
    }
    let mut cols: Vec<Vec<Rational>> = kernel.clone();
    cols.extend((0..n).map(|j| (0..n).map(|i| big_power.get(i, j).clone()).collect()));
    cols.push(vec![Rational::one(); n]);
    let system = Matrix::from_rows((0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect());
    let sol = system
        .kernel()
        .into_iter()
        .find(|v| !v.last().expect("nonempty").is_zero())
        .ok_or_else(|| Error::EigenEquation("ones vector not in span".into()))?;
    let last = -sol.last().expect("nonempty").clone();
    let mut u = vec![Rational::zero(); n];
    for (coef, basis) in sol.iter().zip(&kernel) {
        for i in 0..n {
            u[i] += coef * &basis[i] / &last;
        }
    }
    if m.mul_vec(&u) != u.iter().map(|x| x * beta).collect::<Vec<_>>() {
        return Err(Error::EigenEquation("projection is not an eigenvector".into()));
    }
    if !is_nonnegative_vec(&u) || u.iter().all(Zero::is_zero) {
        return Err(Error::EigenEquation("no nonnegative eigenvector found".into()));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn part(v: &[u32]) -> IntPartition {
        IntPartition::new(v.to_vec()).unwrap()
    }

    fn wc(v: &[usize]) -> WeakComposition {
        WeakComposition::new(v.to_vec())
    }

    fn dims(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn triangular_chains_read_the_diagonal() {
        let k = TransitionMatrix::new(
            vec![0u8, 1, 2],
            vec![
                BTreeMap::from([(0, int(1))]),
                BTreeMap::from([(0, rat(1, 2)), (1, rat(1, 2))]),
                BTreeMap::from([(1, rat(3, 4)), (2, rat(1, 4))]),
            ],
        )
        .unwrap();
        let r = triangular_spectrum(&k).unwrap();
        assert_eq!(r.values(), vec![int(1), rat(1, 2), rat(1, 4)]);
        let cycle = TransitionMatrix::new(
            vec![0u8, 1],
            vec![BTreeMap::from([(1, int(1))]), BTreeMap::from([(0, int(1))])],
        )
        .unwrap();
        assert!(triangular_spectrum(&cycle).is_none());
    }

    #[test]
    fn set_composition_counts() {
        assert_eq!(beta_lambda_d(&part(&[2, 1, 1]), &wc(&[1, 3])).unwrap(), 2.into());
        assert_eq!(beta_lambda_d(&part(&[3, 1]), &wc(&[4])).unwrap(), 1.into());
        assert_eq!(beta_lambda_d(&part(&[1, 1, 1, 1]), &wc(&[2, 2])).unwrap(), 6.into());
        assert!(beta_lambda_d(&part(&[2]), &wc(&[1, 2])).is_err());
    }

    #[test]
    fn beta_for_named_operators() {
        let ter = OperatorKind::Ter.distribution(4).unwrap();
        assert_eq!(beta_lambda_p(&part(&[2, 1, 1]), &ter).unwrap(), rat(1, 2));
        assert_eq!(beta_lambda_p(&part(&[1, 1, 1, 1]), &ter).unwrap(), int(1));
        let riffle = OperatorKind::Riffle.distribution(4).unwrap();
        for lambda in partitions(4) {
            let expect = Rational::new(BigInt::from(1) << lambda.len(), 16.into());
            assert_eq!(beta_lambda_p(&lambda, &riffle).unwrap(), expect);
        }
    }

    #[test]
    fn generator_counts_by_expansion() {
        assert_eq!(generator_counts(&dims(&[1, 1, 2, 3, 5, 7])).unwrap(), dims(&[0, 1, 1, 1, 1, 1]));
        assert_eq!(generator_counts(&dims(&[1, 1])).unwrap(), dims(&[0, 1]));
        assert_eq!(generator_counts(&dims(&[1, 1, 2, 6])).unwrap(), dims(&[0, 1, 1, 4]));
        assert!(generator_counts(&dims(&[1, 2, 1])).is_err());
    }

    #[test]
    fn multiplicities_sum_to_dimension() {
        let b = generator_counts(&dims(&[1, 1, 2, 6, 24, 120])).unwrap();
        let total: BigInt = partitions(5).iter().map(|l| multiplicity(l, &b)).sum();
        assert_eq!(total, 120.into());
        assert_eq!(multiplicity(&part(&[1, 1, 1]), &b), binomial(b[1].to_string().parse::<usize>().unwrap() + 2, 3));
        let b0 = dims(&[0, 1, 0]);
        assert_eq!(multiplicity(&part(&[2]), &b0), 0.into());
    }

    #[test]
    fn top_to_random_spectrum_of_permutations() {
        let d = dims(&[1, 1, 2, 6, 24, 120]);
        let s = t2r_spectrum(&OperatorKind::Ter, 5, &d, 1).unwrap();
        let got: Vec<(Rational, BigInt)> = s.entries.iter().map(|e| (e.value.clone(), e.multiplicity.clone())).collect();
        let want = vec![
            (int(1), 1.into()),
            (rat(3, 5), 1.into()),
            (rat(2, 5), 4.into()),
            (rat(1, 5), 18.into()),
            (int(0), 96.into()),
        ];
        assert_eq!(got, want);
        let four = t2r_spectrum(&OperatorKind::Ter, 4, &d, 1).unwrap();
        assert_eq!(four.multiplicity_of(&int(0)), 18.into());
        assert_eq!(SpectrumReport::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn symmetrisation_blocks() {
        let ter = OperatorKind::Ter.distribution(3).unwrap();
        let blk = symmetrisation_block(&ter, &[1, 2]).unwrap();
        assert_eq!(blk.beta, rat(1, 3));
        assert!(blk.kappa.iter().all(|x| !x.is_negative()));
        assert_eq!(blk.matrix.mul_vec(&blk.kappa), blk.kappa.iter().map(|x| x * &blk.beta).collect::<Vec<_>>());
        let ones = symmetrisation_block(&ter, &[1, 1, 1]).unwrap();
        assert_eq!(ones.beta, int(1));
        assert!(ones.kappa.windows(2).all(|w| w[0] == w[1]));
        let single = symmetrisation_block(&ter, &[3]).unwrap();
        assert_eq!(single.matrix.rows(), 1);
        assert_eq!(single.beta, int(0));
    }
}
