//! Decorated Connes–Kreimer forests, in the quotient where every component
//! root is unlabelled.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::{HopfAlgebra, StateCodec};
use crate::rational::Rational;

/// A rooted non-planar tree; children are kept sorted by canonical encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    label: Option<String>,
    children: Vec<Tree>,
}

impl Tree {
    pub fn new(label: Option<String>, mut children: Vec<Tree>) -> Self {
        children.sort_by_cached_key(|c| c.encoding());
        Tree { label, children }
    }

    pub fn leaf(label: Option<&str>) -> Self {
        Tree { label: label.map(str::to_owned), children: Vec::new() }
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// `(` label children `)`, labels written as `len:text` so encodings are prefix-free.
    pub fn encoding(&self) -> String {
        let mut s = String::new();
        self.encode_into(&mut s);
        s
    }

    fn encode_into(&self, s: &mut String) {
        s.push('(');
        if let Some(l) = &self.label {
            s.push_str(&l.len().to_string());
            s.push(':');
            s.push_str(l);
        }
        for c in &self.children {
            c.encode_into(s);
        }
        s.push(')');
    }

    fn unlabelled_root(mut self) -> Self {
        self.label = None;
        self
    }

    /// Parses compact notation: `*` or a label, optionally followed by
    /// a parenthesised comma-separated child list, e.g. `*(A,C(D))`.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_tree(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input in tree {s:?}")));
        }
        Ok(t)
    }

    fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "children": self.children.iter().map(Tree::to_json).collect::<Vec<_>>(),
        })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse(format!("expected a tree object, got {v}")))?;
        let label = match obj.get("label") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => return Err(Error::Parse(format!("bad label {other}"))),
        };
        let children = match obj.get("children") {
            None => Vec::new(),
            Some(Value::Array(cs)) => cs.iter().map(Tree::from_json).collect::<Result<_>>()?,
            Some(other) => return Err(Error::Parse(format!("bad children {other}"))),
        };
        Ok(Tree::new(label, children))
    }
}

fn parse_tree(c: &[char], pos: &mut usize) -> Result<Tree> {
    let start = *pos;
    while *pos < c.len() && !matches!(c[*pos], '(' | ')' | ',') {
        *pos += 1;
    }
    let text: String = c[start..*pos].iter().collect();
    let label = match text.as_str() {
        "" => return Err(Error::Parse("empty vertex".into())),
        "*" | "•" => None,
        t => Some(t.to_owned()),
    };
    let mut children = Vec::new();
    if *pos < c.len() && c[*pos] == '(' {
        *pos += 1;
        loop {
            children.push(parse_tree(c, pos)?);
            match c.get(*pos) {
                Some(',') => *pos += 1,
                Some(')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(Error::Parse("unbalanced parentheses".into())),
            }
        }
    }
    Ok(Tree::new(label, children))
}

/// A multiset of trees with unlabelled roots.
#[derive(Clone, Debug)]
pub struct Forest {
    trees: Vec<Tree>,
    key: String,
    size: usize,
}

impl PartialEq for Forest {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Forest {}

impl Hash for Forest {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size.cmp(&other.size).then_with(|| self.key.cmp(&other.key))
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Forest {
    /// Canonicalises: drops component root labels and sorts components.
    pub fn new(trees: Vec<Tree>) -> Self {
        let mut keyed: Vec<(String, Tree)> = trees
            .into_iter()
            .map(|t| {
                let t = t.unlabelled_root();
                (t.encoding(), t)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let size = keyed.iter().map(|(_, t)| t.size()).sum();
        let key = keyed.iter().map(|(k, _)| k.as_str()).collect::<String>();
        Forest { trees: keyed.into_iter().map(|(_, t)| t).collect(), key, size }
    }

    pub fn empty() -> Self {
        Forest::new(Vec::new())
    }

    pub fn tree(t: Tree) -> Self {
        Forest::new(vec![t])
    }

    /// `n` isolated vertices.
    pub fn singletons(n: usize) -> Self {
        Forest::new(vec![Tree::leaf(None); n])
    }

    /// Whitespace-separated trees in [`Tree::parse`] notation.
    pub fn parse(s: &str) -> Result<Self> {
        let trees = s.split_whitespace().map(Tree::parse).collect::<Result<Vec<_>>>()?;
        Ok(Forest::new(trees))
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn union(&self, other: &Forest) -> Forest {
        let mut t = self.trees.clone();
        t.extend(other.trees.iter().cloned());
        Forest::new(t)
    }

    /// The forest minus its isolated vertices, and how many there were.
    pub fn split_singletons(&self) -> (usize, Forest) {
        let (single, rest): (Vec<&Tree>, Vec<&Tree>) = self.trees.iter().partition(|t| t.children.is_empty());
        (single.len(), Forest::new(rest.into_iter().cloned().collect()))
    }

    pub fn arena(&self) -> Arena {
        Arena::from_forest(self)
    }
}

/// Every unlabelled forest on `n` vertices, sorted.
pub fn unlabelled_forests(n: usize) -> Vec<Forest> {
    let mut by_size: Vec<Vec<Forest>> = vec![vec![Forest::empty()]];
    for m in 1..=n {
        let mut found = std::collections::BTreeSet::new();
        for k in 1..=m {
            for below in &by_size[k - 1] {
                let t = Forest::tree(Tree::new(None, below.trees().to_vec()));
                for rest in &by_size[m - k] {
                    found.insert(t.union(rest));
                }
            }
        }
        by_size.push(found.into_iter().collect());
    }
    by_size.swap_remove(n)
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn show(t: &Tree, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{}", t.label.as_deref().unwrap_or("•"))?;
            if !t.children.is_empty() {
                write!(f, "(")?;
                for (i, c) in t.children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    show(c, f)?;
                }
                write!(f, ")")?;
            }
            Ok(())
        }
        if self.trees.is_empty() {
            return write!(f, "∅");
        }
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            show(t, f)?;
        }
        Ok(())
    }
}

impl StateCodec for Forest {
    fn to_json(&self) -> Value {
        Value::Array(self.trees.iter().map(Tree::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected a forest array, got {v}")))?;
        Ok(Forest::new(arr.iter().map(Tree::from_json).collect::<Result<_>>()?))
    }
}

/// Index-addressed copy of a forest for vertex-level work.
#[derive(Clone, Debug)]
pub struct Arena {
    pub label: Vec<Option<String>>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub roots: Vec<usize>,
}

impl Arena {
    pub fn from_forest(f: &Forest) -> Self {
        let mut a = Arena { label: Vec::new(), parent: Vec::new(), children: Vec::new(), roots: Vec::new() };
        for t in f.trees() {
            let r = a.push(t, None);
            a.roots.push(r);
        }
        a
    }

    fn push(&mut self, t: &Tree, parent: Option<usize>) -> usize {
        let v = self.label.len();
        self.label.push(t.label.clone());
        self.parent.push(parent);
        self.children.push(Vec::new());
        for c in &t.children {
            let w = self.push(c, Some(v));
            self.children[v].push(w);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    /// Hook length: the number of descendants of `v`, itself included.
    pub fn hook(&self, v: usize) -> usize {
        1 + self.children[v].iter().map(|&c| self.hook(c)).sum::<usize>()
    }

    /// Number of ancestors of `v`, itself included.
    pub fn depth(&self, v: usize) -> usize {
        let mut d = 1;
        let mut u = v;
        while let Some(p) = self.parent[u] {
            d += 1;
            u = p;
        }
        d
    }

    /// All strict descendants of `v`.
    pub fn descendants(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = self.children[v].clone();
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().copied());
        }
        out.sort_unstable();
        out
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// The forest induced on the kept vertices; a kept vertex whose parent is
    /// dropped becomes an (unlabelled) root.
    pub fn induced(&self, keep: &[bool]) -> Forest {
        let mut trees = Vec::new();
        for v in 0..self.len() {
            if keep[v] && self.parent[v].map_or(true, |p| !keep[p]) {
                trees.push(self.build(v, keep));
            }
        }
        Forest::new(trees)
    }

    fn build(&self, v: usize, keep: &[bool]) -> Tree {
        let children = self.children[v].iter().filter(|&&c| keep[c]).map(|&c| self.build(c, keep)).collect();
        Tree::new(self.label[v].clone(), children)
    }

    /// Every nonempty rooted subtree at `v`, as vertex masks.
    pub fn rooted_subtrees(&self, v: usize) -> Vec<Vec<bool>> {
        let mut acc = vec![{
            let mut m = vec![false; self.len()];
            m[v] = true;
            m
        }];
        for &c in &self.children[v] {
            let sub = self.rooted_subtrees(c);
            let mut next = Vec::with_capacity(acc.len() * (sub.len() + 1));
            for m in &acc {
                next.push(m.clone());
                for s in &sub {
                    next.push(m.iter().zip(s).map(|(a, b)| *a || *b).collect());
                }
            }
            acc = next;
        }
        acc
    }

    /// Trunks: unions over components of a possibly empty rooted subtree.
    pub fn trunks(&self) -> Vec<Vec<bool>> {
        let mut acc = vec![vec![false; self.len()]];
        for &r in &self.roots {
            let sub = self.rooted_subtrees(r);
            let mut next = Vec::with_capacity(acc.len() * (sub.len() + 1));
            for m in &acc {
                next.push(m.clone());
                for s in &sub {
                    next.push(m.iter().zip(s).map(|(a, b)| *a || *b).collect());
                }
            }
            acc = next;
        }
        acc
    }
}

/// Decorated Connes–Kreimer algebra: disjoint-union product; `Δ(x) = Σ (x∖S) ⊗ S`
/// over trunks `S`, crown on the left.
#[derive(Clone, Debug, Default)]
pub struct ConnesKreimer;

impl HopfAlgebra for ConnesKreimer {
    type Basis = Forest;

    fn id(&self) -> &'static str {
        "ck"
    }

    fn degree(&self, x: &Forest) -> usize {
        x.size()
    }

    fn unit(&self) -> Forest {
        Forest::empty()
    }

    fn product(&self, a: &Forest, b: &Forest) -> Element<Forest> {
        Element::basis(a.union(b))
    }

    fn coproduct_component(&self, x: &Forest, i: usize) -> Vec<(Forest, Forest, Rational)> {
        let arena = x.arena();
        let n = arena.len();
        let mut acc: BTreeMap<(Forest, Forest), Rational> = BTreeMap::new();
        for s in arena.trunks() {
            if s.iter().filter(|&&b| b).count() != n - i {
                continue;
            }
            let crown: Vec<bool> = s.iter().map(|b| !b).collect();
            let key = (arena.induced(&crown), arena.induced(&s));
            *acc.entry(key).or_insert_with(Rational::zero) += Rational::one();
        }
        acc.into_iter().map(|((l, r), c)| (l, r, c)).collect()
    }

    fn is_commutative(&self) -> bool {
        true
    }

    fn is_cocommutative(&self) -> bool {
        false
    }

    fn degree_one_monomial(&self, x: &Forest) -> Option<bool> {
        Some(x.trees().iter().all(|t| t.children.is_empty()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::Hopf;
    use crate::rational::{factorial, int};

    #[test]
    fn forest_counts() {
        let counts: Vec<usize> = (0..=6).map(|n| unlabelled_forests(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48]);
    }

    #[test]
    fn canonical_forms() {
        let a = Forest::parse("*(C(D),A)").unwrap();
        let b = Forest::parse("X(A,C(D))").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.size(), 4);
        let back = Forest::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.to_string(), "•(A,C(D))");
        assert!(Forest::singletons(1) < Forest::parse("*(A)").unwrap());
    }

    #[test]
    fn leaf_and_root_removal_components() {
        let t0 = Forest::parse("*(A,C(D))").unwrap();
        let mut top = ConnesKreimer.coproduct_component(&t0, 1);
        top.sort();
        let mut expect = vec![
            (Forest::singletons(1), Forest::parse("*(C(D))").unwrap(), int(1)),
            (Forest::singletons(1), Forest::parse("*(A,C)").unwrap(), int(1)),
        ];
        expect.sort();
        assert_eq!(top, expect);
        let bottom = ConnesKreimer.coproduct_component(&t0, 3);
        assert_eq!(bottom, vec![(Forest::parse("* *(D)").unwrap(), Forest::singletons(1), int(1))]);
    }

    #[test]
    fn eta_matches_hook_formula_and_labellings() {
        let h = Hopf::new(ConnesKreimer);
        let t0 = Forest::parse("*(A,C(D))").unwrap();
        assert_eq!(h.eta(&t0), int(3));
        for s in ["*(a(b,c),d(e))", "*(a,b,c)", "* *(a) *(b(c))", "*(a(b(c(d(e)))))"] {
            let f = Forest::parse(s).unwrap();
            let ar = f.arena();
            let hooks: usize = (0..ar.len()).map(|v| ar.hook(v)).product();
            let expect = Rational::new(factorial(ar.len()), hooks.into());
            assert_eq!(h.eta(&f), expect, "{s}");
            assert_eq!(increasing_labellings(&ar), expect, "{s}");
        }
    }

    fn increasing_labellings(ar: &Arena) -> Rational {
        // brute force over all bijections
        use itertools::Itertools;
        let n = ar.len();
        let count = (0..n)
            .permutations(n)
            .filter(|lab| (0..n).all(|v| ar.parent[v].map_or(true, |p| lab[p] < lab[v])))
            .count();
        int(count as i64)
    }
}
